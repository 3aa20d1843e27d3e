#!/usr/bin/python3

"""Module for the table models every command reads and writes.

Each CSV starts with a versioned header comment ('agesampler-<name> vN')
followed by free-form '# key=value' comments and a typed header row."""

import math
import os

from agesampler import utils
from agetools import rng as agerng
from agetools.table import Table

HEADER_PREFIX = "agesampler-"


class TableSchema(object):
    """Model for one CSV table type: name, version and typed columns"""

    def __init__(self, name, version, columns):
        self.name = name
        self.version = version
        self.columns = columns

    def get_fields(self):
        return [field for field, _ in self.columns]

    def get_types(self):
        return dict(self.columns)

    def header_comment(self):
        return "%s%s v%d" % (HEADER_PREFIX, self.name, self.version)

    def new_table(self, comments=None):
        return Table(self.get_fields(), self.get_types(),
                     comments=[self.header_comment()] + list(comments or []))

    def check(self, table, source):
        comments = table.get_comments()
        if not comments or comments[0] != self.header_comment():
            found = comments[0] if comments else None
            raise utils.InvalidArgument('%s header' % source, found,
                                        self.header_comment())
        missing = [f for f in self.get_fields() if f not in table.get_fields()]
        if missing:
            raise utils.InvalidArgument('%s columns' % source, missing,
                                        self.get_fields())
        return table

    def from_csv(self, text, source='table'):
        return self.check(Table.from_csv(text, self.get_types()), source)

    def read(self, path):
        if not os.path.isfile(path):
            raise utils.ConfigFileNotFound(path, "%s table" % self.name)
        utils.log.debug("Reading %s table: %s" % (self.name, path))
        return self.check(Table.read(path, self.get_types()), path)


TRACE = TableSchema('trace', 1, [('k', 'int'),
                                 ('gamma', 'float'),
                                 ('nu', 'float'),
                                 ('U', 'float'),
                                 ('M', 'int'),
                                 ('d_f', 'float'),
                                 ('D_a', 'float'),
                                 ('D_v', 'float'),
                                 ('W', 'float'),
                                 ('L', 'float'),
                                 ('F', 'float'),
                                 ('S_next', 'float'),
                                 ('cum_aoi', 'float'),
                                 ('regret', 'float'),
                                 ('samples', 'int'),
                                 ('interval', 'float')])

ENSEMBLE_RAW = TableSchema('ensemble-raw', 1, [('variant', 'str'),
                                               ('seed', 'int'),
                                               ('K', 'int'),
                                               ('aoi', 'float'),
                                               ('gamma', 'float'),
                                               ('sq_err', 'float'),
                                               ('regret', 'float'),
                                               ('interval', 'float'),
                                               ('channel_id', 'str')])

ENSEMBLE_SUMMARY = TableSchema('ensemble', 1, [('variant', 'str'),
                                               ('K', 'int'),
                                               ('n', 'int'),
                                               ('aoi_mean', 'float'),
                                               ('aoi_std', 'float'),
                                               ('gamma_mean', 'float'),
                                               ('gamma_std', 'float'),
                                               ('sq_err_mean', 'float'),
                                               ('sq_err_std', 'float'),
                                               ('regret_mean', 'float'),
                                               ('regret_std', 'float'),
                                               ('interval_mean', 'float'),
                                               ('interval_std', 'float'),
                                               ('mse_bound', 'float'),
                                               ('regret_bound', 'float')])

ORACLE = TableSchema('oracle', 1, [('gamma_star', 'float'),
                                   ('nu_star', 'float'),
                                   ('theta_star', 'float'),
                                   ('aoi_opt', 'float'),
                                   ('L_star', 'float'),
                                   ('n_samples', 'int'),
                                   ('ci_halfwidth', 'float'),
                                   ('method', 'str')])

FIT = TableSchema('fit', 1, [('quantity', 'str'),
                             ('variant', 'str'),
                             ('slope', 'float'),
                             ('intercept', 'float'),
                             ('r2', 'float'),
                             ('n_points', 'int')])

COMPARE = TableSchema('compare', 1, [('K', 'int'),
                                     ('n', 'int'),
                                     ('std_a', 'float'),
                                     ('std_b', 'float'),
                                     ('std_ratio', 'float'),
                                     ('mse_a', 'float'),
                                     ('mse_b', 'float'),
                                     ('mse_ratio', 'float')])


def run_comments(config):
    return ["channel=%s" % config.channel.describe(),
            "policy=%s" % config.policy,
            "seed=%d" % config.seed,
            "f_max=%r" % config.f_max,
            "include_warmup=%s" % str(config.include_warmup).lower(),
            "rng=%s" % agerng.ALGORITHM]


def record_to_rec(record):
    rec = {}
    for field, kind in TRACE.columns:
        value = record[field]
        rec[field] = int(value) if kind == 'int' else float(value)
    return rec


def trace_table(result, stride=None):
    """One row per stride epochs; the warm-up row and the last epoch are
    always written."""
    stride = stride or result.config.trace_stride
    records = result.get_records()
    K = len(records) - 1
    if stride > K:
        utils.log.warning("Trace stride %d exceeds the horizon, clamped to %d"
                          % (stride, K))
        stride = max(K, 1)
    table = TRACE.new_table(run_comments(result.config))
    for k in range(K + 1):
        if k == 0 or k == K or k % stride == 0:
            table.append(record_to_rec(records[k]))
    return table


def oracle_table(solution, comments=None):
    table = ORACLE.new_table(comments)
    table.append(solution.to_record())
    return table


def nan_ratio(numerator, denominator):
    if denominator == 0 or math.isnan(denominator) or math.isnan(numerator):
        return math.nan
    return numerator / denominator
