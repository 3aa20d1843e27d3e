#!/usr/bin/python3

"""Module for running many seeds of one or more policy variants over the
same channel and collecting per-checkpoint statistics.

Seeds are base_seed + i for i < n_seeds and are shared by every variant,
so variant results are paired seed by seed. Runs fan out over a process
pool sized by AGESAMPLER_WORKERS (1 runs everything in-process)."""

import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from agesampler import utils
from agesampler import learner
from agesampler import models
from agesampler import policy
from agesampler import simulator

VARIANT_FIELDS = ['V', 'momentum_a']


class Variant(object):
    """A policy plus optional hyper-parameter overrides, labelled for the
    result tables"""

    def __init__(self, policy_spec, label=None, overrides=None):
        policy.parse_policy_spec(policy_spec)
        self.policy = policy_spec
        self.overrides = dict(overrides or {})
        for key in self.overrides.keys():
            if key not in VARIANT_FIELDS:
                raise utils.InvalidArgument('variant override', key,
                                            VARIANT_FIELDS)
        if label is None:
            label = policy_spec
            for key in sorted(self.overrides.keys()):
                label += ",%s=%s" % (key, self.overrides[key])
        self.label = label

    @classmethod
    def from_record(cls, rec):
        overrides = dict((key, rec[key]) for key in VARIANT_FIELDS
                         if key in rec)
        return cls(rec['policy'], rec.get('label'), overrides)

    def apply(self, base):
        return base.copy_with(policy=self.policy, **self.overrides)


class EnsembleSpec(object):

    def __init__(self, base, n_seeds, checkpoints, comparisons=None):
        if int(n_seeds) != n_seeds or n_seeds < 1:
            raise utils.InvalidArgument('n_seeds', n_seeds, 'integer >= 1')
        if not checkpoints:
            raise utils.InvalidArgument('checkpoints', checkpoints,
                                        'non-empty list')
        for prev, curr in zip(checkpoints, checkpoints[1:]):
            if not curr > prev:
                raise utils.InvalidArgument('checkpoints', checkpoints,
                                            'strictly increasing')
        if checkpoints[0] < 1 or checkpoints[-1] > base.horizon_epochs:
            raise utils.InvalidArgument('checkpoints', checkpoints,
                                        '1 <= k <= %d' % base.horizon_epochs)
        self.base = base
        self.n_seeds = int(n_seeds)
        self.checkpoints = list(checkpoints)
        self.comparisons = list(comparisons or [])
        labels = [variant.label for variant in self.get_variants()]
        if len(set(labels)) != len(labels):
            raise utils.InvalidArgument('comparisons', labels,
                                        'distinct labels')

    def get_variants(self):
        return self.comparisons or [Variant(self.base.policy)]

    def get_seeds(self):
        return [self.base.seed + i for i in range(self.n_seeds)]


def get_worker_count():
    value = os.environ.get(utils.WORKERS_ENV, '1')
    try:
        workers = int(value)
    except ValueError:
        raise utils.InvalidArgument(utils.WORKERS_ENV, value, 'integer >= 1')
    if workers < 1:
        raise utils.InvalidArgument(utils.WORKERS_ENV, value, 'integer >= 1')
    return workers


def checkpoint_rows(result, label, checkpoints, solution):
    records = result.get_records()
    channel_id = result.config.channel.describe()
    rows = []
    for K in checkpoints:
        gamma = float(records[K]['gamma'])
        rows.append({'variant': label,
                     'seed': result.config.seed,
                     'K': K,
                     'aoi': result.time_average_aoi(K),
                     'gamma': gamma,
                     'sq_err': (gamma - solution.gamma_star) ** 2,
                     'regret': float(records[K]['regret']),
                     'interval': result.mean_interval(K),
                     'channel_id': channel_id})
    return rows


def run_task(task):
    """Run one (variant, seed) pair; module level so it can be pickled."""
    label, config, checkpoints, solution = task
    result = simulator.run(config, solution)
    return label, config.seed, checkpoint_rows(result, label, checkpoints,
                                               solution), result.bounds


def build_tasks(spec, solution):
    tasks = []
    for variant in spec.get_variants():
        base = variant.apply(spec.base)
        for seed in spec.get_seeds():
            tasks.append((variant.label, base.copy_with(seed=seed),
                          spec.checkpoints, solution))
    return tasks


@utils.log_exceptions
def run_ensemble(spec, solution=None, workers=None):
    """Returns (raw table, summary table). The oracle is solved once for
    the shared channel and f_max unless a solution is passed in."""
    solution = solution or simulator.solve_oracle(spec.base)
    tasks = build_tasks(spec, solution)
    workers = workers or get_worker_count()
    utils.log.info("Ensemble: %d runs over %d variants, %d workers"
                   % (len(tasks), len(spec.get_variants()), workers))

    if workers == 1:
        outputs = [run_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(run_task, tasks))

    order = [variant.label for variant in spec.get_variants()]
    outputs.sort(key=lambda out: (order.index(out[0]), out[1]))

    raw = models.ENSEMBLE_RAW.new_table(
        ["channel=%s" % spec.base.channel.describe(),
         "f_max=%r" % spec.base.f_max,
         "gamma_star=%r" % solution.gamma_star,
         "aoi_opt=%r" % solution.aoi_opt])
    bounds = {}
    for label, _, rows, run_bounds in outputs:
        for row in rows:
            raw.append(row)
        if run_bounds is not None:
            bounds.setdefault(label, run_bounds)
    return raw, summarize(raw, bounds)


def _mean_std(values):
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return math.nan, math.nan
    std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return float(np.mean(values)), std


def _finite_or_nan(value):
    return value if math.isfinite(value) else math.nan


def summarize(raw, bounds=None):
    """Mean and std per (variant, K). Values are ordered by seed before
    reduction so the result does not depend on row order."""
    bounds = bounds or {}
    channel_ids = raw.get_distinct('channel_id')
    if len(channel_ids) > 1:
        raise utils.MixedChannel(channel_ids)

    summary = models.ENSEMBLE_SUMMARY.new_table(raw.get_comments()[1:])
    for label in raw.get_distinct('variant'):
        for K in sorted(raw.get_distinct('K')):
            rows = sorted(raw.get_rows(variant=label, K=K),
                          key=lambda rec: rec['seed'])
            if not rows:
                continue
            rec = {'variant': label, 'K': K, 'n': len(rows)}
            for field in ['aoi', 'gamma', 'sq_err', 'regret', 'interval']:
                mean, std = _mean_std([row[field] for row in rows])
                rec['%s_mean' % field] = mean
                rec['%s_std' % field] = std
            rec['mse_bound'] = math.nan
            rec['regret_bound'] = math.nan
            if label in bounds:
                rec['mse_bound'] = _finite_or_nan(
                    learner.mse_bound(bounds[label], K))
                rec['regret_bound'] = _finite_or_nan(
                    learner.regret_bound(bounds[label], K))
            summary.append(rec)
    return summary
