#!/usr/bin/python3

"""Module for post-processing ensemble tables: decay-rate fits, paired
variance comparisons and SVG plots of single runs."""

import math
import os

import numpy as np
from scipy import stats

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from agesampler import utils
from agesampler import models

MSE_GAMMA = "mse_gamma"
REGRET_OVER_LNK = "regret_over_lnK"
QUANTITIES = [MSE_GAMMA, REGRET_OVER_LNK]

MIN_FIT_POINTS = 3
PAIR_KEYS = ['seed', 'K']

PLOT_FILES = {'gamma': 'gamma_trace.svg',
              'aoi': 'aoi_trace.svg',
              'interval': 'interval_trace.svg',
              'regret': 'regret_lnK.svg'}


class FitReport(object):
    """Least-squares line through (x, y) points"""

    def __init__(self, slope, intercept, r2, n_points):
        self.slope = slope
        self.intercept = intercept
        self.r2 = r2
        self.n_points = n_points

    def to_record(self, quantity, variant):
        return {'quantity': quantity,
                'variant': variant,
                'slope': self.slope,
                'intercept': self.intercept,
                'r2': self.r2,
                'n_points': self.n_points}

    def __repr__(self):
        return "<FitReport slope=%r intercept=%r r2=%r n=%d>" % \
            (self.slope, self.intercept, self.r2, self.n_points)


def _single_variant(table, variant, label):
    variants = table.get_distinct('variant')
    if variant is None:
        if len(variants) != 1:
            raise utils.InvalidArgument('%s variant' % label, None, variants)
        return variants[0]
    if variant not in variants:
        raise utils.InvalidArgument('%s variant' % label, variant, variants)
    return variant


def fit_line(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < MIN_FIT_POINTS:
        raise utils.DegenerateFit("%d points, need %d"
                                  % (len(x), MIN_FIT_POINTS))
    if np.ptp(x) == 0:
        raise utils.DegenerateFit("regressor has zero variance")
    try:
        fit = stats.linregress(x, y)
    except ValueError as e:
        raise utils.DegenerateFit(str(e))
    return FitReport(float(fit.slope), float(fit.intercept),
                     float(fit.rvalue ** 2), len(x))


def fit_error_decay(table, quantity, variant=None):
    """Fit log(mean squared error) against log K, or mean regret against
    ln K, over the checkpoints of one variant of an ensemble summary."""
    if quantity not in QUANTITIES:
        raise utils.InvalidArgument('quantity', quantity, QUANTITIES)
    variant = _single_variant(table, variant, 'fit')
    rows = sorted(table.get_rows(variant=variant), key=lambda rec: rec['K'])
    K = np.array([row['K'] for row in rows], dtype=float)
    if quantity == MSE_GAMMA:
        means = np.array([row['sq_err_mean'] for row in rows])
        if len(means) and not np.all(means > 0):
            raise utils.DegenerateFit("non-positive mean in %s" % means)
        report = fit_line(np.log(K), np.log(means))
    else:
        means = np.array([row['regret_mean'] for row in rows])
        report = fit_line(np.log(K), means)
    utils.log.info("Fit %s for %s: %s" % (quantity, variant, report))
    return report


def fit_table(table, quantity, variant=None):
    variant = _single_variant(table, variant, 'fit')
    out = models.FIT.new_table(table.get_comments()[1:])
    out.append(fit_error_decay(table, quantity, variant).to_record(quantity,
                                                                   variant))
    return out


def _check_pairing(rows_a, rows_b):
    missing = rows_a.get_missing(rows_b, PAIR_KEYS) + \
        rows_b.get_missing(rows_a, PAIR_KEYS)
    missing = sorted(set((rec['seed'], rec['K']) for rec in missing))
    if missing:
        raise utils.UnpairedSeeds(missing)
    channels = sorted(set(rows_a.get_distinct('channel_id') +
                          rows_b.get_distinct('channel_id')))
    if len(channels) > 1:
        raise utils.MixedChannel(channels)


def _gamma_std(values):
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1))


def compare_variance(table_a, table_b, variant_a=None, variant_b=None):
    """Per checkpoint, std of gamma_K and its mean squared error for two
    variants run on the same seeds. Ratios are b over a."""
    variant_a = _single_variant(table_a, variant_a, 'compare a')
    variant_b = _single_variant(table_b, variant_b, 'compare b')
    rows_a = models.ENSEMBLE_RAW.new_table(table_a.get_comments()[1:])
    rows_b = models.ENSEMBLE_RAW.new_table()
    for rec in table_a.get_rows(variant=variant_a):
        rows_a.append(rec)
    for rec in table_b.get_rows(variant=variant_b):
        rows_b.append(rec)
    _check_pairing(rows_a, rows_b)

    report = models.COMPARE.new_table(
        ["a=%s" % variant_a, "b=%s" % variant_b])
    for K in sorted(rows_a.get_distinct('K')):
        a = sorted(rows_a.get_rows(K=K), key=lambda rec: rec['seed'])
        b = sorted(rows_b.get_rows(K=K), key=lambda rec: rec['seed'])
        std_a = _gamma_std([rec['gamma'] for rec in a])
        std_b = _gamma_std([rec['gamma'] for rec in b])
        mse_a = float(np.mean([rec['sq_err'] for rec in a]))
        mse_b = float(np.mean([rec['sq_err'] for rec in b]))
        std_ratio = models.nan_ratio(std_b, std_a)
        mse_ratio = models.nan_ratio(mse_b, mse_a)
        if math.isnan(std_ratio) or math.isnan(mse_ratio):
            utils.log.warning("K=%d: '%s' has zero std or mse, ratio is NA"
                              % (K, variant_a))
        report.append({'K': K,
                       'n': len(a),
                       'std_a': std_a,
                       'std_b': std_b,
                       'std_ratio': std_ratio,
                       'mse_a': mse_a,
                       'mse_b': mse_b,
                       'mse_ratio': mse_ratio})
    return report


def _line_chart(path, x, series, xlabel, ylabel, reference=None):
    fig, ax = plt.subplots()
    for label, y in series:
        ax.plot(x, y, label=label)
    if reference is not None and math.isfinite(reference[1]):
        ax.axhline(reference[1], color='k', linestyle='--',
                   label=reference[0])
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(linestyle='--')
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format='svg')
    plt.close(fig)
    utils.log.debug("Wrote plot %s" % path)
    return path


def plot_run(result, directory):
    """gamma, time-average AoI and sampling-interval traces of one run.
    Returns the list of files written."""
    records = result.get_records()
    k = records['k'][1:]
    solution = result.solution
    gamma_star = solution.gamma_star if solution else math.nan
    aoi_opt = solution.aoi_opt if solution else math.nan
    aoi = [result.time_average_aoi(i) for i in range(1, len(records))]
    paths = [
        _line_chart(os.path.join(directory, PLOT_FILES['gamma']), k,
                    [(result.config.policy, records['gamma'][1:])],
                    'epoch k', 'gamma_k', ('gamma*', gamma_star)),
        _line_chart(os.path.join(directory, PLOT_FILES['aoi']), k,
                    [(result.config.policy, aoi)],
                    'epoch k', 'time-average AoI', ('AoI_opt', aoi_opt)),
        _line_chart(os.path.join(directory, PLOT_FILES['interval']), k,
                    [(result.config.policy, records['interval'][1:])],
                    'epoch k', 'mean sampling interval',
                    None if utils.is_inf(result.config.f_max) else
                    ('1/f_max', 1.0 / result.config.f_max))]
    return paths


def plot_regret(summary, directory):
    """Mean regret over ln K, one line per variant."""
    series = []
    lnK = None
    for variant in summary.get_distinct('variant'):
        rows = sorted(summary.get_rows(variant=variant),
                      key=lambda rec: rec['K'])
        lnK = np.log([row['K'] for row in rows])
        series.append((variant, [row['regret_mean'] for row in rows]))
    return _line_chart(os.path.join(directory, PLOT_FILES['regret']), lnK,
                       series, 'ln K', 'mean regret')
