#!/usr/bin/python3

"""Epoch-by-epoch simulation of a sampling policy with exact
continuous-time AoI accounting.

Time starts at t=0 with a sample. The failed attempts before the first
success form row 0 of the trace (the warm-up); epoch k >= 1 starts at the
sampling instant S_k of its successful first attempt and ends at S_{k+1}.
The AoI area over [S_k, S_{k+1}] is

    F_k = D^F_k L_{k-1} + 1/2 L_k^2

so sum(F_0..F_K) is the integral of A(t) over [0, S_{K+1}].
"""

import math

import numpy as np

from agesampler import utils
from agesampler import channel
from agesampler import policy
from agesampler import learner
from agesampler import oracle
from agetools import rng as agerng

RECORD_DTYPE = np.dtype([('k', np.int64),
                         ('gamma', float),
                         ('nu', float),
                         ('U', float),
                         ('M', np.int64),
                         ('d_f', float),
                         ('D_a', float),
                         ('D_v', float),
                         ('W', float),
                         ('L', float),
                         ('F', float),
                         ('S_next', float),
                         ('cum_aoi', float),
                         ('regret', float),
                         ('samples', np.int64),
                         ('interval', float)])

PRIORS_EXACT = "exact"


class RunConfig(object):
    """Everything one simulation run depends on."""

    def __init__(self, channel_params, policy_spec, horizon_epochs,
                 f_max=utils.INF, V=utils.DEFAULT_V, seed=0, priors=None,
                 gamma_cap=None, gamma0=None,
                 momentum_a=utils.DEFAULT_MOMENTUM_A,
                 pilot_epochs=utils.DEFAULT_PILOT_EPOCHS, trace_stride=1,
                 include_warmup=True, oracle_n=utils.DEFAULT_ORACLE_N,
                 oracle_tol=utils.DEFAULT_ORACLE_TOL, crn_seed=0,
                 oracle_method=oracle.METHOD_AUTO):
        self.channel = channel_params
        self.policy = policy_spec
        self.policy_name, self.policy_theta = policy.parse_policy_spec(
            policy_spec)
        if int(horizon_epochs) != horizon_epochs or horizon_epochs < 1:
            raise utils.InvalidArgument('horizon_epochs', horizon_epochs,
                                        'integer >= 1')
        self.horizon_epochs = int(horizon_epochs)
        f_max = utils.INF if f_max is None else float(f_max)
        if not f_max > 0:
            raise utils.InvalidArgument('f_max', f_max, 'f_max > 0 or inf')
        self.f_max = f_max
        if not V > 0:
            raise utils.InvalidArgument('V', V, 'V > 0')
        self.V = float(V)
        if int(seed) != seed or seed < 0:
            raise utils.InvalidArgument('seed', seed,
                                        'non-negative integer')
        self.seed = int(seed)
        if priors is not None and priors != PRIORS_EXACT and \
                not isinstance(priors, learner.MomentPriors):
            raise utils.InvalidArgument('priors', priors,
                                        [None, PRIORS_EXACT, 'MomentPriors'])
        self.priors = priors
        if gamma_cap is not None and not gamma_cap > 0:
            raise utils.InvalidArgument('gamma_cap', gamma_cap, 'x > 0')
        self.gamma_cap = gamma_cap
        self.gamma0 = gamma0
        if not 0 < momentum_a <= 1:
            raise utils.InvalidArgument('momentum_a', momentum_a,
                                        '0 < a <= 1')
        self.momentum_a = float(momentum_a)
        self.pilot_epochs = int(pilot_epochs)
        if int(trace_stride) != trace_stride or trace_stride < 1:
            raise utils.InvalidArgument('trace_stride', trace_stride,
                                        'integer >= 1')
        self.trace_stride = int(trace_stride)
        self.include_warmup = utils.to_bool(include_warmup)
        self.oracle_n = oracle_n
        self.oracle_tol = oracle_tol
        self.crn_seed = crn_seed
        self.oracle_method = oracle_method

    def is_learning(self):
        return self.policy_name in policy.LEARNING_SPECS

    def copy_with(self, **changes):
        """A new config with some fields replaced."""
        new = RunConfig.__new__(RunConfig)
        new.__dict__.update(self.__dict__)
        for key, value in changes.items():
            if key not in new.__dict__:
                raise utils.InvalidArgument('run config field', key,
                                            sorted(self.__dict__.keys()))
            setattr(new, key, value)
        if 'policy' in changes:
            new.policy_name, new.policy_theta = policy.parse_policy_spec(
                changes['policy'])
        return new


class RunResult(object):
    """Per-epoch records (row 0 is the warm-up) plus summaries."""

    def __init__(self, config, records, solution=None, bounds=None):
        self.config = config
        self.records = records
        self.solution = solution
        self.bounds = bounds

    def get_records(self):
        return self.records

    def horizon(self):
        return len(self.records) - 1

    def _window(self, k):
        """(cumulative area, elapsed time) up to S_{k+1}, honouring the
        warm-up convention."""
        row = self.records[k]
        if self.config.include_warmup:
            return row['cum_aoi'], row['S_next']
        if k < 2:
            return 0.0, 0.0
        first = self.records[1]
        return (row['cum_aoi'] - first['cum_aoi'],
                row['S_next'] - first['S_next'])

    def time_average_aoi(self, k=None):
        k = self.horizon() if k is None else k
        area, elapsed = self._window(k)
        if elapsed <= 0:
            return math.nan
        return float(area / elapsed)

    def mean_interval(self, k=None):
        k = self.horizon() if k is None else k
        return float(self.records[k]['interval'])

    def final_gamma(self):
        return float(self.records[-1]['gamma'])

    def get_summary(self):
        K = self.horizon()
        return {'K': K,
                'policy': self.config.policy,
                'seed': self.config.seed,
                'time_avg_aoi': self.time_average_aoi(K),
                'mean_interval': self.mean_interval(K),
                'final_gamma': self.final_gamma(),
                'regret': float(self.records[K]['regret']),
                'elapsed': float(self.records[K]['S_next']),
                'samples': int(self.records[K]['samples'])}


def epoch_aoi(d_f_first, L_prev, L_curr):
    return d_f_first * L_prev + 0.5 * L_curr * L_curr


def make_bounds(config, streams):
    """Threshold bounds for a learning run: from priors when given,
    from a zero-wait pilot otherwise."""
    priors = config.priors
    if priors == PRIORS_EXACT:
        priors = learner.MomentPriors.from_channel(config.channel)
    if priors is not None:
        return learner.gamma_bounds_from_priors(priors, config.f_max)
    return learner.gamma_bounds_from_pilot(
        config.channel, streams.get_stream(agerng.PILOT, 0),
        config.pilot_epochs, config.gamma_cap)


def solve_oracle(config):
    return oracle.solve(config.channel, config.f_max, config.oracle_n,
                        config.oracle_tol, config.crn_seed,
                        config.oracle_method)


def fixed_policy(config, solution=None):
    name = config.policy_name
    if name == policy.FIXED_THRESHOLD:
        return policy.Policy.threshold(config.policy_theta)
    if name == policy.CONSTANT_WAIT:
        return policy.constant_wait_from_moments(
            channel.analytic_moments(config.channel), config.f_max)
    if name == policy.ZERO_WAIT:
        return policy.Policy.zero_wait()
    solution = solution or solve_oracle(config)
    return policy.Policy.threshold(solution.theta_star)


def regret(result, solution):
    """Cumulative AoI minus AoI_opt times elapsed time, per epoch."""
    records = result.get_records()
    cum = records['cum_aoi']
    elapsed = records['S_next']
    if result.config.include_warmup:
        return cum - solution.aoi_opt * elapsed
    if len(records) < 2:
        return np.zeros(len(records))
    # Epochs whose area depends on the warm-up are left out
    series = (cum - cum[1]) - solution.aoi_opt * (elapsed - elapsed[1])
    series[:2] = 0.0
    return series


def run(config, solution=None):
    """Simulate config.horizon_epochs epochs. When an oracle solution is
    given (or the policy needs one) the regret column is filled,
    otherwise it holds NaN."""
    streams = agerng.StreamFactory(config.seed)
    params = config.channel
    K = config.horizon_epochs

    state = None
    bounds = None
    fixed = None
    if config.is_learning():
        bounds = make_bounds(config, streams)
        state = learner.LearnerState(
            bounds, config.V, config.gamma0,
            config.policy_name == policy.ONLINE_MOMENTUM, config.momentum_a)
    else:
        if config.policy_name == policy.OPTIMAL and solution is None:
            solution = solve_oracle(config)
        fixed = fixed_policy(config, solution)

    records = np.zeros(K + 1, dtype=RECORD_DTYPE)

    warmup = channel.sample_warmup(params,
                                   streams.get_stream(agerng.WARMUP, 0))
    L_prev = sum([d_f + d_b for d_f, d_b in warmup], 0.0)
    cum = epoch_aoi(0.0, 0.0, L_prev)
    elapsed = L_prev
    samples = len(warmup)
    records[0] = (0, math.nan, 0.0, 0.0, len(warmup), 0.0, 0.0, L_prev, 0.0,
                  L_prev, cum, elapsed, cum, math.nan, samples,
                  elapsed / samples if samples else math.nan)

    prev = {'M': len(warmup), 'D_a': 0.0, 'W': 0.0}
    D_v_prev = L_prev
    gamma, nu, U = _policy_columns(fixed, solution, config)
    for k in range(1, K + 1):
        epoch = channel.sample_epoch(params, streams.get_epoch_stream(k), k)
        if state is not None:
            state = learner.begin_epoch_update(state, epoch.D_a, D_v_prev,
                                               prev, config.f_max)
            current = state.get_policy()
            gamma, nu, U = state.gamma, state.nu, state.U
        else:
            current = fixed
        epoch.set_wait(policy.waiting_time(current, epoch.D_a, True))

        F = epoch_aoi(epoch.get_d_f(), L_prev, epoch.L)
        cum += F
        elapsed += epoch.L
        samples += epoch.M
        records[k] = (k, gamma, nu, U, epoch.M, epoch.get_d_f(), epoch.D_a,
                      epoch.D_v, epoch.W, epoch.L, F, elapsed, cum, math.nan,
                      samples, elapsed / samples)

        prev = {'M': epoch.M, 'D_a': epoch.D_a, 'W': epoch.W}
        D_v_prev = epoch.D_v
        L_prev = epoch.L
        if k % config.trace_stride == 0 and k % max(K // 10, 1) == 0:
            utils.log.debug("Epoch %d: gamma=%s nu=%s aoi_area=%s elapsed=%s"
                            % (k, gamma, nu, cum, elapsed))

    result = RunResult(config, records, solution, bounds)
    if solution is not None:
        records['regret'] = regret(result, solution)
    utils.log.info("Run %s seed=%d K=%d: time-average AoI %s, mean interval %s"
                   % (config.policy, config.seed, K, result.time_average_aoi(),
                      result.mean_interval()))
    return result


def _policy_columns(fixed, solution, config):
    """gamma, nu and U recorded for a non-learning policy."""
    if fixed is None:
        return math.nan, 0.0, 0.0
    if config.policy_name == policy.OPTIMAL:
        return solution.gamma_star, solution.nu_star, 0.0
    if fixed.get_variant() == policy.THRESHOLD:
        return fixed.get_value(), 0.0, 0.0
    return math.nan, 0.0, 0.0
