#!/usr/bin/python3

"""Ground-truth solver for the optimal threshold.

For a threshold theta = gamma + nu the optimal gamma is the root of

    h(gamma) = 1/2 E[max(D_a, theta)^2]
               - gamma (E[max(D_a, theta)] + E[D_v]) + N

with N = 1/2 E[D_v^2] - E[D_v]^2. h is decreasing in gamma with slope
-(mean epoch length), so bisection brackets the root. The expectations
over D_a come from closed-form integrals when both links are point
masses or uniform, and from a common-random-number sample otherwise.
"""

import math

import numpy as np

from agesampler import utils
from agesampler import channel
from agesampler import learner
from agetools import rng as agerng

METHOD_AUTO = "auto"
METHOD_ANALYTIC = "analytic"
METHOD_MC = "mc"
METHODS = [METHOD_AUTO, METHOD_ANALYTIC, METHOD_MC]
METHOD_GRID = "grid"

MAX_BRACKET_DOUBLINGS = 200
INNER_TOL_FACTOR = 0.1
FEASIBILITY_RTOL = 1e-9


class OracleSolution(object):

    def __init__(self, gamma_star, nu_star, aoi_opt, L_star, n_samples,
                 ci_halfwidth, method, curve=None):
        self.gamma_star = float(gamma_star)
        self.nu_star = float(nu_star)
        self.theta_star = self.gamma_star + self.nu_star
        self.aoi_opt = float(aoi_opt)
        self.L_star = float(L_star)
        self.n_samples = int(n_samples)
        self.ci_halfwidth = float(ci_halfwidth)
        self.method = method
        # (theta, aoi, stderr) triples, only kept by the grid search
        self.curve = curve or []
        self.grid_theta = None

    def to_record(self):
        return {'gamma_star': self.gamma_star,
                'nu_star': self.nu_star,
                'theta_star': self.theta_star,
                'aoi_opt': self.aoi_opt,
                'L_star': self.L_star,
                'n_samples': self.n_samples,
                'ci_halfwidth': self.ci_halfwidth,
                'method': self.method}

    def __repr__(self):
        return "OracleSolution(%s)" % self.to_record()


def _ramp_tail(c, start, hi, n):
    """Integral of s^n (s - c) over [max(start, c), hi]."""
    low = max(start, c)
    if low >= hi:
        return 0.0

    def antiderivative(s):
        return s ** (n + 2) / (n + 2) - c * s ** (n + 1) / (n + 1)
    return antiderivative(hi) - antiderivative(low)


class AnalyticMaxMoments(object):
    """E[max(D_a, theta)^n] for n = 1, 2 when D_a is the sum of two
    point masses or uniforms. The density of a sum of two uniforms is a
    signed combination of ramps."""

    def __init__(self, params):
        self.fwd_support = params.fwd.get_uniform_support()
        self.bwd_support = params.bwd.get_uniform_support()
        a1, b1 = self.fwd_support
        a2, b2 = self.bwd_support
        self.lo = a1 + a2
        self.hi = b1 + b2
        self.kinks = []
        self.scale = None
        if a1 < b1 and a2 < b2:
            self.scale = (b1 - a1) * (b2 - a2)
            self.kinks = [(a1 + a2, 1.0), (b1 + a2, -1.0),
                          (a1 + b2, -1.0), (b1 + b2, 1.0)]

    def _cdf(self, theta):
        if theta <= self.lo:
            return 0.0
        if theta >= self.hi:
            return 1.0
        if self.scale is None:
            return (theta - self.lo) / (self.hi - self.lo)
        total = sum([sign * max(theta - c, 0.0) ** 2 / 2
                     for c, sign in self.kinks])
        return min(max(total / self.scale, 0.0), 1.0)

    def _tail(self, theta, n):
        """Integral of s^n over the density on [max(theta, lo), hi]."""
        start = max(theta, self.lo)
        if start >= self.hi:
            return 0.0
        if self.scale is None:
            return (self.hi ** (n + 1) - start ** (n + 1)) / \
                ((n + 1) * (self.hi - self.lo))
        return sum([sign * _ramp_tail(c, start, self.hi, n)
                    for c, sign in self.kinks]) / self.scale

    def max_moments(self, theta):
        if self.lo == self.hi:
            top = max(self.lo, theta)
            return top, top * top
        below = self._cdf(theta)
        return (theta * below + self._tail(theta, 1),
                theta * theta * below + self._tail(theta, 2))


class SampledMaxMoments(object):
    """Common-random-number estimate of E[max(D_a, theta)^n] from one
    fixed epoch sample; sorted prefix sums make each query O(log n)."""

    def __init__(self, epochs):
        self.epochs = epochs
        self.n = len(epochs)
        self.sorted_Da = np.sort(epochs['D_a'])
        self.tail_1 = np.concatenate(
            [np.cumsum(self.sorted_Da[::-1])[::-1], [0.0]])
        self.tail_2 = np.concatenate(
            [np.cumsum((self.sorted_Da ** 2)[::-1])[::-1], [0.0]])

    def max_moments(self, theta):
        below = int(np.searchsorted(self.sorted_Da, theta, side='left'))
        return ((theta * below + self.tail_1[below]) / self.n,
                (theta * theta * below + self.tail_2[below]) / self.n)


def crn_epochs(params, n, crn_seed):
    if n < utils.MIN_ORACLE_N:
        raise utils.InvalidArgument('n', n, 'n >= %d' % utils.MIN_ORACLE_N)
    stream = agerng.StreamFactory(crn_seed).get_stream(agerng.MC, 0)
    return channel.sample_epochs(params, n, stream)


def gbar_from_sample(epochs, gamma, nu):
    values = learner.eval_g(gamma, nu, epochs['D_a'], epochs['D_v'])
    n = len(values)
    stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return {'mean': float(np.mean(values)), 'stderr': stderr}


def estimate_gbar(gamma, nu, params, n=utils.DEFAULT_ORACLE_N, crn_seed=0):
    """Monte-Carlo estimate of E[g]. Every call with the same crn_seed
    evaluates the same delay draws."""
    return gbar_from_sample(crn_epochs(params, n, crn_seed), gamma, nu)


class Objective(object):
    """h(gamma, nu) for one channel, with whichever expectation backend
    the method selects."""

    def __init__(self, params, n=utils.DEFAULT_ORACLE_N, crn_seed=0,
                 method=METHOD_AUTO):
        if method not in METHODS:
            raise utils.InvalidArgument('oracle method', method, METHODS)
        self.params = params
        self.moments = channel.analytic_moments(params)
        self.noise = 0.5 * self.moments['m2_Dv'] - self.moments['mean_Dv'] ** 2
        self.epochs = None
        self.backend = None

        if method in [METHOD_AUTO, METHOD_ANALYTIC]:
            try:
                self.backend = AnalyticMaxMoments(params)
                self.method = METHOD_ANALYTIC
            except utils.UnsupportedDistribution:
                if method == METHOD_ANALYTIC:
                    raise
                utils.log.debug("No closed form for %s, using Monte Carlo"
                                % params.describe())
        if self.backend is None:
            self.epochs = crn_epochs(params, n, crn_seed)
            self.backend = SampledMaxMoments(self.epochs)
            self.method = METHOD_MC
        self.mean_Dv = self.moments['mean_Dv'] if self.epochs is None else \
            float(np.mean(self.epochs['D_v']))

    def n_samples(self):
        return 0 if self.epochs is None else len(self.epochs)

    def h(self, gamma, nu=0.0):
        first, second = self.backend.max_moments(gamma + nu)
        return 0.5 * second - gamma * (first + self.mean_Dv) + self.noise

    def length(self, theta):
        return self.backend.max_moments(theta)[0] + self.mean_Dv

    def stderr(self, gamma, nu=0.0):
        if self.epochs is None:
            return 0.0
        return gbar_from_sample(self.epochs, gamma, nu)['stderr']

    def solution(self, gamma, nu, method=None):
        theta = gamma + nu
        L_star = self.length(theta)
        ci = 0.0
        if L_star > 0:
            ci = utils.Z_95 * self.stderr(gamma, nu) / L_star
        aoi = gamma + self.moments['mean_DF'] + self.moments['mean_Dv']
        return OracleSolution(gamma, nu, aoi, L_star, self.n_samples(), ci,
                              method or self.method)


def bisect_decreasing(func, lo, hi, tol):
    """Root of a non-increasing function with func(lo) >= 0. hi is
    doubled until func(hi) <= 0."""
    f_lo = func(lo)
    if f_lo == 0:
        return lo
    if f_lo < 0:
        raise utils.NoSignChange(lo, f_lo)
    hi = max(hi, lo + tol)
    f_hi = func(hi)
    doublings = 0
    while f_hi > 0:
        lo, hi = hi, 2 * hi
        f_hi = func(hi)
        doublings += 1
        if doublings > MAX_BRACKET_DOUBLINGS:
            raise utils.NoSignChange(hi, f_hi)
    if f_hi == 0:
        return hi
    utils.log.debug("Bracket [%s, %s]" % (lo, hi))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if f_mid == 0:
            return mid
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _solve_gamma(objective, nu, tol):
    return bisect_decreasing(lambda gamma: objective.h(gamma, nu), 0.0,
                             objective.moments['mean_Da'], tol)


def solve_unconstrained(params, n=utils.DEFAULT_ORACLE_N,
                        tol=utils.DEFAULT_ORACLE_TOL, crn_seed=0,
                        method=METHOD_AUTO, objective=None):
    if not tol > 0:
        raise utils.InvalidArgument('tol', tol, 'tol > 0')
    objective = objective or Objective(params, n, crn_seed, method)
    gamma = _solve_gamma(objective, 0.0, tol)
    solution = objective.solution(gamma, 0.0)
    utils.log.debug("Unconstrained oracle: %s" % solution)
    return solution


def solve_constrained(params, f_max, n=utils.DEFAULT_ORACLE_N,
                      tol=utils.DEFAULT_ORACLE_TOL, crn_seed=0,
                      method=METHOD_AUTO):
    objective = Objective(params, n, crn_seed, method)
    base = solve_unconstrained(params, n, tol, crn_seed, method, objective)
    if utils.is_inf(f_max):
        return base
    if not f_max > 0:
        raise utils.InfeasibleConstraint(f_max)
    target = objective.moments['mean_M'] / f_max
    if base.L_star >= target:
        utils.log.debug("Frequency constraint slack: L* %s >= %s"
                        % (base.L_star, target))
        return base

    inner_tol = tol * INNER_TOL_FACTOR

    def gap(nu):
        gamma = _solve_gamma(objective, nu, inner_tol)
        return objective.length(gamma + nu) - target

    lo = 0.0
    hi = max(target, tol)
    doublings = 0
    while gap(hi) < 0:
        lo, hi = hi, 2 * hi
        doublings += 1
        if doublings > MAX_BRACKET_DOUBLINGS:
            raise utils.InfeasibleConstraint(f_max)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0:
            lo = mid
        else:
            hi = mid
    nu = 0.5 * (lo + hi)
    gamma = _solve_gamma(objective, nu, inner_tol)
    solution = objective.solution(gamma, nu)
    utils.log.debug("Constrained oracle (f_max=%s): %s" % (f_max, solution))
    return solution


def solve(params, f_max, n=utils.DEFAULT_ORACLE_N,
          tol=utils.DEFAULT_ORACLE_TOL, crn_seed=0, method=METHOD_AUTO):
    if utils.is_inf(f_max):
        return solve_unconstrained(params, n, tol, crn_seed, method)
    return solve_constrained(params, f_max, n, tol, crn_seed, method)


def default_theta_grid(params, step=0.01, span=3.0):
    moments = channel.analytic_moments(params)
    top = span * (moments['mean_Da'] + moments['mean_Dv'])
    return np.arange(0.0, top + step / 2, step)


def grid_bruteforce(params, f_max, theta_grid, n=utils.DEFAULT_ORACLE_N,
                    crn_seed=0):
    """Time-average AoI of every fixed threshold on the grid, from the
    renewal ratio sum(F) / sum(L) over one common epoch sample."""
    epochs = crn_epochs(params, n, crn_seed)
    moments = channel.analytic_moments(params)
    target = 0.0 if utils.is_inf(f_max) else moments['mean_M'] / f_max

    curve = []
    best = None
    for theta in theta_grid:
        theta = float(theta)
        L = np.maximum(epochs['D_a'], theta) + epochs['D_v']
        F = epochs['d_f'][1:] * L[:-1] + 0.5 * L[1:] ** 2
        L = L[1:]
        aoi = float(np.sum(F) / np.sum(L))
        residual = F - aoi * L
        m = len(L)
        stderr = float(math.sqrt(np.sum(residual ** 2) / (m * (m - 1))) /
                       np.mean(L))
        curve.append((theta, aoi, stderr))
        feasible = np.mean(L) >= target * (1 - FEASIBILITY_RTOL)
        if feasible and (best is None or aoi < best[1]):
            best = (theta, aoi, stderr, float(np.mean(L)))
    if best is None:
        raise utils.InfeasibleConstraint(f_max)

    theta, aoi, stderr, L_mean = best
    gamma = aoi - moments['mean_DF'] - moments['mean_Dv']
    nu = utils.positive_part(theta - gamma)
    utils.log.debug("Grid argmin theta=%s aoi=%s" % (theta, aoi))
    solution = OracleSolution(gamma, nu, aoi, L_mean, len(epochs),
                              utils.Z_95 * stderr, METHOD_GRID, curve)
    solution.grid_theta = theta
    return solution


def dinkelbach_residual(solution, params, n=utils.DEFAULT_ORACLE_N,
                        crn_seed=0, method=METHOD_AUTO):
    """h at a solution; zero exactly when the threshold is optimal."""
    objective = Objective(params, n, crn_seed, method)
    return objective.h(solution.gamma_star, solution.nu_star)
