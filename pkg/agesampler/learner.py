#!/usr/bin/python3

"""Online threshold learner.

The learner keeps running estimates of the first two moments of the
virtual delay, a frequency-debt virtual queue U whose scaled value
nu = U / V prices waiting time, and a threshold gamma moved by a projected
Robbins-Monro step at every received ACK. The momentum variant averages
the update directions before stepping.
"""

import copy
import math

import numpy as np

from agesampler import utils
from agesampler import policy
from agesampler import channel


class MomentPriors(object):
    """Assumed bounds on the delay moments, used to bracket the optimal
    threshold. *_lb/*_ub bound means, H_ub bounds E[(D_a + D_v)^2] and
    the *_max values are hard caps on single delays and attempt counts."""

    def __init__(self, DF_lb, DF_ub, DB_lb, DB_ub, Dv_lb, Dv_ub, H_ub,
                 DF_max=math.inf, DB_max=math.inf, M_max=math.inf):
        self.DF_lb = float(DF_lb)
        self.DF_ub = float(DF_ub)
        self.DB_lb = float(DB_lb)
        self.DB_ub = float(DB_ub)
        self.Dv_lb = float(Dv_lb)
        self.Dv_ub = float(Dv_ub)
        self.H_ub = float(H_ub)
        self.DF_max = float(DF_max)
        self.DB_max = float(DB_max)
        self.M_max = float(M_max)
        for name in ['DF', 'DB', 'Dv']:
            low = getattr(self, '%s_lb' % name)
            high = getattr(self, '%s_ub' % name)
            if not 0 <= low <= high:
                raise utils.InvalidArgument('%s prior bounds' % name,
                                            (low, high), '0 <= lb <= ub')

    @classmethod
    def from_moments(cls, moments, slack=0.0, DF_max=math.inf,
                     DB_max=math.inf, M_max=math.inf):
        """Priors from known channel moments, widened by a relative
        slack on each side."""
        low = 1.0 - slack
        high = 1.0 + slack
        H = moments['m2_Da'] + 2 * moments['mean_Da'] * moments['mean_Dv'] + \
            moments['m2_Dv']
        return cls(moments['mean_DF'] * low, moments['mean_DF'] * high,
                   moments['mean_DB'] * low, moments['mean_DB'] * high,
                   moments['mean_Dv'] * low, moments['mean_Dv'] * high,
                   H * high, DF_max, DB_max, M_max)

    @classmethod
    def from_channel(cls, params, slack=0.0):
        """Exact priors for a known channel; hard caps come from the
        delay truncation and m_cap so that L_ub is finite when the
        channel is bounded."""
        M_max = params.m_cap if params.m_cap is not None else math.inf
        return cls.from_moments(channel.analytic_moments(params), slack,
                                params.fwd.upper_bound(),
                                params.bwd.upper_bound(), M_max)

    @classmethod
    def from_record(cls, rec):
        args = {}
        for key in ['DF_lb', 'DF_ub', 'DB_lb', 'DB_ub', 'Dv_lb', 'Dv_ub',
                    'H_ub']:
            if key not in rec:
                raise utils.InvalidArgument('learner.priors', rec,
                                            'needs key %s' % key)
            args[key] = rec[key]
        for key in ['DF_max', 'DB_max', 'M_max']:
            if rec.get(key) is not None:
                args[key] = rec[key]
        return cls(**args)


class GammaBounds(object):

    def __init__(self, gamma_lb, gamma_ub, D_bar_lb, L_ub=math.inf):
        self.gamma_lb = float(gamma_lb)
        self.gamma_ub = float(gamma_ub)
        self.D_bar_lb = float(D_bar_lb)
        self.L_ub = float(L_ub)
        if not self.gamma_lb >= 0:
            raise utils.InvalidArgument('gamma_lb', gamma_lb, 'x >= 0')
        if self.gamma_ub < self.gamma_lb:
            raise utils.InconsistentBounds(self.gamma_lb, self.gamma_ub)
        if not self.D_bar_lb > 0:
            raise utils.InvalidArgument('D_bar_lb', D_bar_lb, 'x > 0')

    def clamp(self, gamma):
        return min(max(gamma, self.gamma_lb), self.gamma_ub)

    def __repr__(self):
        return "GammaBounds(%r, %r, %r, %r)" % (self.gamma_lb, self.gamma_ub,
                                                self.D_bar_lb, self.L_ub)


def gamma_bounds_from_priors(priors, f_max):
    D_lb = priors.DF_lb + priors.DB_lb + priors.Dv_lb
    D_ub = priors.DF_ub + priors.DB_ub + priors.Dv_ub
    gamma_lb = max(0.5 * (priors.DF_lb + priors.DB_lb - priors.Dv_ub), 0.0)
    if utils.is_inf(f_max):
        if not D_lb > 0:
            raise utils.InvalidArgument('prior D_lb', D_lb, 'x > 0')
        gamma_ub = 0.5 * priors.H_ub / D_lb - priors.Dv_lb
    else:
        period = 1.0 / f_max
        gamma_ub = (0.5 * priors.H_ub + D_ub * period + period * period) / \
            (D_lb + period) - priors.Dv_lb
    L_ub = gamma_ub + priors.M_max * (priors.DF_max + priors.DB_max)
    if math.isnan(L_ub):
        L_ub = math.inf
    utils.log.debug("Threshold bounds from priors: [%s, %s], D_lb=%s, L_ub=%s"
                    % (gamma_lb, gamma_ub, D_lb, L_ub))
    if gamma_ub < gamma_lb:
        raise utils.InconsistentBounds(gamma_lb, gamma_ub)
    return GammaBounds(gamma_lb, gamma_ub, D_lb, L_ub)


def gamma_bounds_from_pilot(params, rng,
                            pilot_epochs=utils.DEFAULT_PILOT_EPOCHS,
                            gamma_cap=None):
    """Bounds when no priors are known: [0, Q] where Q is gamma_cap or
    a multiple of the mean zero-wait epoch length seen in a pilot run."""
    if pilot_epochs < 1:
        raise utils.InvalidArgument('pilot_epochs', pilot_epochs, 'x >= 1')
    lengths = []
    for k in range(pilot_epochs):
        epoch = channel.sample_epoch(params, rng, k + 1)
        lengths.append(epoch.D_a + epoch.D_v)
    L_bar = float(np.mean(lengths))
    utils.log.debug("Pilot of %d epochs: mean epoch length %s"
                    % (pilot_epochs, L_bar))
    if not L_bar > 0:
        raise utils.InvalidArgument('pilot mean epoch length', L_bar, 'x > 0')
    if gamma_cap is None:
        gamma_cap = utils.PILOT_CAP_FACTOR * L_bar
    return GammaBounds(0.0, gamma_cap, L_bar)


def eval_g(gamma, nu, D_a, D_v):
    top = np.maximum(D_a, gamma + nu)
    return 0.5 * top * top - gamma * (top + D_v)


def step_size(k, D_bar_lb):
    if k < 1:
        raise utils.InvalidArgument('k', k, 'k >= 1')
    if k == 1:
        return 1.0 / (2 * D_bar_lb)
    return 1.0 / ((k + 2) * D_bar_lb)


def momentum_step(d_prev, a, B_k):
    return (1 - a) * d_prev + a * B_k


class LearnerState(object):

    def __init__(self, bounds, V=utils.DEFAULT_V, gamma0=None,
                 momentum_enabled=False, momentum_a=utils.DEFAULT_MOMENTUM_A):
        if not V > 0:
            raise utils.InvalidArgument('V', V, 'x > 0')
        if not 0 < momentum_a <= 1:
            raise utils.InvalidArgument('momentum_a', momentum_a, '0 < a <= 1')
        self.bounds = bounds
        self.k = 0
        start = bounds.gamma_lb if gamma0 is None else gamma0
        self.gamma = bounds.clamp(start)
        self.mu = 0.0
        self.m = 0.0
        self.U = 0.0
        self.nu = 0.0
        self.V = float(V)
        self.momentum_d = 0.0
        self.momentum_a = float(momentum_a)
        self.momentum_enabled = momentum_enabled
        # Last update direction and step, kept for traces
        self.B = 0.0
        self.eta = 0.0

    def copy(self):
        return copy.copy(self)

    def theta(self):
        return self.gamma + self.nu

    def get_policy(self):
        return policy.Policy.threshold(self.theta())

    def noise_term(self):
        return 0.5 * self.m - self.mu * self.mu


def begin_epoch_update(state, D_a_new, D_v_prev, prev_epoch, f_max):
    """Transition applied when the ACK of a new epoch's first attempt
    arrives. prev_epoch carries 'M', 'D_a' and 'W' of the epoch that
    just ended (the warm-up segment before the first ACK)."""
    new = state.copy()
    new.k = state.k + 1
    weight = 1.0 / new.k
    new.mu = state.mu + weight * (D_v_prev - state.mu)
    new.m = state.m + weight * (D_v_prev * D_v_prev - state.m)

    if not utils.is_inf(f_max):
        elapsed = prev_epoch['D_a'] + prev_epoch['W'] + D_v_prev
        owed = prev_epoch['M'] / f_max
        new.U = utils.positive_part(state.U + owed - elapsed)
    new.nu = new.U / new.V

    B_k = float(eval_g(state.gamma, new.nu, D_a_new, D_v_prev)) + \
        new.noise_term()
    eta = step_size(new.k, new.bounds.D_bar_lb)
    direction = B_k
    if new.momentum_enabled:
        new.momentum_d = momentum_step(state.momentum_d, new.momentum_a, B_k)
        direction = new.momentum_d
    new.gamma = new.bounds.clamp(state.gamma + eta * direction)
    new.B = B_k
    new.eta = eta
    return new


def mse_bound(bounds, K):
    """Constant-over-K bound on E[(gamma_K - gamma*)^2]."""
    return 2.0 / K * bounds.L_ub ** 4 / bounds.D_bar_lb ** 2


def regret_bound(bounds, K):
    """Logarithmic bound on the cumulative AoI regret after K epochs."""
    return 2.0 * bounds.L_ub ** 4 / bounds.D_bar_lb ** 2 * (1 + math.log(K))
