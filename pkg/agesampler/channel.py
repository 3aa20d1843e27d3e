#!/usr/bin/python3

"""Stochastic environment: delay laws for the forward and backward links,
forward packet loss and whole-epoch samples.

A delay is s = epsilon + X where X follows one of the supported kinds.
Every delay consumes exactly one uniform from the stream it is drawn on,
whatever its kind and truncation mode, so runs are bit-exact for a seed.
"""

import math

import numpy as np
from scipy import special
from scipy.stats import norm

from agesampler import utils

DETERMINISTIC = "deterministic"
UNIFORM = "uniform"
LOGNORMAL = "lognormal"
EXPONENTIAL = "exponential"

KIND_PARAMS = {DETERMINISTIC: ['d'],
               UNIFORM: ['a', 'b'],
               LOGNORMAL: ['mu', 'sigma'],
               EXPONENTIAL: ['rate']}

TRUNCATIONS = [utils.TRUNCATE_REJECT, utils.TRUNCATE_CLAMP]

EPOCH_DTYPE = np.dtype([('d_f', float),
                        ('d_b', float),
                        ('D_a', float),
                        ('D_v', float),
                        ('M', np.int64)])


class DelayDistribution(object):
    """A one-sided delay law which can be sampled and queried for its
    first two moments."""

    def __init__(self, kind, params, epsilon=utils.DEFAULT_EPSILON,
                 upper=None, truncation=utils.TRUNCATE_REJECT,
                 upper_quantile=None):
        if kind not in KIND_PARAMS:
            raise utils.InvalidArgument('delay kind', kind,
                                        list(KIND_PARAMS.keys()))
        self.kind = kind
        self.params = {}
        for name in KIND_PARAMS[kind]:
            if name not in params:
                raise utils.InvalidArgument('%s parameter' % kind, params,
                                            KIND_PARAMS[kind])
            self.params[name] = float(params[name])
        self._validate_params()

        self.epsilon = float(epsilon)
        if self.epsilon < 0 or math.isnan(self.epsilon):
            raise utils.InvalidArgument('epsilon', epsilon, 'x >= 0')

        if truncation not in TRUNCATIONS:
            raise utils.InvalidArgument('truncation', truncation, TRUNCATIONS)
        self.truncation = truncation

        if upper_quantile is not None:
            if upper is not None:
                raise utils.InvalidArgument('upper_quantile', upper_quantile,
                                            'not together with upper')
            if not 0 < upper_quantile < 1:
                raise utils.InvalidArgument('upper_quantile', upper_quantile,
                                            '0 < q < 1')
            upper = self.quantile(upper_quantile)
        self.upper_quantile = upper_quantile

        self.upper = None if upper is None else float(upper)
        if self.upper is not None:
            if self.upper <= self.epsilon:
                raise utils.InvalidArgument('upper', upper,
                                            'x > epsilon (%s)' % self.epsilon)
            if self.truncation == utils.TRUNCATE_REJECT and \
                    self.cdf(self.upper - self.epsilon) <= 0:
                raise utils.InvalidArgument('upper', upper,
                                            'positive mass below the cap')

    def _validate_params(self):
        p = self.params
        if self.kind == DETERMINISTIC and not p['d'] >= 0:
            raise utils.InvalidArgument('deterministic d', p['d'], 'd >= 0')
        if self.kind == UNIFORM and not 0 <= p['a'] < p['b']:
            raise utils.InvalidArgument('uniform (a, b)', (p['a'], p['b']),
                                        '0 <= a < b')
        if self.kind == LOGNORMAL and not p['sigma'] > 0:
            raise utils.InvalidArgument('lognormal sigma', p['sigma'],
                                        'sigma > 0')
        if self.kind == EXPONENTIAL and not p['rate'] > 0:
            raise utils.InvalidArgument('exponential rate', p['rate'],
                                        'rate > 0')

    @classmethod
    def deterministic(cls, d, **kwargs):
        return cls(DETERMINISTIC, {'d': d}, **kwargs)

    @classmethod
    def uniform(cls, a, b, **kwargs):
        return cls(UNIFORM, {'a': a, 'b': b}, **kwargs)

    @classmethod
    def lognormal(cls, mu, sigma, **kwargs):
        return cls(LOGNORMAL, {'mu': mu, 'sigma': sigma}, **kwargs)

    @classmethod
    def exponential(cls, rate, **kwargs):
        return cls(EXPONENTIAL, {'rate': rate}, **kwargs)

    def get_kind(self):
        return self.kind

    def get_params(self):
        return self.params

    def describe(self):
        args = ','.join(["%s=%r" % (name, self.params[name])
                         for name in KIND_PARAMS[self.kind]])
        text = "%s(%s)" % (self.kind, args)
        if self.epsilon:
            text += "+%r" % self.epsilon
        if self.upper is not None:
            text += "<=%r[%s]" % (self.upper, self.truncation)
        return text

    # Untruncated law of X

    def cdf(self, x):
        """CDF of the unshifted, untruncated delay X."""
        p = self.params
        if x < 0:
            return 0.0
        if self.kind == DETERMINISTIC:
            return 1.0 if x >= p['d'] else 0.0
        if self.kind == UNIFORM:
            return min(max((x - p['a']) / (p['b'] - p['a']), 0.0), 1.0)
        if self.kind == LOGNORMAL:
            if x == 0:
                return 0.0
            return float(norm.cdf((math.log(x) - p['mu']) / p['sigma']))
        return -math.expm1(-p['rate'] * x)

    def ppf(self, u):
        """Inverse CDF of X, vectorised over u in [0, 1)."""
        p = self.params
        u = np.asarray(u, dtype=float)
        if self.kind == DETERMINISTIC:
            return np.full(u.shape, p['d'])
        if self.kind == UNIFORM:
            return p['a'] + (p['b'] - p['a']) * u
        if self.kind == LOGNORMAL:
            return np.exp(p['mu'] + p['sigma'] * special.ndtri(u))
        return -np.log1p(-u) / p['rate']

    def quantile(self, q):
        return self.epsilon + float(self.ppf(q))

    # Sampling

    def transform(self, u):
        """Map uniforms to delay samples."""
        u = np.asarray(u, dtype=float)
        if self.upper is None:
            x = self.ppf(u)
        else:
            cap = self.upper - self.epsilon
            if self.truncation == utils.TRUNCATE_REJECT:
                # Inverse transform restricted to [0, cap]: same law as
                # resampling until the draw is admissible.
                x = np.minimum(self.ppf(u * self.cdf(cap)), cap)
            else:
                x = np.minimum(self.ppf(u), cap)
        return self.epsilon + x

    def draw(self, rng):
        return float(self.transform(rng.random()))

    def draw_many(self, rng, n):
        return self.transform(rng.random(n))

    # Moments

    def partial_moments(self, c):
        """Return (P(X <= c), E[X; X <= c], E[X^2; X <= c])."""
        p = self.params
        if c < 0:
            return 0.0, 0.0, 0.0
        if self.kind == DETERMINISTIC:
            d = p['d']
            if d <= c:
                return 1.0, d, d * d
            return 0.0, 0.0, 0.0
        if self.kind == UNIFORM:
            a, b = p['a'], p['b']
            w = b - a
            cc = min(max(c, a), b)
            return ((cc - a) / w, (cc ** 2 - a ** 2) / (2 * w),
                    (cc ** 3 - a ** 3) / (3 * w))
        if self.kind == LOGNORMAL:
            mu, sigma = p['mu'], p['sigma']
            if c == 0:
                return 0.0, 0.0, 0.0
            z = (math.log(c) - mu) / sigma if not math.isinf(c) else math.inf
            moments = [float(norm.cdf(z))]
            for n in [1, 2]:
                full = math.exp(n * mu + n * n * sigma * sigma / 2)
                moments.append(full * float(norm.cdf(z - n * sigma)))
            return tuple(moments)
        if self.kind == EXPONENTIAL:
            lam = p['rate']
            if math.isinf(c):
                return 1.0, 1 / lam, 2 / lam ** 2
            e = math.exp(-lam * c)
            lc = lam * c
            return (-math.expm1(-lc), (1 - e * (1 + lc)) / lam,
                    (2 - e * (lc * lc + 2 * lc + 2)) / lam ** 2)
        raise utils.UnsupportedDistribution(self.kind, 'partial moments')

    def _moments_x(self):
        if self.upper is None:
            _, m1, m2 = self.partial_moments(math.inf)
            return m1, m2
        cap = self.upper - self.epsilon
        prob, m1, m2 = self.partial_moments(cap)
        if self.truncation == utils.TRUNCATE_REJECT:
            return m1 / prob, m2 / prob
        return m1 + cap * (1 - prob), m2 + cap * cap * (1 - prob)

    def mean(self):
        m1, _ = self._moments_x()
        return self.epsilon + m1

    def second_moment(self):
        m1, m2 = self._moments_x()
        eps = self.epsilon
        return eps * eps + 2 * eps * m1 + m2

    def lower_bound(self):
        p = self.params
        low = {DETERMINISTIC: p.get('d'),
               UNIFORM: p.get('a')}.get(self.kind, 0.0)
        if self.upper is not None:
            return min(self.epsilon + low, self.upper)
        return self.epsilon + low

    def upper_bound(self):
        """Hard upper bound on a sample (inf when the law is unbounded)."""
        p = self.params
        bound = math.inf
        if self.kind == DETERMINISTIC:
            bound = self.epsilon + p['d']
        elif self.kind == UNIFORM:
            bound = self.epsilon + p['b']
        if self.upper is not None:
            bound = min(bound, self.upper)
        return bound

    def get_uniform_support(self):
        """Return (lo, hi) when the law is a point mass (lo == hi) or
        uniform on [lo, hi] after truncation."""
        if self.kind == DETERMINISTIC:
            value = self.upper_bound()
            return value, value
        if self.kind == UNIFORM:
            lo = self.lower_bound()
            hi = self.epsilon + self.params['b']
            if self.upper is None or self.upper >= hi:
                return lo, hi
            if self.truncation == utils.TRUNCATE_REJECT:
                return lo, self.upper
        raise utils.UnsupportedDistribution(self.describe(), 'support')


class ChannelParams(object):
    """Forward loss probability plus forward/backward delay laws."""

    def __init__(self, alpha, fwd, bwd, m_cap=utils.DEFAULT_M_CAP):
        alpha = float(alpha)
        if not 0 <= alpha < 1:
            raise utils.InvalidArgument('alpha', alpha, '0 <= alpha < 1')
        if m_cap is not None:
            if int(m_cap) != m_cap or m_cap < 1:
                raise utils.InvalidArgument('m_cap', m_cap,
                                            'positive integer')
            m_cap = int(m_cap)
        self.alpha = alpha
        self.fwd = fwd
        self.bwd = bwd
        self.m_cap = m_cap

    def get_alpha(self):
        return self.alpha

    def get_m_cap(self):
        return self.m_cap

    def max_failures(self):
        if self.m_cap is None:
            return math.inf
        return self.m_cap - 1

    def describe(self):
        """Identifier used to refuse aggregation across channels."""
        return "alpha=%r;fwd=%s;bwd=%s;m_cap=%s" % (self.alpha,
                                                    self.fwd.describe(),
                                                    self.bwd.describe(),
                                                    self.m_cap)


class EpochOutcome(object):
    """One renewal epoch: a successful first attempt followed by the
    failed retries that precede the next success."""

    def __init__(self, index, first_attempt, failed_attempts):
        self.index = index
        self.first_attempt = first_attempt
        self.failed_attempts = failed_attempts
        self.M = 1 + len(failed_attempts)
        self.D_a = first_attempt[0] + first_attempt[1]
        self.D_v = sum([d_f + d_b for d_f, d_b in failed_attempts], 0.0)
        self.W = 0.0
        self.L = 0.0

    def get_d_f(self):
        return self.first_attempt[0]

    def set_wait(self, wait):
        self.W = wait
        self.L = self.D_a + wait + self.D_v


def draw_delay(dist, rng):
    return dist.draw(rng)


def _draw_failures(params, rng, limit):
    failed = []
    while len(failed) < limit:
        if rng.random() >= params.alpha:
            break
        failed.append((params.fwd.draw(rng), params.bwd.draw(rng)))
    return failed


def sample_epoch(params, rng, index=1):
    first = (params.fwd.draw(rng), params.bwd.draw(rng))
    failed = _draw_failures(params, rng, params.max_failures())
    return EpochOutcome(index, first, failed)


def sample_warmup(params, rng):
    """Failed attempts made from t=0 until the first success."""
    return _draw_failures(params, rng, params.max_failures())


def sample_epochs(params, n, rng):
    """Draw n independent epochs at once into a structured array.

    Retry counts come from the geometric inverse CDF, so the values
    differ from n calls to sample_epoch but follow the same law."""
    epochs = np.zeros(n, dtype=EPOCH_DTYPE)
    epochs['d_f'] = params.fwd.draw_many(rng, n)
    epochs['d_b'] = params.bwd.draw_many(rng, n)
    epochs['D_a'] = epochs['d_f'] + epochs['d_b']

    if params.alpha == 0:
        failures = np.zeros(n, dtype=np.int64)
    else:
        u = rng.random(n)
        failures = np.floor(np.log1p(-u) / math.log(params.alpha))
        failures = np.minimum(failures, params.max_failures()).astype(np.int64)

    total = int(failures.sum())
    retries = params.fwd.draw_many(rng, total) + \
        params.bwd.draw_many(rng, total)
    owner = np.repeat(np.arange(n), failures)
    epochs['D_v'] = np.bincount(owner, weights=retries, minlength=n)
    epochs['M'] = failures + 1
    return epochs


def analytic_moments(params):
    """Closed-form moments of one epoch. The retry count N = M - 1 is
    geometric, so D_v is a compound-geometric sum of attempt delays;
    m_cap is ignored here."""
    alpha = params.alpha
    mean_DF = params.fwd.mean()
    mean_DB = params.bwd.mean()
    m2_DF = params.fwd.second_moment()
    m2_DB = params.bwd.second_moment()
    mean_Da = mean_DF + mean_DB
    m2_Da = m2_DF + 2 * mean_DF * mean_DB + m2_DB

    mean_N = alpha / (1 - alpha)
    factorial_N = 2 * alpha ** 2 / (1 - alpha) ** 2
    mean_Dv = mean_N * mean_Da
    m2_Dv = mean_N * m2_Da + factorial_N * mean_Da ** 2

    return {'mean_DF': mean_DF,
            'mean_DB': mean_DB,
            'm2_DF': m2_DF,
            'm2_DB': m2_DB,
            'mean_Da': mean_Da,
            'm2_Da': m2_Da,
            'mean_M': 1 / (1 - alpha),
            'mean_Dv': mean_Dv,
            'm2_Dv': m2_Dv}
