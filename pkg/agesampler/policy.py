#!/usr/bin/python3

"""Waiting-time selection: the threshold family and the baselines it is
compared against."""

import math
import re

from agesampler import utils

THRESHOLD = "threshold"
CONSTANT_WAIT = "constant_wait"
ZERO_WAIT = "zero_wait"

VARIANTS = [THRESHOLD, CONSTANT_WAIT, ZERO_WAIT]

# Policy names accepted in run configs
ONLINE = "online"
ONLINE_MOMENTUM = "online_momentum"
FIXED_THRESHOLD = "fixed_threshold"
OPTIMAL = "optimal"

POLICY_SPECS = [ONLINE, ONLINE_MOMENTUM, CONSTANT_WAIT, ZERO_WAIT,
                "%s(theta)" % FIXED_THRESHOLD, OPTIMAL]
LEARNING_SPECS = [ONLINE, ONLINE_MOMENTUM]

FIXED_THRESHOLD_RE = re.compile(r'^fixed_threshold\(\s*([^)]+?)\s*\)$')


class Policy(object):
    """Immutable waiting-time policy. For threshold policies the value is
    theta = gamma + nu, for constant waits it is the wait itself."""

    def __init__(self, variant, value=0.0):
        if variant not in VARIANTS:
            raise utils.InvalidArgument('policy variant', variant, VARIANTS)
        value = float(value)
        if not (value >= 0 and math.isfinite(value)):
            raise utils.InvalidArgument('%s value' % variant, value, 'x >= 0')
        if variant == ZERO_WAIT:
            value = 0.0
        self.variant = variant
        self.value = value

    @classmethod
    def threshold(cls, theta):
        return cls(THRESHOLD, theta)

    @classmethod
    def constant_wait(cls, wait):
        return cls(CONSTANT_WAIT, wait)

    @classmethod
    def zero_wait(cls):
        return cls(ZERO_WAIT)

    def get_variant(self):
        return self.variant

    def get_value(self):
        return self.value

    def __eq__(self, other):
        if not isinstance(other, Policy):
            return NotImplemented
        return self.variant == other.variant and self.value == other.value

    def __repr__(self):
        return "Policy(%s, %r)" % (self.variant, self.value)


def waiting_time(policy, D_a, is_first_of_epoch=True):
    if not is_first_of_epoch:
        # A NACK is followed by a new sample straight away
        return 0.0
    if policy.variant == THRESHOLD:
        return utils.positive_part(policy.value - D_a)
    if policy.variant == CONSTANT_WAIT:
        return policy.value
    return 0.0


def constant_wait_from_moments(moments, f_max):
    if utils.is_inf(f_max):
        return Policy.constant_wait(0.0)
    wait = moments['mean_M'] / f_max - moments['mean_DF'] - \
        moments['mean_DB'] - moments['mean_Dv']
    return Policy.constant_wait(utils.positive_part(wait))


def parse_policy_spec(spec):
    """Split a config policy string into (name, theta). theta is only
    set for fixed_threshold(theta)."""
    spec = str(spec).strip()
    match = FIXED_THRESHOLD_RE.match(spec)
    if match:
        try:
            theta = float(match.group(1))
        except ValueError:
            raise utils.InvalidArgument('policy', spec, POLICY_SPECS)
        if not (theta >= 0 and math.isfinite(theta)):
            raise utils.InvalidArgument('fixed_threshold theta', theta,
                                        'theta >= 0')
        return FIXED_THRESHOLD, theta
    if spec in [ONLINE, ONLINE_MOMENTUM, CONSTANT_WAIT, ZERO_WAIT, OPTIMAL]:
        return spec, None
    raise utils.InvalidArgument('policy', spec, POLICY_SPECS)
