#!/usr/bin/python3

import math
import unittest

import unittest_base
import config
from agesampler import utils
from agesampler import policy
from agesampler import channel


class WaitingTimeTests(unittest_base.DevTestCase):

    def test_threshold(self):
        rule = policy.Policy.threshold(3.0)
        self.assertEqual(policy.waiting_time(rule, 1.0), 2.0)
        self.assertEqual(policy.waiting_time(rule, 3.0), 0.0)
        self.assertEqual(policy.waiting_time(rule, 5.0), 0.0)

    def test_nack_means_no_wait(self):
        for rule in [policy.Policy.threshold(3.0),
                     policy.Policy.constant_wait(1.5),
                     policy.Policy.zero_wait()]:
            self.assertEqual(policy.waiting_time(rule, 0.5, False), 0.0)

    def test_constant_and_zero(self):
        self.assertEqual(policy.waiting_time(
            policy.Policy.constant_wait(1.5), 10.0), 1.5)
        self.assertEqual(policy.waiting_time(policy.Policy.zero_wait(), 0.0),
                         0.0)

    def test_invalid_values(self):
        self.assertRaises(utils.InvalidArgument, policy.Policy.threshold, -1)
        self.assertRaises(utils.InvalidArgument, policy.Policy.threshold,
                          math.inf)
        self.assertRaises(utils.InvalidArgument, policy.Policy.constant_wait,
                          math.nan)
        self.assertRaises(utils.InvalidArgument, policy.Policy, 'random', 1)

    def test_equality(self):
        self.assertEqual(policy.Policy.threshold(2),
                         policy.Policy.threshold(2.0))
        self.assertNotEqual(policy.Policy.threshold(2),
                            policy.Policy.constant_wait(2))


class ConstantWaitTests(unittest_base.DevTestCase):

    def test_unconstrained_is_zero(self):
        moments = channel.analytic_moments(config.uniform_channel(0.5))
        self.assertEqual(policy.constant_wait_from_moments(moments, math.inf),
                         policy.Policy.constant_wait(0.0))

    def test_meets_frequency(self):
        moments = channel.analytic_moments(config.uniform_channel(0.5))
        rule = policy.constant_wait_from_moments(moments, 0.25)
        self.assertAllClose(rule.get_value(), 6.0)

    def test_never_negative(self):
        moments = channel.analytic_moments(config.uniform_channel(0.5))
        rule = policy.constant_wait_from_moments(moments, 10.0)
        self.assertEqual(rule.get_value(), 0.0)


class PolicySpecTests(unittest_base.DevTestCase):

    def test_names(self):
        for name in [policy.ONLINE, policy.ONLINE_MOMENTUM,
                     policy.CONSTANT_WAIT, policy.ZERO_WAIT, policy.OPTIMAL]:
            self.assertEqual(policy.parse_policy_spec(name), (name, None))
        self.assertEqual(policy.parse_policy_spec(' online '),
                         (policy.ONLINE, None))

    def test_fixed_threshold(self):
        self.assertEqual(policy.parse_policy_spec('fixed_threshold(4)'),
                         (policy.FIXED_THRESHOLD, 4.0))
        self.assertEqual(policy.parse_policy_spec('fixed_threshold( 0.5 )'),
                         (policy.FIXED_THRESHOLD, 0.5))

    def test_bad_specs(self):
        for spec in ['bogus', 'fixed_threshold()', 'fixed_threshold(x)',
                     'fixed_threshold(-1)', 'fixed_threshold(inf)']:
            self.assertRaises(utils.InvalidArgument, policy.parse_policy_spec,
                              spec)


if __name__ == '__main__':
    unittest.main()
