#!/usr/bin/python3

import math
import unittest

import numpy as np

import unittest_base
import config
from agesampler import utils
from agesampler import learner
from agesampler import policy
from agesampler import channel
from agesampler import oracle
from agetools import rng as agerng

CASES = 10000


def first_update(state, D_a=1.0, D_v_prev=0.0, M=1, f_max=math.inf):
    return learner.begin_epoch_update(state, D_a, D_v_prev,
                                      {'M': M, 'D_a': 0.0, 'W': 0.0}, f_max)


class StepSizeTests(unittest_base.DevTestCase):

    def test_schedule(self):
        self.assertEqual(learner.step_size(1, 2.0), 0.25)
        self.assertEqual(learner.step_size(2, 2.0), 0.125)
        self.assertEqual(learner.step_size(3, 2.0), 0.1)
        self.assertRaises(utils.InvalidArgument, learner.step_size, 0, 2.0)

    def test_momentum_step(self):
        self.assertEqual(learner.momentum_step(2.0, 1.0, 5.0), 5.0)
        self.assertAllClose(learner.momentum_step(2.0, 0.25, 6.0), 3.0)


class EvalGPropertyTests(unittest_base.DevTestCase):
    """Pathwise shape of g over randomized epochs"""

    def setUp(self):
        rng = np.random.default_rng(21)
        self.D_a = rng.exponential(2.0, CASES)
        self.D_v = rng.exponential(1.0, CASES) * (rng.random(CASES) < 0.3)
        self.nu = rng.exponential(0.5, CASES)

    def test_value(self):
        self.assertEqual(learner.eval_g(1.0, 0.0, 2.0, 0.0), 0.0)
        self.assertEqual(learner.eval_g(3.0, 0.0, 2.0, 1.0), -7.5)

    def test_non_increasing_in_gamma(self):
        low = learner.eval_g(1.0, self.nu, self.D_a, self.D_v)
        high = learner.eval_g(1.5, self.nu, self.D_a, self.D_v)
        self.assertTrue(np.all(high <= low + 1e-12))

    def test_concave_in_gamma(self):
        gammas = [0.5, 1.0, 1.5]
        values = [learner.eval_g(gamma, 0.0, self.D_a, self.D_v)
                  for gamma in gammas]
        self.assertTrue(np.all(values[1] >= 0.5 * (values[0] + values[2])
                               - 1e-9))


class BoundsTests(unittest_base.DevTestCase):

    def test_exact_priors_unconstrained(self):
        priors = learner.MomentPriors.from_channel(config.uniform_channel(0.5))
        bounds = learner.gamma_bounds_from_priors(priors, math.inf)
        self.assertEqual(bounds.gamma_lb, 0.0)
        self.assertAllClose(bounds.gamma_ub, 7.0 / 12.0)
        self.assertAllClose(bounds.D_bar_lb, 2.0)
        self.assertTrue(math.isfinite(bounds.L_ub))

    def test_constrained_bound_grows(self):
        priors = learner.MomentPriors.from_channel(config.uniform_channel(0.5))
        free = learner.gamma_bounds_from_priors(priors, math.inf)
        tight = learner.gamma_bounds_from_priors(priors, 0.1)
        self.assertGreater(tight.gamma_ub, free.gamma_ub)

    def test_slack_widens(self):
        params = config.uniform_channel(0.5)
        exact = learner.MomentPriors.from_channel(params)
        loose = learner.MomentPriors.from_channel(params, 0.2)
        self.assertLess(loose.DF_lb, exact.DF_lb)
        self.assertGreater(loose.H_ub, exact.H_ub)

    def test_inconsistent(self):
        priors = learner.MomentPriors(5, 5, 5, 5, 0, 0, 1)
        self.assertRaises(utils.InconsistentBounds,
                          learner.gamma_bounds_from_priors, priors, math.inf)
        self.assertRaises(utils.InconsistentBounds, learner.GammaBounds,
                          2, 1, 1)
        self.assertRaises(utils.InvalidArgument, learner.MomentPriors,
                          2, 1, 0, 1, 0, 1, 1)

    def test_priors_from_record(self):
        rec = {'DF_lb': 0.4, 'DF_ub': 0.6, 'DB_lb': 0.4, 'DB_ub': 0.6,
               'Dv_lb': 0.5, 'Dv_ub': 1.5, 'H_ub': 8.0}
        priors = learner.MomentPriors.from_record(rec)
        self.assertEqual(priors.H_ub, 8.0)
        self.assertEqual(priors.M_max, math.inf)
        del rec['H_ub']
        self.assertRaises(utils.InvalidArgument,
                          learner.MomentPriors.from_record, rec)

    def test_pilot(self):
        params = config.deterministic_channel()
        stream = agerng.StreamFactory(0).get_stream(agerng.PILOT)
        bounds = learner.gamma_bounds_from_pilot(params, stream)
        self.assertEqual((bounds.gamma_lb, bounds.gamma_ub), (0.0, 20.0))
        self.assertEqual(bounds.D_bar_lb, 2.0)
        capped = learner.gamma_bounds_from_pilot(params, stream, 10, 5.0)
        self.assertEqual(capped.gamma_ub, 5.0)
        self.assertRaises(utils.InvalidArgument,
                          learner.gamma_bounds_from_pilot, params, stream, 0)

    def test_bound_constants(self):
        bounds = learner.GammaBounds(0, 1, 2, L_ub=2)
        self.assertAllClose(learner.mse_bound(bounds, 10), 0.8)
        self.assertAllClose(learner.regret_bound(bounds, 100),
                            8 * (1 + math.log(100)))


class LearnerUpdateTests(unittest_base.DevTestCase):

    def setUp(self):
        self.bounds = learner.GammaBounds(0.0, 10.0, 2.0)

    def test_initial_state(self):
        state = learner.LearnerState(self.bounds)
        self.assertEqual(state.k, 0)
        self.assertEqual(state.gamma, 0.0)
        self.assertEqual(state.get_policy(), policy.Policy.threshold(0.0))
        self.assertEqual(learner.LearnerState(self.bounds, gamma0=50).gamma,
                         10.0)
        self.assertRaises(utils.InvalidArgument, learner.LearnerState,
                          self.bounds, 0)
        self.assertRaises(utils.InvalidArgument, learner.LearnerState,
                          self.bounds, 1.0, None, True, 0)

    def test_first_update(self):
        state = first_update(learner.LearnerState(self.bounds))
        self.assertEqual(state.k, 1)
        self.assertEqual(state.B, 0.5)
        self.assertEqual(state.eta, 0.25)
        self.assertEqual(state.gamma, 0.125)

    def test_update_returns_new_state(self):
        state = learner.LearnerState(self.bounds)
        first_update(state)
        self.assertEqual(state.k, 0)
        self.assertEqual(state.gamma, 0.0)

    def test_virtual_queue(self):
        state = learner.LearnerState(self.bounds, V=4.0)
        prev = {'M': 2, 'D_a': 1.0, 'W': 0.0}
        state = learner.begin_epoch_update(state, 1.0, 1.0, prev, 0.5)
        self.assertEqual(state.U, 2.0)
        self.assertEqual(state.nu, 0.5)
        prev = {'M': 1, 'D_a': 1.0, 'W': 9.0}
        state = learner.begin_epoch_update(state, 1.0, 0.0, prev, 0.5)
        self.assertEqual(state.U, 0.0)
        self.assertEqual(state.nu, 0.0)

    def test_no_constraint_no_debt(self):
        state = learner.LearnerState(self.bounds)
        prev = {'M': 50, 'D_a': 0.0, 'W': 0.0}
        state = learner.begin_epoch_update(state, 1.0, 0.0, prev, math.inf)
        self.assertEqual((state.U, state.nu), (0.0, 0.0))

    def _random_run(self, seed, momentum=False, a=utils.DEFAULT_MOMENTUM_A,
                    f_max=0.3):
        rng = np.random.default_rng(seed)
        state = learner.LearnerState(self.bounds, 2.0, 1.0, momentum, a)
        states = []
        D_v_prev = 0.0
        prev = {'M': 1, 'D_a': 0.0, 'W': 0.0}
        for _ in range(CASES):
            D_a = rng.exponential(2.0)
            state = learner.begin_epoch_update(state, D_a, D_v_prev, prev,
                                               f_max)
            states.append(state)
            W = policy.waiting_time(state.get_policy(), D_a)
            prev = {'M': 1 + rng.poisson(0.3), 'D_a': D_a, 'W': W}
            D_v_prev = rng.exponential(1.0) * (prev['M'] - 1)
        return states

    def test_gamma_stays_in_bounds(self):
        for state in self._random_run(31):
            self.assertTrue(0.0 <= state.gamma <= 10.0)
            self.assertGreaterEqual(state.U, 0.0)
            self.assertEqual(state.nu, state.U / state.V)

    def test_running_moments_are_exact(self):
        rng = np.random.default_rng(41)
        samples = rng.exponential(1.0, CASES)
        state = learner.LearnerState(self.bounds)
        prev = {'M': 1, 'D_a': 0.0, 'W': 0.0}
        for D_v in samples:
            state = learner.begin_epoch_update(state, 1.0, D_v, prev,
                                               math.inf)
        self.assertAllClose(state.mu, np.mean(samples), rtol=1e-10)
        self.assertAllClose(state.m, np.mean(samples ** 2), rtol=1e-10)
        self.assertAllClose(state.noise_term(),
                            0.5 * np.mean(samples ** 2) -
                            np.mean(samples) ** 2, rtol=1e-9)

    def test_momentum_one_is_vanilla(self):
        vanilla = self._random_run(51)
        momentum = self._random_run(51, True, 1.0)
        self.assertEqual([s.gamma for s in vanilla],
                         [s.gamma for s in momentum])

    def test_momentum_averages_directions(self):
        state = learner.LearnerState(self.bounds, 1.0, 1.0, True, 0.5)
        state = first_update(state, D_a=3.0)
        self.assertEqual(state.B, 1.5)
        self.assertAllClose(state.momentum_d, 0.5 * state.B)
        self.assertAllClose(state.gamma, 1.0 + 0.25 * 0.5 * state.B)

    def test_converges_to_root(self):
        """On a channel with known moments the threshold settles near
        the root of E[g] + N."""
        params = config.uniform_channel(0.5)
        solution = oracle.solve_unconstrained(params, tol=1e-8,
                                              method=oracle.METHOD_ANALYTIC)
        priors = learner.MomentPriors.from_channel(params)
        bounds = learner.gamma_bounds_from_priors(priors, math.inf)
        streams = agerng.StreamFactory(1)
        state = learner.LearnerState(bounds)
        prev = {'M': 1, 'D_a': 0.0, 'W': 0.0}
        D_v_prev = 0.0
        for k in range(1, 20001):
            epoch = channel.sample_epoch(params, streams.get_epoch_stream(k))
            state = learner.begin_epoch_update(state, epoch.D_a, D_v_prev,
                                               prev, math.inf)
            epoch.set_wait(policy.waiting_time(state.get_policy(), epoch.D_a))
            prev = {'M': epoch.M, 'D_a': epoch.D_a, 'W': epoch.W}
            D_v_prev = epoch.D_v
        self.assertLess(abs(state.gamma - solution.gamma_star), 0.05)


if __name__ == '__main__':
    unittest.main()
