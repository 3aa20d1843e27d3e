#!/usr/bin/python3

import glob
import json
import math
import os
import unittest

import unittest_base
import config
from agesampler import utils
from agesampler import config as ageconfig
from agesampler import learner
from agesampler import simulator

CONFIG_DIR = os.path.dirname(ageconfig.SCHEMA_FILE)


class ParseConfigTests(unittest_base.DevTestCase):

    def test_fixture(self):
        experiment = ageconfig.parse_config(config.config_rec())
        run_config = experiment.get_run_config()
        self.assertEqual(experiment.get_name(), 'unit')
        self.assertEqual(run_config.horizon_epochs, 200)
        self.assertEqual(run_config.seed, 3)
        self.assertEqual(run_config.f_max, math.inf)
        self.assertEqual(run_config.priors, simulator.PRIORS_EXACT)
        spec = experiment.get_ensemble_spec()
        self.assertEqual(spec.n_seeds, 3)
        self.assertEqual(spec.checkpoints, [10, 100, 200])
        self.assertEqual([v.label for v in spec.get_variants()],
                         ['online', 'constant_wait'])

    def test_no_ensemble(self):
        rec = config.config_rec()
        del rec['ensemble']
        experiment = ageconfig.parse_config(rec)
        self.assertRaises(utils.ArgumentError, experiment.get_ensemble_spec)

    def test_unknown_and_missing_keys(self):
        self.assertRaises(utils.InvalidArgument, ageconfig.parse_config,
                          config.config_rec(colour='blue'))
        rec = config.config_rec()
        del rec['horizon_epochs']
        self.assertRaises(utils.InvalidArgument, ageconfig.parse_config, rec)
        rec = config.config_rec(learner={'priors': 'exact', 'step': 2})
        self.assertRaises(utils.InvalidArgument, ageconfig.parse_config, rec)

    def test_schema_types(self):
        for changes in [{'horizon_epochs': '100'}, {'seed': 'three'},
                        {'include_warmup': 'yes'}, {'policy': 3},
                        {'trace_stride': 0}, {'learner': []}]:
            self.assertRaises(utils.InvalidArgument, ageconfig.parse_config,
                              config.config_rec(**changes))
        self.assertRaises(utils.InvalidArgument, ageconfig.parse_config,
                          ['not', 'an', 'object'])

    def test_schema_error_names_key(self):
        try:
            ageconfig.parse_config(config.config_rec(seed=-4))
        except utils.InvalidArgument as e:
            self.assertEqual(e.arg_name, 'config.seed')
            self.assertEqual(e.value, -4)
        else:
            self.fail("InvalidArgument not raised")

    def test_bad_delays(self):
        for fwd in [{'kind': 'pareto', 'a': 1},
                    {'kind': 'uniform', 'a': 0},
                    {'kind': 'uniform', 'a': 0, 'b': 'x'},
                    {'kind': 'exponential', 'rate': 1, 'shape': 2},
                    'uniform']:
            rec = config.config_rec()
            rec['channel']['fwd'] = fwd
            self.assertRaises(utils.InvalidArgument, ageconfig.parse_config,
                              rec)

    def test_bad_scalars(self):
        for changes in [{'horizon_epochs': 2.5}, {'horizon_epochs': 0},
                        {'seed': -1}, {'V': 0}, {'f_max': 0},
                        {'horizon_epochs': True}]:
            self.assertRaises(utils.InvalidArgument, ageconfig.parse_config,
                              config.config_rec(**changes))

    def test_f_max_delay_multiple(self):
        rec = config.config_rec(f_max_delay_multiple=5)
        del rec['f_max']
        run_config = ageconfig.parse_config(rec).get_run_config()
        self.assertAllClose(run_config.f_max, 0.2)

    def test_f_max_spellings(self):
        for value in [None, 'inf', 'Infinity']:
            run_config = ageconfig.parse_config(
                config.config_rec(f_max=value)).get_run_config()
            self.assertEqual(run_config.f_max, math.inf)
        run_config = ageconfig.parse_config(
            config.config_rec(f_max=0.25)).get_run_config()
        self.assertEqual(run_config.f_max, 0.25)

    def test_f_max_and_multiple(self):
        self.assertRaises(utils.InvalidArgument, ageconfig.parse_config,
                          config.config_rec(f_max=0.2,
                                            f_max_delay_multiple=5))

    def test_prior_slack(self):
        rec = config.config_rec(learner={'priors': 'exact',
                                         'prior_slack': 0.1})
        priors = ageconfig.parse_config(rec).get_run_config().priors
        self.assertTrue(isinstance(priors, learner.MomentPriors))

    def test_bad_checkpoints(self):
        for checkpoints in [[10, 10], [100, 10], [0, 10], [10, 500], 'all']:
            rec = config.config_rec()
            rec['ensemble']['checkpoints'] = checkpoints
            self.assertRaises(utils.InvalidArgument, ageconfig.parse_config,
                              rec)

    def test_duplicate_variants(self):
        rec = config.config_rec()
        rec['ensemble']['comparisons'] = ['online', 'online']
        self.assertRaises(utils.InvalidArgument, ageconfig.parse_config, rec)
        rec['ensemble']['comparisons'] = ['online',
                                          {'policy': 'online', 'V': 10}]
        spec = ageconfig.parse_config(rec).get_ensemble_spec()
        self.assertEqual([v.label for v in spec.get_variants()],
                         ['online', 'online,V=10'])


class OverrideTests(unittest_base.DevTestCase):

    def test_kvp_string(self):
        self.assertEqual(ageconfig.kvp_string_to_rec('a=b, c = d'),
                         {'a': 'b', 'c': 'd'})
        self.assertRaises(utils.InvalidArgument,
                          ageconfig.kvp_string_to_rec, 'a=b,c')
        self.assertRaises(utils.InvalidArgument,
                          ageconfig.kvp_string_to_rec, 'a=b=c')

    def test_apply(self):
        rec = ageconfig.apply_overrides(
            config.config_rec(), {'seed': '9', 'policy': 'zero_wait',
                                  'f_max_delay_multiple': '4'})
        self.assertEqual(rec['seed'], 9)
        self.assertEqual(rec['policy'], 'zero_wait')
        self.assertNotIn('f_max', rec)
        self.assertRaises(utils.InvalidArgument, ageconfig.apply_overrides,
                          config.config_rec(), {'channel': '{}'})


class ConfigFileTests(unittest_base.TempDirTestCase):

    def test_missing_file(self):
        self.assertRaises(utils.ConfigFileNotFound, ageconfig.load_config,
                          self.path('absent.json'))

    def test_bad_json(self):
        path = self.path('broken.json')
        with open(path, 'w') as fh:
            fh.write('{"channel": ')
        self.assertRaises(utils.InvalidArgument, ageconfig.load_config, path)

    def test_name_from_file(self):
        rec = config.config_rec()
        del rec['name']
        path = self.path('mine.json')
        with open(path, 'w') as fh:
            json.dump(rec, fh)
        experiment = ageconfig.load_config(path, {'horizon_epochs': '300'})
        self.assertEqual(experiment.get_name(), 'mine')
        self.assertEqual(experiment.get_run_config().horizon_epochs, 300)

    def test_checked_in_configs_parse(self):
        paths = [path for path in glob.glob(os.path.join(CONFIG_DIR,
                                                         '*.json'))
                 if os.path.basename(path) != 'schema.json']
        self.assertGreaterEqual(len(paths), 10)
        for path in paths:
            experiment = ageconfig.load_config(path)
            self.assertGreater(experiment.get_run_config().horizon_epochs, 0)


if __name__ == '__main__':
    unittest.main()
