#!/usr/bin/python3

import math
import unittest

import mock
import numpy as np

import unittest_base
import config
from agesampler import utils
from agesampler import models
from agesampler import oracle
from agesampler import simulator


class TableSchemaTests(unittest_base.TempDirTestCase):

    def test_header_comment(self):
        self.assertEqual(models.TRACE.header_comment(), "agesampler-trace v1")
        table = models.FIT.new_table(['seed=1'])
        self.assertEqual(table.get_comments(),
                         ["agesampler-fit v1", "seed=1"])
        self.assertEqual(table.get_fields(), models.FIT.get_fields())

    def test_oracle_round_trip(self):
        solution = oracle.solve_unconstrained(config.deterministic_channel(),
                                              tol=1e-9)
        table = models.oracle_table(solution, ['f_max=inf'])
        path = table.write(self.path('oracle.csv'))
        again = models.ORACLE.read(path)
        self.assertEqual(again, table)
        self.assertEqual(again.get_comments(), table.get_comments())
        self.assertEqual(again.get_rows()[0]['method'],
                         oracle.METHOD_ANALYTIC)

    def test_fit_round_trip(self):
        table = models.FIT.new_table()
        table.append({'quantity': 'mse_gamma', 'variant': 'online',
                      'slope': -1.0000000000000002, 'intercept': 0.1,
                      'r2': 0.99, 'n_points': 4})
        self.assertEqual(models.FIT.from_csv(table.to_csv()), table)

    def test_wrong_header(self):
        text = models.FIT.new_table().to_csv()
        self.assertRaises(utils.InvalidArgument, models.COMPARE.from_csv,
                          text)
        self.assertRaises(utils.InvalidArgument, models.FIT.from_csv,
                          "variant,slope\nonline,1.0\n")

    def test_missing_columns(self):
        text = "# %s\nquantity,variant\nmse_gamma,online\n" % \
            models.FIT.header_comment()
        self.assertRaises(utils.InvalidArgument, models.FIT.from_csv, text)

    def test_missing_file(self):
        self.assertRaises(utils.ConfigFileNotFound, models.TRACE.read,
                          self.path('absent.csv'))


class TraceTableTests(unittest_base.TempDirTestCase):

    def setUp(self):
        unittest_base.TempDirTestCase.setUp(self)
        run_config = simulator.RunConfig(config.uniform_channel(0.5),
                                         'online', 25, seed=4,
                                         priors='exact', trace_stride=10)
        self.result = simulator.run(run_config)

    def test_stride(self):
        table = models.trace_table(self.result)
        self.assertEqual(table.get_column('k'), [0, 10, 20, 25])
        self.assertEqual(len(models.trace_table(self.result, 1)), 26)

    def test_stride_beyond_horizon(self):
        with mock.patch('agesampler.utils.log') as log:
            table = models.trace_table(self.result, 1000)
        self.assertEqual(table.get_column('k'), [0, 25])
        self.assertEqual(log.warning.call_count, 1)

    def test_comments(self):
        comments = models.trace_table(self.result).get_comments()
        self.assertEqual(comments[0], "agesampler-trace v1")
        self.assertIn("policy=online", comments)
        self.assertIn("rng=philox4x64-10", comments)
        self.assertIn("include_warmup=true", comments)

    def test_round_trip(self):
        table = models.trace_table(self.result, 1)
        again = models.TRACE.read(table.write(self.path('trace.csv')))
        records = self.result.get_records()
        for field in models.TRACE.get_fields():
            np.testing.assert_array_equal(again.get_column(field),
                                          records[field])


class NanRatioTests(unittest_base.DevTestCase):

    def test_ratio(self):
        self.assertEqual(models.nan_ratio(1.0, 4.0), 0.25)
        self.assertTrue(math.isnan(models.nan_ratio(1.0, 0.0)))
        self.assertTrue(math.isnan(models.nan_ratio(math.nan, 1.0)))
        self.assertTrue(math.isnan(models.nan_ratio(0.0, 0.0)))


if __name__ == '__main__':
    unittest.main()
