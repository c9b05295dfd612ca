#!/usr/bin/python3
import unittest
from fractions import Fraction

import numpy as np

from pycoarse.core import Window, chain_relation, interval_rule
from pycoarse.exceptions import RejectedInputError
from pycoarse.groups import (
    find_independent_sequences,
    halving_schedule,
)
from pycoarse.pipelines import (
    axioms_suite,
    brute_force_exponents,
    chain_obstruction_suite,
    oracle_consistency_suite,
    sample_krules,
    shell_certificate_run,
)
from test_config import HALVING_START, LIMIT, SECOND_LIMIT, SEED


class ShellRunTest(unittest.TestCase):
    def test_interval_rule(self):
        result = shell_certificate_run(100, interval_rule(3))
        self.assertTrue(result.passed)
        self.assertTrue(result.certificate.verified)
        # shells of width 3 after a first shell of 4 points
        self.assertEqual(len(result.decomposition.shells), 33)

    def test_relation_rule(self):
        result = shell_certificate_run(20, chain_relation(Window(20), 2))
        self.assertTrue(result.passed)

    def test_dense_threshold_picks_storage(self):
        sparse = shell_certificate_run(100, interval_rule(3), dense_threshold=10)
        dense = shell_certificate_run(100, interval_rule(3))
        self.assertFalse(sparse.decomposition.F.is_dense)
        self.assertTrue(dense.decomposition.F.is_dense)
        self.assertTrue(sparse.passed)
        self.assertEqual(sparse.decomposition.shells, dense.decomposition.shells)

    def test_suites_run_sparse(self):
        self.assertTrue(axioms_suite(30, seed=SEED, dense_threshold=4).passed)
        self.assertTrue(
            chain_obstruction_suite(max_size=6, dense_threshold=0).passed
        )
        self.assertTrue(
            oracle_consistency_suite(10, seed=SEED, dense_threshold=4).passed
        )


class BruteForceExponentsTest(unittest.TestCase):
    def test_first_exponents(self):
        self.assertEqual(
            brute_force_exponents(LIMIT, [Fraction(1, 10), Fraction(1, 50)]),
            [1, 8],
        )

    def test_group_limit_refused(self):
        with self.assertRaises(RejectedInputError):
            brute_force_exponents(Fraction(0), [Fraction(1, 10)])


class SampleKRulesTest(unittest.TestCase):
    def test_rules_hold_zero(self):
        sequences = find_independent_sequences(
            [LIMIT, SECOND_LIMIT], halving_schedule(HALVING_START, 6)
        )
        rules = sample_krules(sequences, np.random.default_rng(SEED), 5)
        self.assertEqual(len(rules), 5)
        for rule in rules:
            self.assertTrue(rule.contains_zero())
            self.assertEqual(len(rule.parts), 2)


if __name__ == "__main__":
    unittest.main()
