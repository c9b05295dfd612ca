#!/usr/bin/python3
import unittest

import numpy as np

from pycoarse.certify import (
    AsdimCertificate,
    brute_min_families,
    is_bounded_family,
    is_disjoint_family,
    make_family,
    verify_certificate,
)
from pycoarse.core import (
    Relation,
    Window,
    chain_relation,
    diagonal,
    full_relation,
    interval_rule,
    random_relation,
    reflexive_closure,
    union,
)
from pycoarse.exceptions import OracleCapError, RejectedInputError
from pycoarse.shellpart import augment, shell_partition, shells_to_phi
from test_config import SEED


class DisjointnessTest(unittest.TestCase):
    def setUp(self):
        self.window = Window(5)
        self.E = chain_relation(self.window, 1)

    def test_separated_blocks(self):
        family = make_family(self.window, [{0, 1}, {3}], 0)
        result = is_disjoint_family(family, self.E)
        self.assertTrue(result.passed)
        self.assertIsNone(result.witness)

    def test_adjacent_blocks(self):
        family = make_family(self.window, [{0}, {1}], 0)
        result = is_disjoint_family(family, self.E)
        self.assertFalse(result.passed)
        self.assertEqual(result.witness, ({0}, {1}, 1))

    def test_window_mismatch(self):
        family = make_family(Window(4), [{0}], 0)
        with self.assertRaises(RejectedInputError):
            is_disjoint_family(family, self.E)


class BoundednessTest(unittest.TestCase):
    def test_midpoints_are_centers(self):
        window = Window(9)
        family = make_family(window, [{0, 1, 2}, {3, 4, 5}, {6, 7, 8}], 0)
        result = is_bounded_family(family, chain_relation(window, 1))
        self.assertTrue(result.passed)
        self.assertEqual(result.witness, (1, 4, 7))

    def test_center_is_middle_candidate(self):
        window = Window(8)
        family = make_family(window, [{2}, {6}], 0)
        result = is_bounded_family(family, chain_relation(window, 1))
        self.assertEqual(result.witness, (2, 6))
        wide = make_family(window, [{3, 4}], 0)
        result = is_bounded_family(wide, chain_relation(window, 2))
        # candidates 2, 3, 4, 5
        self.assertEqual(result.witness, (3,))
        lone = make_family(window, [{0}, {7}], 0)
        result = is_bounded_family(lone, chain_relation(window, 2))
        self.assertEqual(result.witness, (0, 7))

    def test_diagonal_bounds_only_singletons(self):
        window = Window(3)
        family = make_family(window, [{0, 1, 2}], 0)
        result = is_bounded_family(family, diagonal(window))
        self.assertFalse(result.passed)
        self.assertEqual(result.witness, {0, 1, 2})


class VerifyCertificateTest(unittest.TestCase):
    def test_chain_parity_cover(self):
        window = Window(6)
        certificate = AsdimCertificate(
            window=window,
            E=chain_relation(window, 1),
            H=chain_relation(window, 1),
            families=(
                make_family(window, [{0, 1}, {4, 5}], 0),
                make_family(window, [{2, 3}], 1),
            ),
        )
        self.assertFalse(certificate.verified)
        self.assertEqual(certificate.n, 1)
        report = verify_certificate(certificate)
        self.assertTrue(report.passed)
        self.assertTrue(report.certificate.verified)
        self.assertEqual(report.centers, (0, 4, 2))

    def test_uncovered_point(self):
        window = Window(8)
        certificate = AsdimCertificate(
            window=window,
            E=diagonal(window),
            H=full_relation(window),
            families=(make_family(window, [range(7)], 0),),
        )
        report = verify_certificate(certificate)
        self.assertFalse(report.passed)
        self.assertEqual(report.uncovered, (7,))
        self.assertFalse(report.certificate.verified)

    def test_malformed_blocks_are_reported(self):
        window = Window(5)
        certificate = AsdimCertificate(
            window=window,
            E=diagonal(window),
            H=full_relation(window),
            families=(
                make_family(window, [range(5), {9}, set()], 0),
                make_family(Window(3), [{0}], 1),
            ),
        )
        report = verify_certificate(certificate)
        self.assertFalse(report.passed)
        self.assertEqual(
            report.malformed, ((0, {9}), (0, frozenset()), (1, None))
        )
        self.assertEqual(report.uncovered, ())

    def test_disjointness_failure_names_family(self):
        window = Window(4)
        certificate = AsdimCertificate(
            window=window,
            E=chain_relation(window, 1),
            H=full_relation(window),
            families=(make_family(window, [{0, 1}, {2, 3}], 0),),
        )
        report = verify_certificate(certificate)
        self.assertEqual(
            report.disjointness_failures, ((0, ({0, 1}, {2, 3}, 2)),)
        )

    def test_phi_scale(self):
        window = Window(6)
        certificate = AsdimCertificate(
            window=window,
            E=diagonal(window),
            H=interval_rule(1),
            families=(make_family(window, [{0, 1, 2}, {3, 4, 5}], 0),),
        )
        report = verify_certificate(certificate)
        self.assertTrue(report.passed)
        self.assertEqual(report.centers, (1, 4))


class OracleTest(unittest.TestCase):
    def test_chain_needs_two_families(self):
        window = Window(6)
        found = brute_min_families(
            chain_relation(window, 1), chain_relation(window, 2)
        )
        self.assertEqual(found.n, 1)
        self.assertTrue(found.certificate.verified)
        self.assertTrue(verify_certificate(found.certificate).passed)

    def test_diagonal_scale(self):
        window = Window(5)
        found = brute_min_families(diagonal(window), chain_relation(window, 1))
        self.assertEqual(found.n, 0)

    def test_full_boundedness_scale(self):
        window = Window(6)
        found = brute_min_families(
            chain_relation(window, 1), full_relation(window)
        )
        self.assertEqual(found.n, 0)
        self.assertEqual(len(found.certificate.families[0].blocks), 1)

    def test_no_covering(self):
        window = Window(3)
        found = brute_min_families(diagonal(window), Relation(window, [(0, 0)]))
        self.assertIsNone(found.n)
        self.assertIsNone(found.certificate)

    def test_expression_scales_need_window(self):
        with self.assertRaises(RejectedInputError):
            brute_min_families(interval_rule(1), interval_rule(2))
        found = brute_min_families(
            interval_rule(1), interval_rule(2), window=Window(6)
        )
        self.assertEqual(found.n, 1)

    def test_larger_disjointness_scale_never_helps(self):
        rng = np.random.default_rng(SEED)
        window = Window(7)
        for _ in range(15):
            E = random_relation(window, rng, density=0.15)
            bigger = union(E, random_relation(window, rng, density=0.15))
            H = reflexive_closure(random_relation(window, rng, density=0.3))
            self.assertLessEqual(
                brute_min_families(E, H).n, brute_min_families(bigger, H).n
            )

    def test_larger_boundedness_scale_never_hurts(self):
        rng = np.random.default_rng(SEED + 1)
        window = Window(7)
        for _ in range(15):
            E = random_relation(window, rng, density=0.2)
            H = reflexive_closure(random_relation(window, rng, density=0.2))
            bigger = union(H, random_relation(window, rng, density=0.2))
            self.assertGreaterEqual(
                brute_min_families(E, H).n, brute_min_families(E, bigger).n
            )

    def test_two_point_chain(self):
        window = Window(2)
        E = chain_relation(window, 1)
        self.assertEqual(brute_min_families(E, diagonal(window)).n, 1)
        H = shells_to_phi(shell_partition(augment(E)))
        self.assertEqual(brute_min_families(E, H, window).n, 0)

    def test_chain_against_shells(self):
        for size in (3, 6, 8):
            window = Window(size)
            E = chain_relation(window, 1)
            H = shells_to_phi(shell_partition(augment(E)))
            self.assertEqual(brute_min_families(E, H, window).n, 1, size)

    def test_cap(self):
        window = Window(10)
        with self.assertRaises(OracleCapError) as ctx:
            brute_min_families(diagonal(window), diagonal(window), cap=9)
        self.assertEqual((ctx.exception.size, ctx.exception.cap), (10, 9))


if __name__ == "__main__":
    unittest.main()
