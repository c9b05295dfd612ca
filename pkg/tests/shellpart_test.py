#!/usr/bin/python3
import unittest

import numpy as np

from pycoarse.certify import verify_certificate
from pycoarse.core import (
    Relation,
    Window,
    chain_relation,
    diagonal,
    random_phi_table,
    validate_phi,
)
from pycoarse.exceptions import PreconditionError, RejectedInputError
from pycoarse.shellpart import (
    augment,
    brick_certificate,
    check_admissible,
    check_shell_recurrence,
    neighbouring_shells,
    parity_certificate,
    product_certificate,
    shell_partition,
    shells_to_phi,
)
from test_config import MAX_RANDOM_WIDTH, SEED, SHELL_PROPERTY_RUNS


class AdmissibilityTest(unittest.TestCase):
    def test_missing_diagonal(self):
        window = Window(3)
        with self.assertRaises(PreconditionError) as ctx:
            check_admissible(Relation(window, [(0, 1), (1, 0)]))
        self.assertEqual(ctx.exception.offending, (0, 0))

    def test_missing_inverse(self):
        window = Window(4)
        F = augment(diagonal(window))
        lopsided = Relation(window, list(F.pairs) + [(0, 2)])
        with self.assertRaises(PreconditionError) as ctx:
            check_admissible(lopsided)
        self.assertEqual(ctx.exception.offending, (0, 2))

    def test_missing_chain_pair(self):
        with self.assertRaises(PreconditionError) as ctx:
            check_admissible(diagonal(Window(3)))
        self.assertEqual(ctx.exception.offending, (0, 1))

    def test_augment_is_admissible(self):
        rng = np.random.default_rng(SEED)
        window = Window(30)
        relation = random_phi_table(30, 4, rng).to_relation(window)
        F = augment(relation)
        check_admissible(F)
        self.assertTrue(F.reflexive)
        self.assertTrue(F.symmetric)
        self.assertTrue(relation.pairs <= F.pairs)


class ShellPartitionTest(unittest.TestCase):
    def test_chain_shells(self):
        decomposition = shell_partition(chain_relation(Window(10), 1))
        self.assertEqual(
            decomposition.shells,
            tuple([frozenset({0, 1})] + [frozenset({n}) for n in range(2, 10)]),
        )

    def test_wider_chain_shells(self):
        decomposition = shell_partition(chain_relation(Window(10), 2))
        self.assertEqual(
            decomposition.shells,
            (
                frozenset({0, 1, 2}),
                frozenset({3, 4}),
                frozenset({5, 6}),
                frozenset({7, 8}),
                frozenset({9}),
            ),
        )

    def test_base_point(self):
        decomposition = shell_partition(chain_relation(Window(5), 1), base=2)
        self.assertEqual(
            decomposition.shells, (frozenset({1, 2, 3}), frozenset({0, 4}))
        )
        with self.assertRaises(RejectedInputError):
            shell_partition(chain_relation(Window(5), 1), base=5)

    def test_rejects_inadmissible_relation(self):
        with self.assertRaises(PreconditionError):
            shell_partition(diagonal(Window(4)))

    def test_random_admissible_relations(self):
        rng = np.random.default_rng(SEED)
        for _ in range(SHELL_PROPERTY_RUNS):
            size = int(rng.integers(2, 200))
            width = int(rng.integers(1, MAX_RANDOM_WIDTH + 1))
            window = Window(size)
            F = augment(random_phi_table(size, width, rng).to_relation(window))
            decomposition = shell_partition(F)
            covered = set().union(*decomposition.shells)
            self.assertEqual(covered, set(range(size)))
            self.assertEqual(
                sum(len(shell) for shell in decomposition.shells), size
            )
            self.assertTrue(check_shell_recurrence(decomposition))
            self.assertEqual(neighbouring_shells(decomposition), [])
            report = verify_certificate(parity_certificate(decomposition))
            self.assertTrue(report.passed)

    def test_tampered_recurrence(self):
        decomposition = shell_partition(chain_relation(Window(6), 1))
        shells = list(decomposition.shells)
        shells[1], shells[2] = shells[2], shells[1]
        tampered = decomposition._replace(shells=tuple(shells))
        self.assertFalse(check_shell_recurrence(tampered))


class ParityCertificateTest(unittest.TestCase):
    def test_chain_families(self):
        decomposition = shell_partition(chain_relation(Window(10), 1))
        certificate = parity_certificate(decomposition)
        even, odd = certificate.families
        self.assertEqual(
            set(even.blocks), {frozenset({0, 1}), frozenset({3}),
                               frozenset({5}), frozenset({7}), frozenset({9})},
        )
        self.assertEqual(
            set(odd.blocks),
            {frozenset({2}), frozenset({4}), frozenset({6}), frozenset({8})},
        )
        self.assertTrue(verify_certificate(certificate).passed)

    def test_single_shell(self):
        decomposition = shell_partition(chain_relation(Window(3), 2))
        certificate = parity_certificate(decomposition)
        self.assertEqual(certificate.n, 0)
        self.assertTrue(verify_certificate(certificate).passed)

    def test_shell_phi_is_valid(self):
        decomposition = shell_partition(chain_relation(Window(20), 3))
        phi = shells_to_phi(decomposition)
        report = validate_phi(phi, Window(20), column_limit=2)
        self.assertTrue(report.is_valid())


class ProductCertificateTest(unittest.TestCase):
    def _verified(self, size):
        decomposition = shell_partition(chain_relation(Window(size), 1))
        return verify_certificate(parity_certificate(decomposition)).certificate

    def test_product_of_parity_certificates(self):
        first, second = self._verified(4), self._verified(5)
        product = product_certificate(first, second)
        self.assertEqual(product.window.size, 20)
        self.assertEqual(product.n, 3)
        self.assertEqual(
            [family.index for family in product.families], [0, 1, 2, 3]
        )
        self.assertTrue(verify_certificate(product).passed)

    def test_needs_verified_inputs(self):
        decomposition = shell_partition(chain_relation(Window(4), 1))
        unverified = parity_certificate(decomposition)
        with self.assertRaises(RejectedInputError):
            product_certificate(unverified, self._verified(4))


class BrickCertificateTest(unittest.TestCase):
    def test_planar_bricks(self):
        certificate = brick_certificate(2, 1, 7, 21)
        self.assertEqual(certificate.n, 2)
        self.assertTrue(verify_certificate(certificate).passed)

    def test_line_bricks(self):
        certificate = brick_certificate(1, 2, 9, 40)
        self.assertEqual(certificate.n, 1)
        self.assertTrue(verify_certificate(certificate).passed)

    def test_zero_radius(self):
        certificate = brick_certificate(2, 0, 3, 6)
        self.assertEqual(certificate.n, 0)
        self.assertTrue(verify_certificate(certificate).passed)

    def test_side_too_small(self):
        with self.assertRaises(PreconditionError) as ctx:
            brick_certificate(2, 1, 6, 21)
        self.assertEqual(ctx.exception.offending, 6)

    def test_window_dimension(self):
        with self.assertRaises(RejectedInputError):
            brick_certificate(2, 1, 7, Window(21))


if __name__ == "__main__":
    unittest.main()
