#!/usr/bin/python3
import math
import unittest

import numpy as np

from pycoarse.core import (
    Chain,
    Compose,
    Diagonal,
    Inverse,
    PhiGenerator,
    Relation,
    Union,
    UNBOUNDED,
    Window,
    ball,
    chain_relation,
    compose,
    diagonal,
    full_relation,
    interval_rule,
    inverse,
    materialize,
    random_phi_table,
    random_relation,
    reflexive_closure,
    tensor_product,
    union,
    validate_phi,
)
from pycoarse.exceptions import GeneratorEvaluationError, RejectedInputError
from test_config import SEED


class WindowTest(unittest.TestCase):
    def test_plain_window(self):
        window = Window(5)
        self.assertEqual(len(window), 5)
        self.assertFalse(window.is_labeled())
        self.assertEqual(window.index_of(3), 3)
        self.assertIsNone(window.index_of(5))

    def test_rejects_bad_sizes(self):
        with self.assertRaises(RejectedInputError):
            Window(0)
        with self.assertRaises(RejectedInputError):
            Window(True)

    def test_labels_must_be_injective(self):
        with self.assertRaises(RejectedInputError):
            Window(3, labels=[1, 2, 1])
        window = Window(3, labels=[10, 20, 30])
        self.assertEqual(window.index_of(20), 1)
        self.assertEqual(window.label(2), 30)

    def test_grid_and_product(self):
        grid = Window.grid((3, 4))
        self.assertEqual(grid.size, 12)
        self.assertEqual(grid.label(5), (1, 1))
        self.assertEqual(Window.product(Window(3), Window(4)), grid)
        self.assertEqual(grid.coordinates().shape, (12, 2))


class RelationTest(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(SEED)

    def test_pairs_outside_window(self):
        with self.assertRaises(RejectedInputError) as ctx:
            Relation(Window(3), [(0, 3)])
        self.assertEqual(ctx.exception.witness, (0, 3))

    def test_compose_single_chain(self):
        window = Window(3)
        E = Relation(window, [(0, 1)])
        E2 = Relation(window, [(1, 2)])
        self.assertEqual(compose(E, E2).pairs, {(0, 2)})

    def test_compose_with_diagonal(self):
        window = Window(6)
        E2 = random_relation(window, self.rng)
        self.assertEqual(compose(diagonal(window), E2), E2)

    def test_chain_squared(self):
        window = Window(5)
        chain = chain_relation(window, 1)
        self.assertEqual(compose(chain, chain), chain_relation(window, 2))

    def test_compose_window_mismatch(self):
        with self.assertRaises(RejectedInputError):
            compose(diagonal(Window(3)), diagonal(Window(4)))
        with self.assertRaises(RejectedInputError):
            union(diagonal(Window(3)), diagonal(Window(4)))

    def test_inverse(self):
        window = Window(2)
        self.assertEqual(
            inverse(Relation(window, [(0, 1)])).pairs, {(1, 0)}
        )
        chain = chain_relation(Window(8), 1)
        self.assertEqual(inverse(chain), chain)
        for _ in range(100):
            E = random_relation(Window(7), self.rng)
            self.assertEqual(inverse(inverse(E)), E)

    def test_union(self):
        window = Window(2)
        both = union(Relation(window, [(0, 1)]), Relation(window, [(1, 0)]))
        self.assertTrue(both.symmetric)
        E = random_relation(Window(6), self.rng)
        self.assertTrue(union(E, diagonal(E.window)).reflexive)
        self.assertEqual(union(E, diagonal(E.window)), reflexive_closure(E))

    def test_union_laws(self):
        for _ in range(50):
            window = Window(6)
            E, E2, E3 = (random_relation(window, self.rng) for _ in range(3))
            self.assertEqual(union(E, E), E)
            self.assertEqual(union(E, E2), union(E2, E))
            self.assertEqual(
                union(union(E, E2), E3), union(E, union(E2, E3))
            )

    def test_ball(self):
        chain = chain_relation(Window(10), 1)
        self.assertEqual(ball(chain, {0}), frozenset({0, 1}))
        self.assertEqual(ball(chain, set()), frozenset())
        with self.assertRaises(RejectedInputError):
            ball(chain, {10})

    def test_ball_of_composition(self):
        for _ in range(100):
            window = Window(6)
            E = random_relation(window, self.rng)
            E2 = random_relation(window, self.rng)
            x = int(self.rng.integers(6))
            self.assertEqual(
                ball(compose(E, E2), {x}), ball(E2, ball(E, {x}))
            )

    def test_dense_and_sparse_agree(self):
        window = Window(9)
        for _ in range(20):
            E = random_relation(window, self.rng)
            E2 = random_relation(window, self.rng)
            dense = compose(E.to_dense(), E2.to_dense())
            sparse_result = compose(E.to_sparse(), E2.to_sparse())
            self.assertFalse(sparse_result.is_dense)
            self.assertEqual(dense, sparse_result)
            self.assertEqual(
                union(E.to_sparse(), E2), union(E.to_dense(), E2)
            )
            self.assertEqual(inverse(E.to_sparse()), inverse(E))

    def test_threshold_picks_mode(self):
        window = Window(20)
        self.assertTrue(Relation(window, [(0, 1)]).is_dense)
        self.assertFalse(Relation(window, [(0, 1)], threshold=10).is_dense)

    def test_tensor_product(self):
        product = tensor_product(
            chain_relation(Window(3), 1), diagonal(Window(2))
        )
        self.assertEqual(product.window, Window.grid((3, 2)))
        # (0, 1) -> (1, 1) moves along the chain axis only
        self.assertIn((1, 3), product)
        self.assertNotIn((1, 2), product)
        sparse_product = tensor_product(
            chain_relation(Window(3), 1), diagonal(Window(2)), threshold=1
        )
        self.assertEqual(sparse_product, product)

    def test_chain_on_grid_is_l_infinity(self):
        grid = Window.grid((3, 3))
        chain = chain_relation(grid, 1)
        self.assertEqual(len(chain.successors(4)), 9)
        self.assertEqual(len(chain.successors(0)), 4)

    def test_full_relation(self):
        self.assertEqual(len(full_relation(Window(4))), 16)


class PhiGeneratorTest(unittest.TestCase):
    def test_table_defaults_to_singletons(self):
        phi = PhiGenerator(table={0: [0, 1]})
        self.assertEqual(phi(0), frozenset({0, 1}))
        self.assertEqual(phi(5), frozenset({5}))

    def test_rule_needs_bound(self):
        with self.assertRaises(RejectedInputError):
            PhiGenerator(rule=lambda n: [n])

    def test_failing_rule(self):
        phi = PhiGenerator(
            rule=lambda n: [n, 10 // (n - 2)], column_bound=lambda k: 2
        )
        with self.assertRaises(GeneratorEvaluationError) as ctx:
            phi.to_relation(Window(4))
        self.assertEqual(ctx.exception.n, 2)

    def test_interval_rule_is_chain(self):
        window = Window(4)
        self.assertEqual(
            interval_rule(1).to_relation(window), chain_relation(window, 1)
        )

    def test_validate_interval(self):
        report = validate_phi(interval_rule(2), Window(100))
        self.assertTrue(report.is_valid())
        self.assertEqual(report.max_column, 5)

    def test_validate_missing_diagonal(self):
        report = validate_phi(PhiGenerator(table={0: [1]}), Window(3))
        self.assertFalse(report.is_valid())
        self.assertEqual(report.missing_diagonal, (0,))

    def test_validate_unbounded_column(self):
        phi = PhiGenerator(
            rule=lambda n: {n, 0},
            column_bound=lambda k: UNBOUNDED if k == 0 else 1,
        )
        report = validate_phi(phi, Window(10))
        self.assertFalse(report.is_valid())
        self.assertEqual(report.unbounded_columns, (0,))
        self.assertTrue(math.isinf(phi.column_bound(0)))

    def test_validate_exceeded_bound(self):
        phi = PhiGenerator(rule=lambda n: {n, 0}, column_bound=lambda k: 1)
        report = validate_phi(phi, Window(5))
        self.assertEqual(report.exceeded_columns, ((0, 5, 1),))

    def test_column_limit_on_tables(self):
        phi = PhiGenerator(table={n: [n, 0] for n in range(6)})
        self.assertTrue(validate_phi(phi, Window(6)).is_valid())
        report = validate_phi(phi, Window(6), column_limit=3)
        self.assertEqual(report.unbounded_columns, (0,))

    def test_table_equality_ignores_default_rows(self):
        self.assertEqual(
            PhiGenerator(table={0: [0], 1: [1, 2]}),
            PhiGenerator(table={1: [2, 1]}),
        )


class ExpressionTest(unittest.TestCase):
    def test_diagonal_leaf(self):
        window = Window(7)
        self.assertEqual(materialize(Diagonal(), window), diagonal(window))

    def test_union_with_inverse_is_symmetric(self):
        rng = np.random.default_rng(SEED)
        window = Window(12)
        for _ in range(20):
            phi = random_phi_table(12, 2, rng)
            relation = materialize(Union(phi, Inverse(phi)), window)
            self.assertTrue(relation.symmetric)

    def test_compose_expression(self):
        window = Window(6)
        self.assertEqual(
            materialize(Compose(Chain(1), Chain(1)), window),
            chain_relation(window, 2),
        )

    def test_restriction_commutes_with_materialize(self):
        rng = np.random.default_rng(SEED)
        phi = random_phi_table(24, 3, rng)
        expressions = [
            Diagonal(),
            Chain(2),
            interval_rule(3),
            phi,
            Inverse(phi),
            Union(phi, Inverse(Chain(1))),
        ]
        large = Window(24)
        for size in (1, 5, 13):
            small = Window(size)
            for expr in expressions:
                self.assertEqual(
                    materialize(expr, large).to_relation(small),
                    materialize(expr, small),
                    (expr, size),
                )

    def test_threshold_converts_mode(self):
        window = Window(30)
        self.assertFalse(materialize(Chain(1), window, threshold=10).is_dense)
        self.assertTrue(materialize(Chain(1), window, threshold=30).is_dense)
        self.assertEqual(
            materialize(Chain(1), window, threshold=10), chain_relation(window)
        )

    def test_unknown_leaf(self):
        with self.assertRaises(RejectedInputError):
            materialize("chain", Window(3))


if __name__ == "__main__":
    unittest.main()
