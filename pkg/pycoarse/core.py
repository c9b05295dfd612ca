"""
Windows, finite relations and the entourage algebra.

A window is the finite truncation {0, ..., N-1} of a countable space.
Relations on a window are stored as dense boolean matrices up to a size
threshold and as scipy CSR matrices above it; every operation gives the
same pairs in either mode.
"""
import logging
import math
from collections import namedtuple
from itertools import product as cartesian_product
from typing import Callable, Iterable, Optional

import numpy as np
from scipy import sparse

from .config import DEFAULT_DENSE_THRESHOLD
from .exceptions import GeneratorEvaluationError, RejectedInputError
from .type_helpers import IndexSet, PhiTable

logger = logging.getLogger(__name__)

UNBOUNDED = math.inf
"""Column bound marker for rules that cannot promise finite columns."""


class Window:
    """
    The ground set {0, ..., size - 1}.

    :param int size: Number of points, at least 1.
    :param labels: Optional injective sequence of opaque labels, one per
        index (group elements, grid coordinates...).
    :param shape: Grid shape for product windows, row-major.
    """

    def __init__(self, size: int, labels=None, shape=None):
        if isinstance(size, bool) or not isinstance(size, (int, np.integer)):
            raise RejectedInputError("window size must be an integer", size)
        if size < 1:
            raise RejectedInputError("window size must be at least 1", size)
        self.size = int(size)
        """Number of points in the window."""
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != self.size:
                raise RejectedInputError(
                    "label count does not match window size", len(labels)
                )
            seen = set()
            for label in labels:
                if label in seen:
                    raise RejectedInputError(
                        "window labels must be injective", label
                    )
                seen.add(label)
        self.labels = labels
        """Tuple of labels or None for a plain window."""
        self.shape = tuple(shape) if shape is not None else None
        """Grid shape or None."""
        self._label_index = None

    @classmethod
    def grid(cls, shape) -> "Window":
        """
        Build the product window of a grid, labeled by coordinate tuples.

        :param shape: Side lengths, one per axis.
        :returns: A window of size prod(shape) in row-major order.
        :rtype: Window
        """
        shape = tuple(int(side) for side in shape)
        labels = tuple(cartesian_product(*(range(side) for side in shape)))
        return cls(len(labels), labels=labels, shape=shape)

    @classmethod
    def product(cls, first: "Window", second: "Window") -> "Window":
        """
        Product of two windows, index i * second.size + j for (i, j).

        Labels are pairs of the factor labels (indices for plain factors).
        """
        labels = tuple(
            (first.label(i), second.label(j))
            for i in range(first.size)
            for j in range(second.size)
        )
        return cls(
            first.size * second.size,
            labels=labels,
            shape=(first.size, second.size),
        )

    def is_labeled(self) -> bool:
        return self.labels is not None

    def label(self, index: int):
        if self.labels is None:
            return index
        return self.labels[index]

    def index_of(self, label) -> Optional[int]:
        """Return the index carrying label, or None."""
        if self.labels is None:
            if isinstance(label, (int, np.integer)) and 0 <= label < self.size:
                return int(label)
            return None
        if self._label_index is None:
            self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        return self._label_index.get(label)

    def coordinates(self) -> np.ndarray:
        """Grid coordinates as an (N, m) integer array."""
        if self.shape is None or self.labels is None:
            return np.arange(self.size, dtype=np.int64).reshape(-1, 1)
        return np.asarray(self.labels, dtype=np.int64).reshape(self.size, -1)

    def __len__(self):
        return self.size

    def __eq__(self, other):
        if not isinstance(other, Window):
            return NotImplemented
        return (
            self.size == other.size
            and self.labels == other.labels
            and self.shape == other.shape
        )

    def __hash__(self):
        return hash((self.size, self.labels, self.shape))

    def __repr__(self):
        if self.shape is not None:
            return f"Window(size={self.size}, shape={self.shape})"
        if self.labels is not None:
            return f"Window(size={self.size}, labeled)"
        return f"Window(size={self.size})"


def _pair_arrays(pairs):
    if isinstance(pairs, tuple) and len(pairs) == 2 and all(
        isinstance(part, np.ndarray) for part in pairs
    ):
        return (
            np.asarray(pairs[0], dtype=np.int64),
            np.asarray(pairs[1], dtype=np.int64),
        )
    pairs = list(pairs)
    if not pairs:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    array = np.asarray(pairs, dtype=np.int64)
    if array.ndim != 2 or array.shape[1] != 2:
        raise RejectedInputError("pairs must be (i, j) tuples")
    return array[:, 0], array[:, 1]


class Relation:
    """
    A finite entourage: a set of ordered pairs over a window.

    Relations are immutable.  Small windows use a dense boolean matrix,
    larger ones a CSR matrix; pass dense=True/False to force a mode.

    :param Window window: The window the pairs live in.
    :param pairs: Iterable of (i, j) pairs, or a (rows, cols) tuple of
        integer arrays.
    :param Optional[bool] dense: Force dense (True) or sparse (False).
    :param int threshold: Largest window size stored densely when dense
        is None.
    """

    def __init__(
        self,
        window: Window,
        pairs=(),
        dense: Optional[bool] = None,
        threshold: int = DEFAULT_DENSE_THRESHOLD,
    ):
        size = window.size
        rows, cols = _pair_arrays(pairs)
        outside = (rows < 0) | (rows >= size) | (cols < 0) | (cols >= size)
        if outside.any():
            at = int(np.flatnonzero(outside)[0])
            raise RejectedInputError(
                f"pair outside window of size {size}",
                (int(rows[at]), int(cols[at])),
            )
        if dense is None:
            dense = size <= threshold
        self.window = window
        """The window the relation lives on."""
        self._matrix = _build_matrix(size, rows, cols, dense)
        self._dense = dense
        self._cache = {}

    @classmethod
    def _from_matrix(cls, window, matrix):
        relation = cls.__new__(cls)
        relation.window = window
        relation._dense = isinstance(matrix, np.ndarray)
        if not relation._dense:
            matrix = matrix.tocsr().astype(bool)
            matrix.eliminate_zeros()
            matrix.sum_duplicates()
            matrix.sort_indices()
        relation._matrix = matrix
        relation._cache = {}
        return relation

    @property
    def is_dense(self) -> bool:
        return self._dense

    def matrix(self, dense: Optional[bool] = None):
        """Return the underlying matrix, converted to the requested mode."""
        if dense is None or dense == self._dense:
            return self._matrix
        if dense:
            return self._matrix.toarray()
        return sparse.csr_matrix(self._matrix)

    def pair_arrays(self):
        """Rows and columns of all pairs, sorted lexicographically."""
        if "arrays" not in self._cache:
            if self._dense:
                rows, cols = np.nonzero(self._matrix)
            else:
                coo = self._matrix.tocoo()
                rows, cols = coo.row, coo.col
            self._cache["arrays"] = (
                rows.astype(np.int64),
                cols.astype(np.int64),
            )
        return self._cache["arrays"]

    @property
    def pairs(self) -> frozenset:
        """The pairs as a frozenset of (i, j) tuples."""
        if "pairs" not in self._cache:
            rows, cols = self.pair_arrays()
            self._cache["pairs"] = frozenset(
                zip(rows.tolist(), cols.tolist())
            )
        return self._cache["pairs"]

    def successors(self, i: int) -> np.ndarray:
        """E[i] as a sorted array."""
        if self._dense:
            return np.flatnonzero(self._matrix[i])
        matrix = self._matrix
        return matrix.indices[matrix.indptr[i]:matrix.indptr[i + 1]]

    def predecessors(self, j: int) -> np.ndarray:
        """E^-1[j] as a sorted array."""
        if self._dense:
            return np.flatnonzero(self._matrix[:, j])
        if "csc" not in self._cache:
            csc = self._matrix.tocsc()
            csc.sort_indices()
            self._cache["csc"] = csc
        csc = self._cache["csc"]
        return csc.indices[csc.indptr[j]:csc.indptr[j + 1]]

    def ball_array(self, points) -> np.ndarray:
        """E[A] as a sorted array of indices."""
        if isinstance(points, np.ndarray):
            points = np.unique(points.astype(np.int64))
        else:
            points = np.asarray(sorted(int(p) for p in points), dtype=np.int64)
        if points.size == 0:
            return points
        if self._dense:
            return np.flatnonzero(self._matrix[points].any(axis=0))
        indptr, indices = self._matrix.indptr, self._matrix.indices
        parts = [indices[indptr[p]:indptr[p + 1]] for p in points]
        return np.unique(np.concatenate(parts)).astype(np.int64)

    @property
    def reflexive(self) -> bool:
        """True if (i, i) is in the relation for every i."""
        if "reflexive" not in self._cache:
            self._cache["reflexive"] = bool(np.all(self._matrix.diagonal()))
        return self._cache["reflexive"]

    @property
    def symmetric(self) -> bool:
        """True if the relation equals its inverse."""
        if "symmetric" not in self._cache:
            if self._dense:
                value = bool(np.array_equal(self._matrix, self._matrix.T))
            else:
                value = (self._matrix != self._matrix.T).nnz == 0
            self._cache["symmetric"] = value
        return self._cache["symmetric"]

    def to_dense(self) -> "Relation":
        return Relation._from_matrix(self.window, self.matrix(dense=True))

    def to_sparse(self) -> "Relation":
        return Relation._from_matrix(self.window, self.matrix(dense=False))

    def with_threshold(self, threshold: int) -> "Relation":
        """The same pairs, dense if the window has at most threshold points."""
        dense = self.window.size <= threshold
        if dense == self._dense:
            return self
        return self.to_dense() if dense else self.to_sparse()

    def to_relation(self, window: Window) -> "Relation":
        """Transplant the pairs that fit into another window."""
        if window == self.window:
            return self
        rows, cols = self.pair_arrays()
        keep = (rows < window.size) & (cols < window.size)
        return Relation(window, (rows[keep], cols[keep]))

    def __contains__(self, pair):
        i, j = pair
        if not (0 <= i < self.window.size and 0 <= j < self.window.size):
            return False
        if self._dense:
            return bool(self._matrix[i, j])
        row = self.successors(i)
        at = np.searchsorted(row, j)
        return bool(at < row.size and row[at] == j)

    def __len__(self):
        return int(self.pair_arrays()[0].size)

    def __iter__(self):
        rows, cols = self.pair_arrays()
        for i, j in zip(rows.tolist(), cols.tolist()):
            yield (i, j)

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        if self.window != other.window:
            return False
        rows, cols = self.pair_arrays()
        other_rows, other_cols = other.pair_arrays()
        return np.array_equal(rows, other_rows) and np.array_equal(
            cols, other_cols
        )

    def __hash__(self):
        if "hash" not in self._cache:
            rows, cols = self.pair_arrays()
            self._cache["hash"] = hash(
                (self.window, rows.tobytes(), cols.tobytes())
            )
        return self._cache["hash"]

    def __repr__(self):
        mode = "dense" if self._dense else "sparse"
        return (
            f"Relation(size={self.window.size}, pairs={len(self)}, "
            f"mode={mode})"
        )


def _build_matrix(size, rows, cols, dense):
    if dense:
        matrix = np.zeros((size, size), dtype=bool)
        matrix[rows, cols] = True
        return matrix
    keys = np.unique(rows * size + cols)
    rows, cols = keys // size, keys % size
    matrix = sparse.csr_matrix(
        (np.ones(keys.size, dtype=bool), (rows, cols)), shape=(size, size)
    )
    matrix.sort_indices()
    return matrix


def _same_window(first: Relation, second: Relation):
    if first.window != second.window:
        raise RejectedInputError(
            "relations live on different windows",
            (first.window, second.window),
        )


def compose(first: Relation, second: Relation) -> Relation:
    """
    Compose two relations: {(x, y) : (x, z) in first, (z, y) in second}.

    :param Relation first: E.
    :param Relation second: E2, on the same window.
    :returns: E o E2 in the mode of E.
    :rtype: Relation
    :raises: RejectedInputError if the windows differ.
    """
    _same_window(first, second)
    left = first.matrix()
    right = second.matrix(dense=first.is_dense)
    if first.is_dense:
        # counts stay below 2**24, so float32 products are exact
        product = (left.astype(np.float32) @ right.astype(np.float32)) > 0.5
    else:
        product = left.astype(np.int32) @ right.astype(np.int32)
    return Relation._from_matrix(first.window, product)


def inverse(relation: Relation) -> Relation:
    """Transpose of the relation."""
    matrix = relation.matrix()
    if relation.is_dense:
        return Relation._from_matrix(relation.window, matrix.T.copy())
    return Relation._from_matrix(relation.window, matrix.T.tocsr())


def union(first: Relation, second: Relation) -> Relation:
    """
    Set union of two relations on the same window.

    :raises: RejectedInputError if the windows differ.
    """
    _same_window(first, second)
    left = first.matrix()
    right = second.matrix(dense=first.is_dense)
    if first.is_dense:
        return Relation._from_matrix(first.window, left | right)
    merged = left.astype(np.int8) + right.astype(np.int8)
    return Relation._from_matrix(first.window, merged)


def ball(relation: Relation, points: IndexSet) -> frozenset:
    """
    The ball E[A] = {y : (a, y) in E for some a in A}.

    :param Relation relation: E.
    :param IndexSet points: A, a subset of the window.
    :returns: E[A]; empty for empty A.
    :rtype: frozenset
    """
    points = set(int(p) for p in points)
    outside = [p for p in points if not 0 <= p < relation.window.size]
    if outside:
        raise RejectedInputError("ball center outside window", min(outside))
    return frozenset(relation.ball_array(points).tolist())


def tensor_product(
    first: Relation,
    second: Relation,
    threshold: int = DEFAULT_DENSE_THRESHOLD,
) -> Relation:
    """
    The componentwise relation E (x) E2 on the product window.

    ((i, j), (i2, j2)) is a pair iff (i, i2) in E and (j, j2) in E2.
    """
    window = Window.product(first.window, second.window)
    if window.size <= threshold:
        matrix = np.kron(first.matrix(dense=True), second.matrix(dense=True))
        return Relation._from_matrix(window, matrix.astype(bool))
    matrix = sparse.kron(
        first.matrix(dense=False).astype(np.int8),
        second.matrix(dense=False).astype(np.int8),
        format="csr",
    )
    return Relation._from_matrix(window, matrix)


def diagonal(window: Window) -> Relation:
    """The diagonal relation on a window."""
    index = np.arange(window.size, dtype=np.int64)
    return Relation(window, (index, index))


def full_relation(window: Window) -> Relation:
    rows, cols = np.divmod(
        np.arange(window.size * window.size, dtype=np.int64), window.size
    )
    return Relation(window, (rows, cols))


def chain_relation(window: Window, radius: int = 1) -> Relation:
    """
    The l-infinity radius relation: pairs at coordinate distance <= radius.

    On a plain window this is {(i, j) : |i - j| <= radius}, the chain
    relation with its diagonal; on a grid window the distance is taken on
    coordinates.
    """
    if radius < 0:
        raise RejectedInputError("radius must be non-negative", radius)
    coords = window.coordinates()
    shape = window.shape if window.shape is not None else (window.size,)
    sides = np.asarray(shape, dtype=np.int64)
    row_parts, col_parts = [], []
    span = range(-radius, radius + 1)
    for offset in cartesian_product(*(span for _ in shape)):
        moved = coords + np.asarray(offset, dtype=np.int64)
        inside = np.all((moved >= 0) & (moved < sides), axis=1)
        source = np.flatnonzero(inside)
        target = np.zeros(source.size, dtype=np.int64)
        for axis, side in enumerate(sides):
            target = target * side + moved[inside, axis]
        row_parts.append(source)
        col_parts.append(target)
    return Relation(
        window, (np.concatenate(row_parts), np.concatenate(col_parts))
    )


def reflexive_closure(relation: Relation) -> Relation:
    return union(relation, diagonal(relation.window))


class PhiGenerator:
    """
    A rule n -> phi(n), a finite subset of omega containing n.

    Either an explicit table (rows not in the table default to {n}) or a
    rule with a declared column bound k -> bound(k), which promises
    |{m : k in phi(m)}| <= bound(k).

    :param Optional[PhiTable] table: Mapping n -> iterable of indices.
    :param Optional[Callable] rule: Function n -> iterable of indices.
    :param Optional[Callable] column_bound: Function k -> int or UNBOUNDED.
    :param Optional[str] spec: Mini-language description of a rule, used
        when writing documents.
    """

    def __init__(
        self,
        table: Optional[PhiTable] = None,
        rule: Optional[Callable[[int], Iterable[int]]] = None,
        column_bound: Optional[Callable[[int], float]] = None,
        spec: Optional[str] = None,
    ):
        if (table is None) == (rule is None):
            raise RejectedInputError("give exactly one of table or rule")
        if rule is not None and column_bound is None:
            raise RejectedInputError("rule form needs a column bound")
        self._table = None
        if table is not None:
            self._table = {}
            for n, values in table.items():
                row = frozenset(int(v) for v in values)
                if int(n) < 0 or any(v < 0 for v in row):
                    raise RejectedInputError("phi values must lie in omega", n)
                self._table[int(n)] = row
        self._rule = rule
        self._column_bound = column_bound
        self.spec = spec
        """Rule description or None."""

    @property
    def is_table(self) -> bool:
        return self._table is not None

    @property
    def table_size(self) -> int:
        """Number of rows 0..size-1 covered by the table (0 for rules)."""
        if not self._table:
            return 0
        return max(self._table) + 1

    def rows(self):
        """Table rows n -> phi(n) for n below table_size."""
        return {n: self(n) for n in range(self.table_size)}

    def __call__(self, n: int) -> frozenset:
        if self._table is not None:
            return self._table.get(n, frozenset((n,)))
        try:
            values = frozenset(int(v) for v in self._rule(n))
        except Exception as err:
            raise GeneratorEvaluationError(n, err)
        if any(v < 0 for v in values):
            raise GeneratorEvaluationError(
                n, ValueError("phi(n) must be a subset of omega")
            )
        return values

    def column_bound(self, k: int):
        if self._table is not None:
            return None
        try:
            return self._column_bound(k)
        except Exception as err:
            raise GeneratorEvaluationError(k, err)

    def to_relation(self, window: Window) -> Relation:
        """The induced entourage {(n, k) : k in phi(n)} on the window."""
        size = window.size
        rows, cols = [], []
        for n in range(size):
            for k in self(n):
                if k < size:
                    rows.append(n)
                    cols.append(k)
        return Relation(
            window,
            (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)),
        )

    def __eq__(self, other):
        if not isinstance(other, PhiGenerator):
            return NotImplemented
        if self.is_table and other.is_table:
            return self.rows() == other.rows()
        if self.spec is None:
            return self is other
        return self.spec == other.spec

    def __hash__(self):
        if self.is_table:
            return hash(frozenset(self.rows().items()))
        return hash(self.spec) if self.spec is not None else id(self)

    def __repr__(self):
        if self.is_table:
            return f"PhiGenerator(table rows={self.table_size})"
        return f"PhiGenerator(rule={self.spec or 'custom'})"


def interval_rule(radius: int) -> PhiGenerator:
    """The rule n -> [max(0, n - r), n + r]; every column has 2r + 1 rows."""
    if radius < 0:
        raise RejectedInputError("radius must be non-negative", radius)
    return PhiGenerator(
        rule=lambda n: range(max(0, n - radius), n + radius + 1),
        column_bound=lambda k: 2 * radius + 1,
        spec=f"interval:{radius}",
    )


PhiValidation = namedtuple(
    "PhiValidation",
    ["missing_diagonal", "unbounded_columns", "exceeded_columns", "max_column"],
)
"""
Result of validate_phi.  An empty report means the generator is valid on
the window.

:param tuple missing_diagonal: Indices n with n not in phi(n).
:param tuple unbounded_columns: Columns that cannot be finitely bounded.
:param tuple exceeded_columns: (k, observed, declared) triples.
:param int max_column: Largest observed column size.
"""


def _phi_is_valid(report) -> bool:
    return not (
        report.missing_diagonal
        or report.unbounded_columns
        or report.exceeded_columns
    )


PhiValidation.is_valid = _phi_is_valid


def validate_phi(
    generator: PhiGenerator,
    window: Window,
    column_limit: Optional[int] = None,
) -> PhiValidation:
    """
    Check the phi axioms on a window.

    :param PhiGenerator generator: The generator to check.
    :param Window window: n ranges over this window.
    :param Optional[int] column_limit: For table form, flag columns with
        more rows than this.
    :returns: The validation report; failures are report content.
    :rtype: PhiValidation
    """
    size = window.size
    missing = tuple(n for n in range(size) if n not in generator(n))
    unbounded, exceeded = [], []
    if generator.is_table:
        counts = {}
        rows = generator.rows()
        for values in rows.values():
            for k in values:
                counts[k] = counts.get(k, 0) + 1
        for k in list(counts):
            if k >= generator.table_size:
                counts[k] += 1
        if column_limit is not None:
            unbounded = sorted(k for k, c in counts.items() if c > column_limit)
    else:
        counts = {}
        for m in range(size):
            for k in generator(m):
                if k < size:
                    counts[k] = counts.get(k, 0) + 1
        for k in range(size):
            bound = generator.column_bound(k)
            if bound is None or math.isinf(bound):
                unbounded.append(k)
            elif counts.get(k, 0) > bound:
                exceeded.append((k, counts[k], bound))
    report = PhiValidation(
        missing_diagonal=missing,
        unbounded_columns=tuple(unbounded),
        exceeded_columns=tuple(exceeded),
        max_column=max(counts.values()) if counts else 0,
    )
    logger.debug("validate_phi on %d points: %s", size, report)
    return report


class Diagonal(namedtuple("Diagonal", [])):
    """Leaf materializing the diagonal of any window."""

    def to_relation(self, window: Window) -> Relation:
        return diagonal(window)


class Full(namedtuple("Full", [])):
    def to_relation(self, window: Window) -> Relation:
        return full_relation(window)


class Chain(namedtuple("Chain", ["radius"])):
    """Leaf materializing the l-infinity radius relation of any window."""

    def to_relation(self, window: Window) -> Relation:
        return chain_relation(window, self.radius)


class Compose(namedtuple("Compose", ["left", "right"])):
    def to_relation(self, window: Window) -> Relation:
        return compose(
            materialize(self.left, window), materialize(self.right, window)
        )


class Inverse(namedtuple("Inverse", ["child"])):
    def to_relation(self, window: Window) -> Relation:
        return inverse(materialize(self.child, window))


class Union(namedtuple("Union", ["left", "right"])):
    def to_relation(self, window: Window) -> Relation:
        return union(
            materialize(self.left, window), materialize(self.right, window)
        )


def materialize(
    expr, window: Window, threshold: Optional[int] = None
) -> Relation:
    """
    Evaluate an entourage expression on a window.

    Leaves are Relation, PhiGenerator, Diagonal, Chain, or any object with
    a to_relation(window) method (for example groups.GroupTranslate).
    With a threshold the result is stored dense exactly when the window
    has at most threshold points.

    :raises: RejectedInputError for leaves that cannot be materialized.
    :raises: GeneratorEvaluationError if a phi rule fails.
    """
    if not hasattr(expr, "to_relation"):
        raise RejectedInputError("expression leaf cannot be materialized", expr)
    relation = expr.to_relation(window)
    if threshold is None:
        return relation
    return relation.with_threshold(threshold)


def random_phi_table(
    size: int, width: int, rng: np.random.Generator, density: float = 0.5
) -> PhiGenerator:
    """
    A seeded random table with n in phi(n) and phi(n) in [n - w, n + w].
    """
    offsets = np.arange(-width, width + 1)
    picks = rng.random((size, offsets.size)) < density
    table = {}
    for n in range(size):
        chosen = n + offsets[picks[n]]
        table[n] = {n} | {int(k) for k in chosen if k >= 0}
    return PhiGenerator(table=table)


def random_relation(
    window: Window, rng: np.random.Generator, density: float = 0.3
) -> Relation:
    rows, cols = np.nonzero(rng.random((window.size, window.size)) < density)
    return Relation(window, (rows.astype(np.int64), cols.astype(np.int64)))
