"""
Group-ideal coarse structures on the circle subgroup generated by sqrt(2) - 1.

Points of Q(sqrt 2)/Z are stored exactly as (a + b*sqrt2)/d reduced into
[0, 1).  The group G = <alpha>, alpha = sqrt(2) - 1, is exactly the set of
such points with d = 1, and the element n*alpha has exponent n = b.  All
order and equality decisions use integer arithmetic only.
"""
import logging
from collections import namedtuple
from fractions import Fraction
from functools import total_ordering
from itertools import product as cartesian_product
from math import gcd, isqrt
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .config import DEFAULT_SEARCH_BUDGET
from .core import PhiGenerator, Relation, Window, validate_phi
from .exceptions import (
    ConvergenceCheckError,
    ConvergenceSearchError,
    PreconditionError,
    RejectedInputError,
)
from .helper_funcs import grid_coords

logger = logging.getLogger(__name__)


def _sign(a: int, b: int) -> int:
    """Sign of a + b*sqrt2, decided by comparing a**2 with 2*b**2."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0 or (a > 0) == (b > 0):
        return 1 if b > 0 else -1
    if a > 0:
        return 1 if a * a > 2 * b * b else -1
    return 1 if 2 * b * b > a * a else -1


def _floor(a: int, b: int, d: int) -> int:
    """floor((a + b*sqrt2) / d) for d > 0."""
    if b >= 0:
        root = isqrt(2 * b * b)
    else:
        root = -isqrt(2 * b * b) - 1
    return (a + root) // d


@total_ordering
class RootTwo:
    """
    An exact real number (a + b*sqrt2) / d.

    Compares with ints, Fractions and other RootTwo values without
    rounding.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: int, b: int = 0, d: int = 1):
        if d == 0:
            raise ZeroDivisionError("RootTwo denominator is zero")
        if d < 0:
            a, b, d = -a, -b, -d
        common = gcd(gcd(a, b), d)
        self.a = a // common
        self.b = b // common
        self.d = d // common

    @staticmethod
    def _coerce(other):
        if isinstance(other, RootTwo):
            return other
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return RootTwo(int(other))
        if isinstance(other, Fraction):
            return RootTwo(other.numerator, 0, other.denominator)
        return None

    def sign(self) -> int:
        return _sign(self.a, self.b)

    def floor(self) -> int:
        return _floor(self.a, self.b, self.d)

    def is_rational(self) -> bool:
        return self.b == 0

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RootTwo(
            self.a * other.d + other.a * self.d,
            self.b * other.d + other.b * self.d,
            self.d * other.d,
        )

    __radd__ = __add__

    def __neg__(self):
        return RootTwo(-self.a, -self.b, self.d)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self.a, self.b, self.d) == (other.a, other.b, other.d)

    def __lt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self - other).sign() < 0

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __float__(self):
        # reports only
        return (self.a + self.b * 2 ** 0.5) / self.d

    def describe(self) -> str:
        if self.b == 0:
            if self.d == 1:
                return str(self.a)
            return f"{self.a}/{self.d}"
        text = f"{self.a}{self.b:+d}*sqrt2"
        if self.d == 1:
            return text
        return f"({text})/{self.d}"

    def __repr__(self):
        return f"RootTwo({self.describe()})"


class CirclePoint:
    """
    A point of the circle R/Z with coordinate in Q(sqrt 2), kept in [0, 1).

    :param int a: Rational part numerator.
    :param int b: Coefficient of sqrt2 in the numerator.
    :param int d: Common denominator.
    """

    __slots__ = ("value",)

    def __init__(self, a: int, b: int = 0, d: int = 1):
        value = RootTwo(a, b, d)
        self.value = value - value.floor()
        """The representative in [0, 1) as a RootTwo."""

    @classmethod
    def from_fraction(cls, fraction) -> "CirclePoint":
        fraction = Fraction(fraction)
        return cls(fraction.numerator, 0, fraction.denominator)

    @classmethod
    def from_root_two(cls, value: RootTwo) -> "CirclePoint":
        return cls(value.a, value.b, value.d)

    def in_group(self) -> bool:
        """True iff the point is k*alpha mod 1 for some integer k."""
        return self.value.d == 1

    @property
    def exponent(self) -> Optional[int]:
        """The k with point = k*alpha mod 1, or None outside the group."""
        if not self.in_group():
            return None
        return self.value.b

    def __add__(self, other: "CirclePoint") -> "CirclePoint":
        if not isinstance(other, CirclePoint):
            return NotImplemented
        return CirclePoint.from_root_two(self.value + other.value)

    def __neg__(self) -> "CirclePoint":
        return CirclePoint.from_root_two(-self.value)

    def __sub__(self, other: "CirclePoint") -> "CirclePoint":
        if not isinstance(other, CirclePoint):
            return NotImplemented
        return CirclePoint.from_root_two(self.value - other.value)

    def distance(self, other: "CirclePoint") -> RootTwo:
        """Exact circle distance min(d, 1 - d) of the difference d."""
        gap = (self - other).value
        return min(gap, 1 - gap)

    def __eq__(self, other):
        if not isinstance(other, CirclePoint):
            return NotImplemented
        return self.value == other.value

    def __hash__(self):
        return hash(self.value)

    def __float__(self):
        return float(self.value)

    def describe(self) -> str:
        return self.value.describe()

    def __repr__(self):
        return f"CirclePoint({self.describe()})"


def circle_point(n: int) -> CirclePoint:
    """The exact point n * (sqrt2 - 1) mod 1."""
    return CirclePoint(-n, n)


ZERO = circle_point(0)

LimitPoint = namedtuple("LimitPoint", ["point", "note"])
"""
A limit outside G together with the reason it is outside.

:param CirclePoint point: The limit h.
:param str note: Human-readable certification that h is not in G.
"""


def certify_limit(h) -> LimitPoint:
    """
    Check h is not in G and record why.

    :param h: A CirclePoint, LimitPoint or Fraction.
    :returns: The certified limit.
    :rtype: LimitPoint
    :raises: RejectedInputError if h lies in G.
    """
    if isinstance(h, LimitPoint):
        h = h.point
    if not isinstance(h, CirclePoint):
        h = CirclePoint.from_fraction(h)
    if h.in_group():
        raise RejectedInputError(
            "limit lies in the group, no certification possible", h.describe()
        )
    value = h.value
    if value.is_rational():
        note = (
            f"{value.describe()} is rational and not an integer, while "
            "k*alpha mod 1 is irrational for every k != 0"
        )
    else:
        note = (
            f"{value.describe()} has reduced denominator {value.d} > 1, "
            "while every k*alpha mod 1 is k*sqrt2 - k - floor(k*sqrt2 - k)"
        )
    return LimitPoint(point=h, note=note)


SequenceSubspace = namedtuple(
    "SequenceSubspace", ["name", "exponents", "limit", "schedule", "note"]
)
"""
An injective sequence a_n = e_n * alpha mod 1 converging to a limit.

:param str name: Name used in documents.
:param tuple exponents: The exponents e_0, e_1, ..., pairwise distinct.
:param CirclePoint limit: The limit h, not in G.
:param tuple schedule: Fractions t_k with dist(a_k, h) < t_k.
:param str note: Certification that h is not in G.
"""


def _sequence_window(self, size: Optional[int] = None) -> Window:
    """Window of the first size points, labeled by their exponents."""
    if size is None:
        size = len(self.exponents)
    if size > len(self.exponents):
        raise RejectedInputError(
            f"sequence {self.name} has only {len(self.exponents)} points", size
        )
    return Window(size, labels=self.exponents[:size])


def _sequence_point(self, k: int) -> CirclePoint:
    return circle_point(self.exponents[k])


def _sequence_distance(self, k: int) -> RootTwo:
    return _sequence_point(self, k).distance(self.limit)


SequenceSubspace.window = _sequence_window
SequenceSubspace.point = _sequence_point
SequenceSubspace.distance = _sequence_distance


def halving_schedule(start=Fraction(1, 10), steps: int = 15) -> tuple:
    """t_k = start / 2**k for k < steps."""
    start = Fraction(start)
    return tuple(start / 2 ** k for k in range(steps))


def gentle_schedule(steps: int, scale: int = 100) -> tuple:
    """
    t_k = scale / (10 * scale + k); tends to 0 slowly enough for long
    ladder windows.
    """
    return tuple(Fraction(scale, 10 * scale + k) for k in range(steps))


def _check_schedule(schedule) -> tuple:
    schedule = tuple(Fraction(t) for t in schedule)
    if not schedule:
        raise RejectedInputError("schedule is empty")
    if schedule[0] <= 0:
        raise RejectedInputError("tolerances must be positive", schedule[0])
    for previous, current in zip(schedule, schedule[1:]):
        if not current < previous:
            raise RejectedInputError(
                "schedule must be strictly decreasing", current
            )
    return schedule


def _within(e: int, h: RootTwo, t: Fraction) -> bool:
    """dist(e*alpha mod 1, h) < t, with integers only."""
    d = h.d
    a = -e * d - h.a
    b = e * d - h.b
    base = _floor(a, b, d)
    tp, tq = t.numerator, t.denominator
    # fractional part below t
    if _sign((a - base * d) * tq - tp * d, b * tq) < 0:
        return True
    # fractional part above 1 - t
    return _sign((a - (base + 1) * d) * tq + tp * d, b * tq) > 0


def _closest(h: CirclePoint, first: int, stop: int):
    best, best_distance = None, None
    for e in range(first, stop):
        distance = circle_point(e).distance(h)
        if best_distance is None or distance < best_distance:
            best, best_distance = e, distance
    return best, best_distance


def _scan(h: CirclePoint, t: Fraction, start: int, budget: int, accept=None):
    e = start
    for e in range(start, start + budget):
        if _within(e, h.value, t) and (accept is None or accept(e)):
            return e
    best, best_distance = _closest(h, start, start + budget)
    raise ConvergenceSearchError(t, best, best_distance)


def find_convergent_sequence(
    h,
    schedule: Sequence,
    budget: int = DEFAULT_SEARCH_BUDGET,
    accept: Optional[Callable[[int], bool]] = None,
    name: str = "A",
) -> SequenceSubspace:
    """
    Pick, for each tolerance t_k, the least fresh exponent e >= 0 with
    dist(e*alpha mod 1, h) < t_k.

    The scan for t_k starts right after the exponent chosen for t_{k-1},
    so exponents strictly increase.

    :param h: The limit, outside G.
    :param schedule: Strictly decreasing positive tolerances.
    :param int budget: Exponents scanned per tolerance.
    :param accept: Optional extra filter on candidate exponents.
    :param str name: Name of the sequence.
    :returns: The sequence.
    :rtype: SequenceSubspace
    :raises: RejectedInputError if h is in G or the schedule is bad.
    :raises: ConvergenceSearchError if the budget runs out.
    """
    limit = certify_limit(h)
    schedule = _check_schedule(schedule)
    exponents = []
    start = 0
    for t in schedule:
        found = _scan(limit.point, t, start, budget, accept)
        exponents.append(found)
        start = found + 1
    logger.debug(
        "sequence %s towards %s: %d exponents, last %d",
        name,
        limit.point.describe(),
        len(exponents),
        exponents[-1],
    )
    return SequenceSubspace(
        name=name,
        exponents=tuple(exponents),
        limit=limit.point,
        schedule=schedule,
        note=limit.note,
    )


def _grid_sums(exponent_lists) -> list:
    sums = [0]
    for exponents in exponent_lists:
        sums = [s + e for s in sums for e in exponents]
    return sums


def find_independent_sequences(
    limits: Sequence,
    schedule: Sequence,
    budget: int = DEFAULT_SEARCH_BUDGET,
    names: Optional[Sequence[str]] = None,
) -> list:
    """
    Build m sequences towards the given limits whose exponent sums over
    every grid prefix stay pairwise distinct.

    Sequences grow in turn, one exponent per axis per tolerance; a
    candidate exponent is skipped if any new grid sum repeats an old one.

    :param limits: m limits outside G.
    :param schedule: Shared tolerance schedule.
    :returns: The m sequences.
    :rtype: list
    """
    certified = [certify_limit(h) for h in limits]
    schedule = _check_schedule(schedule)
    m = len(certified)
    if m < 1:
        raise RejectedInputError("need at least one limit")
    if names is None:
        names = [f"A{i + 1}" for i in range(m)]
    exponents = [[] for _ in range(m)]
    starts = [0] * m
    sums = set()

    for t in schedule:
        for axis in range(m):
            others = [exponents[j] for j in range(m) if j != axis]
            partial = _grid_sums(others)

            def fresh_sums(e, partial=partial):
                new = [e + s for s in partial]
                return len(set(new)) == len(new) and sums.isdisjoint(new)

            found = _scan(
                certified[axis].point, t, starts[axis], budget, fresh_sums
            )
            sums.update(found + s for s in partial)
            exponents[axis].append(found)
            starts[axis] = found + 1
    return [
        SequenceSubspace(
            name=names[i],
            exponents=tuple(exponents[i]),
            limit=certified[i].point,
            schedule=schedule,
            note=certified[i].note,
        )
        for i in range(m)
    ]


def _as_exponent(element) -> int:
    if isinstance(element, CirclePoint):
        if not element.in_group():
            raise RejectedInputError(
                "translate element is not in the group", element.describe()
            )
        return element.exponent
    return int(element)


class GroupTranslate:
    """
    The base entourage {(x, y) : x in A + y} u diagonal of a finite A.

    Elements are group elements in exponent form (integers), which also
    serves the integer model G = Z.  With reverse=True the relation is
    {(x, y) : y in A + x}, whose balls are the translates x + A.

    :param elements: Finite iterable of exponents or CirclePoints in G.
    :param bool reverse: Direction flag.
    """

    def __init__(self, elements: Iterable, reverse: bool = False):
        self.elements = frozenset(_as_exponent(e) for e in elements)
        """The finite set A as exponents."""
        self.reverse = reverse
        """False for {(x, y) : x in A + y}, True for the inverse."""

    def to_relation(self, window: Window) -> Relation:
        if not window.is_labeled():
            raise RejectedInputError(
                "translate entourages need a window labeled by group elements"
            )
        labels = np.asarray(
            [_as_exponent(label) for label in window.labels], dtype=np.int64
        )
        order = np.argsort(labels, kind="stable")
        ordered = labels[order]
        index = np.arange(window.size, dtype=np.int64)
        rows, cols = [index], [index]
        for element in sorted(self.elements):
            wanted = labels + element
            at = np.searchsorted(ordered, wanted)
            at_clipped = np.minimum(at, window.size - 1)
            hit = (at < window.size) & (ordered[at_clipped] == wanted)
            # label(partner) = label(y) + a
            partner = order[at_clipped[hit]]
            source = index[hit]
            if self.reverse:
                rows.append(source)
                cols.append(partner)
            else:
                rows.append(partner)
                cols.append(source)
        return Relation(window, (np.concatenate(rows), np.concatenate(cols)))

    def __eq__(self, other):
        if not isinstance(other, GroupTranslate):
            return NotImplemented
        return (self.elements, self.reverse) == (other.elements, other.reverse)

    def __hash__(self):
        return hash((self.elements, self.reverse))

    def __repr__(self):
        return (
            f"GroupTranslate({sorted(self.elements)}, reverse={self.reverse})"
        )


def translate_entourage(
    translate: GroupTranslate, window: Window, labels=None
) -> Relation:
    """
    Materialize a translate entourage, optionally relabeling the window.

    :raises: RejectedInputError if the window carries no labels.
    """
    if labels is not None:
        window = Window(window.size, labels=labels, shape=window.shape)
    return translate.to_relation(window)


FinitePart = namedtuple("FinitePart", ["elements"])
"""
An explicit finite set of group elements, as exponents.

:param frozenset elements: The exponents.
"""

TailPart = namedtuple("TailPart", ["phi", "sequence"])
"""
The set {a_m - a_n : m in phi(n)} over a named sequence.

:param PhiGenerator phi: The generator.
:param SequenceSubspace sequence: The sequence a_n.
"""


def _part_elements(part, limit=None) -> frozenset:
    if isinstance(part, FinitePart):
        return frozenset(int(e) for e in part.elements)
    exponents = part.sequence.exponents
    size = len(exponents) if limit is None else min(limit, len(exponents))
    found = set()
    for n in range(size):
        for m in part.phi(n):
            if m < len(exponents):
                found.add(exponents[m] - exponents[n])
    return frozenset(found)


class KRule:
    """
    A finitely described precompact set K: a union of finite parts and
    tail parts.

    :param parts: Iterable of FinitePart and TailPart values.
    """

    def __init__(self, parts: Iterable):
        self.parts = tuple(parts)
        """The primitives of the union."""
        for part in self.parts:
            if not isinstance(part, (FinitePart, TailPart)):
                raise RejectedInputError("unknown K rule primitive", part)
        self._elements = {}

    def elements(self, limit: Optional[int] = None) -> frozenset:
        """
        The exponents in K; tail parts run over n < limit (every known
        sequence point by default).
        """
        if limit not in self._elements:
            found = set()
            for part in self.parts:
                found |= _part_elements(part, limit)
            self._elements[limit] = frozenset(found)
        return self._elements[limit]

    def contains(self, element) -> bool:
        return _as_exponent(element) in self.elements()

    def contains_zero(self) -> bool:
        return 0 in self.elements()

    def symmetric_elements(self) -> frozenset:
        """K u -K."""
        elements = self.elements()
        return elements | frozenset(-e for e in elements)

    def translate(self, reverse: bool = False) -> GroupTranslate:
        return GroupTranslate(self.elements(), reverse=reverse)

    def to_relation(self, window: Window) -> Relation:
        return self.translate().to_relation(window)

    def __repr__(self):
        return f"KRule({len(self.parts)} parts)"


def compact_rule_from_phi(
    phi: PhiGenerator,
    sequence: SequenceSubspace,
    column_limit: Optional[int] = None,
) -> KRule:
    """
    The tail rule K = {a_m - a_n : m in phi(n)} of a valid phi.

    Two windowed checks stand in for "injective enumerations of K
    converge to 0":

    * phi passes validate_phi with a column limit, half the window by
      default; a column holding more rows than that is read as infinite.
    * every element a_m - a_n lies within t_n + t_m of 0, and for rows n
      in the upper half of the window within 2 * t_(n // 2), so the
      elements of late rows shrink with the schedule.

    :param PhiGenerator phi: The generator.
    :param SequenceSubspace sequence: The sequence a_n with its schedule.
    :param Optional[int] column_limit: Largest column allowed for table
        generators.
    :raises: RejectedInputError if phi fails validate_phi on the
        sequence's index window.
    :raises: ConvergenceCheckError naming the pairs (n, m) that fail.
    """
    size = len(sequence.exponents)
    if column_limit is None:
        column_limit = max(1, size // 2)
    report = validate_phi(phi, Window(size), column_limit=column_limit)
    if not report.is_valid():
        raise RejectedInputError("phi is not valid on the sequence", report)
    schedule = sequence.schedule
    exponents = sequence.exponents
    half = size // 2
    offending = []
    for n in range(size):
        for m in sorted(phi(n)):
            if m >= size or m == n:
                continue
            distance = circle_point(exponents[m] - exponents[n]).distance(ZERO)
            bound = schedule[n] + schedule[m]
            if n >= half:
                bound = min(bound, 2 * schedule[n // 2])
            if not distance < bound:
                offending.append((n, m))
    if offending:
        raise ConvergenceCheckError(offending)
    logger.debug("compact rule from phi on %d sequence points", size)
    return KRule([TailPart(phi=phi, sequence=sequence)])


def ball_holding_tail(
    rule: KRule, window: Window, start: Optional[int] = None
) -> Optional[int]:
    """
    Find a point x whose ball x + K holds every index from start on.

    For a precompact K and a sequence converging outside G no such point
    exists; on a window this is checked for the second half by default.

    :param KRule rule: The rule K.
    :param Window window: A window labeled by the sequence exponents.
    :param Optional[int] start: First index of the tail.
    :returns: The least such x, or None.
    :raises: RejectedInputError if the tail is empty.
    """
    if start is None:
        start = window.size // 2
    if not 0 <= start < window.size:
        raise RejectedInputError("tail is empty", start)
    rows, cols = rule.translate(reverse=True).to_relation(window).pair_arrays()
    hits = np.bincount(rows[cols >= start], minlength=window.size)
    holding = np.flatnonzero(hits == window.size - start)
    return int(holding[0]) if holding.size else None


SumInjectivity = namedtuple("SumInjectivity", ["passed", "collisions"])
"""
Result of sum_injectivity_check.

:param bool passed: True if all grid sums are distinct.
:param tuple collisions: Pairs of grid coordinates with equal sums.
"""


def _grid_shape(grid) -> tuple:
    if isinstance(grid, Window):
        if grid.shape is None:
            return (grid.size,)
        return grid.shape
    return tuple(int(side) for side in grid)


def _sum_array(sequences, shape) -> np.ndarray:
    if len(sequences) != len(shape):
        raise RejectedInputError(
            "need one sequence per grid axis", (len(sequences), len(shape))
        )
    sums = np.zeros(shape, dtype=np.int64)
    for axis, (sequence, side) in enumerate(zip(sequences, shape)):
        if len(sequence.exponents) < side:
            raise RejectedInputError(
                f"sequence {sequence.name} is shorter than the grid", side
            )
        view = [1] * len(shape)
        view[axis] = side
        sums = sums + np.asarray(
            sequence.exponents[:side], dtype=np.int64
        ).reshape(view)
    return sums.ravel()


def sum_injectivity_check(sequences: Sequence, grid) -> SumInjectivity:
    """
    Check (i_1, ..., i_m) -> a_{1 i_1} + ... + a_{m i_m} is injective on
    the grid, i.e. the exponent sums are pairwise distinct.

    :param sequences: m SequenceSubspaces.
    :param grid: Grid window or shape.
    :returns: The verdict with every collision paired with its first
        occurrence.
    :rtype: SumInjectivity
    """
    if not sequences:
        raise RejectedInputError("need at least one sequence")
    shape = _grid_shape(grid)
    sums = _sum_array(sequences, shape)
    order = np.argsort(sums, kind="stable")
    ordered = sums[order]
    collisions = []
    first = None
    for position in range(ordered.size):
        if position and ordered[position] == ordered[position - 1]:
            collisions.append(
                (
                    grid_coords(int(order[first]), shape),
                    grid_coords(int(order[position]), shape),
                )
            )
        else:
            first = position
    return SumInjectivity(passed=not collisions, collisions=tuple(collisions))


SumSpace = namedtuple("SumSpace", ["window", "grid", "sums"])
"""
The subspace A_1 + ... + A_m restricted to a grid.

Index i of window and of grid are the same point, so the bijection
f(a_{1 i_1} + ... + a_{m i_m}) = (i_1, ..., i_m) is the identity on indices.

:param Window window: Labeled by exponent sums, row-major.
:param Window grid: The grid window of index tuples.
:param tuple sums: The exponent sums.
"""


def _sum_space_to_grid(self, label: int) -> tuple:
    """f: a sum label to its grid coordinates."""
    index = self.window.index_of(label)
    if index is None:
        raise RejectedInputError("not a point of the sum space", label)
    return self.grid.label(index)


def _sum_space_from_grid(self, coords) -> int:
    """f^-1: grid coordinates to the sum label."""
    index = self.grid.index_of(tuple(coords))
    if index is None:
        raise RejectedInputError("not a grid point", coords)
    return self.sums[index]


SumSpace.to_grid = _sum_space_to_grid
SumSpace.from_grid = _sum_space_from_grid


def build_sum_space(sequences: Sequence, grid) -> SumSpace:
    """
    :raises: RejectedInputError if the sums collide on the grid.
    """
    verdict = sum_injectivity_check(sequences, grid)
    if not verdict.passed:
        raise RejectedInputError(
            "grid sums are not injective", verdict.collisions[0]
        )
    shape = _grid_shape(grid)
    sums = tuple(_sum_array(sequences, shape).tolist())
    grid_window = Window.grid(shape)
    return SumSpace(
        window=Window(len(sums), labels=sums),
        grid=grid_window,
        sums=sums,
    )


def _elements_of(K) -> frozenset:
    if isinstance(K, KRule):
        return K.elements()
    return frozenset(_as_exponent(e) for e in K)


def _other_differences(sequences, shape, axis) -> set:
    differences = {0}
    for other, (sequence, side) in enumerate(zip(sequences, shape)):
        if other == axis:
            continue
        exponents = sequence.exponents[:side]
        steps = {x - y for x in exponents for y in exponents}
        differences = {d + s for d in differences for s in steps}
    return differences


def build_phi_k(K, sequences: Sequence, k: int, grid) -> PhiGenerator:
    """
    phi_k(j) = the s with (... + a_{kj} + ...) meeting (K + ... + a_{ks} + ...)
    inside the grid, with K replaced by K u -K.

    On exponents: s is in phi_k(j) iff e_kj - e_ks lies in (K u -K) - D_k,
    D_k being all differences of sums over the other axes.

    :param K: A KRule or finite iterable of group elements; must contain 0.
    :param int k: The axis, 0-based.
    :raises: PreconditionError if 0 is not in K.
    """
    elements = _elements_of(K)
    if 0 not in elements:
        raise PreconditionError("K must contain 0")
    shape = _grid_shape(grid)
    if not 0 <= k < len(shape):
        raise RejectedInputError("axis outside the grid", k)
    symmetric = elements | frozenset(-e for e in elements)
    differences = _other_differences(sequences, shape, k)
    reach = {kappa - d for kappa in symmetric for d in differences}
    exponents = sequences[k].exponents[: shape[k]]
    table = {
        j: [s for s, e_s in enumerate(exponents) if e_j - e_s in reach]
        for j, e_j in enumerate(exponents)
    }
    return PhiGenerator(table=table)


ConditionReport = namedtuple("ConditionReport", ["passed", "violations"])
"""
Result of a containment scan.

:param bool passed: True if nothing was found.
:param tuple violations: The offending data.
"""


def check_condition_4(K, sequences: Sequence, phis: Sequence, grid) -> ConditionReport:
    """
    Check A n (K + a) is inside phi_1(a_1) + ... + phi_m(a_m) for every
    grid point a, with K replaced by K u -K.

    :returns: Report listing (a, b) grid coordinate pairs that escape.
    :rtype: ConditionReport
    """
    shape = _grid_shape(grid)
    sums = _sum_array(sequences, shape).tolist()
    position = {s: i for i, s in enumerate(sums)}
    elements = _elements_of(K)
    symmetric = sorted(elements | frozenset(-e for e in elements))
    violations = []
    for i, total in enumerate(sums):
        a = grid_coords(i, shape)
        rows = [phis[axis](a[axis]) for axis in range(len(shape))]
        for kappa in symmetric:
            j = position.get(total + kappa)
            if j is None:
                continue
            b = grid_coords(j, shape)
            if any(b[axis] not in rows[axis] for axis in range(len(shape))):
                violations.append((a, b))
    return ConditionReport(passed=not violations, violations=tuple(violations))


Condition1Report = namedtuple(
    "Condition1Report", ["passed", "in_group", "label_hits"]
)
"""
Result of check_condition_1.

:param bool passed: True if no combination lies in G.
:param tuple in_group: Coefficient vectors whose combination lies in G.
:param tuple label_hits: (coefficients, label) where the combination
    equals a window label exactly.
"""


def check_condition_1(limits: Sequence, labels: Iterable = ()) -> Condition1Report:
    """
    Check no nonzero {-1, 0, 1}-combination of the limits lies in G.

    The windowed consequence, that no combination equals a labeled group
    element, is checked as well.

    :param limits: CirclePoints, LimitPoints or Fractions.
    :param labels: Exponents of window points.
    """
    points = [certify_limit(h).point for h in limits]
    label_points = {circle_point(int(e)): int(e) for e in labels}
    in_group, hits = [], []
    for coefficients in cartesian_product((-1, 0, 1), repeat=len(points)):
        if not any(coefficients):
            continue
        total = ZERO
        for c, point in zip(coefficients, points):
            if c == 1:
                total = total + point
            elif c == -1:
                total = total - point
        if total.in_group():
            in_group.append(coefficients)
        if total in label_points:
            hits.append((coefficients, label_points[total]))
    return Condition1Report(
        passed=not (in_group or hits),
        in_group=tuple(in_group),
        label_hits=tuple(hits),
    )
