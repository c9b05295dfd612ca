"""
Macro-uniformity and asymorphism checks on ladders of windows.

A ladder check can refute macro-uniformity but never prove it, so a pass
is reported as "validated-on-ladder".
"""
import logging
from collections import namedtuple
from typing import Callable, Optional, Sequence

import numpy as np

from .core import PhiGenerator, Relation, Window, materialize, validate_phi
from .exceptions import RejectedInputError
from .helper_funcs import as_index_map
from .type_helpers import IndexMap, Ladder

logger = logging.getLogger(__name__)

VALIDATED = "validated-on-ladder"
REFUTED = "refuted"
BOUNDEDNESS_FAILED = "boundedness-evidence-failed"

WindowVerdict = namedtuple(
    "WindowVerdict", ["size", "scale", "passed", "counterexample"]
)
"""
Verdict of one scale pair on one ladder window.

:param int size: The ladder entry.
:param int scale: Position of the (E, witness) pair in the scale list.
:param bool passed: True if f(E[x]) lies in W[f(x)] for every x.
:param counterexample: ((x, y), (f(x), f(y))) with (x, y) in E and the
    image pair outside the witness, or None.
"""

MacroUniformReport = namedtuple("MacroUniformReport", ["status", "verdicts"])
"""
Result of check_macro_uniform.

:param str status: "validated-on-ladder" or "refuted".
:param tuple verdicts: WindowVerdict values in ladder order.
"""


def _first_counterexample(report: MacroUniformReport):
    for verdict in report.verdicts:
        if not verdict.passed:
            return verdict.counterexample
    return None


MacroUniformReport.counterexample = property(_first_counterexample)

AsymorphismReport = namedtuple(
    "AsymorphismReport", ["status", "forward", "backward"]
)
"""
Result of check_asymorphism.

:param str status: "validated-on-ladder" if both directions pass.
:param MacroUniformReport forward: The check of f.
:param MacroUniformReport backward: The check of f^-1.
"""

ProbeRung = namedtuple(
    "ProbeRung", ["size", "scale", "max_column", "probe_columns", "passed"]
)
"""
Canonical witness data for one entourage on one ladder window.

:param int size: The ladder entry.
:param int scale: Position of the entourage in the probe set.
:param int max_column: Largest column of the witness on this window.
:param tuple probe_columns: Column sizes at the probe points.
:param bool passed: True if the witness validated on this window.
"""

ProbeReport = namedtuple(
    "ProbeReport", ["status", "rungs", "stabilized", "probe_points"]
)
"""
Result of universal_property_probe.

:param str status: "validated-on-ladder", "refuted" or
    "boundedness-evidence-failed".
:param tuple rungs: ProbeRung values, by entourage then ladder order.
:param tuple stabilized: One flag per entourage; True if the probe
    columns agree on the last two ladder windows.
:param tuple probe_points: Per entourage, the probed target points.
"""


def _image_array(f, size: int) -> np.ndarray:
    if isinstance(f, np.ndarray):
        if f.size < size:
            raise RejectedInputError(
                f"index map covers {f.size} of {size} indices"
            )
        return f[:size].astype(np.int64)
    try:
        return np.asarray(as_index_map(f, size), dtype=np.int64)
    except IndexError as err:
        raise RejectedInputError(str(err))


def induced_relation(f: IndexMap, E: Relation, target: Window) -> Relation:
    """
    Push E forward: {(f(x), f(y)) : (x, y) in E}.

    :param f: Callable or sequence, total on E's window.
    :param Relation E: The relation to push.
    :param Window target: Window that must contain the image.
    :raises: RejectedInputError naming (x, f(x)) if the image escapes.
    """
    image = _image_array(f, E.window.size)
    escaping = np.flatnonzero((image < 0) | (image >= target.size))
    if escaping.size:
        x = int(escaping[0])
        raise RejectedInputError(
            "image escapes the target window", (x, int(image[x]))
        )
    rows, cols = E.pair_arrays()
    return Relation(target, (image[rows], image[cols]))


def _source_relation(rule, window: Window) -> Relation:
    if isinstance(rule, Relation) and rule.window == window:
        return rule
    if hasattr(rule, "to_relation"):
        return materialize(rule, window)
    if callable(rule):
        return rule(window)
    raise RejectedInputError("entourage rule cannot be materialized", rule)


def _witness_relation(witness, E: Relation, image, target: Window) -> Relation:
    if isinstance(witness, Relation) and witness.window == target:
        return witness
    if hasattr(witness, "to_relation"):
        return materialize(witness, target)
    if callable(witness):
        return _witness_relation(witness(E, image, target), E, image, target)
    raise RejectedInputError("witness rule cannot be materialized", witness)


def _membership(relation: Relation, rows, cols) -> np.ndarray:
    if relation.is_dense:
        return relation.matrix()[rows, cols]
    return np.asarray(relation.matrix()[rows, cols]).ravel().astype(bool)


def _check_scale(image, E: Relation, W: Relation):
    rows, cols = E.pair_arrays()
    inside = _membership(W, image[rows], image[cols])
    missing = np.flatnonzero(~inside)
    if not missing.size:
        return True, None
    at = int(missing[0])
    x, y = int(rows[at]), int(cols[at])
    return False, ((x, y), (int(image[x]), int(image[y])))


def _default_target(image) -> Window:
    return Window(int(image.max()) + 1 if image.size else 1)


def _run_ladder(f, scales, ladder, source, target) -> MacroUniformReport:
    verdicts = []
    for size in ladder:
        source_window = source(size)
        image = _image_array(f, source_window.size)
        target_window = target(size) if target else _default_target(image)
        for position, (rule, witness) in enumerate(scales):
            E = _source_relation(rule, source_window)
            pushed = induced_relation(image, E, target_window)
            W = _witness_relation(witness, E, image, target_window)
            passed, counterexample = _check_scale(image, E, W)
            logger.debug(
                "macro-uniform window %s scale %d: %d pushed pairs, %s",
                size,
                position,
                len(pushed),
                "pass" if passed else "fail",
            )
            verdicts.append(
                WindowVerdict(
                    size=size,
                    scale=position,
                    passed=passed,
                    counterexample=counterexample,
                )
            )
    status = VALIDATED if all(v.passed for v in verdicts) else REFUTED
    return MacroUniformReport(status=status, verdicts=tuple(verdicts))


def check_macro_uniform(
    f: IndexMap,
    scales: Sequence,
    ladder: Ladder,
    source: Optional[Callable[[int], Window]] = None,
    target: Optional[Callable[[int], Window]] = None,
) -> MacroUniformReport:
    """
    Check f(E[x]) lies in W[f(x)] for every scale pair (E, W) on every
    window of the ladder.

    :param f: Callable or sequence giving the image of each index.
    :param scales: Pairs (E, W).  E is materializable or a callable
        window -> Relation; W is materializable or a callable
        (E, image, target_window) returning either.
    :param ladder: Window sizes.
    :param source: size -> source window; plain windows by default.
    :param target: size -> target window; by default the plain window
        just containing the image.
    :returns: The report; a fail always carries a counterexample.
    :rtype: MacroUniformReport
    """
    if source is None:
        source = Window
    return _run_ladder(f, scales, ladder, source, target)


def _bijection(f, source_window: Window, target_window: Window) -> np.ndarray:
    image = _image_array(f, source_window.size)
    if source_window.size != target_window.size:
        raise RejectedInputError(
            "windows differ in size, f cannot be a bijection",
            (source_window.size, target_window.size),
        )
    seen = np.full(target_window.size, -1, dtype=np.int64)
    for x, fx in enumerate(image.tolist()):
        if not 0 <= fx < target_window.size:
            raise RejectedInputError("image escapes the target window", x)
        if seen[fx] >= 0:
            raise RejectedInputError("f is not injective", x)
        seen[fx] = x
    return seen


def check_asymorphism(
    f: IndexMap,
    forward_scales: Sequence,
    backward_scales: Sequence,
    ladder: Ladder,
    source: Optional[Callable[[int], Window]] = None,
    target: Optional[Callable[[int], Window]] = None,
) -> AsymorphismReport:
    """
    Check f and f^-1 are macro-uniform on every ladder window.

    :param f: Index map, bijective between matching ladder windows.
    :param forward_scales: (E, W) pairs for f.
    :param backward_scales: (E, W) pairs for f^-1, E on the target side.
    :param ladder: Window sizes.
    :param source: size -> source window; plain windows by default.
    :param target: size -> target window; same as source by default.
    :raises: RejectedInputError naming a point where f is not bijective.
    """
    if source is None:
        source = Window
    if target is None:
        target = source
    inverses = {}
    for size in ladder:
        inverses[size] = _bijection(f, source(size), target(size))

    forward = _run_ladder(f, forward_scales, ladder, source, target)
    backward_verdicts = []
    for size in ladder:
        report = _run_ladder(
            inverses[size], backward_scales, [size], target, source
        )
        backward_verdicts.extend(report.verdicts)
    backward = MacroUniformReport(
        status=(
            VALIDATED if all(v.passed for v in backward_verdicts) else REFUTED
        ),
        verdicts=tuple(backward_verdicts),
    )
    status = (
        VALIDATED
        if forward.status == VALIDATED and backward.status == VALIDATED
        else REFUTED
    )
    return AsymorphismReport(status=status, forward=forward, backward=backward)


def _canonical_relation(E: Relation, image, target: Window) -> Relation:
    rows, cols = E.pair_arrays()
    index = np.arange(target.size, dtype=np.int64)
    return Relation(
        target,
        (
            np.concatenate([image[rows], index]),
            np.concatenate([image[cols], index]),
        ),
    )


def canonical_witness(E: Relation, g, target: Window) -> PhiGenerator:
    """
    psi(k) = {g(y) : y in E[g^-1(k)]} u {k}; psi(k) = {k} off the image.

    :param Relation E: Source entourage.
    :param g: Injective index map on E's window.
    :param Window target: Window containing the image of g.
    :rtype: PhiGenerator
    """
    image = _image_array(g, E.window.size)
    relation = _canonical_relation(E, image, target)
    rows, cols = relation.pair_arrays()
    table = {n: [] for n in range(target.size)}
    for n, k in zip(rows.tolist(), cols.tolist()):
        table[n].append(k)
    return PhiGenerator(table=table)


def _column_sizes(relation: Relation) -> np.ndarray:
    cols = relation.pair_arrays()[1]
    return np.bincount(cols, minlength=relation.window.size)


def _reach(relation: Relation) -> int:
    rows, cols = relation.pair_arrays()
    return int(np.abs(rows - cols).max()) if rows.size else 0


def universal_property_probe(
    space: Callable[[int], Window],
    g,
    ladder: Ladder,
    entourages: Sequence,
) -> ProbeReport:
    """
    Build the canonical witness of an injection g for each source
    entourage and record how its columns behave along the ladder.

    If bounded sets of the source are finite, the columns at a fixed
    point stop growing once the window is large enough.  The probe points
    are the points of the smallest target window that lie further than
    the reach of the witness (its largest |n - k|) from the last index
    of the second largest window.

    :param space: size -> source window.
    :param g: Injective index map; None for the identity.
    :param ladder: At least two window sizes, increasing.
    :param entourages: Materializable rules or callables window -> Relation.
    :returns: The report; status "boundedness-evidence-failed" if no
        point can be probed or some probe column is still changing
        between the last two windows.
    :rtype: ProbeReport
    """
    if len(ladder) < 2:
        raise RejectedInputError("the probe needs at least two ladder sizes")
    if any(a >= b for a, b in zip(ladder, ladder[1:])):
        raise RejectedInputError("ladder sizes must increase", tuple(ladder))
    rungs = []
    stabilized = []
    probe_points = []
    for position, rule in enumerate(entourages):
        computed = []
        for size in ladder:
            window = space(size)
            image = (
                np.arange(window.size, dtype=np.int64)
                if g is None
                else _image_array(g, window.size)
            )
            if np.unique(image).size != image.size:
                raise RejectedInputError("g is not injective", size)
            target = _default_target(image)
            E = _source_relation(rule, window)
            witness = canonical_witness(E, image, target)
            relation = _canonical_relation(E, image, target)
            computed.append(
                (
                    size,
                    target,
                    _column_sizes(relation),
                    _reach(relation),
                    validate_phi(witness, target).is_valid(),
                )
            )
        # a column within reach of the edge may still grow
        last = computed[-2][1].size - 1
        points = tuple(
            k for k in range(computed[0][1].size) if k + computed[-2][3] < last
        )
        profiles = []
        for size, target, columns, _, valid in computed:
            profile = tuple(columns[list(points)].tolist())
            profiles.append(profile)
            rungs.append(
                ProbeRung(
                    size=size,
                    scale=position,
                    max_column=int(columns.max()),
                    probe_columns=profile,
                    passed=valid,
                )
            )
        probe_points.append(points)
        stabilized.append(bool(points) and profiles[-1] == profiles[-2])
    if not all(rung.passed for rung in rungs):
        status = REFUTED
    elif not all(stabilized):
        status = BOUNDEDNESS_FAILED
    else:
        status = VALIDATED
    logger.debug("universal property probe: %s", status)
    return ProbeReport(
        status=status,
        rungs=tuple(rungs),
        stabilized=tuple(stabilized),
        probe_points=tuple(probe_points),
    )
