"""
Certificates of dimension at a pair of scales.

A certificate (E, H, M_0 ... M_n) says: the blocks of all families cover
the window, each family is E-disjoint and every block is H-bounded.
brute_min_families is an independent exhaustive oracle for tiny windows.
"""
import logging
from collections import namedtuple
from typing import Iterable, Optional

from .config import DEFAULT_BRUTE_FORCE_CAP
from .core import Relation, Window, materialize
from .exceptions import OracleCapError, RejectedInputError

logger = logging.getLogger(__name__)

BlockFamily = namedtuple("BlockFamily", ["window", "blocks", "index"])
"""
One colour class of a covering.

:param Window window: The window the blocks live in.
:param tuple blocks: Tuple of frozensets of indices.
:param int index: The family's colour.
"""

AsdimCertificate = namedtuple(
    "AsdimCertificate", ["window", "E", "H", "families", "verified"]
)
"""
Witness that dimension <= n at scale (E, H), n = len(families) - 1.

:param Window window: The window being covered.
:param Relation E: The disjointness scale.
:param H: The boundedness scale, a Relation or a PhiGenerator.
:param tuple families: n + 1 BlockFamily values.
:param bool verified: Set only by verify_certificate.
"""
AsdimCertificate.__new__.__defaults__ = (False,)
AsdimCertificate.n = property(lambda self: len(self.families) - 1)

CheckResult = namedtuple("CheckResult", ["passed", "witness"])
"""
Boolean verdict with its witness.

:param bool passed: The verdict.
:param witness: On failure the offending data; on success any data the
    check produces (for boundedness, the chosen centers).
"""

CertificateReport = namedtuple(
    "CertificateReport",
    [
        "passed",
        "uncovered",
        "malformed",
        "disjointness_failures",
        "unbounded_blocks",
        "centers",
        "certificate",
    ],
)
"""
Itemized result of verify_certificate.

:param bool passed: True if every clause holds.
:param tuple uncovered: Window points in no block.
:param tuple malformed: (family index, block) for empty or out-of-window
    blocks and families on another window.
:param tuple disjointness_failures: (family index, (A, B, point)).
:param tuple unbounded_blocks: Blocks with no center.
:param tuple centers: One center per well-formed block, in order.
:param AsdimCertificate certificate: The certificate, marked verified if
    it passed.
"""

OracleResult = namedtuple("OracleResult", ["n", "certificate"])
"""
Result of brute_min_families.

:param Optional[int] n: Least feasible n, or None if nothing covers.
:param Optional[AsdimCertificate] certificate: The first witness found.
"""


def make_family(window: Window, blocks: Iterable, index: int) -> BlockFamily:
    """Build a BlockFamily, normalizing blocks to frozensets."""
    return BlockFamily(
        window=window,
        blocks=tuple(frozenset(int(p) for p in block) for block in blocks),
        index=index,
    )


def _scale(scale, window: Window) -> Relation:
    if isinstance(scale, Relation) and scale.window == window:
        return scale
    return materialize(scale, window)


def _check_window(family: BlockFamily, relation: Relation):
    if family.window != relation.window:
        raise RejectedInputError(
            "family and relation live on different windows",
            (family.window, relation.window),
        )


def is_disjoint_family(family: BlockFamily, E: Relation) -> CheckResult:
    """
    Check that E[A] and B are disjoint for all distinct blocks A, B.

    :param BlockFamily family: The blocks.
    :param Relation E: The scale, on the family's window.
    :returns: CheckResult with witness (A, B, point) on failure.
    :rtype: CheckResult
    """
    _check_window(family, E)
    owners = {}
    for position, block in enumerate(family.blocks):
        for point in block:
            owners.setdefault(point, []).append(position)
    for position, block in enumerate(family.blocks):
        for point in E.ball_array(block).tolist():
            for other in owners.get(point, ()):
                if other != position:
                    return CheckResult(
                        False, (block, family.blocks[other], point)
                    )
    return CheckResult(True, None)


def _centers(block, H: Relation):
    candidates = None
    for point in sorted(block):
        column = set(H.predecessors(point).tolist())
        candidates = column if candidates is None else candidates & column
        if not candidates:
            return candidates
    return candidates


def _center(block, candidates) -> int:
    if len(block) == 1:
        (point,) = block
        if point in candidates:
            return point
    ordered = sorted(candidates)
    return ordered[(len(ordered) - 1) // 2]


def is_bounded_family(family: BlockFamily, H: Relation) -> CheckResult:
    """
    Check that every block A has a center x with A inside H[x].

    :param BlockFamily family: The blocks.
    :param Relation H: The scale, on the family's window.
    :returns: CheckResult with a center of each block, the lower median
        of its candidates (a singleton is its own center), or the first
        block without a center.
    :rtype: CheckResult
    """
    _check_window(family, H)
    centers = []
    for block in family.blocks:
        candidates = _centers(block, H)
        if not candidates:
            return CheckResult(False, block)
        centers.append(_center(block, candidates))
    return CheckResult(True, tuple(centers))


def verify_certificate(certificate: AsdimCertificate) -> CertificateReport:
    """
    Verify coverage, E-disjointness of each family and H-boundedness.

    Malformed input never raises; it is itemized in the report.

    :param AsdimCertificate certificate: The certificate to check.
    :returns: The itemized report.
    :rtype: CertificateReport
    """
    window = certificate.window
    E = _scale(certificate.E, window)
    H = _scale(certificate.H, window)

    malformed = []
    clean_families = []
    for family in certificate.families:
        if family.window != window:
            malformed.append((family.index, None))
            continue
        kept = []
        for block in family.blocks:
            if not block or any(not 0 <= p < window.size for p in block):
                malformed.append((family.index, block))
            else:
                kept.append(block)
        clean_families.append(family._replace(blocks=tuple(kept)))

    covered = set()
    for family in clean_families:
        for block in family.blocks:
            covered.update(block)
    uncovered = tuple(p for p in range(window.size) if p not in covered)

    disjointness_failures = []
    for family in clean_families:
        result = is_disjoint_family(family, E)
        if not result.passed:
            disjointness_failures.append((family.index, result.witness))

    unbounded, centers = [], []
    for family in clean_families:
        for block in family.blocks:
            candidates = _centers(block, H)
            if candidates:
                centers.append(_center(block, candidates))
            else:
                unbounded.append(block)

    passed = not (malformed or uncovered or disjointness_failures or unbounded)
    logger.debug(
        "certificate with %d families on %d points: %s",
        len(certificate.families),
        window.size,
        "pass" if passed else "fail",
    )
    return CertificateReport(
        passed=passed,
        uncovered=uncovered,
        malformed=tuple(malformed),
        disjointness_failures=tuple(disjointness_failures),
        unbounded_blocks=tuple(unbounded),
        centers=tuple(centers),
        certificate=certificate._replace(verified=passed),
    )


def _bitmasks(relation: Relation, columns: bool):
    masks = []
    for point in range(relation.window.size):
        members = (
            relation.predecessors(point) if columns
            else relation.successors(point)
        )
        mask = 0
        for member in members.tolist():
            mask |= 1 << member
        masks.append(mask)
    return masks


class _CoveringSearch:
    """
    Depth-first search over partitions of the window into H-bounded blocks
    coloured by family, with E-disjointness inside each family.

    Points are placed in increasing order; each point first tries existing
    blocks in creation order, then a new block whose colour is at most one
    more than the largest colour used so far.
    """

    def __init__(self, E: Relation, H: Relation, families: int):
        self.size = E.window.size
        self.families = families
        self.balls = _bitmasks(E, columns=False)
        self.center_masks = _bitmasks(H, columns=True)
        self.blocks = []

    def _compatible(self, point, colour, skip=None):
        bit = 1 << point
        ball = self.balls[point]
        for position, (other_colour, members, other_ball, _) in enumerate(
            self.blocks
        ):
            if position == skip or other_colour != colour:
                continue
            if ball & members or other_ball & bit:
                return False
        return True

    def run(self):
        if self._place(0, -1):
            return self.blocks
        return None

    def _place(self, point, top_colour):
        if point == self.size:
            return True
        bit = 1 << point
        column = self.center_masks[point]
        for position in range(len(self.blocks)):
            colour, members, ball, centers = self.blocks[position]
            if not centers & column:
                continue
            if not self._compatible(point, colour, skip=position):
                continue
            self.blocks[position] = (
                colour,
                members | bit,
                ball | self.balls[point],
                centers & column,
            )
            if self._place(point + 1, top_colour):
                return True
            self.blocks[position] = (colour, members, ball, centers)
        if column:
            for colour in range(min(top_colour + 2, self.families)):
                if not self._compatible(point, colour):
                    continue
                self.blocks.append((colour, bit, self.balls[point], column))
                if self._place(point + 1, max(top_colour, colour)):
                    return True
                self.blocks.pop()
        return False


def brute_min_families(
    E, H, window: Optional[Window] = None, cap: int = DEFAULT_BRUTE_FORCE_CAP
) -> OracleResult:
    """
    Exhaustively find the least n with an (n + 1)-family certificate.

    :param E: Disjointness scale (Relation or materializable expression).
    :param H: Boundedness scale (Relation or materializable expression).
    :param Optional[Window] window: The window; defaults to E's window.
    :param int cap: Largest window size searched.
    :returns: OracleResult(n, certificate), or OracleResult(None, None)
        when no covering by H-bounded blocks exists.
    :rtype: OracleResult
    :raises: OracleCapError if the window exceeds the cap.
    """
    if window is None:
        if not isinstance(E, Relation):
            raise RejectedInputError("a window is needed for expression scales")
        window = E.window
    if window.size > cap:
        raise OracleCapError(window.size, cap)
    E = _scale(E, window)
    H = _scale(H, window)
    if not all(_bitmasks(H, columns=True)):
        # some point lies in no H-ball
        return OracleResult(None, None)

    for n in range(window.size):
        blocks = _CoveringSearch(E, H, n + 1).run()
        logger.debug("oracle n=%d on %d points: %s", n, window.size,
                     "feasible" if blocks is not None else "infeasible")
        if blocks is None:
            continue
        grouped = [[] for _ in range(n + 1)]
        for colour, members, _, _ in blocks:
            grouped[colour].append(
                [p for p in range(window.size) if members >> p & 1]
            )
        certificate = AsdimCertificate(
            window=window,
            E=E,
            H=H,
            families=tuple(
                make_family(window, family, index)
                for index, family in enumerate(grouped)
            ),
        )
        return OracleResult(n, verify_certificate(certificate).certificate)
    return OracleResult(None, None)
