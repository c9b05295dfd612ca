"""
Shell decompositions of omega and the certificates built from them.

For a symmetric reflexive F containing every (i, i + 1) the shells
P_0 = F[base], P_{n+1} = F[P_n] minus the earlier shells exhaust the
window, and F[P_n] only meets P_{n-1}, P_n and P_{n+1}.  Grouping shells
by parity gives a two-family certificate.
"""
import logging
from collections import namedtuple
from typing import Optional, Union

import numpy as np

from .certify import AsdimCertificate, make_family
from .core import (
    PhiGenerator,
    Relation,
    Window,
    chain_relation,
    inverse,
    materialize,
    tensor_product,
    union,
)
from .exceptions import PreconditionError, RejectedInputError

logger = logging.getLogger(__name__)

ShellDecomposition = namedtuple(
    "ShellDecomposition", ["window", "F", "shells", "base"]
)
"""
Layers of a window around a base point.

:param Window window: The decomposed window.
:param Relation F: The admissible relation the shells were grown with.
:param tuple shells: Tuple of frozensets P_0, P_1, ...
:param int base: The base point of P_0.
"""


def _successor_pairs(window: Window) -> Relation:
    index = np.arange(window.size, dtype=np.int64)
    step = index[:-1]
    rows = np.concatenate([index, step, step + 1])
    cols = np.concatenate([index, step + 1, step])
    return Relation(window, (rows, cols))


def augment(relation: Relation) -> Relation:
    """
    Enlarge E to E u E^-1 u chain u diagonal, which is admissible.

    A certificate at the larger scale is a certificate at every smaller
    one, so callers grow their relation with this before shell_partition.
    """
    both = union(relation, inverse(relation))
    return union(both, _successor_pairs(relation.window))


def check_admissible(F: Relation):
    """
    Raise PreconditionError naming the first pair that breaks admissibility.
    """
    matrix = F.matrix(dense=False).astype(np.int8)
    missing_diagonal = np.flatnonzero(matrix.diagonal() == 0)
    if missing_diagonal.size:
        i = int(missing_diagonal[0])
        raise PreconditionError("F is not reflexive", (i, i))
    asymmetric = (matrix - matrix.T).tocoo()
    lonely = asymmetric.data > 0
    if lonely.any():
        order = np.lexsort((asymmetric.col[lonely], asymmetric.row[lonely]))
        i = int(asymmetric.row[lonely][order[0]])
        j = int(asymmetric.col[lonely][order[0]])
        raise PreconditionError("F is not symmetric, missing inverse of", (i, j))
    size = F.window.size
    if size > 1:
        index = np.arange(size - 1)
        present = np.asarray(matrix[index, index + 1]).ravel()
        gaps = np.flatnonzero(present == 0)
        if gaps.size:
            i = int(gaps[0])
            raise PreconditionError("F is missing a chain pair", (i, i + 1))


def shell_partition(
    F: Relation, base: int = 0, window: Optional[Window] = None
) -> ShellDecomposition:
    """
    Compute the shells P_0 = F[base], P_{n+1} = F[P_n] minus P_0..P_n.

    :param Relation F: Symmetric, reflexive and containing every
        (i, i + 1); use augment() first if unsure.
    :param int base: Base point, the window minimum by default.
    :param Optional[Window] window: Defaults to F's window.
    :returns: The decomposition; its shells cover the window.
    :rtype: ShellDecomposition
    :raises: PreconditionError naming the offending pair.
    """
    if window is None:
        window = F.window
    F = materialize(F, window)
    check_admissible(F)
    if not 0 <= base < window.size:
        raise RejectedInputError("base point outside window", base)

    seen = np.zeros(window.size, dtype=bool)
    shells = []
    current = F.ball_array([base])
    while current.size:
        seen[current] = True
        shells.append(frozenset(current.tolist()))
        following = F.ball_array(current)
        current = following[~seen[following]]
    if not seen.all():
        raise PreconditionError(
            "shell recurrence stalled before", int(np.flatnonzero(~seen)[0])
        )
    logger.debug("%d shells on %d points", len(shells), window.size)
    return ShellDecomposition(
        window=window, F=F, shells=tuple(shells), base=base
    )


def check_shell_recurrence(decomposition: ShellDecomposition) -> bool:
    """Recompute every shell from its predecessor and compare."""
    F = decomposition.F
    shells = decomposition.shells
    if not shells or shells[0] != frozenset(
        F.ball_array([decomposition.base]).tolist()
    ):
        return False
    earlier = set(shells[0])
    for previous, current in zip(shells, shells[1:]):
        grown = set(F.ball_array(previous).tolist()) - earlier
        if grown != current:
            return False
        earlier |= current
    return len(earlier) == decomposition.window.size


def neighbouring_shells(decomposition: ShellDecomposition) -> list:
    """
    Return the shells n with F[P_n] outside P_{n-1} u P_n u P_{n+1}.

    An empty list means the parity families are F-disjoint.
    """
    shells = decomposition.shells
    offenders = []
    for n, shell in enumerate(shells):
        allowed = set(shell)
        if n > 0:
            allowed |= shells[n - 1]
        if n + 1 < len(shells):
            allowed |= shells[n + 1]
        if not set(decomposition.F.ball_array(shell).tolist()) <= allowed:
            offenders.append(n)
    return offenders


def shells_to_phi(decomposition: ShellDecomposition) -> PhiGenerator:
    """
    The generator phi(n) = P_n u {n}; every shell P_n lies in H[n].

    Each point sits in exactly one shell, so every column has at most two
    rows.
    """
    return PhiGenerator(
        table={
            n: shell | {n} for n, shell in enumerate(decomposition.shells)
        }
    )


def parity_certificate(decomposition: ShellDecomposition) -> AsdimCertificate:
    """
    Two families: even shells and odd shells, at scales (F, shells_to_phi).

    A single-shell decomposition gives a one-family certificate.
    """
    window = decomposition.window
    shells = decomposition.shells
    families = [make_family(window, shells[0::2], 0)]
    if len(shells) > 1:
        families.append(make_family(window, shells[1::2], 1))
    return AsdimCertificate(
        window=window,
        E=decomposition.F,
        H=shells_to_phi(decomposition),
        families=tuple(families),
    )


def _as_relation(scale, window):
    if isinstance(scale, Relation) and scale.window == window:
        return scale
    return materialize(scale, window)


def product_certificate(
    first: AsdimCertificate, second: AsdimCertificate
) -> AsdimCertificate:
    """
    Combine two verified certificates on the product window.

    Family (i, j) gets index i * len(second.families) + j and holds the
    blocks A x B for A in family i of first and B in family j of second.
    The scales are the componentwise products E_x (x) E_y, H_x (x) H_y.

    :raises: RejectedInputError if either certificate is unverified.
    """
    for certificate in (first, second):
        if not certificate.verified:
            raise RejectedInputError("certificate has not been verified")
    window = Window.product(first.window, second.window)
    E = tensor_product(
        _as_relation(first.E, first.window),
        _as_relation(second.E, second.window),
    )
    H = tensor_product(
        _as_relation(first.H, first.window),
        _as_relation(second.H, second.window),
    )
    width = second.window.size
    families = []
    for i, left in enumerate(first.families):
        for j, right in enumerate(second.families):
            blocks = [
                [a * width + b for a in sorted(A) for b in sorted(B)]
                for A in left.blocks
                for B in right.blocks
            ]
            families.append(
                make_family(window, blocks, i * len(second.families) + j)
            )
    return AsdimCertificate(window=window, E=E, H=H, families=tuple(families))


def brick_certificate(
    m: int, r: int, L: int, window: Union[Window, int]
) -> AsdimCertificate:
    """
    Shifted-brick covering of an m-dimensional grid window.

    Colour c uses the L-grid shifted by floor(c * L / (m + 1)) along the
    diagonal; each brick keeps the points whose offset inside the cell is
    at least r, so same-colour bricks are more than r apart in l-infinity.
    Every coordinate is near a cell wall for at most one colour, so the
    m + 1 colours cover the window.  With r = 0 one colour suffices.

    :param int m: Dimension, at least 1.
    :param int r: Disjointness radius.
    :param int L: Brick side; needs L >= 2(m + 1)r + 1 (L >= 1 for r = 0).
    :param window: A grid window of dimension m, or a side length.
    :returns: Certificate at scales (l-inf radius r, l-inf radius L).
    :rtype: AsdimCertificate
    :raises: PreconditionError if m or L is too small.
    """
    if m < 1:
        raise PreconditionError("dimension must be at least 1", m)
    if r < 0:
        raise PreconditionError("radius must be non-negative", r)
    needed = 1 if r == 0 else 2 * (m + 1) * r + 1
    if L < needed:
        raise PreconditionError(f"brick side must be at least {needed}", L)
    if not isinstance(window, Window):
        window = Window.grid((int(window),) * m)
    if window.shape is None or len(window.shape) != m:
        raise RejectedInputError("brick window must be an m-dimensional grid")

    coords = window.coordinates()
    colours = 1 if r == 0 else m + 1
    families = []
    for colour in range(colours):
        shift = (colour * L) // (m + 1)
        relative = coords - shift
        cells = relative // L
        good = np.all(relative % L >= r, axis=1)
        bricks = {}
        for point in np.flatnonzero(good).tolist():
            bricks.setdefault(tuple(cells[point].tolist()), []).append(point)
        families.append(
            make_family(window, [bricks[key] for key in sorted(bricks)], colour)
        )
    return AsdimCertificate(
        window=window,
        E=chain_relation(window, r),
        H=chain_relation(window, L),
        families=tuple(families),
    )
