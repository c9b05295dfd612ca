"""
The rule mini-language used on the command line and inside documents:
chain:r, interval:r, random:w, phi:<file>, krule:<file>, diagonal, full.
"""
import os
from collections import namedtuple
from typing import Optional

import numpy as np

from .core import (
    Chain,
    Diagonal,
    Full,
    PhiGenerator,
    interval_rule,
    random_phi_table,
)
from .exceptions import RejectedInputError

RuleKind = namedtuple("RuleKind", ["prefix", "argument", "builder"])
"""
One kind of rule.

:param str prefix: Text before the colon.
:param Optional[str] argument: What follows the colon, None for bare
    rules.
:param builder: Function (argument, RuleContext) -> materializable rule.
"""

RuleContext = namedtuple("RuleContext", ["base_dir", "seed", "size"])
"""
What a builder may need besides its argument.

:param str base_dir: Directory that file arguments are relative to.
:param int seed: Seed for random rules.
:param Optional[int] size: Window size for random tables.
"""


def _radius(argument: str) -> int:
    try:
        radius = int(argument)
    except ValueError:
        raise RejectedInputError("rule radius must be an integer", argument)
    if radius < 0:
        raise RejectedInputError("rule radius must be non-negative", radius)
    return radius


def _path(argument: str, context: RuleContext) -> str:
    if os.path.isabs(argument) or not context.base_dir:
        return argument
    return os.path.join(context.base_dir, argument)


def _random_table(argument: str, context: RuleContext) -> PhiGenerator:
    if context.size is None:
        raise RejectedInputError("random rules need a window size")
    rng = np.random.default_rng(context.seed)
    return random_phi_table(context.size, _radius(argument), rng)


def _phi_file(argument: str, context: RuleContext) -> PhiGenerator:
    from .documents import parse_phi, read_text

    return parse_phi(read_text(_path(argument, context)))


def _krule_file(argument: str, context: RuleContext):
    from .documents import read_krule

    return read_krule(_path(argument, context))


CHAIN = RuleKind("chain", "radius", lambda arg, context: Chain(_radius(arg)))
INTERVAL = RuleKind(
    "interval", "radius", lambda arg, context: interval_rule(_radius(arg))
)
RANDOM = RuleKind("random", "width", _random_table)
PHI = RuleKind("phi", "file", _phi_file)
KRULE = RuleKind("krule", "file", _krule_file)
DIAGONAL = RuleKind("diagonal", None, lambda arg, context: Diagonal())
FULL = RuleKind("full", None, lambda arg, context: Full())

RULE_KINDS = {
    kind.prefix: kind
    for kind in (CHAIN, INTERVAL, RANDOM, PHI, KRULE, DIAGONAL, FULL)
}


def parse_rule(
    text: str,
    base_dir: str = "",
    seed: int = 0,
    size: Optional[int] = None,
):
    """
    Turn a rule spec into a materializable rule.

    :param str text: For example "interval:3" or "phi:table.txt".
    :param str base_dir: Directory for relative file arguments.
    :param int seed: Seed for random rules.
    :param Optional[int] size: Window size for random rules.
    :raises: RejectedInputError for unknown or malformed specs.
    """
    prefix, _, argument = text.strip().partition(":")
    kind = RULE_KINDS.get(prefix)
    if kind is None:
        raise RejectedInputError("unknown rule", text)
    if (kind.argument is None) != (argument == ""):
        raise RejectedInputError(
            f"rule {prefix} takes "
            + (f"a {kind.argument}" if kind.argument else "no argument"),
            text,
        )
    return kind.builder(argument, RuleContext(base_dir, seed, size))


def describe_rule(rule) -> Optional[str]:
    """The spec of a rule, or None if it has no spec form."""
    if isinstance(rule, Chain):
        return f"chain:{rule.radius}"
    if isinstance(rule, Diagonal):
        return "diagonal"
    if isinstance(rule, Full):
        return "full"
    if isinstance(rule, PhiGenerator) and not rule.is_table:
        return rule.spec
    return None
