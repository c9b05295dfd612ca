"""
Plain-text documents for relations, phi tables, certificates, sequences,
K rules and reports.

Every document starts with a "# pycoarse format <version>" line.  Lines
starting with "#" and blank lines are skipped when parsing.
"""
import logging
import os
import re
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .certify import AsdimCertificate, make_family
from .config import FORMAT_VERSION
from .core import PhiGenerator, Relation, Window, materialize
from .exceptions import CoarseError, DocumentFormatError
from .groups import (
    CirclePoint,
    FinitePart,
    KRule,
    SequenceSubspace,
    TailPart,
    certify_limit,
)
from .helper_funcs import parse_fraction, value_to_str

logger = logging.getLogger(__name__)

HEADER_PREFIX = "# pycoarse format"

_ROOT_TWO = re.compile(r"^\(?(-?\d+)([+-]\d+)\*sqrt2\)?(?:/(\d+))?$")


def header(version: str = FORMAT_VERSION) -> str:
    return f"{HEADER_PREFIX} {version}"


class _Cursor:
    """Walks the meaningful lines of a document."""

    def __init__(self, text: str):
        self.lines = [
            (number, line.strip())
            for number, line in enumerate(text.splitlines(), start=1)
            if line.strip() and not line.strip().startswith("#")
        ]
        self.position = 0

    def done(self) -> bool:
        return self.position >= len(self.lines)

    def peek(self):
        if self.done():
            return None
        return self.lines[self.position][1]

    def next(self, what: str):
        if self.done():
            last = self.lines[-1][0] if self.lines else 0
            raise DocumentFormatError(last, f"expected {what}, got end of file")
        number, line = self.lines[self.position]
        self.position += 1
        return number, line

    def keyword(self, keyword: str):
        number, line = self.next(keyword)
        tokens = line.split()
        if tokens[0] != keyword:
            raise DocumentFormatError(number, f"expected {keyword!r}")
        return number, tokens[1:]


def _ints(number: int, tokens) -> list:
    try:
        return [int(token) for token in tokens]
    except ValueError:
        raise DocumentFormatError(number, "expected integers")


def parse_circle_point(text: str) -> CirclePoint:
    """Parse "p/q", "p", "a+b*sqrt2" or "(a+b*sqrt2)/d"."""
    match = _ROOT_TWO.match(text.strip())
    if match:
        a, b, d = match.group(1), match.group(2), match.group(3) or "1"
        return CirclePoint(int(a), int(b), int(d))
    return CirclePoint.from_fraction(parse_fraction(text))


# windows


def _window_fields(window: Window) -> str:
    fields = str(window.size)
    if window.shape is not None:
        fields += " shape " + value_to_str(list(window.shape))
    return fields


def _window_lines(window: Window) -> list:
    if (
        window.shape is None
        and window.labels is not None
        and all(isinstance(label, int) for label in window.labels)
    ):
        return ["labels " + value_to_str(list(window.labels))]
    return []


def _parse_window(number: int, fields, cursor: _Cursor) -> Window:
    if not fields:
        raise DocumentFormatError(number, "expected a window size")
    size = _ints(number, fields[:1])[0]
    shape = None
    if len(fields) > 1:
        if fields[1] != "shape":
            raise DocumentFormatError(number, "expected 'shape'")
        shape = _ints(number, fields[2:])
    try:
        if shape is not None:
            window = Window.grid(shape)
            if window.size != size:
                raise DocumentFormatError(number, "shape does not match size")
            return window
        line = cursor.peek()
        if line is not None and line.split()[0] == "labels":
            label_number, labels = cursor.keyword("labels")
            return Window(size, labels=_ints(label_number, labels))
        return Window(size)
    except DocumentFormatError:
        raise
    except CoarseError as err:
        raise DocumentFormatError(number, str(err))


# relations


def _pair_lines(relation: Relation) -> list:
    return [f"{i} {j}" for i, j in relation]


def _parse_pairs(cursor: _Cursor, count: int, window: Window) -> Relation:
    rows, cols = [], []
    for _ in range(count):
        number, line = cursor.next("a pair line")
        pair = _ints(number, line.split())
        if len(pair) != 2:
            raise DocumentFormatError(number, "expected 'i j'")
        if not all(0 <= p < window.size for p in pair):
            raise DocumentFormatError(number, "pair outside window")
        rows.append(pair[0])
        cols.append(pair[1])
    return Relation(
        window,
        (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)),
    )


def format_relation(relation: Relation, version: str = FORMAT_VERSION) -> str:
    """
    relation <N> [shape ...]
    i j
    """
    lines = [header(version), "relation " + _window_fields(relation.window)]
    lines += _window_lines(relation.window)
    lines += _pair_lines(relation)
    return "\n".join(lines) + "\n"


def parse_relation(text: str) -> Relation:
    cursor = _Cursor(text)
    number, fields = cursor.keyword("relation")
    window = _parse_window(number, fields, cursor)
    remaining = len(cursor.lines) - cursor.position
    return _parse_pairs(cursor, remaining, window)


# phi generators


def _phi_lines(phi: PhiGenerator) -> list:
    return [
        f"{n}: {value_to_str(values)}".rstrip()
        for n, values in sorted(phi.rows().items())
    ]


def _parse_phi_rows(cursor: _Cursor, count: int, size: int) -> dict:
    table = {}
    for _ in range(count):
        number, line = cursor.next("a phi row")
        head, colon, tail = line.partition(":")
        if not colon:
            raise DocumentFormatError(number, "expected 'n: k1 k2 ...'")
        n = _ints(number, [head])[0]
        if not 0 <= n < size or n in table:
            raise DocumentFormatError(number, f"bad or repeated row {n}")
        values = _ints(number, tail.split())
        if any(v < 0 for v in values):
            raise DocumentFormatError(number, "phi values must be in omega")
        table[n] = values
    return table


def format_phi(phi: PhiGenerator, version: str = FORMAT_VERSION) -> str:
    """
    phi <rows>            or    phi rule <spec>
    n: k1 k2 ...
    """
    if not phi.is_table:
        if phi.spec is None:
            raise DocumentFormatError(0, "rule without a spec cannot be written")
        return "\n".join([header(version), f"phi rule {phi.spec}"]) + "\n"
    lines = [header(version), f"phi {phi.table_size}"] + _phi_lines(phi)
    return "\n".join(lines) + "\n"


def parse_phi(text: str) -> PhiGenerator:
    cursor = _Cursor(text)
    number, fields = cursor.keyword("phi")
    if fields[:1] == ["rule"] and len(fields) == 2:
        return _parse_rule_field(number, fields[1])
    size = _ints(number, fields)
    if len(size) != 1:
        raise DocumentFormatError(number, "expected 'phi <rows>'")
    remaining = len(cursor.lines) - cursor.position
    return PhiGenerator(table=_parse_phi_rows(cursor, remaining, size[0]))


def _parse_rule_field(number: int, spec: str):
    from .rules import parse_rule

    try:
        return parse_rule(spec)
    except CoarseError as err:
        raise DocumentFormatError(number, str(err))


# certificates


def _scale_lines(name: str, scale, window: Window) -> list:
    from .rules import describe_rule

    spec = describe_rule(scale)
    if spec is not None:
        return [f"scale {name} rule {spec}"]
    if isinstance(scale, PhiGenerator):
        return [f"scale {name} phi {scale.table_size}"] + _phi_lines(scale)
    relation = scale
    if not (isinstance(scale, Relation) and scale.window == window):
        relation = materialize(scale, window)
    return [f"scale {name} relation {len(relation)}"] + _pair_lines(relation)


def _parse_scale(cursor: _Cursor, name: str, window: Window):
    number, fields = cursor.keyword("scale")
    if len(fields) < 3 or fields[0] != name:
        raise DocumentFormatError(number, f"expected 'scale {name} <kind> ...'")
    kind, argument = fields[1], fields[2]
    if kind == "rule":
        return _parse_rule_field(number, argument)
    count = _ints(number, [argument])[0]
    if kind == "phi":
        return PhiGenerator(table=_parse_phi_rows(cursor, count, count))
    if kind == "relation":
        return _parse_pairs(cursor, count, window)
    raise DocumentFormatError(number, f"unknown scale kind {kind!r}")


def format_certificate(
    certificate: AsdimCertificate, version: str = FORMAT_VERSION
) -> str:
    """
    certificate <N> [shape ...]
    scale E ...
    scale H ...
    family <index> <blocks>
    block i1 i2 ...
    """
    window = certificate.window
    lines = [header(version), "certificate " + _window_fields(window)]
    lines += _window_lines(window)
    lines += _scale_lines("E", certificate.E, window)
    lines += _scale_lines("H", certificate.H, window)
    for family in certificate.families:
        lines.append(f"family {family.index} {len(family.blocks)}")
        for block in family.blocks:
            lines.append("block " + value_to_str(block))
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> AsdimCertificate:
    """Parse a certificate; the result is unverified."""
    cursor = _Cursor(text)
    number, fields = cursor.keyword("certificate")
    window = _parse_window(number, fields, cursor)
    E = _parse_scale(cursor, "E", window)
    H = _parse_scale(cursor, "H", window)
    families = []
    while not cursor.done():
        number, fields = cursor.keyword("family")
        index, count = (_ints(number, fields) + [None, None])[:2]
        if count is None:
            raise DocumentFormatError(number, "expected 'family <index> <n>'")
        blocks = []
        for _ in range(count):
            block_number, block = cursor.keyword("block")
            blocks.append(_ints(block_number, block))
        families.append(make_family(window, blocks, index))
    return AsdimCertificate(window=window, E=E, H=H, families=tuple(families))


# sequences


def format_sequence(
    sequence: SequenceSubspace, version: str = FORMAT_VERSION
) -> str:
    """
    seq alpha=sqrt2-1 h=<limit> name=<name>
    k: e_k t_num/t_den
    """
    lines = [
        header(version),
        f"# note: {sequence.note}",
        f"seq alpha=sqrt2-1 h={sequence.limit.describe()} name={sequence.name}",
    ]
    for k, (e, t) in enumerate(zip(sequence.exponents, sequence.schedule)):
        lines.append(f"{k}: {e} {value_to_str(Fraction(t))}")
    return "\n".join(lines) + "\n"


def parse_sequence(text: str) -> SequenceSubspace:
    cursor = _Cursor(text)
    number, fields = cursor.keyword("seq")
    settings = dict(field.partition("=")[::2] for field in fields)
    if settings.get("alpha") != "sqrt2-1" or "h" not in settings:
        raise DocumentFormatError(number, "expected 'seq alpha=sqrt2-1 h=...'")
    try:
        limit = certify_limit(parse_circle_point(settings["h"]))
    except (CoarseError, ValueError, ZeroDivisionError) as err:
        raise DocumentFormatError(number, f"bad limit: {err}")
    exponents, schedule = [], []
    while not cursor.done():
        number, line = cursor.next("a sequence line")
        head, colon, tail = line.partition(":")
        parts = tail.split()
        if not colon or len(parts) != 2:
            raise DocumentFormatError(number, "expected 'k: e_k t_k'")
        if _ints(number, [head])[0] != len(exponents):
            raise DocumentFormatError(number, "sequence lines out of order")
        exponents.append(_ints(number, parts[:1])[0])
        try:
            schedule.append(parse_fraction(parts[1]))
        except (ValueError, ZeroDivisionError):
            raise DocumentFormatError(number, "bad tolerance")
    if len(set(exponents)) != len(exponents):
        raise DocumentFormatError(0, "sequence exponents repeat")
    return SequenceSubspace(
        name=settings.get("name", "A"),
        exponents=tuple(exponents),
        limit=limit.point,
        schedule=tuple(schedule),
        note=limit.note,
    )


# K rules


def format_krule(
    rule: KRule, references=None, version: str = FORMAT_VERSION
) -> str:
    """
    krule <parts>
    finite e1 e2 ...
    tail phi=<ref> seq=<ref>

    :param references: One (phi_ref, seq_ref) pair per tail part, in order.
        Defaults to tail<i>.phi / tail<i>.seq.
    """
    lines = [header(version), f"krule {len(rule.parts)}"]
    tail = 0
    for part in rule.parts:
        if isinstance(part, FinitePart):
            lines.append("finite " + value_to_str(frozenset(part.elements)))
            continue
        if references is None:
            phi_ref, seq_ref = f"tail{tail}.phi", f"tail{tail}.seq"
        else:
            phi_ref, seq_ref = references[tail]
        lines.append(f"tail phi={phi_ref} seq={seq_ref}")
        tail += 1
    return "\n".join(lines) + "\n"


def parse_krule(text: str, resolve: Callable[[str], str]) -> KRule:
    """
    :param resolve: Maps a reference to the text of the referenced document.
    """
    cursor = _Cursor(text)
    number, fields = cursor.keyword("krule")
    count = _ints(number, fields)
    if len(count) != 1:
        raise DocumentFormatError(number, "expected 'krule <parts>'")
    parts = []
    for _ in range(count[0]):
        number, line = cursor.next("a K rule part")
        tokens = line.split()
        if tokens[0] == "finite":
            parts.append(FinitePart(frozenset(_ints(number, tokens[1:]))))
        elif tokens[0] == "tail":
            refs = dict(token.partition("=")[::2] for token in tokens[1:])
            if "phi" not in refs or "seq" not in refs:
                raise DocumentFormatError(number, "expected phi= and seq=")
            try:
                phi = parse_phi(resolve(refs["phi"]))
                sequence = parse_sequence(resolve(refs["seq"]))
            except OSError as err:
                raise DocumentFormatError(number, str(err))
            parts.append(TailPart(phi=phi, sequence=sequence))
        else:
            raise DocumentFormatError(number, f"unknown part {tokens[0]!r}")
    return KRule(parts)


def read_text(path: str) -> str:
    with open(path, "r") as fh:
        return fh.read()


def write_text(path: str, text: str):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    logger.debug("wrote %s", path)


def read_krule(path: str) -> KRule:
    base = os.path.dirname(path)
    return parse_krule(
        read_text(path), lambda ref: read_text(os.path.join(base, ref))
    )


def write_krule(rule: KRule, path: str, version: str = FORMAT_VERSION):
    """Write a K rule and the phi and sequence files of its tail parts."""
    stem = os.path.splitext(os.path.basename(path))[0]
    base = os.path.dirname(path)
    references = []
    for part in rule.parts:
        if isinstance(part, TailPart):
            tail = len(references)
            phi_ref = f"{stem}.tail{tail}.phi"
            seq_ref = f"{stem}.tail{tail}.seq"
            write_text(os.path.join(base, phi_ref), format_phi(part.phi, version))
            write_text(
                os.path.join(base, seq_ref),
                format_sequence(part.sequence, version),
            )
            references.append((phi_ref, seq_ref))
    write_text(path, format_krule(rule, references, version))


# reports


def _verdict(passed: bool) -> str:
    return "pass" if passed else "fail"


def format_certificate_report(report, version: str = FORMAT_VERSION) -> str:
    certificate = report.certificate
    lines = [
        header(version),
        "certificate-report",
        f"verdict {_verdict(report.passed)}",
        f"window {certificate.window.size}",
        f"families {len(certificate.families)}",
    ]
    if report.uncovered:
        lines.append("uncovered " + value_to_str(list(report.uncovered)))
    for index, block in report.malformed:
        shown = "window" if block is None else value_to_str(block)
        lines.append(f"malformed family {index} {shown}".rstrip())
    for index, (first, second, point) in report.disjointness_failures:
        lines.append(
            f"not-disjoint family {index} point {point} blocks "
            f"[{value_to_str(first)}] [{value_to_str(second)}]"
        )
    for block in report.unbounded_blocks:
        lines.append("unbounded " + value_to_str(block))
    return "\n".join(lines) + "\n"


def _pair_text(counterexample) -> str:
    (x, y), (fx, fy) = counterexample
    return f"({x}, {y}) -> ({fx}, {fy})"


def _macro_lines(report) -> list:
    lines = [f"status {report.status}"]
    for verdict in report.verdicts:
        line = (
            f"window {verdict.size} scale {verdict.scale} "
            f"{_verdict(verdict.passed)}"
        )
        if verdict.counterexample is not None:
            line += " " + _pair_text(verdict.counterexample)
        lines.append(line)
    return lines


def format_macro_report(report, version: str = FORMAT_VERSION) -> str:
    lines = [header(version), "macro-uniform-report"] + _macro_lines(report)
    return "\n".join(lines) + "\n"


def format_asymorphism_report(report, version: str = FORMAT_VERSION) -> str:
    lines = [header(version), "asymorphism-report", f"status {report.status}"]
    lines += ["forward"] + _macro_lines(report.forward)
    lines += ["backward"] + _macro_lines(report.backward)
    return "\n".join(lines) + "\n"


def format_probe_report(report, version: str = FORMAT_VERSION) -> str:
    lines = [header(version), "probe-report", f"status {report.status}"]
    for rung in report.rungs:
        lines.append(
            f"window {rung.size} scale {rung.scale} "
            f"max-column {rung.max_column} {_verdict(rung.passed)}"
        )
    lines.append("stabilized " + value_to_str(list(report.stabilized)))
    lines.append(
        "probe-points " + value_to_str([len(p) for p in report.probe_points])
    )
    return "\n".join(lines) + "\n"


def format_lines(title: str, entries, version: str = FORMAT_VERSION) -> str:
    """A generic report: a title line then "key value" lines."""
    lines = [header(version), title]
    for key, value in entries:
        lines.append(f"{key} {value_to_str(value)}".rstrip())
    return "\n".join(lines) + "\n"


def document_version(text: str) -> Optional[str]:
    """The version of the format header, or None if it is missing."""
    for line in text.splitlines():
        if line.startswith(HEADER_PREFIX):
            return line[len(HEADER_PREFIX):].strip()
        if line.strip():
            return None
    return None
