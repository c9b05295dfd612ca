"""
End-to-end runs: the shell certificate on omega, the convergent-sequence
asymorphism, the m-fold sum asymorphism, and the randomized suites.

Each run returns a namedtuple whose passed field is True only if every
check inside it passed.
"""
import logging
from collections import namedtuple
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .certify import (
    AsdimCertificate,
    brute_min_families,
    make_family,
    verify_certificate,
)
from .config import (
    DEFAULT_BRUTE_FORCE_CAP,
    DEFAULT_DENSE_THRESHOLD,
    DEFAULT_SEARCH_BUDGET,
)
from .core import (
    Relation,
    Window,
    chain_relation,
    compose,
    diagonal,
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
from .exceptions import CoarseError
from .groups import (
    FinitePart,
    KRule,
    TailPart,
    ball_holding_tail,
    build_phi_k,
    build_sum_space,
    certify_limit,
    check_condition_1,
    check_condition_4,
    circle_point,
    compact_rule_from_phi,
    find_convergent_sequence,
    find_independent_sequences,
    gentle_schedule,
    halving_schedule,
    sum_injectivity_check,
)
from .maps import (
    VALIDATED,
    canonical_witness,
    check_asymorphism,
    universal_property_probe,
)
from .shellpart import (
    augment,
    brick_certificate,
    parity_certificate,
    product_certificate,
    shell_partition,
    shells_to_phi,
)

logger = logging.getLogger(__name__)

Thm1Result = namedtuple(
    "Thm1Result", ["decomposition", "certificate", "report", "passed"]
)
"""
Shell certificate run on one window.

:param ShellDecomposition decomposition: The shells of the augmented rule.
:param AsdimCertificate certificate: The parity certificate, verified.
:param CertificateReport report: The verification report.
:param bool passed: True if the certificate verified.
"""


def shell_certificate_run(
    size: int, rule, dense_threshold: int = DEFAULT_DENSE_THRESHOLD
) -> Thm1Result:
    """
    augment -> shell_partition -> parity_certificate -> verify on the
    window of the given size.

    :param int size: Window size.
    :param rule: Any materializable rule (Relation, PhiGenerator, leaf).
    :param int dense_threshold: Largest window materialized densely.
    """
    window = Window(size)
    F = augment(materialize(rule, window, dense_threshold))
    decomposition = shell_partition(F)
    report = verify_certificate(parity_certificate(decomposition))
    logger.info(
        "shell certificate on %d points: %d shells, %s",
        size,
        len(decomposition.shells),
        "pass" if report.passed else "fail",
    )
    return Thm1Result(
        decomposition=decomposition,
        certificate=report.certificate,
        report=report,
        passed=report.passed,
    )


def brute_force_exponents(h, schedule: Sequence, budget: int = 10 ** 5) -> list:
    """
    Recompute the first exponents of a convergent sequence by comparing
    exact circle distances, independently of the integer scan.
    """
    point = certify_limit(h).point
    exponents = []
    e = 0
    for t in schedule:
        stop = e + budget
        while e < stop and not circle_point(e).distance(point) < t:
            e += 1
        if e == stop:
            break
        exponents.append(e)
        e += 1
    return exponents


Thm2Result = namedtuple(
    "Thm2Result",
    [
        "halving",
        "brute_force",
        "sequence",
        "rules",
        "asymorphism",
        "probe",
        "failures",
        "passed",
    ],
)
"""
Convergent-sequence run.

:param SequenceSubspace halving: Sequence for the halving schedule.
:param list brute_force: Its first two exponents recomputed independently.
:param SequenceSubspace sequence: The long sequence used on the ladder.
:param list rules: (phi, KRule) pairs from compact_rule_from_phi.
:param AsymorphismReport asymorphism: Both directions of f(n) = a_n.
:param ProbeReport probe: Canonical witness columns along the ladder.
:param list failures: Descriptions of failed steps.
:param bool passed: True if nothing failed.
"""


def convergent_sequence_run(
    h=Fraction(1, 3),
    ladder: Sequence[int] = (256, 1024, 4096),
    seed: int = 0,
    rule_count: int = 5,
    width: int = 3,
    halving_steps: int = 15,
    start=Fraction(1, 10),
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> Thm2Result:
    """
    f(n) = a_n from (omega, phi structure) onto a sequence converging to h.

    Forward witnesses are the compact rules K of random phi tables,
    translated as x + K; backward witnesses are canonical witnesses of the
    translate entourages of those rules.
    """
    failures = []
    halving = find_convergent_sequence(
        h, halving_schedule(start, halving_steps), budget=budget
    )
    brute = brute_force_exponents(h, halving.schedule[:2])
    if list(halving.exponents[:2]) != brute:
        failures.append(f"first exponents {halving.exponents[:2]} != {brute}")

    top = max(ladder)
    sequence = find_convergent_sequence(h, gentle_schedule(top), budget=budget)
    rng = np.random.default_rng(seed)
    rules = []
    for _ in range(rule_count):
        phi = random_phi_table(top, width, rng)
        try:
            rules.append((phi, compact_rule_from_phi(phi, sequence)))
        except CoarseError as err:
            failures.append(f"compact rule: {err}")
    for index, (_, rule) in enumerate(rules, start=1):
        for size in ladder:
            holder = ball_holding_tail(rule, sequence.window(size))
            if holder is not None:
                failures.append(f"rule {index} ball at {holder} holds a tail")

    forward = [(phi, rule.translate(reverse=True)) for phi, rule in rules]
    backward = [
        (rule, canonical_witness_rule) for _, rule in rules
    ]
    asymorphism = check_asymorphism(
        lambda n: n,
        forward,
        backward,
        ladder,
        source=Window,
        target=sequence.window,
    )
    if asymorphism.status != VALIDATED:
        failures.append(f"asymorphism {asymorphism.status}")
    probe = universal_property_probe(
        sequence.window, None, ladder, [rule for _, rule in rules]
    )
    if probe.status != VALIDATED:
        failures.append(f"probe {probe.status}")
    return Thm2Result(
        halving=halving,
        brute_force=brute,
        sequence=sequence,
        rules=rules,
        asymorphism=asymorphism,
        probe=probe,
        failures=failures,
        passed=not failures,
    )


def canonical_witness_rule(E: Relation, image, target: Window):
    """Witness callable for check_macro_uniform: the canonical witness."""
    return canonical_witness(E, image, target)


def sample_krules(sequences: Sequence, rng: np.random.Generator, count: int) -> list:
    """
    Random K rules: a finite part holding 0 and a few short differences
    along one axis, and a width-1 tail part along another.
    """
    rules = []
    m = len(sequences)
    for _ in range(count):
        axis = int(rng.integers(m))
        exponents = sequences[axis].exponents
        picks = rng.integers(0, len(exponents) - 2, size=3)
        finite = {0} | {
            int(exponents[p + int(step)] - exponents[p])
            for p, step in zip(picks.tolist(), rng.integers(1, 3, size=3))
        }
        tail_axis = int(rng.integers(m))
        tail_phi = random_phi_table(
            len(sequences[tail_axis].exponents), 1, rng
        )
        rules.append(
            KRule(
                [
                    FinitePart(frozenset(finite)),
                    TailPart(phi=tail_phi, sequence=sequences[tail_axis]),
                ]
            )
        )
    return rules


def _grid_relation(
    relations: Sequence[Relation], grid: Window, threshold: int
) -> Relation:
    combined = relations[0]
    for relation in relations[1:]:
        combined = tensor_product(combined, relation, threshold)
    return Relation(grid, combined.pair_arrays(), threshold=threshold)


def _sum_rule(phis, sequences, side: int) -> KRule:
    """K' = sum over axes of {e_km - e_kn : m in phi_k(n), n, m < side}."""
    totals = {0}
    for phi, sequence in zip(phis, sequences):
        exponents = sequence.exponents
        steps = {
            exponents[m] - exponents[n]
            for n in range(side)
            for m in phi(n)
            if m < side
        }
        totals = {t + s for t in totals for s in steps}
    return KRule([FinitePart(frozenset(totals))])


Thm3Result = namedtuple(
    "Thm3Result",
    [
        "sequences",
        "injectivity",
        "condition_1",
        "space",
        "condition_3",
        "condition_4",
        "asymorphism",
        "product_report",
        "brick_report",
        "failures",
        "passed",
    ],
)
"""
m-fold sum run.

:param list sequences: The m sequences.
:param SumInjectivity injectivity: Check on the large grid.
:param Condition1Report condition_1: Exact check of the limits.
:param SumSpace space: Sum space on the small grid.
:param list condition_3: validate_phi reports of every phi_k.
:param list condition_4: ConditionReport per sampled K rule.
:param AsymorphismReport asymorphism: Both directions of the grid map.
:param CertificateReport product_report: Product of two parity
    certificates.
:param CertificateReport brick_report: Brick certificate on a grid.
:param list failures: Descriptions of failed steps.
:param bool passed: True if nothing failed.
"""


def sum_space_run(
    m: int = 2,
    grid: int = 16,
    injectivity_grid: int = 64,
    limits: Optional[Sequence] = None,
    seed: int = 0,
    rule_count: int = 10,
    translate_count: int = 3,
    budget: int = DEFAULT_SEARCH_BUDGET,
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD,
) -> Thm3Result:
    """
    The grid map (i_1, ..., i_m) -> a_{1 i_1} + ... + a_{m i_m} and the
    certificates on products.
    """
    if limits is None:
        limits = [Fraction(1, 3), Fraction(2, 5)][:m]
        limits += [Fraction(1, k + 4) for k in range(m - len(limits))]
    failures = []
    side = max(grid, injectivity_grid)
    sequences = find_independent_sequences(
        limits, gentle_schedule(side), budget=budget
    )
    shape = (grid,) * m
    injectivity = sum_injectivity_check(sequences, (injectivity_grid,) * m)
    if not injectivity.passed:
        failures.append("sum injectivity")
    space = build_sum_space(sequences, shape)
    condition_1 = check_condition_1(limits, space.sums)
    if not condition_1.passed:
        failures.append("condition 1")

    rng = np.random.default_rng(seed)
    krules = sample_krules(sequences, rng, rule_count)
    axis_window = Window(grid)
    condition_3, condition_4 = [], []
    phi_sets = []
    for rule in krules:
        phis = [build_phi_k(rule, sequences, k, shape) for k in range(m)]
        phi_sets.append(phis)
        reports = [validate_phi(phi, axis_window) for phi in phis]
        condition_3.extend(reports)
        if not all(report.is_valid() for report in reports):
            failures.append("condition 3")
        verdict = check_condition_4(rule, sequences, phis, shape)
        condition_4.append(verdict)
        if not verdict.passed:
            failures.append("condition 4")

    grid_window = Window.grid(shape)
    forward = []
    for _ in range(translate_count):
        psis = [random_phi_table(grid, 1, rng) for _ in range(m)]
        E = _grid_relation(
            [psi.to_relation(axis_window) for psi in psis],
            grid_window,
            dense_threshold,
        )
        forward.append((E, _sum_rule(psis, sequences, grid).translate(reverse=True)))
    backward = []
    for rule, phis in list(zip(krules, phi_sets))[:translate_count]:
        W = _grid_relation(
            [phi.to_relation(axis_window) for phi in phis],
            grid_window,
            dense_threshold,
        )
        backward.append((rule, W))
    asymorphism = check_asymorphism(
        lambda n: n,
        forward,
        backward,
        [grid],
        source=lambda size: grid_window,
        target=lambda size: space.window,
    )
    if asymorphism.status != VALIDATED:
        failures.append(f"asymorphism {asymorphism.status}")

    parity = verify_certificate(
        parity_certificate(shell_partition(augment(chain_relation(Window(8)))))
    ).certificate
    product_report = verify_certificate(product_certificate(parity, parity))
    if not product_report.passed:
        failures.append("product certificate")
    brick_report = verify_certificate(
        brick_certificate(2, 1, 7, Window.grid((21, 21)))
    )
    if not brick_report.passed:
        failures.append("brick certificate")
    logger.info("sum space run on %s grid: %d failures", shape, len(failures))
    return Thm3Result(
        sequences=sequences,
        injectivity=injectivity,
        condition_1=condition_1,
        space=space,
        condition_3=condition_3,
        condition_4=condition_4,
        asymorphism=asymorphism,
        product_report=product_report,
        brick_report=brick_report,
        failures=failures,
        passed=not failures,
    )


SuiteResult = namedtuple("SuiteResult", ["trials", "failures", "passed"])
"""
Result of a randomized suite.

:param int trials: Number of trials run.
:param list failures: (trial, description) for each failed identity.
:param bool passed: True if nothing failed.
"""


def _subset(first: Relation, second: Relation) -> bool:
    return first.pairs <= second.pairs


def axioms_suite(
    trials: int = 1000,
    seed: int = 0,
    max_size: int = 12,
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD,
) -> SuiteResult:
    """
    Random relation triples against the algebra identities.  The triples
    are stored as dense_threshold dictates and every composite is also
    recomputed in the other mode.
    """
    rng = np.random.default_rng(seed)
    failures = []
    for trial in range(trials):
        window = Window(int(rng.integers(1, max_size + 1)))
        density = float(rng.uniform(0.05, 0.5))
        E, E2, E3 = (
            random_relation(window, rng, density).with_threshold(
                dense_threshold
            )
            for _ in range(3)
        )
        flip = E.to_sparse if E.is_dense else E.to_dense
        flip2 = E2.to_sparse if E2.is_dense else E2.to_dense
        checks = {
            "inverse of composition": inverse(compose(E, E2))
            == compose(inverse(E2), inverse(E)),
            "diagonal identity": compose(diagonal(window), E) == E
            and compose(E, diagonal(window)) == E,
            "associativity": compose(compose(E, E2), E3)
            == compose(E, compose(E2, E3)),
            "modes agree": compose(flip(), flip2()).with_threshold(
                dense_threshold
            )
            == compose(E, E2),
            "monotone composition": _subset(
                compose(E, E2), compose(union(E, E3), E2)
            ),
        }
        points = [int(p) for p in np.flatnonzero(rng.random(window.size) < 0.5)]
        checks["ball composition"] = set(
            compose(E, E2).ball_array(points).tolist()
        ) == set(E2.ball_array(E.ball_array(points)).tolist())
        checks["monotone ball"] = set(E.ball_array(points).tolist()) <= set(
            union(E, E3).ball_array(points).tolist()
        )
        for name, held in checks.items():
            if not held:
                failures.append((trial, name))
    return SuiteResult(trials=trials, failures=failures, passed=not failures)


def chain_obstruction_suite(
    max_size: int = 9,
    cap: int = DEFAULT_BRUTE_FORCE_CAP,
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD,
) -> SuiteResult:
    """
    With E the chain relation, no covering at n = 0 exists once H-balls
    are proper, and the shell entourage gives exactly n = 1 when its balls
    are proper (n = 0 when one ball is the whole window).
    """
    failures = []
    trials = 0
    for size in range(2, max_size + 1):
        window = Window(size)
        E = chain_relation(window, 1).with_threshold(dense_threshold)
        for radius in range(size // 2):
            trials += 1
            found = brute_min_families(E, interval_rule(radius), window, cap=cap)
            if found.n is not None and found.n < 1:
                failures.append((size, f"interval:{radius} gave {found.n}"))
        trials += 1
        H = shells_to_phi(shell_partition(augment(E)))
        proper = all(len(H(n)) < size for n in range(size))
        found = brute_min_families(E, H, window, cap=cap)
        if found.n != (1 if proper else 0):
            failures.append((size, f"shell entourage gave {found.n}"))
    return SuiteResult(trials=trials, failures=failures, passed=not failures)


def _greedy_colouring(E: Relation, blocks: Sequence) -> list:
    """Colour blocks greedily so that each colour class is E-disjoint."""
    window = E.window
    balls = [set(E.ball_array(sorted(block)).tolist()) for block in blocks]
    colours = []
    for position, block in enumerate(blocks):
        taken = {
            colours[other]
            for other in range(position)
            if balls[position] & blocks[other] or balls[other] & block
        }
        colour = 0
        while colour in taken:
            colour += 1
        colours.append(colour)
    return [
        make_family(window, [b for b, c in zip(blocks, colours) if c == k], k)
        for k in range(max(colours) + 1)
    ]


def _merged_blocks(H: Relation, rng: np.random.Generator) -> list:
    """
    Partition a window into H-bounded blocks.  Each block is its least
    point plus a random part of the ball H[x] of one of that point's
    centers x; H must be reflexive.
    """
    uncovered = set(range(H.window.size))
    blocks = []
    while uncovered:
        point = min(uncovered)
        centers = H.predecessors(point)
        center = int(centers[rng.integers(centers.size)])
        block = {point} | {
            q
            for q in H.successors(center).tolist()
            if q in uncovered and rng.random() < 0.6
        }
        uncovered -= block
        blocks.append(frozenset(block))
    return blocks


def oracle_consistency_suite(
    trials: int = 200,
    seed: int = 0,
    max_size: int = 8,
    cap: int = DEFAULT_BRUTE_FORCE_CAP,
    dense_threshold: int = DEFAULT_DENSE_THRESHOLD,
) -> SuiteResult:
    """
    For random (E, H) check that every verified certificate with n + 1
    families has oracle value at most n.

    The candidates at (E, H) are greedy colourings of singletons and of
    randomly merged H-bounded blocks, all singletons, and the parity
    families of the shells of E.  The parity certificate is also checked
    at its own scales, and the oracle's witness must verify with exactly
    n + 1 families.
    """
    rng = np.random.default_rng(seed)
    failures = []
    for trial in range(trials):
        window = Window(int(rng.integers(1, max_size + 1)))
        E = reflexive_closure(
            random_relation(window, rng, float(rng.uniform(0.05, 0.4)))
        ).with_threshold(dense_threshold)
        H = reflexive_closure(
            random_relation(window, rng, float(rng.uniform(0.1, 0.8)))
        ).with_threshold(dense_threshold)
        singletons = [frozenset({p}) for p in range(window.size)]
        parity = parity_certificate(shell_partition(augment(E)))
        oracle = brute_min_families(E, H, window, cap=cap)
        candidates = [
            (AsdimCertificate(window, E, H, families), oracle)
            for families in (
                tuple(_greedy_colouring(E, singletons)),
                tuple(_greedy_colouring(E, _merged_blocks(H, rng))),
                tuple(
                    make_family(window, [[p]], p) for p in range(window.size)
                ),
                parity.families,
            )
        ]
        candidates.append(
            (parity, brute_min_families(parity.E, parity.H, window, cap=cap))
        )
        for certificate, found in candidates:
            report = verify_certificate(certificate)
            if not report.passed:
                if certificate is parity:
                    failures.append((trial, "parity certificate fails"))
                continue
            if found.n is None or found.n > certificate.n:
                failures.append((trial, f"oracle {found.n} > {certificate.n}"))
        if oracle.n is not None:
            witness = verify_certificate(oracle.certificate)
            if not witness.passed or witness.certificate.n != oracle.n:
                failures.append((trial, f"oracle witness for {oracle.n} fails"))
    return SuiteResult(trials=trials, failures=failures, passed=not failures)
