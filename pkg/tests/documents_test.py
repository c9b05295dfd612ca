#!/usr/bin/python3
import os
import tempfile
import unittest
from fractions import Fraction

from pycoarse.certify import verify_certificate
from pycoarse.core import (
    Chain,
    PhiGenerator,
    Relation,
    Window,
    chain_relation,
    interval_rule,
)
from pycoarse.documents import (
    document_version,
    format_certificate,
    format_certificate_report,
    format_lines,
    format_macro_report,
    format_phi,
    format_relation,
    format_sequence,
    parse_certificate,
    parse_circle_point,
    parse_phi,
    parse_relation,
    parse_sequence,
    read_krule,
    write_krule,
)
from pycoarse.exceptions import DocumentFormatError
from pycoarse.groups import (
    FinitePart,
    KRule,
    TailPart,
    circle_point,
    find_convergent_sequence,
    halving_schedule,
)
from pycoarse.maps import check_macro_uniform
from pycoarse.shellpart import parity_certificate, shell_partition
from test_config import HALVING_START, LIMIT


class RelationDocumentTest(unittest.TestCase):
    def test_format(self):
        relation = Relation(Window(3), [(2, 2), (0, 1)])
        self.assertEqual(
            format_relation(relation),
            "# pycoarse format 1\nrelation 3\n0 1\n2 2\n",
        )

    def test_parse_skips_comments(self):
        text = "# pycoarse format 1\n\nrelation 4\n# chain step\n0 1\n1 2\n"
        relation = parse_relation(text)
        self.assertEqual(relation.pairs, {(0, 1), (1, 2)})
        self.assertEqual(relation.window, Window(4))

    def test_labeled_window(self):
        relation = Relation(Window(2, labels=[5, 9]), [(0, 1)])
        parsed = parse_relation(format_relation(relation))
        self.assertEqual(parsed.window.labels, (5, 9))

    def test_pair_outside_window(self):
        with self.assertRaises(DocumentFormatError) as ctx:
            parse_relation("relation 3\n0 1\n0 5\n")
        self.assertEqual(ctx.exception.line_number, 3)

    def test_wrong_keyword(self):
        with self.assertRaises(DocumentFormatError) as ctx:
            parse_relation("# pycoarse format 1\nphi 3\n")
        self.assertEqual(ctx.exception.line_number, 2)


class PhiDocumentTest(unittest.TestCase):
    def test_table(self):
        phi = PhiGenerator(table={0: [0, 2], 1: [1]})
        text = format_phi(phi)
        self.assertIn("0: 0 2\n", text)
        self.assertEqual(parse_phi(text), phi)

    def test_rule(self):
        text = format_phi(interval_rule(3))
        self.assertIn("phi rule interval:3", text)
        self.assertEqual(parse_phi(text), interval_rule(3))

    def test_repeated_row(self):
        with self.assertRaises(DocumentFormatError):
            parse_phi("phi 2\n0: 0\n0: 1\n")


class CertificateDocumentTest(unittest.TestCase):
    def test_parity_certificate(self):
        decomposition = shell_partition(chain_relation(Window(10), 1))
        certificate = parity_certificate(decomposition)
        parsed = parse_certificate(format_certificate(certificate))
        self.assertFalse(parsed.verified)
        self.assertEqual(parsed.window, certificate.window)
        self.assertEqual(parsed.H, certificate.H)
        self.assertTrue(verify_certificate(parsed).passed)

    def test_rule_scales(self):
        window = Window(6)
        text = (
            "# pycoarse format 1\n"
            "certificate 6\n"
            "scale E rule chain:1\n"
            "scale H rule interval:1\n"
            "family 0 2\n"
            "block 0 1\n"
            "block 4 5\n"
            "family 1 1\n"
            "block 2 3\n"
        )
        parsed = parse_certificate(text)
        self.assertEqual(parsed.E, Chain(1))
        self.assertEqual(parsed.window, window)
        report = verify_certificate(parsed)
        self.assertTrue(report.passed)
        self.assertIn("verdict pass", format_certificate_report(report))

    def test_grid_window(self):
        window = Window.grid((2, 3))
        certificate = verify_certificate(
            parse_certificate(
                "certificate 6 shape 2 3\n"
                "scale E rule diagonal\n"
                "scale H rule full\n"
                "family 0 1\n"
                "block 0 1 2 3 4 5\n"
            )
        ).certificate
        self.assertEqual(certificate.window, window)
        self.assertTrue(certificate.verified)

    def test_failing_report(self):
        parsed = parse_certificate(
            "certificate 4\nscale E rule chain:1\nscale H rule full\n"
            "family 0 2\nblock 0 1\nblock 2\n"
        )
        text = format_certificate_report(verify_certificate(parsed))
        self.assertIn("verdict fail", text)
        self.assertIn("uncovered 3", text)
        self.assertIn("not-disjoint family 0 point 2", text)

    def test_truncated(self):
        with self.assertRaises(DocumentFormatError):
            parse_certificate("certificate 4\nscale E rule chain:1\n")


class SequenceDocumentTest(unittest.TestCase):
    def test_circle_points(self):
        self.assertEqual(parse_circle_point("-7+5*sqrt2"), circle_point(5))
        self.assertEqual(
            parse_circle_point("(1-1*sqrt2)/3").value.d, 3
        )
        self.assertFalse(parse_circle_point("1/3").in_group())

    def test_sequence(self):
        sequence = find_convergent_sequence(
            LIMIT, halving_schedule(HALVING_START, 5)
        )
        text = format_sequence(sequence)
        self.assertIn("seq alpha=sqrt2-1 h=1/3 name=A", text)
        self.assertIn("0: 1 1/10", text)
        parsed = parse_sequence(text)
        self.assertEqual(parsed.exponents, sequence.exponents)
        self.assertEqual(parsed.schedule, sequence.schedule)
        self.assertEqual(parsed.limit, sequence.limit)

    def test_group_limit_refused(self):
        with self.assertRaises(DocumentFormatError):
            parse_sequence("seq alpha=sqrt2-1 h=-1+1*sqrt2\n0: 1 1/10\n")

    def test_repeated_exponents(self):
        with self.assertRaises(DocumentFormatError):
            parse_sequence("seq alpha=sqrt2-1 h=1/3\n0: 1 1/10\n1: 1 1/20\n")


class KRuleDocumentTest(unittest.TestCase):
    def test_write_and_read(self):
        sequence = find_convergent_sequence(
            LIMIT, halving_schedule(HALVING_START, 4)
        )
        rule = KRule([
            FinitePart(frozenset({0, 3})),
            TailPart(phi=interval_rule(1), sequence=sequence),
        ])
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "out", "k.krule")
            write_krule(rule, path)
            self.assertTrue(os.path.exists(os.path.join(tmp, "out", "k.tail0.phi")))
            self.assertTrue(os.path.exists(os.path.join(tmp, "out", "k.tail0.seq")))
            loaded = read_krule(path)
        self.assertEqual(loaded.elements(), rule.elements())

    def test_missing_reference(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "k.krule")
            with open(path, "w") as fh:
                fh.write("krule 1\ntail phi=none.phi seq=none.seq\n")
            with self.assertRaises(DocumentFormatError):
                read_krule(path)


class ReportTest(unittest.TestCase):
    def test_macro_report(self):
        report = check_macro_uniform(
            lambda n: n * n, [(Chain(1), Chain(1))], [5]
        )
        text = format_macro_report(report)
        self.assertIn("status refuted", text)
        self.assertIn("window 5 scale 0 fail (1, 2) -> (1, 4)", text)

    def test_version(self):
        text = format_lines("conditions-report", [("injectivity", True)])
        self.assertEqual(document_version(text), "1")
        self.assertIn("injectivity true", text)
        self.assertIsNone(document_version("relation 3\n"))
        self.assertEqual(document_version(format_lines("x", [], "7")), "7")


if __name__ == "__main__":
    unittest.main()
