#!/usr/bin/python3
import unittest
from fractions import Fraction

from pycoarse.config import default_settings, load_settings
from pycoarse.exceptions import ConfigError
from pycoarse.groups import RootTwo, circle_point
from pycoarse.helper_funcs import grid_coords, parse_fraction, value_to_str


class LoadSettingsTest(unittest.TestCase):
    def test_defaults(self):
        self.assertEqual(load_settings({}), default_settings())
        self.assertEqual(default_settings().dense_threshold, 4096)

    def test_overrides(self):
        settings = load_settings(
            {"PYCOARSE_SEARCH_BUDGET": "500", "PYCOARSE_OUTPUT_DIR": "/tmp/out"}
        )
        self.assertEqual(settings.search_budget, 500)
        self.assertEqual(settings.output_dir, "/tmp/out")

    def test_rejects_non_positive(self):
        for value in ("0", "-3", "ten"):
            with self.assertRaises(ConfigError) as ctx:
                load_settings({"PYCOARSE_DENSE_THRESHOLD": value})
            self.assertEqual(ctx.exception.value, value)


class HelperTest(unittest.TestCase):
    def test_value_to_str(self):
        self.assertEqual(value_to_str(Fraction(1, 20)), "1/20")
        self.assertEqual(value_to_str(frozenset({3, 1})), "1 3")
        self.assertEqual(value_to_str([1, (2, 3)]), "1 2 3")
        self.assertEqual(value_to_str(False), "false")
        self.assertEqual(value_to_str(circle_point(1)), "-1+1*sqrt2")
        self.assertEqual(value_to_str([RootTwo(1, -2, 3)]), "(1-2*sqrt2)/3")

    def test_parse_fraction(self):
        self.assertEqual(parse_fraction(" 2/6 "), Fraction(1, 3))
        self.assertEqual(parse_fraction("4"), Fraction(4))

    def test_grid_coordinates(self):
        self.assertEqual(grid_coords(5, (3, 4)), (1, 1))
