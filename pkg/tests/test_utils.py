import unittest
from fractions import Fraction

import helpers  # noqa: F401
from ldd_calculator.utils.io_utils import csv_text, header_lines, render_value
from ldd_calculator.utils.math_utils import lin_space, log_space, parse_number, render, series_divide


class MathUtilsTest(unittest.TestCase):
    def test_parse_number(self):
        self.assertEqual(parse_number("1/3", True), Fraction(1, 3))
        self.assertEqual(parse_number("0.001", True), Fraction(1, 1000))
        self.assertEqual(parse_number("1e-3", False), 1e-3)
        self.assertAlmostEqual(parse_number("1/4", False), 0.25)

    def test_series_divide(self):
        # 1 / (1 - z) = 1 + z + z^2 + ...
        self.assertEqual(series_divide([1], [1, -1], 3), [1, 1, 1, 1])
        self.assertEqual(series_divide([0, 2], [2, 2], 2), [0, 1, -1])

    def test_spaces(self):
        self.assertEqual(lin_space(Fraction(0), Fraction(1), 3), [0, Fraction(1, 2), 1])
        values = log_space(1e-4, 1e-2, 3)
        self.assertAlmostEqual(values[1], 1e-3)
        self.assertEqual(log_space(0.5, 0.9, 1), [0.5])

    def test_render(self):
        self.assertEqual(render(Fraction(3, 4)), "3/4")
        self.assertEqual(render(0.1), "0.1")


class CsvTest(unittest.TestCase):
    def test_header_and_values(self):
        prov = {"invocation": "ldd-calculator fidelity", "inputs": {"steane.code": "ab12"}}
        text = csv_text(("a", "b", "c"), [(Fraction(1, 2), 0.25, None)], prov)

        self.assertEqual(
            text.splitlines(),
            ["# invocation: ldd-calculator fidelity", "# sha256 steane.code ab12", "a,b,c", "1/2,0.25,"],
        )

    def test_empty_provenance(self):
        self.assertEqual(header_lines(None), [])
        self.assertEqual(render_value(None), "")


if __name__ == "__main__":
    unittest.main()
