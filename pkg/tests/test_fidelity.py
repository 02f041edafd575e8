import math
import unittest
from fractions import Fraction

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import helpers
from ldd_calculator.errors import DomainError, LddCalculatorError
from ldd_calculator.models.code import full_pauli_group, trivial_code, trivial_decoder
from ldd_calculator.services import fidelity
from ldd_calculator.services.fidelity import NoiseParams
from ldd_calculator.services.wep import compute_weps, tables_from_cells
from ldd_calculator.utils.math_utils import horner


def rational_grid(count=10):
    return [Fraction(i, count) for i in range(count)]


def p_of_z(z):
    return 3 * z / (1 + 3 * z)


class NoiseParamsTest(unittest.TestCase):
    def test_domain_errors_name_the_parameter(self):
        with self.assertRaises(DomainError) as ctx:
            NoiseParams(0.1, p_dd=1.5)
        self.assertEqual(ctx.exception.name, "p_dd")
        with self.assertRaises(DomainError):
            NoiseParams(1.0)
        with self.assertRaises(DomainError):
            NoiseParams(-0.1)

    def test_z_and_exact_mode(self):
        params = NoiseParams(Fraction(1, 4))

        self.assertTrue(params.exact)
        self.assertEqual(params.z, Fraction(1, 9))
        self.assertFalse(NoiseParams(0.25).exact)
        self.assertEqual(NoiseParams(0.5, 0.25).as_exact().p_dd, Fraction(1, 4))


class ReductionIdentityTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.wep = helpers.table("steane", "qec")
        cls.qed = helpers.table("steane", "qed")

    def test_hybrid_without_suppression_is_qec(self):
        for p in rational_grid():
            for q in rational_grid():
                params = NoiseParams(p, Fraction(1), q)
                self.assertEqual(fidelity.f_hybrid(self.wep, params), fidelity.f_qec(self.wep, params))

    def test_hybrid_with_failed_recovery_is_ldd(self):
        for p in rational_grid():
            for d in rational_grid():
                params = NoiseParams(p, d, Fraction(1))
                self.assertEqual(fidelity.f_hybrid(self.wep, params), fidelity.f_ldd(self.wep, params))

    def test_trivial_code_ldd_is_physical_dd(self):
        for k in (1, 2):
            code = trivial_code(k)
            wep = compute_weps(code, trivial_decoder(code), full_pauli_group(k))
            for p in rational_grid():
                for d in rational_grid():
                    params = NoiseParams(p, d)
                    self.assertEqual(fidelity.f_ldd(wep, params), fidelity.f_dd_closed(p, d, k))
                    self.assertEqual(fidelity.f_dd_general(wep, params), fidelity.f_dd_closed(p, d, k))

    def test_qed_hybrid_without_suppression_is_qed_only(self):
        for p in rational_grid():
            for e in rational_grid():
                params = NoiseParams(p, Fraction(1), Fraction(0), e)
                hyb = fidelity.qed_hybrid(self.qed, params)
                only = fidelity.qed_only(self.qed, params)
                self.assertEqual(hyb.fidelity, only.fidelity)
                self.assertEqual(hyb.acceptance, only.acceptance)

    def test_branch_form_matches_qec(self):
        for p in rational_grid(5):
            for q in rational_grid(5):
                params = NoiseParams(p, Fraction(1), q)
                self.assertEqual(fidelity.f_qec_branches(self.wep, params), fidelity.f_qec(self.wep, params))

    def test_z_form_of_dd(self):
        for p in rational_grid():
            for d in rational_grid():
                z = p / (3 - 3 * p)
                self.assertEqual(fidelity.f_dd_z(z, d, 3), fidelity.f_dd_closed(p, d, 3))

    def test_noiseless_memory_is_perfect(self):
        for exact in (True, False):
            params = NoiseParams(Fraction(0) if exact else 0.0, Fraction(1, 2) if exact else 0.5)
            for strategy in ("dd_phys", "qec_only", "ldd_only", "hybrid"):
                self.assertEqual(fidelity.evaluate(strategy, params, self.wep, None, 1).fidelity, 1)
            for strategy in ("qed_only", "qed_hybrid", "qed_ldd_only"):
                self.assertEqual(fidelity.evaluate(strategy, params, None, self.qed, 1).fidelity, 1)

    def test_infidelity_keeps_precision_at_small_p(self):
        params = NoiseParams(1e-9, 0.5)

        eps = fidelity.infidelity_qec(self.wep, params)

        self.assertGreater(eps, 0)
        self.assertAlmostEqual(eps / (147 * params.z**2), 1, places=5)
        self.assertGreater(fidelity.infidelity_dd_closed(1e-17, 1.0, 1), 0)


class StrategyDispatchTest(unittest.TestCase):
    def test_missing_tables(self):
        params = NoiseParams(0.01)
        with self.assertRaises(LddCalculatorError):
            fidelity.evaluate("hybrid", params)
        with self.assertRaises(LddCalculatorError):
            fidelity.evaluate("qed_only", params, helpers.table("steane", "qec"))
        with self.assertRaises(LddCalculatorError):
            fidelity.evaluate("unknown", params)

    def test_physical_dd_needs_only_k(self):
        report = fidelity.evaluate("dd_phys", NoiseParams(0.1, 0.5), k=1)

        self.assertAlmostEqual(report.infidelity, 0.05 / (0.9 + 0.05))

    def test_qed_strategies_report_acceptance(self):
        qed = helpers.table("steane", "qed")
        report = fidelity.evaluate("qed_hybrid", NoiseParams(0.01, 0.5, 0, 0.1), None, qed)

        self.assertTrue(0 < report.acceptance < 1)
        self.assertEqual(fidelity.qed_ldd_only(qed, NoiseParams(0.01, 0.5)).acceptance, 1)


class HybridCriterionTest(unittest.TestCase):
    """Sign of F_hyb - F_qec at perfect recovery matches the sector-ratio criterion."""

    def check(self, wep, z, d):
        crit = fidelity.hyb_vs_qec_criterion(wep, z)
        params = NoiseParams(p_of_z(z), d, Fraction(0))
        eps_h = fidelity.infidelity_hybrid(wep, params, 1)
        eps_q = fidelity.infidelity_qec(wep, params, 1)
        self.assertEqual(eps_h < eps_q, crit.hybrid_wins)
        if crit.suppressed_ratio == crit.unsuppressed_ratio:
            self.assertEqual(eps_h, eps_q)

    def corpus(self):
        tables = [helpers.table("steane"), helpers.table("code13")]
        tables += [helpers.space("steane").table(helpers.steane_group(n)) for n in ("ldd_2084.dd", "ldd_665.dd", "ldd_72.dd")]
        return tables

    def test_corpus_tables(self):
        tables = self.corpus()
        zs = [Fraction(1, 10**e) for e in range(1, 7)]
        ds = [Fraction(0), Fraction(1, 3), Fraction(9, 10)]
        for wep in tables:
            for z in zs:
                for d in ds:
                    self.check(wep, z, d)

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.integers(min_value=0, max_value=50), min_size=2 * 4 * 4, max_size=2 * 4 * 4),
        st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(2)),
        st.fractions(min_value=0, max_value=Fraction(99, 100)),
    )
    def test_synthetic_tables(self, counts, z, d):
        cells = np.array(counts, dtype=np.int64).reshape(2, 4, 4)
        cells[0, 0, 0] += 1
        assume(cells[1].sum() > 0)
        wep = tables_from_cells(3, cells, "qec", 1)
        assume(horner(wep["S"], z) > 0)
        self.check(wep, z, d)

    def test_small_recovery_failure_keeps_the_advantage(self):
        q = Fraction(1, 10**6)
        checked = 0
        for wep in self.corpus():
            for z in (Fraction(1, 10**e) for e in range(1, 7)):
                for d in (Fraction(0), Fraction(1, 3), Fraction(9, 10)):
                    perfect = NoiseParams(p_of_z(z), d, Fraction(0))
                    if not fidelity.infidelity_hybrid(wep, perfect, 1) < fidelity.infidelity_qec(wep, perfect, 1):
                        continue
                    noisy = perfect.with_(p_qec=q)
                    self.assertLess(
                        fidelity.infidelity_hybrid(wep, noisy, 1), fidelity.infidelity_qec(wep, noisy, 1), (z, d)
                    )
                    checked += 1
        self.assertGreater(checked, 0)

    @settings(max_examples=1000, deadline=None)
    @given(
        st.fractions(min_value=0, max_value=10),
        st.fractions(min_value=0, max_value=10),
        st.fractions(min_value=Fraction(1, 100), max_value=10),
        st.fractions(min_value=Fraction(1, 100), max_value=10),
        st.fractions(min_value=0, max_value=Fraction(99, 100)),
    )
    def test_fraction_compare_matches_exact_ratios(self, A, B, C, D, t):
        self.assertEqual(fidelity.fraction_compare(A, B, C, D, t), (A + t * B) / (C + t * D) > (A + B) / (C + D))

    def test_fraction_compare(self):
        self.assertTrue(fidelity.fraction_compare(1, 1, 1, 3, Fraction(1, 2)))
        self.assertFalse(fidelity.fraction_compare(1, 3, 1, 1, Fraction(1, 2)))
        with self.assertRaises(DomainError):
            fidelity.fraction_compare(1, 1, 0, 1, 0)
        with self.assertRaises(DomainError):
            fidelity.fraction_compare(1, 1, 1, 1, 1)


class OrderingTest(unittest.TestCase):
    def test_steane_strategy_ordering(self):
        wep = helpers.table("steane")
        params = NoiseParams(1e-4, 0.01, 0.0)
        F = {s: fidelity.evaluate(s, params, wep, None, 1).fidelity for s in ("hybrid", "qec_only", "dd_phys", "ldd_only")}

        self.assertGreater(F["hybrid"], F["qec_only"])
        self.assertGreater(F["qec_only"], F["dd_phys"])
        self.assertGreater(F["dd_phys"], F["ldd_only"])

    def test_hybrid_beats_qec_across_the_plane(self):
        wep = helpers.table("steane")
        for d in np.linspace(0, 0.95, 20):
            for q in np.linspace(0, 1, 20):
                params = NoiseParams(1e-3, float(d), float(q))
                eps_h = fidelity.infidelity_hybrid(wep, params)
                eps_q = fidelity.infidelity_qec(wep, params)
                adv = fidelity.relative_advantage(eps_q, eps_h)
                self.assertGreater(adv.value, 0, (d, q))
                self.assertFalse(adv.degenerate)

    def test_code13_curves_meet_at_low_p(self):
        wep = helpers.table("code13")
        for d in (0.0, 0.5, 0.9):
            params = NoiseParams(1e-6, d, 0.0)
            ratio = fidelity.infidelity_hybrid(wep, params) / fidelity.infidelity_qec(wep, params)
            self.assertLess(abs(ratio - 1), 1e-2)

    def test_degenerate_advantage(self):
        self.assertTrue(math.isnan(fidelity.relative_advantage(0, 0).value))
        self.assertEqual(fidelity.relative_advantage(1e-3, 0), (math.inf, True))
        self.assertEqual(fidelity.relative_advantage(0, 1e-3), (-math.inf, True))
        self.assertAlmostEqual(fidelity.relative_advantage(1e-2, 1e-3).value, 1.0)


class QedDominanceTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        _, cls.qed = helpers.steane_logical_tables()

    def test_hybrid_detection_dominates_plain_detection(self):
        points = [(Fraction(1, 10**e), Fraction(d, 10)) for e in (2, 3, 4) for d in (1, 2, 5, 7, 9)]
        for z, d in points:
            params = NoiseParams(p_of_z(z), d)
            hyb = fidelity.qed_hybrid(self.qed, params)
            only = fidelity.qed_only(self.qed, params)
            self.assertGreater(hyb.fidelity, only.fidelity)
            self.assertTrue(fidelity.dominates(hyb.fidelity, hyb.acceptance, only.fidelity, only.acceptance, 1))

    def test_criterion(self):
        for z in (Fraction(1, 100), Fraction(1, 1000)):
            crit = fidelity.qed_criterion(self.qed, z)
            self.assertTrue(crit.fidelity_ok)
            self.assertTrue(crit.partial_order_ok)

    def test_qec_table_is_rejected(self):
        with self.assertRaises(LddCalculatorError):
            fidelity.qed_hybrid(helpers.table("steane", "qec"), NoiseParams(0.1))

    @settings(max_examples=500, deadline=None)
    @given(
        st.tuples(*[st.fractions(min_value=0, max_value=1, max_denominator=8) for _ in range(4)]),
        st.integers(min_value=1, max_value=3),
    )
    def test_dominance_is_antisymmetric(self, values, k):
        F1, PA1, F2, PA2 = values
        four_k = Fraction(1, 4**k)

        self.assertTrue(fidelity.dominates(F1, PA1, F1, PA1, k))
        if fidelity.dominates(F1, PA1, F2, PA2, k) and fidelity.dominates(F2, PA2, F1, PA1, k):
            self.assertEqual(F1, F2)
            self.assertEqual(PA1 * (F1 - four_k), PA2 * (F2 - four_k))


if __name__ == "__main__":
    unittest.main()
