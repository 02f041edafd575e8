from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import NamedTuple

from ldd_calculator.config.constants import QED_STRATEGIES, STRATEGIES
from ldd_calculator.errors import DomainError, LddCalculatorError, PreconditionError
from ldd_calculator.services.wep import WepTable
from ldd_calculator.utils.math_utils import Number, as_exact, horner, lincomb

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseParams:
    """
    Error-model parameters. `z` is always derived from `p`.
    Passing Fractions selects exact rational evaluation everywhere.
    """

    p: Number
    p_dd: Number = 1
    p_qec: Number = 0
    p_qed: Number = 0

    def __post_init__(self):
        if not 0 <= self.p < 1:
            raise DomainError("p", self.p, "[0, 1)")
        for name in ("p_dd", "p_qec", "p_qed"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise DomainError(name, value, "[0, 1]")

    @property
    def exact(self) -> bool:
        return isinstance(self.p, Fraction)

    @property
    def z(self) -> Number:
        return self.p / (3 - 3 * self.p)

    def with_(self, **changes) -> "NoiseParams":
        return replace(self, **changes)

    def as_exact(self) -> "NoiseParams":
        return NoiseParams(as_exact(self.p), as_exact(self.p_dd), as_exact(self.p_qec), as_exact(self.p_qed))


@dataclass(frozen=True)
class FidelityReport:
    strategy: str
    fidelity: Number
    infidelity: Number
    acceptance: Number | None = None
    weight: Number | None = None

    def __str__(self):
        text = f"<FidelityReport {self.strategy} F={float(self.fidelity):.12g}"
        if self.acceptance is not None:
            text += f" P_A={float(self.acceptance):.12g}"
        return text + ">"


class ClosedForm(NamedTuple):
    """A ratio of z-polynomials given by coefficient lists."""

    num: list
    den: list

    def value(self, z: Number) -> Number:
        den = horner(self.den, z)
        assert den > 0, "closed-form denominator vanished"
        return horner(self.num, z) / den


def _scalars(exact: bool, k: int, n: int | None = None):
    if exact:
        four_k = Fraction(1, 4**k)
        two_kn = Fraction(2**k, 2**n) if n is not None else None
    else:
        four_k = 4.0**-k
        two_kn = 2.0 ** (k - n) if n is not None else None
    return four_k, two_kn


def _k_of(wep: WepTable, k: int | None) -> int:
    k = wep.k if k is None else k
    if k is None:
        raise LddCalculatorError("logical qubit count k is unknown for this table")
    return k


def _one(params: NoiseParams):
    return Fraction(1) if params.exact else 1.0


def hybrid_form(wep: WepTable, params: NoiseParams, k: int | None = None) -> ClosedForm:
    k = _k_of(wep, k)
    four_k, _ = _scalars(params.exact, k)
    d, q, L = params.p_dd, params.p_qec, wep.n + 1
    num = lincomb(
        [
            (_one(params), wep["notS-notC"]),
            (q, wep["notS-C"]),
            (-q * four_k, wep["notS-D"]),
            (d, wep["S-notC"]),
            (d * q, wep["S-C"]),
            (-d * q * four_k, wep["S-D"]),
        ],
        L,
    )
    den = lincomb([(_one(params), wep["notS"]), (d, wep["S"])], L)
    return ClosedForm(num, den)


def qec_form(wep: WepTable, params: NoiseParams, k: int | None = None) -> ClosedForm:
    k = _k_of(wep, k)
    four_k, _ = _scalars(params.exact, k)
    q, L = params.p_qec, wep.n + 1
    num = lincomb([(_one(params), wep["notC"]), (q, wep["C"]), (-q * four_k, wep["D"])], L)
    return ClosedForm(num, lincomb([(_one(params), wep["A"])], L))


def qec_branch_form(wep: WepTable, params: NoiseParams, k: int | None = None) -> ClosedForm:
    """Sum over the four decoding branches: logical, detected-and-miscorrected, decoder failure."""
    k = _k_of(wep, k)
    four_k, _ = _scalars(params.exact, k)
    q, L, one = params.p_qec, wep.n + 1, _one(params)
    num = lincomb(
        [
            (one, wep["L"]),
            (one - q, wep["notC-D"]),
            (q * (one - four_k), wep["C"]),
            (q * (one - four_k), wep["notC-D"]),
        ],
        L,
    )
    return ClosedForm(num, lincomb([(one, wep["A"])], L))


def ldd_form(wep: WepTable, params: NoiseParams, k: int | None = None) -> ClosedForm:
    k = _k_of(wep, k)
    four_k, _ = _scalars(params.exact, k)
    d, L, one = params.p_dd, wep.n + 1, _one(params)
    num = lincomb(
        [
            (one, wep["notS-SlashedSt"]),
            (-four_k, wep["notS-D"]),
            (d, wep["S-SlashedSt"]),
            (-d * four_k, wep["S-D"]),
        ],
        L,
    )
    den = lincomb([(one, wep["notS"]), (d, wep["S"])], L)
    return ClosedForm(num, den)


def dd_general_form(wep: WepTable, params: NoiseParams) -> ClosedForm:
    d, L, one = params.p_dd, wep.n + 1, _one(params)
    num = lincomb([(one, wep["notS-SlashedSt"]), (d, wep["S-SlashedSt"])], L)
    den = lincomb([(one, wep["notS"]), (d, wep["S"])], L)
    return ClosedForm(num, den)


def _qed_forms(wep: WepTable, params: NoiseParams, k: int | None, merged: bool):
    """(infidelity form N/Q, acceptance form Q/norm) for QED with or without DD."""
    if wep.setting != "qed":
        raise LddCalculatorError("QED strategies need a QED-setting table")
    k = _k_of(wep, k)
    four_k, two_kn = _scalars(params.exact, k, wep.n)
    one, L, e = _one(params), wep.n + 1, params.p_qed
    d = one if merged else params.p_dd

    def sector(unsup: str, sup: str, whole: str, scale):
        if merged:
            return [(scale, wep[whole])]
        return [(scale, wep[unsup]), (scale * d, wep[sup])]

    Q = lincomb(
        sector("notS-StL", "S-StL", "StL", one - e) + sector("notS", "S", "A", two_kn * e), L
    )
    N = lincomb(
        sector("notS-L", "S-L", "L", one - e * (one - two_kn))
        + sector("notS-D", "S-D", "D", (one - four_k) * two_kn * e),
        L,
    )
    norm = lincomb(sector("notS", "S", "A", one), L)
    return ClosedForm(N, Q), ClosedForm(Q, norm)


def qed_hybrid_forms(wep: WepTable, params: NoiseParams, k: int | None = None):
    return _qed_forms(wep, params, k, merged=False)


def qed_only_forms(wep: WepTable, params: NoiseParams, k: int | None = None):
    return _qed_forms(wep, params, k, merged=True)


def _report(strategy: str, eps: Number, acceptance=None, weight=None) -> FidelityReport:
    return FidelityReport(strategy, 1 - eps, eps, acceptance, weight)


def infidelity_dd_closed(p: Number, p_dd: Number, k: int) -> Number:
    if not 0 <= p < 1:
        raise DomainError("p", p, "[0, 1)")
    if not 0 <= p_dd <= 1:
        raise DomainError("p_dd", p_dd, "[0, 1]")
    if k < 1:
        raise DomainError("k", k, "k >= 1")
    if isinstance(p, Fraction):
        survive = (1 - p) ** k
        hit = 1 - survive
    else:
        survive = math.exp(k * math.log1p(-p))
        hit = -math.expm1(k * math.log1p(-p))
    return p_dd * hit / (survive + p_dd * hit)


def f_dd_closed(p: Number, p_dd: Number, k: int) -> Number:
    return 1 - infidelity_dd_closed(p, p_dd, k)


def f_dd_z(z: Number, p_dd: Number, k: int) -> Number:
    """DD-only fidelity written in z: 1 / (1 + p_dd((1+3z)^k - 1))."""
    return 1 / (1 + p_dd * ((1 + 3 * z) ** k - 1))


def infidelity_dd_general(wep: WepTable, params: NoiseParams) -> Number:
    return dd_general_form(wep, params).value(params.z)


def f_dd_general(wep: WepTable, params: NoiseParams) -> Number:
    return 1 - infidelity_dd_general(wep, params)


def infidelity_hybrid(wep: WepTable, params: NoiseParams, k: int | None = None) -> Number:
    return hybrid_form(wep, params, k).value(params.z)


def f_hybrid(wep: WepTable, params: NoiseParams, k: int | None = None) -> Number:
    return 1 - infidelity_hybrid(wep, params, k)


def infidelity_qec(wep: WepTable, params: NoiseParams, k: int | None = None) -> Number:
    return qec_form(wep, params, k).value(params.z)


def f_qec(wep: WepTable, params: NoiseParams, k: int | None = None) -> Number:
    return 1 - infidelity_qec(wep, params, k)


def f_qec_branches(wep: WepTable, params: NoiseParams, k: int | None = None) -> Number:
    return 1 - qec_branch_form(wep, params, k).value(params.z)


def infidelity_ldd(wep: WepTable, params: NoiseParams, k: int | None = None) -> Number:
    return ldd_form(wep, params, k).value(params.z)


def f_ldd(wep: WepTable, params: NoiseParams, k: int | None = None) -> Number:
    return 1 - infidelity_ldd(wep, params, k)


def qed_hybrid(wep: WepTable, params: NoiseParams, k: int | None = None) -> FidelityReport:
    infid, accept = qed_hybrid_forms(wep, params, k)
    return _qed_report("qed_hybrid", infid, accept, params.z)


def qed_only(wep: WepTable, params: NoiseParams, k: int | None = None) -> FidelityReport:
    infid, accept = qed_only_forms(wep, params, k)
    return _qed_report("qed_only", infid, accept, params.z)


def _qed_report(strategy: str, infid: ClosedForm, accept: ClosedForm, z: Number) -> FidelityReport:
    weight = horner(accept.num, z)
    if weight <= 0:
        raise PreconditionError(f"{strategy}: acceptance weight Q vanished, no run is ever accepted")
    return _report(strategy, horner(infid.num, z) / weight, accept.value(z), weight)


def qed_ldd_only(wep: WepTable, params: NoiseParams, k: int | None = None) -> FidelityReport:
    return _report("qed_ldd_only", infidelity_ldd(wep, params, k), _one(params))


def evaluate(
    strategy: str,
    params: NoiseParams,
    wep: WepTable | None = None,
    wep_qed: WepTable | None = None,
    k: int | None = None,
) -> FidelityReport:
    """Dispatches one strategy to its closed form; QED strategies read `wep_qed`."""
    if strategy not in STRATEGIES:
        raise LddCalculatorError(f"unknown strategy {strategy!r}")
    if strategy in QED_STRATEGIES and wep_qed is None:
        raise LddCalculatorError(f"{strategy} needs a QED-setting table")
    if strategy not in QED_STRATEGIES and strategy != "dd_phys" and wep is None:
        raise LddCalculatorError(f"{strategy} needs a QEC-setting table")
    match strategy:
        case "dd_phys":
            source = wep if wep is not None else wep_qed
            kk = k if k is not None else (source.k if source is not None else None)
            if kk is None:
                raise LddCalculatorError("dd_phys needs k")
            return _report(strategy, infidelity_dd_closed(params.p, params.p_dd, kk))
        case "qec_only":
            return _report(strategy, infidelity_qec(wep, params, k))
        case "ldd_only":
            return _report(strategy, infidelity_ldd(wep, params, k))
        case "hybrid":
            return _report(strategy, infidelity_hybrid(wep, params, k))
        case "qed_only":
            return qed_only(wep_qed, params, k)
        case "qed_hybrid":
            return qed_hybrid(wep_qed, params, k)
        case "qed_ldd_only":
            return qed_ldd_only(wep_qed, params, k)


class HybridCriterion(NamedTuple):
    suppressed_ratio: Number
    unsuppressed_ratio: Number
    hybrid_wins: bool


def hyb_vs_qec_criterion(wep: WepTable, z: Number) -> HybridCriterion:
    """Hybrid beats QEC-only at perfect recovery iff the suppressed sector is the worse one."""
    if z <= 0:
        raise DomainError("z", z, "(0, inf)")
    s = horner(wep["S"], z)
    u = horner(wep["notS"], z)
    if s <= 0 or u <= 0:
        raise PreconditionError("S(z) and notS(z) must both be positive")
    s_fail = horner(wep["S-notC"], z)
    u_fail = horner(wep["notS-notC"], z)
    return HybridCriterion(s_fail / s, u_fail / u, s_fail * u > u_fail * s)


def fraction_compare(A: Number, B: Number, C: Number, D: Number, t: Number) -> bool:
    """f(t) > f(1) for f(t) = (A + tB)/(C + tD)."""
    if C <= 0 or D <= 0:
        raise DomainError("C, D", (C, D), "positive reals")
    if not 0 <= t < 1:
        raise DomainError("t", t, "[0, 1)")
    # cross-multiplied; both denominators are positive
    return (A + t * B) * (C + D) > (A + B) * (C + t * D)


class QedCriterion(NamedTuple):
    fidelity_ok: bool
    partial_order_ok: bool


def qed_criterion(wep: WepTable, z: Number, k: int | None = None) -> QedCriterion:
    if z <= 0:
        raise DomainError("z", z, "(0, inf)")
    k = _k_of(wep, k)
    four_k, _ = _scalars(isinstance(z, Fraction), k)
    ev = {t: horner(wep[t], z) for t in ("notS", "S", "notS-L", "S-L", "notS-StL", "S-StL", "notS-St", "S-St")}
    if min(ev["notS"], ev["S"], ev["notS-StL"], ev["S-StL"]) <= 0:
        raise PreconditionError("QED criterion needs positive sector weights")
    fidelity_ok = ev["notS-L"] * ev["S-StL"] <= ev["S-L"] * ev["notS-StL"]
    lhs = (ev["notS-St"] - four_k * ev["notS-StL"]) * ev["S"]
    rhs = (ev["S-St"] - four_k * ev["S-StL"]) * ev["notS"]
    return QedCriterion(fidelity_ok, fidelity_ok and lhs >= rhs)


def dominates(F1: Number, PA1: Number, F2: Number, PA2: Number, k: int) -> bool:
    """Partial order on (fidelity, acceptance) pairs."""
    four_k = Fraction(1, 4**k) if isinstance(F1, Fraction) else 4.0**-k
    return F1 >= F2 and PA1 * (F1 - four_k) >= PA2 * (F2 - four_k)


class Advantage(NamedTuple):
    value: float
    degenerate: bool


def relative_advantage(eps_comp: Number, eps_hyb: Number) -> Advantage:
    """log10(eps_comp / eps_hyb); degenerate infidelities give a signed infinity (or nan)."""
    if eps_comp > 0 and eps_hyb > 0:
        ratio = eps_comp / eps_hyb
        return Advantage(math.log10(ratio), False)
    if eps_comp > 0:
        return Advantage(math.inf, True)
    if eps_hyb > 0:
        return Advantage(-math.inf, True)
    return Advantage(math.nan, True)
