from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import NamedTuple

from ldd_calculator.errors import PreconditionError
from ldd_calculator.models.code import (
    DecoderMap,
    DecouplingGroup,
    StabilizerCode,
    code_distance,
    dress_generator,
    logical_label,
    spans_logical_group,
    syndrome_bits,
)
from ldd_calculator.models.pauli import PauliOperator, commutes, pauli_index, paulis_of_weight
from ldd_calculator.services import fidelity
from ldd_calculator.services.fidelity import NoiseParams
from ldd_calculator.services.wep import PauliSpace, WepTable
from ldd_calculator.utils.math_utils import log_space, series_divide

logger = logging.getLogger(__name__)


def _first_nonzero(vector: list[int]) -> int | None:
    for w, c in enumerate(vector):
        if c:
            return w
    return None


class QecAsymptotics(NamedTuple):
    alpha: int
    a_count: int
    b_qec: Fraction


def qec_asymptotics(wep: WepTable, k: int | None = None) -> QecAsymptotics:
    k = wep.k if k is None else k
    notc = wep["notC"]
    alpha = _first_nonzero(notc)
    assert alpha is not None, "notC is identically zero"
    b = Fraction(wep["C"][1]) - Fraction(wep["D"][1], 4**k)
    if alpha == 1:
        logger.info("alpha = 1: some weight-1 error is uncorrectable, b_qec=%s not bounded", b)
    return QecAsymptotics(alpha, notc[alpha], b)


class SuppressedAsymptotics(NamedTuple):
    beta: int
    B_count: int


def suppressed_asymptotics(wep: WepTable) -> SuppressedAsymptotics:
    vector = wep["S-notC"]
    beta = _first_nonzero(vector)
    if beta is None:
        raise PreconditionError(
            "no suppressed uncorrectable error exists: the decoupling group and decoder are inconsistent"
        )
    return SuppressedAsymptotics(beta, vector[beta])


@dataclass(frozen=True)
class WeightOneCounts:
    """Weight-1 Paulis in the stabilizer group, in stabilizers-times-logicals, and their unsuppressed complements."""

    total: int
    stabilizers: int
    stabilizers_logicals: int
    unsuppressed_not_stabilizers: int
    unsuppressed_not_stabilizers_logicals: int


def weight_one_counts(code: StabilizerCode, dd: DecouplingGroup | None = None) -> WeightOneCounts:
    st = stl = u_st = u_stl = 0
    for E in paulis_of_weight(code.n, 1):
        zero = syndrome_bits(code, E) == 0
        in_st = zero and logical_label(code, E) == 0
        unsup = dd is None or not dd.suppresses(E)
        st += in_st
        stl += zero
        u_st += unsup and not in_st
        u_stl += unsup and not zero
    return WeightOneCounts(3 * code.n, st, stl, u_st, u_stl)


def ldd_linear_coeffs(code: StabilizerCode, dd: DecouplingGroup) -> tuple[Fraction, Fraction]:
    w1 = weight_one_counts(code, dd)
    four_k = Fraction(1, 4**code.k)
    ldd_a = w1.unsuppressed_not_stabilizers - four_k * w1.unsuppressed_not_stabilizers_logicals
    ldd_b = (w1.total - w1.stabilizers) - four_k * (w1.total - w1.stabilizers_logicals)
    if w1.stabilizers_logicals == w1.stabilizers:
        # no weight-1 logicals (distance >= 2): the factored forms must agree
        assert ldd_a == (1 - four_k) * w1.unsuppressed_not_stabilizers
        assert ldd_b == (1 - four_k) * (w1.total - w1.stabilizers)
    return ldd_a, ldd_b


def weight_alpha_uncorrectables(
    code: StabilizerCode, decoder: DecoderMap, alpha: int
) -> list[PauliOperator]:
    """Uncorrectable errors of weight `alpha`, in enumeration-index order."""
    rec = [logical_label(code, R) for R in decoder.table]
    found = [
        E
        for E in paulis_of_weight(code.n, alpha)
        if rec[syndrome_bits(code, E)] != logical_label(code, E)
    ]
    return sorted(found, key=pauli_index)


@dataclass
class Theorem3Report:
    alpha: int
    beta: int
    part1: bool
    part2_applicable: bool | None = None
    distance: int | None = None
    part3_alpha_bound: bool | None = None
    part3_nonzero_syndrome: bool | None = None
    part4_applicable: bool | None = None
    part4_nonzero_syndrome: bool | None = None

    def to_json(self) -> dict:
        return asdict(self)


def theorem3_report(
    code: StabilizerCode, decoder: DecoderMap, dd: DecouplingGroup, wep: WepTable
) -> Theorem3Report:
    alpha, _, _ = qec_asymptotics(wep, code.k)
    beta, _ = suppressed_asymptotics(wep)
    report = Theorem3Report(alpha, beta, beta == alpha)
    if report.part1:
        return report
    errors = weight_alpha_uncorrectables(code, decoder, alpha)
    nonzero = [syndrome_bits(code, E) != 0 for E in errors]
    report.part2_applicable = beta > alpha and any(nonzero)
    d = code_distance(code)
    report.distance = d
    if d >= 2:
        report.part3_alpha_bound = alpha <= math.ceil(d / 2)
        report.part3_nonzero_syndrome = all(nonzero)
    report.part4_applicable = spans_logical_group(code, dd) and beta > alpha
    if report.part4_applicable:
        report.part4_nonzero_syndrome = all(nonzero)
    return report


@dataclass
class DressingResult:
    group: DecouplingGroup
    error: PauliOperator
    stabilizer: PauliOperator
    index: int
    beta: int
    wep: WepTable


def find_dressing(
    code: StabilizerCode,
    decoder: DecoderMap,
    dd: DecouplingGroup,
    wep: WepTable,
    space: PauliSpace | None = None,
    workers: int = 1,
) -> DressingResult | None:
    """
    Multiplies one DD generator by a stabilizer so that a weight-alpha
    uncorrectable error becomes suppressed. None when every weight-alpha
    uncorrectable error has zero syndrome.
    """
    alpha, _, _ = qec_asymptotics(wep, code.k)
    beta, _ = suppressed_asymptotics(wep)
    if beta <= alpha:
        raise PreconditionError(f"dressing needs beta > alpha, got beta={beta}, alpha={alpha}")
    target = None
    for E in weight_alpha_uncorrectables(code, decoder, alpha):
        bits = syndrome_bits(code, E)
        if bits:
            target, target_bits = E, bits
            break
    if target is None:
        logger.info("all weight-%d uncorrectable errors are logicals; no dressing exists", alpha)
        return None
    position = (target_bits & -target_bits).bit_length() - 1
    S = code.stabilizers[position]
    index = next((i for i, g in enumerate(dd.generators) if commutes(g, target)), None)
    if index is None:
        raise PreconditionError(f"no DD generator commutes with {target}")
    dressed = dress_generator(dd, index, S)
    space = space or PauliSpace(code, decoder)
    new_wep = space.table(dressed, workers=workers)
    new_beta, _ = suppressed_asymptotics(new_wep)
    logger.info("dressed generator %d by %s (error %s): beta %d -> %d", index, S, target, beta, new_beta)
    assert new_beta == alpha, "dressing did not lower beta to alpha"
    return DressingResult(dressed, target, S, index, new_beta, new_wep)


def _form(wep: WepTable, strategy: str, params: NoiseParams, k: int | None):
    match strategy:
        case "hybrid":
            return fidelity.hybrid_form(wep, params, k)
        case "qec_only":
            return fidelity.qec_form(wep, params, k)
        case "ldd_only" | "qed_ldd_only":
            return fidelity.ldd_form(wep, params, k)
        case "dd_phys":
            return fidelity.dd_general_form(wep, params)
        case "qed_only":
            return fidelity.qed_only_forms(wep, params, k)[0]
        case "qed_hybrid":
            return fidelity.qed_hybrid_forms(wep, params, k)[0]
        case _:
            raise PreconditionError(f"no closed form for strategy {strategy!r}")


def series_infidelity(
    wep: WepTable,
    strategy: str,
    p_dd: Fraction,
    p_qec: Fraction,
    order: int,
    p_qed: Fraction = Fraction(0),
    k: int | None = None,
) -> list[Fraction]:
    """Exact z-series coefficients 0..order of 1 - F for one strategy."""
    if order > wep.n:
        raise PreconditionError(f"order {order} exceeds n={wep.n}")
    params = NoiseParams(Fraction(0), Fraction(p_dd), Fraction(p_qec), Fraction(p_qed))
    form = _form(wep, strategy, params, k)
    return series_divide(form.num, form.den, order)


class AffineCoeff(NamedTuple):
    intercept: Fraction
    slope: Fraction
    affine: bool


def affine_series(
    wep: WepTable, strategy: str, parameter: str, order: int, **fixed: Fraction
) -> list[AffineCoeff]:
    """Series coefficients as affine functions of one parameter (fit at 0 and 1, checked at 1/2)."""
    values = {}
    for t in (Fraction(0), Fraction(1, 2), Fraction(1)):
        args = {"p_dd": Fraction(1), "p_qec": Fraction(0), "p_qed": Fraction(0), **fixed, parameter: t}
        values[t] = series_infidelity(wep, strategy, args["p_dd"], args["p_qec"], order, args["p_qed"])
    out = []
    for i in range(order + 1):
        c0, ch, c1 = values[Fraction(0)][i], values[Fraction(1, 2)][i], values[Fraction(1)][i]
        out.append(AffineCoeff(c0, c1 - c0, ch == (c0 + c1) / 2))
    return out


class QedAsymptotics(NamedTuple):
    d: int
    qed_a: int
    qed_linear_coeff: Fraction


def qed_asymptotics(code: StabilizerCode, wep_qed: WepTable, k: int | None = None) -> QedAsymptotics:
    k = code.k if k is None else k
    d = _first_nonzero(wep_qed["L"])
    if d is None or d < 2:
        raise PreconditionError(f"QED asymptotics need distance >= 2, got {d}")
    w1 = weight_one_counts(code)
    coeff = (1 - Fraction(1, 4**k)) * Fraction(2**k, 2**code.n) * (3 * code.n - w1.stabilizers)
    return QedAsymptotics(d, wep_qed["L"][d], coeff)


def qed_rejection_coeffs(code: StabilizerCode) -> tuple[Fraction, int]:
    """Leading rejection terms: coefficient of p_qed and of z."""
    w1 = weight_one_counts(code)
    return 1 - Fraction(2**code.k, 2**code.n), 3 * code.n - w1.stabilizers


class AdvantageThreshold(NamedTuple):
    p0: float
    z0: float
    certified: bool


def _p_of_z(z: float) -> float:
    return 3 * z / (1 + 3 * z)


def find_advantage_threshold(
    wep: WepTable,
    p_dd_values: tuple[float, ...] = (0.0, 0.5, 0.9),
    z_min: float = 1e-8,
    z_max: float = 1.0,
    checks: int = 20,
) -> AdvantageThreshold | None:
    """
    Largest z (found by bisection) below which the hybrid criterion holds,
    certified by direct fidelity comparisons at log-spaced points for each p_dd.
    """

    def wins(z: float) -> bool:
        return fidelity.hyb_vs_qec_criterion(wep, z).hybrid_wins

    if not wins(z_min):
        return None
    good, bad = z_min, None
    for z in log_space(z_min, z_max, int(round(math.log10(z_max / z_min))) + 1)[1:]:
        if wins(z):
            good = z
        else:
            bad = z
            break
    if bad is not None:
        lo, hi = math.log10(good), math.log10(bad)
        for _ in range(60):
            mid = (lo + hi) / 2
            if wins(10**mid):
                lo = mid
            else:
                hi = mid
        good = 10**lo
    points = log_space(z_min, good, checks)
    if bad is not None:
        # the bisection endpoint sits on the crossing itself
        points = points[:-1]
    certified = True
    for z in points:
        for p_dd in p_dd_values:
            params = NoiseParams(_p_of_z(z), p_dd, 0.0)
            if not fidelity.infidelity_hybrid(wep, params) < fidelity.infidelity_qec(wep, params):
                certified = False
    return AdvantageThreshold(_p_of_z(good), good, certified)


@dataclass
class AsymptoticsReport:
    alpha: int
    a_count: int
    beta: int
    B_count: int
    b_qec: Fraction
    ldd_a: Fraction
    ldd_b: Fraction
    criterion_part1: bool
    dressing_available: bool
    qed_d: int | None = None
    qed_a: int | None = None
    qed_linear_coeff: Fraction | None = None
    theorem3: Theorem3Report | None = None

    def to_json(self) -> dict:
        data = asdict(self)
        data["theorem3"] = self.theorem3.to_json() if self.theorem3 else None
        return data


def asymptotics_report(
    code: StabilizerCode,
    decoder: DecoderMap,
    dd: DecouplingGroup,
    wep: WepTable,
    wep_qed: WepTable | None = None,
) -> AsymptoticsReport:
    alpha, a_count, b_qec = qec_asymptotics(wep, code.k)
    beta, B_count = suppressed_asymptotics(wep)
    ldd_a, ldd_b = ldd_linear_coeffs(code, dd)
    t3 = theorem3_report(code, decoder, dd, wep)
    report = AsymptoticsReport(
        alpha, a_count, beta, B_count, b_qec, ldd_a, ldd_b,
        criterion_part1=t3.part1,
        dressing_available=bool(t3.part2_applicable),
        theorem3=t3,
    )
    if wep_qed is not None:
        try:
            report.qed_d, report.qed_a, report.qed_linear_coeff = qed_asymptotics(code, wep_qed)
        except PreconditionError as e:
            logger.info("skipping QED asymptotics: %s", e)
    return report
