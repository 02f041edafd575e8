from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ldd_calculator.config.constants import STRATEGIES, EngineLimits
from ldd_calculator.errors import LddCalculatorError
from ldd_calculator.models.code import (
    DecoderMap,
    DecouplingGroup,
    StabilizerCode,
    full_pauli_group,
    logical_label,
    syndrome_bits,
    trivial_code,
    trivial_decoder,
)
from ldd_calculator.models.pauli import LETTERS, PauliOperator, single_qubit
from ldd_calculator.services.fidelity import NoiseParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class McConfig:
    """
    Monte-Carlo run settings.

    Streams: `numpy.random.SeedSequence(seed).spawn(workers)`; worker i draws
    shots // workers (+1 for i < shots % workers) from child i, so results are
    reproducible for a fixed (seed, workers) pair.
    """

    shots: int
    seed: int
    strategy: str
    params: NoiseParams
    workers: int = 1

    def __post_init__(self):
        if self.shots < 1:
            raise LddCalculatorError("shots must be at least 1")
        if self.strategy not in STRATEGIES:
            raise LddCalculatorError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class McEstimate:
    f_hat: float
    f_stderr: float
    pa_hat: float
    pa_stderr: float
    shots_accepted: int
    shots: int

    def __str__(self):
        return f"<McEstimate F={self.f_hat:.6g}±{self.f_stderr:.2g} P_A={self.pa_hat:.6g}>"


class CycleOutcome(NamedTuple):
    accepted: bool
    logical_fault: bool


class _Tables:
    """Per-qubit syndrome / label / suppression contributions for vectorized draws."""

    def __init__(self, code: StabilizerCode, decoder: DecoderMap | None, dd: DecouplingGroup | None):
        n = code.n
        self.code = code
        self.syn = np.zeros((n, 4), dtype=np.int64)
        self.lab = np.zeros((n, 4), dtype=np.int64)
        self.pat = np.zeros((n, 4), dtype=np.int64)
        for q in range(n):
            for d in range(1, 4):
                P = single_qubit(n, q, LETTERS[d])
                self.syn[q, d] = syndrome_bits(code, P)
                self.lab[q, d] = logical_label(code, P)
                if dd is not None:
                    self.pat[q, d] = dd.pattern(P)
        self.rec_label = None
        if decoder is not None:
            self.rec_label = np.array([logical_label(code, R) for R in decoder.table], dtype=np.int64)
        self.columns = np.arange(n)[None, :]

    def combine(self, table: np.ndarray, digits: np.ndarray) -> np.ndarray:
        return np.bitwise_xor.reduce(table[self.columns, digits], axis=1)


def _draw_digits(rng: np.random.Generator, n: int, p: float, count: int) -> np.ndarray:
    probs = [1 - p, p / 3, p / 3, p / 3]
    return rng.choice(4, size=(count, n), p=probs)


def _sample(rng: np.random.Generator, tables: _Tables, p: float, p_dd: float, count: int):
    """Digits of `count` errors from the DD-rescaled model, by rejection of suppressed draws."""
    n = tables.code.n
    kept: list[np.ndarray] = []
    have = 0
    for _ in range(EngineLimits.rejection_cap):
        digits = _draw_digits(rng, n, p, count - have)
        suppressed = tables.combine(tables.pat, digits) != 0
        keep = ~suppressed | (rng.random(len(digits)) < p_dd)
        kept.append(digits[keep])
        have += int(keep.sum())
        if have >= count:
            return np.concatenate(kept)[:count]
    raise LddCalculatorError(
        f"rejection sampler exceeded {EngineLimits.rejection_cap} rounds (p={p}, p_dd={p_dd})"
    )


def _to_pauli(n: int, digits: np.ndarray) -> PauliOperator:
    x = z = 0
    for q, d in enumerate(digits):
        if d in (1, 2):
            x |= 1 << q
        if d in (2, 3):
            z |= 1 << q
    return PauliOperator(n, x, z)


def sample_error(
    rng: np.random.Generator,
    n: int,
    p: float,
    dd: DecouplingGroup | None = None,
    p_dd: float = 1.0,
) -> PauliOperator:
    for _ in range(EngineLimits.rejection_cap):
        E = _to_pauli(n, _draw_digits(rng, n, p, 1)[0])
        if dd is None or not dd.suppresses(E) or rng.random() < p_dd:
            return E
    raise LddCalculatorError(f"rejection sampler exceeded {EngineLimits.rejection_cap} rounds")


def _effective(strategy: str, params: NoiseParams) -> tuple[float, float, bool]:
    """(p_dd, p_qec, detection) actually used by a strategy."""
    p_dd, p_qec = float(params.p_dd), float(params.p_qec)
    match strategy:
        case "qec_only" | "qed_only":
            p_dd = 1.0
        case "ldd_only" | "qed_ldd_only":
            p_qec = 1.0
    return p_dd, p_qec, strategy in ("qed_only", "qed_hybrid")


def _run_batch(
    rng: np.random.Generator, tables: _Tables, strategy: str, params: NoiseParams, shots: int
) -> tuple[np.ndarray, np.ndarray]:
    p_dd, p_qec, detection = _effective(strategy, params)
    digits = _sample(rng, tables, float(params.p), p_dd, shots)
    syn = tables.combine(tables.syn, digits)
    lab = tables.combine(tables.lab, digits)
    k, r = tables.code.k, tables.code.r
    # a decoder failure (or an accepted detected error) leaves a uniform logical class
    random_fault = rng.integers(0, 4**k, shots) != 0
    if detection:
        correct = rng.random(shots) >= float(params.p_qed)
        reported = np.where(correct, syn, rng.integers(0, 2**r, shots))
        accepted = reported == 0
        fault = np.where(syn != 0, random_fault, lab != 0) & accepted
        return accepted, fault
    failed = rng.random(shots) < p_qec
    decoded = tables.rec_label[syn] != lab
    fault = np.where(syn != 0, np.where(failed, random_fault, decoded), lab != 0)
    return np.ones(shots, dtype=bool), fault


def _bundle_for(strategy: str, code: StabilizerCode, decoder: DecoderMap, dd: DecouplingGroup):
    if strategy == "dd_phys":
        bare = trivial_code(code.k)
        return bare, trivial_decoder(bare), full_pauli_group(code.k)
    if strategy in ("qec_only", "qed_only"):
        return code, decoder, None
    return code, decoder, dd


def run_cycle(
    rng: np.random.Generator,
    code: StabilizerCode,
    decoder: DecoderMap,
    dd: DecouplingGroup,
    strategy: str,
    params: NoiseParams,
) -> CycleOutcome:
    tables = _Tables(*_bundle_for(strategy, code, decoder, dd))
    accepted, fault = _run_batch(rng, tables, strategy, params, 1)
    return CycleOutcome(bool(accepted[0]), bool(fault[0]))


def _tally(rng: np.random.Generator, tables: _Tables, config: McConfig, shots: int) -> tuple[int, int]:
    accepted = faults = 0
    done = 0
    while done < shots:
        m = min(EngineLimits.mc_batch, shots - done)
        acc, fault = _run_batch(rng, tables, config.strategy, config.params, m)
        accepted += int(acc.sum())
        faults += int(fault.sum())
        done += m
    return accepted, faults


def estimate(
    config: McConfig, code: StabilizerCode, decoder: DecoderMap, dd: DecouplingGroup
) -> McEstimate:
    tables = _Tables(*_bundle_for(config.strategy, code, decoder, dd))
    workers = max(1, config.workers)
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(workers)]
    shares = [config.shots // workers + (i < config.shots % workers) for i in range(workers)]
    if workers == 1:
        results = [_tally(streams[0], tables, config, shares[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _tally(streams[i], tables, config, shares[i]), range(workers)))
    accepted = sum(a for a, _ in results)
    faults = sum(f for _, f in results)
    shots = config.shots
    pa = accepted / shots
    pa_err = math.sqrt(pa * (1 - pa) / shots)
    if accepted == 0:
        logger.warning("%s: no shot was accepted out of %d", config.strategy, shots)
        return McEstimate(math.nan, math.nan, pa, pa_err, 0, shots)
    f = 1 - faults / accepted
    return McEstimate(f, math.sqrt(f * (1 - f) / accepted), pa, pa_err, accepted, shots)
