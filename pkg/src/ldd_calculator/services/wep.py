from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Callable

import numpy as np

from ldd_calculator.config.constants import QED_TAGS, QEC_TAGS, EngineLimits
from ldd_calculator.errors import BudgetExceededError, LddCalculatorError, PauliError
from ldd_calculator.models.code import (
    DecoderMap,
    DecouplingGroup,
    StabilizerCode,
    logical_label,
    syndrome_bits,
)
from ldd_calculator.models.pauli import LETTERS, single_qubit
from ldd_calculator.utils.math_utils import horner

logger = logging.getLogger(__name__)

# Error classes of the enumeration; every Pauli lands in exactly one.
STAB, CORRECTED, LOGICAL, DETECTED_FAIL = 0, 1, 2, 3


@dataclass
class WepTable:
    """Integer weight-enumerator coefficients (index = weight) for every tag of one setting."""

    n: int
    setting: str
    coeffs: dict[str, list[int]]
    k: int | None = None

    def __getitem__(self, tag: str) -> list[int]:
        try:
            return self.coeffs[tag]
        except KeyError:
            raise LddCalculatorError(f"{self.setting} table has no tag {tag!r}") from None

    def __contains__(self, tag: str) -> bool:
        return tag in self.coeffs

    def __str__(self):
        return f"<WepTable n={self.n} {self.setting}>"

    def __repr__(self):
        return self.__str__()

    def to_json(self) -> dict:
        data = {"n": self.n, "setting": self.setting, "coeffs": {t: list(v) for t, v in self.coeffs.items()}}
        if self.k is not None:
            data["k"] = self.k
        return data

    @classmethod
    def from_json(cls, data: dict) -> "WepTable":
        return cls(
            int(data["n"]),
            data["setting"],
            {t: [int(c) for c in v] for t, v in data["coeffs"].items()},
            data.get("k"),
        )


def _add(*vectors):
    return [sum(parts) for parts in zip(*vectors)]


def tables_from_cells(n: int, cells: np.ndarray, setting: str, k: int | None = None) -> WepTable:
    """Derives all tags from the (suppressed, class, weight) cell counts."""
    c = [[[int(v) for v in cells[s, cls]] for cls in range(4)] for s in range(2)]
    U, S = c[0], c[1]
    st = _add(U[STAB], S[STAB])
    lg = _add(U[LOGICAL], S[LOGICAL])
    nots = _add(*U)
    sup = _add(*S)
    out: dict[str, list[int]] = {
        "A": _add(nots, sup),
        "S": sup,
        "notS": nots,
        "St": st,
        "L": lg,
        "notS-St": U[STAB],
        "S-St": S[STAB],
    }
    if setting == "qec":
        out.update(
            {
                "SlashedSt": _add(U[CORRECTED], U[LOGICAL], U[DETECTED_FAIL], S[CORRECTED], S[LOGICAL], S[DETECTED_FAIL]),
                "C": _add(U[CORRECTED], S[CORRECTED]),
                "notC": _add(lg, U[DETECTED_FAIL], S[DETECTED_FAIL]),
                "D": _add(U[CORRECTED], S[CORRECTED], U[DETECTED_FAIL], S[DETECTED_FAIL]),
                "notS-notC": _add(U[LOGICAL], U[DETECTED_FAIL]),
                "notS-C": U[CORRECTED],
                "S-notC": _add(S[LOGICAL], S[DETECTED_FAIL]),
                "S-C": S[CORRECTED],
                "notS-D": _add(U[CORRECTED], U[DETECTED_FAIL]),
                "S-D": _add(S[CORRECTED], S[DETECTED_FAIL]),
                "notC-D": _add(U[DETECTED_FAIL], S[DETECTED_FAIL]),
                "S-SlashedSt": _add(S[CORRECTED], S[LOGICAL], S[DETECTED_FAIL]),
                "notS-SlashedSt": _add(U[CORRECTED], U[LOGICAL], U[DETECTED_FAIL]),
            }
        )
        tags = QEC_TAGS
    else:
        # without a decoder the corrected class is empty and D = DETECTED_FAIL
        out.update(
            {
                "StL": _add(st, lg),
                "D": _add(U[DETECTED_FAIL], S[DETECTED_FAIL]),
                "SlashedSt": _add(lg, U[DETECTED_FAIL], S[DETECTED_FAIL]),
                "S-L": S[LOGICAL],
                "notS-L": U[LOGICAL],
                "S-StL": _add(S[STAB], S[LOGICAL]),
                "notS-StL": _add(U[STAB], U[LOGICAL]),
                "S-D": S[DETECTED_FAIL],
                "notS-D": U[DETECTED_FAIL],
                "S-SlashedSt": _add(S[LOGICAL], S[DETECTED_FAIL]),
                "notS-SlashedSt": _add(U[LOGICAL], U[DETECTED_FAIL]),
            }
        )
        tags = QED_TAGS
    return WepTable(n, setting, {t: out[t] for t in tags}, k)


def _half(per_qubit: np.ndarray, qubits: range) -> np.ndarray:
    """XOR-combines per-qubit contributions over all 4^len(qubits) digit strings."""
    acc = np.zeros(1, dtype=np.int64)
    for q in qubits:
        acc = np.concatenate([acc ^ per_qubit[q, d] for d in range(4)])
    return acc


def _half_weight(qubits: range) -> np.ndarray:
    acc = np.zeros(1, dtype=np.int64)
    for _ in qubits:
        acc = np.concatenate([acc + (d != 0) for d in range(4)])
    return acc


class PauliSpace:
    """
    All 4^n Paulis of a code, classified once.

    Paulis are indexed by base-4 digits (0=I, 1=X, 2=Y, 3=Z, qubit 0 least
    significant). The index splits into a low half of `h` qubits and a high
    half; syndrome, logical label and weight of a Pauli are the XOR (sum) of
    its halves' precomputed values, so a block of high indices classifies
    against every low index with one broadcast.
    """

    def __init__(self, code: StabilizerCode, decoder: DecoderMap | None = None):
        if code.n > EngineLimits.max_enumeration_qubits:
            raise BudgetExceededError(
                f"n={code.n} exceeds the enumeration budget of {EngineLimits.max_enumeration_qubits}"
            )
        self.code = code
        self.decoder = decoder
        self.n = n = code.n
        self.h = min(EngineLimits.split_low_qubits, n)
        syn = np.zeros((n, 4), dtype=np.int64)
        lab = np.zeros((n, 4), dtype=np.int64)
        for q in range(n):
            for d in range(1, 4):
                P = single_qubit(n, q, LETTERS[d])
                syn[q, d] = syndrome_bits(code, P)
                lab[q, d] = logical_label(code, P)
        self.syn_lo, self.syn_hi = _half(syn, range(self.h)), _half(syn, range(self.h, n))
        self.lab_lo, self.lab_hi = _half(lab, range(self.h)), _half(lab, range(self.h, n))
        self.wt_lo, self.wt_hi = _half_weight(range(self.h)), _half_weight(range(self.h, n))
        self.rec_label = None
        if decoder is not None:
            self.rec_label = np.array([logical_label(code, R) for R in decoder.table], dtype=np.int64)
        self._base: np.ndarray | None = None

    @property
    def setting(self) -> str:
        return "qed" if self.decoder is None else "qec"

    @property
    def size(self) -> int:
        return 4**self.n

    def group_halves(self, dd: DecouplingGroup) -> tuple[np.ndarray, np.ndarray]:
        if dd.n != self.n:
            raise PauliError(f"decoupling group has {dd.n} qubits, code has {self.n}")
        pat = np.zeros((self.n, 4), dtype=np.int64)
        for q in range(self.n):
            for d in range(1, 4):
                pat[q, d] = dd.pattern(single_qubit(self.n, q, LETTERS[d]))
        return _half(pat, range(self.h, self.n)), _half(pat, range(self.h))

    def _classes(self, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
        syn = self.syn_hi[start:stop, None] ^ self.syn_lo[None, :]
        lab = self.lab_hi[start:stop, None] ^ self.lab_lo[None, :]
        wt = self.wt_hi[start:stop, None] + self.wt_lo[None, :]
        zero_class = np.where(lab == 0, STAB, LOGICAL)
        if self.rec_label is None:
            cls = np.where(syn == 0, zero_class, DETECTED_FAIL)
        else:
            corrected = self.rec_label[syn] == lab
            cls = np.where(syn == 0, zero_class, np.where(corrected, CORRECTED, DETECTED_FAIL))
        return cls, wt

    def _count_block(self, start: int, stop: int, pat_hi: np.ndarray, pat_lo: np.ndarray) -> np.ndarray:
        cls, wt = self._classes(start, stop)
        suppressed = (pat_hi[start:stop, None] ^ pat_lo[None, :]) != 0
        cells = (suppressed * 4 + cls) * (self.n + 1) + wt
        return np.bincount(cells.ravel(), minlength=8 * (self.n + 1))

    def count(
        self,
        dd: DecouplingGroup,
        workers: int = 1,
        progress: Callable[[int, int], None] | None = None,
    ) -> np.ndarray:
        """Cell counts shaped (suppressed, class, weight)."""
        pat_hi, pat_lo = self.group_halves(dd)
        rows = len(self.syn_hi)
        step = max(1, EngineLimits.block_cells // len(self.syn_lo))
        blocks = [(s, min(rows, s + step)) for s in range(0, rows, step)]
        total = np.zeros(8 * (self.n + 1), dtype=np.int64)
        logger.debug("enumerating 4^%d Paulis in %d blocks on %d workers", self.n, len(blocks), workers)

        def report(done: int):
            if progress is not None:
                try:
                    progress(done, len(blocks))
                except Exception:
                    logger.debug("progress callback failed at block %d/%d", done, len(blocks), exc_info=True)

        if workers <= 1 or len(blocks) == 1:
            for i, (s, e) in enumerate(blocks, start=1):
                total += self._count_block(s, e, pat_hi, pat_lo)
                report(i)
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(self._count_block, s, e, pat_hi, pat_lo) for s, e in blocks]
                for i, future in enumerate(futures, start=1):
                    total += future.result()
                    report(i)
        return total.reshape(2, 4, self.n + 1)

    def base_cells(self) -> np.ndarray:
        """Group-independent part of the cell index for every Pauli, cached for scans."""
        if self._base is None:
            cls, wt = self._classes(0, len(self.syn_hi))
            self._base = cls * (self.n + 1) + wt
        return self._base

    def count_reusing(self, dd: DecouplingGroup) -> np.ndarray:
        """Same as `count`, recomputing only the suppression bits against the cached classes."""
        pat_hi, pat_lo = self.group_halves(dd)
        suppressed = (pat_hi[:, None] ^ pat_lo[None, :]) != 0
        cells = suppressed * (4 * (self.n + 1)) + self.base_cells()
        return np.bincount(cells.ravel(), minlength=8 * (self.n + 1)).reshape(2, 4, self.n + 1)

    def table(self, dd: DecouplingGroup, workers: int = 1, progress=None) -> WepTable:
        cells = self.count(dd, workers=workers, progress=progress)
        return tables_from_cells(self.n, cells, self.setting, self.code.k)


def compute_weps(
    code: StabilizerCode,
    decoder: DecoderMap,
    dd: DecouplingGroup,
    workers: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> WepTable:
    return PauliSpace(code, decoder).table(dd, workers=workers, progress=progress)


def compute_qed_weps(
    code: StabilizerCode,
    dd: DecouplingGroup,
    workers: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> WepTable:
    return PauliSpace(code, None).table(dd, workers=workers, progress=progress)


def eval_wep(coeffs, z):
    """Horner evaluation; exact when `z` is a Fraction."""
    return horner(coeffs, z)


def check_identities(table: WepTable) -> list[str]:
    """Exact coefficientwise identities every table must satisfy; returns the violated ones."""
    n = table.n
    failures: list[str] = []

    def expect(name: str, lhs: list[int], rhs: list[int]):
        if list(lhs) != list(rhs):
            failures.append(name)

    expect("A = C(n,w) 3^w", table["A"], [comb(n, w) * 3**w for w in range(n + 1)])
    expect("notS + S = A", _add(table["notS"], table["S"]), table["A"])
    expect("notS-St + S-St = St", _add(table["notS-St"], table["S-St"]), table["St"])
    expect("St + SlashedSt = A", _add(table["St"], table["SlashedSt"]), table["A"])
    expect("S-SlashedSt + S-St = S", _add(table["S-SlashedSt"], table["S-St"]), table["S"])
    if table.setting == "qec":
        expect("notS-notC + S-notC = notC", _add(table["notS-notC"], table["S-notC"]), table["notC"])
        expect("notS-C + S-C = C", _add(table["notS-C"], table["S-C"]), table["C"])
        expect("notS-D + S-D = D", _add(table["notS-D"], table["S-D"]), table["D"])
        expect("C + notC + St = A", _add(table["C"], table["notC"], table["St"]), table["A"])
        expect("L + notC-D = notC", _add(table["L"], table["notC-D"]), table["notC"])
        expect("C + notC-D = D", _add(table["C"], table["notC-D"]), table["D"])
        expect(
            "notS-notC + notS-C = notS-SlashedSt",
            _add(table["notS-notC"], table["notS-C"]),
            table["notS-SlashedSt"],
        )
        expect("S-notC + S-C = S-SlashedSt", _add(table["S-notC"], table["S-C"]), table["S-SlashedSt"])
        if table.k is not None and sum(table["C"]) + sum(table["St"]) != 4 ** (n - table.k):
            failures.append("|E_c| = 4^(n-k)")
    else:
        expect("notS-StL = notS-St + notS-L", table["notS-StL"], _add(table["notS-St"], table["notS-L"]))
        expect("S-StL = S-St + S-L", table["S-StL"], _add(table["S-St"], table["S-L"]))
        expect("StL + D = A", _add(table["StL"], table["D"]), table["A"])
        expect("notS-D + S-D = D", _add(table["notS-D"], table["S-D"]), table["D"])
    return failures
