from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from ldd_calculator.config.constants import COMPARATORS, QED_STRATEGIES, EngineLimits
from ldd_calculator.errors import DomainError, LddCalculatorError, PreconditionError
from ldd_calculator.models.code import DecoderMap, DecouplingGroup, StabilizerCode
from ldd_calculator.models.pauli import GeneratorSet, multiply
from ldd_calculator.services import fidelity
from ldd_calculator.services.fidelity import NoiseParams
from ldd_calculator.services.wep import PauliSpace, WepTable, tables_from_cells
from ldd_calculator.utils.math_utils import Number, lin_space, log_space

logger = logging.getLogger(__name__)

PARAMETERS = ("p", "p_dd", "p_qec", "p_qed")


@dataclass
class ScanEntry:
    index: int
    generators: tuple[str, ...]
    objective: float
    tie: bool = False


@dataclass
class ScanResult:
    """Candidates sorted by hybrid logical failure probability, best first."""

    entries: list[ScanEntry]

    def __len__(self):
        return len(self.entries)

    def best_family(self) -> list[ScanEntry]:
        return [e for e in self.entries if e.tie]

    def rank_of(self, generators: Sequence[str]) -> int | None:
        wanted = tuple(generators)
        for rank, entry in enumerate(self.entries, start=1):
            if entry.generators == wanted:
                return rank
        return None

    def in_best_family(self, generators: Sequence[str]) -> bool:
        wanted = tuple(generators)
        return any(e.generators == wanted for e in self.best_family())


def dressing_candidates(code: StabilizerCode, base: DecouplingGroup) -> list[DecouplingGroup]:
    """All X_L*s1, Z_L*s2 dressings of a two-generator base group, s1 outer, s2 inner."""
    if code.k != 1 or len(base.generators) != 2:
        raise PreconditionError("dressing scans need k = 1 and a two-generator base group; pass a candidate list")
    elements = list(code.stabilizers.elements())
    g1, g2 = base.generators
    return [
        DecouplingGroup(GeneratorSet(code.n, (multiply(g1, s1), multiply(g2, s2))))
        for s1, s2 in itertools.product(elements, elements)
    ]


def _objective(space: PauliSpace, group: DecouplingGroup, params: NoiseParams) -> float:
    if space.size <= EngineLimits.block_cells:
        cells = space.count_reusing(group)
    else:
        cells = space.count(group)
    table = tables_from_cells(space.n, cells, "qec", space.code.k)
    return float(fidelity.infidelity_hybrid(table, params, space.code.k))


def scan_ldd(
    code: StabilizerCode,
    decoder: DecoderMap,
    candidates: Sequence[DecouplingGroup],
    params: NoiseParams,
    workers: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> ScanResult:
    space = PauliSpace(code, decoder)
    if space.size <= EngineLimits.block_cells:
        space.base_cells()
    total = len(candidates)

    def score(i: int) -> ScanEntry:
        group = candidates[i]
        return ScanEntry(i, group.strings(), _objective(space, group, params))

    entries: list[ScanEntry] = []
    if workers <= 1:
        for i in range(total):
            entries.append(score(i))
            _report(progress, i + 1, total)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for i, entry in enumerate(pool.map(score, range(total)), start=1):
                entries.append(entry)
                _report(progress, i, total)
    entries.sort(key=lambda e: (e.objective, e.index))
    best = entries[0].objective if entries else 0
    for e in entries:
        e.tie = e.objective <= best * (1 + EngineLimits.tie_tolerance) if best > 0 else e.objective == best
    logger.info("scanned %d groups; best %.6g shared by %d", total, best, sum(e.tie for e in entries))
    return ScanResult(entries)


def _report(progress, done: int, total: int) -> None:
    if progress is not None:
        try:
            progress(done, total)
        except Exception:
            logger.debug("progress callback failed at %d/%d", done, total, exc_info=True)


@dataclass
class Axis:
    name: str
    lo: Number
    hi: Number
    points: int
    log: bool = False

    def __post_init__(self):
        if self.name not in PARAMETERS:
            raise DomainError("axis", self.name, "one of " + ", ".join(PARAMETERS))
        if self.points < 2:
            raise DomainError(f"{self.name} points", self.points, "at least 2")
        upper_open = self.name == "p"
        for value in (self.lo, self.hi):
            if value < 0 or value > 1 or (upper_open and value >= 1):
                raise DomainError(self.name, value, "[0, 1)" if upper_open else "[0, 1]")
        if self.log and self.lo <= 0:
            raise DomainError(self.name, self.lo, "positive values on a log axis")

    def values(self) -> list[Number]:
        if self.log:
            return log_space(float(self.lo), float(self.hi), self.points)
        return lin_space(self.lo, self.hi, self.points)


@dataclass
class SweepSpec:
    fixed: dict[str, Number] = field(default_factory=dict)
    axes: list[Axis] = field(default_factory=list)
    strategies: tuple[str, ...] = ("hybrid",)
    comparator: str | None = None

    def grid(self) -> Iterable[dict[str, Number]]:
        names = [a.name for a in self.axes]
        for combo in itertools.product(*(a.values() for a in self.axes)):
            point = {"p": 0, "p_dd": 1, "p_qec": 0, "p_qed": 0, **self.fixed}
            point.update(zip(names, combo))
            yield point


def parameter_grid(values: dict[str, Sequence[Number]], sqrt_qec: bool = False) -> list[NoiseParams]:
    """Cartesian grid in p, p_dd, p_qec, p_qed order; `sqrt_qec` couples p_qec = sqrt(p)."""
    grid = []
    names = [n for n in PARAMETERS if not (sqrt_qec and n == "p_qec")]
    for combo in itertools.product(*(values.get(n, [0 if n != "p_dd" else 1]) for n in names)):
        point = dict(zip(names, combo))
        if sqrt_qec:
            point["p_qec"] = math.sqrt(float(point["p"]))
        grid.append(NoiseParams(**point))
    return grid


FIDELITY_COLUMNS = ("strategy", "p", "p_dd", "p_qec", "p_qed", "F", "P_A")


def fidelity_rows(
    strategies: Sequence[str],
    grid: Iterable[NoiseParams],
    wep: WepTable | None,
    wep_qed: WepTable | None,
    k: int,
) -> list[tuple]:
    rows = []
    for params in grid:
        for strategy in strategies:
            report = fidelity.evaluate(strategy, params, wep, wep_qed, k)
            accept = report.acceptance if strategy in QED_STRATEGIES else None
            rows.append((strategy, params.p, params.p_dd, params.p_qec, params.p_qed, report.fidelity, accept))
    return rows


ADVANTAGE_COLUMNS = ("p", "p_dd", "p_qec", "comparator", "R", "degenerate")


def advantage_rows(spec: SweepSpec, wep: WepTable, k: int) -> list[tuple]:
    if spec.comparator not in COMPARATORS:
        raise LddCalculatorError(
            f"comparator {spec.comparator!r} must be one of {', '.join(COMPARATORS)} (not the hybrid itself)"
        )
    strategy = COMPARATORS[spec.comparator]
    rows = []
    for point in spec.grid():
        params = NoiseParams(point["p"], point["p_dd"], point["p_qec"], point["p_qed"])
        eps_hyb = fidelity.infidelity_hybrid(wep, params, k)
        eps_comp = fidelity.evaluate(strategy, params, wep, None, k).infidelity
        adv = fidelity.relative_advantage(eps_comp, eps_hyb)
        rows.append((params.p, params.p_dd, params.p_qec, spec.comparator, adv.value, int(adv.degenerate)))
    return rows
