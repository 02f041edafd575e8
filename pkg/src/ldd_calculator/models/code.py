from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping

from ldd_calculator.config.constants import EngineLimits
from ldd_calculator.errors import (
    BudgetExceededError,
    CodeValidationError,
    DecoderError,
    PauliError,
    PreconditionError,
)
from ldd_calculator.models.pauli import (
    GeneratorSet,
    PauliOperator,
    commutes,
    format_pauli,
    identity,
    multiply,
    parse_pauli,
    paulis_by_support,
    paulis_of_weight,
    single_qubit,
)

logger = logging.getLogger(__name__)

# candidate orders for equal-weight recoveries; the first hit per syndrome wins
TIE_BREAKS = {"canonical": paulis_of_weight, "support": paulis_by_support}


def _anticommute(P: PauliOperator, Q: PauliOperator) -> int:
    return ((P.x & Q.z).bit_count() + (P.z & Q.x).bit_count()) & 1


@dataclass(frozen=True)
class Syndrome:
    """Anticommutation pattern with the stabilizer generators; bit i <-> generator i."""

    width: int
    bits: int = 0

    def is_trivial(self) -> bool:
        return self.bits == 0

    def __str__(self):
        return format_syndrome(self.bits, self.width)

    def __repr__(self):
        return f"<Syndrome {self}>"


def format_syndrome(bits: int, width: int) -> str:
    return "".join("1" if (bits >> i) & 1 else "0" for i in range(width))


def parse_syndrome(text: str, width: int) -> int:
    if len(text) != width or any(c not in "01" for c in text):
        raise DecoderError(f"syndrome {text!r} is not a {width}-bit string")
    return sum(1 << i for i, c in enumerate(text) if c == "1")


@dataclass(frozen=True)
class StabilizerCode:
    """
    An [[n, k]] stabilizer code given by its n-k stabilizer generators
    and k pairs of logical generators. Construction does not validate;
    call `validate_code` (the loaders do).
    """

    n: int
    k: int
    stabilizers: GeneratorSet
    logical_x: tuple[PauliOperator, ...]
    logical_z: tuple[PauliOperator, ...]

    @classmethod
    def from_strings(
        cls,
        stabilizers: Iterable[str],
        logical_x: Iterable[str],
        logical_z: Iterable[str],
    ) -> "StabilizerCode":
        stabs = [parse_pauli(s) for s in stabilizers]
        lx = tuple(parse_pauli(s) for s in logical_x)
        lz = tuple(parse_pauli(s) for s in logical_z)
        if not lx:
            raise PreconditionError("a code needs at least one logical qubit")
        n = lx[0].n
        return cls(n, len(lx), GeneratorSet(n, tuple(stabs)), lx, lz)

    @property
    def r(self) -> int:
        """Number of stabilizer generators (syndrome width)."""
        return self.n - self.k

    @property
    def logicals(self) -> GeneratorSet:
        return GeneratorSet(self.n, self.logical_x + self.logical_z)

    @property
    def stabilizers_and_logicals(self) -> GeneratorSet:
        return GeneratorSet(self.n, self.stabilizers.members + self.logical_x + self.logical_z)

    def __str__(self):
        return f"<StabilizerCode [[{self.n},{self.k}]]>"

    def __repr__(self):
        return self.__str__()


def validate_code(code: StabilizerCode) -> list[str]:
    violations: list[str] = []
    n, k = code.n, code.k
    if k < 1 or k > n:
        violations.append(f"k={k} must satisfy 1 <= k <= n={n}")
    everything = list(code.stabilizers) + list(code.logical_x) + list(code.logical_z)
    for P in everything:
        if P.n != n:
            violations.append(f"{format_pauli(P)} has {P.n} qubits, expected {n}")
    if violations:
        return violations
    if len(code.logical_x) != k or len(code.logical_z) != k:
        violations.append(f"expected {k} logical_x and {k} logical_z generators")
    if len(code.stabilizers) != n - k:
        violations.append(f"expected {n - k} stabilizer generators, got {len(code.stabilizers)}")
    elif code.stabilizers.rank() != n - k:
        violations.append(f"stabilizer generators have rank {code.stabilizers.rank()} < {n - k}")
    stabs = list(code.stabilizers)
    for i, S in enumerate(stabs):
        for j in range(i + 1, len(stabs)):
            if not commutes(S, stabs[j]):
                violations.append(f"stabilizers {i} and {j} anticommute")
    for name, ops in (("logical_x", code.logical_x), ("logical_z", code.logical_z)):
        for i, L in enumerate(ops):
            for j, S in enumerate(stabs):
                if not commutes(L, S):
                    violations.append(f"{name}[{i}] anticommutes with stabilizer {j}")
    for i, LX in enumerate(code.logical_x):
        for j, LZ in enumerate(code.logical_z):
            if commutes(LX, LZ) == (i == j):
                relation = "commutes" if i == j else "anticommutes"
                violations.append(f"logical_x[{i}] {relation} with logical_z[{j}]")
    for name, ops in (("logical_x", code.logical_x), ("logical_z", code.logical_z)):
        for i in range(len(ops)):
            for j in range(i + 1, len(ops)):
                if not commutes(ops[i], ops[j]):
                    violations.append(f"{name}[{i}] anticommutes with {name}[{j}]")
    combined = code.stabilizers_and_logicals.rank()
    if combined != len(everything):
        violations.append(
            f"stabilizers and logicals are dependent (rank {combined} < {len(everything)})"
        )
    return violations


def require_valid(code: StabilizerCode) -> StabilizerCode:
    violations = validate_code(code)
    if violations:
        raise CodeValidationError(violations)
    return code


def _check_size(code: StabilizerCode, E: PauliOperator) -> None:
    if E.n != code.n:
        raise PauliError(f"error has {E.n} qubits, code has {code.n}")


def syndrome_bits(code: StabilizerCode, E: PauliOperator) -> int:
    _check_size(code, E)
    bits = 0
    for i, S in enumerate(code.stabilizers):
        bits |= _anticommute(E, S) << i
    return bits


def syndrome(code: StabilizerCode, E: PauliOperator) -> Syndrome:
    return Syndrome(code.r, syndrome_bits(code, E))


def logical_label(code: StabilizerCode, E: PauliOperator) -> int:
    """Bit 2i: anticommutes with logical_x[i]; bit 2i+1: with logical_z[i]."""
    _check_size(code, E)
    label = 0
    for i in range(code.k):
        label |= _anticommute(E, code.logical_x[i]) << (2 * i)
        label |= _anticommute(E, code.logical_z[i]) << (2 * i + 1)
    return label


@dataclass(frozen=True)
class DecoderMap:
    """Complete syndrome -> recovery table; `table[s]` is the recovery for syndrome bits `s`."""

    width: int
    table: tuple[PauliOperator, ...]

    def recover(self, bits: int) -> PauliOperator:
        return self.table[bits]

    def __len__(self):
        return len(self.table)

    def __str__(self):
        return f"<DecoderMap {len(self.table)} syndromes>"

    def __repr__(self):
        return self.__str__()


def make_decoder(code: StabilizerCode, mapping: Mapping[int, PauliOperator]) -> DecoderMap:
    """Builds a decoder from a syndrome->recovery mapping, checking totality and consistency."""
    size = 1 << code.r
    table: list[PauliOperator] = []
    for bits in range(size):
        recovery = mapping.get(bits)
        if recovery is None:
            raise DecoderError(f"decoder is missing syndrome {format_syndrome(bits, code.r)}")
        if recovery.n != code.n:
            raise DecoderError(
                f"recovery {format_pauli(recovery)} for syndrome "
                f"{format_syndrome(bits, code.r)} has {recovery.n} qubits"
            )
        actual = syndrome_bits(code, recovery)
        if actual != bits:
            raise DecoderError(
                f"recovery {format_pauli(recovery)} for syndrome {format_syndrome(bits, code.r)} "
                f"has syndrome {format_syndrome(actual, code.r)}"
            )
        table.append(recovery)
    if not table[0].is_identity():
        raise DecoderError("trivial syndrome must map to the identity")
    extra = [b for b in mapping if not 0 <= b < size]
    if extra:
        raise DecoderError(f"decoder has {len(extra)} entries outside the syndrome space")
    return DecoderMap(code.r, tuple(table))


def min_weight_decoder(code: StabilizerCode, tie_break: str = "canonical") -> DecoderMap:
    """Lowest-weight recovery per syndrome, ties broken by the `tie_break` enumeration order."""
    if tie_break not in TIE_BREAKS:
        raise DecoderError(f"unknown tie-break {tie_break!r}; expected one of {', '.join(TIE_BREAKS)}")
    candidates = TIE_BREAKS[tie_break]
    if code.r > EngineLimits.max_decoder_syndrome_bits:
        raise BudgetExceededError(
            f"{code.r} syndrome bits exceed the decoder budget of "
            f"{EngineLimits.max_decoder_syndrome_bits}"
        )
    size = 1 << code.r
    chosen: dict[int, PauliOperator] = {}
    for w in range(code.n + 1):
        for E in candidates(code.n, w):
            bits = syndrome_bits(code, E)
            if bits not in chosen:
                chosen[bits] = E
        if len(chosen) == size:
            logger.debug("min-weight decoder complete at weight %d", w)
            break
    return make_decoder(code, chosen)


def decoder_with_overrides(
    code: StabilizerCode, base: DecoderMap, overrides: Iterable[PauliOperator]
) -> DecoderMap:
    """Replaces `table[syn(E)]` by `E` for every override, in order."""
    mapping = dict(enumerate(base.table))
    for E in overrides:
        bits = syndrome_bits(code, E)
        if bits == 0:
            raise DecoderError(f"override {format_pauli(E)} has trivial syndrome")
        mapping[bits] = E
    return make_decoder(code, mapping)


@dataclass(frozen=True)
class DecouplingGroup:
    """A nontrivial Pauli group given by generators; E is suppressed iff it anticommutes with one."""

    generators: GeneratorSet

    def __post_init__(self):
        if self.generators.rank() < 1:
            raise CodeValidationError(["decoupling group needs a non-identity generator"])

    @classmethod
    def of(cls, members: Iterable[PauliOperator | str]) -> "DecouplingGroup":
        items = [parse_pauli(m) if isinstance(m, str) else m for m in members]
        if not items:
            raise CodeValidationError(["decoupling group needs at least one generator"])
        return cls(GeneratorSet(items[0].n, tuple(items)))

    @property
    def n(self) -> int:
        return self.generators.n

    def pattern(self, E: PauliOperator) -> int:
        if E.n != self.n:
            raise PauliError(f"error has {E.n} qubits, group has {self.n}")
        bits = 0
        for i, g in enumerate(self.generators):
            bits |= _anticommute(E, g) << i
        return bits

    def suppresses(self, E: PauliOperator) -> bool:
        return self.pattern(E) != 0

    def strings(self) -> tuple[str, ...]:
        return tuple(format_pauli(g) for g in self.generators)

    def __str__(self):
        return "<DecouplingGroup " + ", ".join(self.strings()) + ">"

    def __repr__(self):
        return self.__str__()


def dress_generator(dd: DecouplingGroup, index: int, S: PauliOperator) -> DecouplingGroup:
    members = list(dd.generators)
    if not 0 <= index < len(members):
        raise IndexError(f"generator index {index} out of range 0..{len(members) - 1}")
    members[index] = multiply(members[index], S)
    return DecouplingGroup(GeneratorSet(dd.n, tuple(members)))


@dataclass(frozen=True)
class Classification:
    is_stabilizer: bool
    is_zero_syndrome: bool
    is_correctable: bool
    is_suppressed: bool
    logical_label: int


def classify(
    code: StabilizerCode, decoder: DecoderMap, dd: DecouplingGroup, E: PauliOperator
) -> Classification:
    bits = syndrome_bits(code, E)
    label = logical_label(code, E)
    residual = multiply(decoder.recover(bits), E)
    zero = bits == 0
    return Classification(
        is_stabilizer=zero and label == 0,
        is_zero_syndrome=zero,
        is_correctable=logical_label(code, residual) == 0,
        is_suppressed=dd.suppresses(E),
        logical_label=label,
    )


def code_distance(code: StabilizerCode) -> int:
    if code.k < 1:
        raise PreconditionError("distance is undefined for k = 0")
    if code.n > EngineLimits.max_enumeration_qubits:
        raise BudgetExceededError(
            f"n={code.n} exceeds the enumeration budget of {EngineLimits.max_enumeration_qubits}"
        )
    for w in range(1, code.n + 1):
        for E in paulis_of_weight(code.n, w):
            if syndrome_bits(code, E) == 0 and logical_label(code, E) != 0:
                return w
    raise PreconditionError("code has no nontrivial logical operator")


def trivial_code(k: int) -> StabilizerCode:
    """The [[k, k]] code with no stabilizers and single-qubit logicals."""
    lx = tuple(single_qubit(k, q, "X") for q in range(k))
    lz = tuple(single_qubit(k, q, "Z") for q in range(k))
    return StabilizerCode(k, k, GeneratorSet(k, ()), lx, lz)


def trivial_decoder(code: StabilizerCode) -> DecoderMap:
    return DecoderMap(0, (identity(code.n),))


def full_pauli_group(k: int) -> DecouplingGroup:
    members = []
    for q in range(k):
        members.append(single_qubit(k, q, "X"))
        members.append(single_qubit(k, q, "Z"))
    return DecouplingGroup(GeneratorSet(k, tuple(members)))


def logical_group(code: StabilizerCode) -> DecouplingGroup:
    """The group generated by the code's logical operators, pi(L)."""
    return DecouplingGroup(code.logicals)


def spans_logical_group(code: StabilizerCode, dd: DecouplingGroup) -> bool:
    """True when the DD group equals the group generated by the bare logical generators."""
    logicals = code.logicals
    if dd.generators.rank() != logicals.rank():
        return False
    return all(logicals.contains(g) for g in dd.generators)


def resolve_generator_order(
    code: StabilizerCode, rows: Mapping[int, PauliOperator]
) -> StabilizerCode | None:
    """
    Finds stabilizer generators, one per syndrome bit, under which every
    (syndrome, recovery) row satisfies syn(recovery) = syndrome.

    Candidates for each bit are the nontrivial stabilizer-group elements
    in combination-index order; the first independent assignment wins.
    Returns None when no assignment exists.
    """
    elements = [S for S in list(code.stabilizers.elements())[1:]]
    items = sorted(rows.items())
    columns: list[list[PauliOperator]] = []
    for i in range(code.r):
        column = [
            S
            for S in elements
            if all(_anticommute(E, S) == ((bits >> i) & 1) for bits, E in items)
        ]
        if not column:
            logger.debug("no stabilizer matches syndrome column %d", i)
            return None
        columns.append(column)

    picked: list[PauliOperator] = []

    def search(i: int) -> bool:
        if i == code.r:
            return True
        for S in columns[i]:
            trial = GeneratorSet(code.n, tuple(picked) + (S,))
            if trial.rank() == i + 1:
                picked.append(S)
                if search(i + 1):
                    return True
                picked.pop()
        return False

    if not search(0):
        return None
    resolved = StabilizerCode(
        code.n, code.k, GeneratorSet(code.n, tuple(picked)), code.logical_x, code.logical_z
    )
    logger.info("resolved generator order: %s", ", ".join(format_pauli(S) for S in picked))
    return resolved
