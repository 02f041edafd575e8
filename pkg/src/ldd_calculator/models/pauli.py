from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator

from ldd_calculator.errors import PauliError

LETTERS = "IXYZ"
MAX_QUBITS = 64

# (x, z) bit pair per letter; the index doubles as the base-4 enumeration digit.
_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


@dataclass(frozen=True)
class PauliOperator:
    """
    A phase-stripped n-qubit Pauli stored as two n-bit masks.

    Bit `q` of `x` / `z` is the X / Z component on qubit `q`;
    qubit 0 is the leftmost letter of the string form.
    """

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise PauliError(f"qubit count {self.n} outside 1..{MAX_QUBITS}")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full or self.x < 0 or self.z < 0:
            raise PauliError(f"masks exceed {self.n} qubits")

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def support(self) -> int:
        return self.x | self.z

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def letter(self, qubit: int) -> str:
        return LETTERS[self.digit(qubit)]

    def digit(self, qubit: int) -> int:
        xb = (self.x >> qubit) & 1
        zb = (self.z >> qubit) & 1
        return (0, 1, 3, 2)[xb | (zb << 1)]

    def symplectic(self) -> int:
        """Packs the operator into one 2n-bit vector, X part in the low half."""
        return self.x | (self.z << self.n)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)

    def __str__(self):
        return format_pauli(self)

    def __repr__(self):
        return f"<Pauli {format_pauli(self)}>"


def identity(n: int) -> PauliOperator:
    return PauliOperator(n, 0, 0)


def single_qubit(n: int, qubit: int, letter: str) -> PauliOperator:
    xb, zb = _LETTER_BITS[letter.upper()]
    return PauliOperator(n, xb << qubit, zb << qubit)


def parse_pauli(text: str) -> PauliOperator:
    if not text:
        raise PauliError("empty Pauli string")
    if len(text) > MAX_QUBITS:
        raise PauliError(f"Pauli string longer than {MAX_QUBITS} qubits")
    x = z = 0
    for offset, char in enumerate(text):
        bits = _LETTER_BITS.get(char.upper())
        if bits is None:
            raise PauliError(f"illegal character {char!r} at offset {offset} in {text!r}")
        x |= bits[0] << offset
        z |= bits[1] << offset
    return PauliOperator(len(text), x, z)


def format_pauli(P: PauliOperator) -> str:
    chars = []
    for q in range(P.n):
        xb = (P.x >> q) & 1
        zb = (P.z >> q) & 1
        chars.append("IXZY"[xb | (zb << 1)])
    return "".join(chars)


def _check_sizes(P: PauliOperator, Q: PauliOperator) -> None:
    if P.n != Q.n:
        raise PauliError(f"qubit count mismatch: {P.n} vs {Q.n}")


def multiply(P: PauliOperator, Q: PauliOperator) -> PauliOperator:
    _check_sizes(P, Q)
    return PauliOperator(P.n, P.x ^ Q.x, P.z ^ Q.z)


def commutes(P: PauliOperator, Q: PauliOperator) -> bool:
    _check_sizes(P, Q)
    return ((P.x & Q.z).bit_count() + (P.z & Q.x).bit_count()) % 2 == 0


def pauli_index(P: PauliOperator) -> int:
    """Position in the base-4 enumeration (digit per qubit, qubit 0 least significant)."""
    index = 0
    for q in reversed(range(P.n)):
        index = index * 4 + P.digit(q)
    return index


def pauli_from_index(n: int, index: int) -> PauliOperator:
    x = z = 0
    for q in range(n):
        d = index & 3
        index >>= 2
        if d in (1, 2):
            x |= 1 << q
        if d in (2, 3):
            z |= 1 << q
    return PauliOperator(n, x, z)


def paulis_of_weight(n: int, w: int) -> Iterator[PauliOperator]:
    """Yields every weight-`w` Pauli on `n` qubits in canonical string order (I<X<Y<Z)."""
    if w < 0 or w > n:
        return

    def walk(q: int, left: int, x: int, z: int):
        if q == n:
            yield PauliOperator(n, x, z)
            return
        if n - q > left:
            yield from walk(q + 1, left, x, z)
        if left:
            bit = 1 << q
            yield from walk(q + 1, left - 1, x | bit, z)
            yield from walk(q + 1, left - 1, x | bit, z | bit)
            yield from walk(q + 1, left - 1, x, z | bit)

    yield from walk(0, w, 0, 0)


def paulis_by_support(n: int, w: int) -> Iterator[PauliOperator]:
    """
    Yields every weight-`w` Pauli on `n` qubits grouped by support.

    Supports are visited as increasing position tuples counted from the
    rightmost qubit; within a support the letters run X<Y<Z with the
    lowest position most significant.
    """
    if w < 0 or w > n:
        return
    for positions in combinations(range(n), w):
        qubits = [n - 1 - pos for pos in positions]
        for letters in product("XYZ", repeat=w):
            x = z = 0
            for q, letter in zip(qubits, letters):
                xb, zb = _LETTER_BITS[letter]
                x |= xb << q
                z |= zb << q
            yield PauliOperator(n, x, z)


def _reduce(vector: int, basis: dict[int, int]) -> int:
    while vector:
        low = vector & -vector
        row = basis.get(low)
        if row is None:
            return vector
        vector ^= row
    return 0


@dataclass(frozen=True)
class GeneratorSet:
    """An ordered list of Paulis on a common qubit count, with F2 span queries."""

    n: int
    members: tuple[PauliOperator, ...] = ()

    def __post_init__(self):
        for P in self.members:
            if P.n != self.n:
                raise PauliError(f"generator {P} has {P.n} qubits, expected {self.n}")

    @classmethod
    def of(cls, n: int, members: Iterable[PauliOperator | str]) -> "GeneratorSet":
        items = tuple(parse_pauli(m) if isinstance(m, str) else m for m in members)
        return cls(n, items)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, index: int) -> PauliOperator:
        return self.members[index]

    def _basis(self) -> dict[int, int]:
        basis: dict[int, int] = {}
        for P in self.members:
            reduced = _reduce(P.symplectic(), basis)
            if reduced:
                basis[reduced & -reduced] = reduced
        return basis

    def rank(self) -> int:
        return len(self._basis())

    def contains(self, P: PauliOperator) -> bool:
        if P.n != self.n:
            raise PauliError(f"qubit count mismatch: {P.n} vs {self.n}")
        return _reduce(P.symplectic(), self._basis()) == 0

    def element(self, mask: int) -> PauliOperator:
        """Product of the members selected by the bits of `mask`."""
        x = z = 0
        for i, P in enumerate(self.members):
            if (mask >> i) & 1:
                x ^= P.x
                z ^= P.z
        return PauliOperator(self.n, x, z)

    def elements(self) -> Iterator[PauliOperator]:
        """All 2^m member products in combination-index order (may repeat if dependent)."""
        for mask in range(1 << len(self.members)):
            yield self.element(mask)


def rank(gens: GeneratorSet) -> int:
    return gens.rank()


def in_span(P: PauliOperator, gens: GeneratorSet) -> bool:
    return gens.contains(P)
