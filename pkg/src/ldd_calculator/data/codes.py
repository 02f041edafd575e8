from __future__ import annotations

import logging
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Sequence

from ldd_calculator.config.constants import Code13Bundle, get_bundle
from ldd_calculator.errors import CodeFormatError, CodeValidationError, DecoderError, PauliError
from ldd_calculator.models.code import (
    DecoderMap,
    DecouplingGroup,
    StabilizerCode,
    decoder_with_overrides,
    format_syndrome,
    full_pauli_group,
    make_decoder,
    min_weight_decoder,
    parse_syndrome,
    trivial_code,
    trivial_decoder,
    validate_code,
)
from ldd_calculator.models.pauli import GeneratorSet, PauliOperator, format_pauli, parse_pauli
from ldd_calculator.utils.io_utils import ensure_parent_dir

logger = logging.getLogger(__name__)


def _lines(path: str | Path) -> Iterator[tuple[int, list[str]]]:
    """Yields (line number, fields) for each non-blank, non-comment line."""
    with open(path, "r", encoding="utf-8") as f:
        for number, raw in enumerate(f, start=1):
            text = raw.split("#", 1)[0].strip()
            if text:
                yield number, text.split()


def _pauli(field: str, path, number: int, n: int | None = None) -> PauliOperator:
    try:
        P = parse_pauli(field)
    except PauliError as e:
        raise CodeFormatError(str(e), str(path), number) from None
    if n is not None and P.n != n:
        raise CodeFormatError(f"{field} has {P.n} qubits, expected {n}", str(path), number)
    return P


def load_code(path: str | Path) -> StabilizerCode:
    n = k = None
    stabs: list[PauliOperator] = []
    lx: list[PauliOperator] = []
    lz: list[PauliOperator] = []
    for number, fields in _lines(path):
        if len(fields) != 2:
            raise CodeFormatError(f"expected '<keyword> <value>', got {' '.join(fields)!r}", str(path), number)
        key, value = fields
        match key:
            case "n" | "k":
                try:
                    parsed = int(value)
                except ValueError:
                    raise CodeFormatError(f"{key} must be an integer", str(path), number) from None
                if key == "n":
                    n = parsed
                else:
                    k = parsed
            case "stabilizer":
                stabs.append(_pauli(value, path, number, n))
            case "logical_x":
                lx.append(_pauli(value, path, number, n))
            case "logical_z":
                lz.append(_pauli(value, path, number, n))
            case _:
                raise CodeFormatError(f"unknown keyword {key!r}", str(path), number)
    if n is None or k is None:
        raise CodeFormatError("missing 'n' or 'k' line", str(path))
    code = StabilizerCode(n, k, GeneratorSet(n, tuple(stabs)), tuple(lx), tuple(lz))
    violations = validate_code(code)
    if violations:
        raise CodeValidationError(violations)
    logger.debug("loaded %s from %s", code, path)
    return code


def store_code(code: StabilizerCode, path: str | Path) -> None:
    ensure_parent_dir(path)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"n {code.n}\nk {code.k}\n")
        for S in code.stabilizers:
            f.write(f"stabilizer {format_pauli(S)}\n")
        for L in code.logical_x:
            f.write(f"logical_x {format_pauli(L)}\n")
        for L in code.logical_z:
            f.write(f"logical_z {format_pauli(L)}\n")


def read_decoder_rows(path: str | Path, code: StabilizerCode) -> dict[int, PauliOperator]:
    rows: dict[int, PauliOperator] = {}
    for number, fields in _lines(path):
        if len(fields) != 2:
            raise CodeFormatError("expected '<syndrome> <Pauli>'", str(path), number)
        try:
            bits = parse_syndrome(fields[0], code.r)
        except DecoderError as e:
            raise CodeFormatError(str(e), str(path), number) from None
        if bits in rows:
            raise CodeFormatError(f"duplicate syndrome {fields[0]}", str(path), number)
        rows[bits] = _pauli(fields[1], path, number, code.n)
    return rows


def load_decoder(path: str | Path, code: StabilizerCode) -> DecoderMap:
    rows = read_decoder_rows(path, code)
    try:
        return make_decoder(code, rows)
    except DecoderError as e:
        raise DecoderError(f"{path}: {e}") from None


def store_decoder(decoder: DecoderMap, path: str | Path) -> None:
    ensure_parent_dir(path)
    with open(path, "w", encoding="utf-8") as f:
        for bits, recovery in enumerate(decoder.table):
            f.write(f"{format_syndrome(bits, decoder.width)} {format_pauli(recovery)}\n")


def load_overrides(path: str | Path, code: StabilizerCode) -> list[PauliOperator]:
    overrides = []
    for number, fields in _lines(path):
        if len(fields) != 2 or fields[0] != "override":
            raise CodeFormatError("expected 'override <Pauli>'", str(path), number)
        overrides.append(_pauli(fields[1], path, number, code.n))
    return overrides


def load_dd(path: str | Path) -> DecouplingGroup:
    members: list[PauliOperator] = []
    for number, fields in _lines(path):
        if len(fields) != 2 or fields[0] != "generator":
            raise CodeFormatError("expected 'generator <Pauli>'", str(path), number)
        members.append(_pauli(fields[1], path, number, members[0].n if members else None))
    if not members:
        raise CodeFormatError("no generator lines", str(path))
    return DecouplingGroup(GeneratorSet(members[0].n, tuple(members)))


def store_dd(dd: DecouplingGroup, path: str | Path, header: Sequence[str] = ()) -> None:
    ensure_parent_dir(path)
    with open(path, "w", encoding="utf-8") as f:
        for line in header:
            f.write(line + "\n")
        for g in dd.generators:
            f.write(f"generator {format_pauli(g)}\n")


def load_candidates(path: str | Path) -> list[DecouplingGroup]:
    """Blocks of 'generator' lines separated by blank lines, one block per candidate group."""
    groups: list[DecouplingGroup] = []
    block: list[PauliOperator] = []
    with open(path, "r", encoding="utf-8") as f:
        for number, raw in enumerate(f, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                if block:
                    groups.append(DecouplingGroup(GeneratorSet(block[0].n, tuple(block))))
                    block = []
                continue
            fields = text.split()
            if len(fields) != 2 or fields[0] != "generator":
                raise CodeFormatError("expected 'generator <Pauli>'", str(path), number)
            block.append(_pauli(fields[1], path, number))
    if block:
        groups.append(DecouplingGroup(GeneratorSet(block[0].n, tuple(block))))
    return groups


def build_decoder(
    code: StabilizerCode,
    decoder_path: str | Path | None = None,
    overrides_path: str | Path | None = None,
    tie_break: str = "canonical",
) -> DecoderMap:
    """Table file if given, else the minimum-weight decoder with optional overrides."""
    if decoder_path is not None:
        return load_decoder(decoder_path, code)
    if code.r == 0:
        return trivial_decoder(code)
    base = min_weight_decoder(code, tie_break)
    if overrides_path is not None:
        return decoder_with_overrides(code, base, load_overrides(overrides_path, code))
    return base


@lru_cache(maxsize=None)
def load_bundle(name: str) -> tuple[StabilizerCode, DecoderMap, DecouplingGroup]:
    bundle = get_bundle(name)
    if bundle.code_path() is None:
        code = trivial_code(bundle.k)
        return code, trivial_decoder(code), full_pauli_group(bundle.k)
    code = load_code(bundle.code_path())
    if bundle is Code13Bundle:
        decoder = builtin_code13_decoder(code)
    else:
        decoder = build_decoder(code, bundle.decoder_path(), bundle.overrides_path(), bundle.tieBreak)
    return code, decoder, load_dd(bundle.dd_path())


def builtin_code13_decoder(code: StabilizerCode | None = None) -> DecoderMap:
    """
    The [[13,1,3]] decoder: minimum weight with supports visited from the
    rightmost qubit, then the six shipped weight-2 overrides.
    """
    if code is None:
        code = load_code(Code13Bundle.code_path())
    return build_decoder(code, None, Code13Bundle.overrides_path(), Code13Bundle.tieBreak)
