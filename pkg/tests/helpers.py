import random
import sys
from functools import lru_cache
from pathlib import Path

SRC = Path(__file__).resolve().parents[1] / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from ldd_calculator.config.constants import QEC_TAGS, QED_TAGS, SteaneBundle, data_file  # noqa: E402
from ldd_calculator.data.codes import load_bundle, load_dd  # noqa: E402
from ldd_calculator.models.code import (  # noqa: E402
    DecoderMap,
    DecouplingGroup,
    StabilizerCode,
    classify,
    logical_group,
    min_weight_decoder,
    require_valid,
)
from ldd_calculator.models.pauli import GeneratorSet, PauliOperator, pauli_from_index  # noqa: E402
from ldd_calculator.services.wep import PauliSpace, WepTable  # noqa: E402

PERFECT_CODE = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")


@lru_cache(maxsize=None)
def bundle(name: str):
    return load_bundle(name)


@lru_cache(maxsize=None)
def space(name: str, setting: str = "qec") -> PauliSpace:
    code, decoder, _ = bundle(name)
    return PauliSpace(code, decoder if setting == "qec" else None)


@lru_cache(maxsize=None)
def table(name: str, setting: str = "qec") -> WepTable:
    _, _, dd = bundle(name)
    return space(name, setting).table(dd, workers=4)


@lru_cache(maxsize=None)
def steane_group(filename: str) -> DecouplingGroup:
    return load_dd(data_file(filename))


@lru_cache(maxsize=None)
def steane_logical_tables() -> tuple[WepTable, WepTable]:
    """Steane tables with the group generated by the bare logicals."""
    code, _, _ = bundle("steane")
    group = logical_group(code)
    return space("steane", "qec").table(group), space("steane", "qed").table(group)


@lru_cache(maxsize=None)
def perfect_code() -> tuple[StabilizerCode, DecoderMap]:
    code = require_valid(StabilizerCode.from_strings(PERFECT_CODE, ["XXXXX"], ["ZZZZZ"]))
    return code, min_weight_decoder(code)


def _conjugate(x: int, z: int, gate: str, a: int, b: int) -> tuple[int, int]:
    """Phase-free action of H, S (on qubit a) or CNOT (control a, target b) on symplectic masks."""
    match gate:
        case "H":
            xa, za = (x >> a) & 1, (z >> a) & 1
            x = (x & ~(1 << a)) | (za << a)
            z = (z & ~(1 << a)) | (xa << a)
        case "S":
            z ^= ((x >> a) & 1) << a
        case "CNOT":
            x ^= ((x >> a) & 1) << b
            z ^= ((z >> b) & 1) << a
    return x, z


@lru_cache(maxsize=None)
def random_code(seed: int, n: int = 5, gates: int = 60) -> StabilizerCode:
    """An [[n,1]] code: Z on qubits 1..n-1 with X0/Z0 logicals, scrambled by seeded Clifford gates."""
    rng = random.Random(seed)
    masks = [(0, 1 << q) for q in range(1, n)] + [(1, 0), (0, 1)]
    for _ in range(gates):
        gate = rng.choice(("H", "S", "CNOT"))
        a, b = rng.sample(range(n), 2)
        masks = [_conjugate(x, z, gate, a, b) for x, z in masks]
    ops = [PauliOperator(n, x, z) for x, z in masks]
    return require_valid(StabilizerCode(n, 1, GeneratorSet(n, tuple(ops[:-2])), (ops[-2],), (ops[-1],)))


def _memberships(c) -> dict[str, bool]:
    """Tag atoms for one classified Pauli; compound tags are conjunctions of these."""
    return {
        "A": True,
        "S": c.is_suppressed,
        "notS": not c.is_suppressed,
        "St": c.is_stabilizer,
        "SlashedSt": not c.is_stabilizer,
        "L": c.is_zero_syndrome and not c.is_stabilizer,
        "StL": c.is_zero_syndrome,
        "D": not c.is_zero_syndrome,
        "C": not c.is_stabilizer and c.is_correctable,
        "notC": not c.is_stabilizer and not c.is_correctable,
    }


def brute_force_table(
    code: StabilizerCode, decoder: DecoderMap | None, dd: DecouplingGroup, setting: str
) -> dict[str, list[int]]:
    """Slow reference: each tag counted straight from per-Pauli classification, for small n."""
    n = code.n
    tags = QEC_TAGS if setting == "qec" else QED_TAGS
    coeffs = {tag: [0] * (n + 1) for tag in tags}
    for index in range(4**n):
        E = pauli_from_index(n, index)
        atoms = _memberships(classify(code, decoder or _identity_decoder(code), dd, E))
        for tag in tags:
            if all(atoms[part] for part in tag.split("-")):
                coeffs[tag][E.weight] += 1
    return coeffs


def _identity_decoder(code: StabilizerCode) -> DecoderMap:
    from ldd_calculator.models.pauli import identity

    return DecoderMap(code.r, tuple(identity(code.n) for _ in range(1 << code.r)))


STEANE_LOW_P = SteaneBundle.lowPGroup
STEANE_INTERMEDIATE_P = SteaneBundle.intermediatePGroup
