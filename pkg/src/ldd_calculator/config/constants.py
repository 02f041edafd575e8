from importlib import resources


class EngineLimits:
    max_enumeration_qubits = 16
    max_decoder_syndrome_bits = 20
    # lo-half arrays of 4^7 entries; hi blocks sized to keep temporaries near 2^20 cells
    split_low_qubits = 7
    block_cells = 1 << 20
    rejection_cap = 1_000_000
    tie_tolerance = 1e-12
    mc_batch = 1 << 16


QEC_TAGS = (
    "A",
    "St",
    "SlashedSt",
    "S",
    "notS",
    "C",
    "notC",
    "D",
    "L",
    "notS-St",
    "S-St",
    "notS-notC",
    "notS-C",
    "S-notC",
    "S-C",
    "notS-D",
    "S-D",
    "notC-D",
    "S-SlashedSt",
    "notS-SlashedSt",
)

QED_TAGS = (
    "A",
    "S",
    "notS",
    "St",
    "L",
    "StL",
    "D",
    "SlashedSt",
    "S-St",
    "notS-St",
    "S-L",
    "notS-L",
    "S-StL",
    "notS-StL",
    "S-D",
    "notS-D",
    "S-SlashedSt",
    "notS-SlashedSt",
)

QEC_STRATEGIES = ("dd_phys", "qec_only", "ldd_only", "hybrid")
QED_STRATEGIES = ("qed_only", "qed_hybrid", "qed_ldd_only")
STRATEGIES = QEC_STRATEGIES + QED_STRATEGIES

COMPARATORS = {"dd": "dd_phys", "ldd": "ldd_only", "qec": "qec_only"}


def data_file(name: str) -> str:
    return str(resources.files("ldd_calculator.data").joinpath("files", name))


class BundleConstants:
    """
    A shipped (code, decoder, DD group) combination.
    Subclasses name their files; paths are resolved inside the package.
    """

    codeFile = None
    decoderFile = None
    overridesFile = None
    ddFile = None
    # enumeration order for equal-weight recoveries when no decoder table is shipped
    tieBreak = "canonical"
    k = 1

    @classmethod
    def code_path(cls):
        return data_file(cls.codeFile) if cls.codeFile else None

    @classmethod
    def decoder_path(cls):
        return data_file(cls.decoderFile) if cls.decoderFile else None

    @classmethod
    def overrides_path(cls):
        return data_file(cls.overridesFile) if cls.overridesFile else None

    @classmethod
    def dd_path(cls):
        return data_file(cls.ddFile) if cls.ddFile else None


class SteaneBundle(BundleConstants):
    codeFile = "steane.code"
    decoderFile = "steane.dec"
    ddFile = "ldd_standard_7.dd"

    # low / intermediate p representatives of the imperfect-recovery scan
    lowPGroup = "ldd_2084.dd"
    intermediatePGroup = "ldd_665.dd"


class Code13Bundle(BundleConstants):
    codeFile = "code13.code"
    overridesFile = "code13.overrides"
    ddFile = "ldd_13.dd"
    tieBreak = "support"


class TrivialBundle(BundleConstants):
    k = 1


def get_bundle(name: str):
    match name:
        case "steane":
            return SteaneBundle
        case "code13":
            return Code13Bundle
        case "trivial":
            return TrivialBundle
        case _:
            raise KeyError(f"unknown bundle {name!r}; expected steane, code13 or trivial")
