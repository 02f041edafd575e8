import os
import tempfile
import unittest

import helpers
from ldd_calculator.config.constants import SteaneBundle, data_file
from ldd_calculator.data.codes import (
    build_decoder,
    builtin_code13_decoder,
    load_candidates,
    load_code,
    load_dd,
    load_decoder,
    read_decoder_rows,
    store_code,
    store_dd,
    store_decoder,
)
from ldd_calculator.errors import CodeFormatError, CodeValidationError, DecoderError
from ldd_calculator.models.code import (
    DecouplingGroup,
    StabilizerCode,
    classify,
    code_distance,
    dress_generator,
    format_syndrome,
    full_pauli_group,
    logical_group,
    logical_label,
    make_decoder,
    min_weight_decoder,
    parse_syndrome,
    resolve_generator_order,
    spans_logical_group,
    syndrome,
    syndrome_bits,
    trivial_code,
    validate_code,
)
from ldd_calculator.models.pauli import GeneratorSet, format_pauli, parse_pauli, paulis_of_weight


class SyndromeTest(unittest.TestCase):
    def test_bit_zero_is_leftmost(self):
        self.assertEqual(format_syndrome(0b001, 3), "100")
        self.assertEqual(parse_syndrome("011", 3), 0b110)

    def test_malformed_syndrome(self):
        with self.assertRaises(DecoderError):
            parse_syndrome("01", 3)
        with self.assertRaises(DecoderError):
            parse_syndrome("012", 3)

    def test_steane_single_qubit_syndromes(self):
        code, _, _ = helpers.bundle("steane")

        self.assertEqual(str(syndrome(code, parse_pauli("IIIIIIX"))), "111000")
        self.assertEqual(str(syndrome(code, parse_pauli("IIIIIIZ"))), "000111")
        self.assertEqual(logical_label(code, parse_pauli("ZIIIIII")), 0b01)
        self.assertEqual(logical_label(code, parse_pauli("XIIIIII")), 0b10)


class CodeValidationTest(unittest.TestCase):
    def test_shipped_codes_validate(self):
        for name in ("steane", "code13", "trivial"):
            code, _, _ = helpers.bundle(name)
            self.assertEqual(validate_code(code), [], name)

    def test_distances(self):
        self.assertEqual(code_distance(helpers.bundle("steane")[0]), 3)
        self.assertEqual(code_distance(helpers.bundle("code13")[0]), 3)
        self.assertEqual(code_distance(helpers.perfect_code()[0]), 3)
        self.assertEqual(code_distance(trivial_code(2)), 1)

    def test_anticommuting_logical_is_reported(self):
        code = StabilizerCode.from_strings(["ZZ"], ["XX"], ["XI"])
        violations = validate_code(code)

        self.assertTrue(any("anticommutes with stabilizer" in v for v in violations))

    def test_dependent_generators_are_reported(self):
        code = StabilizerCode.from_strings(["ZZI", "ZZI"], ["XXX"], ["ZIZ"])

        self.assertTrue(any("rank" in v for v in validate_code(code)))

    def test_wrong_generator_count(self):
        code = StabilizerCode.from_strings(["ZZI"], ["XXX"], ["ZIZ"])

        self.assertTrue(any("expected 2 stabilizer generators" in v for v in validate_code(code)))


class CodeFileTest(unittest.TestCase):
    def test_round_trip_through_files(self):
        code, decoder, dd = helpers.bundle("steane")
        with tempfile.TemporaryDirectory() as tmp:
            store_code(code, os.path.join(tmp, "c.code"))
            store_decoder(decoder, os.path.join(tmp, "c.dec"))
            store_dd(dd, os.path.join(tmp, "c.dd"), ["# header"])
            again = load_code(os.path.join(tmp, "c.code"))
            self.assertEqual(again, code)
            self.assertEqual(load_decoder(os.path.join(tmp, "c.dec"), again), decoder)
            self.assertEqual(load_dd(os.path.join(tmp, "c.dd")).strings(), dd.strings())

    def test_format_error_carries_line(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "bad.code")
            with open(path, "w") as f:
                f.write("n 2\nk 1\nstabiliser ZZ\n")
            with self.assertRaises(CodeFormatError) as ctx:
                load_code(path)
            self.assertEqual(ctx.exception.line, 3)

    def test_invalid_code_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "bad.code")
            with open(path, "w") as f:
                f.write("n 2\nk 1\nstabilizer ZZ\nlogical_x XX\nlogical_z XI\n")
            with self.assertRaises(CodeValidationError) as ctx:
                load_code(path)
            self.assertTrue(ctx.exception.violations)

    def test_candidate_blocks(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "cands")
            with open(path, "w") as f:
                f.write("generator XXXXXXX\ngenerator ZZZZZZZ\n\n# second\ngenerator XIIYYZZ\ngenerator ZIIXXYY\n")
            groups = load_candidates(path)
        self.assertEqual([g.strings() for g in groups], [("XXXXXXX", "ZZZZZZZ"), ("XIIYYZZ", "ZIIXXYY")])


class DecoderTest(unittest.TestCase):
    def test_steane_table_is_total_and_consistent(self):
        code, decoder, _ = helpers.bundle("steane")

        self.assertEqual(len(decoder), 64)
        self.assertTrue(decoder.recover(0).is_identity())
        for bits, recovery in enumerate(decoder.table):
            self.assertEqual(syndrome_bits(code, recovery), bits)

    def test_steane_corrects_every_single_qubit_error(self):
        code, decoder, dd = helpers.bundle("steane")
        for E in paulis_of_weight(7, 1):
            self.assertTrue(classify(code, decoder, dd, E).is_correctable, str(E))

    def test_corrupted_row_names_syndrome(self):
        code, _, _ = helpers.bundle("steane")
        rows = read_decoder_rows(SteaneBundle.decoder_path(), code)
        rows[parse_syndrome("111000", 6)] = parse_pauli("IIIIIXI")
        with self.assertRaises(DecoderError) as ctx:
            make_decoder(code, rows)
        self.assertIn("111000", str(ctx.exception))

    def test_missing_row(self):
        code, _, _ = helpers.bundle("steane")
        rows = read_decoder_rows(SteaneBundle.decoder_path(), code)
        del rows[5]
        with self.assertRaises(DecoderError):
            make_decoder(code, rows)

    def test_min_weight_decoder_prefers_low_weight(self):
        code, decoder = helpers.perfect_code()

        self.assertEqual(len(decoder), 16)
        self.assertTrue(all(R.weight <= 1 for R in decoder.table))

    def test_support_order_reproduces_shipped_steane_table(self):
        code, shipped, _ = helpers.bundle("steane")

        self.assertEqual(min_weight_decoder(code, "support").table, shipped.table)

    def test_unknown_tie_break(self):
        code, _, _ = helpers.bundle("steane")
        with self.assertRaises(DecoderError):
            min_weight_decoder(code, "random")

    def test_builtin_code13_decoder_backs_the_bundle(self):
        code, decoder, _ = helpers.bundle("code13")
        rebuilt = builtin_code13_decoder()
        canonical = build_decoder(code, None, data_file("code13.overrides"))

        self.assertEqual(rebuilt.table, decoder.table)
        self.assertEqual(build_decoder(code, None, data_file("code13.overrides"), "support").table, rebuilt.table)
        relabelled = sum(
            logical_label(code, a) != logical_label(code, b) for a, b in zip(canonical.table, rebuilt.table)
        )
        self.assertEqual(relabelled, 713)

    def test_code13_overrides_are_corrected(self):
        code, decoder, dd = helpers.bundle("code13")
        with open(data_file("code13.overrides")) as f:
            targets = [line.split()[1] for line in f if line.startswith("override")]

        self.assertEqual(len(targets), 6)
        for text in targets:
            self.assertTrue(classify(code, decoder, dd, parse_pauli(text)).is_correctable, text)

    def test_generator_order_is_recovered(self):
        code, _, _ = helpers.bundle("steane")
        shuffled = StabilizerCode(
            code.n, code.k, GeneratorSet(code.n, tuple(reversed(code.stabilizers.members))),
            code.logical_x, code.logical_z,
        )
        rows = read_decoder_rows(SteaneBundle.decoder_path(), shuffled)
        with self.assertRaises(DecoderError):
            make_decoder(shuffled, rows)

        resolved = resolve_generator_order(shuffled, rows)

        self.assertIsNotNone(resolved)
        self.assertEqual(
            [format_pauli(S) for S in resolved.stabilizers],
            [format_pauli(S) for S in code.stabilizers],
        )
        make_decoder(resolved, rows)


class DecouplingGroupTest(unittest.TestCase):
    def test_identity_group_rejected(self):
        with self.assertRaises(CodeValidationError):
            DecouplingGroup.of(["III"])

    def test_suppression_pattern(self):
        group = DecouplingGroup.of(["XXXXXXX", "ZZZZZZZ"])

        self.assertEqual(group.pattern(parse_pauli("ZIIIIII")), 0b01)
        self.assertEqual(group.pattern(parse_pauli("XIIIIII")), 0b10)
        self.assertEqual(group.pattern(parse_pauli("YIIIIII")), 0b11)
        self.assertFalse(group.suppresses(parse_pauli("XXIIIII")))

    def test_dressing_changes_one_generator(self):
        code, _, dd = helpers.bundle("steane")
        dressed = dress_generator(dd, 0, parse_pauli("ZIZIZIZ"))

        self.assertEqual(dressed.strings(), ("YXYXYXY", "ZZZZZZZ"))
        self.assertTrue(spans_logical_group(code, dd))
        self.assertFalse(spans_logical_group(code, dressed))

    def test_full_pauli_group_suppresses_everything(self):
        group = full_pauli_group(2)
        for E in list(paulis_of_weight(2, 1)) + list(paulis_of_weight(2, 2)):
            self.assertTrue(group.suppresses(E))

    def test_logical_group(self):
        code, _, _ = helpers.bundle("code13")

        self.assertEqual(logical_group(code).strings(), ("XXXXXXXXXIIII", "IIIYYYYZIXYXY"))
        self.assertEqual(
            load_dd(data_file("ldd_13.dd")).strings(), ("IIIYYYYZIXYXY", "XXXXXXXXXIIII")
        )


class TrivialCodeTest(unittest.TestCase):
    def test_trivial_code_shape(self):
        code = trivial_code(3)

        self.assertEqual((code.n, code.k, code.r), (3, 3, 0))
        self.assertEqual(validate_code(code), [])
        self.assertEqual(len(min_weight_decoder(code)), 1)


if __name__ == "__main__":
    unittest.main()
