"""
ENTBOUND state file test suite
Schema validation, domain checks on load and deterministic saving
"""

import json
import os
import sys
import tempfile
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from errors import PreconditionError, StateFileError
from measurement import MeasurementRecord
from state_files import (
    DenseFile,
    GhzDiagonalFile,
    RecordFile,
    XStateFile,
    dumps_state,
    load_state,
    parse_state_file,
    save_state,
    to_file_model,
)
from states import DensityMatrix, XState, random_xstate

NON_CANONICAL = {
    "format": "xstate", "n_qubits": 2, "a1": 0.3, "b1": 0.1, "z1_re": 0.05, "z1_im": 0.0,
    "pairs": [{"b": 0.3, "z_re": 0.2, "z_im": 0.0}],
}


class TestParsing(unittest.TestCase):

    def test_discriminated_formats(self):
        self.assertIsInstance(parse_state_file(json.dumps(NON_CANONICAL)), XStateFile)
        self.assertIsInstance(parse_state_file('{"format": "ghz-diagonal", "n_qubits": 2, "weights": [1, 0, 0, 0]}'),
                              GhzDiagonalFile)
        self.assertIsInstance(parse_state_file(
            '{"format": "record", "n_qubits": 3, "p00": 0.5, "p11": 0.5, "z_re": 0.5, "z_im": 0}'), RecordFile)
        self.assertIsInstance(parse_state_file(
            '{"format": "dense", "n_qubits": 1, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]}'), DenseFile)

    def test_schema_errors(self):
        bad = [
            '{"format": "tensor", "n_qubits": 2}',
            '{"format": "dense", "n_qubits": 1, "re": [[1, 0]], "im": [[0, 0]]}',
            '{"format": "dense", "n_qubits": 11, "re": [], "im": []}',
            '{"format": "ghz-diagonal", "n_qubits": 2, "weights": [1, 0]}',
            '{"format": "record", "n_qubits": 2, "p00": 0.5, "p11": 0.5, "z_re": 0, "z_im": 0, "shots": 0}',
            '{"format": "record", "n_qubits": 1, "p00": 0.5, "p11": 0.5, "z_re": 0, "z_im": 0}',
            '{"format": "ghz-diagonal", "n_qubits": 1, "weights": [1, 0]}',
            '{"format": "xstate", "n_qubits": 1, "a1": 0.5, "b1": 0.5, "z1_re": 0.5, "z1_im": 0, "pairs": []}',
            json.dumps({**NON_CANONICAL, "extra": 1}),
            "not json",
        ]
        for text in bad:
            with self.subTest(text=text):
                with self.assertRaises(StateFileError):
                    parse_state_file(text)


class TestLoading(unittest.TestCase):

    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.dir = tmp.name

    def write(self, name, payload) -> str:
        path = os.path.join(self.dir, name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f)
        return path

    def test_xstate_kept_as_written(self):
        x = load_state(self.write("x.json", NON_CANONICAL))
        self.assertIsInstance(x, XState)
        self.assertFalse(x.is_canonical)

    def test_domain_violations_rejected(self):
        unnormalized = {**NON_CANONICAL, "a1": 0.5}
        path = self.write("bad.json", unnormalized)
        with self.assertRaises(StateFileError) as ctx:
            load_state(path)
        self.assertIn("bad.json", str(ctx.exception))

        not_psd = {"format": "dense", "n_qubits": 1, "re": [[1.5, 0], [0, -0.5]], "im": [[0, 0], [0, 0]]}
        with self.assertRaises(StateFileError):
            load_state(self.write("psd.json", not_psd))

    def test_ghz_diagonal_loads_canonical(self):
        weights = [0.1, 0.05, 0.55, 0.3]
        x = load_state(self.write("w.json", {"format": "ghz-diagonal", "n_qubits": 2, "weights": weights}))
        self.assertTrue(x.is_canonical)
        self.assertAlmostEqual(abs(x.z1), 0.125)

    def test_save_and_reload(self):
        rng = np.random.default_rng(83)
        x = random_xstate(3, rng)
        path = os.path.join(self.dir, "x.json")
        with self.assertLogs("state_files", level="INFO"):
            text = save_state(x, path)
        self.assertTrue(load_state(path).isclose(x, atol=0.0))
        self.assertEqual(dumps_state(load_state(path)), text)

        dense = DensityMatrix.maximally_mixed(2)
        path = os.path.join(self.dir, "d.json")
        save_state(dense, path)
        self.assertTrue(load_state(path).isclose(dense, atol=0.0))

    def test_record_needs_qubit_count(self):
        record = MeasurementRecord(0.5, 0.5, 0.5, 0.0, shots=100)
        with self.assertRaises(PreconditionError):
            to_file_model(record)
        payload = json.loads(dumps_state(record, n_qubits=4))
        self.assertEqual(payload["shots"], 100)
        self.assertEqual(payload["format"], "record")

    def test_unsupported_object(self):
        with self.assertRaises(PreconditionError):
            to_file_model([1, 2, 3])

    def test_single_qubit_compact_forms_not_written(self):
        with self.assertRaises(PreconditionError):
            to_file_model(XState(1, 0.5, 0.5, [], [0.25]))
        with self.assertRaises(PreconditionError):
            to_file_model(MeasurementRecord(0.5, 0.5, 0.5, 0.0), n_qubits=1)
        dense = to_file_model(DensityMatrix.maximally_mixed(1))
        self.assertIsInstance(dense, DenseFile)


if __name__ == "__main__":
    unittest.main()
