"""
ENTBOUND measurement record test suite
Four-observable extraction, shot sampling and record consistency
"""

import math
import os
import sys
import unittest

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from errors import PreconditionError, RecordError
from linalg_core import fidelity, fidelity_to_pure
from measurement import (
    MeasurementRecord,
    extract_record,
    ghz_fidelity,
    ghz_infidelity,
    sample_record,
    sigma_fidelity,
    sigma_infidelity,
)
from states import DensityMatrix, apply_noise, ghz_state, ghz_vector, random_density_matrix, random_xstate


def sigma_prime(n_qubits: int) -> np.ndarray:
    dim = 1 << n_qubits
    out = np.zeros((dim, dim))
    out[0, 0] = out[-1, -1] = 0.5
    return out


class TestExtraction(unittest.TestCase):

    def assertRecord(self, record, expected, places=15):
        for field, value in zip(("p00", "p11", "z_re", "z_im"), expected):
            self.assertAlmostEqual(getattr(record, field), value, places=places, msg=field)
        self.assertIsNone(record.shots)

    def test_ghz(self):
        for n in range(2, 7):
            with self.subTest(n=n):
                self.assertRecord(extract_record(ghz_state(n)), (0.5, 0.5, 0.5, 0.0))

    def test_maximally_mixed(self):
        self.assertRecord(extract_record(DensityMatrix.maximally_mixed(3)), (1 / 8, 1 / 8, 0.0, 0.0))

    def test_weighted_ghz(self):
        record = extract_record(ghz_state(3, math.pi / 6))
        self.assertRecord(record, (0.75, 0.25, math.sqrt(3) / 4, 0.0))

    def test_imaginary_coherence_sign(self):
        rho = np.eye(4, dtype=complex) / 4
        rho[0, 3], rho[3, 0] = 0.1j, -0.1j
        record = extract_record(rho)
        self.assertAlmostEqual(record.z_im, 0.1, places=15)
        self.assertEqual(record.z, rho[0, 3])

    def test_reads_back_x_state_corner(self):
        rng = np.random.default_rng(53)
        for n in (2, 3, 4, 5):
            x = random_xstate(n, rng)
            expected = (x.a1, x.b1, x.z1.real, x.z1.imag)
            with self.subTest(n=n):
                self.assertRecord(extract_record(x.to_dense()), expected)
                self.assertRecord(extract_record(x), expected)
                self.assertEqual(MeasurementRecord.from_xstate(x), extract_record(x))


class TestSampling(unittest.TestCase):

    def test_many_shots_approach_exact(self):
        exact = extract_record(ghz_state(3))
        sampled = sample_record(ghz_state(3), 1_000_000, rng_seed=7)
        self.assertEqual(sampled.shots, 1_000_000)
        for field in ("p00", "p11", "z_re", "z_im"):
            self.assertAlmostEqual(getattr(sampled, field), getattr(exact, field), delta=5e-3, msg=field)

    def test_single_shot_ranges(self):
        rho = apply_noise(ghz_state(3), "depolarizing", 0.4)
        for seed in range(50):
            record = sample_record(rho, 1, rng_seed=seed)
            self.assertIn(record.p00, (0.0, 1.0))
            self.assertIn(record.p11, (0.0, 1.0))
            self.assertIn(record.z_re, (-0.5, 0.0, 0.5))
            self.assertIn(record.z_im, (-0.5, 0.0, 0.5))

    def test_seed_reproducibility(self):
        rho = random_density_matrix(3, np.random.default_rng(0))
        self.assertEqual(sample_record(rho, 500, rng_seed=11), sample_record(rho, 500, rng_seed=11))
        self.assertNotEqual(sample_record(rho, 500, rng_seed=11), sample_record(rho, 500, rng_seed=12))

    def test_error_scales_as_inverse_root_shots(self):
        rho = apply_noise(ghz_state(3), "depolarizing", 0.3)
        exact = np.array([getattr(extract_record(rho), f) for f in ("p00", "p11", "z_re", "z_im")])
        shot_counts = np.array([100, 1_000, 10_000, 100_000])
        errors = []
        for shots in shot_counts:
            deviations = []
            for seed in range(100):
                r = sample_record(rho, int(shots), rng_seed=seed)
                deviations.append(np.abs(np.array([r.p00, r.p11, r.z_re, r.z_im]) - exact))
            errors.append(np.mean(deviations))
        slope = np.polyfit(np.log(shot_counts), np.log(errors), 1)[0]
        self.assertAlmostEqual(slope, -0.5, delta=0.1)
        print(f"✅ sampling error exponent {slope:.3f}")

    def test_bad_shots(self):
        with self.assertRaises(PreconditionError):
            sample_record(ghz_state(2), 0)
        with self.assertRaises(PreconditionError):
            MeasurementRecord(0.5, 0.5, 0.5, 0.0, shots=0)


class TestConsistency(unittest.TestCase):

    def test_violations_name_constraint(self):
        cases = [
            ((1.2, 0.0, 0.0, 0.0), "0 <= p00 <= 1"),
            ((0.5, -0.1, 0.0, 0.0), "0 <= p11 <= 1"),
            ((0.6, 0.6, 0.0, 0.0), "p00 + p11 <= 1"),
            ((0.5, 0.5, 0.6, 0.0), "|z|^2 <= p00*p11"),
        ]
        for fields, constraint in cases:
            with self.subTest(constraint=constraint):
                with self.assertRaises(RecordError) as ctx:
                    MeasurementRecord(*fields).check_consistency()
                self.assertEqual(ctx.exception.constraint, constraint)
                self.assertIn(constraint, str(ctx.exception))

    def test_non_finite_field(self):
        with self.assertRaises(RecordError):
            MeasurementRecord(float("nan"), 0.5, 0.0, 0.0)

    def test_shot_noise_slack_and_projection(self):
        m = MeasurementRecord(0.5, 0.5, 0.505, 0.0, shots=10_000)
        self.assertIs(m.check_consistency(), m)
        with self.assertLogs("measurement", level="WARNING") as logs:
            projected = m.project_consistent()
        self.assertIn("Clipped", logs.output[0])
        self.assertAlmostEqual(projected.z_re, 0.5, places=15)
        self.assertEqual(projected.shots, 10_000)
        projected.check_consistency()

    def test_consistent_record_not_moved(self):
        m = extract_record(apply_noise(ghz_state(3), "dephasing", 0.2))
        self.assertEqual(m.project_consistent(), m)


class TestRecordFidelities(unittest.TestCase):

    def test_sigma_fidelity_against_dense_uhlmann(self):
        rng = np.random.default_rng(59)
        for k in range(200):
            n = 2 + k % 3
            rho = random_density_matrix(n, rng, rank=int(rng.integers(2, (1 << n) + 1)))
            with self.subTest(k=k):
                self.assertAlmostEqual(sigma_fidelity(extract_record(rho)), fidelity(sigma_prime(n), rho), delta=1e-10)

    def test_sigma_fidelity_examples(self):
        self.assertAlmostEqual(sigma_fidelity(MeasurementRecord(0.5, 0.5, 0.5, 0.0)), 1 / math.sqrt(2), places=15)
        self.assertAlmostEqual(sigma_fidelity(MeasurementRecord(0.5, 0.5, 0.0, 0.0)), 1.0, places=15)

    def test_infidelities_resolve_tiny_coherence(self):
        for z in (1e-9, 1e-12, 1e-15):
            m = MeasurementRecord(0.5, 0.5, z, 0.0)
            with self.subTest(z=z):
                self.assertEqual(sigma_fidelity(m), 1.0)
                self.assertAlmostEqual(sigma_infidelity(m) / z ** 2, 1.0, places=12)
        m = MeasurementRecord(0.5, 0.5, 0.0, 1e-10)
        self.assertAlmostEqual(sigma_infidelity(m) / 1e-20, 1.0, places=12)
        self.assertEqual(sigma_infidelity(MeasurementRecord(0.5, 0.5, 0.0, 0.0)), 0.0)

    def test_infidelities_match_fidelities(self):
        rng = np.random.default_rng(67)
        for _ in range(200):
            m = extract_record(random_density_matrix(3, rng))
            theta = rng.uniform(0, math.pi / 2)
            self.assertAlmostEqual(sigma_infidelity(m), 1 - sigma_fidelity(m) ** 2, delta=1e-14)
            self.assertAlmostEqual(ghz_infidelity(m, theta), 1 - ghz_fidelity(m, theta) ** 2, delta=1e-14)

    def test_ghz_fidelity_against_pure_overlap(self):
        rng = np.random.default_rng(61)
        for _ in range(200):
            rho = random_density_matrix(3, rng)
            theta = rng.uniform(0, math.pi / 2)
            self.assertAlmostEqual(ghz_fidelity(extract_record(rho), theta),
                                   fidelity_to_pure(rho, ghz_vector(3, theta)), delta=1e-12)


if __name__ == "__main__":
    unittest.main()
