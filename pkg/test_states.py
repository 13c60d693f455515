"""
ENTBOUND state representation test suite
Dense states, compact X-states, GHZ family builders and noise channels
"""

import itertools
import math
import os
import sys
import unittest

import numpy as np
from numpy.testing import assert_allclose

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from errors import NotCanonicalError, PreconditionError, XStateError
from pauli_chi import s_operator
from states import (
    BoundaryStateWarning,
    DensityMatrix,
    GhzWeight,
    NoiseChannel,
    XState,
    apply_noise,
    dense_to_xstate,
    ghz_basis_vector,
    ghz_diagonal,
    ghz_state,
    ghz_xstate,
    random_density_matrix,
    random_xstate,
    xstate_to_dense,
)


class TestGhzBuilders(unittest.TestCase):

    def test_bell_state(self):
        rho = ghz_state(2, math.pi / 4).data
        expected = np.zeros((4, 4))
        expected[np.ix_([0, 3], [0, 3])] = 0.5
        assert_allclose(rho, expected, atol=1e-15)

    def test_theta_zero_is_product(self):
        rho = ghz_state(3, GhzWeight(0.0)).data
        expected = np.zeros((8, 8))
        expected[0, 0] = 1.0
        assert_allclose(rho, expected, atol=1e-15)

    def test_weighted_corner_entries(self):
        theta = math.pi / 6
        rho = ghz_state(4, theta).data
        self.assertAlmostEqual(rho[0, 0].real, math.cos(theta) ** 2, places=15)
        self.assertAlmostEqual(rho[15, 15].real, math.sin(theta) ** 2, places=15)
        self.assertAlmostEqual(rho[0, 15].real, math.cos(theta) * math.sin(theta), places=15)
        self.assertEqual(np.count_nonzero(np.abs(rho) > 1e-15), 4)

    def test_ghz_as_xstate(self):
        with self.assertWarns(BoundaryStateWarning):
            x = ghz_xstate(3)
        self.assertAlmostEqual(x.a1, 0.5)
        self.assertAlmostEqual(x.b1, 0.5)
        self.assertAlmostEqual(x.z1, 0.5)
        assert_allclose(x.b, 0.0)
        assert_allclose(x.z[1:], 0.0)
        assert_allclose(x.to_dense().data, ghz_state(3).data, atol=1e-15)

    def test_range_checks(self):
        with self.assertRaises(PreconditionError):
            ghz_state(1)
        with self.assertRaises(PreconditionError):
            ghz_xstate(1)
        with self.assertRaises(PreconditionError):
            ghz_state(11)
        with self.assertRaises(PreconditionError):
            GhzWeight(2.0)

    def test_builders_pass_strict_validation(self):
        rng = np.random.default_rng(4)
        outputs = [ghz_state(n, rng.uniform(0, math.pi / 2)) for n in range(2, 7)]
        outputs += [random_xstate(n, rng).to_dense() for n in range(1, 7)]
        outputs += [ghz_diagonal(3, rng.dirichlet(np.ones(8))).to_dense()]
        outputs += [apply_noise(ghz_state(4), "depolarizing", 0.3), apply_noise(ghz_state(4), "dephasing", 0.3)]
        for rho in outputs:
            with self.subTest(dim=rho.dim):
                rho.validate(strict=True)


class TestXStateLayout(unittest.TestCase):

    def test_ghz2_dense_layout(self):
        dense = xstate_to_dense(XState(2, 0.5, 0.5, [0.0], [0.5, 0.0])).data
        self.assertEqual(dense[0, 0], 0.5)
        self.assertEqual(dense[3, 3], 0.5)
        self.assertEqual(dense[0, 3], 0.5)
        self.assertEqual(dense[3, 0], 0.5)
        self.assertEqual(np.count_nonzero(dense), 4)

    def test_pair_rows(self):
        """Pair i sits at 1-based rows (i, 2n+1-i) with z_i above the diagonal"""
        x = XState(3, 0.2, 0.1, [0.1, 0.1, 0.15], [0.05, 0.02j, 0.03, -0.04])
        dense = x.to_dense().data
        assert_allclose(np.diag(dense).real, [0.2, 0.1, 0.1, 0.15, 0.15, 0.1, 0.1, 0.1])
        for i, z in enumerate(x.z, start=1):
            self.assertEqual(dense[i - 1, 8 - i], z)
            self.assertEqual(dense[8 - i, i - 1], np.conj(z))

    def test_round_trip(self):
        rng = np.random.default_rng(9)
        for k in range(200):
            n = 2 + k % 5
            x = random_xstate(n, rng)
            with self.subTest(k=k, n=n):
                back = dense_to_xstate(xstate_to_dense(x))
                self.assertTrue(back.isclose(x, atol=1e-15))

    def test_maximally_mixed(self):
        x = dense_to_xstate(DensityMatrix.maximally_mixed(3))
        self.assertAlmostEqual(x.a1, 1 / 8)
        self.assertAlmostEqual(x.b1, 1 / 8)
        assert_allclose(x.b, 1 / 8)
        assert_allclose(x.z, 0.0)

    def test_ghz3_dense(self):
        x = dense_to_xstate(ghz_state(3))
        self.assertAlmostEqual(x.a1, 0.5)
        self.assertAlmostEqual(x.b1, 0.5)
        self.assertAlmostEqual(abs(x.z1), 0.5)

    def test_non_x_entry_reported(self):
        rho = np.eye(4, dtype=complex) / 4
        rho[0, 1] = rho[1, 0] = 0.01
        with self.assertRaises(XStateError) as ctx:
            dense_to_xstate(rho)
        self.assertEqual((ctx.exception.row, ctx.exception.col), (1, 2))
        self.assertAlmostEqual(ctx.exception.modulus, 0.01)
        self.assertIn("(1, 2)", str(ctx.exception))

    def test_unequal_pair_populations_rejected(self):
        rho = np.diag([0.25, 0.3, 0.2, 0.25]).astype(complex)
        with self.assertRaises(XStateError):
            dense_to_xstate(rho)

    def test_invariant_violations(self):
        with self.assertRaises(XStateError):
            XState(2, 0.5, 0.5, [0.1], [0.0, 0.0])  # normalization
        with self.assertRaises(XStateError):
            XState(2, 0.4, 0.4, [0.1], [0.0, 0.2])  # |z_2| > b_2
        with self.assertRaises(XStateError):
            XState(2, 0.4, 0.4, [0.1], [0.45, 0.0])  # |z_1| > sqrt(a1 b1)
        with self.assertRaises(XStateError):
            XState(3, 0.5, 0.5, [0.0], [0.5, 0.0])  # wrong lengths


class TestCanonicalization(unittest.TestCase):

    def setUp(self):
        self.x = XState(3, 0.1, 0.1, [0.1, 0.25, 0.05], [0.05, 0.02, 0.2, 0.01])

    def test_relabels_dominant_pair(self):
        self.assertFalse(self.x.is_canonical)
        canon = self.x.canonicalize()
        self.assertTrue(canon.is_canonical)
        self.assertAlmostEqual(canon.a1, 0.25)
        self.assertAlmostEqual(canon.b1, 0.25)
        assert_allclose(canon.b, [0.05, 0.1, 0.1])
        assert_allclose(canon.z, [0.2, 0.01, 0.05, 0.02])
        self.assertEqual(canon.pair_permutation.tolist(), [3, 4, 1, 2])

    def test_relabeling_is_a_bit_flip(self):
        """Test that the canonical form equals X on the middle qubit applied to the state"""
        perm = np.arange(8) ^ 0b010
        flipped = self.x.to_dense().data[np.ix_(perm, perm)]
        assert_allclose(self.x.canonicalize().to_dense().data, flipped, atol=1e-15)

    def test_dense_input_is_canonicalized(self):
        canon = dense_to_xstate(self.x.to_dense())
        self.assertTrue(canon.is_canonical)
        self.assertAlmostEqual(abs(canon.z1), 0.2)

    def test_unequal_corner_cannot_relabel(self):
        x = XState(2, 0.3, 0.1, [0.3], [0.05, 0.2])
        with self.assertRaises(NotCanonicalError):
            x.canonicalize()
        with self.assertRaises(NotCanonicalError):
            x.require_canonical()


class TestGhzDiagonal(unittest.TestCase):

    def test_uniform_weights(self):
        x = ghz_diagonal(3, np.full(8, 1 / 8))
        assert_allclose(x.to_dense().data, np.eye(8) / 8, atol=1e-15)
        assert_allclose(x.z, 0.0)

    def test_pure_ghz_plus(self):
        w = np.zeros(8)
        w[0] = 1.0
        with self.assertWarns(BoundaryStateWarning):
            x = ghz_diagonal(3, w)
        self.assertAlmostEqual(x.a1, 0.5)
        self.assertAlmostEqual(x.z1, 0.5)

    def test_three_quarter_mixture(self):
        w = np.zeros(8)
        w[0], w[1] = 0.75, 0.25
        x = ghz_diagonal(3, w)
        self.assertAlmostEqual(x.a1, 0.5)
        self.assertAlmostEqual(x.b1, 0.5)
        self.assertAlmostEqual(x.z1, 0.25)
        assert_allclose(x.b, 0.0)
        assert_allclose(x.z[1:], 0.0)

    def test_matches_dense_mixture(self):
        rng = np.random.default_rng(31)
        for n in (2, 3, 4):
            w = rng.dirichlet(np.ones(1 << n))
            dense = np.zeros((1 << n, 1 << n), dtype=complex)
            for k, sign in itertools.product(range(1 << (n - 1)), (+1, -1)):
                v = ghz_basis_vector(n, k, sign)
                dense += w[2 * k + (0 if sign > 0 else 1)] * np.outer(v, v.conj())
            x = ghz_diagonal(n, w)
            with self.subTest(n=n):
                self.assertTrue(x.is_ghz_diagonal)
                self.assertTrue(x.is_canonical)
                assert_allclose(x.to_dense().data, dense_to_xstate(dense).to_dense().data, atol=1e-14)

    def test_invalid_weights(self):
        with self.assertRaises(PreconditionError):
            ghz_diagonal(2, [0.5, 0.5, 0.5, -0.5])
        with self.assertRaises(PreconditionError):
            ghz_diagonal(1, [1.0, 0.0])
        with self.assertRaises(PreconditionError):
            ghz_diagonal(2, [0.5, 0.5])
        with self.assertRaises(PreconditionError):
            ghz_diagonal(2, [0.3, 0.3, 0.3, 0.3])


class TestNoise(unittest.TestCase):

    def test_zero_noise_is_identity(self):
        rho = random_density_matrix(3, np.random.default_rng(0))
        for channel in NoiseChannel:
            with self.subTest(channel=channel):
                self.assertTrue(apply_noise(rho, channel, 0.0).isclose(rho, atol=1e-15))

    def test_full_depolarizing(self):
        rho = apply_noise(ghz_state(3), "depolarizing", 1.0)
        assert_allclose(rho.data, np.eye(8) / 8, atol=1e-15)

    def test_depolarized_ghz3(self):
        dense = dense_to_xstate(apply_noise(ghz_state(3), "depolarizing", 0.5))
        compact = apply_noise(ghz_xstate(3), "depolarizing", 0.5)
        for x in (dense, compact):
            self.assertAlmostEqual(x.a1, 5 / 16)
            self.assertAlmostEqual(x.b1, 5 / 16)
            assert_allclose(x.b, 1 / 16)
            self.assertAlmostEqual(abs(x.z1), 1 / 4)

    def test_dephasing_is_z_string_mixture(self):
        """Test the entry scaling against the explicit mixture of Z-string conjugations"""
        rng = np.random.default_rng(6)
        for n in (1, 2, 3, 4):
            rho = random_density_matrix(n, rng).data
            p = rng.uniform()
            expected = np.zeros_like(rho)
            for b in range(1 << n):
                weight_z = bin(b).count("1")
                prob = (p / 2) ** weight_z * (1 - p / 2) ** (n - weight_z)
                S = s_operator(b, n).to_matrix()
                expected += prob * S @ rho @ S.conj().T
            with self.subTest(n=n):
                assert_allclose(apply_noise(rho, "dephasing", p).data, expected, atol=1e-14)

    def test_compact_channels_match_dense(self):
        rng = np.random.default_rng(7)
        for n in (2, 3, 4, 5):
            x = random_xstate(n, rng)
            for channel in NoiseChannel:
                p = rng.uniform()
                with self.subTest(n=n, channel=channel):
                    compact = apply_noise(x, channel, p)
                    self.assertIsInstance(compact, XState)
                    dense = apply_noise(x.to_dense(), channel, p)
                    assert_allclose(compact.to_dense().data, dense.data, atol=1e-15)

    def test_trajectories_approach_channel(self):
        rho = ghz_state(2)
        for channel in NoiseChannel:
            with self.subTest(channel=channel):
                exact = apply_noise(rho, channel, 0.3)
                sampled = apply_noise(rho, channel, 0.3, rng_seed=5, trajectories=4000)
                again = apply_noise(rho, channel, 0.3, rng_seed=5, trajectories=4000)
                assert_allclose(sampled.data, again.data)
                assert_allclose(sampled.data, exact.data, atol=0.05)
                sampled.validate()

    def test_bad_arguments(self):
        with self.assertRaises(PreconditionError):
            apply_noise(ghz_state(2), "depolarizing", 1.5)
        with self.assertRaises(ValueError):
            apply_noise(ghz_state(2), "amplitude-damping", 0.1)
        with self.assertRaises(PreconditionError):
            apply_noise(random_xstate(2, np.random.default_rng(0)), "dephasing", 0.1, trajectories=10)


if __name__ == "__main__":
    unittest.main()
