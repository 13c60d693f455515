# ENTBOUND state representations: dense density matrices, compact X-states, GHZ family, noise
"""
State types and builders.

Basis ordering is the computational basis, lexicographic, |0...0> first; the
most significant bit is the leftmost qubit. An X-state pairs row ``k`` with
its bitwise complement ``2n-1-k``; in 1-based terms pair ``i`` occupies rows
``(i, 2n+1-i)``. ``XState`` stores the family

    diag = (a1, b_2, ..., b_n, b_n, ..., b_2, b1)
    rho[i, 2n+1-i] = z_i,  rho[2n+1-i, i] = conj(z_i)

with ``a1 + b1 + 2 * sum_{i>=2} b_i = 1``.
"""
import logging
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from entbound_config import get_tolerances
from errors import NotCanonicalError, PreconditionError, XStateError
from linalg_core import as_matrix, clamped_spectrum, hermiticity_error

logger = logging.getLogger(__name__)

MAX_DENSE_QUBITS = 10
# all-party entanglement needs at least two parties
MIN_PARTIES = 2


class BoundaryStateWarning(UserWarning):
    """|z1| sits exactly on the positivity boundary sqrt(a1*b1)"""
    pass


def require_parties(n_qubits: int, what: str = "all-party entanglement") -> int:
    if n_qubits < MIN_PARTIES:
        raise PreconditionError(f"{what} needs N >= {MIN_PARTIES} qubits, got {n_qubits}")
    return n_qubits


def qubits_for_dim(dim: int) -> int:
    n_qubits = int(dim).bit_length() - 1
    if dim < 2 or (1 << n_qubits) != dim:
        raise PreconditionError(f"dimension {dim} is not a power of two >= 2")
    return n_qubits


def popcount(values: np.ndarray, n_bits: int) -> np.ndarray:
    values = np.asarray(values, dtype=np.int64)
    count = np.zeros_like(values)
    for bit in range(n_bits):
        count += (values >> bit) & 1
    return count


# === DENSE STATES ===

@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense 2^N x 2^N density matrix (read-only array)"""

    data: np.ndarray

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise PreconditionError(f"density matrix must be square, got shape {arr.shape}")
        n_qubits = qubits_for_dim(arr.shape[0])
        if n_qubits > MAX_DENSE_QUBITS:
            raise PreconditionError(f"dense path supports at most {MAX_DENSE_QUBITS} qubits, got {n_qubits}")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.data
        return self.data.astype(dtype)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def n_qubits(self) -> int:
        return qubits_for_dim(self.dim)

    def validate(self, strict: bool = False) -> "DensityMatrix":
        """Check Hermiticity, unit trace and positivity; returns self"""
        tol = get_tolerances()
        herm_tol = tol.hermitian_strict if strict else tol.hermitian_check
        err = hermiticity_error(self.data)
        if err > herm_tol:
            raise PreconditionError(f"density matrix is not Hermitian (error {err:.3e})")
        trace = complex(np.trace(self.data))
        if abs(trace - 1.0) > max(tol.trace, 0.0 if strict else tol.atol):
            raise PreconditionError(f"density matrix trace is {trace.real:.15g}, expected 1")
        clamped_spectrum(self.data)
        return self

    def isclose(self, other, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.data, np.asarray(other), atol=atol, rtol=0.0))

    @classmethod
    def from_vector(cls, psi: Sequence[complex]) -> "DensityMatrix":
        vec = np.asarray(psi, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise PreconditionError("state vector is zero")
        vec = vec / norm
        return cls(np.outer(vec, vec.conj()))

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        dim = 1 << n_qubits
        return cls(np.eye(dim, dtype=np.complex128) / dim)


def random_density_matrix(n_qubits: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """Ginibre-distributed random state of the given rank (full rank by default)"""
    dim = 1 << n_qubits
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


# === GHZ FAMILY ===

@dataclass(frozen=True)
class GhzWeight:
    """Weighting angle of cos(theta)|0...0> + sin(theta)|1...1>"""

    theta: float = math.pi / 4

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi / 2):
            raise PreconditionError(f"GHZ weight theta must lie in [0, pi/2], got {self.theta}")

    @property
    def amplitudes(self) -> Tuple[float, float]:
        return math.cos(self.theta), math.sin(self.theta)


def _as_weight(theta: Union[float, GhzWeight, None]) -> GhzWeight:
    if theta is None:
        return GhzWeight()
    if isinstance(theta, GhzWeight):
        return theta
    return GhzWeight(float(theta))


def ghz_vector(n_qubits: int, theta: Union[float, GhzWeight, None] = None) -> np.ndarray:
    require_parties(n_qubits, "a GHZ state")
    c, s = _as_weight(theta).amplitudes
    vec = np.zeros(1 << n_qubits, dtype=np.complex128)
    vec[0] = c
    vec[-1] = s
    return vec


def ghz_state(n_qubits: int, theta: Union[float, GhzWeight, None] = None) -> DensityMatrix:
    """Projector onto cos(theta)|0...0> + sin(theta)|1...1>; theta = pi/4 is GHZ"""
    if not (2 <= n_qubits <= MAX_DENSE_QUBITS):
        raise PreconditionError(f"dense GHZ states need 2 <= N <= {MAX_DENSE_QUBITS}, got {n_qubits}")
    return DensityMatrix.from_vector(ghz_vector(n_qubits, theta))


def ghz_basis_vector(n_qubits: int, k: int, sign: int = +1) -> np.ndarray:
    """(|k> + sign |k-bar>)/sqrt(2) for k in [0, 2^(N-1))"""
    n = 1 << (n_qubits - 1)
    if not (0 <= k < n):
        raise PreconditionError(f"GHZ basis index {k} out of range [0, {n})")
    if sign not in (+1, -1):
        raise PreconditionError(f"sign must be +1 or -1, got {sign}")
    vec = np.zeros(2 * n, dtype=np.complex128)
    vec[k] = 1 / math.sqrt(2)
    vec[2 * n - 1 - k] = sign / math.sqrt(2)
    return vec


# === X-STATES ===

@dataclass(frozen=True, eq=False)
class XState:
    """Compact X-state: a1, b1, b_2..b_n, z_1..z_n with n = 2^(N-1)

    ``b`` holds b_2..b_n (length n-1) and ``z`` holds z_1..z_n (length n).
    ``pair_permutation[j]`` is the original 1-based pair index now stored at
    position j+1, when a relabeling has been applied.
    """

    n_qubits: int
    a1: float
    b1: float
    b: np.ndarray
    z: np.ndarray
    pair_permutation: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        tol = get_tolerances()
        if self.n_qubits < 1:
            raise PreconditionError(f"n_qubits must be >= 1, got {self.n_qubits}")
        n = 1 << (self.n_qubits - 1)
        b = np.array(self.b, dtype=np.float64).reshape(-1)
        z = np.array(self.z, dtype=np.complex128).reshape(-1)
        if b.shape[0] != n - 1:
            raise XStateError(f"expected {n - 1} populations b_2..b_n for N={self.n_qubits}, got {b.shape[0]}")
        if z.shape[0] != n:
            raise XStateError(f"expected {n} coherences z_1..z_n for N={self.n_qubits}, got {z.shape[0]}")
        a1, b1 = float(self.a1), float(self.b1)
        slack = tol.hermitian_strict

        if a1 < -slack or b1 < -slack or (b.size and b.min() < -slack):
            raise XStateError("populations must be non-negative")
        pair_sum = float(np.sum(b))
        total = a1 + b1 + 2 * pair_sum
        if abs(total - 1.0) > tol.trace:
            raise XStateError(f"normalization a1 + b1 + 2*sum(b) = {total:.15g}, expected 1")

        z_abs = np.abs(z)
        if n > 1 and np.any(z_abs[1:] > b + slack):
            worst = int(np.argmax(z_abs[1:] - b)) + 2
            raise XStateError(f"positivity |z_i| <= b_i violated at pair {worst}")
        corner = math.sqrt(max(a1, 0.0) * max(b1, 0.0))
        if z_abs[0] > corner + slack:
            raise XStateError(f"positivity |z_1| <= sqrt(a1*b1) violated ({z_abs[0]:.6g} > {corner:.6g})")
        if z_abs[0] > 0 and abs(z_abs[0] - corner) <= slack:
            warnings.warn(
                "|z_1| = sqrt(a1*b1): pure corner block, accepted as a boundary case",
                BoundaryStateWarning,
                stacklevel=3,
            )

        b.flags.writeable = False
        z.flags.writeable = False
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "_w1", pair_sum)
        dominant = float(z_abs[1:].max()) if n > 1 else 0.0
        object.__setattr__(self, "_canonical", bool(z_abs[0] >= dominant - slack))
        if self.pair_permutation is not None:
            perm = np.array(self.pair_permutation, dtype=np.int64)
            perm.flags.writeable = False
            object.__setattr__(self, "pair_permutation", perm)

    @property
    def n_pairs(self) -> int:
        return 1 << (self.n_qubits - 1)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def w1(self) -> float:
        """Sum of the non-dominant pair populations, sum_{j != 1} b_j"""
        return self._w1

    @property
    def z1(self) -> complex:
        return complex(self.z[0])

    @property
    def is_canonical(self) -> bool:
        return self._canonical

    @property
    def is_ghz_diagonal(self) -> bool:
        tol = get_tolerances().x_form
        return abs(self.a1 - self.b1) <= tol and bool(np.all(np.abs(self.z.imag) <= tol))

    def to_dense(self):
        return xstate_to_dense(self)

    def with_z1(self, z1: complex) -> "XState":
        z = self.z.copy()
        z[0] = z1
        return XState(self.n_qubits, self.a1, self.b1, self.b, z, self.pair_permutation)

    def require_canonical(self) -> "XState":
        if not self.is_canonical:
            raise NotCanonicalError(
                "X-state is not canonical (|z_1| is not the largest coherence); "
                "call canonicalize() first"
            )
        return self

    def canonicalize(self) -> "XState":
        """Relabel pairs with local bit flips so that |z_1| is maximal.

        Flipping the qubits set in the 0-based index m of the dominant pair
        maps basis state x to x XOR m, i.e. pair x to pair x XOR m. The result
        stays inside the stored family only when a1 == b1.
        """
        if self.is_canonical:
            return self
        tol = get_tolerances()
        z_abs = np.abs(self.z)
        m = int(np.argmax(z_abs))
        if abs(self.a1 - self.b1) > tol.x_form:
            raise NotCanonicalError(
                f"pair {m + 1} dominates but a1 != b1 ({self.a1:.6g} vs {self.b1:.6g}); "
                "the relabeled state leaves the stored X-state family"
            )
        n = self.n_pairs
        pops = np.concatenate(([(self.a1 + self.b1) / 2], self.b))
        positions = np.arange(n) ^ m
        new_pops = np.empty(n)
        new_z = np.empty(n, dtype=np.complex128)
        new_pops[positions] = pops
        new_z[positions] = self.z
        old_perm = np.arange(1, n + 1) if self.pair_permutation is None else self.pair_permutation
        new_perm = np.empty(n, dtype=np.int64)
        new_perm[positions] = old_perm
        logger.debug(f"relabeled X-state pairs with bit-flip mask {m:#x}")
        return XState(self.n_qubits, new_pops[0], new_pops[0], new_pops[1:], new_z, new_perm)

    def isclose(self, other: "XState", atol: float = 1e-12) -> bool:
        return (
            self.n_qubits == other.n_qubits
            and abs(self.a1 - other.a1) <= atol
            and abs(self.b1 - other.b1) <= atol
            and bool(np.allclose(self.b, other.b, atol=atol, rtol=0.0))
            and bool(np.allclose(self.z, other.z, atol=atol, rtol=0.0))
        )


def xstate_to_dense(x: XState) -> DensityMatrix:
    """Dense matrix with the layout of ``XState`` (see module docstring)"""
    n = x.n_pairs
    dim = 2 * n
    arr = np.zeros((dim, dim), dtype=np.complex128)
    arr[np.diag_indices(dim)] = np.concatenate(([x.a1], x.b, x.b[::-1], [x.b1]))
    rows = np.arange(n)
    arr[rows, dim - 1 - rows] = x.z
    arr[dim - 1 - rows, rows] = np.conj(x.z)
    return DensityMatrix(arr)


def x_form_violation(rho) -> Tuple[float, int, int]:
    """Largest modulus off the diagonal and anti-diagonal with its 0-based position"""
    arr = as_matrix(rho)
    dim = arr.shape[0]
    mask = np.ones((dim, dim), dtype=bool)
    idx = np.arange(dim)
    mask[idx, idx] = False
    mask[idx, dim - 1 - idx] = False
    off = np.where(mask, np.abs(arr), 0.0)
    flat = int(np.argmax(off))
    row, col = divmod(flat, dim)
    return float(off[row, col]), row, col


def dense_to_xstate(rho) -> XState:
    """Extract the X-state parameters of a dense matrix and canonicalize"""
    tol = get_tolerances()
    arr = as_matrix(rho)
    n_qubits = qubits_for_dim(arr.shape[0])
    worst, row, col = x_form_violation(arr)
    if worst > tol.x_form:
        raise XStateError("matrix is not an X-state", row + 1, col + 1, worst)
    herm = hermiticity_error(arr)
    if herm > tol.hermitian_check:
        raise XStateError(f"matrix is not Hermitian (error {herm:.3e})")

    dim = arr.shape[0]
    n = dim // 2
    diag = np.real(np.diag(arr))
    upper = diag[1:n]
    lower = diag[dim - 2:n - 1:-1] if n > 1 else diag[:0]
    if n > 1:
        gap = np.abs(upper - lower)
        k = int(np.argmax(gap))
        if gap[k] > tol.x_form:
            raise XStateError(
                f"pair {k + 2} has unequal populations ({upper[k]:.6g} vs {lower[k]:.6g}); "
                "only pair 1 may carry a1 != b1"
            )
    rows = np.arange(n)
    z = arr[rows, dim - 1 - rows]
    x = XState(n_qubits, diag[0], diag[-1], (upper + lower) / 2, z)
    return x.canonicalize()


def ghz_xstate(n_qubits: int, theta: Union[float, GhzWeight, None] = None) -> XState:
    """Compact form of ``ghz_state``; no dense size limit"""
    require_parties(n_qubits, "a GHZ state")
    c, s = _as_weight(theta).amplitudes
    n = 1 << (n_qubits - 1)
    z = np.zeros(n, dtype=np.complex128)
    z[0] = c * s
    return XState(n_qubits, c * c, s * s, np.zeros(n - 1), z)


def ghz_diagonal(n_qubits: int, weights: Sequence[float]) -> XState:
    """Mixture of the 2^N GHZ-basis projectors.

    ``weights[2k]`` weighs (|k> + |k-bar>)/sqrt(2) and ``weights[2k+1]`` weighs
    (|k> - |k-bar>)/sqrt(2), k in [0, 2^(N-1)).
    """
    require_parties(n_qubits, "a GHZ-diagonal state")
    tol = get_tolerances()
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.shape[0] != (1 << n_qubits):
        raise PreconditionError(f"expected {1 << n_qubits} weights, got {w.shape[0]}")
    if np.any(w < -tol.atol):
        raise PreconditionError("weights must be non-negative")
    if abs(float(np.sum(w)) - 1.0) > tol.atol:
        raise PreconditionError(f"weights sum to {np.sum(w):.15g}, expected 1")
    w = np.clip(w, 0.0, None)
    plus, minus = w[0::2], w[1::2]
    pops = (plus + minus) / 2
    z = (plus - minus) / 2
    return XState(n_qubits, pops[0], pops[0], pops[1:], z.astype(np.complex128)).canonicalize()


def random_xstate(n_qubits: int, rng: np.random.Generator, canonical: bool = True,
                  entangled: bool = False) -> XState:
    """Seeded random X-state; ``entangled`` forces |z_1| > w_1 (implies canonical)"""
    n = 1 << (n_qubits - 1)
    if entangled:
        q0 = rng.uniform(0.6, 1.0)
        rest = rng.dirichlet(np.ones(n - 1)) * (1 - q0) if n > 1 else np.zeros(0)
        u = rng.uniform(0.3, 0.7)
        r1 = rng.uniform(0.8, 1.0)
    else:
        q = rng.dirichlet(np.ones(n))
        q0, rest = q[0], q[1:]
        u = rng.uniform(0.0, 1.0)
        r1 = rng.uniform(0.0, 1.0)
    a1, b1 = q0 * u, q0 * (1 - u)
    b = rest / 2
    phases = np.exp(2j * np.pi * rng.uniform(size=n))
    z = np.empty(n, dtype=np.complex128)
    z[0] = r1 * math.sqrt(a1 * b1) * phases[0]
    if n > 1:
        z[1:] = b * rng.uniform(0.0, 1.0, size=n - 1) * phases[1:]
        largest = np.abs(z[1:]).max()
        if (canonical or entangled) and largest > abs(z[0]) and largest > 0:
            z[1:] *= abs(z[0]) / largest * rng.uniform(0.0, 1.0)
    # renormalize against accumulated rounding
    total = a1 + b1 + 2 * b.sum()
    return XState(n_qubits, a1 / total, b1 / total, b / total, z / total)


# === NOISE CHANNELS ===

class NoiseChannel(Enum):
    DEPOLARIZING = "depolarizing"
    DEPHASING = "dephasing"


def _conjugate_pauli(arr: np.ndarray, xmask: int, zmask: int) -> np.ndarray:
    """P rho P^dagger for P proportional to X^xmask Z^zmask (phases cancel)"""
    dim = arr.shape[0]
    idx = np.arange(dim)
    n_bits = dim.bit_length() - 1
    signs = 1 - 2 * (popcount(idx & zmask, n_bits) & 1)
    out = arr * np.outer(signs, signs)
    perm = idx ^ xmask
    return out[np.ix_(perm, perm)]


def dephasing_factors(n_qubits: int, p: float) -> np.ndarray:
    """Entry (x, y) scaling (1-p)^popcount(x XOR y) of product Z-dephasing"""
    idx = np.arange(1 << n_qubits)
    distance = popcount(idx[:, None] ^ idx[None, :], n_qubits)
    return (1.0 - p) ** distance


def apply_noise(state, channel: Union[NoiseChannel, str], p: float, *,
                rng_seed: Optional[int] = None, trajectories: Optional[int] = None):
    """Apply depolarizing or dephasing noise of strength p.

    depolarizing: (1-p) rho + p I / 2^N
    dephasing:    every qubit rho -> (1 - p/2) rho + (p/2) Z rho Z

    ``XState`` inputs stay compact. ``trajectories`` replaces the exact channel
    by the average of that many sampled Kraus branches (seeded by ``rng_seed``).
    """
    channel = NoiseChannel(channel)
    if not (0.0 <= p <= 1.0):
        raise PreconditionError(f"noise strength p must lie in [0, 1], got {p}")

    if isinstance(state, XState):
        if trajectories is not None:
            raise PreconditionError("sampled trajectories need a dense state")
        return _apply_noise_x(state, channel, p)

    dm = state if isinstance(state, DensityMatrix) else DensityMatrix(state)
    arr = dm.data
    n_qubits = dm.n_qubits

    if trajectories is not None:
        return DensityMatrix(_sample_trajectories(arr, n_qubits, channel, p, trajectories, rng_seed))

    if channel is NoiseChannel.DEPOLARIZING:
        out = (1.0 - p) * arr + p * np.eye(dm.dim) / dm.dim
    else:
        out = arr * dephasing_factors(n_qubits, p)
    return DensityMatrix(out)


def _apply_noise_x(x: XState, channel: NoiseChannel, p: float) -> XState:
    if channel is NoiseChannel.DEPOLARIZING:
        mix = p / x.dim
        return XState(
            x.n_qubits,
            (1 - p) * x.a1 + mix,
            (1 - p) * x.b1 + mix,
            (1 - p) * x.b + mix,
            (1 - p) * x.z,
            x.pair_permutation,
        )
    # every anti-diagonal entry couples x with its complement: distance N
    return XState(x.n_qubits, x.a1, x.b1, x.b, x.z * (1 - p) ** x.n_qubits, x.pair_permutation)


def _sample_trajectories(arr: np.ndarray, n_qubits: int, channel: NoiseChannel, p: float,
                         trajectories: int, rng_seed: Optional[int]) -> np.ndarray:
    if trajectories < 1:
        raise PreconditionError(f"trajectories must be >= 1, got {trajectories}")
    rng = np.random.default_rng(rng_seed)
    weights = 1 << np.arange(n_qubits - 1, -1, -1)
    acc = np.zeros_like(arr)
    for _ in range(trajectories):
        if channel is NoiseChannel.DEPOLARIZING:
            if rng.uniform() < p:
                # uniform Pauli string: X/Z components independent fair bits
                xbits = rng.integers(0, 2, size=n_qubits)
                zbits = rng.integers(0, 2, size=n_qubits)
            else:
                xbits = zbits = np.zeros(n_qubits, dtype=np.int64)
        else:
            xbits = np.zeros(n_qubits, dtype=np.int64)
            zbits = (rng.uniform(size=n_qubits) < p / 2).astype(np.int64)
        acc += _conjugate_pauli(arr, int(xbits @ weights), int(zbits @ weights))
    return acc / trajectories
