# ENTBOUND Pauli strings, the even-Z commutant and the X-part channel
"""
Pauli-string algebra behind the X-part channel.

Bit order: the most significant bit of an index is the leftmost tensor factor.
``s_operator(i)`` maps bit 0 -> I and bit 1 -> Z; ``r_operator(i)`` maps bit 0 -> X
and bit 1 -> Y. The commutant C is the set of S strings with an even number of
Z letters; averaging conjugation over C keeps exactly the diagonal and the
anti-diagonal of a matrix.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

import numpy as np

from errors import PauliError
from linalg_core import as_matrix
from states import DensityMatrix, popcount, qubits_for_dim

logger = logging.getLogger(__name__)

DENSE_CENSUS_MAX_QUBITS = 5

_PHASES = (1, 1j, -1, -1j)

_SINGLE = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# single-qubit products: (left, right) -> (phase, letter)
_PRODUCT = {
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


def _letter_product(left: str, right: str) -> Tuple[complex, str]:
    if left == "I":
        return 1, right
    if right == "I":
        return 1, left
    if left == right:
        return 1, "I"
    return _PRODUCT[(left, right)]


def _normalize_phase(phase) -> complex:
    phase = complex(phase)
    for allowed in _PHASES:
        if abs(phase - allowed) < 1e-12:
            return complex(allowed)
    raise PauliError(f"Pauli phase must be one of +1, -1, +i, -i, got {phase}")


@dataclass(frozen=True)
class PauliString:
    """Word over {I, X, Y, Z} with a global phase in {+1, -1, +i, -i}"""

    letters: str
    phase: complex = 1

    def __post_init__(self):
        if not self.letters or any(ch not in "IXYZ" for ch in self.letters):
            raise PauliError(f"invalid Pauli letters {self.letters!r}")
        object.__setattr__(self, "phase", _normalize_phase(self.phase))

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse labels such as ``"XZ"``, ``"-IZ"``, ``"+iXY"`` or ``"-iZZ"``"""
        for prefix, phase in (("-i", -1j), ("+i", 1j), ("i", 1j), ("-", -1), ("+", 1)):
            if label.startswith(prefix):
                return cls(label[len(prefix):], phase)
        return cls(label)

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def x_mask(self) -> int:
        """Bits (MSB = first factor) carrying X or Y"""
        return int("".join("1" if ch in "XY" else "0" for ch in self.letters), 2)

    @property
    def z_mask(self) -> int:
        """Bits carrying Z or Y"""
        return int("".join("1" if ch in "YZ" else "0" for ch in self.letters), 2)

    @property
    def n_flip_letters(self) -> int:
        return sum(ch in "XY" for ch in self.letters)

    @property
    def is_hermitian(self) -> bool:
        return self.phase.imag == 0

    @property
    def is_diagonal(self) -> bool:
        return self.x_mask == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        if other.n_qubits != self.n_qubits:
            raise PauliError(f"cannot multiply {self.n_qubits}- and {other.n_qubits}-qubit strings")
        phase = self.phase * other.phase
        letters = []
        for left, right in zip(self.letters, other.letters):
            factor, letter = _letter_product(left, right)
            phase *= factor
            letters.append(letter)
        return PauliString("".join(letters), phase)

    def commutes_with(self, other: "PauliString") -> bool:
        """Symbolic rule: commute iff an even number of positions hold two different non-identity letters"""
        if other.n_qubits != self.n_qubits:
            raise PauliError(f"cannot compare {self.n_qubits}- and {other.n_qubits}-qubit strings")
        clashes = sum(
            1 for a, b in zip(self.letters, other.letters)
            if a != "I" and b != "I" and a != b
        )
        return clashes % 2 == 0

    def diagonal(self) -> np.ndarray:
        """Diagonal of an I/Z string as a complex vector"""
        if not self.is_diagonal:
            raise PauliError(f"{self} is not diagonal")
        return self.phase * sign_vector(self.z_mask, self.n_qubits)

    def to_matrix(self) -> np.ndarray:
        """Dense 2^N x 2^N matrix, built on demand"""
        out = np.array([[self.phase]], dtype=np.complex128)
        for ch in self.letters:
            out = np.kron(out, _SINGLE[ch])
        return out

    def __str__(self) -> str:
        prefix = {1: "", -1: "-", 1j: "i", -1j: "-i"}[self.phase if self.phase.imag else self.phase.real]
        return f"{prefix}{self.letters}"


def sign_vector(mask: int, n_qubits: int) -> np.ndarray:
    """(-1)^popcount(x & mask) for every basis index x, as integers"""
    idx = np.arange(1 << n_qubits)
    return 1 - 2 * (popcount(idx & mask, n_qubits) & 1)


def _check_index(i: int, n_qubits: int):
    if n_qubits < 1:
        raise PauliError(f"n_qubits must be >= 1, got {n_qubits}")
    if not (0 <= i < (1 << n_qubits)):
        raise PauliError(f"index {i} out of range [0, {(1 << n_qubits) - 1}] for N={n_qubits}")


def s_operator(i: int, n_qubits: int) -> PauliString:
    """S_i: bit 0 -> I, bit 1 -> Z"""
    _check_index(i, n_qubits)
    return PauliString(format(i, f"0{n_qubits}b").replace("0", "I").replace("1", "Z"))


def r_operator(i: int, n_qubits: int) -> PauliString:
    """R_i: bit 0 -> X, bit 1 -> Y"""
    _check_index(i, n_qubits)
    return PauliString(format(i, f"0{n_qubits}b").replace("0", "X").replace("1", "Y"))


def all_pauli_strings(n_qubits: int) -> Iterator[PauliString]:
    for letters in itertools.product("IXYZ", repeat=n_qubits):
        yield PauliString("".join(letters))


def in_x_algebra(A: PauliString) -> bool:
    """Membership in S or R up to phase (no X/Y letters, or only X/Y letters)"""
    return A.n_flip_letters in (0, A.n_qubits)


# === COMMUTANT SET ===

@dataclass(frozen=True)
class CommutantSet:
    n_qubits: int
    members: Tuple[PauliString, ...]

    def __post_init__(self):
        expected = 1 << (self.n_qubits - 1)
        if len(self.members) != expected:
            raise PauliError(f"commutant for N={self.n_qubits} needs {expected} members, got {len(self.members)}")
        for member in self.members:
            if member.n_qubits != self.n_qubits or not member.is_diagonal or member.letters.count("Z") % 2:
                raise PauliError(f"{member} is not an even-Z string")
            # twirl members act as Kraus operators and as observables
            if not member.is_hermitian:
                raise PauliError(f"{member} is not Hermitian")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@lru_cache(maxsize=None)
def build_commutant(n_qubits: int) -> CommutantSet:
    """All S strings with an even number of Z letters"""
    if n_qubits < 1:
        raise PauliError(f"n_qubits must be >= 1, got {n_qubits}")
    members = tuple(
        s_operator(i, n_qubits) for i in range(1 << n_qubits)
        if bin(i).count("1") % 2 == 0
    )
    commutant = CommutantSet(n_qubits, members)
    if n_qubits <= DENSE_CENSUS_MAX_QUBITS:
        _verify_commutant_dense(commutant)
    return commutant


def _verify_commutant_dense(C: CommutantSet):
    mats = [m.to_matrix() for m in C]
    for i in range(1 << C.n_qubits):
        for gen in (s_operator(i, C.n_qubits), r_operator(i, C.n_qubits)):
            g = gen.to_matrix()
            for member, m in zip(C, mats):
                if not np.allclose(g @ m, m @ g, atol=1e-12):
                    raise PauliError(f"{member} does not commute with {gen}")


def commutation_census(A: PauliString, C: CommutantSet, method: Optional[str] = None) -> Tuple[int, int]:
    """(commuting, anticommuting) members of C with respect to A.

    ``method`` is ``"dense"`` (matrix commutators, N <= 5) or ``"symbolic"``;
    by default dense is used up to 5 qubits.
    """
    if A.n_qubits != C.n_qubits:
        raise PauliError(f"string has {A.n_qubits} qubits, commutant has {C.n_qubits}")
    if method is None:
        method = "dense" if C.n_qubits <= DENSE_CENSUS_MAX_QUBITS else "symbolic"

    commuting = anticommuting = 0
    if method == "symbolic":
        for member in C:
            if A.commutes_with(member):
                commuting += 1
            else:
                anticommuting += 1
        return commuting, anticommuting

    if method != "dense":
        raise PauliError(f"unknown census method {method!r}")
    if C.n_qubits > DENSE_CENSUS_MAX_QUBITS:
        raise PauliError(f"dense census is limited to N <= {DENSE_CENSUS_MAX_QUBITS}")
    a = A.to_matrix()
    for member in C:
        m = member.to_matrix()
        left, right = a @ m, m @ a
        if np.allclose(left, right, atol=1e-12):
            commuting += 1
        elif np.allclose(left, -right, atol=1e-12):
            anticommuting += 1
        else:
            raise PauliError(f"{A} neither commutes nor anticommutes with {member}")
    return commuting, anticommuting


def expected_census(A: PauliString) -> Tuple[int, int]:
    """Counting-argument prediction: all of C commutes with S and R, half of it with anything else.

    N = 1 has C = {I}, so everything commutes.
    """
    n = A.n_qubits
    if n == 1 or in_x_algebra(A):
        return 1 << (n - 1), 0
    return 1 << (n - 2), 1 << (n - 2)


def binomial_count(M: int, N: int) -> int:
    """sum_{i,j} C(M, 2i) C(N-M, 2j): choices of an even Z set meeting M marked positions evenly"""
    if not (0 <= M <= N):
        raise PauliError(f"need 0 <= M <= N, got M={M}, N={N}")
    evens_in = sum(math.comb(M, 2 * i) for i in range(M // 2 + 1))
    evens_out = sum(math.comb(N - M, 2 * j) for j in range((N - M) // 2 + 1))
    return evens_in * evens_out


def verify_binomial_identity(n_max: int = 20) -> List[Tuple[int, int, int]]:
    """Every (N, M, count) with 1 <= M <= N-1, N <= n_max, where the count is not 2^(N-2)"""
    failures = []
    for N in range(2, n_max + 1):
        for M in range(1, N):
            count = binomial_count(M, N)
            if count != 1 << (N - 2):
                failures.append((N, M, count))
    return failures


# === CHI MAP ===

def chi_kraus_operators(n_qubits: int) -> List[Tuple[Fraction, PauliString]]:
    """(weight, S) pairs of the X-part channel: every member of C with weight 1/2^(N-1)"""
    C = build_commutant(n_qubits)
    weight = Fraction(1, len(C))
    return [(weight, member) for member in C]


def kraus_completeness(n_qubits: int) -> np.ndarray:
    """sum_{S in C} S^dagger S in integer arithmetic (equals 2^(N-1) I)"""
    dim = 1 << n_qubits
    total = np.zeros((dim, dim), dtype=np.int64)
    for member in build_commutant(n_qubits):
        d = sign_vector(member.z_mask, n_qubits).astype(np.int64)
        total += np.diag(d * d)
    return total


def chi_kraus(rho) -> DensityMatrix:
    """X-part via the Kraus sum (1/2^(N-1)) sum_{S in C} S rho S^dagger"""
    arr = as_matrix(rho)
    n_qubits = qubits_for_dim(arr.shape[0])
    C = build_commutant(n_qubits)
    out = np.zeros_like(arr)
    for member in C:
        d = member.diagonal()
        out += np.outer(d, d.conj()) * arr
    return DensityMatrix(out / len(C))


def x_pattern(dim: int) -> np.ndarray:
    """Boolean mask of the diagonal and anti-diagonal"""
    mask = np.eye(dim, dtype=bool)
    mask[np.arange(dim), dim - 1 - np.arange(dim)] = True
    return mask


def chi_zero(rho) -> DensityMatrix:
    """Keep the diagonal and anti-diagonal, zero the rest"""
    arr = as_matrix(rho)
    qubits_for_dim(arr.shape[0])
    return DensityMatrix(np.where(x_pattern(arr.shape[0]), arr, 0))


def _walsh(n_qubits: int) -> np.ndarray:
    """H[i, x] = (-1)^popcount(i & x); the diagonal of S_i is row i"""
    idx = np.arange(1 << n_qubits)
    return 1 - 2 * (popcount(idx[:, None] & idx[None, :], n_qubits) & 1)


def chi_xstate_coefficients(rho) -> Tuple[np.ndarray, np.ndarray]:
    """Real coefficients (s, r) with X-part(rho) = sum_i s_i S_i + sum_i r_i R_i.

    Uses R_i = i^popcount(i) X^{(x)N} Z^i, so both expansions are Walsh transforms.
    """
    arr = as_matrix(rho)
    n_qubits = qubits_for_dim(arr.shape[0])
    dim = arr.shape[0]
    H = _walsh(n_qubits)
    idx = np.arange(dim)
    s = H @ np.diag(arr) / dim
    anti = arr[idx, dim - 1 - idx]
    r = (1j ** popcount(idx, n_qubits)) * (H @ anti) / dim
    return np.real(s), np.real(r)


def from_coefficients(s: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Rebuild sum_i s_i S_i + sum_i r_i R_i as a dense matrix"""
    s = np.asarray(s, dtype=np.complex128)
    r = np.asarray(r, dtype=np.complex128)
    dim = s.shape[0]
    n_qubits = qubits_for_dim(dim)
    H = _walsh(n_qubits)
    idx = np.arange(dim)
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[idx, idx] = H @ s
    out[dim - 1 - idx, idx] = H @ (r * 1j ** popcount(idx, n_qubits))
    return out
