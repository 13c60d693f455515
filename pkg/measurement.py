# ENTBOUND four-observable measurement records: extraction, shot sampling, consistency
"""
A ``MeasurementRecord`` holds the four numbers the bounds need:

    p00 = Tr(rho Pi0)          Pi0 = |0...0><0...0|
    p11 = Tr(rho Pi1)          Pi1 = |1...1><1...1|
    z_re = Tr(rho Xhat) / 2    Xhat = |0...0><1...1| + h.c.
    z_im = -Tr(rho Yhat) / 2   Yhat = i(|1...1><0...0| - |0...0><1...1|)

so that ``z_re + 1j * z_im`` is the extreme coherence rho[0, 2^N - 1].
Xhat and Yhat act as sigma_x / sigma_y on span{|0...0>, |1...1>} and as zero
elsewhere; their outcomes are {+1, -1, 0}.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from entbound_config import get_tolerances
from errors import PreconditionError, RecordError
from linalg_core import as_matrix
from states import XState, qubits_for_dim

logger = logging.getLogger(__name__)

# observables restricted to span{|0...0>, |1...1>}
_X_BLOCK = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y_BLOCK = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)


@dataclass(frozen=True)
class MeasurementRecord:
    p00: float
    p11: float
    z_re: float
    z_im: float
    shots: Optional[int] = None

    def __post_init__(self):
        for name in ("p00", "p11", "z_re", "z_im"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise RecordError(f"{name} finite", f"{name} = {value}")
            object.__setattr__(self, name, value)
        if self.shots is not None and int(self.shots) < 1:
            raise PreconditionError(f"shots must be >= 1, got {self.shots}")

    @property
    def z(self) -> complex:
        return complex(self.z_re, self.z_im)

    @property
    def sigma_shot(self) -> float:
        """Worst-case standard error of a single estimated field (0 for exact records)"""
        return 0.0 if self.shots is None else 0.5 / math.sqrt(self.shots)

    @classmethod
    def from_xstate(cls, x: XState) -> "MeasurementRecord":
        return cls(x.a1, x.b1, x.z[0].real, x.z[0].imag)

    def check_consistency(self) -> "MeasurementRecord":
        """Raise RecordError naming the first violated constraint; returns self"""
        slack = 3 * self.sigma_shot if self.shots else get_tolerances().atol
        if not (-slack <= self.p00 <= 1 + slack):
            raise RecordError("0 <= p00 <= 1", f"p00 = {self.p00:.6g}")
        if not (-slack <= self.p11 <= 1 + slack):
            raise RecordError("0 <= p11 <= 1", f"p11 = {self.p11:.6g}")
        if self.p00 + self.p11 > 1 + slack:
            raise RecordError("p00 + p11 <= 1", f"p00 + p11 = {self.p00 + self.p11:.6g}")
        z2 = abs(self.z) ** 2
        if z2 > self.p00 * self.p11 + slack:
            raise RecordError("|z|^2 <= p00*p11", f"|z|^2 = {z2:.6g}, p00*p11 = {self.p00 * self.p11:.6g}")
        return self

    def project_consistent(self) -> "MeasurementRecord":
        """Nearest record satisfying every constraint exactly (warns when it moves)"""
        p00 = min(max(self.p00, 0.0), 1.0)
        p11 = min(max(self.p11, 0.0), 1.0)
        total = p00 + p11
        if total > 1.0:
            p00, p11 = p00 / total, p11 / total
        z = self.z
        cap = math.sqrt(p00 * p11)
        if abs(z) > cap:
            z = z / abs(z) * cap
        projected = replace(self, p00=p00, p11=p11, z_re=z.real, z_im=z.imag)
        if projected != self:
            logger.warning(
                f"⚠️ Clipped measurement record to the physical region: "
                f"(p00, p11, z) = ({self.p00:.6g}, {self.p11:.6g}, {self.z:.6g}) -> "
                f"({p00:.6g}, {p11:.6g}, {z:.6g})"
            )
        return projected


def extract_record(rho) -> MeasurementRecord:
    """Exact expectations of the four observables (dense matrix or XState)"""
    corner = _corner_block(rho)
    return MeasurementRecord(
        p00=float(corner[0, 0].real),
        p11=float(corner[1, 1].real),
        z_re=float(np.real(np.trace(corner @ _X_BLOCK))) / 2,
        z_im=-float(np.real(np.trace(corner @ _Y_BLOCK))) / 2,
    )


def _corner_block(rho) -> np.ndarray:
    """Restriction to span{|0...0>, |1...1>}"""
    if isinstance(rho, XState):
        z1 = rho.z1
        return np.array([[rho.a1, z1], [z1.conjugate(), rho.b1]], dtype=np.complex128)
    arr = as_matrix(rho)
    qubits_for_dim(arr.shape[0])
    last = arr.shape[0] - 1
    return arr[np.ix_([0, last], [0, last])]


def _outcome_probabilities(corner: np.ndarray, block: np.ndarray) -> np.ndarray:
    """P(+1), P(-1), P(0) for an observable acting as ``block`` on the corner subspace"""
    eigenvalues, vectors = np.linalg.eigh(block)
    probs = np.real(np.einsum("ik,ij,jk->k", vectors.conj(), corner, vectors))
    plus = float(probs[eigenvalues > 0].sum())
    minus = float(probs[eigenvalues < 0].sum())
    zero = 1.0 - float(np.real(np.trace(corner)))
    out = np.clip(np.array([plus, minus, zero]), 0.0, None)
    return out / out.sum()


def sample_record(rho, shots: int, rng_seed: Optional[int] = None) -> MeasurementRecord:
    """Finite-statistics record: ``shots`` repetitions of each of the four measurements"""
    if shots < 1:
        raise PreconditionError(f"shots must be >= 1, got {shots}")
    corner = _corner_block(rho)
    rng = np.random.default_rng(rng_seed)

    p00 = min(max(float(corner[0, 0].real), 0.0), 1.0)
    p11 = min(max(float(corner[1, 1].real), 0.0), 1.0)
    n00 = rng.binomial(shots, p00)
    n11 = rng.binomial(shots, p11)
    nx = rng.multinomial(shots, _outcome_probabilities(corner, _X_BLOCK))
    ny = rng.multinomial(shots, _outcome_probabilities(corner, _Y_BLOCK))

    return MeasurementRecord(
        p00=n00 / shots,
        p11=n11 / shots,
        z_re=(nx[0] - nx[1]) / shots / 2,
        z_im=-(ny[0] - ny[1]) / shots / 2,
        shots=shots,
    )


def ghz_fidelity(m: MeasurementRecord, theta: float = math.pi / 4) -> float:
    """F(rho, cos(theta)|0...0> + sin(theta)|1...1>) from the record.

    F^2 = p00 cos^2(theta) + p11 sin^2(theta) + Re(z) sin(2 theta)
    """
    return math.sqrt(1.0 - ghz_infidelity(m, theta))


def ghz_infidelity(m: MeasurementRecord, theta: float = math.pi / 4) -> float:
    """1 - F^2 against the weighted GHZ state, without going through F"""
    f2 = m.p00 * math.cos(theta) ** 2 + m.p11 * math.sin(theta) ** 2 + m.z_re * math.sin(2 * theta)
    return min(1.0, max(0.0, 1.0 - f2))


def sigma_fidelity(m: MeasurementRecord) -> float:
    """F(rho, (Pi0 + Pi1)/2) = sqrt((t + 2 sqrt(d)) / 2) over the corner block"""
    return math.sqrt(1.0 - sigma_infidelity(m))


def sigma_infidelity(m: MeasurementRecord) -> float:
    """1 - F_sigma^2 = (4(1 - t) + (p00 - p11)^2 + 4|z|^2) / (2 (2 - t + 2 sqrt(d))).

    Every numerator term is non-negative, so a tiny |z| is not lost against p00*p11.
    """
    t = m.p00 + m.p11
    d = max(0.0, m.p00 * m.p11 - abs(m.z) ** 2)
    num = 4.0 * max(0.0, 1.0 - t) + (m.p00 - m.p11) ** 2 + 4.0 * abs(m.z) ** 2
    den = 2.0 * ((2.0 - t) + 2.0 * math.sqrt(d))
    if den <= 0.0:
        return 0.0
    return min(1.0, max(0.0, num / den))
