# ENTBOUND all-party entanglement: closed form for X-states and bounds for everything else
"""
Trace-distance entanglement E(rho) = min over biseparable tau of D(rho, tau).

For a canonical X-state E = max(0, |z_1| - w_1) with w_1 = sum_{j != 1} b_j,
and the minimizer is the same state with z_1 shrunk to modulus w_1. Any other
state is bracketed through a reference X-state rho' and its closest
biseparable state sigma':

    distance:  E(rho') - D(rho, rho') <= E(rho) <= min(D(rho, sigma'), E(rho') + D(rho, rho'))
    fidelity:  E(rho') - sqrt(1 - F(rho', rho)^2) <= E(rho) <= sqrt(1 - F(sigma', rho)^2)
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from entbound_config import get_tolerances
from errors import PreconditionError
from linalg_core import fidelity, trace_distance
from measurement import MeasurementRecord, ghz_fidelity, ghz_infidelity, sigma_fidelity, sigma_infidelity
from states import DensityMatrix, XState, dense_to_xstate, ghz_xstate, require_parties

logger = logging.getLogger(__name__)

GHZ_ENTANGLEMENT = 0.5


class LowerSource(Enum):
    FIDELITY = "fidelity"
    DISTANCE = "distance"
    THETA_OPTIMIZED = "theta-optimized"
    TRIVIAL_ZERO = "trivial-zero"


class UpperSource(Enum):
    SIGMA_FIDELITY = "sigma-fidelity"
    BISEPARABLE_DISTANCE = "biseparable-distance"
    DISTANCE = "distance"
    TRIVIAL_MAX = "trivial-max"


@dataclass(frozen=True)
class EntanglementValue:
    value: float
    w1: float
    z1_abs: float

    @property
    def concurrence(self) -> float:
        return 2 * self.value

    @property
    def epsilon(self) -> float:
        """|z_1| - w_1; positive exactly when the state is entangled"""
        return self.z1_abs - self.w1


@dataclass(frozen=True)
class BoundResult:
    lower: float
    upper: float
    lower_source: LowerSource
    upper_source: UpperSource
    reference_state_desc: str = "GHZ"
    f_ref: Optional[float] = None
    f_sigma: Optional[float] = None
    theta_star: Optional[float] = None

    def __post_init__(self):
        atol = get_tolerances().atol
        if not (0.0 <= self.lower and self.upper <= 1.0):
            raise PreconditionError(f"bounds must lie in [0, 1], got [{self.lower}, {self.upper}]")
        if self.lower > self.upper + atol:
            raise PreconditionError(f"lower bound {self.lower:.12g} exceeds upper bound {self.upper:.12g}")

    def contains(self, value: float, slack: float = 1e-10) -> bool:
        return self.lower - slack <= value <= self.upper + slack


class ThetaOptimum(NamedTuple):
    theta_star: float
    lower: float


# === CLOSED FORM ===

def entanglement_x(x: XState) -> EntanglementValue:
    """E = max(0, |z_1| - w_1) for a canonical X-state"""
    require_parties(x.n_qubits)
    x.require_canonical()
    z1_abs = abs(x.z1)
    return EntanglementValue(max(0.0, z1_abs - x.w1), x.w1, z1_abs)


def concurrence_x(x: XState) -> float:
    return entanglement_x(x).concurrence


def closest_biseparable(x: XState) -> XState:
    """Same state with z_1 replaced by w_1 z_1/|z_1|; biseparable inputs come back unchanged"""
    ent = entanglement_x(x)
    if ent.value <= 0.0:
        return x
    return x.with_z1(ent.w1 * x.z1 / ent.z1_abs)


def entanglement_dense(rho) -> EntanglementValue:
    """Exact E of a dense matrix that is an X-state; XStateError otherwise"""
    return entanglement_x(dense_to_xstate(rho))


# === BOUNDS ===

def _dense(state) -> np.ndarray:
    if isinstance(state, XState):
        return state.to_dense().data
    return np.asarray(state, dtype=np.complex128)


def _pick(candidates: Sequence[Tuple[float, Enum]], best=min) -> Tuple[float, Enum]:
    # first entry wins ties
    value = best(c[0] for c in candidates)
    return next(c for c in candidates if c[0] == value)


def _finish(lower_raw: float, lower_source: LowerSource, upper: float,
            upper_source: UpperSource, **kwargs) -> BoundResult:
    lower = max(0.0, lower_raw)
    if lower_raw <= 0.0:
        lower_source = LowerSource.TRIVIAL_ZERO
    # sub-tolerance crossings are roundoff
    lower = min(lower, upper) if lower <= upper + get_tolerances().atol else lower
    return BoundResult(lower, upper, lower_source, upper_source, **kwargs)


def bounds_from_reference(rho, ref: XState, desc: Optional[str] = None) -> BoundResult:
    """Distance bounds through a canonical reference X-state"""
    ref.require_canonical()
    arr = _dense(rho)
    if arr.shape[0] != ref.dim:
        raise PreconditionError(f"dimension mismatch: state {arr.shape[0]} vs reference {ref.dim}")
    e_ref = entanglement_x(ref).value
    d_ref = trace_distance(arr, ref.to_dense())
    d_sigma = trace_distance(arr, closest_biseparable(ref).to_dense())
    upper, upper_source = _pick([
        (d_sigma, UpperSource.BISEPARABLE_DISTANCE),
        (e_ref + d_ref, UpperSource.DISTANCE),
        (1.0, UpperSource.TRIVIAL_MAX),
    ])
    return _finish(e_ref - d_ref, LowerSource.DISTANCE, upper, upper_source,
                   reference_state_desc=desc or f"X-state N={ref.n_qubits}")


def fidelity_bounds(f_ref: float, f_sigma: float, e_ref: float = GHZ_ENTANGLEMENT,
                    desc: str = "GHZ", *, ref_infidelity: Optional[float] = None,
                    sigma_infidelity: Optional[float] = None) -> BoundResult:
    """Fidelity bounds; with the defaults the reference is a GHZ state (E = 1/2).

    ``ref_infidelity`` / ``sigma_infidelity`` give 1 - F^2 directly when the
    caller can compute it without cancellation.
    """
    for name, value in (("F_ref", f_ref), ("F_sigma", f_sigma)):
        if not (0.0 <= value <= 1.0):
            raise PreconditionError(f"{name} must lie in [0, 1], got {value}")
    if ref_infidelity is None:
        ref_infidelity = 1.0 - f_ref ** 2
    if sigma_infidelity is None:
        sigma_infidelity = 1.0 - f_sigma ** 2
    upper, upper_source = _pick([
        (math.sqrt(max(0.0, sigma_infidelity)), UpperSource.SIGMA_FIDELITY),
        (1.0, UpperSource.TRIVIAL_MAX),
    ])
    return _finish(e_ref - math.sqrt(max(0.0, ref_infidelity)), LowerSource.FIDELITY, upper, upper_source,
                   reference_state_desc=desc, f_ref=f_ref, f_sigma=f_sigma)


def bounds_from_fidelity(rho, ref: XState, desc: Optional[str] = None) -> BoundResult:
    """Fidelity bounds with dense Uhlmann fidelities against any canonical reference"""
    ref.require_canonical()
    arr = _dense(rho)
    if arr.shape[0] != ref.dim:
        raise PreconditionError(f"dimension mismatch: state {arr.shape[0]} vs reference {ref.dim}")
    f_ref = fidelity(ref.to_dense(), arr)
    f_sigma = fidelity(closest_biseparable(ref).to_dense(), arr)
    return fidelity_bounds(f_ref, f_sigma, entanglement_x(ref).value,
                           desc or f"X-state N={ref.n_qubits}")


def _usable_record(m: MeasurementRecord) -> MeasurementRecord:
    m.check_consistency()
    # exact records pass unchanged; sampled ones may sit just outside the region
    return m.project_consistent() if m.shots else m


def _ghz_desc(n_qubits: Optional[int]) -> str:
    if n_qubits is None:
        return "GHZ"
    require_parties(n_qubits)
    return f"GHZ N={n_qubits}"


def four_measurement_bounds(m: MeasurementRecord, n_qubits: Optional[int] = None) -> BoundResult:
    """GHZ-reference fidelity bounds from p00, p11 and z alone"""
    desc = _ghz_desc(n_qubits)
    m = _usable_record(m)
    return fidelity_bounds(ghz_fidelity(m), sigma_fidelity(m), desc=desc,
                           ref_infidelity=ghz_infidelity(m), sigma_infidelity=sigma_infidelity(m))


def _theta_objective(m: MeasurementRecord, theta: float) -> float:
    return 0.5 * abs(math.sin(2 * theta)) - math.sqrt(ghz_infidelity(m, theta))


def optimized_lower_bound(m: MeasurementRecord) -> ThetaOptimum:
    """Best weighted-GHZ lower bound: maximize |sin 2theta|/2 - sqrt(1 - F(theta)^2).

    A grid on (0, pi/2), plus pi/4 itself, is refined by golden-section search
    around the best grid point.
    """
    tol = get_tolerances()
    m = _usable_record(m)
    n = tol.theta_grid
    grid = (math.pi / 2) * np.arange(1, n + 1) / (n + 1)
    values = np.array([_theta_objective(m, t) for t in grid])
    k = int(np.argmax(values))
    best_theta, best_value = float(grid[k]), float(values[k])

    centre = _theta_objective(m, math.pi / 4)
    if centre >= best_value:
        best_theta, best_value = math.pi / 4, centre

    lo = float(grid[k - 1]) if k > 0 else 0.0
    hi = float(grid[k + 1]) if k < n - 1 else math.pi / 2
    try:
        res = minimize_scalar(
            lambda t: -_theta_objective(m, t),
            bracket=(lo, float(grid[k]), hi),
            method="golden",
            options={"xtol": tol.golden_xtol},
        )
        theta = float(res.x)
        if 0.0 < theta < math.pi / 2 and -res.fun > best_value:
            best_theta, best_value = theta, float(-res.fun)
    except (ValueError, RuntimeError) as e:
        # flat neighbourhood; the grid point stands
        logger.debug(f"golden refinement skipped: {e}")

    return ThetaOptimum(best_theta, max(0.0, best_value))


def optimized_bounds(m: MeasurementRecord, n_qubits: Optional[int] = None) -> BoundResult:
    """Four-measurement bounds with the lower side replaced by the weighted-GHZ optimum when better"""
    base = four_measurement_bounds(m, n_qubits)
    opt = optimized_lower_bound(m)
    if opt.lower <= 0.0 or opt.lower <= base.lower:
        return BoundResult(base.lower, base.upper, base.lower_source, base.upper_source,
                           base.reference_state_desc, base.f_ref, base.f_sigma, opt.theta_star)
    lower = min(opt.lower, base.upper)
    return BoundResult(lower, base.upper, LowerSource.THETA_OPTIMIZED, base.upper_source,
                       base.reference_state_desc, base.f_ref, base.f_sigma, opt.theta_star)


def ghz_reference_bounds(rho, n_qubits: int) -> BoundResult:
    """Distance bounds against the N-qubit GHZ state"""
    return bounds_from_reference(rho, ghz_xstate(n_qubits), desc=f"GHZ N={n_qubits}")


def tightest(*results: BoundResult) -> BoundResult:
    """Largest lower and smallest upper bound among several valid results"""
    lo = max(results, key=lambda r: r.lower)
    up = min(results, key=lambda r: r.upper)
    return BoundResult(
        min(lo.lower, up.upper), up.upper, lo.lower_source, up.upper_source,
        lo.reference_state_desc,
        next((r.f_ref for r in results if r.f_ref is not None), None),
        next((r.f_sigma for r in results if r.f_sigma is not None), None),
        next((r.theta_star for r in results if r.theta_star is not None), None),
    )


# === BISEPARABLE SAMPLING ===

def bipartitions(n_qubits: int) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """All 2^(N-1) - 1 cuts (A, B); qubit 0 is always in A"""
    require_parties(n_qubits, "a bipartition")
    cuts = []
    rest = range(1, n_qubits)
    for mask in range((1 << (n_qubits - 1)) - 1):
        side_a = (0,) + tuple(q for j, q in enumerate(rest) if mask >> j & 1)
        side_b = tuple(q for q in range(n_qubits) if q not in side_a)
        cuts.append((side_a, side_b))
    return cuts


def _haar_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def product_state(n_qubits: int, cut: Tuple[Sequence[int], Sequence[int]],
                  rng: np.random.Generator) -> np.ndarray:
    """Haar-random |a>|b> across ``cut`` as a state vector in standard qubit order"""
    side_a, side_b = cut
    psi = np.kron(_haar_vector(1 << len(side_a), rng), _haar_vector(1 << len(side_b), rng))
    order = list(side_a) + list(side_b)
    tensor = psi.reshape([2] * n_qubits).transpose(np.argsort(order))
    return tensor.reshape(-1)


def sample_biseparable(n_qubits: int, rng: np.random.Generator, max_terms: int = 8,
                       cut: Optional[Tuple[Sequence[int], Sequence[int]]] = None) -> DensityMatrix:
    """Dirichlet mixture of 1..max_terms random product states.

    Each term uses ``cut`` when given, otherwise an independently drawn bipartition.
    """
    cuts = bipartitions(n_qubits)
    terms = int(rng.integers(1, max_terms + 1))
    weights = rng.dirichlet(np.ones(terms))
    rho = np.zeros((1 << n_qubits, 1 << n_qubits), dtype=np.complex128)
    for w in weights:
        term_cut = cut if cut is not None else cuts[int(rng.integers(len(cuts)))]
        psi = product_state(n_qubits, term_cut, rng)
        rho += w * np.outer(psi, psi.conj())
    return DensityMatrix(rho)
