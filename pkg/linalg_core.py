# ENTBOUND dense linear algebra: eigensystems, trace distance, PSD square root, fidelity
"""
Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` complex arrays; anything exposing ``__array__``
(``states.DensityMatrix``) is accepted as well. All routines are pure.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from entbound_config import get_tolerances
from errors import NotPSDError, NumericalFailureError, PreconditionError

logger = logging.getLogger(__name__)


def as_matrix(M) -> np.ndarray:
    """Square complex ndarray view of M"""
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def hermiticity_error(M) -> float:
    arr = as_matrix(M)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr - arr.conj().T)))


def require_hermitian(M, tol: Optional[float] = None) -> np.ndarray:
    arr = as_matrix(M)
    tol = get_tolerances().hermitian_check if tol is None else tol
    err = hermiticity_error(arr)
    if err > tol:
        raise PreconditionError(f"matrix is not Hermitian: max |M - M^H| = {err:.3e} > {tol:.1e}")
    return arr


def _require_same_dim(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise PreconditionError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


def hermitian_eig(M, method: Optional[str] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(eigenvalues, V)`` with eigenvalues sorted descending and the
    matching eigenvectors as columns of the unitary ``V``.

    ``method`` is ``"eigh"`` (LAPACK) or ``"jacobi"`` (cyclic complex Jacobi);
    the default comes from the tolerance record.
    """
    tol = get_tolerances()
    arr = require_hermitian(M)
    method = method or tol.eig_method
    # symmetrize so roundoff below the check threshold does not leak into the spectrum
    arr = (arr + arr.conj().T) / 2

    if method == "eigh":
        w, v = np.linalg.eigh(arr)
    elif method == "jacobi":
        w, v = jacobi_eig(arr, tol.jacobi_offdiag, tol.jacobi_max_sweeps)
    else:
        raise PreconditionError(f"unknown eigensolver {method!r}")

    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def jacobi_eig(H: np.ndarray, offdiag_tol: float = 1e-12, max_sweeps: int = 100) -> Tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigensolver for a Hermitian matrix.

    Each rotation removes the phase of ``H[p, q]`` with a diagonal unitary and
    then applies the real 2x2 Jacobi rotation, so every sub-problem is the
    real symmetric one. Converged when the off-diagonal Frobenius norm drops
    below ``offdiag_tol * max(1, ||H||_F)``.
    """
    A = np.array(H, dtype=np.complex128)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    if n < 2:
        return np.real(np.diag(A)).copy(), V

    threshold = offdiag_tol * max(1.0, float(np.linalg.norm(A)))
    off = _offdiag_norm(A)

    for _ in range(max_sweeps):
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                app = A[p, p].real
                aqq = A[q, q].real
                theta = 0.5 * np.arctan2(2.0 * mag, app - aqq)
                c, s = np.cos(theta), np.sin(theta)
                # columns p, q of D @ G with D = diag(1, conj(phase))
                U = np.array([[c, -s], [s * np.conj(phase), c * np.conj(phase)]])
                cols = A[:, [p, q]] @ U
                A[:, [p, q]] = cols
                A[[p, q], :] = U.conj().T @ A[[p, q], :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, [p, q]] = V[:, [p, q]] @ U
        off = _offdiag_norm(A)
    else:
        if off > threshold:
            raise NumericalFailureError(f"Jacobi did not converge after {max_sweeps} sweeps", off)

    return np.real(np.diag(A)).copy(), V


def _offdiag_norm(A: np.ndarray) -> float:
    return float(np.sqrt(max(np.sum(np.abs(A) ** 2) - np.sum(np.abs(np.diag(A)) ** 2), 0.0)))


def trace_norm(M) -> float:
    """Tr|M| for Hermitian M"""
    w, _ = hermitian_eig(M)
    return float(np.sum(np.abs(w)))


def trace_distance(rho, tau) -> float:
    """D(rho, tau) = 1/2 Tr|rho - tau|"""
    a = as_matrix(rho)
    b = as_matrix(tau)
    _require_same_dim(a, b)
    return 0.5 * trace_norm(a - b)


def clamped_spectrum(M) -> Tuple[np.ndarray, np.ndarray]:
    """Eigensystem of a PSD matrix with roundoff negatives clamped to zero"""
    tol = get_tolerances()
    w, v = hermitian_eig(M)
    smallest = float(w[-1]) if w.size else 0.0
    if smallest < -tol.psd_error:
        raise NotPSDError(smallest, tol.psd_error)
    if smallest < -tol.psd_clamp:
        logger.debug(f"⚠️ clamping eigenvalue {smallest:.3e} beyond the roundoff band")
    return np.clip(w, 0.0, None), v


def _drop_roundoff(w: np.ndarray) -> np.ndarray:
    """Zero eigenvalues indistinguishable from rounding noise of the largest one"""
    if w.size == 0:
        return w
    floor = 10 * w.size * np.finfo(float).eps * max(1.0, float(w.max()))
    return np.where(w < floor, 0.0, w)


def is_psd(M) -> bool:
    try:
        clamped_spectrum(M)
    except NotPSDError:
        return False
    return True


def psd_sqrt(M) -> np.ndarray:
    """Hermitian PSD square root R with R @ R = M"""
    w, v = clamped_spectrum(M)
    root = (v * np.sqrt(_drop_roundoff(w))) @ v.conj().T
    return (root + root.conj().T) / 2


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity F = Tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1].

    Convention: for a pure sigma = |psi><psi|, F^2 = <psi|rho|psi>.
    """
    a = as_matrix(rho)
    b = as_matrix(sigma)
    _require_same_dim(a, b)
    root = psd_sqrt(a)
    inner = root @ b @ root
    w, _ = clamped_spectrum((inner + inner.conj().T) / 2)
    return float(min(1.0, np.sum(np.sqrt(_drop_roundoff(w)))))


def fidelity_to_pure(rho, psi) -> float:
    """F(rho, |psi>) = sqrt(<psi|rho|psi>)"""
    a = as_matrix(rho)
    vec = np.asarray(psi, dtype=np.complex128).reshape(-1)
    if vec.shape[0] != a.shape[0]:
        raise PreconditionError(f"dimension mismatch: {a.shape[0]} vs {vec.shape[0]}")
    overlap = float(np.real(vec.conj() @ a @ vec))
    return float(np.sqrt(min(1.0, max(0.0, overlap))))
