"""Stationary covariance matrix and logarithmic negativity.

Covariances follow V_ij = <f_i f_j + f_j f_i>/2, so the vacuum has V = I/2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

MAX_CONDITION = 1e14
_SYMPLECTIC = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA_2MODE = np.kron(np.eye(2), _SYMPLECTIC)


class LyapunovError(RuntimeError):
    pass


class UnstableDriftError(LyapunovError):
    """The drift matrix has no stationary state."""


class PhysicalityError(ValueError):
    pass


class ConditioningWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Covariance:
    """4x4 covariance in the (q, p, X, Y) basis."""

    matrix: np.ndarray
    residual: float = 0.0

    @property
    def A(self) -> np.ndarray:
        return self.matrix[:2, :2]

    @property
    def B(self) -> np.ndarray:
        return self.matrix[2:, 2:]

    @property
    def C(self) -> np.ndarray:
        return self.matrix[:2, 2:]

    def unique_entries(self) -> dict[str, float]:
        names = "qpXY"
        return {
            f"V_{names[i]}{names[j]}": float(self.matrix[i, j])
            for i in range(4)
            for j in range(i, 4)
        }


def lyapunov_residual(M, V, N) -> float:
    """||M V + V M^T + N||_max / ||N||_max."""
    R = M @ V + V @ M.T + N
    return float(np.abs(R).max() / max(np.abs(N).max(), np.finfo(float).tiny))


def solve_lyapunov(M: np.ndarray, N: np.ndarray, scale: float | None = None, *,
                   check_stable: bool = True) -> Covariance:
    """Solve M V + V M^T = -N for the stationary covariance.

    Both matrices are divided by ``scale`` (default: the largest |M_ij|)
    before the 16x16 vectorized system is solved by LU with partial pivoting;
    V is unchanged by that rescaling.
    """
    M = np.asarray(M, dtype=float)
    N = np.asarray(N, dtype=float)
    n = M.shape[0]
    if check_stable and np.linalg.eigvals(M).real.max() >= 0:
        raise UnstableDriftError("drift matrix has an eigenvalue with Re >= 0")
    if scale is None:
        scale = float(np.abs(M).max()) or 1.0
    Ms = M / scale
    Ns = N / scale
    eye = np.eye(n)
    # row-major vec: vec(M V) = (M kron I) vec V, vec(V M^T) = (I kron M) vec V
    K = np.kron(Ms, eye) + np.kron(eye, Ms)
    cond = np.linalg.cond(K)
    if not cond < MAX_CONDITION:
        raise LyapunovError(f"vectorized Lyapunov system is ill-conditioned (cond={cond:.3e})")
    v = np.linalg.solve(K, -Ns.reshape(-1))
    V = v.reshape(n, n)
    asym = np.abs(V - V.T).max() / max(np.abs(V).max(), np.finfo(float).tiny)
    if asym > 1e-9:
        warnings.warn(f"Lyapunov solution asymmetric at {asym:.2e} relative",
                      ConditioningWarning, stacklevel=2)
    V = 0.5 * (V + V.T)
    return Covariance(V, lyapunov_residual(M, V, N))


def uncertainty_margin(V: np.ndarray) -> float:
    """Smallest eigenvalue of V + (i/2) Omega; negative means unphysical."""
    V = np.asarray(V, dtype=float)
    return float(np.linalg.eigvalsh(V + 0.5j * OMEGA_2MODE).min())


def is_physical(V: np.ndarray, tol: float | None = None) -> bool:
    """Robertson-Schrodinger check V + (i/2) Omega >= 0."""
    V = np.asarray(V, dtype=float)
    if tol is None:
        tol = max(1e-9, 64 * np.finfo(float).eps * np.abs(V).max())
    return uncertainty_margin(V) >= -tol


@dataclass(frozen=True)
class EntanglementResult:
    E_N: float
    sigma: float
    nu_minus: float
    det_V: float
    lyapunov_residual: float = 0.0

    @property
    def entangled(self) -> bool:
        return self.E_N > 0


_PARTIAL_TRANSPOSE = np.array([1.0, 1.0, 1.0, -1.0])


def _smallest_pt_eigenvalue(V: np.ndarray) -> float | None:
    """nu_minus from the Hermitian form L^T (i Omega) L, V_pt = L L^T.

    Its eigenvalues are +-nu, and unlike the closed form it stays well
    conditioned where the two symplectic eigenvalues coincide (there the
    square root of the discriminant amplifies rounding to ~1e-8). Returns
    None when the partially transposed matrix is not positive definite.
    """
    V_pt = V * np.outer(_PARTIAL_TRANSPOSE, _PARTIAL_TRANSPOSE)
    try:
        L = np.linalg.cholesky(V_pt)
    except np.linalg.LinAlgError:
        return None
    H = L.T @ (1j * OMEGA_2MODE) @ L
    return float(np.abs(np.linalg.eigvalsh(H)).min())


def log_negativity(V, *, check_physical: bool = False) -> EntanglementResult:
    """Logarithmic negativity of a two-mode Gaussian state.

    Uses the smallest symplectic eigenvalue of the partially transposed state,
    nu^2 = (Sigma - sqrt(Sigma^2 - 4 det V)) / 2 with
    Sigma = det A + det B - 2 det C, and E_N = max(0, -ln(2 nu)).
    Sigma and the discriminant are always formed (and checked); nu itself is
    taken from an equivalent Hermitian eigenproblem when V is positive
    definite, which keeps it accurate near degenerate spectra.

    The reactive-coupling noise model yields covariances that violate the
    uncertainty relation by a small margin, so the full Robertson-Schrodinger
    test only runs with ``check_physical=True``. An imaginary symplectic
    eigenvalue always raises.
    """
    cov = V if isinstance(V, Covariance) else Covariance(np.asarray(V, dtype=float))
    mat = cov.matrix
    if check_physical and not is_physical(mat):
        raise PhysicalityError("covariance violates the uncertainty principle")
    det_a = np.linalg.det(cov.A)
    det_b = np.linalg.det(cov.B)
    det_c = np.linalg.det(cov.C)
    det_v = np.linalg.det(mat)
    sigma = det_a + det_b - 2.0 * det_c
    disc = sigma * sigma - 4.0 * det_v
    if disc < 0:
        if disc >= -1e-12 * max(1.0, sigma * sigma):
            disc = 0.0
        else:
            raise PhysicalityError(f"negative discriminant {disc:.3e} in symplectic spectrum")
    root = math.sqrt(disc)
    if sigma + root <= 0:
        raise PhysicalityError(f"non-positive symplectic invariant sigma={sigma:.3e}")
    nu = _smallest_pt_eigenvalue(mat)
    if nu is None:
        # (Sigma - root)/2 rewritten without cancellation
        nu2 = 2.0 * det_v / (sigma + root)
        if nu2 < 0:
            raise PhysicalityError(f"imaginary symplectic eigenvalue (nu^2={nu2:.3e})")
        nu = math.sqrt(nu2)
    e_n = max(0.0, -math.log(2.0 * nu)) if nu > 0 else math.inf
    return EntanglementResult(E_N=e_n, sigma=float(sigma), nu_minus=nu,
                              det_V=float(det_v), lyapunov_residual=cov.residual)
