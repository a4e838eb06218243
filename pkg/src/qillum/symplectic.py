"""Real symplectic linear algebra for Gaussian covariance matrices.

Conventions used throughout the package: hbar = 1, vacuum variance 1/2,
quadrature ordering (q1, p1, ..., qN, pN). A covariance matrix (CM) is
physical iff every symplectic eigenvalue nu_k is >= 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from .errors import NumericFailure

VACUUM_VARIANCE = 0.5
# Pure states sit exactly on the nu = 1/2 boundary and must pass under rounding.
PHYSICALITY_ATOL = 1e-9


@dataclass(frozen=True)
class CovMatrix:
    """Real symmetric 2N x 2N covariance matrix.

    Entries are stored in the fixed (q1, p1, ..., qN, pN) ordering with the
    vacuum at 0.5 * identity. The array is symmetrized once on construction
    and frozen; downstream code treats instances as immutable values.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"covariance matrix must be square, got shape {m.shape}")
        if m.shape[0] == 0 or m.shape[0] % 2 != 0:
            raise ValueError(f"covariance matrix dimension must be even and positive, got {m.shape[0]}")
        if not np.all(np.isfinite(m)):
            raise ValueError("covariance matrix entries must be finite")
        tol = 1e-12 * max(1.0, float(np.abs(m).max()))
        if np.abs(m - m.T).max() > tol:
            raise ValueError("covariance matrix must be symmetric within 1e-12")
        m = 0.5 * (m + m.T)
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def n_modes(self) -> int:
        return self.entries.shape[0] // 2


@dataclass(frozen=True)
class WilliamsonDecomposition:
    """Symplectic congruence V = S diag(nu_1, nu_1, ..., nu_N, nu_N) S^T.

    S is symplectic (S Omega S^T = Omega) but not unique; the two
    reconstruction invariants are the testable contract.
    """

    s_matrix: np.ndarray
    spectrum: np.ndarray

    @property
    def n_modes(self) -> int:
        return len(self.spectrum)

    def diagonal_form(self) -> np.ndarray:
        return np.diag(np.repeat(self.spectrum, 2))


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form: one [[0, 1], [-1, 0]] block per mode."""
    if n_modes < 1:
        raise ValueError(f"n_modes must be >= 1, got {n_modes}")
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def _require_symmetric_pd(v: CovMatrix) -> np.ndarray:
    """Return the entries of v after checking positive definiteness."""
    m = v.entries
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance matrix must be positive definite") from exc
    return m


def symplectic_eigenvalues(v: CovMatrix) -> np.ndarray:
    """Symplectic spectrum of a positive-definite CM, sorted descending.

    Computed as the moduli of the eigenvalues of Omega V, which occur in
    conjugate pairs +/- i nu_k; one value per pair is returned.
    """
    m = _require_symmetric_pd(v)
    omega = symplectic_form(v.n_modes)
    eig = np.linalg.eigvals(omega @ m)
    moduli = np.sort(np.abs(eig))[::-1]
    # pair-average +i nu and -i nu partners for a touch of robustness
    return 0.5 * (moduli[0::2] + moduli[1::2])


def is_physical(v: CovMatrix) -> bool:
    """True iff v is a valid quantum CM: min symplectic eigenvalue >= 1/2 - 1e-9."""
    m = v.entries
    tol = 1e-12 * max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.T).max() > tol:
        return False
    try:
        nu = symplectic_eigenvalues(v)
    except ValueError:
        return False
    return bool(nu.min() >= VACUUM_VARIANCE - PHYSICALITY_ATOL)


def williamson(v: CovMatrix) -> WilliamsonDecomposition:
    """Williamson normal form of a positive-definite CM.

    Route: with R = V^{1/2} (symmetric square root via eigendecomposition),
    the kernel K = R Omega R is real antisymmetric; its real Schur form
    Q^T K Q is block diagonal with blocks nu_k * [[0,1],[-1,0]]. Then
    S = R Q D^{-1/2} satisfies S Omega S^T = Omega and V = S D S^T with
    D = diag(nu_1, nu_1, ...). Blocks are sign-normalized and sorted by
    descending nu_k so output is deterministic for a given input.
    """
    m = _require_symmetric_pd(v)
    n = v.n_modes
    omega = symplectic_form(n)

    lam, u = np.linalg.eigh(m)
    if lam.min() <= 0:
        raise ValueError("covariance matrix must be positive definite")
    sqrt_v = (u * np.sqrt(lam)) @ u.T

    kernel = sqrt_v @ omega @ sqrt_v
    kernel = 0.5 * (kernel - kernel.T)
    t, q = schur(kernel, output="real")

    nus = np.empty(n)
    for k in range(n):
        b = t[2 * k, 2 * k + 1]
        nus[k] = abs(b)
        if b < 0:
            # flip the block to the canonical [[0, nu], [-nu, 0]] orientation
            q[:, [2 * k, 2 * k + 1]] = q[:, [2 * k + 1, 2 * k]]

    order = np.argsort(-nus, kind="stable")
    nus = nus[order]
    col_order = np.ravel(np.column_stack((2 * order, 2 * order + 1)))
    q = q[:, col_order]

    s = sqrt_v @ q @ np.diag(np.repeat(1.0 / np.sqrt(nus), 2))

    scale = max(1.0, float(np.abs(m).max()))
    res_form = np.abs(s @ omega @ s.T - omega).max()
    res_recon = np.abs(s @ np.diag(np.repeat(nus, 2)) @ s.T - m).max()
    if res_form > 1e-8 * scale or res_recon > 1e-8 * scale:
        raise NumericFailure(
            "williamson decomposition failed to converge: "
            f"symplectic-form residual {res_form:.3e}, reconstruction residual {res_recon:.3e}"
        )
    return WilliamsonDecomposition(s_matrix=s, spectrum=nus)
