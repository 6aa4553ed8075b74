"""Spectral calculus for small dense symmetric matrices.

Shape operators and normal Jacobi operators are stored as symmetric
matrices in an orthonormal frame. This module provides their
eigendecomposition, the cosine/sinc matrix functions that propagate Jacobi
fields, and the common eigenspace decomposition of a commuting pair.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NotCurvatureAdaptedError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class SpectralPair:
    """One common eigenspace ``E_jk``: ``A = lam`` and ``R = mu`` on it.

    ``basis`` has shape ``(dim, multiplicity)`` with orthonormal columns.
    """

    lam: float
    mu: float
    basis: np.ndarray

    @property
    def multiplicity(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class SpectralData:
    pairs: tuple[SpectralPair, ...]
    dim: int

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def values(self):
        """``(lam, mu, multiplicity)`` triples in canonical order."""
        return [(p.lam, p.mu, p.multiplicity) for p in self.pairs]

    def expanded(self):
        """Arrays of ``lam`` and ``mu`` repeated by multiplicity."""
        lam = np.array([p.lam for p in self.pairs for _ in range(p.multiplicity)])
        mu = np.array([p.mu for p in self.pairs for _ in range(p.multiplicity)])
        return lam, mu


def as_symmetric(S, name="matrix"):
    """Validate and return ``S`` as a float symmetric 2-D array."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"{name} must be square, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError(f"{name} has non-finite entries")
    scale = 1.0 + np.abs(S).max(initial=0.0)
    if np.abs(S - S.T).max(initial=0.0) > 1e-10 * scale:
        raise ValueError(f"{name} is not symmetric")
    return 0.5 * (S + S.T)


def _fix_signs(Q):
    """Flip columns so each one's largest-magnitude entry is positive."""
    if Q.size == 0:
        return Q
    idx = np.argmax(np.abs(Q), axis=0)
    signs = np.sign(Q[idx, np.arange(Q.shape[1])])
    signs[signs == 0] = 1.0
    return Q * signs


def sym_eigen(S):
    """Ascending eigenvalues and sign-normalised orthonormal eigenvectors.

    Returns ``(values, Q)`` with ``S = Q @ diag(values) @ Q.T``.
    """
    S = as_symmetric(S)
    w, Q = np.linalg.eigh(S)
    return w, _fix_signs(Q)


def _apply_scalar(S, fn):
    w, Q = sym_eigen(S)
    return (Q * fn(w)) @ Q.T


def spectral_cos(S, s):
    """``cos(s sqrt(S))`` with the cosh branch on negative eigenvalues."""
    return _apply_scalar(S, lambda w: kernels.fcos_fsinc_array(w, float(s))[0])


def spectral_sinc(S, s):
    """``sin(s sqrt(S)) / sqrt(S)`` with the sinh branch on negative eigenvalues."""
    return _apply_scalar(S, lambda w: kernels.fcos_fsinc_array(w, float(s))[1])


def commutator_residual(A, B):
    """Frobenius norm of ``AB - BA``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return float(np.linalg.norm(A @ B - B @ A))


def cluster_values(values, tol):
    """Group ascending ``values`` into runs whose neighbours differ by < tol.

    Returns a list of index arrays.
    """
    groups = []
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i] - values[i - 1] >= tol:
            groups.append(np.arange(start, i))
            start = i
    return groups


def joint_eigenspaces(A, R, tol=DEFAULT_TOL):
    """Common eigenspace decomposition of a commuting symmetric pair.

    ``R`` is diagonalised first; ``A`` is then diagonalised inside each
    eigenspace of ``R``. Eigenvalues are clustered with tolerance
    ``tol * (1 + ||.||_F)``. Pairs come back sorted by ``(lam, mu)``.

    Raises
    ------
    NotCurvatureAdaptedError
        If ``||[A, R]||_F > tol * (||A||_F + ||R||_F + 1)``.
    """
    A = as_symmetric(A, "A")
    R = as_symmetric(R, "R")
    norm_a = np.linalg.norm(A)
    norm_r = np.linalg.norm(R)
    resid = commutator_residual(A, R)
    bound = tol * (norm_a + norm_r + 1.0)
    if resid > bound:
        raise NotCurvatureAdaptedError(
            f"not curvature-adapted: commutator residual {resid:.3e} exceeds {bound:.3e}"
        )
    tol_a = tol * (1.0 + norm_a)
    tol_r = tol * (1.0 + norm_r)

    pairs = []
    mus, Q = np.linalg.eigh(R)
    for group in cluster_values(mus, tol_r):
        V = Q[:, group]
        mu = float(mus[group].mean())
        lams, W = np.linalg.eigh(V.T @ A @ V)
        for sub in cluster_values(lams, tol_a):
            basis = _fix_signs(V @ W[:, sub])
            pairs.append(SpectralPair(float(lams[sub].mean()), mu, basis))
    pairs.sort(key=lambda p: (p.lam, p.mu))
    return SpectralData(tuple(pairs), A.shape[0])


def diagonal_spectra(lams, mus, tol=DEFAULT_TOL):
    """Spectral data of ``diag(lams)`` and ``diag(mus)`` in the standard basis."""
    return joint_eigenspaces(np.diag(lams), np.diag(mus), tol)
