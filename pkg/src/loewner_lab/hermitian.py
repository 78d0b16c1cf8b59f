"""Dense complex Hermitian linear algebra at desk scale (dim <= 64).

Spectral decomposition is done with a cyclic Jacobi sweep on the complex
Hermitian matrix (numba-compiled kernel), so the package carries its own
eigensolver end to end. Everything downstream -- functional calculus,
Loewner comparisons, compressions, corner inverses, range projections --
is built on top of it.

All functions are pure; randomized generators take explicit seeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import (
    BadRank,
    DimensionMismatch,
    DomainViolation,
    NonHermitianInput,
    NotAProjection,
    NotBoundedBelow,
    NotPositive,
)

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "SpectralDecomposition",
    "spectral_decompose",
    "operator_norm",
    "loewner_geq",
    "lambda_min",
    "lambda_max",
    "psd_sqrt",
    "matrix_function",
    "compress",
    "compression_inverse",
    "range_projection",
    "range_basis",
    "random_hermitian",
    "random_projection",
    "haar_unitary",
    "as_generator",
    "derive_rng",
    "require_hermitian",
    "require_projection",
    "is_hermitian",
    "matrix_to_json",
    "matrix_from_json",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative tolerance factors used across the package.

    hermitian_tol scales with max|entry|; eig_tol, loewner_tol and
    residual_tol scale with the operator norm of the data (floored at 1);
    proj_tol is absolute (projections have norm ~1).
    """

    hermitian_tol: float = 1e-12
    proj_tol: float = 1e-10
    eig_tol: float = 1e-10
    loewner_tol: float = 1e-8
    residual_tol: float = 1e-8

    def __post_init__(self):
        for name in ("hermitian_tol", "proj_tol", "eig_tol", "loewner_tol", "residual_tol"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


DEFAULT_TOL = ToleranceConfig()

_JACOBI_SWEEP_TOL = 1e-14  # off-diagonal Frobenius mass threshold, relative to ||H||_F
_JACOBI_MAX_SWEEPS = 64


@njit(cache=True)
def _jacobi_kernel(A, U, thresh, max_sweeps):  # pragma: no cover - compiled
    n = A.shape[0]
    for _sweep in range(max_sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off += 2.0 * (A[i, j].real ** 2 + A[i, j].imag ** 2)
        if np.sqrt(off) < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= thresh / (n * n):
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                phase = apq / mag
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase
                spc = np.conj(sp)
                for i in range(n):
                    aip = A[i, p]
                    aiq = A[i, q]
                    A[i, p] = c * aip - spc * aiq
                    A[i, q] = sp * aip + c * aiq
                for i in range(n):
                    api = A[p, i]
                    aqi = A[q, i]
                    A[p, i] = c * api - sp * aqi
                    A[q, i] = spc * api + c * aqi
                for i in range(n):
                    uip = U[i, p]
                    uiq = U[i, q]
                    U[i, p] = c * uip - spc * uiq
                    U[i, q] = sp * uip + c * uiq


def _as_complex_square(A) -> np.ndarray:
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    return M


def is_hermitian(A, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    M = _as_complex_square(A)
    scale = np.max(np.abs(M)) if M.size else 0.0
    return np.max(np.abs(M - M.conj().T)) <= tol.hermitian_tol * max(scale, 1e-300) or scale == 0.0


def require_hermitian(A, tol: ToleranceConfig = DEFAULT_TOL, what: str = "matrix") -> np.ndarray:
    """Validate Hermiticity and return the exactly symmetrized copy."""
    M = _as_complex_square(A)
    if not is_hermitian(M, tol):
        dev = np.max(np.abs(M - M.conj().T))
        raise NonHermitianInput(f"{what} deviates from Hermitian by {dev:.3e}")
    return (M + M.conj().T) / 2.0


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues ascending, basis columns the matching eigenvectors."""

    eigenvalues: np.ndarray
    basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.basis
        return (U * self.eigenvalues) @ U.conj().T


def spectral_decompose(H, tol: ToleranceConfig = DEFAULT_TOL) -> SpectralDecomposition:
    """Cyclic Jacobi eigendecomposition of a complex Hermitian matrix."""
    A = require_hermitian(H, tol)
    n = A.shape[0]
    U = np.eye(n, dtype=np.complex128)
    fro = np.linalg.norm(A)
    if fro > 0.0:
        _jacobi_kernel(A, U, _JACOBI_SWEEP_TOL * fro, _JACOBI_MAX_SWEEPS)
    w = np.diagonal(A).real.copy()
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[order], np.ascontiguousarray(U[:, order]))


def _eigvals(H, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    return spectral_decompose(H, tol).eigenvalues


def lambda_min(H, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    return float(_eigvals(H, tol)[0])


def lambda_max(H, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    return float(_eigvals(H, tol)[-1])


def operator_norm(X) -> float:
    """Largest singular value of a (possibly rectangular, non-Hermitian) matrix."""
    M = np.asarray(X, dtype=np.complex128)
    if M.ndim == 1:
        M = M[:, None]
    if M.size == 0:
        return 0.0
    if M.shape[0] <= M.shape[1]:
        G = M @ M.conj().T
    else:
        G = M.conj().T @ M
    G = (G + G.conj().T) / 2.0
    w = _eigvals(G)
    return float(np.sqrt(max(w[-1], 0.0)))


def loewner_geq(A, B, tol: float | None = None) -> bool:
    """A >= B in the Loewner order, i.e. lambda_min(A - B) >= -tol.

    Default tol is 1e-8 * max(||A||, ||B||, 1).
    """
    MA = require_hermitian(A, what="A")
    MB = require_hermitian(B, what="B")
    if MA.shape != MB.shape:
        raise DimensionMismatch(f"shape mismatch {MA.shape} vs {MB.shape}")
    if tol is None:
        tol = DEFAULT_TOL.loewner_tol * max(operator_norm(MA), operator_norm(MB), 1.0)
    return lambda_min(MA - MB) >= -tol


def psd_sqrt(H, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """PSD square root; eigenvalues in [-eig_tol*||H||, 0) are clamped to 0."""
    dec = spectral_decompose(H, tol)
    w = dec.eigenvalues
    scale = max(abs(w[0]), abs(w[-1]))
    if w[0] < -tol.eig_tol * max(scale, 1e-300):
        raise NotPositive(f"lambda_min = {w[0]:.3e} below -eig_tol*||H|| = {-tol.eig_tol * scale:.3e}")
    clamped = np.maximum(w, 0.0)
    U = dec.basis
    R = (U * np.sqrt(clamped)) @ U.conj().T
    return (R + R.conj().T) / 2.0


def matrix_function(f, H, domain=None, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Continuous functional calculus U f(Lambda) U* for Hermitian H.

    If ``domain`` (an object with ``contains``) is given, every eigenvalue
    must lie in it, otherwise DomainViolation lists the offenders.
    """
    dec = spectral_decompose(H, tol)
    w = dec.eigenvalues
    if domain is not None:
        offending = [float(x) for x in w if not domain.contains(float(x))]
        if offending:
            raise DomainViolation(
                f"eigenvalues outside domain {domain}: {offending}", offending=offending
            )
    vals = np.array([f(float(x)) for x in w], dtype=np.float64)
    U = dec.basis
    F = (U * vals) @ U.conj().T
    return (F + F.conj().T) / 2.0


def compress(P, H) -> np.ndarray:
    """The compression P H P in ambient coordinates."""
    MP = _as_complex_square(P)
    MH = _as_complex_square(H)
    if MP.shape != MH.shape:
        raise DimensionMismatch(f"shape mismatch {MP.shape} vs {MH.shape}")
    C = MP @ MH @ MP
    return (C + C.conj().T) / 2.0


def require_projection(P, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Validate ||P^2 - P|| <= proj_tol and eigenvalues near {0, 1}."""
    M = require_hermitian(P, tol, what="projection")
    if operator_norm(M @ M - M) > tol.proj_tol:
        raise NotAProjection("||P^2 - P|| exceeds proj_tol")
    w = _eigvals(M, tol)
    if np.any(np.minimum(np.abs(w), np.abs(w - 1.0)) > tol.proj_tol):
        raise NotAProjection("projection eigenvalues not within proj_tol of {0, 1}")
    return M


def range_basis(P, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of range(P) for a projection P."""
    M = require_projection(P, tol)
    dec = spectral_decompose(M, tol)
    keep = dec.eigenvalues > 0.5
    return np.ascontiguousarray(dec.basis[:, keep])


def compression_inverse(P, H, eta: float, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Inverse of PHP taken inside the corner algebra pMp (zero off range(P)).

    Requires PHP >= eta*P on range(P) with eta > 0.
    """
    MH = require_hermitian(H, tol)
    V = range_basis(P, tol)
    if V.shape[0] != MH.shape[0]:
        raise DimensionMismatch("projection and matrix dimensions differ")
    if V.shape[1] == 0:
        return np.zeros_like(MH)
    B = V.conj().T @ MH @ V
    B = (B + B.conj().T) / 2.0
    dec = spectral_decompose(B, tol)
    guard = tol.loewner_tol * max(operator_norm(MH), 1.0)
    if dec.eigenvalues[0] < eta - guard:
        raise NotBoundedBelow(
            f"lambda_min(PHP|range P) = {dec.eigenvalues[0]:.6e} < eta - tol = {eta - guard:.6e}"
        )
    W = dec.basis
    Binv = (W * (1.0 / dec.eigenvalues)) @ W.conj().T
    G = V @ Binv @ V.conj().T
    return (G + G.conj().T) / 2.0


def range_projection(X, rank_tol: float = 1e-10) -> np.ndarray:
    """Orthogonal projection onto the column span of X.

    Singular values <= rank_tol * sigma_max are treated as zero.
    """
    M = np.asarray(X, dtype=np.complex128)
    if M.ndim == 1:
        M = M[:, None]
    if M.size == 0:
        return np.zeros((M.shape[0], M.shape[0]), dtype=np.complex128)
    G = M @ M.conj().T
    G = (G + G.conj().T) / 2.0
    dec = spectral_decompose(G)
    sig2_max = max(dec.eigenvalues[-1], 0.0)
    if sig2_max == 0.0:
        return np.zeros_like(G)
    keep = dec.eigenvalues > (rank_tol**2) * sig2_max
    V = dec.basis[:, keep]
    Q = V @ V.conj().T
    return (Q + Q.conj().T) / 2.0


# -- randomized sampling ------------------------------------------------------


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_rng(master_seed: int, index: int) -> np.random.Generator:
    """Deterministic per-trial generator derived from (master seed, index)."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(index)]))


def haar_unitary(dim: int, seed) -> np.ndarray:
    rng = as_generator(seed)
    Z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    phase = d / np.abs(d)
    return Q * phase.conj()


def random_hermitian(interval, dim: int, seed) -> np.ndarray:
    """Hermitian with eigenvalues sampled uniformly in the given interval."""
    lo, hi = float(interval[0]), float(interval[1])
    if lo > hi:
        raise ValueError(f"empty eigenvalue interval [{lo}, {hi}]")
    if dim < 1:
        raise DimensionMismatch("dim must be >= 1")
    rng = as_generator(seed)
    vals = rng.uniform(lo, hi, size=dim)
    U = haar_unitary(dim, rng)
    H = (U * vals) @ U.conj().T
    return (H + H.conj().T) / 2.0


def random_projection(dim: int, rank: int, seed) -> np.ndarray:
    """Orthogonal projection of exact given rank with Haar-random range."""
    if rank < 0 or rank > dim:
        raise BadRank(f"rank {rank} out of range for dim {dim}")
    if rank == 0:
        return np.zeros((dim, dim), dtype=np.complex128)
    U = haar_unitary(dim, as_generator(seed))
    V = U[:, :rank]
    P = V @ V.conj().T
    return (P + P.conj().T) / 2.0


# -- JSON encoding -------------------------------------------------------------


def matrix_to_json(M) -> dict:
    A = _as_complex_square(M)
    return {
        "dim": int(A.shape[0]),
        "re": A.real.tolist(),
        "im": A.imag.tolist(),
    }


def matrix_from_json(obj, hermitian: bool = True, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    dim = int(obj["dim"])
    re = np.asarray(obj["re"], dtype=np.float64)
    im = np.asarray(obj["im"], dtype=np.float64)
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise DimensionMismatch(f"payload shape does not match dim={dim}")
    M = re + 1j * im
    if hermitian:
        return require_hermitian(M, tol, what="JSON matrix payload")
    return M
