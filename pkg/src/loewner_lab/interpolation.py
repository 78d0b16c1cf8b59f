"""Interpolation inside a Loewner interval with a prescribed compression.

Given Hermitian k <= h, a projection p, and a corner target y, these
constructions produce x with p x p = y (exactly, or up to an eps-slack
enlargement of the interval) together with a certificate recording the
compression residual, interval margins, and distance to the target.

Every constructor re-audits its own output and raises ContractViolated
rather than returning an unverified matrix: the formulas involve
near-singular inverses and silent drift is the main numerical risk.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .completion import ColumnConstraint, fix_column
from .errors import ContractViolated, DimensionMismatch, PreconditionViolated
from .hermitian import (
    DEFAULT_TOL,
    ToleranceConfig,
    compress,
    compression_inverse,
    derive_rng,
    lambda_min,
    matrix_from_json,
    matrix_to_json,
    operator_norm,
    psd_sqrt,
    random_hermitian,
    random_projection,
    range_projection,
    require_hermitian,
    require_projection,
    spectral_decompose,
)

__all__ = [
    "OperatorInterval",
    "CompressionTarget",
    "InterpolationCertificate",
    "C_AUDIT_DEFAULT",
    "interpolate_with_slack",
    "row_contraction_factor",
    "interpolate_one_sided",
    "interpolate_exact",
    "estimate_constants",
    "sample_slack_instance",
    "sample_one_sided_instance",
    "sample_exact_instance",
    "instance_to_json",
    "instance_from_json",
]

C_AUDIT_DEFAULT = 50.0


@dataclass(frozen=True)
class OperatorInterval:
    """Validated pair k <= h of same-dimension Hermitian matrices."""

    k: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        k = require_hermitian(self.k, what="k")
        h = require_hermitian(self.h, what="h")
        if k.shape != h.shape:
            raise DimensionMismatch(f"k and h shapes differ: {k.shape} vs {h.shape}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "h", h)
        scale = max(operator_norm(h), operator_norm(k), 1.0)
        if lambda_min(h - k) < -DEFAULT_TOL.loewner_tol * scale:
            raise PreconditionViolated("interval requires h >= k in the Loewner order")

    @property
    def dim(self) -> int:
        return self.k.shape[0]

    def scale(self) -> float:
        return max(operator_norm(self.h), operator_norm(self.k), 1.0)


@dataclass(frozen=True)
class CompressionTarget:
    """Projection p and corner element y = p y p."""

    p: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        p = require_projection(self.p)
        y = require_hermitian(self.y, what="y")
        if p.shape != y.shape:
            raise DimensionMismatch("p and y shapes differ")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "y", y)
        scale = max(operator_norm(y), 1.0)
        if operator_norm(compress(p, y) - y) > DEFAULT_TOL.residual_tol * scale:
            raise PreconditionViolated("target y must live in the corner: y = p y p")

    def validate_against(self, interval: OperatorInterval, tol_factor: float = DEFAULT_TOL.loewner_tol):
        scale = interval.scale()
        tol = tol_factor * scale
        if lambda_min(self.y - compress(self.p, interval.k)) < -tol:
            raise PreconditionViolated("target violates p k p <= y")
        if lambda_min(compress(self.p, interval.h) - self.y) < -tol:
            raise PreconditionViolated("target violates y <= p h p")


@dataclass(frozen=True)
class InterpolationCertificate:
    """Audited record of a completed interpolation."""

    x: np.ndarray
    compression_residual: float
    lower_margin: float
    upper_margin: float
    perturbation: float
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "x": matrix_to_json(self.x),
            "compression_residual": self.compression_residual,
            "lower_margin": self.lower_margin,
            "upper_margin": self.upper_margin,
            "perturbation": self.perturbation,
            "details": dict(self.details),
        }


def _certify(x, target_y, p, lower, upper, perturb_ref, scale, tol: ToleranceConfig, details=None):
    """Build a certificate and enforce the residual/margin contracts."""
    residual = operator_norm(compress(p, x) - target_y)
    lower_margin = lambda_min(x - lower)
    upper_margin = lambda_min(upper - x)
    perturbation = operator_norm(x - perturb_ref) if perturb_ref is not None else 0.0
    if residual > tol.residual_tol * scale:
        raise ContractViolated(f"compression residual {residual:.3e} exceeds {tol.residual_tol * scale:.3e}")
    if lower_margin < -tol.loewner_tol * scale:
        raise ContractViolated(f"lower interval margin {lower_margin:.3e} below tolerance")
    if upper_margin < -tol.loewner_tol * scale:
        raise ContractViolated(f"upper interval margin {upper_margin:.3e} below tolerance")
    return InterpolationCertificate(
        x=x,
        compression_residual=float(residual),
        lower_margin=float(lower_margin),
        upper_margin=float(upper_margin),
        perturbation=float(perturbation),
        details=details or {},
    )


def interpolate_with_slack(
    interval: OperatorInterval,
    target: CompressionTarget,
    eps: float,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> InterpolationCertificate:
    """Exact compression p x p = y inside the eps-enlarged interval.

    Construction: x = k - eps*1 + z* z with z = t (h - k + 2 eps)^{1/2} and
    t = (y - p k p + eps p)^{1/2} (p (h-k+2 eps) p)^{-1}_{pMp} (h-k+2 eps)^{1/2}.
    The certificate shows p x p = y and k - eps <= x <= h + eps.
    """
    if eps <= 0:
        raise PreconditionViolated("eps must be positive")
    target.validate_against(interval)
    k, h, p, y = interval.k, interval.h, target.p, target.y
    n = interval.dim
    one = np.eye(n)
    scale = max(interval.scale(), eps)

    wsq = h - k + 2.0 * eps * one
    w = psd_sqrt(wsq, tol)
    G = compression_inverse(p, wsq, 2.0 * eps, tol)
    Y = y - compress(p, k) + eps * p
    t = psd_sqrt(Y, tol) @ G @ w
    z = t @ w
    x = k - eps * one + z.conj().T @ z
    x = (x + x.conj().T) / 2.0

    return _certify(
        x, y, p,
        lower=k - eps * one,
        upper=h + eps * one,
        perturb_ref=None,
        scale=scale,
        tol=tol,
        details={"eps": eps, "construction": "slack"},
    )


def row_contraction_factor(
    interval: OperatorInterval,
    y,
    eps: float,
    tol: ToleranceConfig = DEFAULT_TOL,
):
    """Factor (y-k)^{1/2} = t1 (h-k)^{1/2} + eps^{1/2} t2 with ||(t1 t2)|| <= 1.

    t1 = (y-k)^{1/2} w^{-2} (h-k)^{1/2} and t2 = eps^{1/2} (y-k)^{1/2} w^{-2}
    with w = (h-k+eps)^{1/2}.
    """
    if eps <= 0:
        raise PreconditionViolated("eps must be positive")
    y = require_hermitian(y, what="y")
    k, h = interval.k, interval.h
    n = interval.dim
    one = np.eye(n)
    scale = interval.scale()
    guard = tol.loewner_tol * scale
    if lambda_min(y - k) < -guard:
        raise PreconditionViolated("row factorization requires y >= k")
    if lambda_min(h + eps * one - y) < -guard:
        raise PreconditionViolated("row factorization requires y <= h + eps")

    g = h - k
    wsq = g + eps * one
    dec = spectral_decompose(wsq, tol)
    winv2 = (dec.basis * (1.0 / dec.eigenvalues)) @ dec.basis.conj().T
    ymk = psd_sqrt(y - k, tol)
    ghalf = psd_sqrt(g, tol)
    t1 = ymk @ winv2 @ ghalf
    t2 = np.sqrt(eps) * ymk @ winv2

    row = np.sqrt(max(operator_norm(t1 @ t1.conj().T + t2 @ t2.conj().T), 0.0))
    if row > 1.0 + 1e-10:
        raise ContractViolated(f"row norm ||(t1 t2)|| = {row:.12f} exceeds 1")
    recon = operator_norm(t1 @ ghalf + np.sqrt(eps) * t2 - ymk)
    if recon > tol.residual_tol * max(scale, 1.0):
        raise ContractViolated(f"row reconstruction residual {recon:.3e} too large")
    return t1, t2


def _check_one_sided_pre(interval, p, y, eps, eta, tol, lower_slack):
    """Shared precondition gate; lower_slack = 0 for one-sided, eps for exact."""
    k, h = interval.k, interval.h
    n = interval.dim
    one = np.eye(n)
    scale = interval.scale()
    guard = tol.loewner_tol * scale
    g = h - k
    if not (0 < eps < eta):
        raise PreconditionViolated("requires 0 < eps < eta")
    if eta > operator_norm(g) + guard:
        raise PreconditionViolated("requires eta <= ||h - k||")
    if lambda_min(compress(p, g) - eta * p) < -guard:
        raise PreconditionViolated("requires p (h-k) p >= eta p")
    if lambda_min(compress(p, h) - compress(p, y)) < -guard:
        raise PreconditionViolated("requires p h p >= p y p")
    if lambda_min(compress(p, y) - compress(p, k)) < -guard:
        raise PreconditionViolated("requires p y p >= p k p")
    if lambda_min(y - k + lower_slack * one) < -guard:
        raise PreconditionViolated("requires k - eps <= y" if lower_slack else "requires k <= y")
    if lambda_min(h + eps * one - y) < -guard:
        raise PreconditionViolated("requires y <= h + eps")


def interpolate_one_sided(
    interval: OperatorInterval,
    p,
    y,
    eps: float,
    eta: float,
    c_audit: float = C_AUDIT_DEFAULT,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> InterpolationCertificate:
    """p x p = p y p with k <= x <= h, assuming k <= y <= h + eps already.

    The interpolant is x = k + z* z, z = s (h-k)^{1/2}, where s is a
    norm-one completion of s1 = t1 + eps^{1/2} t2 (p(h-k)p)^{-1}_{pMp} (h-k)^{1/2}
    pinned on the range projection q of (h-k)^{1/2} p. Audited bound:
    ||x - y|| <= c_audit * (eps/eta)^{1/4} * ||h - k||.
    """
    p = require_projection(p, tol)
    y = require_hermitian(y, what="y")
    _check_one_sided_pre(interval, p, y, eps, eta, tol, lower_slack=0.0)
    k, h = interval.k, interval.h
    scale = interval.scale()
    g = h - k
    ghalf = psd_sqrt(g, tol)

    t1, t2 = row_contraction_factor(interval, y, eps, tol)
    G = compression_inverse(p, g, eta, tol)
    s1 = t1 + np.sqrt(eps) * t2 @ G @ ghalf
    q = range_projection(ghalf @ p, rank_tol=1e-10)

    # intermediate contraction audits
    if operator_norm(s1 @ q) > 1.0 + 1e-10:
        raise ContractViolated(f"||s1 q|| = {operator_norm(s1 @ q):.12f} exceeds 1")
    slack = np.sqrt(eps / eta)
    if operator_norm(s1 - t1) > slack + 1e-10:
        raise ContractViolated(
            f"||s1 - t1|| = {operator_norm(s1 - t1):.12f} exceeds sqrt(eps/eta) = {slack:.12f}"
        )

    s = fix_column(ColumnConstraint(s1, q, slack), tol)
    z = s @ ghalf
    x = k + z.conj().T @ z
    x = (x + x.conj().T) / 2.0

    cert = _certify(
        x, compress(p, y), p,
        lower=k,
        upper=h,
        perturb_ref=y,
        scale=scale,
        tol=tol,
        details={"eps": eps, "eta": eta, "construction": "one_sided"},
    )
    bound = c_audit * (eps / eta) ** 0.25 * operator_norm(g)
    if cert.perturbation > bound + tol.residual_tol * scale:
        raise ContractViolated(
            f"perturbation {cert.perturbation:.6e} exceeds audited bound {bound:.6e}"
        )
    return cert


def interpolate_exact(
    interval: OperatorInterval,
    p,
    y,
    eps: float,
    eta: float,
    c_audit: float = C_AUDIT_DEFAULT,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> InterpolationCertificate:
    """Two-sided variant: allows k - eps <= y <= h + eps and still lands in [k, h].

    Chains the one-sided construction twice: first on [k - eps, h] to push y
    above k, then on the negated, reflected data to push under h.
    """
    p = require_projection(p, tol)
    y = require_hermitian(y, what="y")
    _check_one_sided_pre(interval, p, y, eps, eta, tol, lower_slack=eps)
    k, h = interval.k, interval.h
    n = interval.dim
    one = np.eye(n)
    scale = interval.scale()
    g = h - k

    first = interpolate_one_sided(
        OperatorInterval(k - eps * one, h), p, y, eps, eta, c_audit=np.inf, tol=tol
    )
    x1 = first.x

    second = interpolate_one_sided(
        OperatorInterval(-h, -k), p, -x1, eps, eta, c_audit=np.inf, tol=tol
    )
    x = -second.x

    cert = _certify(
        x, compress(p, y), p,
        lower=k,
        upper=h,
        perturb_ref=y,
        scale=scale,
        tol=tol,
        details={"eps": eps, "eta": eta, "construction": "exact"},
    )
    bound = c_audit * (eps / eta) ** 0.25 * operator_norm(g)
    if cert.perturbation > bound + tol.residual_tol * scale:
        raise ContractViolated(
            f"perturbation {cert.perturbation:.6e} exceeds audited bound {bound:.6e}"
        )
    return cert


# -- instance samplers ---------------------------------------------------------


def _corner_contraction(p, rng):
    """Random C with 0 <= C <= p supported on range(p)."""
    dec = spectral_decompose(p)
    V = dec.basis[:, dec.eigenvalues > 0.5]
    r = V.shape[1]
    vals = rng.uniform(0.0, 1.0, size=r)
    Z = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    Q, _ = np.linalg.qr(Z)
    C = V @ ((Q * vals) @ Q.conj().T) @ V.conj().T
    return (C + C.conj().T) / 2.0


def sample_slack_instance(dim: int, eps: float, rng):
    """Random (interval, target) satisfying p k p <= y <= p h p."""
    Zk = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    k = (Zk + Zk.conj().T) / 2.0
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    g = X.conj().T @ X
    h = k + g
    p = random_projection(dim, int(rng.integers(1, dim + 1)), rng)
    W = compress(p, g)
    Whalf = psd_sqrt(W)
    C = _corner_contraction(p, rng)
    y = compress(p, k) + Whalf @ C @ Whalf
    y = (y + y.conj().T) / 2.0
    return OperatorInterval(k, h), CompressionTarget(p, compress(p, y))


def _sample_gap_instance(dim, eps, eta, rng, signed_slack):
    Zk = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    k = (Zk + Zk.conj().T) / 2.0
    g = random_hermitian([eta, eta + 2.0], dim, rng)
    h = k + g
    p = random_projection(dim, int(rng.integers(1, dim + 1)), rng)
    ghalf = psd_sqrt(g)
    vals = rng.uniform(0.0, 1.0, size=dim)
    Z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, _ = np.linalg.qr(Z)
    C = (Q * vals) @ Q.conj().T
    C = (C + C.conj().T) / 2.0
    one = np.eye(dim)
    ZE = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    E = (ZE + ZE.conj().T) / 2.0
    if not signed_slack:
        E = E @ E.conj().T  # PSD so k <= y still holds
    E = (one - p) @ E @ (one - p)
    nE = operator_norm(E)
    if nE > 1e-8:
        E = E * (0.9 * eps / nE)
    else:
        # full-rank p leaves only rounding noise in (1-p)E(1-p);
        # rescaling that noise would inject an unconstrained perturbation
        E = np.zeros_like(E)
    y = k + ghalf @ C @ ghalf + E
    y = (y + y.conj().T) / 2.0
    return OperatorInterval(k, h), p, y


def sample_one_sided_instance(dim: int, eps: float, eta: float, rng):
    """Random instance with k <= y <= h + eps and p(h-k)p >= eta p."""
    return _sample_gap_instance(dim, eps, eta, rng, signed_slack=False)


def sample_exact_instance(dim: int, eps: float, eta: float, rng):
    """Random instance with k - eps <= y <= h + eps (off-corner slack signed)."""
    return _sample_gap_instance(dim, eps, eta, rng, signed_slack=True)


def instance_to_json(interval: OperatorInterval, p, y, eps: float, eta: float | None = None) -> dict:
    obj = {
        "k": matrix_to_json(interval.k),
        "h": matrix_to_json(interval.h),
        "p": matrix_to_json(np.asarray(p)),
        "y": matrix_to_json(np.asarray(y)),
        "eps": float(eps),
    }
    if eta is not None:
        obj["eta"] = float(eta)
    return obj


def instance_from_json(obj):
    interval = OperatorInterval(matrix_from_json(obj["k"]), matrix_from_json(obj["h"]))
    p = matrix_from_json(obj["p"])
    y = matrix_from_json(obj["y"])
    eps = float(obj["eps"])
    eta = float(obj["eta"]) if "eta" in obj and obj["eta"] is not None else None
    return interval, p, y, eps, eta


def estimate_constants(
    dims=(2, 3, 4, 5, 6),
    trials: int = 50,
    eps_eta_grid=(1e-2, 1e-4, 1e-6),
    seed: int = 0,
    eta: float = 1.0,
    c_audit: float = C_AUDIT_DEFAULT,
) -> dict:
    """Empirical sup of perturbation / ((eps/eta)^{1/4} ||h-k||) over a grid.

    Runs both the one-sided and two-sided constructions. The argmax instance
    of each grid cell is serialized so the ratio can be replayed. Also
    reports (never asserts) the sharpened-rate ratio
    perturbation / (2 ||h-k|| sqrt(r + r^2)), r = eps/eta, which applies
    because the sampler guarantees h - k >= eta.
    """
    report = {
        "seed": int(seed),
        "trials": int(trials),
        "dims": [int(d) for d in dims],
        "eps_eta_grid": [float(r) for r in eps_eta_grid],
        "eta": float(eta),
        "c_audit": float(c_audit),
        "cells": [],
        "sup_ratio": 0.0,
        "sup_sharpened_ratio": 0.0,
    }
    index = 0
    for ratio_target in eps_eta_grid:
        eps = ratio_target * eta
        for construction, sampler, runner in (
            ("one_sided", sample_one_sided_instance, interpolate_one_sided),
            ("exact", sample_exact_instance, interpolate_exact),
        ):
            cell = {
                "construction": construction,
                "eps_over_eta": float(ratio_target),
                "sup_ratio": 0.0,
                "sup_sharpened_ratio": 0.0,
                "argmax_instance": None,
            }
            for dim in dims:
                for _ in range(trials):
                    rng = derive_rng(seed, index)
                    index += 1
                    interval, p, y = sampler(int(dim), eps, eta, rng)
                    cert = runner(interval, p, y, eps, eta, c_audit=c_audit)
                    gnorm = operator_norm(interval.h - interval.k)
                    denom = (ratio_target**0.25) * gnorm
                    r = cert.perturbation / denom if denom > 0 else 0.0
                    sharp_denom = 2.0 * gnorm * np.sqrt(ratio_target + ratio_target**2)
                    r_sharp = cert.perturbation / sharp_denom if sharp_denom > 0 else 0.0
                    if r > cell["sup_ratio"]:
                        cell["sup_ratio"] = float(r)
                        cell["argmax_instance"] = instance_to_json(interval, p, y, eps, eta)
                    cell["sup_sharpened_ratio"] = max(cell["sup_sharpened_ratio"], float(r_sharp))
            report["cells"].append(cell)
            report["sup_ratio"] = max(report["sup_ratio"], cell["sup_ratio"])
            report["sup_sharpened_ratio"] = max(
                report["sup_sharpened_ratio"], cell["sup_sharpened_ratio"]
            )
    return report
