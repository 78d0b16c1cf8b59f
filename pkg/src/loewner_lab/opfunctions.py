"""Integral representations and randomized testers for operator convexity,
strong operator convexity, and operator monotonicity.

Three representation shapes are supported, each a polynomial part plus
positive measures mu_minus (supported left of the domain interval) and
mu_plus (supported right of it):

  convex:   f(x) = a x^2 + b x + c
                   + int (x-x0)^2 / ((x-t)(x0-t)^2) dmu-(t)
                   + int (x-x0)^2 / ((t-x)(t-x0)^2) dmu+(t)
  strong:   f(x) = c + int 1/(x-t) dmu-(t) + int 1/(t-x) dmu+(t)
  monotone: f(x) = a x + b + int (x-x0) / ((x-t)(x0-t)) dmu-(t)
                   + int (x-x0) / ((t-x)(t-x0)) dmu+(t)

Measures are finite sums of atoms plus piecewise-constant densities, so
every integral has a closed form per piece and the matrix evaluation can
be cross-checked against direct functional calculus at 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParameters, DomainViolation
from .hermitian import (
    DEFAULT_TOL,
    ToleranceConfig,
    compress,
    derive_rng,
    lambda_min,
    matrix_from_json,
    matrix_function,
    matrix_to_json,
    operator_norm,
    random_hermitian,
    random_projection,
    range_basis,
    require_hermitian,
    spectral_decompose,
)
from .interval import Interval

__all__ = [
    "MeasureOnLine",
    "ConvexIntegralRep",
    "StrongConvexRep",
    "MonotoneRep",
    "ScalarFunction",
    "TestVerdict",
    "eval_convex_rep",
    "eval_strong_rep",
    "eval_monotone_rep",
    "matrix_eval_rep",
    "corner_apply",
    "davis_convex_test",
    "strong_convex_test",
    "monotone_test",
    "replay_witness",
    "FUNCTION_REGISTRY",
    "get_function",
    "constant_function",
    "REP_CORPUS",
    "rep_scalar_evaluator",
    "rep_to_json",
]


@dataclass(frozen=True)
class MeasureOnLine:
    """Finite positive measure: atoms [(t, w)] plus constant-density pieces [(u, v, rho)]."""

    atoms: tuple = ()
    pieces: tuple = ()

    def __post_init__(self):
        atoms = tuple((float(t), float(w)) for t, w in self.atoms)
        pieces = tuple((float(u), float(v), float(r)) for u, v, r in self.pieces)
        for _, w in atoms:
            if w < 0:
                raise BadParameters("atom weights must be nonnegative")
        for u, v, r in pieces:
            if r < 0:
                raise BadParameters("piece densities must be nonnegative")
            if u > v:
                raise BadParameters(f"piece [{u}, {v}] is empty")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "pieces", pieces)

    def is_zero(self) -> bool:
        return not self.atoms and all(r == 0 for _, _, r in self.pieces)

    def support_bounds(self):
        locs = [t for t, _ in self.atoms] + [e for u, v, _ in self.pieces for e in (u, v)]
        return (min(locs), max(locs)) if locs else None

    def to_json(self):
        return {"atoms": [list(a) for a in self.atoms], "pieces": [list(p) for p in self.pieces]}


ZERO_MEASURE = MeasureOnLine()


def _check_sides(I: Interval, mu_minus: MeasureOnLine, mu_plus: MeasureOnLine):
    b = mu_minus.support_bounds()
    if b is not None and (b[1] > I.lo or (b[1] == I.lo and I.closed_lo)):
        raise BadParameters("mu_minus must be supported outside the interval, on the left")
    b = mu_plus.support_bounds()
    if b is not None and (b[0] < I.hi or (b[0] == I.hi and I.closed_hi)):
        raise BadParameters("mu_plus must be supported outside the interval, on the right")


@dataclass(frozen=True)
class ConvexIntegralRep:
    a: float
    b: float
    c: float
    x0: float
    I: Interval
    mu_minus: MeasureOnLine = ZERO_MEASURE
    mu_plus: MeasureOnLine = ZERO_MEASURE

    def __post_init__(self):
        if self.a < 0:
            raise BadParameters("quadratic coefficient a must be >= 0")
        if not self.I.interior_contains(self.x0):
            raise BadParameters("x0 must lie in the interior of the interval")
        _check_sides(self.I, self.mu_minus, self.mu_plus)


@dataclass(frozen=True)
class StrongConvexRep:
    c: float
    I: Interval
    mu_minus: MeasureOnLine = ZERO_MEASURE
    mu_plus: MeasureOnLine = ZERO_MEASURE

    def __post_init__(self):
        if self.c < 0:
            raise BadParameters("constant c must be >= 0")
        _check_sides(self.I, self.mu_minus, self.mu_plus)


@dataclass(frozen=True)
class MonotoneRep:
    a: float
    b: float
    x0: float
    I: Interval
    mu_minus: MeasureOnLine = ZERO_MEASURE
    mu_plus: MeasureOnLine = ZERO_MEASURE

    def __post_init__(self):
        if self.a < 0:
            raise BadParameters("slope coefficient a must be >= 0")
        if not self.I.contains(self.x0) and not self.I.interior_contains(self.x0):
            raise BadParameters("x0 must lie in the interval")
        _check_sides(self.I, self.mu_minus, self.mu_plus)


def rep_to_json(rep) -> dict:
    obj = {
        "kind": type(rep).__name__,
        "I": rep.I.to_json(),
        "mu_minus": rep.mu_minus.to_json(),
        "mu_plus": rep.mu_plus.to_json(),
    }
    for name in ("a", "b", "c", "x0"):
        if hasattr(rep, name):
            obj[name] = getattr(rep, name)
    return obj


def _require_in_domain(rep, x: float):
    if not rep.I.contains(x):
        raise DomainViolation(f"point {x} outside representation interval {rep.I}", offending=[x])


def eval_convex_rep(rep: ConvexIntegralRep, x: float) -> float:
    _require_in_domain(rep, x)
    x0 = rep.x0
    d = x - x0
    total = rep.a * x * x + rep.b * x + rep.c
    for t, w in rep.mu_minus.atoms:
        total += w * d * d / ((x - t) * (x0 - t) ** 2)
    for t, w in rep.mu_plus.atoms:
        total += w * d * d / ((t - x) * (t - x0) ** 2)

    # antiderivative in t of (x-x0)^2 / ((x-t)(x0-t)^2):
    #   F(t) = log(x0-t) - log(x-t) + (x-x0)/(x0-t)
    def f_minus(t):
        return math.log(x0 - t) - math.log(x - t) + d / (x0 - t)

    # antiderivative in t of (x-x0)^2 / ((t-x)(t-x0)^2):
    #   F(t) = log(t-x) - log(t-x0) + (x-x0)/(t-x0)
    def f_plus(t):
        return math.log(t - x) - math.log(t - x0) + d / (t - x0)

    for u, v, r in rep.mu_minus.pieces:
        total += r * (f_minus(v) - f_minus(u))
    for u, v, r in rep.mu_plus.pieces:
        total += r * (f_plus(v) - f_plus(u))
    return total


def eval_strong_rep(rep: StrongConvexRep, x: float) -> float:
    _require_in_domain(rep, x)
    total = rep.c
    for t, w in rep.mu_minus.atoms:
        total += w / (x - t)
    for t, w in rep.mu_plus.atoms:
        total += w / (t - x)
    for u, v, r in rep.mu_minus.pieces:
        total += r * (math.log(x - u) - math.log(x - v))
    for u, v, r in rep.mu_plus.pieces:
        total += r * (math.log(v - x) - math.log(u - x))
    return total


def eval_monotone_rep(rep: MonotoneRep, x: float) -> float:
    _require_in_domain(rep, x)
    x0 = rep.x0
    d = x - x0
    total = rep.a * x + rep.b
    for t, w in rep.mu_minus.atoms:
        total += w * d / ((x - t) * (x0 - t))
    for t, w in rep.mu_plus.atoms:
        total += w * d / ((t - x) * (t - x0))
    # antiderivative of (x-x0)/((x-t)(x0-t)) in t: log((x-t)/(x0-t))
    for u, v, r in rep.mu_minus.pieces:
        total += r * (math.log((x - v) / (x0 - v)) - math.log((x - u) / (x0 - u)))
    # antiderivative of (x-x0)/((t-x)(t-x0)) in t: log(t-x) - log(t-x0)
    for u, v, r in rep.mu_plus.pieces:
        total += r * (
            (math.log(v - x) - math.log(v - x0)) - (math.log(u - x) - math.log(u - x0))
        )
    return total


def rep_scalar_evaluator(rep):
    """The scalar function a representation defines, as a plain callable."""
    if isinstance(rep, ConvexIntegralRep):
        return lambda x: eval_convex_rep(rep, x)
    if isinstance(rep, StrongConvexRep):
        return lambda x: eval_strong_rep(rep, x)
    if isinstance(rep, MonotoneRep):
        return lambda x: eval_monotone_rep(rep, x)
    raise BadParameters(f"unknown representation type {type(rep).__name__}")


def _resolvent(H, t):
    """(H - t)^{-1} for t strictly below the spectrum (mu_minus side)."""
    return np.linalg.inv(H - t * np.eye(H.shape[0]))


def _log_m(H):
    return matrix_function(math.log, H)


def matrix_eval_rep(rep, H, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """The representation with a Hermitian matrix substituted for x.

    Atoms are evaluated through explicit resolvents, pieces through matrix
    logarithms, giving a code path independent of direct functional
    calculus on the scalar evaluator.
    """
    H = require_hermitian(H, tol)
    w = spectral_decompose(H, tol).eigenvalues
    offending = [float(v) for v in w if not rep.I.contains(float(v))]
    if offending:
        raise DomainViolation(
            f"eigenvalues outside representation interval {rep.I}: {offending}",
            offending=offending,
        )
    n = H.shape[0]
    one = np.eye(n)

    if isinstance(rep, StrongConvexRep):
        F = rep.c * one.astype(np.complex128)
        for t, wgt in rep.mu_minus.atoms:
            F = F + wgt * _resolvent(H, t)
        for t, wgt in rep.mu_plus.atoms:
            F = F - wgt * _resolvent(H, t)
        for u, v, r in rep.mu_minus.pieces:
            F = F + r * (_log_m(H - u * one) - _log_m(H - v * one))
        for u, v, r in rep.mu_plus.pieces:
            F = F + r * (_log_m(v * one - H) - _log_m(u * one - H))
        return (F + F.conj().T) / 2.0

    if isinstance(rep, ConvexIntegralRep):
        x0 = rep.x0
        D = H - x0 * one
        F = rep.a * (H @ H) + rep.b * H + rep.c * one
        for t, wgt in rep.mu_minus.atoms:
            F = F + (wgt / (x0 - t) ** 2) * (D @ _resolvent(H, t) @ D)
        for t, wgt in rep.mu_plus.atoms:
            F = F - (wgt / (t - x0) ** 2) * (D @ _resolvent(H, t) @ D)

        def f_minus(t):
            return math.log(x0 - t) * one - _log_m(H - t * one) + D / (x0 - t)

        def f_plus(t):
            return _log_m(t * one - H) - math.log(t - x0) * one + D / (t - x0)

        for u, v, r in rep.mu_minus.pieces:
            F = F + r * (f_minus(v) - f_minus(u))
        for u, v, r in rep.mu_plus.pieces:
            F = F + r * (f_plus(v) - f_plus(u))
        return (F + F.conj().T) / 2.0

    if isinstance(rep, MonotoneRep):
        x0 = rep.x0
        D = H - x0 * one
        F = rep.a * H + rep.b * one
        for t, wgt in rep.mu_minus.atoms:
            F = F + (wgt / (x0 - t)) * (D @ _resolvent(H, t))
        for t, wgt in rep.mu_plus.atoms:
            F = F - (wgt / (t - x0)) * (D @ _resolvent(H, t))
        for u, v, r in rep.mu_minus.pieces:
            F = F + r * (
                (_log_m(H - v * one) - math.log(x0 - v) * one)
                - (_log_m(H - u * one) - math.log(x0 - u) * one)
            )
        for u, v, r in rep.mu_plus.pieces:
            F = F + r * (
                (_log_m(v * one - H) - math.log(v - x0) * one)
                - (_log_m(u * one - H) - math.log(u - x0) * one)
            )
        return (F + F.conj().T) / 2.0

    raise BadParameters(f"unknown representation type {type(rep).__name__}")


# -- scalar functions and testers ----------------------------------------------


@dataclass(frozen=True)
class ScalarFunction:
    evaluator: object
    domain: Interval
    label: str

    def __call__(self, x: float) -> float:
        if not self.domain.contains(x):
            raise DomainViolation(f"{self.label}: {x} outside domain {self.domain}", offending=[x])
        return float(self.evaluator(x))


FUNCTION_REGISTRY = {
    "x^2": ScalarFunction(lambda x: x * x, Interval(), "x^2"),
    "x^3": ScalarFunction(lambda x: x**3, Interval(), "x^3"),
    "x": ScalarFunction(lambda x: x, Interval(), "x"),
    "1/x": ScalarFunction(lambda x: 1.0 / x, Interval(0.0, math.inf), "1/x"),
    "sqrt": ScalarFunction(math.sqrt, Interval(0.0, math.inf, closed_lo=True), "sqrt"),
    "-sqrt": ScalarFunction(lambda x: -math.sqrt(x), Interval(0.0, math.inf, closed_lo=True), "-sqrt"),
    "x/(x+1)": ScalarFunction(lambda x: x / (x + 1.0), Interval(-1.0, math.inf), "x/(x+1)"),
    "exp": ScalarFunction(math.exp, Interval(), "exp"),
    "log": ScalarFunction(math.log, Interval(0.0, math.inf), "log"),
}


def constant_function(c: float) -> ScalarFunction:
    return ScalarFunction(lambda x, c=c: c, Interval(), f"const:{c}")


def get_function(label: str, domain: Interval | None = None) -> ScalarFunction:
    """Look up a registry function, optionally restricting its domain."""
    if label.startswith("const:"):
        f = constant_function(float(label.split(":", 1)[1]))
    elif label in FUNCTION_REGISTRY:
        f = FUNCTION_REGISTRY[label]
    else:
        raise BadParameters(f"unknown function label {label!r}")
    if domain is not None:
        return ScalarFunction(f.evaluator, domain.intersect(f.domain), f.label)
    return f


# built-in representation corpus; scalar closed forms live in the registry
# where one exists, otherwise the rep itself defines the function
REP_CORPUS = {
    "1/x (strong)": StrongConvexRep(
        c=0.0, I=Interval(0.0, math.inf), mu_minus=MeasureOnLine(atoms=((0.0, 1.0),))
    ),
    "1/x (convex)": ConvexIntegralRep(
        a=0.0, b=-1.0, c=2.0, x0=1.0, I=Interval(0.0, math.inf),
        mu_minus=MeasureOnLine(atoms=((0.0, 1.0),)),
    ),
    "x^2 (convex)": ConvexIntegralRep(a=1.0, b=0.0, c=0.0, x0=0.0, I=Interval()),
    "x/(x+1) (monotone)": MonotoneRep(
        a=0.0, b=0.0, x0=0.0, I=Interval(-1.0, math.inf),
        mu_minus=MeasureOnLine(atoms=((-1.0, 1.0),)),
    ),
    "x (monotone)": MonotoneRep(a=1.0, b=0.0, x0=0.0, I=Interval()),
    "log((x+2)/(x+1)) (strong)": StrongConvexRep(
        c=0.0, I=Interval(0.0, math.inf), mu_minus=MeasureOnLine(pieces=((-2.0, -1.0, 1.0),))
    ),
    "log(2(x+1)/(x+2)) (monotone)": MonotoneRep(
        a=0.0, b=0.0, x0=0.0, I=Interval(-0.5, math.inf),
        mu_minus=MeasureOnLine(pieces=((-2.0, -1.0, 1.0),)),
    ),
    "piece (convex)": ConvexIntegralRep(
        a=0.0, b=0.0, c=0.0, x0=0.0, I=Interval(-0.5, math.inf),
        mu_minus=MeasureOnLine(pieces=((-2.0, -1.0, 1.0),)),
    ),
    "resolvent mix (strong)": StrongConvexRep(
        c=0.25, I=Interval(-1.0, 1.0),
        mu_minus=MeasureOnLine(atoms=((-2.0, 0.5),), pieces=((-4.0, -3.0, 0.7),)),
        mu_plus=MeasureOnLine(atoms=((1.5, 0.3),), pieces=((2.0, 3.0, 0.4),)),
    ),
}


@dataclass(frozen=True)
class TestVerdict:
    passed: bool
    trials: int
    witness: dict | None = None
    note: str = ""

    def to_json(self):
        return {
            "passed": self.passed,
            "trials": self.trials,
            "witness": self.witness,
            "note": self.note,
        }


def corner_apply(f, h, p, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Apply f inside the corner pMp: compress to range(p), evaluate, re-embed."""
    V = range_basis(p, tol)
    if V.shape[1] == 0:
        return np.zeros_like(np.asarray(p, dtype=np.complex128))
    B = V.conj().T @ h @ V
    B = (B + B.conj().T) / 2.0
    FB = matrix_function(f, B, tol=tol)
    out = V @ FB @ V.conj().T
    return (out + out.conj().T) / 2.0


def _sample_box(domain: Interval) -> tuple[float, float]:
    """Finite eigenvalue sampling range inside a (possibly unbounded) domain."""
    lo = domain.lo if math.isfinite(domain.lo) else None
    hi = domain.hi if math.isfinite(domain.hi) else None
    if lo is None and hi is None:
        lo, hi = -2.0, 2.0
    elif lo is None:
        lo = hi - 4.0
    elif hi is None:
        hi = lo + 4.0
    width = hi - lo
    if not domain.closed_lo:
        lo += 0.05 * width
    if not domain.closed_hi:
        hi -= 0.05 * width
    return lo, hi


def _witness_threshold(scale: float, tol: ToleranceConfig) -> float:
    # witnesses must violate by a safe multiple of the comparison tolerance
    # so replay from serialized data cannot flip the verdict
    return 10.0 * tol.loewner_tol * max(scale, 1.0)


def davis_convex_test(
    f: ScalarFunction, dims=(2, 3, 4, 5), trials: int = 10000, seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> TestVerdict:
    """Search for violations of p f(php) p <= p f(h) p (compressed criterion).

    f(php) is evaluated inside the corner pMp, so domains not containing 0
    are handled; the corner spectrum always lies in the convex hull of the
    spectrum of h. A pass is evidence at N trials, not a proof.
    """
    lo, hi = _sample_box(f.domain)
    dims = [int(d) for d in dims]
    for trial in range(int(trials)):
        rng = derive_rng(seed, trial)
        dim = dims[trial % len(dims)]
        h = random_hermitian([lo, hi], dim, rng)
        rank = int(rng.integers(1, dim)) if dim > 1 else 1
        p = random_projection(dim, rank, rng)
        lhs = corner_apply(f, compress(p, h), p, tol)
        rhs = compress(p, matrix_function(f, h, tol=tol))
        gap = lambda_min(rhs - lhs)
        scale = max(operator_norm(rhs), operator_norm(lhs), 1.0)
        if gap < -_witness_threshold(scale, tol):
            witness = {
                "kind": "davis",
                "function": f.label,
                "h": matrix_to_json(h),
                "p": matrix_to_json(p),
                "violating_eigenvalue": float(gap),
                "trial": trial,
            }
            return TestVerdict(False, trial + 1, witness)
    return TestVerdict(True, int(trials), None, note="no violation found; not a proof")


def strong_convex_test(
    f: ScalarFunction, dims=(2, 3, 4, 5), trials: int = 10000, seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> TestVerdict:
    """Search for violations of p f(php) p <= f(h) (uncompressed right side)."""
    lo, hi = _sample_box(f.domain)
    dims = [int(d) for d in dims]
    for trial in range(int(trials)):
        rng = derive_rng(seed, trial)
        dim = dims[trial % len(dims)]
        h = random_hermitian([lo, hi], dim, rng)
        rank = int(rng.integers(1, dim)) if dim > 1 else 1
        p = random_projection(dim, rank, rng)
        lhs = corner_apply(f, compress(p, h), p, tol)
        rhs = matrix_function(f, h, tol=tol)
        gap = lambda_min(rhs - lhs)
        scale = max(operator_norm(rhs), operator_norm(lhs), 1.0)
        if gap < -_witness_threshold(scale, tol):
            witness = {
                "kind": "strong",
                "function": f.label,
                "h": matrix_to_json(h),
                "p": matrix_to_json(p),
                "violating_eigenvalue": float(gap),
                "trial": trial,
            }
            return TestVerdict(False, trial + 1, witness)
    return TestVerdict(True, int(trials), None, note="no violation found; not a proof")


def monotone_test(
    f: ScalarFunction, dims=(2, 3, 4, 5), trials: int = 10000, seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> TestVerdict:
    """Search for pairs h1 <= h2 in the domain with f(h1) <= f(h2) failing."""
    lo, hi = _sample_box(f.domain)
    width = hi - lo
    dims = [int(d) for d in dims]
    for trial in range(int(trials)):
        rng = derive_rng(seed, trial)
        dim = dims[trial % len(dims)]
        h1 = random_hermitian([lo, lo + 0.7 * width], dim, rng)
        bump = random_hermitian([0.0, 0.3 * width], dim, rng)
        h2 = h1 + bump
        gap = lambda_min(matrix_function(f, h2, tol=tol) - matrix_function(f, h1, tol=tol))
        scale = max(operator_norm(h1), operator_norm(h2), 1.0)
        if gap < -_witness_threshold(scale, tol):
            witness = {
                "kind": "monotone",
                "function": f.label,
                "h1": matrix_to_json(h1),
                "h2": matrix_to_json(h2),
                "violating_eigenvalue": float(gap),
                "trial": trial,
            }
            return TestVerdict(False, trial + 1, witness)
    return TestVerdict(True, int(trials), None, note="no violation found; not a proof")


def replay_witness(witness: dict, f: ScalarFunction | None = None,
                   tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Recompute a witness violation from its serialized matrices.

    Returns the violating eigenvalue (negative for a genuine violation).
    """
    if f is None:
        f = get_function(witness["function"])
    kind = witness["kind"]
    if kind == "monotone":
        h1 = matrix_from_json(witness["h1"])
        h2 = matrix_from_json(witness["h2"])
        return float(lambda_min(matrix_function(f, h2, tol=tol) - matrix_function(f, h1, tol=tol)))
    h = matrix_from_json(witness["h"])
    p = matrix_from_json(witness["p"])
    lhs = corner_apply(f, compress(p, h), p, tol)
    if kind == "davis":
        rhs = compress(p, matrix_function(f, h, tol=tol))
    elif kind == "strong":
        rhs = matrix_function(f, h, tol=tol)
    else:
        raise BadParameters(f"unknown witness kind {kind!r}")
    return float(lambda_min(rhs - lhs))
