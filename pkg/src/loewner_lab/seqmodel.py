"""A computable model of the sequence algebra c (x) M_m and its bidual.

Elements are eventually periodic sequences of m x m Hermitian matrices with
an independent value at infinity. Convergent sequences (cycle constant and
equal to the value at infinity) form the algebra itself; the general
eventually-periodic element models a bidual element whose cluster points
are exactly its distinct cycle entries — which makes semicontinuity
criteria stated through cluster points, lim inf, and lim sup decidable.

Four concrete faces (closed projections) are modeled:

  * BlockFace(k, l): p_n = diag(1_k, 0) for finite n, p_inf = 1_{k+l}.
  * Face18: rank-one p_n drifting so that states see only half the scalar
    weight in the limit; data reduces to a scalar sequence t_n.
  * Face211: the constant projection diag(1, 0) in 2 x 2 blocks.
  * Face45(theta): rank-two p_n tilting by the angle theta; all data is
    carried in 2 x 2 coordinate matrices relative to a basis of range(p_n).

Each face has a closed-form semicontinuity classifier plus an independent
brute-force oracle that tests sampled weak*-convergent state families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParameters, DomainViolation, NotCompressed
from .hermitian import (
    DEFAULT_TOL,
    ToleranceConfig,
    lambda_min,
    matrix_from_json,
    matrix_function,
    matrix_to_json,
    operator_norm,
    require_hermitian,
    spectral_decompose,
)

__all__ = [
    "SeqMatrixElement",
    "BlockFace",
    "Face18",
    "Face211",
    "Face45",
    "SemicontinuityVerdict",
    "InfeasibilityWitness",
    "cluster_points",
    "is_member_of_A",
    "is_member_pAp",
    "usc_on_blockface",
    "lsc_on_blockface",
    "blockface_classify",
    "usc_in_Adoublestar",
    "face18_classify",
    "face211_classify",
    "face45_classify",
    "face45_member_element",
    "face45_corner_map",
    "face45_epsilon",
    "verify_2_11",
    "face_functional_calculus",
    "testnet_oracle",
    "theorem43_instance",
    "theorem48_instance",
]


# -- elements -------------------------------------------------------------------


@dataclass(frozen=True)
class SeqMatrixElement:
    """Eventually periodic sequence of m x m Hermitian blocks plus a value at infinity."""

    m: int
    prefix: tuple
    cycle: tuple
    at_infinity: np.ndarray

    def __post_init__(self):
        if len(self.cycle) == 0:
            raise BadParameters("cycle must be nonempty")
        prefix = tuple(require_hermitian(a, what="prefix entry") for a in self.prefix)
        cycle = tuple(require_hermitian(a, what="cycle entry") for a in self.cycle)
        inf = require_hermitian(self.at_infinity, what="value at infinity")
        for a in prefix + cycle + (inf,):
            if a.shape != (self.m, self.m):
                raise BadParameters(f"block shape {a.shape} does not match m={self.m}")
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)
        object.__setattr__(self, "at_infinity", inf)

    def entry(self, n: int) -> np.ndarray:
        """1-based index; n beyond the prefix wraps around the cycle."""
        if n < 1:
            raise BadParameters("indices start at 1")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.cycle[(n - len(self.prefix) - 1) % len(self.cycle)]

    def map_blocks(self, fn) -> "SeqMatrixElement":
        return SeqMatrixElement(
            self.m,
            tuple(fn(a) for a in self.prefix),
            tuple(fn(a) for a in self.cycle),
            fn(self.at_infinity),
        )

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "prefix": [matrix_to_json(a) for a in self.prefix],
            "cycle": [matrix_to_json(a) for a in self.cycle],
            "inf": matrix_to_json(self.at_infinity),
        }

    @classmethod
    def from_json(cls, obj) -> "SeqMatrixElement":
        return cls(
            int(obj["m"]),
            tuple(matrix_from_json(a) for a in obj.get("prefix", [])),
            tuple(matrix_from_json(a) for a in obj["cycle"]),
            matrix_from_json(obj["inf"]),
        )


def _dedupe(mats, tol_abs):
    out = []
    for a in mats:
        if not any(operator_norm(a - b) <= tol_abs for b in out):
            out.append(a)
    return out


def cluster_points(seq: SeqMatrixElement, extractor=None, tol: ToleranceConfig = DEFAULT_TOL):
    """Cluster points of the (optionally block-extracted) sequence.

    For an eventually periodic sequence these are exactly the distinct
    cycle entries; the prefix never contributes.
    """
    blocks = [extractor(a) if extractor else a for a in seq.cycle]
    scale = max((operator_norm(b) for b in blocks), default=0.0)
    return _dedupe(blocks, tol.residual_tol * max(scale, 1.0))


def is_member_of_A(seq: SeqMatrixElement, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Membership in the algebra itself: the sequence converges to its value at infinity."""
    scale = max(operator_norm(seq.at_infinity), 1.0)
    return all(
        operator_norm(a - seq.at_infinity) <= tol.residual_tol * scale for a in seq.cycle
    )


# -- faces ----------------------------------------------------------------------


@dataclass(frozen=True)
class BlockFace:
    """p_n = diag(1_k, 0_l) for finite n, p_inf = identity on k+l."""

    k: int
    l: int

    def __post_init__(self):
        if self.k < 1 or self.l < 1:
            raise BadParameters("block sizes k, l must be >= 1")

    @property
    def m(self) -> int:
        return self.k + self.l


@dataclass(frozen=True)
class Face18:
    """Rank-one drifting projection; elements reduce to scalar sequences t_n.

    The states supported on p_n see the full weight t_n at finite n but only
    half of t_inf in the weak* limit.
    """


@dataclass(frozen=True)
class Face211:
    """The constant projection diag(1, 0) acting on 2 x 2 blocks.

    The projection lies under a constant element of the algebra itself, so
    the strong, middle, and weak semicontinuity notions all coincide here.
    """


@dataclass(frozen=True)
class Face45:
    """Rank-two tilting projection; all data in 2 x 2 coordinates.

    Finite-n coordinate matrices are taken relative to a basis {v_n, e2} of
    range(p_n); the limit coordinates are relative to {e1, e2}. A state with
    density r at finite n converges weak* to the state with density
    r' = [[s cos^2(theta), t cos(theta)], [conj(t) cos(theta), u]].
    """

    theta: float

    def __post_init__(self):
        if not (0.0 < self.theta < math.pi / 2.0):
            raise BadParameters("theta must lie in (0, pi/2)")


@dataclass(frozen=True)
class SemicontinuityVerdict:
    """Classification outcome; None marks a notion not classified for the face."""

    strongly_usc: bool | None = None
    middle_usc: bool | None = None
    weakly_usc: bool | None = None
    strongly_lsc: bool | None = None
    certificates: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "strongly_usc": self.strongly_usc,
            "middle_usc": self.middle_usc,
            "weakly_usc": self.weakly_usc,
            "strongly_lsc": self.strongly_lsc,
            "certificates": self.certificates,
        }


@dataclass(frozen=True)
class InfeasibilityWitness:
    forced_parameters: tuple
    oscillation: float
    conclusion: str
    certificates: dict = field(default_factory=dict)

    @property
    def infeasible(self) -> bool:
        return self.oscillation > 0.0

    def to_json(self) -> dict:
        return {
            "forced_parameters": list(self.forced_parameters),
            "oscillation": self.oscillation,
            "infeasible": self.infeasible,
            "conclusion": self.conclusion,
            "certificates": self.certificates,
        }


# -- block face -----------------------------------------------------------------


def _top_left(a, k):
    return a[:k, :k]


def _require_blockface_compressed(h: SeqMatrixElement, face: BlockFace, tol: ToleranceConfig):
    if h.m != face.m:
        raise NotCompressed(f"element block size {h.m} does not match face size {face.m}")
    for a in h.prefix + h.cycle:
        off = a.copy()
        off[: face.k, : face.k] = 0.0
        if operator_norm(off) > tol.residual_tol * max(operator_norm(a), 1.0):
            raise NotCompressed("finite-index blocks must be supported on the top-left corner")


def is_member_pAp(h: SeqMatrixElement, face: BlockFace, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Is h a compression p x p of an element x of the algebra?

    Equivalent to convergence of the top-left blocks to the top-left block
    of the value at infinity (the remaining blocks at infinity are free).
    """
    _require_blockface_compressed(h, face, tol)
    a_inf = _top_left(h.at_infinity, face.k)
    scale = max(operator_norm(h.at_infinity), 1.0)
    return all(
        operator_norm(_top_left(a, face.k) - a_inf) <= tol.residual_tol * scale for a in h.cycle
    )


def usc_on_blockface(h: SeqMatrixElement, face: BlockFace, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Upper semicontinuity on the block face: a' <= a_inf for every cluster point a'."""
    _require_blockface_compressed(h, face, tol)
    a_inf = _top_left(h.at_infinity, face.k)
    scale = max(operator_norm(h.at_infinity), max(operator_norm(a) for a in h.cycle), 1.0)
    guard = tol.loewner_tol * scale
    return all(
        lambda_min(a_inf - c) >= -guard
        for c in cluster_points(h, extractor=lambda a: _top_left(a, face.k), tol=tol)
    )


def lsc_on_blockface(h: SeqMatrixElement, face: BlockFace, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Mirrored inequality: a' >= a_inf for every cluster point."""
    _require_blockface_compressed(h, face, tol)
    a_inf = _top_left(h.at_infinity, face.k)
    scale = max(operator_norm(h.at_infinity), max(operator_norm(a) for a in h.cycle), 1.0)
    guard = tol.loewner_tol * scale
    return all(
        lambda_min(c - a_inf) >= -guard
        for c in cluster_points(h, extractor=lambda a: _top_left(a, face.k), tol=tol)
    )


def blockface_classify(h: SeqMatrixElement, face: BlockFace, tol: ToleranceConfig = DEFAULT_TOL) -> SemicontinuityVerdict:
    """Strong usc/lsc on the block face; no closed middle/weak criterion is modeled here."""
    usc = usc_on_blockface(h, face, tol)
    lsc = lsc_on_blockface(h, face, tol)
    clusters = cluster_points(h, extractor=lambda a: _top_left(a, face.k), tol=tol)
    return SemicontinuityVerdict(
        strongly_usc=usc,
        middle_usc=None,
        weakly_usc=None,
        strongly_lsc=lsc,
        certificates={"cluster_count": len(clusters)},
    )


def usc_in_Adoublestar(x: SeqMatrixElement, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Upper semicontinuity of the full sequence: x' <= x_inf for every cluster point."""
    scale = max(operator_norm(x.at_infinity), max(operator_norm(a) for a in x.cycle), 1.0)
    guard = tol.loewner_tol * scale
    return all(lambda_min(x.at_infinity - c) >= -guard for c in cluster_points(x, tol=tol))


# -- scalar faces ---------------------------------------------------------------


def face18_classify(t_prefix, t_cycle, t_inf: float) -> SemicontinuityVerdict:
    """Scalar criteria for the drifting rank-one face.

    strongly lsc iff t_inf / 2 <= min over cluster values; strongly usc iff
    t_inf / 2 >= max; the middle and weak notions hold for every element of
    this face, so they are reported as always true.
    """
    t_cycle = [float(t) for t in t_cycle]
    if not t_cycle:
        raise BadParameters("cycle of scalar values must be nonempty")
    half = 0.5 * float(t_inf)
    return SemicontinuityVerdict(
        strongly_usc=half >= max(t_cycle),
        middle_usc=True,
        weakly_usc=True,
        strongly_lsc=half <= min(t_cycle),
        certificates={"half_t_inf": half, "cycle_min": min(t_cycle), "cycle_max": max(t_cycle)},
    )


def face211_classify(x_cycle, x_inf: float, tol: float = 1e-12) -> SemicontinuityVerdict:
    """Criteria for the constant diag(1,0) face acting on scalar corner entries.

    The projection is dominated by a constant algebra element, so all three
    usc notions coincide: every cluster value must be <= the value at infinity.
    """
    x_cycle = [float(x) for x in x_cycle]
    if not x_cycle:
        raise BadParameters("cycle of scalar values must be nonempty")
    usc = max(x_cycle) <= float(x_inf) + tol
    lsc = min(x_cycle) >= float(x_inf) - tol
    return SemicontinuityVerdict(
        strongly_usc=usc,
        middle_usc=usc,
        weakly_usc=usc,
        strongly_lsc=lsc,
        certificates={"cycle_max": max(x_cycle), "x_inf": float(x_inf)},
    )


# -- tilting rank-two face ------------------------------------------------------


def _coord_matrix(abc) -> np.ndarray:
    a, b, c = abc
    return np.array([[a, b], [np.conj(b), c]], dtype=np.complex128)


def _coord_triple(M) -> tuple:
    return (complex(M[0, 0]).real, complex(M[0, 1]), complex(M[1, 1]).real)


def face45_member_element(inf_coords, theta: float):
    """The compression of a constant algebra element to the tilting face.

    In coordinates the finite-index blocks are R M_inf R with R = diag(cos theta, 1).
    """
    M_inf = require_hermitian(_coord_matrix(inf_coords), what="limit coordinates")
    R = np.diag([math.cos(theta), 1.0])
    M_n = R @ M_inf @ R
    return [_coord_triple(M_n)], _coord_triple(M_inf)


def face45_corner_map(fn, cycle_coords, inf_coords):
    """Apply a 2x2 matrix map per index in the face's corner coordinates."""
    out_cycle = [_coord_triple(fn(_coord_matrix(c))) for c in cycle_coords]
    out_inf = _coord_triple(fn(_coord_matrix(inf_coords)))
    return out_cycle, out_inf


def face45_epsilon(cycle_coords, inf_coords) -> float:
    """Largest eps with h >= eps p, via corner eigenvalues at every index."""
    vals = [lambda_min(_coord_matrix(c)) for c in cycle_coords]
    vals.append(lambda_min(_coord_matrix(inf_coords)))
    return float(min(vals))


def face45_classify(
    cycle_coords, inf_coords, theta: float, tol: ToleranceConfig = DEFAULT_TOL, eq_tol: float = 1e-9
) -> SemicontinuityVerdict:
    """Semicontinuity of an element of the tilting face from its coordinates.

    strongly usc iff [[a_inf cos^2, b_inf cos], [conj cos, c_inf]] dominates
    every cluster point (necessary and sufficient); the middle condition
    (c_inf > c, or c_inf = c with b = b_inf cos) is necessary only; weakly
    usc iff c_inf >= c for every cluster point.
    """
    if not (0.0 < theta < math.pi / 2.0):
        raise BadParameters("theta must lie in (0, pi/2)")
    if not cycle_coords:
        raise BadParameters("cycle coordinates must be nonempty")
    ct = math.cos(theta)
    a_inf, b_inf, c_inf = inf_coords
    check = _coord_matrix((a_inf * ct * ct, b_inf * ct, c_inf))

    mats = [_coord_matrix(c) for c in cycle_coords]
    scale = max(max(operator_norm(M) for M in mats), operator_norm(check), 1.0)
    clusters = _dedupe(mats, tol.residual_tol * scale)
    guard = tol.loewner_tol * scale

    strong = all(lambda_min(check - M) >= -guard for M in clusters)
    middle = True
    weak = True
    for M in clusters:
        c = complex(M[1, 1]).real
        b = complex(M[0, 1])
        if c_inf < c - eq_tol:
            weak = False
            middle = False
        elif abs(c_inf - c) <= eq_tol and abs(b - b_inf * ct) > eq_tol:
            middle = False
    return SemicontinuityVerdict(
        strongly_usc=strong,
        middle_usc=middle,
        weakly_usc=weak,
        strongly_lsc=None,
        certificates={"theta": theta, "cluster_count": len(clusters)},
    )


# -- the rank-one gap counterexample -------------------------------------------


def verify_2_11(t_cycle, delta=None, horizon: int = 20) -> InfeasibilityWitness:
    """Certify the infeasibility mechanism of the rank-one-gap counterexample.

    With h_n = [[t_n d_n, sqrt(d_n)], [sqrt(d_n), 1/2]] and
    k_n = [[(t_n - 1) d_n, 0], [0, -1/2]], the gap h_n - k_n has rank one, so
    any x_n between k_n and h_n with vanishing (1,1) corner entry is forced
    onto the segment x_n = k_n + s_n (h_n - k_n) with s_n = 1 - t_n. Its
    (2,2) entry is then 1/2 - t_n; a non-constant t-cycle makes that entry
    oscillate, so no algebra element can satisfy all the constraints.
    """
    t_cycle = [float(t) for t in t_cycle]
    if len(set(t_cycle)) < 2:
        raise BadParameters("t_cycle must take at least two distinct values")
    if any(not (0.0 < t < 1.0) for t in t_cycle):
        raise BadParameters("t_cycle values must lie in (0, 1)")
    if horizon < 1:
        raise BadParameters("horizon must be >= 1")
    if delta is None:
        delta = [1.0 / n for n in range(1, horizon + 1)]
    else:
        delta = [float(d) for d in delta][:horizon]
        if len(delta) < horizon:
            raise BadParameters("delta sequence shorter than horizon")
    if any(d <= 0 for d in delta):
        raise BadParameters("delta values must be positive")
    if any(b >= a for a, b in zip(delta, delta[1:])):
        raise BadParameters("delta values must be strictly decreasing")

    forced = []
    entries22 = []
    max_det = 0.0
    min_gap_eig = math.inf
    for n in range(1, horizon + 1):
        t = t_cycle[(n - 1) % len(t_cycle)]
        d = delta[n - 1]
        h = np.array([[t * d, math.sqrt(d)], [math.sqrt(d), 0.5]])
        k = np.array([[(t - 1.0) * d, 0.0], [0.0, -0.5]])
        gap = h - k  # [[d, sqrt(d)], [sqrt(d), 1]] -- rank one
        max_det = max(max_det, abs(float(np.linalg.det(gap))))
        min_gap_eig = min(min_gap_eig, lambda_min(gap))
        # p x p = 0 with p = diag(1,0): (1,1) entry (t-1) d + s d = 0
        s = 1.0 - t
        x = k + s * gap
        assert abs(x[0, 0]) < 1e-12 * max(d, 1.0)
        forced.append(s)
        entries22.append(float(x[1, 1]))

    cyc22 = [0.5 - t for t in t_cycle]
    oscillation = max(cyc22) - min(cyc22)  # equals max(t_cycle) - min(t_cycle)
    conclusion = (
        "infeasible: the forced (2,2) entries oscillate, so no norm-convergent "
        "sequence can satisfy p x p = 0 with k <= x <= h"
        if oscillation > 0
        else "feasible"
    )
    return InfeasibilityWitness(
        forced_parameters=tuple(forced),
        oscillation=float(oscillation),
        conclusion=conclusion,
        certificates={
            "max_gap_determinant": max_det,
            "min_gap_eigenvalue": float(min_gap_eig),
            "entries_22": entries22,
        },
    )


# -- functional calculus on faces ------------------------------------------------


def face_functional_calculus(f, h, face, tol: ToleranceConfig = DEFAULT_TOL):
    """Apply a scalar function inside each corner p_n M p_n of a face.

    For the block face, finite-index blocks are evaluated on the top-left
    k x k corner and re-embedded; the value at infinity uses the full block.
    For the constant diag(1,0) face only the scalar corner entry moves.
    Face18 data is scalar; the tilting face is handled in coordinates via
    face45_corner_map.
    """

    def _checked(fn, B, where):
        w = spectral_decompose(B, tol).eigenvalues
        bad = [float(v) for v in w if not f.domain.contains(float(v))]
        if bad:
            raise DomainViolation(f"corner spectrum at {where} leaves the domain: {bad}", offending=bad)
        return matrix_function(fn, B, tol=tol)

    if isinstance(face, BlockFace):
        _require_blockface_compressed(h, face, tol)

        def corner(a, where):
            out = np.zeros_like(a)
            out[: face.k, : face.k] = _checked(f, _top_left(a, face.k), where)
            return out

        prefix = tuple(corner(a, f"prefix {i+1}") for i, a in enumerate(h.prefix))
        cycle = tuple(corner(a, f"cycle {i+1}") for i, a in enumerate(h.cycle))
        inf = _checked(f, h.at_infinity, "infinity")
        return SeqMatrixElement(h.m, prefix, cycle, inf)

    if isinstance(face, Face211):
        def corner(a, where):
            x = complex(a[0, 0]).real
            if not f.domain.contains(x):
                raise DomainViolation(f"corner value at {where} leaves the domain: {x}", offending=[x])
            out = np.zeros_like(a)
            out[0, 0] = f(x)
            return out

        prefix = tuple(corner(a, f"prefix {i+1}") for i, a in enumerate(h.prefix))
        cycle = tuple(corner(a, f"cycle {i+1}") for i, a in enumerate(h.cycle))
        inf = corner(h.at_infinity, "infinity")
        return SeqMatrixElement(h.m, prefix, cycle, inf)

    if isinstance(face, Face18):
        t_prefix, t_cycle, t_inf = h
        for where, t in [("prefix", t_prefix), ("cycle", t_cycle), ("infinity", [t_inf])]:
            for v in t:
                if not f.domain.contains(float(v)):
                    raise DomainViolation(f"{where} value {v} leaves the domain", offending=[float(v)])
        return [f(float(v)) for v in t_prefix], [f(float(v)) for v in t_cycle], f(float(t_inf))

    if isinstance(face, Face45):
        cycle_coords, inf_coords = h
        return face45_corner_map(lambda M: _checked(f, M, "coordinate block"), cycle_coords, inf_coords)

    raise BadParameters(f"unknown face {face!r}")


# -- brute-force state-family oracle ---------------------------------------------


def _power_top_eigvec(d, iters: int = 300):
    """Dominant eigenvector of Hermitian d via shifted power iteration.

    Independent of the package eigensolver on purpose: the oracle must not
    share a code path with the classifiers it is checking.
    """
    n = d.shape[0]
    shift = 1.0 + float(np.sum(np.abs(d)))
    M = d + shift * np.eye(n)
    v = np.ones(n, dtype=np.complex128) + 1e-3 * np.arange(n)
    v /= np.linalg.norm(v)
    for _ in range(iters):
        v = M @ v
        v /= np.linalg.norm(v)
    return v


def _density_family(dim: int, seed: int = 0, lattice_step: float = 0.1, n_random: int = 100):
    """Deterministic density matrices (r >= 0, tr r <= 1) used as test states."""
    out = []
    # diagonal lattice
    steps = np.arange(0.0, 1.0 + 1e-12, lattice_step)
    if dim == 1:
        out.extend(np.array([[w]], dtype=np.complex128) for w in steps)
    else:
        for w in steps:
            for i in range(dim):
                r = np.zeros((dim, dim), dtype=np.complex128)
                r[i, i] = w
                out.append(r)
    # seeded random densities
    rng = np.random.default_rng(np.random.SeedSequence([seed, dim]))
    for _ in range(n_random):
        Z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        r = Z @ Z.conj().T
        tr = float(np.trace(r).real)
        if tr > 0:
            r = r * (rng.uniform(0.2, 1.0) / tr)
        out.append(r)
    return out


def _refined_states(diffs):
    """Rank-one densities aimed at the top eigenvector of each difference matrix."""
    out = []
    for d in diffs:
        if operator_norm(d) == 0.0:
            continue
        v = _power_top_eigvec(d)
        out.append(np.outer(v, v.conj()))
    return out


def testnet_oracle(h, face, seed: int = 0, margin: float = 1e-6) -> SemicontinuityVerdict:
    """Brute-force semicontinuity check via sampled weak*-convergent state families.

    For each face the oracle materializes a family of states phi_n converging
    weak* to a limit state phi_inf, and reports usc as
    "lim sup phi_n(h) <= phi_inf(h) + margin for every sampled family"
    (lsc mirrored). It must agree with the closed-form classifiers.
    """
    if isinstance(face, BlockFace):
        _require_blockface_compressed(h, face, DEFAULT_TOL)
        a_inf = _top_left(h.at_infinity, face.k)
        clusters = cluster_points(h, extractor=lambda a: _top_left(a, face.k))
        diffs = [c - a_inf for c in clusters]
        states = _density_family(face.k, seed) + _refined_states(diffs) + _refined_states(
            [-d for d in diffs]
        )
        usc = True
        lsc = True
        for r in states:
            for c, d in zip(clusters, diffs):
                val = float(np.trace(r @ d).real)
                if val > margin:
                    usc = False
                if val < -margin:
                    lsc = False
        return SemicontinuityVerdict(
            strongly_usc=usc, middle_usc=None, weakly_usc=None, strongly_lsc=lsc,
            certificates={"states": len(states)},
        )

    if isinstance(face, Face18):
        t_prefix, t_cycle, t_inf = h
        lam_grid = list(np.arange(0.0, 1.0 + 1e-12, 0.1))
        rng = np.random.default_rng(np.random.SeedSequence([seed, 18]))
        lam_grid += list(rng.uniform(0.0, 1.0, size=100))
        usc = True
        lsc = True
        for lam in lam_grid:
            limit = lam * 0.5 * float(t_inf)
            for t in t_cycle:
                if lam * float(t) > limit + margin:
                    usc = False
                if lam * float(t) < limit - margin:
                    lsc = False
        return SemicontinuityVerdict(
            strongly_usc=usc, middle_usc=True, weakly_usc=True, strongly_lsc=lsc,
            certificates={"states": len(lam_grid)},
        )

    if isinstance(face, Face211):
        x_cycle, x_inf = h
        lam_grid = list(np.arange(0.0, 1.0 + 1e-12, 0.1))
        rng = np.random.default_rng(np.random.SeedSequence([seed, 211]))
        lam_grid += list(rng.uniform(0.0, 1.0, size=100))
        usc = True
        lsc = True
        for lam in lam_grid:
            limit = lam * float(x_inf)
            for x in x_cycle:
                if lam * float(x) > limit + margin:
                    usc = False
                if lam * float(x) < limit - margin:
                    lsc = False
        return SemicontinuityVerdict(
            strongly_usc=usc, middle_usc=usc, weakly_usc=usc, strongly_lsc=lsc,
            certificates={"states": len(lam_grid)},
        )

    if isinstance(face, Face45):
        cycle_coords, inf_coords = h
        ct = math.cos(face.theta)
        M_inf = _coord_matrix(inf_coords)
        clusters = _dedupe([_coord_matrix(c) for c in cycle_coords], 1e-12)

        def limit_density(r):
            return np.array(
                [[r[0, 0] * ct * ct, r[0, 1] * ct], [r[1, 0] * ct, r[1, 1]]],
                dtype=np.complex128,
            )

        a_inf, b_inf, c_inf = inf_coords
        check = _coord_matrix((a_inf * ct * ct, b_inf * ct, c_inf))
        diffs = [c - check for c in clusters]
        states = _density_family(2, seed) + _refined_states(diffs)
        usc = True
        for r in states:
            lim_val = float(np.trace(limit_density(r) @ M_inf).real)
            for M in clusters:
                if float(np.trace(r @ M).real) > lim_val + margin:
                    usc = False
        return SemicontinuityVerdict(
            strongly_usc=usc, middle_usc=None, weakly_usc=None, strongly_lsc=None,
            certificates={"states": len(states)},
        )

    raise BadParameters(f"unknown face {face!r}")


# -- instance builders for the usc criteria suites --------------------------------


def theorem43_instance(face: BlockFace, rng, box=(-1.0, 1.0), prefix_len: int = 2):
    """Random element of pA_sa p: constant top-left cycle, free blocks at infinity.

    Eigenvalues of every block stay inside the given box so any function
    whose domain contains the box can be applied on the face.
    """
    lo, hi = box
    m = face.m
    Z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    Q, _ = np.linalg.qr(Z)
    vals = rng.uniform(lo, hi, size=m)
    h_inf = (Q * vals) @ Q.conj().T
    h_inf = (h_inf + h_inf.conj().T) / 2.0
    a_inf = _top_left(h_inf, face.k)
    block = np.zeros((m, m), dtype=np.complex128)
    block[: face.k, : face.k] = a_inf
    prefix = []
    for _ in range(prefix_len):
        Zp = rng.normal(size=(face.k, face.k)) + 1j * rng.normal(size=(face.k, face.k))
        Qp, _ = np.linalg.qr(Zp)
        pvals = rng.uniform(lo, hi, size=face.k)
        ap = (Qp * pvals) @ Qp.conj().T
        full = np.zeros((m, m), dtype=np.complex128)
        full[: face.k, : face.k] = (ap + ap.conj().T) / 2.0
        prefix.append(full)
    return SeqMatrixElement(m, tuple(prefix), (block,), h_inf)


def theorem48_instance(f, face: BlockFace, rng, box=(-1.0, 1.0)):
    """The sequence x with x_n = f(a_inf) (+) 0 and x_inf = f(h_inf).

    Its usc in the bidual is exactly the uncompressed criterion
    p f(p h p) p <= f(h) at the instance (h_inf, diag(1_k, 0)).
    """
    h = theorem43_instance(face, rng, box=box, prefix_len=0)
    return face_functional_calculus(f, h, face)
