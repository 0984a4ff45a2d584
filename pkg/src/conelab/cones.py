"""Cone representations and the membership / properness / invariance oracles.

Two witness shapes are supported: polyhedral cones given by unit generators,
and quadratic (ellipsoidal) cones given by an axis plus a positive-definite
form on its orthogonal complement.  Membership for polyhedral cones is a
nonnegative least-squares projection, so every query also yields a distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import brentq, nnls

from .errors import DimensionMismatch, EmptyInput
from .linalg import DEFAULT_TOL, ToleranceConfig, as_square_matrix, eigen_decompose, matrix_rank, nullspace

# Offset factors (relative to geom_tol) for the interior probe and the
# strictness margin of quadratic interior tests.
_INTERIOR_PROBE_FACTOR = 1e3
_BOUNDARY_GRID_SIZE = 10_000


@dataclass(frozen=True)
class PolyhedralCone:
    """Conic hull of finitely many unit generators (rows of `generators`)."""

    dim: int
    generators: np.ndarray  # shape (k, dim), rows unit-normalized

    def __post_init__(self):
        G = np.asarray(self.generators, dtype=float)
        if G.ndim != 2 or G.shape[1] != self.dim or G.shape[0] < 1:
            raise DimensionMismatch(f"bad generator array of shape {G.shape}")
        norms = np.linalg.norm(G, axis=1)
        if np.any(norms < 1e-14):
            raise EmptyInput("zero generator")
        G = G / norms[:, None]
        G.setflags(write=False)
        object.__setattr__(self, "generators", G)

    @property
    def num_generators(self) -> int:
        return self.generators.shape[0]


@dataclass(frozen=True)
class QuadraticCone:
    """K = { c*axis + y : c >= 0, y in axis-complement, y^T V y <= c^2 }.

    `complement_basis` has orthonormal columns spanning the complement of the
    axis; V is symmetric positive definite in those coordinates.  Cones of
    this shape are proper by construction.
    """

    dim: int
    axis: np.ndarray              # (dim,), unit norm
    form: np.ndarray              # (dim-1, dim-1), symmetric positive definite
    complement_basis: np.ndarray  # (dim, dim-1), orthonormal columns, _|_ axis

    def __post_init__(self):
        x = np.asarray(self.axis, dtype=float)
        B = np.asarray(self.complement_basis, dtype=float)
        V = np.asarray(self.form, dtype=float)
        if self.dim < 2:
            raise DimensionMismatch("quadratic cones need ambient dimension >= 2")
        if x.shape != (self.dim,) or B.shape != (self.dim, self.dim - 1) or V.shape != (self.dim - 1, self.dim - 1):
            raise DimensionMismatch("inconsistent quadratic cone shapes")
        x = x / np.linalg.norm(x)
        if np.linalg.norm(B.T @ B - np.eye(self.dim - 1)) > 1e-8 or np.linalg.norm(B.T @ x) > 1e-8:
            raise ValueError("complement basis must be orthonormal and orthogonal to the axis")
        V = 0.5 * (V + V.T)
        if np.min(np.linalg.eigvalsh(V)) <= 0:
            raise ValueError("form must be positive definite")
        for arr, name in ((x, "axis"), (B, "complement_basis"), (V, "form")):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def ambient_form(self) -> np.ndarray:
        """Q with v^T Q v = y^T V y - c^2 for v = c*axis + B y."""
        return self.complement_basis @ self.form @ self.complement_basis.T - np.outer(self.axis, self.axis)


ConeRep = Union[PolyhedralCone, QuadraticCone]


@dataclass(frozen=True)
class MembershipResult:
    inside: bool
    distance: float
    interior: bool


@dataclass(frozen=True)
class PropernessReport:
    proper: bool
    pointed: bool
    solid: bool
    diagnosis: str

    def __bool__(self):
        return self.proper


@dataclass(frozen=True)
class InvarianceReport:
    invariant: bool
    max_distance: float
    method: str  # "generators" | "psd" | "sampled"
    worst: tuple | None = None
    psd_margin: float | None = None
    notes: str = ""

    def __bool__(self):
        return self.invariant


def unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n < 1e-300:
        raise EmptyInput("cannot normalize the zero vector")
    return v / n


def conic_hull(vectors, dim: int | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> PolyhedralCone:
    """Normalize, deduplicate (angle < geom_tol) and sort the generators."""
    rows = [np.asarray(v, dtype=float).reshape(-1) for v in vectors]
    rows = [r for r in rows if np.linalg.norm(r) > 1e-14]
    if not rows:
        raise EmptyInput("no nonzero vectors")
    if dim is None:
        dim = rows[0].size
    if any(r.size != dim for r in rows):
        raise DimensionMismatch("mixed vector dimensions")
    kept: list[np.ndarray] = []
    for r in rows:
        u = r / np.linalg.norm(r)
        if all(np.linalg.norm(u - k) > tol.geom_tol for k in kept):
            kept.append(u)
    G = np.array(sorted(kept, key=lambda v: tuple(v)))
    return PolyhedralCone(dim, G)


def nnls_distance(A: np.ndarray, b: np.ndarray) -> tuple[float, np.ndarray]:
    """min ||A x - b|| over x >= 0; the residual is recomputed from x because
    some scipy versions report an unreliable rnorm."""
    x, _ = nnls(A, b)
    return float(np.linalg.norm(A @ x - b)), x


def _nnls_distance(K: PolyhedralCone, v: np.ndarray) -> tuple[float, np.ndarray]:
    return nnls_distance(K.generators.T, v)


def _polyhedral_membership(K: PolyhedralCone, v: np.ndarray, tol: ToleranceConfig,
                           want_interior: bool = True) -> MembershipResult:
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return MembershipResult(True, 0.0, False)
    # Membership in a cone is scale-invariant; working on the unit vector
    # keeps flags independent of the input scale.
    u = v / nv
    udist, _ = _nnls_distance(K, u)
    inside = udist <= tol.geom_tol
    interior = False
    if want_interior and inside and matrix_rank(K.generators, tol.rank_tol) == K.dim:
        # u is interior iff it stays in K after stepping against the bulk
        # direction of the generators; see the all-positive-coefficients
        # characterization of conic interiors.
        g = unit(K.generators.sum(axis=0))
        probe = u - _INTERIOR_PROBE_FACTOR * tol.geom_tol * g
        pdist, _ = _nnls_distance(K, probe)
        interior = pdist <= tol.geom_tol * np.linalg.norm(probe)
    return MembershipResult(bool(inside), udist * nv, bool(interior))


def _quad_coords(K: QuadraticCone, v: np.ndarray) -> tuple[float, np.ndarray]:
    c = float(K.axis @ v)
    z = K.complement_basis.T @ v
    return c, z


def _quad_distance(K: QuadraticCone, v: np.ndarray) -> float:
    """Euclidean distance from v to K via the KKT projection equations."""
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return 0.0
    c0, z0 = _quad_coords(K, v)
    d, W = np.linalg.eigh(K.form)
    w0 = W.T @ z0
    q0 = float(np.sum(d * w0 * w0))
    if c0 >= 0 and q0 <= c0 * c0:
        return 0.0
    # Polar cone region projects to the apex.
    polar_q = float(np.sum(w0 * w0 / d))
    if c0 <= 0 and polar_q <= c0 * c0:
        return nv

    def g(mu):
        wi = w0 / (1.0 + mu * d)
        ci = c0 / (1.0 - mu)
        return float(np.sum(d * wi * wi) - ci * ci)

    def point(mu):
        w = w0 / (1.0 + mu * d)
        if abs(1.0 - mu) < 1e-12:
            c = float(np.sqrt(max(np.sum(d * w * w), 0.0)))
        else:
            c = max(c0 / (1.0 - mu), 0.0)
        return c * K.axis + K.complement_basis @ (W @ w)

    mu = None
    thresh = 1e-9 * nv
    if c0 > thresh:
        if g(1.0 - 1e-12) < 0:
            mu = brentq(g, 0.0, 1.0 - 1e-12, xtol=1e-14, maxiter=200)
    elif c0 < -thresh:
        hi = 2.0
        while g(hi) < 0 and hi < 1e12:
            hi *= 4.0
        if g(1.0 + 1e-12) < 0 <= g(hi):
            mu = brentq(g, 1.0 + 1e-12, hi, xtol=1e-14, maxiter=200)
    # Fall back to the boundary solution with c determined by the constraint
    # (the exact limit for c0 = 0, a conservative upper bound otherwise).
    candidates = [point(1.0) if mu is None else point(mu), np.zeros(K.dim)]
    return min(float(np.linalg.norm(v - p)) for p in candidates)


def _quadratic_membership(K: QuadraticCone, v: np.ndarray, tol: ToleranceConfig) -> MembershipResult:
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return MembershipResult(True, 0.0, False)
    u = v / nv
    c, z = _quad_coords(K, u)
    q = float(z @ K.form @ z)
    inside = c >= -tol.geom_tol and q <= c * c + tol.geom_tol
    interior = c > tol.geom_tol and q < c * c - tol.geom_tol
    dist = 0.0 if inside else _quad_distance(K, v)
    return MembershipResult(bool(inside), dist, bool(interior))


def contains(K: ConeRep, v, tol: ToleranceConfig = DEFAULT_TOL) -> MembershipResult:
    """Membership, distance to K, and an interior flag for one vector."""
    w = np.asarray(v, dtype=float).reshape(-1)
    if w.size != K.dim:
        raise DimensionMismatch(f"vector of size {w.size} vs cone dimension {K.dim}")
    if isinstance(K, PolyhedralCone):
        return _polyhedral_membership(K, w, tol)
    return _quadratic_membership(K, w, tol)


def _simplex_distance(G: np.ndarray, tol: ToleranceConfig) -> float:
    """min ||G x|| over the simplex {x >= 0, sum x = 1} (columns of G)."""
    k = G.shape[1]
    penalty = 1e6
    A = np.vstack([G, penalty * np.ones((1, k))])
    b = np.concatenate([np.zeros(G.shape[0]), [penalty]])
    x, _ = nnls(A, b)
    s = float(np.sum(x))  # residual recomputed below; scipy's rnorm is not trusted
    if s <= 1e-12:
        return float(np.min(np.linalg.norm(G, axis=0)))
    x = x / s
    return float(np.linalg.norm(G @ x))


def is_proper(K: ConeRep, tol: ToleranceConfig = DEFAULT_TOL) -> PropernessReport:
    """Convexity and closedness hold by representation; checks pointed + solid."""
    if isinstance(K, QuadraticCone):
        return PropernessReport(True, True, True, "by construction")
    solid = matrix_rank(K.generators, tol.rank_tol) == K.dim
    # Pointed iff 0 is not in the convex hull of the (unit) generators.
    pointed = _simplex_distance(K.generators.T, tol) > tol.geom_tol
    if pointed and solid:
        return PropernessReport(True, True, True, "proper")
    if not pointed:
        return PropernessReport(False, False, solid, "not pointed")
    return PropernessReport(False, True, False, "not solid")


def prune_generators(K: PolyhedralCone, tol: ToleranceConfig = DEFAULT_TOL) -> PolyhedralCone:
    """Drop generators that are nonnegative combinations of the others."""
    rows = list(K.generators)
    i = 0
    while i < len(rows) and len(rows) > 1:
        rest = rows[:i] + rows[i + 1:]
        sub = PolyhedralCone(K.dim, np.array(rest))
        dist, _ = _nnls_distance(sub, rows[i])
        if dist <= tol.geom_tol:
            rows.pop(i)
        else:
            i += 1
    return PolyhedralCone(K.dim, np.array(sorted(rows, key=lambda v: tuple(v))))


def _halton(index: int, base: int) -> float:
    f, r = 1.0, 0.0
    while index > 0:
        f /= base
        r += f * (index % base)
        index //= base
    return r


def _boundary_grid(K: QuadraticCone, count: int = _BOUNDARY_GRID_SIZE) -> np.ndarray:
    """Deterministic grid of boundary points c = 1, z^T V z = 1 (rows)."""
    d = K.dim - 1
    if d == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif d == 2:
        ang = 2.0 * np.pi * np.arange(count) / count
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37][:d]
        pts = np.array([[_halton(i + 1, p) for p in primes] for i in range(count)])
        dirs = 2.0 * pts - 1.0
        norms = np.linalg.norm(dirs, axis=1)
        dirs = dirs[norms > 1e-6] / norms[norms > 1e-6, None]
    scale = np.sqrt(np.einsum("ij,jk,ik->i", dirs, K.form, dirs))
    zs = dirs / scale[:, None]
    return K.axis[None, :] + zs @ K.complement_basis.T


def _quad_inside_batch(K: QuadraticCone, pts: np.ndarray, tol: ToleranceConfig) -> np.ndarray:
    norms = np.linalg.norm(pts, axis=1)
    norms[norms == 0] = 1.0
    U = pts / norms[:, None]
    c = U @ K.axis
    Z = U @ K.complement_basis
    q = np.einsum("ij,jk,ik->i", Z, K.form, Z)
    return (c >= -tol.geom_tol) & (q <= c * c + tol.geom_tol)


def _quad_invariance(K: QuadraticCone, A: np.ndarray, tol: ToleranceConfig) -> InvarianceReport:
    rho = eigen_decompose(A, tol).spectral_radius
    Q = K.ambient_form()
    M = rho * rho * Q - A.T @ Q @ A
    M = 0.5 * (M + M.T)
    scale = max(1.0, rho * rho * float(np.linalg.norm(Q, 2)))
    margin = float(np.min(np.linalg.eigvalsh(M))) / scale
    axis_component = float(K.axis @ (A @ K.axis))

    conclusive = margin >= -tol.geom_tol and axis_component > tol.geom_tol * max(1.0, float(np.linalg.norm(A)))
    if conclusive:
        # The connectivity argument behind the certificate needs ker(A) to
        # miss K; verify when A is (nearly) singular.
        kern = nullspace(A, tol.rank_tol)
        for j in range(kern.shape[1]):
            if kern.shape[1] > 1:
                conclusive = False
                break
            dvec = np.real(kern[:, j])
            if contains(K, dvec, tol).inside or contains(K, -dvec, tol).inside:
                conclusive = False
                break
    if conclusive:
        return InvarianceReport(True, 0.0, "psd", psd_margin=margin)

    pts = _boundary_grid(K)
    images = pts @ A.T
    ok = _quad_inside_batch(K, images, tol)
    if np.all(ok):
        return InvarianceReport(True, 0.0, "sampled", psd_margin=margin,
                                notes="certificate inconclusive; grid of boundary points verified")
    worst_idx = int(np.argmin(ok))
    bad = np.flatnonzero(~ok)
    dists = [_quad_distance(K, images[i]) for i in bad[:32]]
    worst_local = int(bad[int(np.argmax(dists))])
    return InvarianceReport(False, float(max(dists)), "sampled",
                            worst=("boundary-point", worst_local, pts[worst_local].tolist()),
                            psd_margin=margin)


def is_invariant(K: ConeRep, A, tol: ToleranceConfig = DEFAULT_TOL) -> InvarianceReport:
    """Does A map K into itself?

    Polyhedral: generator-mapping test (images of generators stay in K).
    Quadratic: certificate rho(A)^2 Q - A^T Q A positive semidefinite plus a
    nonnegative axis image; deterministic boundary sampling when the
    certificate is inconclusive.
    """
    M = as_square_matrix(A)
    if M.shape[0] != K.dim:
        raise DimensionMismatch("matrix and cone dimensions differ")
    if isinstance(K, QuadraticCone):
        return _quad_invariance(K, M, tol)

    worst = None
    max_dist = 0.0
    ok = True
    for idx, g in enumerate(K.generators):
        res = _polyhedral_membership(K, M @ g, tol, want_interior=False)
        if res.distance > max_dist:
            max_dist = res.distance
            worst = ("generator", idx, g.tolist())
        if not res.inside:
            ok = False
    return InvarianceReport(ok, max_dist, "generators", worst=worst)


def sample_points(K: ConeRep, count: int, seed: int) -> np.ndarray:
    """Deterministic random members of K (rows), for verification probes."""
    rng = np.random.default_rng(seed)
    if isinstance(K, PolyhedralCone):
        w = rng.random((count, K.num_generators))
        return w @ K.generators
    c = rng.random(count) + 0.1
    dirs = rng.normal(size=(count, K.dim - 1))
    norms = np.linalg.norm(dirs, axis=1)
    norms[norms == 0] = 1.0
    dirs /= norms[:, None]
    scale = np.sqrt(np.einsum("ij,jk,ik->i", dirs, K.form, dirs))
    radial = rng.random(count) ** 0.5
    zs = dirs * (radial * c / scale)[:, None]
    return c[:, None] * K.axis[None, :] + zs @ K.complement_basis.T
