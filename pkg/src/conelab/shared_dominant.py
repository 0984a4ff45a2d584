"""Sufficient constructions for n x n families sharing a dominant eigenvector.

Two routes, both sufficient-only: an ice-cream (Lorentz) cone about the
shared dominant eigenvector when the family is normal (or similar to normal
via a caller-supplied real similarity), and, for commuting families whose
spectral radii are semisimple, deflation of the shared eigenvector followed
by a common Lyapunov inequality on the deflated blocks, giving an
ellipsoidal cone.  A failed hypothesis is reported as "undecided", never as
a proof of non-existence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import decision as dd
from .cones import QuadraticCone, contains, is_invariant
from .decision import Decision
from .errors import (
    EmptyFamily,
    HypothesesNotMet,
    HypothesisViolated,
    InternalInconsistency,
    NoSharedDominantVector,
    NotCommuting,
    NotNormal,
    NotSemisimple,
    PreconditionFailed,
    ProjectionNotConverged,
)
from .linalg import DEFAULT_TOL, ToleranceConfig, as_square_matrix, eigen_decompose, fix_sign, is_vandergraft, nullspace

# Eigenvalues of modulus above 1 - _UNIT_BAND are treated as unit-modulus
# when choosing between the series and the reduction construction.
_UNIT_BAND = 1e-6
_MAX_SERIES_TERMS = 20_000
_MAX_SWEEPS = 10_000


@dataclass(frozen=True)
class LyapunovCertificate:
    V: np.ndarray                 # real symmetric positive definite
    residuals: tuple[float, ...]  # min eigenvalue of V - B_j^T V B_j, per j
    method: str                   # "series" | "reduction" | "projection"
    min_eigenvalue: float

    def __post_init__(self):
        self.V.setflags(write=False)


@dataclass(frozen=True)
class DeflatedFamily:
    S: np.ndarray                  # real invertible, first column = shared eigenvector
    lam0: float
    blocks: tuple[np.ndarray, ...]  # (m-1) x (m-1) lower-right blocks, per member


def common_dominant_eigenvector(family, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray | None:
    """Unit vector spanning a line in every member's dominant eigenspace, or None."""
    if len(family) == 0:
        raise EmptyFamily("no matrices")
    basis = None
    for j, M in enumerate(family):
        rep = is_vandergraft(M, tol)
        if not rep.is_vandergraft:
            raise PreconditionFailed(f"member {j} is not a Vandergraft matrix")
        vecs = rep.dominant_eigenvectors
        if vecs is None or vecs.shape[1] == 0:
            return None
        if basis is None:
            basis = vecs
            continue
        stacked = np.column_stack([basis, -vecs])
        ns = nullspace(stacked, tol.rank_tol)
        if ns.shape[1] == 0:
            return None
        basis, _ = np.linalg.qr(basis @ ns[: basis.shape[1]])
        basis = basis[:, : ns.shape[1]]
    return fix_sign(basis[:, 0] / np.linalg.norm(basis[:, 0]))


def quadratic_cone_from_form(Q: np.ndarray, interior_point: np.ndarray) -> QuadraticCone:
    """The cone {v : v^T Q v <= 0} on the interior point's side of the apex.

    Q must have exactly one negative eigenvalue; its eigenvector becomes the
    axis, the remaining eigenpairs give the complement form.
    """
    Q = 0.5 * (Q + Q.T)
    w, U = np.linalg.eigh(Q)
    if w[0] >= 0 or np.any(w[1:] <= 0):
        raise ValueError("form must have signature (1 negative, n-1 positive)")
    axis = U[:, 0]
    if float(axis @ interior_point) < 0:
        axis = -axis
    V = np.diag(w[1:] / abs(w[0]))
    return QuadraticCone(Q.shape[0], axis, V, U[:, 1:])


def ice_cream_cone(family, x=None, tol: ToleranceConfig = DEFAULT_TOL, similarity=None) -> Decision:
    """Lorentz-cone witness about the shared dominant eigenvector of a normal family."""
    if len(family) == 0:
        raise EmptyFamily("no matrices")
    mats = [as_square_matrix(M) for M in family]
    m = mats[0].shape[0]
    T = None if similarity is None else as_square_matrix(similarity)
    work = mats if T is None else [np.linalg.solve(T, M @ T) for M in mats]
    for j, W in enumerate(work):
        defect = np.linalg.norm(W @ W.T - W.T @ W)
        if defect > tol.eig_cluster_tol * max(1.0, float(np.linalg.norm(W)) ** 2):
            raise NotNormal(f"member {j} is not normal (defect {defect:.3e})")
    if x is None:
        x = common_dominant_eigenvector(mats, tol)
        if x is None:
            raise NoSharedDominantVector("no common dominant eigenvector")
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x)
    rhos = []
    for j, M in enumerate(mats):
        rho = eigen_decompose(M, tol).spectral_radius
        if np.linalg.norm(M @ x - rho * x) > 1e-7 * max(1.0, float(np.linalg.norm(M))):
            raise NoSharedDominantVector(f"supplied vector is not dominant for member {j}")
        rhos.append(rho)

    if m == 1:
        raise PreconditionFailed("ambient dimension must be at least 2")
    if T is None:
        B = nullspace(x.reshape(1, -1), tol.rank_tol)
        K = QuadraticCone(m, x, np.eye(m - 1), B)
    else:
        xw = np.linalg.solve(T, x)
        xw = xw / np.linalg.norm(xw)
        Bw = nullspace(xw.reshape(1, -1), tol.rank_tol)
        Kw = QuadraticCone(m, xw, np.eye(m - 1), Bw)
        Tinv = np.linalg.inv(T)
        K = quadratic_cone_from_form(Tinv.T @ Kw.ambient_form() @ Tinv, x)

    checks = []
    for j, M in enumerate(mats):
        rep = is_invariant(K, M, tol)
        if not rep.invariant:
            raise InternalInconsistency(f"ice-cream certificate failed for member {j}")
        checks.append({"matrix": f"A{j}", "method": rep.method, "psd_margin": rep.psd_margin})
    return Decision(dd.YES, K, {
        "construction": "ice-cream cone about the shared dominant eigenvector",
        "spectral_radii": rhos,
        "checks": checks,
    }, route="shared-dominant")


def _check_commuting(mats, tol):
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            defect = np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i])
            if defect > tol.eig_cluster_tol * max(1.0, np.linalg.norm(mats[i]) * np.linalg.norm(mats[j])):
                raise NotCommuting(f"members {i} and {j} do not commute")


def _semisimple_eigen_basis(A: np.ndarray, lam: float, tol: ToleranceConfig, x: np.ndarray):
    """Real basis [x-hat | rest-of-eigenspace | range complement] splitting A at lam."""
    m = A.shape[0]
    M = A - lam * np.eye(m)
    E = nullspace(M, max(tol.rank_tol, tol.eig_cluster_tol * max(1.0, float(np.linalg.norm(A)))))
    E = np.real(E)
    p = E.shape[1]
    xhat = x / np.linalg.norm(x)
    if np.linalg.norm(xhat - E @ (E.T @ xhat)) > 1e-7:
        raise NotSemisimple("shared eigenvector escapes the reported eigenspace")
    # Rotate the eigenspace basis so its first column is x: project x out of E
    # and keep the p-1 surviving orthonormal directions.
    if p > 1:
        resid = E - np.outer(xhat, xhat @ E)
        U_e, s_e, _ = np.linalg.svd(resid, full_matrices=False)
        Efix = np.column_stack([xhat, U_e[:, : p - 1]])
    else:
        Efix = xhat.reshape(-1, 1)
    U, s, _ = np.linalg.svd(M)
    r = int(np.sum(s > tol.rank_tol * max(1.0, float(s[0]))))
    if p + r != m:
        raise NotSemisimple("eigenvalue is not semisimple")
    return np.column_stack([Efix, U[:, :r]]), p


def deflate(family, x, tol: ToleranceConfig = DEFAULT_TOL) -> DeflatedFamily:
    """Split off a shared semisimple eigenvalue: S^-1 A_j S = diag(lam0, B_j).

    Induction on the family: split by the first member's eigenspace (which
    every other member preserves, by commutativity), send x to the first
    basis vector, and recurse on the restrictions.
    """
    mats = [as_square_matrix(M) for M in family]
    if not mats:
        raise EmptyFamily("no matrices")
    m = mats[0].shape[0]
    _check_commuting(mats, tol)
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x)
    lams = [float(x @ (M @ x)) for M in mats]
    lam0 = lams[0]
    for j, (M, lam) in enumerate(zip(mats, lams)):
        scale = max(1.0, float(np.linalg.norm(M)))
        if abs(lam - lam0) > 1e-7 * scale or np.linalg.norm(M @ x - lam * x) > 1e-7 * scale:
            raise PreconditionFailed(f"member {j} does not share the eigenvalue at x")
        spec = eigen_decompose(M, tol)
        cut = tol.eig_cluster_tol * max(1.0, spec.spectral_radius)
        ev = next((e for e in spec.eigenvalues if e.is_real and abs(e.value.real - lam0) <= max(cut, 1e-7 * scale)), None)
        if ev is None or ev.degree > 1:
            raise NotSemisimple(f"eigenvalue {lam0:.6g} is not semisimple for member {j}")

    def build(mats_loc, x_loc):
        mloc = mats_loc[0].shape[0]
        if mloc == 1:
            return np.eye(1)
        T1, p = _semisimple_eigen_basis(mats_loc[0], lam0, tol, x_loc)
        if len(mats_loc) == 1 or p == 1:
            return T1
        T1inv = np.linalg.inv(T1)
        rest = []
        for M in mats_loc[1:]:
            W = T1inv @ M @ T1
            off = max(np.linalg.norm(W[:p, p:]), np.linalg.norm(W[p:, :p]))
            if off > 1e-6 * max(1.0, float(np.linalg.norm(M))) * np.linalg.cond(T1):
                raise NotCommuting("commutators too large to preserve the eigenspace split")
            rest.append(W[:p, :p])
        Trec = build(rest, np.eye(p)[:, 0])
        S = T1 @ np.block([
            [Trec, np.zeros((p, mloc - p))],
            [np.zeros((mloc - p, p)), np.eye(mloc - p)],
        ])
        return S

    S = build(mats, x)
    blocks = []
    Sinv = np.linalg.inv(S)
    for j, M in enumerate(mats):
        W = Sinv @ M @ S
        resid = max(
            float(np.linalg.norm(W[0, 1:])), float(np.linalg.norm(W[1:, 0])),
            abs(float(W[0, 0]) - lam0),
        )
        if resid > 1e-6 * max(1.0, float(np.linalg.norm(M))) * np.linalg.cond(S):
            raise NotSemisimple(f"deflation residual {resid:.3e} for member {j}")
        blocks.append(W[1:, 1:])
    return DeflatedFamily(S, lam0, tuple(blocks))


def _series_sum(mats, tol) -> np.ndarray:
    """Truncated sum over exponent tuples of (A1*)^z1 ... A1^z1, innermost last.

    Each one-dimensional stage is summed until the geometric tail (ratio
    rho(A_j)^2 < 1) drops below the working tolerance.
    """
    m = mats[0].shape[0]
    W = np.eye(m, dtype=complex)
    for A in reversed(mats):
        acc = W.copy()
        term = W.copy()
        for _ in range(1, _MAX_SERIES_TERMS):
            term = A.conj().T @ term @ A
            acc += term
            if np.linalg.norm(term) <= 1e-13 * max(1.0, float(np.linalg.norm(acc))):
                break
        else:
            raise ProjectionNotConverged("series truncation did not converge")
        W = acc
    return W


def _lyapunov_complex(mats, tol) -> np.ndarray:
    """Complex positive definite V >= I with V - A_j* V A_j >= 0 for all j."""
    m = mats[0].shape[0]
    if not mats or m == 0:
        return np.eye(m, dtype=complex)
    rhos = [float(np.max(np.abs(np.linalg.eigvals(A)))) if m else 0.0 for A in mats]
    if max(rhos) < 1.0 - _UNIT_BAND:
        return _series_sum(mats, tol)

    j_star = next(i for i, r in enumerate(rhos) if r >= 1.0 - _UNIT_BAND)
    A = mats[j_star]
    values = np.linalg.eigvals(A)
    cut = tol.eig_cluster_tol * max(1.0, float(np.max(np.abs(values))))
    reps: list[complex] = []
    for v in sorted(values, key=lambda z: (z.real, z.imag)):
        if not any(abs(v - r) <= cut for r in reps):
            reps.append(complex(v))
    bases, kinds = [], []
    for lam in reps:
        mult = int(np.sum(np.abs(values - lam) <= cut))
        P = np.linalg.matrix_power(A - lam * np.eye(m), mult)
        basis = nullspace(P, tol.rank_tol)
        bases.append(basis)
        kinds.append(abs(lam) >= 1.0 - _UNIT_BAND)
    T = np.column_stack(bases)
    if T.shape[1] != m:
        raise HypothesisViolated("root subspaces do not span; spectrum too clustered")
    if np.linalg.cond(T) > 1e8:
        raise ProjectionNotConverged("ill-conditioned root-subspace splitting")
    Tinv = np.linalg.inv(T)
    sizes = [b.shape[1] for b in bases]
    offs = np.cumsum([0] + sizes)
    blocks_V = []
    for bi, (sz, unit_kind) in enumerate(zip(sizes, kinds)):
        sl = slice(offs[bi], offs[bi + 1])
        sub = []
        for i, Mfull in enumerate(mats):
            W = Tinv @ Mfull @ T
            if unit_kind and i == j_star:
                continue  # scalar action: its inequality is an identity
            sub.append(W[sl, sl])
        if not unit_kind:
            sub = [(Tinv @ Mfull @ T)[sl, sl] for Mfull in mats]
        blocks_V.append(_lyapunov_complex(sub, tol) if sub else np.eye(sz, dtype=complex))
    Vs = np.zeros((m, m), dtype=complex)
    for bi in range(len(sizes)):
        sl = slice(offs[bi], offs[bi + 1])
        Vs[sl, sl] = blocks_V[bi]
    return Tinv.conj().T @ Vs @ Tinv


def _project_feasible(mats, tol) -> np.ndarray:
    """Alternating-projection fallback onto {V >= I} and the per-member constraints."""
    m = mats[0].shape[0]
    V = np.eye(m)
    n2 = m * m
    for sweep in range(_MAX_SWEEPS):
        moved = 0.0
        for B in mats:
            W = V - B.T @ V @ B
            w, U = np.linalg.eigh(0.5 * (W + W.T))
            if w[0] >= -1e-12:
                continue
            Wplus = U @ np.diag(np.maximum(w, 0.0)) @ U.T
            L = np.eye(n2) - np.kron(B.T, B.T)
            delta = np.linalg.solve(L, (Wplus - W).reshape(-1)).reshape(m, m)
            delta = 0.5 * (delta + delta.T)
            V = V + delta
            moved = max(moved, float(np.linalg.norm(delta)))
        w, U = np.linalg.eigh(0.5 * (V + V.T))
        V = U @ np.diag(np.maximum(w, 1.0)) @ U.T
        if moved <= 1e-12:
            return V
    raise ProjectionNotConverged("alternating projections exceeded the sweep budget")


def common_lyapunov(blocks, tol: ToleranceConfig = DEFAULT_TOL,
                    truncation_depth: int | None = None) -> LyapunovCertificate:
    """Real V > 0 with V - B_j^T V B_j >= 0 for commuting blocks with rho <= 1.

    Strictly contractive families use the truncated product series; families
    with unit-modulus (semisimple) eigenvalues follow the root-subspace
    reduction; a projection fallback covers numerically stubborn inputs.
    """
    mats = [as_square_matrix(B) for B in blocks]
    if not mats:
        raise EmptyFamily("no blocks")
    m = mats[0].shape[0]
    _check_commuting(mats, tol)
    for j, B in enumerate(mats):
        spec = eigen_decompose(B, tol)
        if spec.spectral_radius > 1.0 + tol.eig_cluster_tol * max(1.0, float(np.linalg.norm(B))):
            raise HypothesisViolated(f"spectral radius of block {j} exceeds 1")
        for ev in spec.eigenvalues:
            if abs(ev.value) >= 1.0 - _UNIT_BAND and ev.degree > 1:
                raise HypothesisViolated(f"unit-modulus eigenvalue of block {j} is not semisimple")

    method = "series" if all(
        eigen_decompose(B, tol).spectral_radius < 1.0 - _UNIT_BAND for B in mats
    ) else "reduction"
    try:
        Vc = _lyapunov_complex([B.astype(complex) for B in mats], tol)
        V = np.real(Vc + np.conj(Vc))
    except ProjectionNotConverged:
        V = _project_feasible(mats, tol)
        method = "projection"
    V = 0.5 * (V + V.T)
    V = V / max(1.0, float(np.linalg.norm(V, 2)) / 10.0)  # keep magnitudes tame
    residuals = tuple(float(np.min(np.linalg.eigvalsh(V - B.T @ V @ B))) for B in mats)
    mineig = float(np.min(np.linalg.eigvalsh(V)))
    if mineig <= 0:
        raise HypothesisViolated("computed certificate is not positive definite")
    return LyapunovCertificate(V, residuals, method, mineig)


def decide_shared_dominant(family, tol: ToleranceConfig = DEFAULT_TOL, similarity=None) -> Decision:
    """Sufficient decision for families sharing a dominant eigenvector.

    Tries the normal-family ice-cream construction first, then the commuting
    route (scale to spectral radius one, deflate the shared eigenvector,
    solve the common Lyapunov inequality, return the ellipsoidal cone).
    Raises HypothesesNotMet when neither route applies.
    """
    if len(family) == 0:
        raise EmptyFamily("no matrices")
    mats = [as_square_matrix(M) for M in family]
    for j, M in enumerate(mats):
        if not is_vandergraft(M, tol).is_vandergraft:
            raise HypothesesNotMet("NotVandergraft", f"member {j} fails the spectral test")
    x = common_dominant_eigenvector(mats, tol)
    if x is None:
        raise HypothesesNotMet("NoSharedDominantVector")

    try:
        return ice_cream_cone(mats, x, tol, similarity)
    except NotNormal as first_failure:
        normal_note = str(first_failure)

    try:
        _check_commuting(mats, tol)
    except NotCommuting as exc:
        raise HypothesesNotMet("NotCommuting", f"{exc}; also not normal ({normal_note})") from exc

    live, dropped, rhos = [], [], []
    for j, M in enumerate(mats):
        spec = eigen_decompose(M, tol)
        rho = spec.spectral_radius
        scale = max(1.0, float(np.linalg.norm(M)))
        if rho <= tol.eig_cluster_tol * scale:
            if float(np.linalg.norm(M)) <= tol.eig_cluster_tol * scale:
                dropped.append(j)
                continue
            raise HypothesesNotMet("NotSemisimple", f"member {j} is nilpotent but nonzero")
        dom = spec.dominant(tol)
        if dom is None or dom.degree > 1:
            raise HypothesesNotMet("NotSemisimple", f"spectral radius of member {j} is not semisimple")
        live.append(M / rho)
        rhos.append(rho)
    if not live:
        # Every member is the zero matrix; any proper cone about x works.
        m = mats[0].shape[0]
        B = nullspace(x.reshape(1, -1), tol.rank_tol)
        K = QuadraticCone(m, x, np.eye(m - 1), B)
        checks = [{"matrix": f"A{j}", "method": "trivial", "psd_margin": 0.0}
                  for j in range(len(mats))]
        return Decision(dd.YES, K, {
            "construction": "all members are zero matrices; ice-cream cone about x",
            "checks": checks,
        }, route="shared-dominant")

    try:
        deflated = deflate(live, x, tol)
        cert = common_lyapunov(deflated.blocks, tol)
    except (NotSemisimple, NotCommuting, HypothesisViolated) as exc:
        raise HypothesesNotMet(type(exc).__name__, str(exc)) from exc

    m = mats[0].shape[0]
    Q_defl = np.zeros((m, m))
    Q_defl[0, 0] = -1.0
    Q_defl[1:, 1:] = cert.V
    Sinv = np.linalg.inv(deflated.S)
    K = quadratic_cone_from_form(Sinv.T @ Q_defl @ Sinv, x)
    if not contains(K, x, tol).interior:
        raise InternalInconsistency("shared dominant eigenvector is not interior to the witness")

    checks = []
    for j, M in enumerate(mats):
        rep = is_invariant(K, M, tol)
        if not rep.invariant:
            raise InternalInconsistency(f"ellipsoidal witness fails for member {j}")
        checks.append({"matrix": f"A{j}", "method": rep.method, "psd_margin": rep.psd_margin})
    return Decision(dd.YES, K, {
        "construction": "ellipsoidal cone from deflation and a common Lyapunov inequality",
        "lyapunov_method": cert.method,
        "lyapunov_residuals": list(cert.residuals),
        "lyapunov_min_eigenvalue": cert.min_eigenvalue,
        "dropped_zero_members": dropped,
        "checks": checks,
    }, route="shared-dominant")
