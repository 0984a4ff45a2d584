"""Decision and cone construction for simultaneously diagonalizable families.

For a commuting family of diagonalizable matrices sharing a similarity S,
the decision reduces to bookkeeping on the q x n table of eigenvalues: over
all exponent tuples, collect the tie-broken index of the dominant diagonal
block; a common invariant proper cone exists exactly when the collected rows
of the table are entrywise nonnegative.  The constructive direction builds a
polyhedral cone from the dominant real columns of S and closes it under the
family up to a word-length bound, reporting a truncation defect.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import decision as dd
from .cones import PolyhedralCone, contains, is_proper, nnls_distance, unit
from .decision import Decision
from .errors import (
    DimensionMismatch,
    EmptyFamily,
    InternalInconsistency,
    NonVandergraftProduct,
    NotCommuting,
    NotDiagonalizable,
    PointednessCertificateFailed,
    RefinementFailed,
)
from .linalg import DEFAULT_TOL, ToleranceConfig, as_square_matrix, eigen_decompose, nullspace

_MAX_DRAWS = 8


@dataclass(frozen=True)
class SimDiagForm:
    """Verified joint diagonal form of a commuting diagonalizable family."""

    S: np.ndarray                  # (m, m) complex; conjugate-pair columns for complex blocks
    block_sizes: tuple[int, ...]
    lambda_table: np.ndarray       # (q, n) complex, row i = eigenvalues of block i
    b: np.ndarray                  # (q,) reference eigenvalues of the witness combination
    family: tuple[np.ndarray, ...]
    block_real: tuple[bool, ...]
    conj_partner: tuple[int | None, ...]

    @property
    def dim(self) -> int:
        return self.S.shape[0]

    @property
    def family_size(self) -> int:
        return len(self.family)

    @property
    def num_blocks(self) -> int:
        return len(self.block_sizes)

    def reconstruct(self, j: int) -> np.ndarray:
        d = np.concatenate([
            np.full(s, self.lambda_table[i, j]) for i, s in enumerate(self.block_sizes)
        ])
        return np.real(self.S @ np.diag(d) @ np.linalg.inv(self.S))


@dataclass(frozen=True)
class DominantIndexSet:
    indices: frozenset[int]
    witnesses: dict  # block index -> first exponent tuple that elected it
    search_bound: int
    exact: bool
    notes: tuple[str, ...] = ()


def _check_commuting(mats, tol: ToleranceConfig):
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            lhs = np.linalg.norm(mats[i] @ mats[j] - mats[j] @ mats[i])
            bound = tol.eig_cluster_tol * max(1.0, np.linalg.norm(mats[i]) * np.linalg.norm(mats[j]))
            if lhs > bound:
                raise NotCommuting(f"members {i} and {j} do not commute (defect {lhs:.3e})")


def _split_by_member(basis: np.ndarray, A: np.ndarray, tol: ToleranceConfig):
    """Split an A-invariant subspace (orthonormal complex basis) by A's eigenvalues."""
    R = basis.conj().T @ (A @ basis)
    s = basis.shape[1]
    if s == 1:
        return [(basis, complex(R[0, 0]))]
    values = np.linalg.eigvals(R)
    cut = tol.eig_cluster_tol * max(1.0, float(np.max(np.abs(values))))
    reps: list[complex] = []
    for v in sorted(values, key=lambda z: (z.real, z.imag)):
        if not any(abs(v - r) <= cut for r in reps):
            reps.append(complex(v))
    out = []
    for lam in reps:
        ns = nullspace(R - lam * np.eye(s), max(tol.rank_tol, cut))
        if ns.shape[1] == 0:
            raise RefinementFailed("lost an eigenspace while refining a joint block")
        sub, _ = np.linalg.qr(basis @ ns)
        out.append((sub, lam))
    return out


def _joint_blocks(mats, seed_basis, tol: ToleranceConfig):
    """Joint eigenvalue tuples and multiplicities inside one invariant subspace."""
    blocks = [(seed_basis, ())]
    for A in mats:
        nxt = []
        for basis, prefix in blocks:
            for sub, lam in _split_by_member(basis, A, tol):
                nxt.append((sub, prefix + (lam,)))
        blocks = nxt
    return [(tup, basis.shape[1]) for basis, tup in blocks]


def simultaneous_diagonalize(family, tol: ToleranceConfig = DEFAULT_TOL, seed: int = 0) -> SimDiagForm:
    """Shared diagonal form via a random positive witness combination.

    Draws up to eight seeded positive combinations, keeps the one with the
    most distinct eigenvalues, refines its degenerate eigenspaces until every
    member is diagonal, and merges columns into blocks of equal joint
    eigenvalue tuples.
    """
    if len(family) == 0:
        raise EmptyFamily("no matrices to diagonalize")
    mats = [as_square_matrix(M) for M in family]
    m = mats[0].shape[0]
    if any(M.shape[0] != m for M in mats):
        raise DimensionMismatch("family members must share one dimension")
    _check_commuting(mats, tol)
    for j, M in enumerate(mats):
        spec = eigen_decompose(M, tol)
        if any(ev.degree > 1 for ev in spec.eigenvalues):
            raise NotDiagonalizable(f"member {j} is not diagonalizable")

    rng = np.random.default_rng(seed)
    draws = [rng.uniform(0.5, 1.5, size=len(mats)) for _ in range(_MAX_DRAWS)]

    def count_distinct(c):
        B0 = sum(cj * M for cj, M in zip(c, mats))
        values = np.linalg.eigvals(B0)
        cut = tol.eig_cluster_tol * max(1.0, float(np.max(np.abs(values))))
        reps = []
        for v in sorted(values, key=lambda z: (z.real, z.imag)):
            if not any(abs(v - r) <= cut for r in reps):
                reps.append(v)
        return len(reps), reps

    counted = [count_distinct(c) for c in draws]
    best = int(np.argmax([k for k, _ in counted]))
    B0 = sum(cj * M for cj, M in zip(draws[best], mats))
    cut = tol.eig_cluster_tol * max(1.0, float(np.linalg.norm(B0)))

    # Refine each witness eigenspace into joint blocks, then merge equal tuples.
    raw: list[tuple[tuple[complex, ...], int]] = []
    for lam in counted[best][1]:
        basis = nullspace(B0.astype(complex) - lam * np.eye(m), max(tol.rank_tol, cut))
        raw.extend(_joint_blocks(mats, basis, tol))
    merged: list[list] = []
    for tup, size in raw:
        hit = next((g for g in merged if all(abs(a - b) <= cut for a, b in zip(g[0], tup))), None)
        if hit is None:
            merged.append([tup, size])
        else:
            hit[1] += size

    scale = max(1.0, max(float(np.linalg.norm(M)) for M in mats))
    zero_cut = tol.eig_cluster_tol * scale

    def canon(z: complex) -> complex:
        re = 0.0 if abs(z.real) <= zero_cut else z.real
        im = 0.0 if abs(z.imag) <= zero_cut else z.imag
        return complex(re, im)

    tuples = [tuple(canon(z) for z in tup) for tup, _ in merged]
    q = len(tuples)

    # Reference eigenvalues must be pairwise distinct; redraw if a draw fails.
    b = None
    chosen = None
    for c in draws:
        cand = np.array([sum(cj * z for cj, z in zip(c, tup)) for tup in tuples])
        ok = all(abs(cand[i] - cand[j]) > tol.eig_cluster_tol * max(1.0, float(np.max(np.abs(cand))))
                 for i in range(q) for j in range(i + 1, q))
        if ok:
            b, chosen = cand, c
            break
    if b is None:
        raise RefinementFailed("no drawn combination separates the joint blocks")

    # Canonical bases per block: real blocks from a real stacked nullspace,
    # complex blocks paired with their exact conjugates.
    order = sorted(range(q), key=lambda i: tuple((z.real, z.imag) for z in tuples[i]))
    entries = []
    used = set()
    for i in order:
        if i in used:
            continue
        tup = tuples[i]
        real_block = all(z.imag == 0.0 for z in tup)
        if real_block:
            stack = np.vstack([M - z.real * np.eye(m) for M, z in zip(mats, tup)])
            basis = nullspace(stack, tol.rank_tol)
            entries.append((tup, np.real(basis), True, None))
            used.add(i)
        else:
            rep = tup if next(z.imag for z in tup if z.imag != 0.0) > 0 else tuple(np.conj(z) for z in tup)
            partner_idx = next(
                (k for k in order if k not in used and k != i
                 and all(abs(np.conj(a) - bb) <= cut for a, bb in zip(tuples[i], tuples[k]))),
                None,
            )
            if partner_idx is None:
                raise RefinementFailed("complex joint block without a conjugate partner")
            stack = np.vstack([M.astype(complex) - z * np.eye(m) for M, z in zip(mats, rep)])
            basis = nullspace(stack, tol.rank_tol)
            entries.append((rep, basis, False, len(entries) + 1))
            entries.append((tuple(np.conj(z) for z in rep), np.conj(basis), False, len(entries) - 1))
            used.update({i, partner_idx})

    sizes = tuple(int(e[1].shape[1]) for e in entries)
    if sum(sizes) != m or any(s == 0 for s in sizes):
        raise RefinementFailed("joint eigenspaces do not span the ambient space")
    S = np.column_stack([e[1] for e in entries]).astype(complex)
    table = np.array([e[0] for e in entries], dtype=complex)
    b_final = np.array([sum(cj * z for cj, z in zip(chosen, row)) for row in table])

    form = SimDiagForm(S, sizes, table, b_final, tuple(mats),
                       tuple(e[2] for e in entries), tuple(e[3] for e in entries))
    for j, M in enumerate(mats):
        err = np.linalg.norm(form.reconstruct(j) - M)
        if err > 1e-6 * max(1.0, float(np.linalg.norm(M))):
            raise RefinementFailed(f"reconstruction residual {err:.3e} for member {j}")
    return form


def _exponent_tuples(n: int, bound: int):
    def comp(k, total):
        if k == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in comp(k - 1, total - first):
                yield (first,) + rest

    for total in range(bound + 1):
        yield from comp(n, total)


def _omega(form: SimDiagForm, exps, tol: ToleranceConfig):
    """Indices where the diagonal product is real, nonnegative and of maximal modulus."""
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(form.lambda_table))
    phase = np.angle(form.lambda_table)
    q = form.num_blocks
    logs = np.zeros(q)
    phases = np.zeros(q)
    for j, mj in enumerate(exps):
        if mj == 0:
            continue
        logs = logs + mj * logmag[:, j]
        phases = phases + mj * phase[:, j]
    maxv = float(np.max(logs))
    if maxv == -np.inf:
        top = np.ones(q, dtype=bool)
    else:
        top = logs >= maxv - tol.eig_cluster_tol * (1.0 + abs(maxv))
    wrapped = np.abs((phases + np.pi) % (2.0 * np.pi) - np.pi)
    real_nonneg = (wrapped <= 1e-8 * (1.0 + sum(exps))) | (logs == -np.inf)
    return [int(i) for i in np.flatnonzero(top & real_nonneg)]


def _tiebreak(form: SimDiagForm, omega, tol: ToleranceConfig):
    """The index of the tie set whose reference eigenvalue equals the maximal
    |b| over the tie set.  Falls back to the largest real part when no real
    positive witness exists (possible only for families without a common
    cone)."""
    bs = form.b[omega]
    target = float(np.max(np.abs(bs)))
    eps = tol.eig_cluster_tol * max(1.0, target)
    for k, i in enumerate(omega):
        if abs(bs[k].imag) <= eps and bs[k].real > 0 and abs(bs[k].real - target) <= eps:
            return i, True
    k = int(np.argmax(bs.real))
    return omega[k], False


def dominant_index_set(form: SimDiagForm, bound: int = 8,
                       tol: ToleranceConfig = DEFAULT_TOL) -> DominantIndexSet:
    """Union over exponent tuples (sum <= bound) of the tie-broken dominant block.

    `exact` is set when, additionally, a feasibility certificate over the
    log-magnitude points shows no block outside the set can be weakly maximal
    in any nonnegative direction (only available for strictly nonzero
    spectra).
    """
    indices: set[int] = set()
    witnesses: dict[int, tuple[int, ...]] = {}
    notes: list[str] = []
    for exps in _exponent_tuples(form.family_size, bound):
        omega = _omega(form, exps, tol)
        if not omega:
            partial = DominantIndexSet(frozenset(indices), dict(witnesses), bound, False,
                                       tuple(notes) + (f"aborted at non-Vandergraft tuple {tuple(exps)}",))
            raise NonVandergraftProduct(exps, partial=partial)
        p, strict_rule = _tiebreak(form, omega, tol)
        if not strict_rule:
            notes.append(f"tie-break fallback (largest real part) at exponents {tuple(exps)}")
        if p not in indices:
            indices.add(p)
            witnesses[p] = tuple(exps)

    exact = False
    if np.all(np.abs(form.lambda_table) > 0):
        logs = np.log(np.abs(form.lambda_table))
        weakly_maximal = set()
        n = form.family_size
        for i in range(form.num_blocks):
            others = [k for k in range(form.num_blocks) if k != i]
            if not others:
                weakly_maximal.add(i)
                continue
            A_ub = logs[others] - logs[i]
            res = linprog(np.zeros(n), A_ub=A_ub, b_ub=np.full(len(others), 1e-9),
                          A_eq=np.ones((1, n)), b_eq=[1.0], bounds=(0, None), method="highs")
            if res.status == 0:
                weakly_maximal.add(i)
        exact = weakly_maximal <= indices
    else:
        notes.append("zero eigenvalues present; completeness certificate unavailable")
    return DominantIndexSet(frozenset(indices), witnesses, bound, exact, tuple(notes))


def construct_simdiag_cone(form: SimDiagForm, word_len: int = 12,
                           tol: ToleranceConfig = DEFAULT_TOL,
                           dominant: DominantIndexSet | None = None,
                           bound: int = 8):
    """Truncated polyhedral witness cone plus its certificates.

    Seeds: the real columns spanning the dominant blocks, and the sum f of
    those columns added to each remaining basis vector (real columns, then
    real/imaginary parts of conjugate-pair columns).  The seed set is closed
    under the family up to `word_len` applications, normalizing and pruning.
    Returns (cone, report) where the report carries the pointedness
    certificate and the invariance defect of the truncation.
    """
    if dominant is None:
        dominant = dominant_index_set(form, bound, tol)
    P = sorted(dominant.indices)
    offsets = np.cumsum((0,) + form.block_sizes)
    for i in P:
        if not form.block_real[i]:
            raise InternalInconsistency("dominant blocks must carry real eigenvalue rows")

    plus_cols = [np.real(form.S[:, k]) for i in P for k in range(offsets[i], offsets[i + 1])]
    minus_cols, pair_cols = [], []
    seen_pairs = set()
    for i in range(form.num_blocks):
        if i in P:
            continue
        if form.block_real[i]:
            minus_cols.extend(np.real(form.S[:, k]) for k in range(offsets[i], offsets[i + 1]))
        else:
            partner = form.conj_partner[i]
            if (partner, i) in seen_pairs:
                continue
            seen_pairs.add((i, partner))
            for k in range(offsets[i], offsets[i + 1]):
                pair_cols.append((np.real(form.S[:, k]), np.imag(form.S[:, k])))

    f = np.sum(plus_cols, axis=0)
    basis_cols = plus_cols + minus_cols + [w for uv in pair_cols for w in uv]
    F = np.column_stack(basis_cols)
    p = len(plus_cols)
    Finv = np.linalg.inv(F)

    seeds = [(unit(c), "full") for c in plus_cols]
    seeds += [(unit(f + c), "full") for c in minus_cols]
    seeds += [(unit(f + w), "half") for uv in pair_cols for w in uv]

    gens: list[np.ndarray] = []
    tags: list[str] = []

    def absorbed(v):
        if not gens:
            return False
        dist, _ = nnls_distance(np.array(gens).T, v)
        return dist <= tol.geom_tol

    for v, t in seeds:
        if not absorbed(v):
            gens.append(v)
            tags.append(t)
    frontier = list(range(len(gens)))
    for _ in range(word_len):
        fresh = []
        for A in form.family:
            for idx in frontier:
                w = A @ gens[idx]
                if np.linalg.norm(w) <= 1e-300:
                    continue
                w = unit(w)
                if not absorbed(w):
                    gens.append(w)
                    tags.append(tags[idx])
                    fresh.append(len(gens) - 1)
        if not fresh:
            break
        frontier = fresh

    # Drop generators that became redundant as later words arrived.
    k = 0
    while k < len(gens) and len(gens) > 1:
        rest = gens[:k] + gens[k + 1:]
        dist, _ = nnls_distance(np.array(rest).T, gens[k])
        if dist <= tol.geom_tol:
            gens.pop(k)
            tags.pop(k)
        else:
            k += 1

    slack = tol.geom_tol * (1.0 + float(np.linalg.norm(Finv, 2)))
    for g, t in zip(gens, tags):
        alpha = Finv @ g
        head, tail = alpha[:p], alpha[p:]
        factor = 1.0 if t == "full" else 0.5
        if np.min(head, initial=0.0) < -slack or np.sum(head) < factor * np.sum(np.abs(tail)) - slack:
            raise PointednessCertificateFailed(
                f"coordinate inequality violated on a generator (tag {t})")

    K = PolyhedralCone(form.dim, np.array(sorted(gens, key=lambda v: tuple(v))))
    defect = 0.0
    for A in form.family:
        for g in K.generators:
            defect = max(defect, contains(K, A @ g, tol).distance)
    if not is_proper(K, tol):
        raise PointednessCertificateFailed("truncated cone failed the properness oracle")
    report = {
        "defect": defect,
        "word_len": word_len,
        "num_generators": K.num_generators,
        "pointedness": "verified",
    }
    return K, report


def _nonnegativity_violation(form: SimDiagForm, dominant: DominantIndexSet,
                             tol: ToleranceConfig, real_only: bool = False) -> dict | None:
    scales = [max(1.0, float(np.linalg.norm(M))) for M in form.family]
    for i in sorted(dominant.indices):
        for j in range(form.family_size):
            lam = form.lambda_table[i, j]
            sign_violation = lam.real < -tol.eig_cluster_tol * scales[j] and \
                abs(lam.imag) <= tol.eig_cluster_tol * scales[j]
            complex_violation = abs(lam.imag) > tol.eig_cluster_tol * scales[j]
            if sign_violation or (complex_violation and not real_only):
                return {
                    "block": i,
                    "matrix": j,
                    "eigenvalue": [lam.real, lam.imag],
                    "witness_exponents": list(dominant.witnesses[i]),
                }
    return None


def decide_simdiag(family, tol: ToleranceConfig = DEFAULT_TOL, bound: int = 8,
                   seed: int = 0, word_len: int = 12) -> Decision:
    """Exact decision for commuting diagonalizable families of any size."""
    form = simultaneous_diagonalize(family, tol, seed)
    try:
        dominant = dominant_index_set(form, bound, tol)
    except NonVandergraftProduct as exc:
        # Prefer naming an eigenvalue-sign violation over the raw product
        # failure when the partial dominant set already exhibits one.
        violation = None
        if exc.partial is not None:
            violation = _nonnegativity_violation(form, exc.partial, tol, real_only=True)
        if violation is not None:
            return Decision(dd.NO, None, {
                "failed_condition": dd.DOMINANT_NONNEGATIVITY_FAILS,
                "evidence": violation,
            }, route="simdiag")
        return Decision(dd.NO, None, {
            "failed_condition": dd.NON_VANDERGRAFT_PRODUCT,
            "evidence": {"exponents": list(exc.exponents)},
        }, route="simdiag")

    violation = _nonnegativity_violation(form, dominant, tol)
    if violation is not None:
        return Decision(dd.NO, None, {
            "failed_condition": dd.DOMINANT_NONNEGATIVITY_FAILS,
            "evidence": violation,
        }, route="simdiag")

    K, report = construct_simdiag_cone(form, word_len, tol, dominant)
    cert = {
        "dominant_blocks": sorted(dominant.indices),
        "search_bound": dominant.search_bound,
        "exact": dominant.exact,
        "construction": report,
    }
    if not dominant.exact:
        cert["label"] = f"verified-to-bound-{bound}"
    if dominant.notes:
        cert["notes"] = list(dominant.notes)
    return Decision(dd.YES, K, cert, route="simdiag")
