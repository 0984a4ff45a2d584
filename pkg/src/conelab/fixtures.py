"""Built-in example families: the six worked 2x2/3x3 cases plus library extras."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FamilyData:
    dimension: int
    matrices: tuple[np.ndarray, ...]
    labels: tuple[str, ...] | None = None
    similarity: np.ndarray | None = None


def _from_eigs(u1, u2, lam1=2.0, lam2=1.0) -> np.ndarray:
    P = np.column_stack([u1, u2]).astype(float)
    return P @ np.diag([lam1, lam2]) @ np.linalg.inv(P)


def ex7_1() -> FamilyData:
    """Negative-determinant pair, all words pass the spectral test, no common cone."""
    A = np.array([[1.0, 1.0], [0.0, -1.0]])
    B = np.array([[1.0, 2.0], [0.0, -1.0]])
    return FamilyData(2, (A, B), ("A", "B"))


def ex7_2() -> FamilyData:
    """Normal triple: every pair shares a cone, the triple does not."""
    A = _from_eigs([1, 0], [0, 1])
    B = _from_eigs([1, 2], [-2, 1])
    C = _from_eigs([1, -2], [2, 1])
    return FamilyData(2, (A, B, C), ("A", "B", "C"))


def ex7_3() -> FamilyData:
    """Quadruple with positive spectra: every triple shares a cone, the quadruple does not."""
    A = _from_eigs([1, 0], [0, 1])
    B = _from_eigs([0, 1], [1, 0])
    C = _from_eigs([1, 1], [1, -1])
    D = _from_eigs([1, -1], [1, 1])
    return FamilyData(2, (A, B, C, D), ("A", "B", "C", "D"))


def ex7_4() -> FamilyData:
    """Non-diagonalizable pair with opposite orientation on the shared eigenline."""
    A = np.array([[1.0, 1.0], [0.0, 1.0]])
    B = np.array([[1.0, -1.0], [0.0, 1.0]])
    return FamilyData(2, (A, B), ("A", "B"))


def ex7_5() -> FamilyData:
    """Diagonal sign pair: all words pass the spectral test, yet no common cone."""
    A1 = np.diag([1.0, -1.0, -1.0])
    A2 = np.diag([-1.0, -1.0, 1.0])
    return FamilyData(3, (A1, A2), ("A1", "A2"))


def ex7_6_prefix(m: int) -> FamilyData:
    """First m members of the countable family with growing off-diagonal entries."""
    if m < 1:
        raise ValueError("prefix length must be >= 1")
    mats = tuple(np.array([[1.0, float(t)], [0.0, 0.5]]) for t in range(1, m + 1))
    return FamilyData(2, mats, tuple(f"A{t}" for t in range(1, m + 1)))


def diag_single() -> FamilyData:
    return FamilyData(2, (np.diag([2.0, 1.0]),), ("A",))


def diag_pair() -> FamilyData:
    return FamilyData(2, (np.diag([2.0, 1.0]), np.diag([3.0, 1.0])), ("A", "B"))


def spiral3() -> FamilyData:
    """One 3x3 member: dominant axis plus a contracting rotation block."""
    theta = 0.7
    M = np.zeros((3, 3))
    M[0, 0] = 2.0
    M[1:, 1:] = 0.5 * np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    return FamilyData(3, (M,), ("A",))


_REGISTRY = {
    "ex7_1": ex7_1,
    "ex7_2": ex7_2,
    "ex7_3": ex7_3,
    "ex7_4": ex7_4,
    "ex7_5": ex7_5,
    "diag_single": diag_single,
    "diag_pair": diag_pair,
    "spiral3": spiral3,
}

_PREFIX_RE = re.compile(r"^ex7_6_prefix\((\d+)\)$")

# Families that decide YES through the simultaneous-diagonalization route;
# the truncation-defect acceptance check runs over exactly these.
SIMDIAG_YES_FIXTURES = ("diag_single", "diag_pair", "spiral3")


def fixture_names() -> list[str]:
    return sorted(_REGISTRY) + ["ex7_6_prefix(m)"]


def load_fixture(name: str) -> FamilyData:
    m = _PREFIX_RE.match(name.strip())
    if m:
        return ex7_6_prefix(int(m.group(1)))
    fn = _REGISTRY.get(name.strip())
    if fn is None:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}")
    return fn()
