"""Coupling-matrix validation and structure analysis.

The stationary system couples M field components through a symmetric real
matrix K = (k_ij).  Two structural questions decide whether the rest of the
pipeline is licensed to run:

* Can the interaction functional be made positive at all?  On co-located or
  disjointly supported profiles this reduces to the sign of the quadratic
  form X^T K X on the nonnegative cone, which we decide by support
  enumeration plus projected multistart ascent on the simplex.

* Do the off-diagonal signs split the components into groups such that two
  components attract exactly when they share a group?  If so, every ground
  state is supported inside a single group and the amplitude search never
  needs to mix groups.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ASYMMETRY_TOL = 1e-12
EXACT_SUPPORT_LIMIT = 16


class AsymmetricInputError(ValueError):
    """Relative asymmetry of the input matrix exceeds the tolerance."""


class NonFiniteInputError(ValueError):
    """Matrix entries contain NaN or infinity."""


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric M x M interaction matrix."""

    m: int
    entries: np.ndarray

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"component count must be >= 1, got {self.m}")
        e = np.asarray(self.entries, dtype=float)
        if e.shape != (self.m, self.m):
            raise ValueError(f"expected shape {(self.m, self.m)}, got {e.shape}")
        if not np.isfinite(e).all():
            raise NonFiniteInputError("coupling entries must be finite")
        object.__setattr__(self, "entries", e)


@dataclass(frozen=True)
class PartitionStructure:
    """Grouping of {0..M-1} by the sign pattern of the off-diagonal couplings.

    valid is True when k_ij >= 0 holds exactly for pairs inside one group and
    k_ij < 0 across groups, i.e. when mutual attraction is an equivalence
    relation.
    """

    groups: list = field(default_factory=list)
    valid: bool = True
    violating_pair: tuple | None = None

    def report(self) -> dict:
        """JSON-shaped summary (indices are 0-based)."""
        return {
            "valid": self.valid,
            "groups": [list(g) for g in self.groups],
            "violating_pair": list(self.violating_pair) if self.violating_pair else None,
        }


def new_coupling(m: int, entries) -> CouplingMatrix:
    """Build a CouplingMatrix, symmetrizing inputs within machine hygiene.

    Entries with relative asymmetry above 1e-12 are rejected rather than
    silently averaged.
    """
    e = np.asarray(entries, dtype=float)
    if e.shape != (m, m):
        raise ValueError(f"expected shape {(m, m)}, got {e.shape}")
    if not np.isfinite(e).all():
        raise NonFiniteInputError("coupling entries must be finite")
    scale = max(1.0, float(np.abs(e).max()))
    asym = float(np.abs(e - e.T).max())
    if asym > ASYMMETRY_TOL * scale:
        i, j = np.unravel_index(np.argmax(np.abs(e - e.T)), e.shape)
        raise AsymmetricInputError(
            f"entries ({i},{j}) and ({j},{i}) differ by {asym:.3e} (relative tol 1e-12)"
        )
    return CouplingMatrix(m=m, entries=0.5 * (e + e.T))


def _project_simplex(x: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex."""
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, len(x) + 1) > css)[0][-1]
    return np.maximum(x - css[rho] / (rho + 1.0), 0.0)


def _ascend(k: np.ndarray, x: np.ndarray, max_iter: int = 200) -> float:
    """Projected gradient ascent for x^T k x on the simplex; returns best value."""
    val = float(x @ k @ x)
    base = 1.0 / (1.0 + float(np.abs(k).max()))
    for _ in range(max_iter):
        g = 2.0 * (k @ x)
        s = base
        improved = False
        while s > 1e-18:
            xn = _project_simplex(x + s * g)
            vn = float(xn @ k @ xn)
            if vn > val + 1e-16 * max(1.0, abs(val)):
                x, val = xn, vn
                improved = True
                break
            s *= 0.5
        if not improved:
            break
    return val


def check_p1(k: CouplingMatrix, seed: int = 0, n_starts: int = 32) -> bool:
    """Decide whether X^T K X > 0 for some componentwise-nonnegative X != 0.

    Enumerates all nonempty supports (exact up to the ascent heuristic for
    M <= 16) and maximizes the form over the simplex of each support from
    vertex, centroid and seeded random starts.  For M > 16 only the full
    support is searched, which is a documented heuristic.
    """
    kk = k.entries
    diag = np.diag(kk)
    # a positive diagonal entry is an exact witness (X = e_i)
    if np.any(diag > 0.0):
        return True
    tol = 1e-12 * max(np.abs(kk).max(), np.finfo(float).tiny)
    rng = np.random.default_rng(seed)
    if k.m <= EXACT_SUPPORT_LIMIT:
        supports = [
            [i for i in range(k.m) if mask >> i & 1] for mask in range(1, 2 ** k.m)
        ]
    else:
        supports = [list(range(k.m))]
    for sup in supports:
        ks = kk[np.ix_(sup, sup)]
        ns = len(sup)
        if ns == 1:
            if ks[0, 0] > tol:
                return True
            continue
        starts = [np.full(ns, 1.0 / ns)]
        starts.extend(np.eye(ns))
        starts.extend(rng.dirichlet(np.ones(ns), size=n_starts))
        for x0 in starts:
            if _ascend(ks, np.asarray(x0, dtype=float)) > tol:
                return True
    return False


def detect_partition(k: CouplingMatrix) -> PartitionStructure:
    """Group components by connectivity of the attraction relation k_ij >= 0.

    Groups are the connected components of the graph with edges where
    k_ij >= 0 (i != j).  Cross-group pairs are repulsive by construction;
    validity can only fail inside a group, and the first within-group pair
    with k_ij < 0 is recorded.
    """
    m = k.m
    if m == 1:
        return PartitionStructure(groups=[[0]], valid=True)
    kk = k.entries
    adj = kk >= 0.0
    np.fill_diagonal(adj, False)
    seen = np.zeros(m, dtype=bool)
    groups = []
    for start in range(m):
        if seen[start]:
            continue
        stack, comp = [start], []
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(int(i))
            for j in np.flatnonzero(adj[i]):
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        groups.append(sorted(comp))
    for g in groups:
        for a in range(len(g)):
            for b in range(a + 1, len(g)):
                if kk[g[a], g[b]] < 0.0:
                    return PartitionStructure(
                        groups=groups, valid=False, violating_pair=(g[a], g[b])
                    )
    return PartitionStructure(groups=groups, valid=True)
