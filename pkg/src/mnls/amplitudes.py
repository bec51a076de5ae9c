"""Positive amplitude vectors for co-located multi-component bound states.

Plugging u_i = b_i Q into the stationary system reduces it to the algebraic
system

    F_i(B) = sum_j k_ij b_i^(p-1) b_j^(p+1) - 1 = 0,   b_i > 0,  i in support.

Every positive solution on an admissible support yields a bound state, and
the ground state is the one minimizing sum(b_i^2) (all components share the
profile, so the action is proportional to that sum).  Supports never mix
attraction groups; within a group every nonempty subset competes, which
realizes the reduction of partially trivial candidates to lower-dimensional
systems.

The solver is damped Newton (least-squares step, so rank-deficient
Jacobians on solution continua still converge) from a log-uniform
multistart cloud plus the symmetric row-sum start.  Multistart is a
heuristic: it is not a certificate that every positive root was found.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .coupling import CouplingMatrix, PartitionStructure

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
_NEWTON_TOL = 1e-12
_DEDUP_DIST = 1e-7
_POSITIVITY_FLOOR = 1e-8
_TIE_REL = 1e-8
_CONTINUUM_COUNT = 8


class InvalidPartitionError(ValueError):
    """Support enumeration requires a valid attraction partition."""


class EmptyCandidatesError(ValueError):
    """Selection needs at least one candidate solution."""


class RegimeViolationError(ValueError):
    """Closed-form oracle called outside its regime of validity."""


@dataclass(frozen=True)
class AmplitudeSolution:
    """One positive solution of the amplitude system on a support.

    b has the full component length with zeros off the support; residual is
    the max-norm of F over the support.
    """

    support: np.ndarray
    b: np.ndarray
    residual: float
    norm2: float

    def support_indices(self) -> list:
        return [int(i) for i in np.flatnonzero(self.support)]


@dataclass
class SelectionResult:
    winners: list
    candidates: list
    degenerate_family: bool
    objective: float  # min of norm2 * i1_q over candidates

    def report(self) -> dict:
        def enc(sol: AmplitudeSolution) -> dict:
            return {
                "support": sol.support_indices(),
                "amplitudes": [float(v) for v in sol.b],
                "residual": sol.residual,
                "norm2": sol.norm2,
            }

        out = {
            "candidates": [enc(c) for c in self.candidates],
            "winners": [enc(w) for w in self.winners],
            "degenerate_family": self.degenerate_family,
            "objective": self.objective,
        }
        if self.degenerate_family:
            out["degenerate_family_note"] = (
                "a continuum of positive solutions ties at "
                f"sum(b_i^2) = {self.winners[0].norm2:.12g}; reported members sample the family"
            )
        return out


def _system(ks: np.ndarray, p: float, b: np.ndarray):
    bp1 = b ** (p + 1.0)
    w = ks @ bp1
    f = b ** (p - 1.0) * w - 1.0
    jac = np.diag((p - 1.0) * b ** (p - 2.0) * w) + (p + 1.0) * np.outer(
        b ** (p - 1.0), b ** p
    ) * ks
    return f, jac


def _newton(ks: np.ndarray, p: float, b0: np.ndarray, max_iter: int = 120):
    """Damped least-squares Newton keeping iterates strictly positive."""
    b = b0.copy()
    for _ in range(max_iter):
        f, jac = _system(ks, p, b)
        if not np.isfinite(f).all():
            return None
        if np.max(np.abs(f)) < _NEWTON_TOL:
            return b
        try:
            step = np.linalg.lstsq(jac, -f, rcond=None)[0]
        except np.linalg.LinAlgError:
            return None
        if not np.isfinite(step).all():
            return None
        s = 1.0
        while s > 1e-12 and np.any(b + s * step <= _POSITIVITY_FLOOR):
            s *= 0.5
        if s <= 1e-12:
            return None  # collapsing to the boundary: smaller support owns it
        b = b + s * step
    f, _ = _system(ks, p, b)
    return b if np.max(np.abs(f)) < RESIDUAL_TOL else None


def solve_on_support(
    k: CouplingMatrix,
    p: float,
    support,
    seed: int = 0,
    n_starts: int = 64,
) -> list:
    """All distinct positive solutions found on the given support mask.

    Returns an empty list when no start converges (that support then simply
    contributes no candidate).
    """
    mask = np.zeros(k.m, dtype=bool)
    mask[np.asarray(support).nonzero() if isinstance(support, np.ndarray) else support] = True
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise ValueError("support must be nonempty")
    ks = k.entries[np.ix_(idx, idx)]
    ns = idx.size

    starts = []
    rowsum = ks.sum(axis=1)
    if np.all(rowsum > 0.0):
        starts.append(rowsum ** (-1.0 / (2.0 * p)))
    rng = np.random.default_rng(seed)
    starts.extend(10.0 ** rng.uniform(-2.0, 2.0, size=(n_starts, ns)))

    roots = []
    for b0 in starts:
        b = _newton(ks, p, np.asarray(b0, dtype=float))
        if b is not None and np.all(b > 2.0 * _POSITIVITY_FLOOR):
            roots.append(b)
    if not roots:
        logger.debug("no positive solution on support %s", idx.tolist())
        return []

    order = np.lexsort(np.asarray(roots).T[::-1])
    kept = []
    for b in (roots[i] for i in order):
        if all(np.max(np.abs(b - c)) > _DEDUP_DIST for c in kept):
            kept.append(b)

    out = []
    for b in kept:
        f, _ = _system(ks, p, b)
        full = np.zeros(k.m)
        full[idx] = b
        out.append(
            AmplitudeSolution(
                support=mask.copy(),
                b=full,
                residual=float(np.max(np.abs(f))),
                norm2=float(np.sum(b * b)),
            )
        )
    return out


def enumerate_supports(k: CouplingMatrix, part: PartitionStructure) -> list:
    """Nonempty subsets of each attraction group, by group then cardinality."""
    if not part.valid:
        raise InvalidPartitionError(
            "attraction pattern is not a partition; the support reduction is not licensed"
        )
    masks = []
    for group in part.groups:
        g = sorted(group)
        subsets = []
        for bits in range(1, 2 ** len(g)):
            sub = [g[i] for i in range(len(g)) if bits >> i & 1]
            subsets.append(sub)
        subsets.sort(key=lambda s: (len(s), s))
        for sub in subsets:
            mask = np.zeros(k.m, dtype=bool)
            mask[sub] = True
            masks.append(mask)
    return masks


def solve_all_supports(
    k: CouplingMatrix, p: float, part: PartitionStructure, seed: int = 0
) -> list:
    """Candidates from every admissible support (pipeline convenience)."""
    candidates = []
    for mask in enumerate_supports(k, part):
        candidates.extend(solve_on_support(k, p, mask, seed=seed))
    return candidates


def select_minimal(candidates: list, i1_q: float) -> SelectionResult:
    """Winners minimize norm2 * i1_q; near-ties are kept and continua flagged.

    A support carrying >= 8 distinct tied solutions is reported as a
    degenerate one-parameter family rather than isolated roots.
    """
    if not candidates:
        raise EmptyCandidatesError("no amplitude candidates to select from")
    objs = np.array([c.norm2 * i1_q for c in candidates])
    best = float(objs.min())
    winners = [c for c, o in zip(candidates, objs) if o <= best * (1.0 + _TIE_REL)]
    by_support = {}
    for w in winners:
        by_support.setdefault(tuple(w.support.tolist()), []).append(w)
    degenerate = any(len(v) >= _CONTINUUM_COUNT for v in by_support.values())
    return SelectionResult(
        winners=winners, candidates=list(candidates), degenerate_family=degenerate,
        objective=best,
    )


def oracle_symmetric(k11: float, k12: float, p: float) -> float:
    """Equal-amplitude value (k11 + k12)^(-1/2p) for the two symmetric regimes.

    Valid when k11 = k22 <= 0 with k12 > -k11, or when k11 = k22 > 0,
    k12 > 0 and (p - 2)(p k11 - k12) > 0; outside these the equal-amplitude
    value is not forced and the oracle refuses.
    """
    neg_regime = k11 <= 0.0 and k12 > -k11
    pos_regime = k11 > 0.0 and k12 > 0.0 and (p - 2.0) * (p * k11 - k12) > 0.0
    if not (neg_regime or pos_regime):
        raise RegimeViolationError(
            f"(k11={k11}, k12={k12}, p={p}) is outside both symmetric regimes"
        )
    return (k11 + k12) ** (-1.0 / (2.0 * p))


@dataclass(frozen=True)
class FRootReport:
    """Positive roots of f(x) = k11 x^2p - k11 + k12 (x^(p-1) - x^(p+1)).

    f is the ratio equation for two-component equal-diagonal solutions:
    each root x is a candidate amplitude ratio b1/b2, and x = 1 is always a
    root.  When three roots exist they pair as (x0, 1, 1/x0).
    """

    roots: tuple
    f_at_one: float
    reciprocal_mismatch: float | None

    @property
    def count(self) -> int:
        return len(self.roots)


def analyze_f_roots(k11: float, k12: float, p: float) -> FRootReport:
    """Sign-change scan on a log grid refined by bisection to 1e-12."""
    if k11 <= 0.0 or k12 <= 0.0 or p <= 0.0:
        raise ValueError("analyze_f_roots expects k11, k12, p > 0")

    def f(x):
        return k11 * x ** (2.0 * p) - k11 + k12 * (x ** (p - 1.0) - x ** (p + 1.0))

    xs = np.logspace(-3.0, 3.0, 2048)
    fs = f(xs)
    roots = [float(xs[i]) for i in np.flatnonzero(fs == 0.0)]
    for i in np.flatnonzero(fs[:-1] * fs[1:] < 0.0):
        lo, hi = float(xs[i]), float(xs[i + 1])
        flo = f(lo)
        for _ in range(200):
            if hi - lo <= 1e-12:
                break
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if flo * fm < 0.0:
                hi = mid
            else:
                lo, flo = mid, fm
        roots.append(0.5 * (lo + hi))

    if not any(abs(r - 1.0) < 1e-9 for r in roots):
        roots.append(1.0)  # f(1) = 0 identically; a tangency can evade the scan
    roots.sort()
    kept = []
    for r in roots:
        if not kept or abs(r - kept[-1]) > 1e-9 * max(1.0, r):
            kept.append(r)

    mismatch = None
    if len(kept) == 3:
        mismatch = abs(kept[0] * kept[2] - 1.0)
    return FRootReport(
        roots=tuple(kept), f_at_one=float(f(1.0)), reciprocal_mismatch=mismatch
    )


@dataclass(frozen=True)
class SmallBetaPrediction:
    indices: tuple  # argmax of the diagonal (0-based)
    amplitude: float


def small_beta_regime(k: CouplingMatrix, p: float) -> SmallBetaPrediction:
    """Predicted single-component winner for weak nonnegative cross-coupling.

    For p >= 2, positive diagonals and small off-diagonal beta, the ground
    state keeps exactly one component: an i maximizing k_ii, with amplitude
    k_ii^(-1/2p) (the scaling that solves the single-component equation).
    """
    if p < 2.0:
        raise RegimeViolationError("weak-coupling prediction requires p >= 2")
    diag = np.diag(k.entries)
    if np.any(diag <= 0.0):
        raise RegimeViolationError("weak-coupling prediction requires k_ii > 0")
    off = k.entries[~np.eye(k.m, dtype=bool)]
    if off.size and np.any(off < 0.0):
        raise RegimeViolationError("weak-coupling prediction requires k_ij >= 0")
    kmax = float(diag.max())
    idx = tuple(int(i) for i in np.flatnonzero(diag >= kmax * (1.0 - 1e-12)))
    return SmallBetaPrediction(indices=idx, amplitude=kmax ** (-1.0 / (2.0 * p)))
