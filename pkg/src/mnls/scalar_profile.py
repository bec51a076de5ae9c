"""Scalar radial ground-state profile Q and its integral invariants.

Q is the unique positive, radial, strictly decreasing solution of

    Q'' + (N-1)/r Q' - Q + Q^(2p+1) = 0,   Q'(0) = 0,  Q(r) -> 0,

computed by bisection shooting on Q(0).  A trajectory that crosses zero
overshoots, one whose derivative turns positive while Q > 0 undershoots.
The unstable manifold contaminates the far tail, so past the last radius
where the solution is still positive and decreasing we graft the linearized
decay Q(r*) * exp(-(r - r*)).

All downstream quantities are quadratures of Q against the surface measure
omega_N r^(N-1) dr:

    mass = ||Q||_2^2,  kinetic = ||Q'||_2^2,  i1 = mass + kinetic,
    j1 = integral of Q^(2p+2).

For any true solution i1 == j1 (multiply the equation by Q and integrate)
and the Pohozaev scaling identity

    (N-2)/2 kinetic + N/2 mass = N/(2p+2) j1

holds; both are used as accuracy gauges.  An independent spectral
renormalization fixed point (`petviashvili_profile`) provides a second
route to q0 and the mass for cross-checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.interpolate import CubicSpline

SURFACE_MEASURE = {1: 2.0, 2: 2.0 * np.pi, 3: 4.0 * np.pi}
SHOOT_BRACKET = (0.1, 50.0)
_R_EVENT_CAP = 40.0


class SupercriticalExponentError(ValueError):
    """Exponent p outside 0 < p < 4/(N-2)+ has no decaying profile."""


class NoConvergenceError(RuntimeError):
    """Shooting bracket or iteration failed to converge."""


def _critical_upper(dim: int) -> float:
    return math.inf if dim <= 2 else 4.0 / (dim - 2)


@dataclass(frozen=True)
class ProfileConfig:
    dim: int = 1
    p: float = 1.0
    r_max: float = 14.0
    n_grid: int = 4097
    shoot_tol: float = 1e-13
    quad_tol: float = 1e-10

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if not (0.0 < self.p < _critical_upper(self.dim)):
            raise SupercriticalExponentError(
                f"p={self.p} outside (0, {_critical_upper(self.dim)}) for dim={self.dim}"
            )
        if self.r_max <= 0.0:
            raise ValueError("r_max must be positive")
        if self.n_grid < 256:
            raise ValueError("n_grid must be >= 256")
        if not (0.0 < self.shoot_tol < 1.0):
            raise ValueError("shoot_tol must be in (0, 1)")


@dataclass
class ScalarProfile:
    """Radial profile on a uniform grid with its integral invariants."""

    config: ProfileConfig
    q0: float
    r: np.ndarray
    q: np.ndarray
    qp: np.ndarray  # radial derivative Q'(r)
    mass: float
    kinetic: float
    i1: float
    j1: float

    @property
    def pohozaev_residual(self) -> float:
        n, p = self.config.dim, self.config.p
        lhs = (n - 2) / 2.0 * self.kinetic + n / 2.0 * self.mass
        rhs = n / (2.0 * p + 2.0) * self.j1
        return abs(lhs - rhs) / abs(self.i1)

    def summary(self) -> dict:
        return {
            "q0": self.q0,
            "mass": self.mass,
            "kinetic": self.kinetic,
            "i1": self.i1,
            "j1": self.j1,
            "pohozaev_residual": self.pohozaev_residual,
        }


def closed_form_1d(p: float, x) -> np.ndarray | float:
    """One-dimensional profile (p+1)^(1/2p) sech^(1/p)(p x), the N=1 oracle."""
    if p <= 0:
        raise ValueError("p must be positive")
    return (p + 1.0) ** (1.0 / (2.0 * p)) * np.cosh(p * np.asarray(x, dtype=float)) ** (
        -1.0 / p
    )


def _rhs(dim: int, p: float):
    ex = 2.0 * p + 1.0
    if dim == 1:
        def rhs(r, y):
            q = y[0]
            f = abs(q) ** ex
            return (y[1], q - (f if q >= 0.0 else -f))
    else:
        nm1 = dim - 1.0

        def rhs(r, y):
            q = y[0]
            f = abs(q) ** ex
            return (y[1], -nm1 / r * y[1] + q - (f if q >= 0.0 else -f))

    return rhs


def _series_start(q0: float, dim: int, p: float):
    # Q(r) ~ q0 + r^2/(2N) (q0 - q0^(2p+1)) regularizes the r=0 singularity;
    # the start radius shrinks when the curvature is large (high p, large q0)
    c = (q0 - q0 ** (2.0 * p + 1.0)) / (2.0 * dim)
    eps = min(1e-8, np.sqrt(1e-10 * q0 / max(1.0, abs(c))))
    return eps, [q0 + c * eps ** 2, 2.0 * c * eps]


def _events():
    def ev_zero(r, y):
        return y[0]

    ev_zero.terminal = True
    ev_zero.direction = -1.0

    def ev_turn(r, y):
        return y[1]

    ev_turn.terminal = True
    ev_turn.direction = 1.0
    return [ev_zero, ev_turn]


def _classify(q0: float, dim: int, p: float, rtol: float) -> int:
    """+1 overshoot (Q crosses zero), -1 undershoot (Q turns back up)."""
    if q0 <= 1.0:
        return -1  # the decaying solution requires Q(0)^(2p) > 1
    eps, y0 = _series_start(q0, dim, p)
    with np.errstate(over="ignore", invalid="ignore"):
        sol = solve_ivp(
            _rhs(dim, p),
            (eps, _R_EVENT_CAP),
            y0,
            method="DOP853",
            rtol=rtol,
            atol=1e-14,
            events=_events(),
        )
    if sol.t_events[0].size:
        return +1
    if sol.status < 0:
        return +1  # nonlinearity exploded: far past the decaying manifold
    return -1


def _shoot_q0(cfg: ProfileConfig) -> float:
    lo, hi = SHOOT_BRACKET
    if _classify(lo, cfg.dim, cfg.p, 1e-9) != -1 or _classify(hi, cfg.dim, cfg.p, 1e-9) != +1:
        raise NoConvergenceError(
            f"no shooting bracket in {SHOOT_BRACKET} for dim={cfg.dim}, p={cfg.p}"
        )
    # coarse pass narrows the bracket cheaply; the tight pass pins q0
    for rtol, width in ((1e-9, 1e-6), (1e-12, cfg.shoot_tol)):
        while hi - lo > width:
            mid = 0.5 * (lo + hi)
            if _classify(mid, cfg.dim, cfg.p, rtol) == +1:
                hi = mid
            else:
                lo = mid
    return 0.5 * (lo + hi)


def solve_profile(cfg: ProfileConfig) -> ScalarProfile:
    """Shoot for Q(0), sample Q on the grid, graft the tail, integrate."""
    q0 = _shoot_q0(cfg)
    eps, y0 = _series_start(q0, cfg.dim, cfg.p)
    sol = solve_ivp(
        _rhs(cfg.dim, cfg.p),
        (eps, cfg.r_max),
        y0,
        method="DOP853",
        rtol=1e-12,
        atol=1e-16,
        dense_output=True,
        events=_events(),
    )
    r_end = float(sol.t[-1])
    # last reliable radius: solution still positive and strictly decreasing
    probe = np.linspace(eps, r_end, 4000)
    vals = sol.sol(probe)
    bad = np.flatnonzero(~((vals[0] > 0.0) & (vals[1] < 0.0)))
    r_star = float(probe[bad[0] - 1]) if bad.size else r_end

    r = np.linspace(0.0, cfg.r_max, cfg.n_grid)
    q = np.empty(cfg.n_grid)
    qp = np.empty(cfg.n_grid)
    inside = r <= r_star
    v = sol.sol(np.clip(r[inside], eps, r_star))
    q[inside] = v[0]
    qp[inside] = v[1]
    q[0] = q0
    qp[0] = 0.0
    n_in = int(inside.sum())
    if n_in < cfg.n_grid:
        q_star = float(sol.sol(r_star)[0])
        tail = q_star * np.exp(-(r[n_in:] - r_star))
        q[n_in:] = tail
        qp[n_in:] = -tail

    if np.any(q <= 0.0) or np.any(np.diff(q) >= 0.0):
        raise NoConvergenceError("profile is not positive strictly decreasing on the grid")

    mass, kinetic, i1, j1 = _integrals(cfg, r, q, qp)
    return ScalarProfile(
        config=cfg, q0=q0, r=r, q=q, qp=qp, mass=mass, kinetic=kinetic, i1=i1, j1=j1
    )


def _integrals(cfg: ProfileConfig, r, q, qp):
    w = SURFACE_MEASURE[cfg.dim] * r ** (cfg.dim - 1)
    mass = float(simpson(w * q * q, x=r))
    kinetic = float(simpson(w * qp * qp, x=r))
    j1 = float(simpson(w * q ** (2.0 * cfg.p + 2.0), x=r))
    return mass, kinetic, mass + kinetic, j1


def profile_integrals(prof: ScalarProfile) -> tuple:
    """Recompute (mass, kinetic, i1, j1) from the stored grid; idempotent."""
    return _integrals(prof.config, prof.r, prof.q, prof.qp)


def profile_interpolant(prof: ScalarProfile):
    """Callable Q(|x|) valid beyond the grid via the exponential tail.

    Clamped cubic spline with Q'(0) = 0 and the grafted decay rate at r_max.
    """
    spline = CubicSpline(
        prof.r, prof.q, bc_type=((1, 0.0), (1, -float(prof.q[-1])))
    )
    r_max = float(prof.r[-1])
    q_edge = float(prof.q[-1])

    def q_of(radius):
        rr = np.abs(np.asarray(radius, dtype=float))
        out = np.where(
            rr <= r_max,
            spline(np.minimum(rr, r_max)),
            q_edge * np.exp(-(rr - r_max)),
        )
        return out

    return q_of


@dataclass(frozen=True)
class PetviashviliResult:
    q0: float
    mass: float
    iterations: int
    residual: float


def petviashvili_profile(
    dim: int,
    p: float,
    box: float = 32.0,
    n: int | None = None,
    max_iter: int = 4000,
    tol: float = 1e-13,
) -> PetviashviliResult:
    """Spectral renormalization fixed point for the same profile equation.

    Iterates Q <- s^gamma F^-1[ F[Q^(2p+1)] / (1 + |xi|^2) ] on a periodic
    box, with the stabilizing power s = <LQ,Q>/<Q^(2p+1),Q> raised to
    gamma = (2p+1)/(2p).  Entirely independent of the shooting route; used
    as the dual-route oracle on q0 and mass.
    """
    if dim not in (1, 2):
        raise ValueError("spectral oracle supports dim 1 and 2")
    if not (0.0 < p < _critical_upper(dim)):
        raise SupercriticalExponentError(f"p={p} out of range for dim={dim}")
    if n is None:
        n = 1024 if dim == 1 else 512
    h = box / n
    x = (np.arange(n) - n // 2) * h
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
    if dim == 1:
        r2 = x ** 2
        k2r = (k ** 2)[: n // 2 + 1]
        shape = (n,)
    else:
        xg, yg = np.meshgrid(x, x, indexing="ij")
        r2 = xg ** 2 + yg ** 2
        kx, ky = np.meshgrid(k, k, indexing="ij")
        k2r = (kx ** 2 + ky ** 2)[:, : n // 2 + 1]
        shape = (n, n)

    sym = 1.0 + k2r
    gamma = (2.0 * p + 1.0) / (2.0 * p)
    u = 2.0 * np.exp(-r2 / 2.0)
    du = np.inf
    it = 0
    axes = tuple(range(dim))
    for it in range(1, max_iter + 1):
        nl = u ** (2.0 * p + 1.0)
        uh = np.fft.rfftn(u, axes=axes)
        nlh = np.fft.rfftn(nl, axes=axes)
        num = float(np.sum(sym * np.abs(uh) ** 2))
        den = float(np.sum((nlh * np.conj(uh)).real))
        if den <= 0.0:
            raise NoConvergenceError("spectral iteration lost positivity")
        unew = (num / den) ** gamma * np.fft.irfftn(nlh / sym, s=shape, axes=axes)
        du = float(np.max(np.abs(unew - u)))
        u = unew
        if du < tol:
            break
    else:
        raise NoConvergenceError(f"spectral iteration stalled at residual {du:.3e}")
    return PetviashviliResult(
        q0=float(u.max()), mass=float(np.sum(u ** 2) * h ** dim), iterations=it, residual=du
    )
