"""Batch front end: parse a problem instance, run computations, emit reports.

Commands (`mnls <command> --config file.toml [overrides]`):

    profile      solve the scalar radial profile; write CSV + JSON summary
    amplitudes   enumerate supports and solve the amplitude system; JSON report
    groundstate  full pipeline profile -> amplitudes -> assembled minimizer
    gn           sharp inequality constant (and mass threshold when critical)
    evolve       split-step run with dichotomy verdict; CSV series + JSON
    verify       built-in oracle suite, one PASS/FAIL line per item

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 solver failure, 4 invalid attraction partition, 5 no positive interaction
direction (no bound states exist).

Reports are JSON with sorted keys; identical config and seed produce
byte-identical files.  The environment variable MNLS_SEED overrides the
config seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import amplitudes as amp
from . import coupling as cpl
from . import evolution as evo
from . import ground_state as gst
from . import scalar_profile as prof

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_PARTITION = 4
EXIT_NO_P1 = 5


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemInstance:
    dim: int = 1
    p: float = 1.0
    coupling: tuple = ((1.0,),)
    seed: int = 0
    r_max: float = 14.0
    n_grid: int = 4097
    shoot_tol: float = 1e-13
    quad_tol: float = 1e-10
    ev_n: int = 1024
    ev_box: float = 32.0
    ev_dt: float = 1e-3
    ev_t_end: float = 10.0
    ev_blowup_factor: float = 1e3
    ev_record_every: int = 100
    ev_window_radius: float = 2.0
    ev_initial: str = "groundstate"
    ev_scale: float = 1.0
    ev_chirp: float = 0.0
    ev_mass: float = 0.0
    ev_snapshot: str = ""

    @property
    def m(self) -> int:
        return len(self.coupling)

    def coupling_matrix(self) -> cpl.CouplingMatrix:
        return cpl.new_coupling(self.m, np.array(self.coupling, dtype=float))

    def profile_config(self) -> prof.ProfileConfig:
        return prof.ProfileConfig(
            dim=self.dim,
            p=self.p,
            r_max=self.r_max,
            n_grid=self.n_grid,
            shoot_tol=self.shoot_tol,
            quad_tol=self.quad_tol,
        )

    def evolve_config(self) -> evo.EvolveConfig:
        return evo.EvolveConfig(
            dt=self.ev_dt,
            t_end=self.ev_t_end,
            blowup_factor=self.ev_blowup_factor,
            record_every=self.ev_record_every,
            window_radius=self.ev_window_radius,
        )

    def config_dict(self) -> dict:
        return {
            "seed": self.seed,
            "problem": {
                "dim": self.dim,
                "p": self.p,
                "coupling": [list(row) for row in self.coupling],
            },
            "profile": {
                "r_max": self.r_max,
                "n_grid": self.n_grid,
                "shoot_tol": self.shoot_tol,
                "quad_tol": self.quad_tol,
            },
            "evolution": {
                "n": self.ev_n,
                "box": self.ev_box,
                "dt": self.ev_dt,
                "t_end": self.ev_t_end,
                "blowup_factor": self.ev_blowup_factor,
                "record_every": self.ev_record_every,
                "window_radius": self.ev_window_radius,
                "initial": self.ev_initial,
                "scale": self.ev_scale,
                "chirp": self.ev_chirp,
                "mass": self.ev_mass,
                "snapshot": self.ev_snapshot,
            },
        }


def instance_from_dict(data: dict) -> ProblemInstance:
    problem = data.get("problem", {})
    profile = data.get("profile", {})
    evolution = data.get("evolution", {})
    known_top = {"seed", "problem", "profile", "evolution"}
    unknown = set(data) - known_top
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    defaults = ProblemInstance()
    try:
        inst = ProblemInstance(
            dim=int(problem.get("dim", defaults.dim)),
            p=float(problem.get("p", defaults.p)),
            coupling=tuple(
                tuple(float(x) for x in row) for row in problem.get("coupling", [[1.0]])
            ),
            seed=int(data.get("seed", defaults.seed)),
            r_max=float(profile.get("r_max", defaults.r_max)),
            n_grid=int(profile.get("n_grid", defaults.n_grid)),
            shoot_tol=float(profile.get("shoot_tol", defaults.shoot_tol)),
            quad_tol=float(profile.get("quad_tol", defaults.quad_tol)),
            ev_n=int(evolution.get("n", defaults.ev_n)),
            ev_box=float(evolution.get("box", defaults.ev_box)),
            ev_dt=float(evolution.get("dt", defaults.ev_dt)),
            ev_t_end=float(evolution.get("t_end", defaults.ev_t_end)),
            ev_blowup_factor=float(
                evolution.get("blowup_factor", defaults.ev_blowup_factor)
            ),
            ev_record_every=int(evolution.get("record_every", defaults.ev_record_every)),
            ev_window_radius=float(
                evolution.get("window_radius", defaults.ev_window_radius)
            ),
            ev_initial=str(evolution.get("initial", defaults.ev_initial)),
            ev_scale=float(evolution.get("scale", defaults.ev_scale)),
            ev_chirp=float(evolution.get("chirp", defaults.ev_chirp)),
            ev_mass=float(evolution.get("mass", defaults.ev_mass)),
            ev_snapshot=str(evolution.get("snapshot", defaults.ev_snapshot)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    _validate_instance(inst)
    return inst


def _validate_instance(inst: ProblemInstance) -> None:
    if inst.dim not in (1, 2, 3):
        raise ConfigError(f"dim must be 1, 2 or 3, got {inst.dim}")
    upper = math.inf if inst.dim <= 2 else 4.0 / (inst.dim - 2)
    if not (0.0 < inst.p < upper):
        raise ConfigError(f"p={inst.p} outside (0, {upper}) for dim={inst.dim}")
    rows = inst.coupling
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ConfigError("coupling must be a square matrix")
    if inst.ev_initial not in ("groundstate", "gaussian", "snapshot", "zero"):
        raise ConfigError(f"unknown initial data kind {inst.ev_initial!r}")


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad TOML in {path}: {exc}") from exc


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)}")


def serialize_config(inst: ProblemInstance) -> str:
    """Instance back to TOML text; parsing the result reproduces the instance."""
    data = inst.config_dict()
    lines = [f"seed = {_toml_value(data['seed'])}", ""]
    for section in ("problem", "profile", "evolution"):
        lines.append(f"[{section}]")
        for key, val in data[section].items():
            lines.append(f"{key} = {_toml_value(val)}")
        lines.append("")
    return "\n".join(lines)


def apply_overrides(inst: ProblemInstance, args) -> ProblemInstance:
    updates = {}
    if getattr(args, "dim", None) is not None:
        updates["dim"] = args.dim
    if getattr(args, "p", None) is not None:
        updates["p"] = args.p
    if getattr(args, "r_max", None) is not None:
        updates["r_max"] = args.r_max
    if getattr(args, "n_grid", None) is not None:
        updates["n_grid"] = args.n_grid
    if getattr(args, "coupling", None) is not None:
        try:
            rows = json.loads(args.coupling)
            updates["coupling"] = tuple(tuple(float(x) for x in row) for row in rows)
        except (json.JSONDecodeError, TypeError) as exc:
            raise ConfigError(f"bad --coupling value: {exc}") from exc
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    env_seed = os.environ.get("MNLS_SEED")
    if env_seed is not None:
        try:
            updates["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"bad MNLS_SEED: {env_seed!r}") from exc
    inst = replace(inst, **updates)
    _validate_instance(inst)
    return inst


def _write_json(path, payload) -> None:
    def default(obj):
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        raise TypeError(f"not JSON-serializable: {type(obj)}")

    with open(path, "w") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2, default=default) + "\n")


def _write_profile_csv(path, profile: prof.ScalarProfile) -> None:
    with open(path, "w") as fh:
        fh.write("r,Q\n")
        for r, q in zip(profile.r, profile.q):
            fh.write(f"{float(r)!r},{float(q)!r}\n")


# ---------------------------------------------------------------------------
# Pipeline helpers shared by commands and the verify suite
# ---------------------------------------------------------------------------


class NoPositiveDirectionError(RuntimeError):
    """The interaction form is nonpositive on the cone: no bound states."""


def pipeline_groundstate(inst: ProblemInstance):
    """Full pipeline; returns (ground_state, selection, profile)."""
    k = inst.coupling_matrix()
    part = cpl.detect_partition(k)
    if not part.valid:
        raise amp.InvalidPartitionError(
            f"attraction pattern invalid, violating pair {part.violating_pair}"
        )
    if not cpl.check_p1(k, seed=inst.seed):
        raise NoPositiveDirectionError(
            "quadratic form nonpositive on the nonnegative cone"
        )
    profile = prof.solve_profile(inst.profile_config())
    candidates = amp.solve_all_supports(k, inst.p, part, seed=inst.seed)
    if not candidates:
        raise prof.NoConvergenceError("no amplitude candidates found on any support")
    sel = amp.select_minimal(candidates, profile.i1)
    return gst.assemble(profile, sel, k), sel, profile


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_profile(inst: ProblemInstance, out_dir: str) -> int:
    profile = prof.solve_profile(inst.profile_config())
    _write_profile_csv(os.path.join(out_dir, "profile.csv"), profile)
    _write_json(os.path.join(out_dir, "profile.json"), profile.summary())
    print(f"profile dim={inst.dim} p={inst.p}: q0={profile.q0!r}")
    return EXIT_OK


def cmd_amplitudes(inst: ProblemInstance, out_dir: str) -> int:
    k = inst.coupling_matrix()
    part = cpl.detect_partition(k)
    if not part.valid:
        raise amp.InvalidPartitionError(
            f"attraction pattern invalid, violating pair {part.violating_pair}"
        )
    if not cpl.check_p1(k, seed=inst.seed):
        raise NoPositiveDirectionError(
            "quadratic form nonpositive on the nonnegative cone"
        )
    candidates = amp.solve_all_supports(k, inst.p, part, seed=inst.seed)
    if not candidates:
        raise prof.NoConvergenceError("no amplitude candidates found on any support")
    sel = amp.select_minimal(candidates, 1.0)  # common profile factor cancels
    payload = sel.report()
    payload["partition"] = part.report()
    _write_json(os.path.join(out_dir, "amplitudes.json"), payload)
    print(
        f"amplitudes m={inst.m} p={inst.p}: {len(sel.candidates)} candidates, "
        f"{len(sel.winners)} winner(s), norm2={sel.winners[0].norm2!r}"
    )
    return EXIT_OK


def cmd_groundstate(inst: ProblemInstance, out_dir: str) -> int:
    gs, sel, _ = pipeline_groundstate(inst)
    payload = gs.summary()
    payload["degenerate_family"] = sel.degenerate_family
    _write_json(os.path.join(out_dir, "groundstate.json"), payload)
    print(
        f"groundstate m={inst.m} dim={inst.dim} p={inst.p}: "
        f"support={gs.amplitudes.support_indices()} action={gs.action!r}"
    )
    return EXIT_OK


def cmd_gn(inst: ProblemInstance, out_dir: str) -> int:
    gs, _, _ = pipeline_groundstate(inst)
    critical = abs(inst.p - 2.0 / inst.dim) < 1e-12
    payload = {
        "gn": gs.gn,
        "c_m": gst.gn_constant(gs),
        "critical_mass": gst.critical_mass(gs) if critical else None,
    }
    _write_json(os.path.join(out_dir, "gn.json"), payload)
    print(f"gn m={inst.m} dim={inst.dim} p={inst.p}: c_m={payload['c_m']!r}")
    return EXIT_OK


def _initial_state(inst: ProblemInstance, grid: evo.Grid) -> evo.FieldState:
    kind = inst.ev_initial
    if kind == "zero":
        return evo.FieldState(grid=grid, v=np.zeros((inst.m,) + (grid.n,) * grid.dim))
    if kind == "snapshot":
        if not inst.ev_snapshot:
            raise ConfigError("initial='snapshot' requires the snapshot path")
        return evo.read_snapshot(inst.ev_snapshot, grid.length)
    if kind == "gaussian":
        rng = np.random.default_rng(inst.seed)
        state = evo.gaussian_field(grid, inst.m, rng)
        if inst.ev_mass > 0.0:
            state = evo.rescale_mass(state, inst.ev_mass)
        return state
    gs, _, _ = pipeline_groundstate(inst)
    return evo.soliton_field(gs, grid, scale=inst.ev_scale, chirp=inst.ev_chirp)


def cmd_evolve(inst: ProblemInstance, out_dir: str, snapshot_out: str | None) -> int:
    if abs(inst.p - 2.0 / inst.dim) > 1e-12:
        raise ConfigError(
            f"evolution verdicts are defined at the critical exponent p=2/{inst.dim}"
        )
    grid = evo.Grid(dim=inst.dim, length=inst.ev_box, n=inst.ev_n)
    v0 = _initial_state(inst, grid)
    result = evo.run_dichotomy(v0, inst.coupling_matrix(), inst.p, inst.evolve_config())
    evo.write_series_csv(os.path.join(out_dir, "evolve_series.csv"), result)
    _write_json(os.path.join(out_dir, "evolve_verdict.json"), result.verdict_record())
    if snapshot_out:
        evo.write_snapshot(snapshot_out, result.snapshots[-1])
    print(f"evolve: verdict={result.verdict} t_final={float(result.times[-1])!r}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Verification suite
# ---------------------------------------------------------------------------


def _fault(item: str, value: float) -> float:
    """Perturbation hook for negative-control testing of the suite itself."""
    if os.environ.get("MNLS_FAULT") == item:
        return value + 1e-3 * max(1.0, abs(value))
    return value


class _Suite:
    def __init__(self, seed: int = 0):
        self.seed = seed
        self._profiles: dict = {}

    def profile(self, dim: int, p: float) -> prof.ScalarProfile:
        key = (dim, p)
        if key not in self._profiles:
            self._profiles[key] = prof.solve_profile(prof.ProfileConfig(dim=dim, p=p))
        return self._profiles[key]

    def groundstate(self, coupling, dim: int, p: float):
        inst = ProblemInstance(
            dim=dim,
            p=p,
            coupling=tuple(tuple(float(x) for x in row) for row in coupling),
            seed=self.seed,
        )
        return pipeline_groundstate(inst)

    # -- items ---------------------------------------------------------

    def item_profile_1d_analytic(self):
        worst = 0.0
        for p in (0.5, 1.0, 2.0, 3.0):
            pr = self.profile(1, p)
            sup = float(np.max(np.abs(pr.q - prof.closed_form_1d(p, pr.r))))
            worst = max(worst, sup)
        worst = _fault("profile-1d-analytic", worst)
        return worst < 1e-6, f"sup-norm vs closed form {worst:.3e} (tol 1e-6)"

    def item_profile_identities(self):
        worst = 0.0
        for dim, p in ((1, 1.0), (1, 3.0), (2, 0.5), (2, 1.0), (2, 1.5), (3, 1.0)):
            pr = self.profile(dim, p)
            worst = max(worst, abs(pr.i1 - pr.j1) / pr.i1, pr.pohozaev_residual)
        worst = _fault("profile-identities", worst)
        return worst < 1e-6, f"max identity residual {worst:.3e} (tol 1e-6)"

    def item_profile_spectral_oracle(self):
        worst = 0.0
        for dim, p in ((1, 1.0), (2, 0.5), (2, 1.0), (2, 1.5)):
            pr = self.profile(dim, p)
            sp = prof.petviashvili_profile(dim, p)
            worst = max(
                worst,
                abs(sp.q0 - pr.q0) / pr.q0,
                abs(sp.mass - pr.mass) / pr.mass,
            )
        worst = _fault("profile-spectral-oracle", worst)
        return worst < 1e-5, f"max dual-route disagreement {worst:.3e} (tol 1e-5)"

    def item_amplitudes_symmetric_attractive(self):
        gs, _, _ = self.groundstate([[-1.0, 2.0], [2.0, -1.0]], 1, 1.0)
        err = float(np.max(np.abs(gs.amplitudes.b - 1.0)))
        err = _fault("amplitudes-symmetric-attractive", err)
        return err < 1e-8, f"winner amplitudes vs (1,1): {err:.3e} (tol 1e-8)"

    def item_amplitudes_p1_trichotomy(self):
        pr = self.profile(1, 1.0)
        details = []
        ok = True

        def full_support(sel):
            return [w for w in sel.winners if w.support.all()]

        # mixed-diagonal band: no full-support winner
        _, sel, _ = self.groundstate([[1.0, 2.0], [2.0, 3.0]], 1, 1.0)
        ok &= not full_support(sel)
        details.append(f"between: full-support winners {len(full_support(sel))}")
        # strong cross-coupling: full-support winner on the explicit formulas
        _, sel, _ = self.groundstate([[1.0, 3.0], [3.0, 2.0]], 1, 1.0)
        w = full_support(sel)
        a_exp, b_exp = np.sqrt(1.0 / 7.0), np.sqrt(2.0 / 7.0)
        err = float(np.max(np.abs(w[0].b - (a_exp, b_exp)))) if w else np.inf
        err = _fault("amplitudes-p1-trichotomy", err)
        ok &= err < 1e-8
        details.append(f"above: formula error {err:.3e}")
        # weak cross-coupling: single-component winner
        _, sel, _ = self.groundstate([[2.0, 1.0], [1.0, 3.0]], 1, 1.0)
        ok &= all(w.support.sum() == 1 for w in sel.winners)
        details.append(f"below: winner supports {[w.support_indices() for w in sel.winners]}")
        # all-equal couplings: continuum at norm2 = 1/k11
        _, sel, _ = self.groundstate([[1.5, 1.5], [1.5, 1.5]], 1, 1.0)
        norm_err = abs(sel.winners[0].norm2 - 1.0 / 1.5)
        ok &= sel.degenerate_family and norm_err < 1e-8
        details.append(f"equal: degenerate={sel.degenerate_family} norm2 err {norm_err:.3e}")
        return bool(ok), "; ".join(details)

    def item_amplitudes_equal_diagonal(self):
        k = cpl.new_coupling(2, [[1.0, 1.0], [1.0, 1.0]])
        sols = amp.solve_on_support(k, 3.0, [0, 1], seed=self.seed)
        target = amp.oracle_symmetric(1.0, 1.0, 3.0)
        err = min(float(np.max(np.abs(s.b - target))) for s in sols) if sols else np.inf
        err = _fault("amplitudes-equal-diagonal", err)
        rep = amp.analyze_f_roots(1.0, 0.3, 0.5)
        pairing_ok = rep.count == 3 and rep.reciprocal_mismatch < 1e-8
        ok = err < 1e-8 and pairing_ok
        return ok, (
            f"equal-amplitude error {err:.3e} (tol 1e-8); "
            f"ratio roots {rep.count} with reciprocal mismatch "
            f"{rep.reciprocal_mismatch if rep.reciprocal_mismatch is not None else 'n/a'}"
        )

    def item_partition_confinement(self):
        k_rows = [[1.0, 0.5, -1.0], [0.5, 1.0, -2.0], [-1.0, -2.0, 2.0]]
        gs, sel, profile = self.groundstate(k_rows, 1, 1.0)
        k = cpl.new_coupling(3, k_rows)
        part = cpl.detect_partition(k)
        groups = [set(g) for g in part.groups]
        confined = all(
            any(set(w.support_indices()) <= g for g in groups) for w in sel.winners
        )
        trials = amp.solve_on_support(k, 1.0, [0, 2], seed=self.seed)
        margin = np.inf
        for tr in trials:
            margin = min(margin, gst.functional_i(profile, tr.b) - gs.i_val)
        margin = _fault("partition-confinement", margin)
        ok = confined and bool(trials) and margin > 0.0
        return ok, (
            f"winner confined to one group: {confined}; "
            f"cross-group trial action-margin {margin:.6f} > 0"
        )

    def item_gn_critical_constant(self):
        gs, _, _ = self.groundstate([[1.0]], 1, 2.0)
        c_m = gst.gn_constant(gs)
        err = abs(c_m - 4.0 / np.pi ** 2)
        err = _fault("gn-critical-constant", err)
        rep = gst.sample_gn_inequality(gs, n_fields=1000, seed=self.seed)
        ok = err < 1e-4 and rep.violations == 0 and rep.equality_gap < 1e-6
        return ok, (
            f"|C - 4/pi^2| = {err:.3e} (tol 1e-4); sampled {rep.n_fields} fields, "
            f"{rep.violations} violations, max ratio {rep.max_ratio:.9f}, "
            f"equality gap {rep.equality_gap:.3e}"
        )

    def item_critical_mass_identity(self):
        details = []
        worst = 0.0
        for rows, dim, p in (
            ([[1.0]], 1, 2.0),
            ([[0.0, 1.0], [1.0, 0.0]], 1, 2.0),
            ([[1.0]], 2, 1.0),
        ):
            gs, _, _ = self.groundstate(rows, dim, p)
            mq = gst.critical_mass(gs)  # raises if the identities fail
            c_m = gst.gn_constant(gs)
            ident = abs(((p + 1.0) / c_m) ** (dim / 2.0) - mq) / mq
            energy = abs(0.5 * gs.kinetic - gs.j_val / (2.0 * p + 2.0)) / gs.kinetic
            worst = max(worst, ident, energy)
            details.append(f"m={len(rows)} dim={dim}: mass={mq:.8f}")
        worst = _fault("critical-mass-identity", worst)
        return worst < 1e-6, "; ".join(details) + f"; worst residual {worst:.3e}"

    def item_evolution_conservation(self):
        gs, _, _ = self.groundstate([[0.0, 1.0], [1.0, 0.0]], 1, 2.0)
        grid = evo.Grid(dim=1, length=32.0, n=1024)
        k = gs.coupling
        state = evo.soliton_field(gs, grid)
        m0 = evo.component_masses(state)
        q_ref = np.abs(state.v[0])
        for _ in range(1000):
            state = evo.step(state, k, 2.0, 1e-3)
        drift = float(np.max(np.abs(evo.component_masses(state) - m0) / m0))
        sol_err = float(np.max(np.abs(np.abs(state.v[0]) - q_ref)))
        drifts = []
        for dt in (2e-3, 1e-3):
            st = evo.soliton_field(gs, grid, scale=0.9)
            _, t0, e0, _ = evo.diagnostics(st, k, 2.0)
            worst = 0.0
            for i in range(int(round(1.0 / dt))):
                st = evo.step(st, k, 2.0, dt)
                if (i + 1) % 25 == 0:
                    _, _, en, _ = evo.diagnostics(st, k, 2.0)
                    worst = max(worst, abs(en - e0))
            drifts.append(worst / max(abs(e0), t0))
        ratio = drifts[0] / drifts[1]
        drift = _fault("evolution-conservation", drift)
        ok = drift < 1e-10 and sol_err < 1e-4 and 3.2 <= ratio <= 4.8
        return ok, (
            f"mass drift {drift:.3e} (tol 1e-10); soliton modulus error "
            f"{sol_err:.3e} (tol 1e-4); energy-drift ratio under dt halving {ratio:.2f}"
        )

    def items(self):
        return [
            ("profile-1d-analytic", self.item_profile_1d_analytic),
            ("profile-identities", self.item_profile_identities),
            ("profile-spectral-oracle", self.item_profile_spectral_oracle),
            ("amplitudes-symmetric-attractive", self.item_amplitudes_symmetric_attractive),
            ("amplitudes-p1-trichotomy", self.item_amplitudes_p1_trichotomy),
            ("amplitudes-equal-diagonal", self.item_amplitudes_equal_diagonal),
            ("partition-confinement", self.item_partition_confinement),
            ("gn-critical-constant", self.item_gn_critical_constant),
            ("critical-mass-identity", self.item_critical_mass_identity),
            ("evolution-conservation", self.item_evolution_conservation),
        ]


def cmd_verify(seed: int, only: str | None) -> int:
    suite = _Suite(seed=seed)
    items = suite.items()
    if only:
        items = [(n, f) for n, f in items if only.lower() in n]
        if not items:
            print(f"no verify item matches {only!r}", file=sys.stderr)
            return EXIT_CONFIG
    failures = 0
    for name, fn in items:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash in an item is a failure, not an abort
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failures += 0 if ok else 1
    print(f"verify: {len(items) - failures}/{len(items)} items passed")
    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAIL


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mnls",
        description="ground states and critical dynamics of coupled NLS systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="TOML config path")
        sp.add_argument("--seed", type=int, help="override config seed")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--dim", type=int, help="override spatial dimension")
        sp.add_argument("--p", type=float, help="override nonlinearity exponent")
        sp.add_argument("--coupling", help="override coupling matrix (JSON rows)")

    sp = sub.add_parser("profile", help="solve the scalar radial profile")
    common(sp)
    sp.add_argument("--r-max", dest="r_max", type=float)
    sp.add_argument("--n-grid", dest="n_grid", type=int)

    for name, help_text in (
        ("amplitudes", "solve the amplitude system over all supports"),
        ("groundstate", "assemble the full ground state"),
        ("gn", "sharp interpolation-inequality constant"),
    ):
        sp = sub.add_parser(name, help=help_text)
        common(sp)

    sp = sub.add_parser("evolve", help="split-step evolution with dichotomy verdict")
    common(sp)
    sp.add_argument("--snapshot-out", dest="snapshot_out", help="write final field state")

    sp = sub.add_parser("verify", help="run the built-in oracle suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--only", help="run only items whose name contains this text")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "verify":
        seed = args.seed
        env_seed = os.environ.get("MNLS_SEED")
        if env_seed is not None:
            seed = int(env_seed)
        return cmd_verify(seed, args.only)
    try:
        inst = apply_overrides(instance_from_dict(load_config(args.config)), args)
        if args.command == "profile" and getattr(args, "r_max", None) is not None:
            inst = replace(inst, r_max=args.r_max)
        if args.command == "profile" and getattr(args, "n_grid", None) is not None:
            inst = replace(inst, n_grid=args.n_grid)
        _validate_instance(inst)
        inst.profile_config()  # surfaces exponent-range errors as config errors
        os.makedirs(args.out, exist_ok=True)
        if args.command == "profile":
            return cmd_profile(inst, args.out)
        if args.command == "amplitudes":
            return cmd_amplitudes(inst, args.out)
        if args.command == "groundstate":
            return cmd_groundstate(inst, args.out)
        if args.command == "gn":
            return cmd_gn(inst, args.out)
        if args.command == "evolve":
            return cmd_evolve(inst, args.out, args.snapshot_out)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, prof.SupercriticalExponentError, cpl.AsymmetricInputError,
            cpl.NonFiniteInputError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except amp.InvalidPartitionError as exc:
        print(f"partition error: {exc}", file=sys.stderr)
        return EXIT_PARTITION
    except NoPositiveDirectionError as exc:
        print(f"existence error: {exc}", file=sys.stderr)
        return EXIT_NO_P1
    except (prof.NoConvergenceError, amp.EmptyCandidatesError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
