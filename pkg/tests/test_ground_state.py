import dataclasses

import numpy as np
import pytest

import mnls
from mnls import (
    AmplitudeSolution,
    EmptySelectionError,
    NotCriticalError,
    SelectionResult,
    assemble,
    critical_mass,
    detect_partition,
    functional_i,
    gn_constant,
    new_coupling,
    pde_residual,
    petviashvili_profile,
    profile_interpolant,
    sample_gn_inequality,
    select_minimal,
    solve_all_supports,
    solve_on_support,
)
from conftest import build_groundstate


class TestAssemble:
    def test_single_component(self, profiles):
        prof = profiles(1, 1.0)
        gs, _ = build_groundstate(prof, [[1.0]])
        assert gs.mass == pytest.approx(4.0, rel=1e-8)
        assert gs.i_val == pytest.approx(prof.j1, rel=1e-6)
        assert abs(gs.i_val - gs.j_val) / gs.i_val < 1e-6

    def test_symmetric_negative_diagonal_instance(self, profiles):
        prof = profiles(1, 1.0)
        gs, _ = build_groundstate(prof, [[-1.0, 2.0], [2.0, -1.0]])
        np.testing.assert_allclose(gs.amplitudes.b, [1.0, 1.0], atol=1e-9)
        assert gs.mass == pytest.approx(2.0 * prof.mass, rel=1e-9)

    def test_action_identity(self, profiles):
        prof = profiles(1, 2.0)
        gs, _ = build_groundstate(prof, [[1.0]])
        p = prof.config.p
        assert gs.action == (0.5 - 0.5 / (p + 1.0)) * gs.i_val

    def test_degenerate_family_members_share_action(self, profiles):
        prof = profiles(1, 1.0)
        k = new_coupling(2, [[1.5, 1.5], [1.5, 1.5]])
        cands = solve_all_supports(k, 1.0, detect_partition(k))
        sel = select_minimal(cands, prof.i1)
        assert sel.degenerate_family
        actions = []
        for w in sel.winners[:6]:
            one = SelectionResult(
                winners=[w], candidates=sel.candidates,
                degenerate_family=True, objective=sel.objective,
            )
            actions.append(assemble(prof, one, k).action)
        assert np.ptp(actions) < 1e-9 * abs(actions[0])

    def test_empty_selection(self, profiles):
        sel = SelectionResult(winners=[], candidates=[], degenerate_family=False,
                              objective=0.0)
        with pytest.raises(EmptySelectionError):
            assemble(profiles(1, 1.0), sel, new_coupling(1, [[1.0]]))

    def test_winner_minimality_over_candidates(self, profiles):
        prof = profiles(1, 1.0)
        rng = np.random.default_rng(9)
        for _ in range(5):
            rows = np.abs(rng.normal(1.0, 0.5, size=(3, 3)))
            rows = 0.5 * (rows + rows.T)
            k = new_coupling(3, rows)
            cands = solve_all_supports(k, 1.0, detect_partition(k))
            sel = select_minimal(cands, prof.i1)
            gs = assemble(prof, sel, k)
            for c in cands:
                assert gs.i_val <= functional_i(prof, c.b) * (1.0 + 1e-12)


class TestPdeResidual:
    def test_symmetric_instance_default_grid(self, profiles):
        gs, _ = build_groundstate(profiles(1, 1.0), [[-1.0, 2.0], [2.0, -1.0]])
        assert pde_residual(gs) < 1e-4

    def test_second_order_in_grid_step(self):
        res = []
        for n_grid in (1025, 2049):
            prof = mnls.solve_profile(mnls.ProfileConfig(dim=1, p=1.0, n_grid=n_grid))
            gs, _ = build_groundstate(prof, [[1.0]])
            res.append(pde_residual(gs))
        assert res[0] / res[1] == pytest.approx(4.0, rel=0.3)

    def test_analytic_profile_residual(self):
        # exact closed-form profile on a dense grid: only differencing error remains
        cfg = mnls.ProfileConfig(dim=1, p=1.0, n_grid=16385)
        r = np.linspace(0.0, cfg.r_max, cfg.n_grid)
        q = mnls.closed_form_1d(1.0, r)
        qp = -np.tanh(r) * q
        prof = mnls.ScalarProfile(
            config=cfg, q0=float(q[0]), r=r, q=q, qp=qp,
            mass=0.0, kinetic=0.0, i1=0.0, j1=0.0,
        )
        prof.mass, prof.kinetic, prof.i1, prof.j1 = mnls.profile_integrals(prof)
        gs, _ = build_groundstate(prof, [[1.0]])
        assert pde_residual(gs) < 1e-6

    def test_perturbed_amplitudes_rejected(self, profiles):
        gs, _ = build_groundstate(profiles(1, 1.0), [[-1.0, 2.0], [2.0, -1.0]])
        bad = AmplitudeSolution(
            support=gs.amplitudes.support,
            b=1.1 * gs.amplitudes.b,
            residual=gs.amplitudes.residual,
            norm2=float(np.sum((1.1 * gs.amplitudes.b) ** 2)),
        )
        perturbed = dataclasses.replace(gs, amplitudes=bad)
        assert pde_residual(perturbed) > 1e-2


class TestGnConstant:
    def test_critical_1d_value(self, gs_m1_critical):
        assert gn_constant(gs_m1_critical) == pytest.approx(4.0 / np.pi ** 2, rel=1e-6)

    def test_scale_and_dilation_invariance(self, gs_m1_critical):
        # evaluate the quotient on one grid route under u -> c u and u -> u(lam x)
        gs = gs_m1_critical
        p, dim = gs.p, gs.dim
        n, box = 2048, 64.0
        h = box / n
        x = (np.arange(n) - n // 2) * h
        k2 = (2.0 * np.pi * np.fft.fftfreq(n, d=h)) ** 2
        q_of = profile_interpolant(gs.profile)
        a_exp = p + 1.0 - dim * p / 2.0
        b_exp = dim * p / 2.0

        def gn_of(c, lam):
            u = c * gs.amplitudes.b[0] * q_of(lam * np.abs(x))
            mass = np.sum(u * u) * h
            kin = np.sum(k2 * np.abs(np.fft.fft(u)) ** 2) * h / n
            j = np.sum(u ** (2.0 * p + 2.0)) * h
            return mass ** a_exp * kin ** b_exp / j

        ref = gn_of(1.0, 1.0)
        for c in (0.5, 2.0):
            assert abs(gn_of(c, 1.0) - ref) / ref < 1e-8
        for lam in (0.5, 2.0):
            assert abs(gn_of(1.0, lam) - ref) / ref < 1e-8

    def test_sampling_never_violates(self, gs_m2_critical):
        rep = sample_gn_inequality(gs_m2_critical, n_fields=200, seed=4)
        assert rep.violations == 0
        assert rep.max_ratio <= 1.0 + 1e-9
        assert rep.equality_gap < 1e-6


class TestCriticalMass:
    def test_1d_quintic_value(self, gs_m1_critical):
        assert critical_mass(gs_m1_critical) == pytest.approx(
            np.sqrt(3.0) * np.pi / 2.0, rel=1e-8
        )

    def test_townes_mass_matches_spectral_oracle(self, profiles):
        gs, _ = build_groundstate(profiles(2, 1.0), [[1.0]])
        dual = petviashvili_profile(2, 1.0)
        assert critical_mass(gs) == pytest.approx(dual.mass, rel=1e-5)

    def test_noncritical_rejected(self, profiles):
        gs, _ = build_groundstate(profiles(1, 1.0), [[1.0]])
        with pytest.raises(NotCriticalError):
            critical_mass(gs)

    def test_vector_threshold_identity(self, gs_m2_critical):
        gs = gs_m2_critical
        mq = critical_mass(gs)
        c_m = gn_constant(gs)
        assert abs(((gs.p + 1.0) / c_m) ** (gs.dim / 2.0) - mq) / mq < 1e-8


class TestSummary:
    def test_keys_and_critical_field(self, gs_m2_critical):
        s = gs_m2_critical.summary()
        assert set(s) == {
            "amplitudes", "support", "action", "i", "j", "mass", "kinetic",
            "gn", "c_m", "critical_mass", "pde_residual",
        }
        assert s["critical_mass"] == pytest.approx(gs_m2_critical.mass, rel=1e-10)

    def test_noncritical_reports_null(self, profiles):
        gs, _ = build_groundstate(profiles(1, 1.0), [[1.0]])
        assert gs.summary()["critical_mass"] is None


class TestPartitionConfinement:
    def test_cross_group_trial_has_larger_action(self, profiles):
        prof = profiles(1, 1.0)
        rows = [[1.0, 0.5, -1.0], [0.5, 1.0, -2.0], [-1.0, -2.0, 2.0]]
        gs, sel = build_groundstate(prof, rows)
        k = new_coupling(3, rows)
        part = detect_partition(k)
        groups = [set(g) for g in part.groups]
        for w in sel.winners:
            assert any(set(w.support_indices()) <= g for g in groups)
        # a positive solution mixing the two groups exists but is heavier
        trials = solve_on_support(k, 1.0, [0, 2])
        assert trials
        for tr in trials:
            assert functional_i(prof, tr.b) > gs.i_val
