import math

import numpy as np
import pytest

from securebackscatter import DomainError
from securebackscatter.model import ChannelRealization, ControlVariables, SystemConfig, secrecy_rate
from securebackscatter.solver import (
    DegenerateMultiplier,
    DualState,
    closed_form_alpha,
    closed_form_omega,
    dual_update,
    endpoint_oracle,
    grid_oracle,
    lattice_cell_variation,
    pi_coefficients,
    solve_dual,
)

from conftest import random_channels

LOG2_5_5 = math.log2(11) - math.log2(2)


def test_pi_coefficients(ref_channel, unit_cfg):
    pi1, pi2, pi3 = pi_coefficients(ref_channel, unit_cfg)
    assert pi1 == pytest.approx(20.0)
    assert pi2 == pytest.approx(112.0)
    # h_k g_b s2 - h_n g_b^2 p - h_n g_b s2 = 0.2 - 10 - 1
    assert pi3 == pytest.approx(-10.8)


def test_pi1_vanishes_without_eavesdropper_backscatter(unit_cfg):
    ch = ChannelRealization(1.0, 0.3, 1.0, 1.0, 0.4, ((0.1, 0.0),))
    assert pi_coefficients(ch, unit_cfg)[0] == 0.0


class TestClosedFormAlpha:
    def test_zero_multiplier_is_signalled(self, ref_channel, unit_cfg):
        with pytest.raises(DegenerateMultiplier):
            closed_form_alpha(ref_channel, unit_cfg, DualState(zeta=0.0))

    def test_no_legit_link_picks_zero(self, unit_cfg):
        ch = ChannelRealization(1.0, 0.3, 1.0, 0.0, 0.4, ((0.1, 0.2),))
        for zeta in (1e-3, 0.5, 1.0, 10.0):
            assert closed_form_alpha(ch, unit_cfg, DualState(zeta=zeta)) == 0.0

    def test_negative_discriminant_falls_back_to_boundary(self, unit_cfg):
        # small positive pi3 with a tiny zeta makes the constant term dominate
        ch = ChannelRealization(1.0, 0.3, 1.0, 0.01, 0.4, ((0.0, 5.0),))
        pi1, pi2, pi3 = pi_coefficients(ch, unit_cfg)
        zeta = 1e-3
        const = ch.g_b**2 * unit_cfg.p * unit_cfg.sigma2 + unit_cfg.p * pi3 / zeta
        assert pi2**2 - 4 * pi1 * const < 0
        assert closed_form_alpha(ch, unit_cfg, DualState(zeta=zeta)) in (0.0, 1.0)

    def test_result_in_unit_interval(self, rng):
        cfg = SystemConfig(k_eds=5)
        for ch in random_channels(rng, 300):
            zeta = float(rng.exponential(1.0)) + 1e-6
            assert 0.0 <= closed_form_alpha(ch, cfg, DualState(zeta=zeta)) <= 1.0

    def test_iterated_step_reaches_grid_alpha(self, ref_channel, unit_cfg):
        res = solve_dual(ref_channel, unit_cfg)
        grid = grid_oracle(ref_channel, unit_cfg)
        assert abs(res.controls.alpha - grid.controls.alpha) <= 0.05


class TestClosedFormOmega:
    def test_literal_value(self, ref_channel, unit_cfg):
        # (1.2 * 1 * 0.25 * 1 * 1000 * 0.2 * 0.1) / (1e4 * 10)
        raw = closed_form_omega(ref_channel, unit_cfg, 0.5, DualState(lam=1e4), clamp=False)
        assert raw == pytest.approx(6e-5, rel=1e-12)
        assert closed_form_omega(ref_channel, unit_cfg, 0.5, DualState(lam=1e4)) == pytest.approx(6e-5)

    def test_zero_eavesdropper_gain_hits_floor(self, unit_cfg):
        ch = ChannelRealization(1.0, 0.3, 1.0, 1.0, 0.4, ((0.1, 0.0),))
        assert closed_form_omega(ch, unit_cfg, 0.5, DualState(lam=1.0)) == 1e-9

    def test_clamped_range(self, rng):
        cfg = SystemConfig(k_eds=5)
        for ch in random_channels(rng, 300):
            lam = float(rng.exponential(1.0)) + 1e-9
            w = closed_form_omega(ch, cfg, float(rng.uniform()), DualState(lam=lam))
            assert 0.0 < w <= 0.5

    def test_zero_multiplier_is_signalled(self, ref_channel, unit_cfg):
        with pytest.raises(DegenerateMultiplier):
            closed_form_omega(ref_channel, unit_cfg, 0.5, DualState(lam=0.0))


class TestDualUpdate:
    def test_zero_subgradient(self, unit_cfg):
        new = dual_update(DualState(zeta=1.0, lam=1.0, step=0.1), 1.0, 0.5, unit_cfg)
        assert new.zeta == 1.0 and new.lam == 1.0

    def test_projection(self, unit_cfg):
        new = dual_update(DualState(zeta=0.05, step=0.1), 0.0, 0.25, unit_cfg)
        assert new.zeta == 0.0

    def test_lambda_step(self, unit_cfg):
        new = dual_update(DualState(lam=2.0, step=0.1), 0.5, 0.25, unit_cfg)
        assert new.lam == pytest.approx(1.5)

    def test_schedule(self, unit_cfg):
        cfg = unit_cfg.with_updates(step0=0.1)
        state = DualState(step=0.1)
        for j in range(2, 10):
            state = dual_update(state, 0.5, 0.25, cfg)
            assert state.iter == j
            assert state.step == pytest.approx(0.1 / math.sqrt(j))


class TestSolveDual:
    def test_reference_instance(self, ref_channel, unit_cfg):
        res = solve_dual(ref_channel, unit_cfg)
        assert res.controls.alpha == 1.0
        assert res.secrecy == pytest.approx(LOG2_5_5, abs=1e-12)
        assert res.iterations <= unit_cfg.max_iters

    def test_eavesdropper_dominates(self, unit_cfg):
        ch = ChannelRealization(1.0, 0.3, 1.0, 0.1, 0.4, ((0.0, 1.0),))
        res = solve_dual(ch, unit_cfg)
        assert res.secrecy == 0.0 and res.controls.alpha == 0.0

    def test_iteration_budget(self, rng):
        cfg = SystemConfig(k_eds=5)
        its = [solve_dual(ch, cfg).iterations for ch in random_channels(rng, 1000)]
        assert np.mean(np.array(its) <= 50) >= 0.95

    def test_agrees_with_oracles(self, rng):
        cfg = SystemConfig(k_eds=5)
        for ch in random_channels(rng, 100):
            res = solve_dual(ch, cfg)
            assert abs(res.secrecy - grid_oracle(ch, cfg).secrecy) <= 1e-3
            assert res.secrecy <= endpoint_oracle(ch, cfg).secrecy + 1e-9

    def test_trace_invariants(self, rng):
        cfg = SystemConfig(k_eds=5)
        for ch in random_channels(rng, 200):
            res = solve_dual(ch, cfg)
            assert len(res.trace) == res.iterations <= cfg.max_iters
            best = [row.best for row in res.trace]
            assert all(b2 >= b1 for b1, b2 in zip(best, best[1:]))
            assert all(row.zeta >= 0 and row.lam >= 0 for row in res.trace)
            assert 0 <= res.controls.alpha <= 1 and 0 < res.controls.omega <= 0.5

    def test_nonconvergence_keeps_best(self, ref_channel, unit_cfg):
        res = solve_dual(ref_channel, unit_cfg.with_updates(max_iters=2))
        assert not res.converged and res.iterations == 2
        assert res.secrecy == pytest.approx(max(r.best for r in res.trace), abs=1e-12)

    def test_final_secrecy_from_model(self, ref_channel, unit_cfg):
        res = solve_dual(ref_channel, unit_cfg)
        assert res.secrecy == secrecy_rate(ref_channel, unit_cfg, res.controls)


class TestOracles:
    def test_grid_reference(self, ref_channel, unit_cfg):
        res = grid_oracle(ref_channel, unit_cfg)
        assert res.controls.alpha == 1.0
        assert res.secrecy == pytest.approx(LOG2_5_5, abs=1e-12)

    def test_grid_no_legit_link(self, unit_cfg):
        ch = ChannelRealization(1.0, 0.3, 1.0, 0.0, 0.4, ((0.1, 0.2),))
        res = grid_oracle(ch, unit_cfg)
        assert res.secrecy == 0.0
        # first-index tie-breaking
        assert res.controls.alpha == 0.0 and res.controls.omega == 1e-9

    @pytest.mark.parametrize("n", [0, 1])
    def test_grid_size_domain(self, ref_channel, unit_cfg, n):
        with pytest.raises(DomainError):
            grid_oracle(ref_channel, unit_cfg, n_alpha=n)
        with pytest.raises(DomainError):
            grid_oracle(ref_channel, unit_cfg, n_omega=n)

    def test_endpoint_reference(self, ref_channel, unit_cfg):
        res = endpoint_oracle(ref_channel, unit_cfg)
        assert res.controls == ControlVariables(1.0, 0.5)
        assert res.secrecy == pytest.approx(2.4594316186372973, abs=1e-12)

    def test_endpoint_tie(self, unit_cfg):
        # a = 10 * h_n, b = 10 * h_k / (10 g_k + 1) -> equal for h_n = 0.1, h_k = 0.2, g_k = 0.1
        ch = ChannelRealization(1.0, 0.3, 1.0, 0.1, 0.4, ((0.1, 0.2),))
        res = endpoint_oracle(ch, unit_cfg)
        assert res.secrecy == 0.0

    def test_endpoint_matches_grid(self, rng):
        cfg = SystemConfig(k_eds=5)
        for ch in random_channels(rng, 1000):
            grid = grid_oracle(ch, cfg, 21, 3)
            end = endpoint_oracle(ch, cfg)
            assert abs(grid.secrecy - end.secrecy) <= lattice_cell_variation(ch, cfg, 21) + 1e-12
