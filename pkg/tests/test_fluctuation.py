import os

import numpy as np
import pytest

from breatherlab.dynamics import DIRICHLET, FieldState, energy, grid_points
from breatherlab.elliptic import fit_periodic_wave
from breatherlab.errors import ValidationError
from breatherlab.fluctuation import (
    Background,
    background_state,
    h_minus1_residual,
    hamiltonian_expansion,
    linearized_apply,
    monodromy,
    report_from_dict,
    report_to_dict,
    zero_mode_residual,
)
from breatherlab.lindstedt import (
    LindstedtSolution,
    ResonanceProblem,
    build_solution,
    pde_residual,
    solve_resonance_system,
)
from breatherlab.series import SineSeries2D, zero_series


@pytest.fixture(scope="module")
def lind_bg():
    a, w1 = solve_resonance_system(ResonanceProblem(n_modes=4, tol=1e-13))
    sol = build_solution(a, w1, 0.02, 1e-10)
    return Background(source=sol)


@pytest.fixture(scope="module")
def wave_bg():
    return Background(source=fit_periodic_wave(1.0, 0.1, 1.5, 1))


def constant_background(mass=1.0):
    sol = LindstedtSolution(
        orders=(zero_series(1, 1),), omega_corrections=(), epsilon=0.0, mass=mass
    )
    return Background(source=sol, period=2 * np.pi)


class TestHMinus1:
    def test_matches_pde_residual(self, lind_bg):
        sol = lind_bg.source
        grid_n = 48
        times = np.linspace(0.0, 2 * np.pi / sol.omega(), grid_n)
        worst = max(h_minus1_residual(lind_bg, grid_n, t) for t in times)
        assert worst == pytest.approx(pde_residual(sol, grid_n), abs=1e-12)

    def test_zero_background(self):
        assert h_minus1_residual(constant_background(), 64, 0.3) == 0.0

    def test_detects_non_solution(self, lind_bg):
        sol = lind_bg.source
        spoiled = sol.orders[0].coeffs.copy()
        spoiled[1, 0] += 0.1  # inject 0.1 sin(2x) sin(tau)
        bad = LindstedtSolution(
            orders=(SineSeries2D(spoiled),) + sol.orders[1:],
            omega_corrections=sol.omega_corrections,
            epsilon=sol.epsilon,
        )
        assert h_minus1_residual(Background(source=bad), 64, 0.4) > 0.01

    def test_wave_background_residual_small(self, wave_bg):
        for t in (0.0, 0.7, 2.1):
            assert h_minus1_residual(wave_bg, 128, t) < 1e-9


class TestHamiltonianExpansion:
    def test_h_minus2_equals_energy(self, lind_bg):
        he = hamiltonian_expansion(lind_bg, 128)
        state = background_state(lind_bg, 128, 0.0)
        assert he.h_minus2 == pytest.approx(energy(state), abs=1e-10)

    def test_h_minus1_norm_scales_with_quality(self, lind_bg):
        quarter = lind_bg.period / 4
        good = hamiltonian_expansion(lind_bg, 96, t=quarter).h_minus1_norm
        worse_bg = Background(source=build_solution(
            *solve_resonance_system(ResonanceProblem(n_modes=4, tol=1e-13)),
            0.04, 1e-10,
        ))
        worse = hamiltonian_expansion(worse_bg, 96, t=worse_bg.period / 4).h_minus1_norm
        assert 0 < good < worse

    def test_mass_term(self, lind_bg):
        quarter = lind_bg.period / 4
        he = hamiltonian_expansion(lind_bg, 64, t=quarter)
        x = grid_points(64, lind_bg.boundary)
        v0 = lind_bg.value(x, quarter)
        assert np.allclose(he.linearized_mass_term, 3 * lind_bg.epsilon * v0**2)

    def test_default_coupling_bookkeeping(self, lind_bg):
        assert lind_bg.coupling == pytest.approx(1.0 / np.sqrt(lind_bg.epsilon))


class TestLinearizedApply:
    def test_free_spectrum(self):
        bg = constant_background(mass=1.0)
        x = grid_points(129, DIRICHLET)
        for k in (1, 2, 5):
            u = np.sin(k * x)
            out = linearized_apply(bg, u, 0.0)
            assert np.max(np.abs(out - (k * k + 1.0) * u)) < 1e-10

    def test_zero_input(self, lind_bg):
        assert np.all(linearized_apply(lind_bg, np.zeros(65), 0.2) == 0.0)

    def test_quadratic_form_matches_fd_second_variation(self, lind_bg):
        grid_n = 97
        x = grid_points(grid_n, DIRICHLET)
        rng = np.random.default_rng(8)
        u = np.zeros(grid_n)
        for k in range(1, 7):
            u += rng.normal() * np.sin(k * x) / k
        v0 = lind_bg.value(x, 0.0)
        dx = 2 * np.pi / (grid_n - 1)
        w = np.full(grid_n, dx)
        w[0] *= 0.5
        w[-1] *= 0.5

        def potential_energy(phi):
            state = FieldState(
                grid_n=grid_n, boundary=DIRICHLET, phi=phi, pi=np.zeros(grid_n),
                mass=lind_bg.mass, epsilon=lind_bg.epsilon,
            )
            return energy(state)

        s = 1e-3
        vals = [potential_energy(v0 + c * s * u) for c in (-2, -1, 0, 1, 2)]
        fd = (-vals[4] + 16 * vals[3] - 30 * vals[2] + 16 * vals[1] - vals[0]) / (12 * s * s)
        quad_form = float(w @ (u * linearized_apply(lind_bg, u, 0.0)))
        assert fd == pytest.approx(quad_form, abs=1e-6)


class TestMonodromy:
    def test_free_massless_multipliers_are_unity(self):
        bg = constant_background(mass=0.0)
        report = monodromy(bg, 4, dt=1e-2)
        assert np.max(np.abs(report.multipliers - 1.0)) < 1e-8

    def test_free_massive_multipliers(self):
        bg = constant_background(mass=1.0)
        report = monodromy(bg, 8, dt=1e-2)
        assert np.max(np.abs(np.abs(report.multipliers) - 1.0)) < 1e-8
        om = np.sqrt(np.arange(1.0, 9.0) ** 2 + 1.0)
        expected = np.concatenate([np.exp(2j * np.pi * om), np.exp(-2j * np.pi * om)])
        got = np.sort_complex(report.multipliers)
        assert np.max(np.abs(got - np.sort_complex(expected))) < 1e-6

    def test_lindstedt_background_perturbs_weakly(self, lind_bg):
        eps = lind_bg.epsilon
        report = monodromy(lind_bg, 6, dt=2e-3)
        om = np.sqrt(np.arange(1.0, 7.0) ** 2)
        T = lind_bg.period
        free = np.concatenate([np.exp(1j * om * T), np.exp(-1j * om * T)])
        got = np.sort_complex(report.multipliers)
        assert np.max(np.abs(got - np.sort_complex(free))) < 10 * eps

    def test_reciprocal_pairing(self, lind_bg):
        report = monodromy(lind_bg, 6, dt=2e-3)
        for lam in report.multipliers:
            assert np.min(np.abs(report.multipliers * lam - 1.0)) < 1e-6

    def test_reciprocal_pairing_unstable_wave(self):
        # large-amplitude traveling wave with a genuine hyperbolic quadruple:
        # the report must contain both the growing and decaying partners
        bg = Background(source=fit_periodic_wave(1.0, 0.1, 2.0, 2))
        report = monodromy(bg, 4, dt=1e-3)
        mods = np.abs(report.multipliers)
        assert np.max(mods) > 1.05  # parametric instability present
        for lam in report.multipliers:
            assert np.min(np.abs(report.multipliers * lam - 1.0)) < 1e-6

    def test_thread_schedules_agree(self, lind_bg):
        sequential = monodromy(lind_bg, 5, dt=5e-3)
        os.environ["BREATHERLAB_THREADS"] = "4"
        try:
            threaded = monodromy(lind_bg, 5, dt=5e-3)
        finally:
            os.environ.pop("BREATHERLAB_THREADS")
        a = np.sort_complex(sequential.multipliers)
        b = np.sort_complex(threaded.multipliers)
        assert np.max(np.abs(a - b)) < 1e-12

    def test_mode_capacity_guard(self, lind_bg):
        with pytest.raises(ValidationError):
            monodromy(lind_bg, 40, dt=1e-2, grid_n=33)


class TestZeroModes:
    def test_wave_background_refinement(self, wave_bg):
        residuals = [zero_mode_residual(wave_bg, g)[0] for g in (64, 128, 256)]
        assert residuals[0] > residuals[1] > residuals[2]
        assert residuals[2] < 1e-4

    def test_degenerate_background(self):
        assert zero_mode_residual(constant_background(), 64) == (0.0, 0.0)

    def test_report_includes_zero_modes(self, wave_bg):
        report = monodromy(wave_bg, 4, dt=1e-3, grid_n=64)
        assert report.zero_mode_residuals[0] > 0.0
        assert report.truncation == 9  # DC + 4 cos + 4 sin


def test_report_json_round_trip(wave_bg):
    report = monodromy(wave_bg, 3, dt=5e-3, grid_n=64)
    obj = report_to_dict(report)
    assert set(obj) == {"multipliers", "zero_mode", "n_modes"}
    back = report_from_dict(obj)
    assert np.allclose(back.multipliers, report.multipliers)
    assert back.truncation == report.truncation
