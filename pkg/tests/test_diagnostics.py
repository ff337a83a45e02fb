import numpy as np
import pytest

from wavemap.config import RunConfig
from wavemap.diagnostics import (accumulate_correction, energy_correction_rate,
                                 lightcone_energies, max_norms,
                                 origin_deviation, rescaled_profile,
                                 scaling_function, total_energy)
from wavemap.grid import Domain, INTERIOR, build_grid
from wavemap.integrate import evolve
from wavemap.model import (InitialDataParams, initial_state, static_solution,
                           static_w)


class TestMaxNorms:
    def test_static_solution_norms(self):
        g = build_grid(Domain.FULL, 41)
        phi_max, psi_max = max_norms(static_solution(g))
        assert phi_max <= 1e-14
        assert psi_max == 0.0

    def test_initial_state_norms(self):
        g = build_grid(Domain.QUARTER, 81)
        phi_max, psi_max = max_norms(initial_state(InitialDataParams(0.4), g))
        assert phi_max <= 1e-14 and psi_max <= 1e-14

    def test_single_node_perturbation(self):
        g = build_grid(Domain.FULL, 41)
        s = initial_state(InitialDataParams(0.0), g)
        s.w.values[10, 10] += 0.1
        phi_max, _ = max_norms(s)
        assert phi_max == pytest.approx(0.21, abs=1e-12)


class TestOriginDeviation:
    def test_initial_state_zero(self):
        g = build_grid(Domain.FULL, 41)
        assert origin_deviation(initial_state(InitialDataParams(0.7), g), g) == 0.0

    def test_flipped_origin(self):
        g = build_grid(Domain.QUARTER, 41)
        s = initial_state(InitialDataParams(0.0), g)
        j, k = g.origin_index()
        s.w.values[j, k] = -1.0
        assert origin_deviation(s, g) == 2.0


class TestTotalEnergy:
    def test_constant_map_zero(self):
        g = build_grid(Domain.FULL, 41)
        assert total_energy(initial_state(InitialDataParams(0.0), g), g) == 0.0

    def test_independent_of_multiplier_when_on_constraint(self):
        # phi = 0 kills the -lambda*phi term: dropping it changes nothing
        g = build_grid(Domain.FULL, 81)
        s = initial_state(InitialDataParams(0.5), g)
        e_with = total_energy(s, g, include_constraint_term=True)
        e_without = total_energy(s, g, include_constraint_term=False)
        assert e_with == pytest.approx(e_without, rel=1e-12)

    def test_quarter_domain_matches_full(self):
        ef = total_energy(initial_state(InitialDataParams(0.4),
                                        build_grid(Domain.FULL, 161)),
                          build_grid(Domain.FULL, 161))
        eq = total_energy(initial_state(InitialDataParams(0.4),
                                        build_grid(Domain.QUARTER, 81)),
                          build_grid(Domain.QUARTER, 81))
        assert eq == pytest.approx(ef, rel=1e-4)


class TestEnergyCorrection:
    def test_zero_velocity_rate_vanishes(self):
        g = build_grid(Domain.FULL, 41)
        assert energy_correction_rate(static_solution(g), g) == 0.0

    def test_accumulation_arithmetic(self):
        assert accumulate_correction(0.0, 0.0, 0.0, 0.1) == 0.0
        assert accumulate_correction(0.0, 1.0, 1.0, 0.1) == pytest.approx(0.1)
        assert accumulate_correction(0.5, 1.0, 3.0, 0.1) == pytest.approx(0.7)

    def test_rattle_rate_bounded_by_constraint_tolerance(self):
        cfg = RunConfig(amplitude=0.4, grid_n=41, method="rattle", t_end=0.2)
        g = cfg.build_grid()
        rec = evolve(cfg, g)
        from wavemap.model import lambda_field
        lam_max = np.abs(lambda_field(rec.final_state, g).interior).max()
        rate = abs(energy_correction_rate(rec.final_state, g))
        psi_max = max_norms(rec.final_state)[1]
        assert rate <= 4.0 * lam_max * psi_max * 1.01 + 1e-30

    def test_energy_balance_matches_correction_for_rk4(self):
        # |[E(t2)-E(t1)] - dE| shrinks at >= 2nd order under refinement
        resid = []
        for n in (41, 81):
            cfg = RunConfig(amplitude=0.4, grid_n=n, method="rk4", t_end=0.4)
            rec = evolve(cfg, cfg.build_grid())
            e0, e1 = rec.samples[0].energy, rec.samples[-1].energy
            resid.append(abs((e1 - e0) - rec.samples[-1].delta_e))
        order = np.log2(resid[0] / resid[1])
        assert order >= 1.7


class TestScalingFunction:
    def test_static_solution_gives_one(self):
        g = build_grid(Domain.FULL, 161)
        assert scaling_function(static_solution(g), g) == pytest.approx(1.0, abs=1e-4)

    def test_synthetic_parabolic_profile(self):
        # w = 1 - 8 r^2 near the origin -> d_rr = -16, s = 0.5
        g = build_grid(Domain.QUARTER, 41)
        s = initial_state(InitialDataParams(0.0), g)
        X, Y = g.mesh()
        s.w.values[INTERIOR, INTERIOR] = 1.0 - 8.0 * (X ** 2 + Y ** 2)
        assert scaling_function(s, g) == pytest.approx(0.5, abs=1e-12)

    def test_undefined_for_flat_profile(self):
        g = build_grid(Domain.FULL, 41)
        assert scaling_function(initial_state(InitialDataParams(0.0), g), g) is None

    def test_rescaling_covariance(self):
        # squeezing the profile by k rescales s by 1/k
        g = build_grid(Domain.QUARTER, 81)
        X, Y = g.mesh()
        r2 = X ** 2 + Y ** 2
        s_a = initial_state(InitialDataParams(0.0), g)
        s_a.w.values[INTERIOR, INTERIOR] = 1.0 - 2.0 * r2
        s_b = initial_state(InitialDataParams(0.0), g)
        k = 2.0
        s_b.w.values[INTERIOR, INTERIOR] = 1.0 - 2.0 * k ** 2 * r2
        sa = scaling_function(s_a, g)
        sb = scaling_function(s_b, g)
        assert sb == pytest.approx(sa / k, rel=1e-12)


class TestRescaledProfile:
    def test_static_profile_round_trip(self):
        g = build_grid(Domain.QUARTER, 161)
        s = static_solution(g)
        radii = np.linspace(0.0, 0.9, 10)
        prof = rescaled_profile(s, g, 1.0, radii)
        for r, w_dyn, w_stat in prof:
            assert w_stat == pytest.approx(static_w(r), abs=1e-15)
            assert w_dyn == pytest.approx(w_stat, abs=1e-6)

    def test_zero_radius_returns_origin_value(self):
        g = build_grid(Domain.QUARTER, 41)
        s = static_solution(g)
        (_, w_dyn, _), = rescaled_profile(s, g, 3.0, [0.0])
        j, k = g.origin_index()
        assert w_dyn == pytest.approx(float(s.w.values[j, k]), abs=1e-14)

    def test_out_of_range_radius_rejected(self):
        g = build_grid(Domain.QUARTER, 41)
        s = static_solution(g)
        with pytest.raises(ValueError):
            rescaled_profile(s, g, 2.0, [0.6])


class TestLightconeEnergies:
    def test_static_disk_energy_closed_form(self):
        # pi * int_0^1 8r/(1+r^2)^2 dr = 2 pi
        g = build_grid(Domain.FULL, 321)
        e_kin, e_pot = lightcone_energies(static_solution(g), g, 1.0)
        assert e_kin == 0.0
        assert e_pot == pytest.approx(2 * np.pi, rel=1e-3)

    def test_zero_velocity_state_has_no_kinetic_energy(self):
        g = build_grid(Domain.QUARTER, 41)
        e_kin, _ = lightcone_energies(static_solution(g), g, 0.5)
        assert e_kin == 0.0

    def test_bounded_by_total_energy(self):
        g = build_grid(Domain.FULL, 81)
        s = initial_state(InitialDataParams(0.4), g)
        e_kin, e_pot = lightcone_energies(s, g, 1.0)
        assert e_kin + e_pot <= total_energy(s, g) * (1 + 1e-12)
