"""Green-function solver: self-energies, Dyson inversion, integration,
occupations and currents."""

import numpy as np
import pytest

from qzeno.config import SweepConfig
from qzeno.keldysh import (AccuracyError, FrequencyGrid, greens, integrate,
                           lead_self_energy, loss_current, markov_self_energy,
                           occupation, lead_current, solve_transport,
                           thermal_sign)
from qzeno.lindblad import quadratic_steady_state
from qzeno.model import EffectiveModel
from qzeno.sweep import model_for_point

CFG = SweepConfig()


def make_model(gamma=1.0, e_nh=1.0, delta_mu=0.0, **kw):
    m = model_for_point(CFG, gamma, e_nh, delta_mu)
    if kw:
        m = EffectiveModel(**{**m.__dict__, **kw})
    return m


class TestSelfEnergies:
    def test_lead_at_mu(self):
        sR, sK = lead_self_energy(0.25, 0.3, 0.1, 0.3)
        assert sK == 0.0
        assert sR == -0.25j

    def test_lead_filled_side_zero_T(self):
        _, sK = lead_self_energy(0.25, 0.5, 0.0, -1.0)
        assert sK == 2j * 0.25

    def test_lead_from_half_hopping(self):
        # t = 1/2 with 2 v_F = 1 gives Gamma = 0.25
        Gamma = abs(0.5) ** 2 / 1.0
        sR, _ = lead_self_energy(Gamma, 0.0, 0.1, 0.0)
        assert sR == -0.25j

    def test_markov_reciprocal(self):
        assert markov_self_energy(1.0, 1.0) == (-1j, -2j)

    def test_markov_enhanced(self):
        sR, sK = markov_self_energy(1.0, 2.0)
        assert (sR, sK) == (-2j, -4j)

    def test_markov_never_injects(self):
        for (g5, enh) in ((1.0, 1.0), (0.7, 3.5), (2.0, 1.2)):
            sR, sK = markov_self_energy(g5, enh)
            lesser = 0.5 * (sK - sR + np.conj(sR))
            assert lesser == 0.0

    def test_markov_domain_errors(self):
        with pytest.raises(ValueError):
            markov_self_energy(1.0, 0.9)
        with pytest.raises(ValueError):
            markov_self_energy(0.0, 1.5)

    def test_thermal_sign_zero_T(self):
        assert thermal_sign(1.0, 0.5, 0.0) == 1.0
        assert thermal_sign(0.0, 0.5, 0.0) == -1.0


class TestGreens:
    def test_decoupled_site_with_lead(self):
        # drive bond off: site g is a lone level with one lead
        m = make_model(gamma=1e-12, e_nh=1.0)
        m = EffectiveModel(**{**m.__dict__, "t_eg_eff": 0.0,
                              "Gamma_L": 0.4, "Gamma_R": 0.0})
        GR, _ = greens(0.0, m)
        assert GR[0, 0] == pytest.approx(-1j / 0.4, abs=1e-14)
        assert GR[0, 1] == 0.0 and GR[0, 2] == 0.0

    def test_advanced_is_dagger(self):
        m = make_model(gamma=2.3, e_nh=2.0, delta_mu=1.0)
        for w in (-2.0, 0.0, 0.9):
            GR, GK = greens(w, m)
            GA = np.linalg.inv(w * np.eye(3) - m.hamiltonian()
                               - 1j * np.diag(m.site_widths()))
            assert np.max(np.abs(GA - GR.conj().T)) <= 1e-14

    def test_keldysh_antihermitian(self):
        m = make_model(gamma=1.0, e_nh=1.5, delta_mu=4.0)
        _, GK = greens(0.3, m)
        assert np.max(np.abs(GK + GK.conj().T)) <= 1e-14

    def test_double_counting_guard(self):
        m = make_model()
        bad = EffectiveModel(**{**m.__dict__, "eps_5_eff": complex(0.0, -0.123)})
        with pytest.raises(ValueError, match="double counted"):
            greens(0.0, bad)


class TestIntegrate:
    def test_normalized_lorentzian(self):
        grid = FrequencyGrid(features=(0.0,), widths=(0.3,), tol=1e-10,
                             map_scale=1.0)
        val, err = integrate(lambda w: (0.3 / np.pi) / (w ** 2 + 0.09), grid)
        assert val == pytest.approx(1.0, abs=1e-6)
        assert err <= 1e-9

    def test_odd_function(self):
        grid = FrequencyGrid(features=(0.0,), widths=(1.0,), tol=1e-12,
                             map_scale=1.0)
        val, _ = integrate(lambda w: w * np.exp(-(w ** 2)), grid)
        assert abs(val) <= 1e-12

    def test_against_bruteforce_trapezoid(self):
        grid = FrequencyGrid(features=(0.1, 0.2), widths=(0.5, 0.4),
                             tol=1e-10, map_scale=1.0)

        def f(w):
            return (np.tanh((w - 0.2) / 0.4) * (0.5 / np.pi)
                    / ((w - 0.1) ** 2 + 0.25))

        W = 60.0
        wgrid = np.linspace(-W, W, 262144)
        ref = np.trapezoid(f(wgrid), wgrid)
        ref += (0.5 / np.pi) / 0.5 * (
            (np.pi / 2 - np.arctan((W - 0.1) / 0.5))
            - (np.pi / 2 - np.arctan((W + 0.1) / 0.5)))
        val, _ = integrate(f, grid)
        assert val == pytest.approx(ref, abs=1e-8)

    def test_vector_integrand(self):
        grid = FrequencyGrid(features=(0.0,), widths=(0.5,), tol=1e-10,
                             map_scale=1.0)

        def f(w):
            lor = (0.5 / np.pi) / (w ** 2 + 0.25)
            return np.stack([lor, 2.0 * lor], axis=1)

        val, _ = integrate(f, grid)
        assert val[0] == pytest.approx(1.0, abs=1e-8)
        assert val[1] == pytest.approx(2.0, abs=1e-8)

    def test_unresolvable_feature_raises(self):
        # a discontinuity far from every seeded edge exhausts the splits
        grid = FrequencyGrid(features=(0.0,), widths=(1e-4,), tol=1e-12,
                             map_scale=1.0, max_depth=3)
        with pytest.raises(AccuracyError, match="stalled"):
            integrate(lambda w: np.sign(w - 0.7183) / (1.0 + w ** 2), grid)

    def test_window_invariant(self):
        m = make_model(gamma=100.0, e_nh=2.0, delta_mu=4.0)
        grid = FrequencyGrid.for_model(m)
        scale = max(np.max(np.abs(np.linalg.eigvalsh(m.hamiltonian()))),
                    np.max(m.site_widths()), abs(m.mu_L), m.T)
        assert grid.window >= 10.0 * scale


class TestOccupations:
    def test_saturated_lead(self):
        m = make_model(gamma=1e-10)
        m = EffectiveModel(**{**m.__dict__, "t_eg_eff": 0.0, "t_e5_eff": 0.0,
                              "Gamma_L": 0.3, "Gamma_R": 0.0,
                              "mu_L": 1e5, "mu_R": 0.0})
        assert occupation(m, "g") == pytest.approx(1.0, abs=1e-4)

    def test_lorentzian_filling_analytic(self):
        Gam, eps0 = 0.37, 0.25
        for mu in (-2.0, -0.5, 0.25, 1.0, 3.0):
            m = make_model()
            m = EffectiveModel(**{**m.__dict__,
                                  "eps_g_eff": eps0, "t_eg_eff": 0.0,
                                  "t_e5_eff": 0.0, "Gamma_L": Gam,
                                  "Gamma_R": 0.0, "mu_L": mu, "mu_R": 0.0,
                                  "T": 0.0})
            exact = 0.5 + np.arctan((mu - eps0) / Gam) / np.pi
            assert occupation(m, "g") == pytest.approx(exact, abs=1e-6)

    def test_half_filling_symmetric_point(self):
        m = make_model(gamma=1e-12, delta_mu=0.0)
        assert occupation(m, "g") == pytest.approx(0.5, abs=1e-6)

    def test_disconnected_empty_site(self):
        m = make_model()
        m = EffectiveModel(**{**m.__dict__, "t_eg_eff": 0.0, "t_e5_eff": 0.0})
        assert abs(occupation(m, "5")) <= 1e-10

    def test_sum_rules(self):
        res = solve_transport(make_model(gamma=3.0, e_nh=2.0, delta_mu=4.0))
        assert np.max(np.abs(res.sum_rules - 1.0)) <= 1e-3


class TestCurrents:
    def test_equilibrium_no_flow(self):
        m = make_model(gamma=1e-14, delta_mu=0.0)
        assert abs(lead_current(m, "L")) <= 1e-12
        assert abs(lead_current(m, "R")) <= 1e-12

    def test_mirror_symmetry(self):
        res = solve_transport(make_model(gamma=2.0, e_nh=1.5, delta_mu=0.0))
        assert res.I_L == pytest.approx(res.I_R, abs=1e-8)

    def test_continuity_at_caption_point(self):
        res = solve_transport(make_model(gamma=1.0, e_nh=2.0, delta_mu=1.0))
        assert abs(res.continuity_residual) <= 1e-8 * max(1.0, res.I_loss)

    def test_loss_zero_without_drive(self):
        assert abs(loss_current(make_model(gamma=1e-14))) <= 1e-12

    def test_loss_against_quadratic_oracle(self):
        # flat-occupation leads at e_nh = 1: the polynomial-size oracle
        # fixes both the occupations and the drain current
        m = make_model(gamma=0.64, e_nh=1.0)
        m = EffectiveModel(**{**m.__dict__, "lead_occ_L": 0.9,
                              "lead_occ_R": 0.25})
        h = m.hamiltonian()
        loss = np.array([2 * m.Gamma_L * 0.1 + 2 * m.Gamma_R * 0.75, 0.0,
                         2 * m.Gamma_5])
        gain = np.array([2 * m.Gamma_L * 0.9 + 2 * m.Gamma_R * 0.25, 0.0, 0.0])
        C = quadratic_steady_state(h, loss, gain)
        res = solve_transport(m)
        assert res.I_loss == pytest.approx(2 * m.Gamma_5 * C[2, 2].real,
                                           abs=1e-6)
        assert np.max(np.abs(res.occupations - np.diag(C).real)) <= 1e-6

    def test_rise_then_fall(self):
        lo = loss_current(make_model(gamma=1e-3, e_nh=2.0))
        mid = loss_current(make_model(gamma=1.5, e_nh=2.0))
        hi = loss_current(make_model(gamma=1e3, e_nh=2.0))
        assert lo < mid and hi < mid


class TestNetworkInvariants:
    def test_continuity_randomized(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            g = 10 ** rng.uniform(-3, 3)
            enh = float(rng.choice([1.0, 1.5, 2.0, 4.0]))
            dmu = float(rng.choice([0.0, 1.0, 4.0, 1000.0]))
            res = solve_transport(make_model(g, enh, dmu))
            assert (abs(res.continuity_residual)
                    <= 1e-8 * max(1.0, abs(res.I_loss)))
            assert res.I_loss >= 0.0

    def test_bias_collapse_reciprocal(self):
        gammas = np.logspace(-3, 3, 7)
        base = np.array([loss_current(make_model(g, 1.0, 0.0))
                         for g in gammas])
        for dmu in (1.0, 4.0):
            cur = np.array([loss_current(make_model(g, 1.0, dmu))
                            for g in gammas])
            assert np.max(np.abs(cur - base) / np.abs(base)) <= 1e-6

    def test_small_drive_monotone(self):
        gammas = np.logspace(-3, 0, 7)
        cur = [loss_current(make_model(g, 2.0, 1.0)) for g in gammas]
        assert all(b > a for a, b in zip(cur, cur[1:]))

    def test_grid_refinement_stability(self):
        # insensitive to the panel layout: different base orders agree
        m = make_model(gamma=2.7, e_nh=4.0, delta_mu=4.0)
        g1 = FrequencyGrid.for_model(m, tol=1e-9)
        g2 = FrequencyGrid(**{**g1.__dict__, "base_nodes": 24})
        r1 = solve_transport(m, grid=g1)
        r2 = solve_transport(m, grid=g2)
        assert abs(r1.I_loss - r2.I_loss) <= 1e-9
        assert np.max(np.abs(r1.occupations - r2.occupations)) <= 1e-9
