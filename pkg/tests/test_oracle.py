import numpy as np
import pytest

from faberelast import (
    ExteriorMap,
    FarFieldLoading,
    ProximityError,
    QuadratureRule,
    boundary_nodes,
    build_faber,
    cauchy_operator,
    density_mode,
    density_on_boundary,
    equilibrium_residual,
    eval_faber,
    eval_ftilde,
    kelvin_single_layer,
    log_operator,
    single_layer_interior,
    solve_full,
    transmission_residual,
)
from faberelast.solver import DensitySolution
from util import FIG_MATERIAL, random_univalent_map, solved_figure


class TestRule:
    def test_accepts_powers_of_two(self):
        rule = QuadratureRule(256)
        assert len(rule.theta) == 256
        assert abs(rule.weight * 256 - 2.0 * np.pi) < 1e-15

    def test_rejects_bad_counts(self):
        with pytest.raises(ValueError):
            QuadratureRule(100)
        with pytest.raises(ValueError):
            QuadratureRule(32)


class TestKelvin:
    def test_zero_density(self):
        mp = ExteriorMap((0.0, 0.2))
        rule = QuadratureRule(256)
        out = kelvin_single_layer(
            np.zeros(256, dtype=complex), mp, FIG_MATERIAL, 2.0 + 0.0j, rule
        )
        assert out == 0.0

    def test_proximity_error(self):
        mp = ExteriorMap(())
        rule = QuadratureRule(256)
        with pytest.raises(ProximityError):
            kelvin_single_layer(
                np.ones(256, dtype=complex), mp, FIG_MATERIAL, 1.01 + 0.0j, rule
            )

    def test_disk_mode_at_origin(self):
        mp = ExteriorMap(())
        table = build_faber(mp, 6)
        sol = DensitySolution(
            s=np.zeros(3, dtype=complex),
            t=np.array([1.0, 0.0, 0.0], dtype=complex),
            c1=0.0,
            c2=0.0,
            c3=0.0,
            order=3,
        )
        rule = QuadratureRule(2048)
        phi = density_on_boundary(sol, mp, rule.theta)
        quad = kelvin_single_layer(phi, mp, FIG_MATERIAL, 0.0 + 0.0j, rule)
        series = single_layer_interior(sol, table, mp, FIG_MATERIAL, 0.0 + 0.0j)
        assert abs(quad - series) < 1e-8

    def test_fig1_random_points(self):
        mapping, mat, loading, table, sol = solved_figure("fig1")
        rule = QuadratureRule(2048)
        phi = density_on_boundary(sol, mapping, rule.theta)
        rng = np.random.default_rng(0)
        for _ in range(10):
            if rng.random() < 0.5:
                z = 0.4 * rng.random() * np.exp(1j * rng.uniform(0, 2 * np.pi))
                series = single_layer_interior(sol, table, mapping, mat, complex(z))
            else:
                w = rng.uniform(1.3, 3.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
                z = complex(mapping.eval(w))
                from faberelast import single_layer_exterior

                series = single_layer_exterior(sol, table, mapping, mat, w)
            quad = kelvin_single_layer(phi, mapping, mat, complex(z), rule)
            assert abs(series - quad) < 1e-6


class TestCauchyOperator:
    def test_positive_mode_interior(self):
        rng = np.random.default_rng(1)
        mp = random_univalent_map(rng, 3)
        table = build_faber(mp, 16)
        rule = QuadratureRule(2048)
        z = complex(mp.boundary_point(np.linspace(0, 2 * np.pi, 64)).mean())
        for m in (1, 2, 5):
            got = cauchy_operator(density_mode(mp, m, rule), mp, z, rule)
            assert abs(got + eval_ftilde(table, m, z)) < 1e-8

    def test_negative_mode_interior_vanishes(self):
        rng = np.random.default_rng(2)
        mp = random_univalent_map(rng, 2)
        rule = QuadratureRule(2048)
        z = complex(mp.boundary_point(np.linspace(0, 2 * np.pi, 64)).mean())
        for m in (1, 3):
            got = cauchy_operator(density_mode(mp, -m, rule), mp, z, rule)
            assert abs(got) < 1e-8

    def test_negative_mode_exterior(self):
        rng = np.random.default_rng(3)
        mp = random_univalent_map(rng, 3)
        rule = QuadratureRule(2048)
        w = 1.6 * np.exp(0.9j)
        z = complex(mp.eval(w))
        for m in (1, 2, 4):
            got = cauchy_operator(density_mode(mp, -m, rule), mp, z, rule)
            expected = w ** (-m - 1) / mp.derivative(w)
            assert abs(got - expected) < 1e-8

    def test_conjugated_weight_interior(self):
        rng = np.random.default_rng(4)
        mp = random_univalent_map(rng, 3)
        table = build_faber(mp, 16)
        rule = QuadratureRule(2048)
        zeta, _ = boundary_nodes(mp, rule)
        z = complex(mp.boundary_point(np.linspace(0, 2 * np.pi, 64)).mean())
        for m in (1, 2):
            samples = np.conj(zeta) * density_mode(mp, m, rule)
            got = cauchy_operator(samples, mp, z, rule)
            expected = -sum(
                np.conj(mp.coefficient(k)) * eval_ftilde(table, k + m, z)
                for k in range(-1, mp.order + 1)
            )
            assert abs(got - expected) < 1e-8


class TestLogOperator:
    def test_negative_mode_interior(self):
        rng = np.random.default_rng(5)
        mp = random_univalent_map(rng, 3)
        table = build_faber(mp, 16)
        rule = QuadratureRule(2048)
        z = complex(mp.boundary_point(np.linspace(0, 2 * np.pi, 64)).mean())
        for m in (1, 2, 6):
            got = log_operator(density_mode(mp, -m, rule), mp, z, rule)
            expected = -np.conj(eval_faber(table, m, z)) / (2.0 * m)
            assert abs(got - expected) < 1e-8

    def test_positive_mode_exterior(self):
        rng = np.random.default_rng(6)
        mp = random_univalent_map(rng, 2)
        table = build_faber(mp, 16)
        rule = QuadratureRule(2048)
        w = 1.7 * np.exp(2.2j)
        z = complex(mp.eval(w))
        for m in (1, 3):
            got = log_operator(density_mode(mp, m, rule), mp, z, rule)
            expected = -(eval_faber(table, m, z) - w**m + np.conj(w**-m)) / (2.0 * m)
            assert abs(got - expected) < 1e-8

    def test_mean_of_log_on_unit_circle(self):
        mp = ExteriorMap(())
        rule = QuadratureRule(1024)
        got = log_operator(np.ones(1024, dtype=complex), mp, 0.0 + 0.0j, rule)
        assert abs(got) < 1e-12

    def test_proximity_errors(self):
        mp = ExteriorMap(())
        rule = QuadratureRule(256)
        samples = np.ones(256, dtype=complex)
        with pytest.raises(ProximityError):
            cauchy_operator(samples, mp, 0.98 + 0.0j, rule)
        with pytest.raises(ProximityError):
            log_operator(samples, mp, 1.02 + 0.0j, rule)


class TestSimplifiedKernelIdentity:
    def test_assembled_from_operators(self):
        # fundamental-matrix quadrature equals the log/Cauchy assembly
        # 2S = 2 a1 L[phi] - a2 z conj(C[phi]) + a2 conj(C[conj(zeta) phi])
        rng = np.random.default_rng(7)
        mp = random_univalent_map(rng, 3)
        rule = QuadratureRule(2048)
        zeta, _ = boundary_nodes(mp, rule)
        phi = (
            (0.4 - 0.2j) * density_mode(mp, -2, rule)
            + (1.0 + 0.3j) * density_mode(mp, 1, rule)
            + 0.7j * density_mode(mp, 3, rule)
        )
        mat = FIG_MATERIAL
        for z in (
            complex(mp.boundary_point(np.linspace(0, 2 * np.pi, 64)).mean()),
            complex(mp.eval(2.0 * np.exp(0.5j))),
        ):
            direct = 2.0 * kelvin_single_layer(phi, mp, mat, z, rule)
            assembled = (
                2.0 * mat.alpha1 * log_operator(phi, mp, z, rule)
                - mat.alpha2 * z * np.conj(cauchy_operator(phi, mp, z, rule))
                + mat.alpha2
                * np.conj(cauchy_operator(np.conj(zeta) * phi, mp, z, rule))
            )
            assert abs(direct - assembled) < 1e-8


class TestTransmissionResidual:
    def test_zero_loading(self):
        mp = ExteriorMap((0.0, 0.1))
        table = build_faber(mp, 10)
        load = FarFieldLoading([0.0], [0.0])
        sol = solve_full(mp, load, FIG_MATERIAL, 6, table=table)
        assert transmission_residual(sol, mp, table, load, FIG_MATERIAL, 64) == 0.0

    def test_figure_config(self):
        mapping, mat, loading, table, sol = solved_figure("fig1")
        assert transmission_residual(sol, mapping, table, loading, mat, 256) < 1e-6

    def test_c3_sensitivity(self):
        mapping, mat, loading, table, sol = solved_figure("fig1")
        bumped = DensitySolution(
            s=sol.s, t=sol.t, c1=sol.c1, c2=sol.c2, c3=sol.c3 + 1e-3, order=sol.order
        )
        base = transmission_residual(sol, mapping, table, loading, mat, 256)
        assert (
            transmission_residual(bumped, mapping, table, loading, mat, 256)
            >= base + 1e-4
        )


class TestEquilibriumResidual:
    def test_zero_solution(self):
        mp = ExteriorMap((0.0, 0.1))
        sol = DensitySolution(
            s=np.zeros(4, dtype=complex),
            t=np.zeros(4, dtype=complex),
            c1=0.0,
            c2=0.0,
            c3=0.0,
            order=4,
        )
        np.testing.assert_allclose(equilibrium_residual(sol, mp, 256), 0.0, atol=0.0)

    def test_solved_configurations(self):
        for name in ("fig1", "fig2", "fig3"):
            mapping, _, _, _, sol = solved_figure(name)
            assert equilibrium_residual(sol, mapping, 2048).max() < 1e-8

    def test_t1_shift_sensitivity(self):
        mapping, _, _, _, sol = solved_figure("fig2")
        t = sol.t.copy()
        t[0] += 1e-2j
        bumped = DensitySolution(
            s=sol.s, t=t, c1=sol.c1, c2=sol.c2, c3=sol.c3, order=sol.order
        )
        assert equilibrium_residual(bumped, mapping, 2048)[2] >= 1e-3


class TestTrapezoidConvergence:
    def test_halving_study(self):
        # quadrature-vs-series gap shrinks at least geometrically with Q;
        # keep the target near the boundary so Q = 64 is not yet converged
        mapping, mat, loading, table, sol = solved_figure("fig3", 24)
        from faberelast import single_layer_exterior

        w = 1.12 * np.exp(0.8j)
        z = complex(mapping.eval(w))
        series = single_layer_exterior(sol, table, mapping, mat, w)
        gaps = []
        for q in (64, 128, 256):
            rule = QuadratureRule(q)
            phi = density_on_boundary(sol, mapping, rule.theta)
            quad = kelvin_single_layer(phi, mapping, mat, z, rule)
            gaps.append(abs(series - quad))
        assert gaps[0] > 1e-12  # visibly unconverged at the coarsest rule
        assert gaps[1] <= 0.5 * gaps[0] + 1e-13
        assert gaps[2] <= 0.5 * gaps[1] + 1e-13
