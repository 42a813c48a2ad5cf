import math
import time
from fractions import Fraction

import numpy as np
import pytest

import graphs
import integrator
import kinematics
from integrator import IntegralSpec


def tadpole_point(m2):
    return kinematics.from_invariants(1, [[0]], [m2])


def spec_for(K, d, nu, graph=None, **kwargs):
    return IntegralSpec(graph=graph or graphs.n_gon(K.n), d=d, nu=tuple(nu), kinematics=K, **kwargs)


class TestIntegrand:
    def test_tadpole_at_origin(self, tadpole):
        f = integrator.integrand(spec_for(tadpole, 2, (2,)))
        assert f(np.zeros(2)) == pytest.approx(1.0)

    def test_bubble(self, e1):
        f = integrator.integrand(spec_for(e1, 2, (1, 1)))
        assert f(np.array([0.0, 0.0])) == pytest.approx(0.5)
        assert f(np.array([-1.0, 0.0])) == pytest.approx(0.5)

    def test_vectorized(self, e1):
        f = integrator.integrand(spec_for(e1, 2, (1, 1)))
        values = f(np.array([[0.0, 0.0], [-1.0, 0.0], [5.0, 5.0]]))
        assert values.shape == (3,)
        np.testing.assert_allclose(values[:2], [0.5, 0.5])

    def test_zero_exponent_drops_edge(self, e1):
        f = integrator.integrand(spec_for(e1, 2, (2, 0)))
        assert f(np.array([-1.0, 0.0])) == pytest.approx(1.0)

    def test_not_euclidean(self):
        K = kinematics.from_invariants(2, [[-1, 1], [1, -1]], [1, 1])
        with pytest.raises(kinematics.NotEuclidean):
            integrator.integrand(spec_for(K, 2, (1, 1)))


class TestParametricIntegrand:
    def test_bubble_midpoint(self, e1):
        h = integrator.ParametricIntegrand(integrator.integrand(spec_for(e1, 2, (1, 1))), 2)
        assert h.dimension == 1
        assert h(np.array([[0.5]]))[0] == pytest.approx(0.8)

    def test_tadpole_has_no_cube(self, tadpole):
        h = integrator.ParametricIntegrand(integrator.integrand(spec_for(tadpole, 4, (4,))), 4)
        assert h.dimension == 0
        assert h(np.zeros((1, 0)))[0] == pytest.approx(1 / 6)

    def test_stick_breaking_covers_the_simplex(self, equilateral):
        h = integrator.ParametricIntegrand(integrator.integrand(spec_for(equilateral, 2, (1, 1, 1))), 2)
        x, jacobian = h.simplex_points(np.array([[0.5, 0.5], [0.0, 1.0], [1.0, 0.3]]))
        np.testing.assert_allclose(x.sum(axis=1), 1.0)
        np.testing.assert_allclose(x[0], [0.5, 0.25, 0.25])
        np.testing.assert_allclose(jacobian, [0.5, 1.0, 0.0])

    def test_masses_bound_the_polynomial(self, equilateral):
        h = integrator.ParametricIntegrand(integrator.integrand(spec_for(equilateral, 2, (1, 1, 1))), 2)
        x, _ = h.simplex_points(np.random.default_rng(1).random((200, 2)))
        assert np.all(h.polynomial(x) >= 1.0 - 1e-12)


class TestValidation:
    def test_divergent(self, e1):
        with pytest.raises(integrator.Divergent):
            integrator.integrate(spec_for(e1, 2, (1, 0)))

    def test_exponent_count(self, e1):
        with pytest.raises(kinematics.DimensionMismatch):
            integrator.validate_spec(spec_for(e1, 2, (1, 1, 1)))

    def test_negative_exponent(self, e1):
        with pytest.raises(ValueError):
            integrator.validate_spec(spec_for(e1, 2, (3, -1)))

    def test_odd_dimension(self, e1):
        with pytest.raises(ValueError):
            integrator.validate_spec(spec_for(e1, 3, (2, 2)))

    def test_cut_graph(self, e1):
        with pytest.raises(integrator.IntegratorError):
            integrator.validate_spec(spec_for(e1, 2, (1, 1), graph=graphs.cut(graphs.n_gon(2), 1)))

    def test_adaptive_dimension_cap(self, tadpole):
        with pytest.raises(integrator.IntegratorError):
            integrator.validate_spec(spec_for(tadpole, 8, (5,)))
        integrator.validate_spec(spec_for(tadpole, 8, (5,), method='qmc'))

    def test_unknown_method(self, tadpole):
        with pytest.raises(ValueError):
            integrator.validate_spec(spec_for(tadpole, 2, (2,), method='simpson'))

    def test_default_tolerances(self, tadpole):
        assert spec_for(tadpole, 2, (2,)).effective_tol() == 1e-8
        assert spec_for(tadpole, 2, (2,), method='mc').effective_tol() == 1e-3
        assert spec_for(tadpole, 2, (2,), tol=1e-4).effective_tol() == 1e-4


class TestClosedForms:
    @pytest.mark.parametrize("m2", [Fraction(1), Fraction(4), Fraction(25, 4)])
    def test_tadpole_two_dimensions(self, m2):
        result = integrator.integrate(spec_for(tadpole_point(m2), 2, (2,), tol=1e-8))
        assert result.converged
        assert result.value == pytest.approx(1 / float(m2), rel=1e-6)
        assert result.method == 'quad'

    @pytest.mark.parametrize("m2", [Fraction(1), Fraction(4), Fraction(25, 4)])
    def test_tadpole_four_dimensions(self, m2):
        started = time.perf_counter()
        result = integrator.integrate(spec_for(tadpole_point(m2), 4, (4,), tol=1e-8))
        assert time.perf_counter() - started < 10
        assert result.converged
        assert result.value == pytest.approx(integrator.tadpole_closed_form(4, 4, m2), rel=1e-6)

    @pytest.mark.parametrize("d,nu", [(2, 2), (4, 4)])
    def test_tadpole_in_momentum_space(self, d, nu):
        exact = integrator.tadpole_closed_form(d, nu, 4)
        result = integrator.integrate(spec_for(tadpole_point(4), d, (nu,), method='mc'))
        assert abs(result.value - exact) <= max(1e-3 * exact, 3 * result.error_estimate)

    def test_bubble_value(self, e1):
        result = integrator.integrate(spec_for(e1, 2, (1, 1)))
        golden = (1 + math.sqrt(5)) / 2
        assert result.converged
        assert result.value == pytest.approx(4 * math.log(golden) / math.sqrt(5), rel=1e-8)

    @pytest.mark.parametrize("d,nu,m2,expected", [
        (2, 2, 1, 1.0),
        (2, 3, 2, 1 / 8),
        (4, 4, 1, 1 / 6),
        (4, 3, 4, 1 / 8),
    ])
    def test_closed_form_values(self, d, nu, m2, expected):
        assert integrator.tadpole_closed_form(d, nu, m2) == pytest.approx(expected)

    def test_closed_form_divergent(self):
        with pytest.raises(integrator.Divergent):
            integrator.tadpole_closed_form(4, 2, 1)

    def test_strictly_positive_and_monotone(self, e1, e1_heavy):
        light = integrator.integrate(spec_for(e1, 2, (1, 1))).value
        heavy = integrator.integrate(spec_for(e1_heavy, 2, (1, 1))).value
        assert light > heavy > 0


class TestIdentities:
    @pytest.mark.parametrize("lam", [Fraction(4), Fraction(1, 3)])
    def test_bubble_homogeneity(self, e1, lam):
        lhs, rhs, rel = integrator.check_homogeneity(spec_for(e1, 2, (1, 1)), lam)
        assert rel <= 1e-5

    def test_tadpole_homogeneity(self, tadpole):
        lhs, rhs, rel = integrator.check_homogeneity(spec_for(tadpole, 2, (2,)), 9)
        assert lhs == pytest.approx(1 / 9, rel=1e-6)
        assert rel <= 1e-5

    def test_homogeneity_needs_positive_scale(self, tadpole):
        with pytest.raises(ValueError):
            integrator.check_homogeneity(spec_for(tadpole, 2, (2,)), -1)

    def test_triangle_quotient(self, equilateral):
        check = integrator.check_quotient_consistency(equilateral, {2}, 2, (1, 1))
        assert check.rel_error <= 1e-4

    def test_trivial_quotient(self, equilateral):
        check = integrator.check_quotient_consistency(equilateral, set(), 2, (1, 1, 1))
        assert check.rel_error == 0

    def test_bubble_to_tadpole(self, e1):
        check = integrator.check_quotient_consistency(e1, {1}, 2, (2,))
        assert check.parent_value == pytest.approx(1.0, rel=1e-6)
        assert check.reduced_value == pytest.approx(1.0, rel=1e-6)


class TestBackends:
    def test_quad_and_qmc_agree(self, e1):
        quad = integrator.integrate(spec_for(e1, 2, (1, 1)))
        qmc = integrator.integrate(spec_for(e1, 2, (1, 1), method='mc'))
        assert qmc.method == 'mc'
        assert qmc.details['shifts'] == 16
        assert qmc.n_evaluations == 16 * 2 ** 15
        gap = abs(quad.value - qmc.value)
        assert gap <= max(1e-4 * abs(quad.value), 3 * (quad.error_estimate + qmc.error_estimate))

    def test_qmc_is_reproducible(self, e1):
        a = integrator.integrate(spec_for(e1, 2, (1, 1), method='mc', seed=3))
        b = integrator.integrate(spec_for(e1, 2, (1, 1), method='mc', seed=3))
        assert a.value == b.value
        assert a.error_estimate == b.error_estimate

    def test_triangle_backends(self, equilateral):
        quad = integrator.integrate(spec_for(equilateral, 2, (1, 1, 1)))
        qmc = integrator.integrate(spec_for(equilateral, 2, (1, 1, 1), method='qmc'))
        gap = abs(quad.value - qmc.value)
        assert gap <= max(1e-4 * abs(quad.value), 3 * (quad.error_estimate + qmc.error_estimate))

    def test_strict_mode(self, equilateral, monkeypatch):
        monkeypatch.setenv('NGON_MAX_SUBDIVISIONS', '1')
        spec = spec_for(equilateral, 2, (1, 1, 1), tol=1e-15)
        with pytest.raises(integrator.ToleranceNotReached) as excinfo:
            integrator.integrate(spec, strict=True)
        assert excinfo.value.result is not None
        assert not excinfo.value.result.converged
        assert not integrator.integrate(spec).converged

    def test_box_four_dimensions(self):
        momenta = [[1, 0, 0, 0], [2, 1, 0, 0], [-1, 2, 1, 0], [-2, -3, -1, 0]]
        K = kinematics.from_momenta(4, momenta, [1, 2, 3, 5])
        assert kinematics.is_euclidean(K, 4)
        started = time.perf_counter()
        quad = integrator.integrate(spec_for(K, 4, (1, 1, 1, 1), tol=1e-7))
        assert time.perf_counter() - started < 10
        assert quad.converged
        assert quad.details['parametric_dimension'] == 3
        qmc = integrator.integrate(spec_for(K, 4, (1, 1, 1, 1), method='mc'))
        gap = abs(quad.value - qmc.value)
        assert gap <= max(1e-4 * abs(quad.value), 3 * (quad.error_estimate + qmc.error_estimate))

    def test_triangle_four_dimensions(self, equilateral):
        started = time.perf_counter()
        result = integrator.integrate(integrator.canonical_spec(graphs.n_gon(3), equilateral))
        assert time.perf_counter() - started < 10
        assert result.converged
        assert result.details['rule'] == 'genz-malik'


class TestPeriods:
    def test_canonical_spec(self, equilateral):
        spec = integrator.canonical_spec(graphs.n_gon(3), equilateral)
        assert spec.d == 4
        assert spec.nu == (1, 1, 1)
        assert spec.kinematics == equilateral

    def test_canonical_spec_of_quotient(self, equilateral):
        spec = integrator.canonical_spec(graphs.quotient_keeping(3, (1, 3)), equilateral)
        assert spec.graph == graphs.n_gon(2)
        assert spec.d == 2
        assert spec.kinematics.s == ((2, -2), (-2, 2))

    def test_canonical_spec_needs_two_edges(self, equilateral):
        with pytest.raises(integrator.IntegratorError):
            integrator.canonical_spec(graphs.quotient_keeping(3, (2,)), equilateral)

    @pytest.mark.parametrize("n,d,nu,variant", [
        (1, 2, (2,), 'reduced'),
        (2, 2, (1, 1), 'reduced'),
        (3, 4, (1, 1, 1), 'full'),
        (4, 4, (1, 1, 1, 1), 'reduced'),
    ])
    def test_period_motive_variant(self, n, d, nu, variant):
        K = kinematics.from_invariants(n, [[0] * n for _ in range(n)], [1] * n)
        spec = IntegralSpec(graph=graphs.n_gon(n), d=d, nu=nu, kinematics=K)
        assert integrator.period_motive_variant(spec) == variant

    def test_loop_scale(self, e1_heavy):
        assert integrator.loop_scale(e1_heavy) == pytest.approx(math.sqrt(1.5))
