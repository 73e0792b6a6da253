import cmath
import math

import numpy as np
import pytest

from semiflow import ode
from semiflow.errors import DomainEscape, NoConvergence, UnknownCatalogEntry
from semiflow.flow import (CATALOG_NAMES, Flow, GeneratorFunction, catalog, check_flow_axioms,
                           flow_at_point, parse_generator, selfmap_margin, solve_cp_series,
                           start_grid, trajectory)
from semiflow.series import PowerSeries, evaluate

from conftest import series_close


def mobius_oracle(r, N):
    # (z + r)/(1 + r z) expanded by hand: r + (1 - r^2) sum (-r)^{k-1} z^k
    return np.array([r] + [(1 - r * r) * (-r) ** (k - 1) for k in range(1, N + 1)])


def catalog_flows():
    return [catalog("dilation", 1.0), catalog("rotation", 0.7), catalog("hyperbolic"),
            catalog("parabolic")]


def random_generators(rng, count=3):
    out = []
    for _ in range(count):
        c = 0.15 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
        out.append(GeneratorFunction(tuple(c)))
    return out


class TestSolveCPSeries:
    def test_dilation(self):
        out = solve_cp_series(GeneratorFunction((0, -1)), 1.0, 16)
        assert series_close(out, [0, math.exp(-1)] + [0] * 15, 1e-12)

    def test_hyperbolic(self):
        r = math.tanh(0.3)
        out = solve_cp_series(GeneratorFunction((1, 0, -1)), 0.3, 32)
        assert series_close(out, mobius_oracle(r, 32), 1e-10)

    @pytest.mark.parametrize("G", [(0, -1), (1, 0, -1), (0.3, 0.1j, -0.2)])
    def test_time_zero(self, G):
        out = solve_cp_series(GeneratorFunction(G), 0.0, 8)
        assert np.array_equal(out.coeffs, PowerSeries.identity(8).coeffs)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            solve_cp_series(GeneratorFunction((0, -1)), -1.0, 8)

    def test_translation_escapes(self):
        # G = 1: phi_t(0) = t reaches the guard radius at t = 1 - eps
        with pytest.raises(DomainEscape) as info:
            solve_cp_series(GeneratorFunction((1,)), 2.0, 8, eps=1e-3)
        assert info.value.exit_time == pytest.approx(1 - 1e-3, abs=1e-8)


class TestFlowAtPoint:
    def test_dilation(self):
        assert flow_at_point(GeneratorFunction((0, -1)), 0.5, math.log(2)) == pytest.approx(0.25, abs=1e-12)

    def test_parabolic(self):
        assert flow_at_point(GeneratorFunction((1, -2, 1)), 0, 1.0) == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("t", [0.5, 2.0, 5.0])
    def test_hyperbolic_origin_tends_to_boundary(self, t):
        w = flow_at_point(GeneratorFunction((1, 0, -1)), 0, t)
        assert w == pytest.approx(math.tanh(t), abs=1e-9)
        assert abs(w) < 1

    def test_outward_flow_exit_time(self):
        # G = z: phi_t(z) = e^t z leaves the disc at t = -log|z|
        with pytest.raises(DomainEscape) as info:
            flow_at_point(GeneratorFunction((0, 1)), 0.5, 1.0)
        assert info.value.exit_time == pytest.approx(math.log(2), abs=1e-8)

    def test_start_outside_guard(self):
        with pytest.raises(DomainEscape):
            flow_at_point(GeneratorFunction((0, -1)), 0.9995, 0.1)

    def test_trajectory_matches_pointwise(self):
        G = GeneratorFunction((1, -2, 1))
        times = [0.0, 0.25, 0.5, 1.0]
        path = trajectory(G, 0.3j, times)
        want = [(0.3j + t * (1 - 0.3j)) / (1 + t * (1 - 0.3j)) for t in times]
        assert np.allclose(path, want, atol=1e-9)


class TestCatalog:
    def test_hyperbolic_half(self):
        _, flow = catalog("hyperbolic")
        t = 0.5 * math.log(3)
        assert series_close(flow.series(t, 20), mobius_oracle(0.5, 20), 1e-14)

    @pytest.mark.parametrize("t", [0.1, 1.0, 3.0])
    def test_dilation_contracts(self, t):
        _, flow = catalog("dilation", 1.0)
        z = 0.4 + 0.3j
        assert flow.at(0, t) == 0
        assert abs(flow.at(z, t)) == pytest.approx(math.exp(-t) * abs(z), abs=1e-15)

    def test_parabolic_value(self):
        _, flow = catalog("parabolic")
        assert flow.at(0, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_generator_coefficients(self):
        assert catalog("hyperbolic")[0].coeffs == (1, 0, -1)
        assert catalog("parabolic")[0].coeffs == (1, -2, 1)
        assert catalog("rotation", 2.0)[0].coeffs == (0, 2j)
        assert catalog("dilation", 0.5)[0].coeffs == (0, -0.5)

    def test_unknown(self):
        with pytest.raises(UnknownCatalogEntry):
            catalog("loxodromic")

    def test_dilation_requires_right_half_plane(self):
        with pytest.raises(ValueError):
            catalog("dilation", -1.0)

    @pytest.mark.parametrize("name", CATALOG_NAMES)
    def test_closed_forms_solve_the_ode(self, name):
        gen, flow = catalog(name)
        z, t, h = 0.3 - 0.2j, 0.4, 1e-5
        dphi = (flow.at(z, t + h) - flow.at(z, t - h)) / (2 * h)
        assert dphi == pytest.approx(gen(flow.at(z, t)), abs=1e-8)

    def test_parse(self):
        gen, flow = parse_generator("custom:[1, [0, 2], -0.5]")
        assert gen.coeffs == (1, 2j, -0.5)
        assert flow.source == "integrated-ode"
        assert parse_generator("dilation:1")[1].source == "closed-form"
        with pytest.raises(ValueError):
            parse_generator("custom:oops")


class TestAxioms:
    def test_dilation_residual(self):
        _, flow = catalog("dilation", 1.0)
        rep = check_flow_axioms(flow, [0.1, 0.5], [0.2, 0.3], start_grid(8))
        assert rep.semigroup_residual < 1e-10
        assert rep.selfmap_margin > 0

    def test_hyperbolic_addition_law(self):
        _, flow = catalog("hyperbolic")
        r = math.tanh(0.2)
        assert flow.at(0, 0.4) == pytest.approx(math.tanh(0.4), abs=1e-15)
        assert flow.at(flow.at(0, 0.2), 0.2) == pytest.approx(math.tanh(0.4), abs=1e-15)
        assert (r + r) / (1 + r * r) == pytest.approx(math.tanh(0.4), abs=1e-15)
        rep = check_flow_axioms(flow, [0.2], [0.2], [0])
        assert rep.semigroup_residual < 1e-15

    def test_time_zero_row_exact(self):
        _, flow = catalog("parabolic")
        rep = check_flow_axioms(flow.integrated(), [0.0], [0.0, 0.3], start_grid(5))
        assert rep.semigroup_residual == 0.0

    def test_integrated_flow(self):
        _, flow = catalog("parabolic")
        rep = check_flow_axioms(flow.integrated(), [0.1, 0.3], [0.2], start_grid(6))
        assert rep.semigroup_residual < 1e-9
        assert rep.continuity_residual < 1e-5

    def test_report_json(self):
        _, flow = catalog("rotation", 1.0)
        rep = check_flow_axioms(flow, [0.1], [0.1], [0.5])
        assert set(rep.to_json()) == {"semigroup_residual", "selfmap_margin",
                                      "continuity_residual"}


# -- properties -------------------------------------------------------

def _points(rng, count=20):
    r = 0.5 * np.sqrt(rng.random(count))
    return r * np.exp(2j * np.pi * rng.random(count)), 0.5 * rng.random(count)


def test_series_agrees_with_pointwise(rng):
    gens = [g for g, _ in catalog_flows()] + random_generators(rng)
    zs, ts = _points(rng)
    for G in gens:
        for z, t in zip(zs, ts):
            phi = solve_cp_series(G, t, 64)
            assert abs(evaluate(phi, z) - flow_at_point(G, z, t)) < 1e-8


def test_semigroup_residual_fourth_order():
    G = GeneratorFunction((1, -2, 1))
    z, t, s = 0.5 + 0.2j, 0.8, 0.4

    def residual(n):
        # unequal step sizes; equal ones make the discrete map a semigroup exactly
        lhs = flow_at_point(G, z, t + s, steps=n)
        rhs = flow_at_point(G, flow_at_point(G, z, s, steps=n), t, steps=n)
        return abs(lhs - rhs)

    r1, r2, r3 = residual(4), residual(8), residual(16)
    assert 16 * 0.6 < r1 / r2 < 16 * 1.6
    assert 16 * 0.6 < r2 / r3 < 16 * 1.6


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_selfmap_margin_positive(name):
    _, flow = catalog(name)
    tgrid = [0.1, 0.25, 0.5, 0.75, 1.0]
    assert selfmap_margin(flow, tgrid) > 0
    assert selfmap_margin(flow.integrated(), tgrid) > 0


def test_forward_backward_identity(rng):
    gens = [g for g, _ in catalog_flows()] + random_generators(rng)
    zs, ts = _points(rng, 10)
    for G in gens:
        for z, t in zip(zs, ts):
            w = flow_at_point(G, z, t)
            if abs(w) > 1 - 1e-3:
                continue
            assert abs(flow_at_point(G, w, -t) - z) < 1e-8


def test_series_forward_backward(rng):
    for G in random_generators(rng):
        flow = Flow(G)
        phi = flow.series(0.3, 24)
        back = solve_cp_series(-G, 0.3, 24, start=phi)
        assert series_close(back, PowerSeries.identity(24), 1e-8)


class TestODE:
    def test_exponential(self):
        res = ode.integrate(lambda y: y, np.array([1.0 + 0j]), 1.0)
        assert abs(res.y[0] - math.e) < 1e-9

    def test_checkpoints(self):
        res = ode.integrate(lambda y: -y, 1.0 + 0j, 2.0, t_eval=[0.5, 1.0, 2.0])
        assert res.ts == [0.5, 1.0, 2.0]
        assert np.allclose(res.ys, np.exp(-np.array(res.ts)), atol=1e-10)

    def test_fourth_order(self):
        errs = [abs(ode.integrate(lambda y: 1j * y, 1.0 + 0j, 1.0, steps=n).y - cmath.exp(1j))
                for n in (8, 16)]
        assert 12 < errs[0] / errs[1] < 20

    def test_step_budget(self):
        with pytest.raises(NoConvergence):
            ode.integrate(lambda y: 50 * y * 1j, 1.0 + 0j, 10.0, max_steps=10)
