import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semiflow.errors import DomainEscape, NoConvergence
from semiflow.flow import GeneratorFunction
from semiflow.quasi import mobius
from semiflow.series import PowerSeries, compose, derivative, multiply
from semiflow.space import (OperatorMatrix, bergman, check_contraction_property,
                            composition_matrix, composition_norm, dirichlet, evaluation_norm,
                            generator_matrix, hardy, operator_norm, space_norm, weights)


class TestWeights:
    def test_presets(self):
        assert np.array_equal(hardy(4).values, np.ones(5))
        assert np.allclose(dirichlet(4).values, [1, 1, math.sqrt(2), math.sqrt(3), 2])
        assert np.allclose(bergman(3).values, 1 / np.sqrt([1, 2, 3, 4]))

    def test_perturbed(self):
        w = weights("perturbed:dirichlet", 4)
        assert np.allclose(w.values, [3, 1, 3 * math.sqrt(2), math.sqrt(3), 6])

    def test_custom_json(self):
        assert np.allclose(weights("[1, 2, 3]", 2).values, [1, 2, 3])
        with pytest.raises(ValueError):
            weights("[1, 2]", 2)

    @pytest.mark.parametrize("bad", ["[1, 0, 2]", "[1, -1, 2]", "sobolev"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            weights(bad, 2)


class TestSpaceNorm:
    @pytest.mark.parametrize("beta", [hardy(10), dirichlet(10), bergman(10)])
    def test_monomials(self, beta):
        for n in range(11):
            assert space_norm(PowerSeries.monomial(n, 10), beta) == pytest.approx(beta[n], rel=1e-15)

    def test_hardy(self):
        assert space_norm(PowerSeries([1, 1]), hardy(4)) == pytest.approx(math.sqrt(2))

    def test_dirichlet(self):
        f = PowerSeries([0, 1, 0, 0, 1])
        assert space_norm(f, dirichlet(4)) == pytest.approx(math.sqrt(5))

    def test_degree_check(self):
        with pytest.raises(ValueError):
            space_norm(PowerSeries.monomial(5, 5), hardy(4))


class TestCompositionMatrix:
    @pytest.mark.parametrize("beta", [hardy(12), dirichlet(12), bergman(12)])
    def test_dilation(self, beta):
        t = 0.4
        M = composition_matrix(PowerSeries([0, math.exp(-t)], deg=12), beta)
        assert np.allclose(M.entries, np.diag(np.exp(-t * np.arange(13))), atol=1e-16)
        assert operator_norm(M).norm == 1.0

    def test_identity(self):
        M = composition_matrix(PowerSeries.identity(9), dirichlet(9))
        assert np.array_equal(M.entries, np.eye(10))

    def test_half_automorphism(self):
        M = composition_matrix(mobius(0.5, 128), hardy(128))
        norm = operator_norm(M).norm
        assert 1.70 <= norm <= math.sqrt(3)

    def test_escape(self):
        with pytest.raises(DomainEscape):
            composition_matrix(PowerSeries([1.0, 0.0], deg=4), hardy(4))

    def test_symbol_degree(self):
        with pytest.raises(ValueError):
            composition_matrix(PowerSeries([0, 0.5], deg=3), hardy(8), 8)

    def test_lower_triangular_when_centred(self, rng):
        c = np.concatenate([[0], 0.3 * rng.standard_normal(10)])
        M = composition_matrix(PowerSeries(c), dirichlet(10))
        assert np.all(np.triu(M.entries, 1) == 0)

    @pytest.mark.filterwarnings("ignore::semiflow.errors.TruncationWarning")
    def test_apply(self):
        phi = PowerSeries([0.1, 0.5, 0.2], deg=8)
        f = PowerSeries([1, -1, 2], deg=8)
        M = composition_matrix(phi, bergman(8))
        assert np.allclose(M.apply(f).coeffs, compose(f, phi).coeffs, atol=1e-14)


class TestGeneratorMatrix:
    def test_dilation(self):
        A = generator_matrix(GeneratorFunction((0, -1)), dirichlet(6), 6)
        assert np.allclose(A.entries, np.diag(-np.arange(7.0)))

    def test_translation(self):
        beta = dirichlet(6)
        A = generator_matrix(GeneratorFunction((1,)), beta, 6)
        want = np.zeros((7, 7))
        for n in range(1, 7):
            want[n - 1, n] = n * beta[n - 1] / beta[n]
        assert np.allclose(A.entries, want)

    def test_hyperbolic_hardy(self):
        A = generator_matrix(GeneratorFunction((1, 0, -1)), hardy(6), 6)
        want = np.zeros((7, 7))
        for n in range(1, 7):
            want[n - 1, n] = n
            if n + 1 <= 6:
                want[n + 1, n] = -n
        assert np.allclose(A.entries, want)


class TestOperatorNorm:
    def test_identity(self):
        assert operator_norm(np.eye(5)).norm == 1.0

    def test_diagonal(self):
        assert operator_norm(np.diag(np.exp(-0.7 * np.arange(20)))).norm == 1.0

    def test_svd_oracle(self, rng):
        for _ in range(5):
            E = rng.standard_normal((15, 15)) + 1j * rng.standard_normal((15, 15))
            rep = operator_norm(E, tol=1e-12)
            assert rep.converged
            assert rep.norm == pytest.approx(np.linalg.norm(E, 2), rel=1e-8)

    def test_flagged_when_unconverged(self):
        M = composition_matrix(mobius(0.5, 64), hardy(64))
        rep = operator_norm(M, maxiter=2, restarts=0)
        assert not rep.converged and rep.lower_bound
        with pytest.raises(NoConvergence):
            operator_norm(M, maxiter=2, restarts=0, strict=True)

    def test_bad_maxiter(self):
        with pytest.raises(ValueError):
            operator_norm(np.eye(2), maxiter=0)

    def test_composition_norm_flag(self):
        rep, converged = composition_norm(lambda n: PowerSeries([0, 0.5], deg=n), "hardy", 16)
        assert rep.norm == 1.0 and converged


class TestContraction:
    def test_half_on_hardy(self):
        eta = PowerSeries([0, 0.5], deg=64)
        assert check_contraction_property(hardy(64), eta) <= 0

    def test_koebe_type_on_dirichlet(self):
        eta = PowerSeries([0] + [2.0**-k for k in range(1, 129)])
        assert check_contraction_property(dirichlet(128), eta) <= 1e-10

    def test_identity_exact(self):
        assert check_contraction_property(bergman(16), PowerSeries.identity(16)) == 0.0

    def test_requires_fixed_origin(self):
        with pytest.raises(ValueError):
            check_contraction_property(hardy(8), PowerSeries([0.1, 0.5], deg=8))


class TestEvaluationNorm:
    def test_origin(self):
        assert evaluation_norm(0, hardy(10)) == 1.0
        w = weights("[2, 1, 1]", 2)
        assert evaluation_norm(0, w) == 0.5

    def test_half(self):
        assert evaluation_norm(0.5, hardy(200)) == pytest.approx(2 / math.sqrt(3), rel=1e-14)

    def test_outside(self):
        with pytest.raises(DomainEscape):
            evaluation_norm(1.0, hardy(4))


# -- properties -------------------------------------------------------

def centred(rng, N, scale=0.3):
    c = scale * (rng.standard_normal(N + 1) + 1j * rng.standard_normal(N + 1)) / 2 ** np.arange(N + 1)
    c[0] = 0
    return PowerSeries(c)


@pytest.mark.parametrize("beta", [hardy(20), dirichlet(20), bergman(20)])
def test_contravariance(beta, rng):
    for _ in range(3):
        phi, psi = centred(rng, 20), centred(rng, 20)
        lhs = composition_matrix(compose(phi, psi), beta).entries
        rhs = composition_matrix(psi, beta).entries @ composition_matrix(phi, beta).entries
        assert np.max(np.abs(lhs - rhs)) <= 1e-8


@pytest.mark.parametrize("preset", ["hardy", "dirichlet", "bergman"])
def test_norm_monotone_in_N(preset):
    prev = 0.0
    for N in (8, 16, 32, 64):
        norm = operator_norm(composition_matrix(mobius(0.4, N), weights(preset, N))).norm
        assert norm >= prev - 1e-10
        prev = norm


@settings(max_examples=40, deadline=None)
@given(st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False),
       st.sampled_from(["hardy", "dirichlet", "bergman"]))
def test_diagonal_norm_exact(c, preset):
    N = 30
    M = composition_matrix(PowerSeries([0, c], deg=N), weights(preset, N))
    want = max(abs(c) ** n for n in range(N + 1))
    assert operator_norm(M).norm == pytest.approx(want, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=12, max_size=12),
       st.sets(st.integers(0, 11)), st.sampled_from(["hardy", "dirichlet", "bergman"]))
def test_pythagoras(c, support, preset):
    beta = weights(preset, 11)
    mask = np.array([k in support for k in range(12)])
    f = PowerSeries(np.where(mask, c, 0.0))
    g = PowerSeries(np.where(mask, 0.0, c))
    lhs = space_norm(f, beta) ** 2 + space_norm(g, beta) ** 2
    assert lhs == pytest.approx(space_norm(f + g, beta) ** 2, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=5),
       st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                min_size=11, max_size=11),
       st.sampled_from(["hardy", "dirichlet", "bergman"]))
def test_generator_matrix_matches_series(g, f, preset):
    N = 10
    beta = weights(preset, N)
    G = GeneratorFunction(tuple(g))
    fs = PowerSeries(f)
    A = generator_matrix(G, beta, N)
    want = multiply(G.series(N), derivative(fs.pad(N + 1)))
    assert np.allclose(A.apply(fs).coeffs, want.coeffs, atol=1e-12)
    assert np.allclose(A.entries @ A.basis_vector(fs), A.basis_vector(want), atol=1e-12)
