"""Numerical counterpart of the generator theorem for composition semigroups.

Given a generator ``G``, the harness builds the semigroup two ways (the
coefficient ODE ``v' = A_N v`` and composition with the integrated flow),
recovers the flow from the semigroup via ``phi_t = T_t id``, recovers ``G``
from the flow by extrapolated difference quotients and fits the growth
bound ``||T_t|| <= M exp(omega t)``.  All conclusions hold at truncation
scale ``N`` only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import ode
from .errors import NoConvergence
from .flow import FLOW_TOL, Flow, GeneratorFunction, _as_generator, selfmap_margin, solve_cp_series
from .series import (PowerSeries, compose_with_error, derivative, evaluate, multiply)
from .space import (OperatorMatrix, WeightSequence, composition_matrix, generator_matrix,
                    operator_norm, space_norm)

H_LIST = tuple(1e-2 * 2.0**-k for k in range(7))


def flow_from_semigroup(T: Callable[[float], OperatorMatrix], tgrid) -> dict:
    """``phi_t = T_t id`` for each ``t`` in ``tgrid``."""
    out = {}
    for t in tgrid:
        M = T(float(t))
        ident = PowerSeries.identity(M.N)
        out[float(t)] = M.apply(ident)
    return out


def richardson(values: Sequence[np.ndarray], hs: Sequence[float], order: int, step: int,
               levels: int = 2):
    """Extrapolate ``D(h) = D + c_1 h^order + c_2 h^{order+step} + ...``.

    Returns ``(estimate, error)`` from the column after ``levels``
    eliminations, choosing the entry that differs least from its
    predecessor.
    """
    col = [np.asarray(v) for v in values]
    hs = list(hs)
    if len(hs) != len(col):
        raise ValueError("one step size per value required")
    p = order
    for _ in range(levels):
        # entry k of the new column combines h_k and h_{k+1}
        new = []
        for k in range(len(col) - 1):
            q = (hs[k] / hs[k + 1]) ** p
            new.append((q * col[k + 1] - col[k]) / (q - 1))
        col = new
        hs = hs[1:]
        p += step
    if len(col) < 2:
        raise NoConvergence("not enough step sizes for the requested extrapolation")
    diffs = [float(np.max(np.abs(col[k] - col[k - 1]))) for k in range(1, len(col))]
    k = int(np.argmin(diffs)) + 1
    return col[k], diffs[k - 1]


def generator_from_flow(flow: Flow, N: int = 32, h_list: Sequence[float] = H_LIST,
                        rtol: float = 1e-6) -> PowerSeries:
    """Estimate ``G = d/dt phi_t |_{t=0}`` coefficientwise.

    Closed-form flows use central quotients ``(phi_h - phi_{-h}) / 2h``;
    integrated flows use forward quotients ``(phi_h - id) / h``.  Two
    Richardson levels are applied across ``h_list``.
    """
    hs = sorted((float(h) for h in h_list), reverse=True)
    ident = PowerSeries.identity(N).coeffs
    if flow.closed_series is not None:
        vals = [(flow.series(h, N).coeffs - flow.series(-h, N).coeffs) / (2 * h) for h in hs]
        est, err = richardson(vals, hs, order=2, step=2)
    else:
        vals = [(flow.series(h, N).coeffs - ident) / h for h in hs]
        est, err = richardson(vals, hs, order=1, step=1)
    scale = max(1.0, float(np.max(np.abs(est))))
    if not err <= rtol * scale:
        raise NoConvergence(f"generator extrapolation error {err:.3g} above {rtol:g}",
                            estimate=PowerSeries(est))
    return PowerSeries(est)


def _poly(f: PowerSeries, N: int) -> PowerSeries:
    if f.effective_degree > N:
        raise ValueError(f"test function of degree {f.effective_degree} exceeds N = {N}")
    return f.at_degree(N)


def semigroup_side(G, beta: WeightSequence, f: PowerSeries, tgrid, N: int,
                   tol: float = FLOW_TOL, steps: int | None = None) -> dict:
    """``T_t f`` from ``v' = A_N v`` in the orthonormal basis, per ``t``."""
    A = generator_matrix(_as_generator(G), beta, N)
    v0 = A.basis_vector(_poly(f, N))
    E = A.entries
    res = ode.integrate(lambda v: E @ v, v0, max(tgrid), tol=tol, t_eval=list(tgrid),
                        steps=steps)
    lookup = dict(zip(res.ts, res.ys))
    return {float(t): A.from_basis(lookup[float(t)]) for t in tgrid}


def check_claim1(f: PowerSeries, G, beta: WeightSequence, tgrid, N: int,
                 tol: float = FLOW_TOL, steps: int | None = None) -> float:
    """``max_t`` coefficient distance between ``T_t f`` and ``f o phi_t``."""
    G = _as_generator(G)
    tgrid = sorted(float(t) for t in tgrid)
    f = _poly(f, N)
    semi = semigroup_side(G, beta, f, tgrid, N, tol=tol, steps=steps)
    worst = 0.0
    for t in tgrid:
        phi = solve_cp_series(G, t, N, tol=tol, steps=steps) if t > 0 else PowerSeries.identity(N)
        comp, _ = compose_with_error(f, phi)
        worst = max(worst, float(np.max(np.abs(semi[t].coeffs - comp.coeffs))))
    return worst


def check_generator_identity(T: Callable[[float], OperatorMatrix], G, beta: WeightSequence,
                             f: PowerSeries, h_list: Sequence[float] = H_LIST,
                             rtol: float = 1e-6) -> float:
    """``|| lim (T_h f - f)/h - G f' ||_beta`` with the limit extrapolated."""
    G = _as_generator(G)
    hs = sorted((float(h) for h in h_list), reverse=True)
    mats = [T(h) for h in hs]
    N = mats[0].N
    f = _poly(f, N)
    v0 = mats[0].basis_vector(f)
    vals = [(M.entries @ v0 - v0) / h for M, h in zip(mats, hs)]
    est, err = richardson(vals, hs, order=1, step=1)
    if not err <= rtol * max(1.0, float(np.max(np.abs(est)))):
        raise NoConvergence(f"difference quotient extrapolation error {err:.3g}")
    Af = multiply(G.series(N), derivative(f.pad(N + 1)))
    limit = mats[0].from_basis(est)
    return space_norm(limit - Af, beta.truncate(N))


@dataclass(frozen=True)
class GrowthBound:
    M: float
    omega: float
    residual: float
    quasicontractive: bool
    omega_m1: float
    norms: tuple = field(default=(), repr=False)

    def to_json(self):
        return {"M": self.M, "omega": self.omega, "residual": self.residual,
                "quasicontractive": self.quasicontractive, "omega_m1": self.omega_m1}


def growth_bound(T: Callable[[float], OperatorMatrix], tgrid, m_tol: float = 0.05,
                 **norm_kw) -> GrowthBound:
    """Fit ``log ||T_t|| <= log M + omega t`` with ``M >= 1``.

    A least-squares line gives ``(log M_ls, omega_ls)``.  When its
    intercept is below ``log(1 + m_tol)`` the family is reported
    quasicontractive with ``M = 1`` and the smallest admissible
    ``omega = max_t log||T_t|| / t``; otherwise ``omega = omega_ls`` and
    ``M`` is raised until the bound holds on every sample.
    """
    ts = np.array(sorted(float(t) for t in tgrid))
    if ts.size == 0 or np.any(ts <= 0):
        raise ValueError("tgrid must be non-empty and positive")
    norms = np.array([operator_norm(T(t), **norm_kw).norm for t in ts])
    y = np.log(norms)
    if ts.size > 1:
        slope, intercept = np.polyfit(ts, y, 1)
    else:
        slope, intercept = y[0] / ts[0], 0.0
    resid = float(np.sqrt(np.mean((y - (intercept + slope * ts)) ** 2)))
    omega_m1 = float(np.max(y / ts))
    quasi = bool(intercept <= math.log1p(m_tol))
    if quasi:
        M, omega = 1.0, omega_m1
    else:
        omega = float(slope)
        M = float(max(1.0, np.max(norms * np.exp(-omega * ts))))
    return GrowthBound(M, omega, resid, quasi, omega_m1, tuple(norms.tolist()))


def matrix_semigroup_residual(T: Callable[[float], OperatorMatrix], pairs) -> float:
    """``max ||T_{t+s} - T_t T_s||_2`` over ``(t, s)`` pairs (compressions)."""
    worst = 0.0
    for t, s in pairs:
        D = T(t + s).entries - T(t).entries @ T(s).entries
        worst = max(worst, float(np.linalg.norm(D, 2)))
    return worst


def matrix_semigroup_tail(T_wide: Callable[[float], OperatorMatrix], N: int, pairs) -> float:
    """Truncation-tail estimate for :func:`matrix_semigroup_residual`.

    The product of two compressions drops the terms ``T_t[m, k] T_s[k, n]``
    with ``k > N``.  Their size is measured with wider compressions
    ``T_wide`` (degree ``> N``) restricted to the leading block.
    """
    worst = 0.0
    for t, s in pairs:
        A, B = T_wide(t).entries, T_wide(s).entries
        if A.shape[0] <= N + 1:
            raise ValueError("T_wide must be wider than N")
        D = A[: N + 1, N + 1:] @ B[N + 1:, : N + 1]
        worst = max(worst, float(np.linalg.norm(D, 2)))
    return worst


@dataclass(frozen=True)
class TheoremTolerances:
    claim1: float = 1e-6
    generator: float = 1e-6
    semigroup: float = 1e-7


@dataclass(frozen=True)
class TheoremReport:
    claim1_residual: float
    generator_residual: float
    selfmap_margin: float
    semigroup_residual: float
    verdict: str
    growth: GrowthBound | None = None
    tolerances: TheoremTolerances = TheoremTolerances()

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"

    def to_json(self):
        out = {
            "claim1_residual": self.claim1_residual,
            "generator_residual": self.generator_residual,
            "selfmap_margin": self.selfmap_margin,
            "semigroup_residual": self.semigroup_residual,
            "verdict": self.verdict,
            "tolerances": {"claim1": self.tolerances.claim1,
                           "generator": self.tolerances.generator,
                           "semigroup": self.tolerances.semigroup},
        }
        if self.growth is not None:
            out["growth"] = self.growth.to_json()
        return out


DEFAULT_TGRID = (0.1, 0.25, 0.5)


def probe_functions(N: int) -> list[PowerSeries]:
    return [
        PowerSeries.constant(1.0, N),
        PowerSeries.identity(N),
        PowerSeries.monomial(2, N),
        PowerSeries([0.5, -1.0, 0.0, 0.25j], deg=N),
    ]


def verify_theorem(flow: Flow, beta: WeightSequence, N: int = 32, tgrid=DEFAULT_TGRID,
                   tolerances: TheoremTolerances = TheoremTolerances(),
                   zgrid=None) -> TheoremReport:
    """Run the full harness for one flow on one space.

    Raises :class:`~semiflow.errors.DomainEscape` if the generator pushes
    points of the guard circle out of the disc.
    """
    G = flow.generator
    beta = beta.truncate(N)
    tgrid = sorted(float(t) for t in tgrid)
    integrated = flow.integrated()

    margin = selfmap_margin(integrated, tgrid)

    claim1 = max(check_claim1(f, G, beta, tgrid, N, tol=flow.tol) for f in probe_functions(N))

    g_est = generator_from_flow(integrated, N)
    gen_res = space_norm(g_est - G.series(N), beta)
    T_flow = lambda t: composition_matrix(flow.series(t, N), beta, N)
    for f in probe_functions(N)[:3]:
        gen_res = max(gen_res, check_generator_identity(T_flow, G, beta, f))

    # flow recovered from the semigroup generated by the integrated flow
    T_int = lambda t: composition_matrix(integrated.series(t, N), beta, N)
    sums = sorted({round(t + s, 12) for t in tgrid for s in tgrid} | set(tgrid))
    phis = flow_from_semigroup(T_int, sums)
    if zgrid is None:
        zgrid = 0.5 * np.exp(2j * np.pi * np.arange(8) / 8)
        zgrid = np.concatenate([[0.0], zgrid, 0.25 * zgrid])
    zgrid = np.asarray(zgrid, dtype=complex)
    semi = 0.0
    for t in tgrid:
        for s in tgrid:
            lhs = evaluate(phis[round(t + s, 12)], zgrid)
            rhs = evaluate(phis[t], evaluate(phis[s], zgrid))
            semi = max(semi, float(np.max(np.abs(lhs - rhs))))

    growth = growth_bound(T_flow, tgrid)

    ok = (claim1 < tolerances.claim1 and gen_res < tolerances.generator
          and semi < tolerances.semigroup and margin > 0)
    return TheoremReport(claim1, float(gen_res), float(margin), semi,
                         "consistent" if ok else "inconsistent", growth, tolerances)
