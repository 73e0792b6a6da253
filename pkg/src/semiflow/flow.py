"""Holomorphic flows on the unit disc.

A flow is specified by its infinitesimal generator ``G``: the maps
``phi_t`` solve ``d/dt phi_t(z) = G(phi_t(z))``, ``phi_0(z) = z``.  Two
independent numerical routes are provided:

* :func:`solve_cp_series` integrates the Taylor coefficients of ``phi_t``
  as an ``(N+1)``-dimensional ODE,
* :func:`flow_at_point` integrates the scalar ODE for one starting point.

A handful of flows with closed forms live in :func:`catalog`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import ode
from ._parallel import pmap
from .errors import DomainEscape, UnknownCatalogEntry
from .series import DEFAULT_DEGREE, PowerSeries, _compose_coeffs, reciprocal

GUARD_EPS = 1e-3
FLOW_TOL = 1e-10


@dataclass(frozen=True)
class GeneratorFunction:
    """Polynomial generator ``G(z) = sum coeffs[k] z^k`` (zero tail implied)."""

    coeffs: tuple
    kind: str = "custom"
    params: tuple = ()

    def __post_init__(self):
        c = tuple(complex(a) for a in np.atleast_1d(np.asarray(self.coeffs, dtype=complex)))
        if not all(cmath.isfinite(a) for a in c):
            raise ValueError("generator coefficients must be finite")
        object.__setattr__(self, "coeffs", c or (0j,))

    @classmethod
    def from_series(cls, g: PowerSeries, kind: str = "custom") -> "GeneratorFunction":
        return cls(tuple(g.coeffs), kind=kind)

    @property
    def degree(self) -> int:
        nz = [k for k, a in enumerate(self.coeffs) if a != 0]
        return nz[-1] if nz else 0

    def series(self, deg: int = DEFAULT_DEGREE) -> PowerSeries:
        c = np.asarray(self.coeffs[: self.degree + 1], dtype=complex)
        if c.size > deg + 1:
            raise ValueError(f"generator of degree {c.size - 1} exceeds truncation {deg}")
        return PowerSeries(c, deg=deg)

    def __call__(self, z):
        acc = 0j if np.ndim(z) == 0 else np.zeros_like(np.asarray(z, dtype=complex))
        for a in reversed(self.coeffs):
            acc = acc * z + a
        return acc

    def __neg__(self) -> "GeneratorFunction":
        return GeneratorFunction(tuple(-a for a in self.coeffs), kind=f"-{self.kind}")

    def label(self) -> str:
        if self.params:
            return f"{self.kind}:{','.join(format(p) for p in self.params)}"
        return self.kind


def _outside_guard(z: complex, eps: float) -> bool:
    return abs(z) > (1 - eps) * (1 + 1e-12)


def _as_generator(G) -> GeneratorFunction:
    if isinstance(G, GeneratorFunction):
        return G
    if isinstance(G, PowerSeries):
        return GeneratorFunction.from_series(G)
    return GeneratorFunction(tuple(G))


def solve_cp_series(
    G,
    t: float,
    N: int = DEFAULT_DEGREE,
    *,
    start: PowerSeries | None = None,
    eps: float = GUARD_EPS,
    tol: float = FLOW_TOL,
    steps: int | None = None,
) -> PowerSeries:
    """Taylor series of ``phi_t`` to degree ``N``.

    Integrates ``c' = Taylor_N(G o c)`` from ``c(0) = id`` (or ``start``).
    Since ``G`` is a polynomial, ``G o c`` truncated at ``N`` depends only on
    the first ``N+1`` coefficients, so the truncated system is closed.

    Raises :class:`DomainEscape` when ``|phi_t(0)|`` reaches ``1 - eps``.
    """
    G = _as_generator(G)
    if t < 0:
        raise ValueError("t must be >= 0; pass -G for the backward flow")
    gc = np.asarray(G.coeffs, dtype=complex)
    c0 = PowerSeries.identity(N) if start is None else start.at_degree(N)
    if abs(c0.coeffs[0]) >= 1 - eps:
        raise DomainEscape("initial series centre outside the guard disc", exit_time=0.0)

    def rhs(c):
        return _compose_coeffs(gc, c, N)

    def escaped(c):
        return abs(c[0]) - (1 - eps)

    res = ode.integrate(rhs, c0.coeffs, t, tol=tol, event=escaped, steps=steps)
    if res.event_time is not None:
        raise DomainEscape(
            f"phi_t(0) left |w| < 1 - {eps:g} at t = {res.event_time:.6g}",
            exit_time=res.event_time, point=0j)
    return PowerSeries(res.y)


def flow_at_point(
    G,
    z,
    t: float,
    *,
    eps: float = GUARD_EPS,
    tol: float = FLOW_TOL,
    steps: int | None = None,
) -> complex:
    """``phi_t(z)`` by RK4 on the scalar ODE ``w' = G(w)``.

    Negative ``t`` integrates ``-G``.  The start point has to satisfy
    ``|z| <= 1 - eps``; the trajectory raises :class:`DomainEscape` once it
    reaches the unit circle.
    """
    G = _as_generator(G)
    z = complex(z)
    if _outside_guard(z, eps):
        raise DomainEscape(f"start point |z| = {abs(z):.6g} outside guard radius", point=z)
    if t == 0:
        return z
    sign = 1.0 if t > 0 else -1.0
    coeffs = tuple(sign * a for a in G.coeffs)

    def rhs(w):
        acc = 0j
        wv = complex(w)
        for a in reversed(coeffs):
            acc = acc * wv + a
        return np.asarray(acc)

    res = ode.integrate(rhs, z, abs(t), tol=tol, event=lambda w: abs(complex(w)) - 1.0,
                        steps=steps)
    if res.event_time is not None:
        raise DomainEscape(
            f"trajectory from z = {z:.6g} left the unit disc at t = {sign * res.event_time:.6g}",
            exit_time=sign * res.event_time, point=z)
    return complex(res.y)


def trajectory(G, z, times: Sequence[float], *, eps=GUARD_EPS, tol=FLOW_TOL) -> np.ndarray:
    """``phi_t(z)`` on an increasing grid of non-negative times, one integration."""
    G = _as_generator(G)
    z = complex(z)
    if _outside_guard(z, eps):
        raise DomainEscape(f"start point |z| = {abs(z):.6g} outside guard radius", point=z)
    times = [float(t) for t in times]
    coeffs = G.coeffs

    def rhs(w):
        acc = 0j
        wv = complex(w)
        for a in reversed(coeffs):
            acc = acc * wv + a
        return np.asarray(acc)

    res = ode.integrate(rhs, z, max(times), tol=tol, t_eval=times,
                        event=lambda w: abs(complex(w)) - 1.0)
    if res.event_time is not None:
        raise DomainEscape(
            f"trajectory from z = {z:.6g} left the unit disc at t = {res.event_time:.6g}",
            exit_time=res.event_time, point=z)
    lookup = dict(zip(res.ts, res.ys))
    return np.array([complex(lookup[t]) for t in times])


@dataclass(frozen=True)
class Flow:
    """A holomorphic flow, closed-form or integrated from its generator.

    ``closed_point(z, t)`` and ``closed_series(t, N)`` are optional exact
    formulas (valid for real ``t`` of either sign on a neighbourhood of 0).
    Without them every query integrates the Cauchy problem.
    """

    generator: GeneratorFunction
    closed_point: Callable | None = field(default=None, compare=False, repr=False)
    closed_series: Callable | None = field(default=None, compare=False, repr=False)
    eps: float = GUARD_EPS
    tol: float = FLOW_TOL
    horizon: float = math.inf
    name: str = "custom"

    @property
    def source(self) -> str:
        return "closed-form" if self.closed_point is not None else "integrated-ode"

    def integrated(self) -> "Flow":
        return Flow(self.generator, eps=self.eps, tol=self.tol, horizon=self.horizon,
                    name=self.name)

    def _check_time(self, t):
        if t > self.horizon:
            raise ValueError(f"t = {t} beyond flow horizon {self.horizon}")

    def at(self, z, t: float) -> complex:
        self._check_time(t)
        if t == 0:
            return complex(z)
        if self.closed_point is not None:
            if _outside_guard(complex(z), self.eps):
                raise DomainEscape("start point outside guard radius", point=complex(z))
            w = complex(self.closed_point(complex(z), t))
            if not abs(w) < 1:
                raise DomainEscape(f"closed form left the disc at t = {t}", exit_time=t,
                                   point=complex(z))
            return w
        return flow_at_point(self.generator, z, t, eps=self.eps, tol=self.tol)

    def series(self, t: float, N: int = DEFAULT_DEGREE) -> PowerSeries:
        self._check_time(t)
        if t == 0:
            return PowerSeries.identity(N)
        if self.closed_series is not None:
            return self.closed_series(t, N)
        if t < 0:
            return solve_cp_series(-self.generator, -t, N, eps=self.eps, tol=self.tol)
        return solve_cp_series(self.generator, t, N, eps=self.eps, tol=self.tol)


@dataclass(frozen=True)
class FlowCheckReport:
    semigroup_residual: float
    selfmap_margin: float
    continuity_residual: float

    def to_json(self) -> dict:
        return {
            "semigroup_residual": self.semigroup_residual,
            "selfmap_margin": self.selfmap_margin,
            "continuity_residual": self.continuity_residual,
        }


def check_flow_axioms(flow: Flow, tgrid, sgrid, zgrid, delta: float = 1e-6) -> FlowCheckReport:
    """Residuals of the flow axioms on a grid.

    ``semigroup_residual`` is ``max |phi_{t+s}(z) - phi_t(phi_s(z))|`` (the
    ``t = 0`` row tests ``phi_0 = id``), ``selfmap_margin`` is
    ``min (1 - |phi_t(z)|)`` and ``continuity_residual`` is
    ``max |phi_{t+delta}(z) - phi_t(z)|``.
    """
    tgrid = [float(t) for t in tgrid]
    sgrid = [float(s) for s in sgrid]
    zgrid = [complex(z) for z in zgrid]

    def per_point(z):
        semi, margin, cont = 0.0, math.inf, 0.0
        for s in sgrid:
            ws = flow.at(z, s)
            margin = min(margin, 1 - abs(ws))
            for t in tgrid:
                lhs = flow.at(z, t + s)
                rhs = flow.at(ws, t) if t != 0 else ws
                semi = max(semi, abs(lhs - rhs))
                margin = min(margin, 1 - abs(lhs))
        for t in tgrid:
            cont = max(cont, abs(flow.at(z, t + delta) - flow.at(z, t)))
        return semi, margin, cont

    rows = pmap(per_point, zgrid)
    return FlowCheckReport(
        semigroup_residual=max(r[0] for r in rows),
        selfmap_margin=min(r[1] for r in rows),
        continuity_residual=max(r[2] for r in rows),
    )


def selfmap_margin(flow: Flow, tgrid, n_ring: int = 64) -> float:
    """``min (1 - |phi_t(z)|)`` over ``|z| = 1 - eps`` and the time grid."""
    ring = (1 - flow.eps) * np.exp(2j * np.pi * np.arange(n_ring) / n_ring)
    tgrid = sorted(float(t) for t in tgrid)

    def per_point(z):
        if flow.closed_point is not None:
            return min(1 - abs(flow.at(z, t)) for t in tgrid)
        path = trajectory(flow.generator, z, [0.0] + tgrid, eps=flow.eps, tol=flow.tol)
        return float(np.min(1 - np.abs(path)))

    return min(pmap(per_point, list(ring)))


# -- catalog ----------------------------------------------------------

def _mobius_series(r: float, N: int) -> PowerSeries:
    c = np.zeros(N + 1, dtype=complex)
    c[0] = r
    if N >= 1:
        k = np.arange(1, N + 1)
        c[1:] = (1 - r * r) * (-r) ** (k - 1)
    return PowerSeries(c)


def _parabolic_series(t: float, N: int) -> PowerSeries:
    # (t + (1-t) z) / ((1+t) - t z)
    num = PowerSeries([t, 1 - t], deg=N)
    den = PowerSeries([1 + t, -t], deg=N)
    return num * reciprocal(den)


def catalog(name: str, *params, eps: float = GUARD_EPS, tol: float = FLOW_TOL):
    """Generator and closed-form flow for a named example.

    ``dilation(c)``: ``G = -c z``, ``phi_t = e^{-ct} z`` (``Re c >= 0``);
    ``rotation(theta)``: ``G = i theta z``; ``hyperbolic``: ``G = 1 - z^2``,
    ``phi_t = alpha_{tanh t}``; ``parabolic``: ``G = (1 - z)^2``.
    """
    key = name.strip().lower()
    if key == "dilation":
        c = complex(params[0]) if params else 1.0
        if c.real < 0:
            raise ValueError("dilation requires Re c >= 0")
        gen = GeneratorFunction((0, -c), kind="dilation", params=(params[0] if params else 1.0,))
        point = lambda z, t: cmath.exp(-c * t) * z
        series = lambda t, N: PowerSeries([0, cmath.exp(-c * t)], deg=N)
    elif key == "rotation":
        th = float(params[0]) if params else 1.0
        gen = GeneratorFunction((0, 1j * th), kind="rotation", params=(th,))
        point = lambda z, t: cmath.exp(1j * th * t) * z
        series = lambda t, N: PowerSeries([0, cmath.exp(1j * th * t)], deg=N)
    elif key == "hyperbolic":
        gen = GeneratorFunction((1, 0, -1), kind="hyperbolic")
        point = lambda z, t: (z + math.tanh(t)) / (1 + math.tanh(t) * z)
        series = lambda t, N: _mobius_series(math.tanh(t), N)
    elif key == "parabolic":
        gen = GeneratorFunction((1, -2, 1), kind="parabolic")
        point = lambda z, t: (z + t * (1 - z)) / (1 + t * (1 - z))
        series = _parabolic_series
    else:
        raise UnknownCatalogEntry(name)
    flow = Flow(gen, closed_point=point, closed_series=series, eps=eps, tol=tol,
                name=gen.label())
    return gen, flow


CATALOG_NAMES = ("dilation", "rotation", "hyperbolic", "parabolic")


def parse_generator(text: str, eps: float = GUARD_EPS, tol: float = FLOW_TOL):
    """Parse ``name[:p1,p2]`` or ``custom:[c0, c1, ...]`` into (G, Flow).

    Custom coefficients are JSON numbers or ``[re, im]`` pairs.
    """
    import json

    name, _, rest = text.partition(":")
    if name.strip().lower() == "custom":
        try:
            raw = json.loads(rest)
        except json.JSONDecodeError as exc:
            raise ValueError(f"custom generator needs a JSON coefficient list: {exc}") from None
        if not isinstance(raw, list) or not raw:
            raise ValueError("custom generator needs a non-empty coefficient list")
        coeffs = [complex(a[0], a[1]) if isinstance(a, list) else complex(a) for a in raw]
        gen = GeneratorFunction(tuple(coeffs))
        return gen, Flow(gen, eps=eps, tol=tol, name=f"custom:{rest.strip()}")
    params = [p for p in rest.split(",") if p.strip()] if rest else []
    vals = []
    for p in params:
        v = complex(p.strip().replace("i", "j"))
        vals.append(v.real if v.imag == 0 else v)
    return catalog(name, *vals, eps=eps, tol=tol)


def start_grid(count: int, eps: float = GUARD_EPS) -> np.ndarray:
    """``count`` start points on a golden-angle spiral out to ``|z| = 1 - eps``."""
    k = np.arange(count)
    radii = (1 - eps) * (k + 1) / count
    angles = 2 * np.pi * k * (math.sqrt(5) - 1) / 2
    return radii * np.exp(1j * angles)
