"""Weighted Hardy spaces ``H^2(beta)`` and matrix compressions of operators.

The space consists of ``f = sum a_n z^n`` with
``||f||_beta^2 = sum |a_n|^2 beta_n^2``.  Operators are represented in the
orthonormal basis ``e_n = z^n / beta_n`` restricted to ``n <= N``; the
norm of such a compression is a lower bound for the operator norm.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DomainEscape, NoConvergence
from .series import PowerSeries, compose, power_coefficients

PRESETS = ("hardy", "dirichlet", "bergman")


@dataclass(frozen=True)
class WeightSequence:
    """Positive weights ``beta_0..beta_N`` with a descriptive preset tag."""

    values: np.ndarray = field(repr=False)
    preset: str = "custom"

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size == 0:
            raise ValueError("weight sequence is empty")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("weights must be finite and strictly positive")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return self.values.size - 1

    def __len__(self):
        return self.values.size

    def __getitem__(self, n):
        return self.values[n]

    def truncate(self, N: int) -> "WeightSequence":
        if N > self.N:
            raise ValueError(f"weights only known up to n = {self.N}, need {N}")
        return WeightSequence(self.values[: N + 1], self.preset)

    def scaled(self, kappa: float) -> "WeightSequence":
        return WeightSequence(self.values * kappa, f"{kappa:g}*{self.preset}")

    def perturbed(self) -> "WeightSequence":
        """``(2 + (-1)^n) beta_n``: an equivalent norm (constants 1 and 3)."""
        n = np.arange(self.values.size)
        return WeightSequence((2 + (-1.0) ** n) * self.values, f"perturbed:{self.preset}")

    def to_json(self):
        return {"preset": self.preset, "N": self.N}


def hardy(N: int) -> WeightSequence:
    return WeightSequence(np.ones(N + 1), "hardy")


def dirichlet(N: int) -> WeightSequence:
    v = np.sqrt(np.arange(N + 1, dtype=float))
    v[0] = 1.0
    return WeightSequence(v, "dirichlet")


def bergman(N: int) -> WeightSequence:
    return WeightSequence(1.0 / np.sqrt(np.arange(1, N + 2, dtype=float)), "bergman")


def weights(spec, N: int) -> WeightSequence:
    """Build weights from a CLI-style spec.

    Accepts ``hardy``, ``dirichlet``, ``bergman``, ``perturbed:<spec>``, a
    JSON array of positive reals (truncated to ``N``; it must be long
    enough), or an existing :class:`WeightSequence`.
    """
    if isinstance(spec, WeightSequence):
        return spec.truncate(N)
    if isinstance(spec, (list, tuple, np.ndarray)):
        w = WeightSequence(np.asarray(spec, dtype=float))
        return w.truncate(N)
    text = str(spec).strip()
    if text.startswith("["):
        return weights(json.loads(text), N)
    low = text.lower()
    if low.startswith("perturbed"):
        _, _, base = text.partition(":")
        return weights(base or "hardy", N).perturbed()
    if low == "hardy":
        return hardy(N)
    if low == "dirichlet":
        return dirichlet(N)
    if low == "bergman":
        return bergman(N)
    raise ValueError(f"unknown weight preset {spec!r}")


@dataclass(frozen=True)
class OperatorMatrix:
    """Compression of an operator to ``span{e_0..e_N}``, ``e_n = z^n/beta_n``."""

    entries: np.ndarray = field(repr=False)
    beta: WeightSequence
    label: str = ""

    @property
    def N(self) -> int:
        return self.entries.shape[0] - 1

    def basis_vector(self, f: PowerSeries) -> np.ndarray:
        """Coordinates of ``f`` in the orthonormal basis."""
        c = f.at_degree(self.N).coeffs
        return c * self.beta.values[: self.N + 1]

    def from_basis(self, v: np.ndarray) -> PowerSeries:
        return PowerSeries(np.asarray(v) / self.beta.values[: self.N + 1])

    def apply(self, f: PowerSeries) -> PowerSeries:
        return self.from_basis(self.entries @ self.basis_vector(f))

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries @ other.entries, self.beta,
                              f"({self.label})({other.label})")


@dataclass(frozen=True)
class SpaceNormReport:
    norm: float
    lower_bound: bool
    iterations: int
    residual: float
    converged: bool = True

    def to_json(self) -> dict:
        return {"norm": self.norm, "lower_bound": self.lower_bound,
                "iterations": self.iterations, "residual": self.residual,
                "converged": self.converged}


def space_norm(f: PowerSeries, beta: WeightSequence) -> float:
    """``(sum |a_n|^2 beta_n^2)^{1/2}`` over the stored coefficients."""
    if f.deg > beta.N:
        raise ValueError(f"series degree {f.deg} exceeds weights (N = {beta.N})")
    a = np.abs(f.coeffs) * beta.values[: f.deg + 1]
    return float(np.sqrt(np.sum(a * a)))


def _check_degree(N, beta):
    if N > beta.N:
        raise ValueError(f"weights only known up to n = {beta.N}, need {N}")


def composition_matrix(phi: PowerSeries, beta: WeightSequence, N: int | None = None) -> OperatorMatrix:
    """Entry ``(m, n) = (beta_m / beta_n) [z^m] phi^n``."""
    N = phi.deg if N is None else N
    if phi.deg < N:
        raise ValueError(f"symbol known to degree {phi.deg} < N = {N}")
    _check_degree(N, beta)
    if abs(phi.coeffs[0]) >= 1:
        raise DomainEscape(f"|phi(0)| = {abs(phi.coeffs[0]):.6g} >= 1")
    P = power_coefficients(phi.truncate(N), N)
    b = beta.values[: N + 1]
    return OperatorMatrix(P * (b[:, None] / b[None, :]), beta.truncate(N), "C_phi")


def generator_matrix(G, beta: WeightSequence, N: int) -> OperatorMatrix:
    """Compression of ``f -> G f'``: column ``n`` is ``n G z^{n-1}`` rescaled."""
    _check_degree(N, beta)
    g = G.series(N) if hasattr(G, "series") else G
    if g.deg < N:
        raise ValueError(f"generator known to degree {g.deg} < N = {N}")
    gc = g.coeffs
    A = np.zeros((N + 1, N + 1), dtype=complex)
    for n in range(1, N + 1):
        # G z^{n-1} has coefficient gc[m-n+1] at z^m
        m = np.arange(n - 1, N + 1)
        A[m, n] = n * gc[m - n + 1]
    b = beta.values[: N + 1]
    return OperatorMatrix(A * (b[:, None] / b[None, :]), beta.truncate(N), "A")


def operator_norm(M, tol: float = 1e-10, maxiter: int = 5000, restarts: int = 3,
                  seed: int = 0, strict: bool = False) -> SpaceNormReport:
    """Largest singular value of a compression, a lower bound for the full norm.

    Power iteration on ``M* M`` from the all-ones vector plus ``restarts``
    seeded random starts; the best estimate wins.  When the residual stays
    above ``tol`` the report is flagged ``converged=False`` (or
    :class:`NoConvergence` is raised with ``strict=True``).
    """
    E = M.entries if isinstance(M, OperatorMatrix) else np.asarray(M, dtype=complex)
    if maxiter < 1:
        raise ValueError("maxiter must be >= 1")
    off = E - np.diag(np.diag(E))
    if not np.any(off):
        return SpaceNormReport(float(np.max(np.abs(np.diag(E)))), True, 0, 0.0, True)
    n = E.shape[1]
    rng = np.random.default_rng(seed)
    starts = [np.ones(n, dtype=complex)]
    starts += [rng.standard_normal(n) + 1j * rng.standard_normal(n) for _ in range(restarts)]
    best = None
    total = 0
    for v0 in starts:
        sigma, it, res = linalg.power_norm(E, v0, tol, maxiter)
        total += it
        if best is None or sigma > best[0]:
            best = (sigma, res)
    sigma, res = best
    ok = res <= tol
    if strict and not ok:
        raise NoConvergence(f"power iteration residual {res:.3g} > {tol:g}", estimate=sigma)
    return SpaceNormReport(sigma, True, total, res, ok)


def composition_norm(phi_at, beta_spec, N: int, **kw) -> tuple[SpaceNormReport, bool]:
    """Compression norm of ``C_phi`` at ``N`` plus a nesting convergence flag.

    ``phi_at(N)`` must return the symbol's series at degree ``N``.  The flag
    is true when the norm changes by less than ``1e-4`` (relative) between
    ``N`` and ``2N``.
    """
    r1 = operator_norm(composition_matrix(phi_at(N), weights(beta_spec, N), N), **kw)
    r2 = operator_norm(composition_matrix(phi_at(2 * N), weights(beta_spec, 2 * N), 2 * N), **kw)
    return r1, abs(r2.norm - r1.norm) <= 1e-4 * max(r2.norm, 1e-300)


def evaluation_norm(z, beta: WeightSequence, N: int | None = None) -> float:
    """Partial reproducing-kernel norm ``(sum_{n<=N} |z|^{2n} / beta_n^2)^{1/2}``."""
    z = complex(getattr(z, "z", z))
    if abs(z) >= 1:
        raise DomainEscape("evaluation point outside the disc", point=z)
    N = beta.N if N is None else N
    _check_degree(N, beta)
    n = np.arange(N + 1)
    terms = np.abs(z) ** (2 * n) / beta.values[: N + 1] ** 2
    return float(np.sqrt(np.sum(terms)))


def random_polynomials(count: int, degree: int, seed: int = 0) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    return [rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
            for _ in range(count)]


def check_contraction_property(beta: WeightSequence, eta: PowerSeries, samples: int = 100,
                               degree: int = 8, seed: int = 0) -> float:
    """``max (||f o eta|| - ||f||)`` over seeded random polynomials ``f``.

    ``eta`` must satisfy ``eta(0) = 0``; univalence is the caller's promise.
    The composition is truncated at ``beta.N``, which can only lower
    ``||f o eta||``.
    """
    if eta.coeffs[0] != 0:
        raise ValueError("eta must fix the origin")
    N = min(beta.N, eta.deg)
    worst = -np.inf
    for c in random_polynomials(samples, min(degree, N), seed):
        f = PowerSeries(c, deg=N)
        worst = max(worst, space_norm(compose(f, eta.truncate(N)), beta) - space_norm(f, beta))
    return float(worst)
