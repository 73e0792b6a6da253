"""Truncated complex power series.

A :class:`PowerSeries` stores the Taylor coefficients ``c[0..N]`` of an
analytic function on the unit disc.  Every binary operation truncates to
the smaller of the two operand degrees, so results never claim more
accuracy than their inputs carry.

>>> f = PowerSeries([1, 1], deg=2)
>>> g = PowerSeries([1, -1], deg=2)
>>> (f * g).coeffs.real.tolist()
[1.0, 0.0, -1.0]
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainEscape, TruncationWarning

DEFAULT_DEGREE = 128

# compose() warns when its tail estimate exceeds this
TAIL_WARN_TOL = 1e-12


class PowerSeries:
    """Immutable truncated Taylor series ``sum_{k<=N} c_k z^k``."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex], deg: int | None = None):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if deg is not None:
            if deg < 0:
                raise ValueError("truncation degree must be >= 0")
            if c.size < deg + 1:
                c = np.concatenate([c, np.zeros(deg + 1 - c.size, dtype=complex)])
            else:
                c = c[: deg + 1].copy()
        if not np.all(np.isfinite(c)):
            raise ValueError("power series coefficients must be finite")
        c.flags.writeable = False
        self._c = c

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, deg: int = DEFAULT_DEGREE) -> "PowerSeries":
        return cls([0.0], deg=deg)

    @classmethod
    def constant(cls, value: complex, deg: int = DEFAULT_DEGREE) -> "PowerSeries":
        return cls([value], deg=deg)

    @classmethod
    def identity(cls, deg: int = DEFAULT_DEGREE) -> "PowerSeries":
        if deg == 0:
            return cls([0.0], deg=0)
        return cls([0.0, 1.0], deg=deg)

    @classmethod
    def monomial(cls, n: int, deg: int = DEFAULT_DEGREE, scale: complex = 1.0) -> "PowerSeries":
        c = np.zeros(deg + 1, dtype=complex)
        if n <= deg:
            c[n] = scale
        return cls(c)

    # -- basic accessors ----------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def deg(self) -> int:
        return self._c.size - 1

    trunc_degree = deg

    @property
    def valuation(self) -> int:
        """Index of the first non-zero coefficient (``deg + 1`` for zero)."""
        nz = np.flatnonzero(self._c)
        return int(nz[0]) if nz.size else self.deg + 1

    @property
    def effective_degree(self) -> int:
        """Index of the last non-zero coefficient (0 for the zero series)."""
        nz = np.flatnonzero(self._c)
        return int(nz[-1]) if nz.size else 0

    def __getitem__(self, k):
        return self._c[k]

    def __len__(self):
        return self._c.size

    def __repr__(self):
        shown = ", ".join(f"{c:.4g}" for c in self._c[:6])
        more = ", ..." if self._c.size > 6 else ""
        return f"PowerSeries([{shown}{more}], deg={self.deg})"

    def truncate(self, deg: int) -> "PowerSeries":
        if deg > self.deg:
            raise ValueError(f"cannot raise truncation degree {self.deg} to {deg}")
        return PowerSeries(self._c[: deg + 1])

    def pad(self, deg: int) -> "PowerSeries":
        """Extend with zero coefficients; only sound for genuine polynomials."""
        return PowerSeries(self._c, deg=deg)

    def at_degree(self, deg: int) -> "PowerSeries":
        return self.truncate(deg) if deg <= self.deg else self.pad(deg)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, PowerSeries):
            return other
        if np.isscalar(other):
            return PowerSeries.constant(other, deg=self.deg)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return add(self, -other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if np.isscalar(other):
            return PowerSeries(self._c * other)
        if isinstance(other, PowerSeries):
            return multiply(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return PowerSeries(self._c / other)
        return NotImplemented

    def __call__(self, z):
        return evaluate(self, z)

    # -- serialisation ------------------------------------------------
    def to_json(self) -> dict:
        return {"deg": self.deg, "re": self._c.real.tolist(), "im": self._c.imag.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "PowerSeries":
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ValueError("re and im must have equal length")
        deg = int(data.get("deg", re.size - 1))
        if re.size != deg + 1:
            raise ValueError(f"expected {deg + 1} coefficients, got {re.size}")
        return cls(re + 1j * im)


@dataclass(frozen=True)
class DiscPoint:
    """A point of the open unit disc, optionally inside a guard radius.

    ``eps`` demands ``|z| <= 1 - eps``; with the default 0 only ``|z| < 1``
    is enforced.
    """

    z: complex
    eps: float = 0.0

    def __post_init__(self):
        z = complex(self.z)
        object.__setattr__(self, "z", z)
        if self.eps > 0:
            if abs(z) > (1 - self.eps) * (1 + 1e-12):
                raise DomainEscape(f"|z| = {abs(z):.6g} exceeds guard radius 1 - {self.eps:g}",
                                   point=z)
        elif abs(z) >= 1:
            raise DomainEscape(f"|z| = {abs(z):.6g} is not inside the unit disc", point=z)

    def __complex__(self):
        return self.z

    def __abs__(self):
        return abs(self.z)


def _as_series(f) -> PowerSeries:
    return f if isinstance(f, PowerSeries) else PowerSeries(f)


def add(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    n = min(f.deg, g.deg)
    return PowerSeries(f.coeffs[: n + 1] + g.coeffs[: n + 1])


def _mul_coeffs(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return np.convolve(a[: n + 1], b[: n + 1])[: n + 1]


def multiply(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    """Cauchy product truncated at ``min(f.deg, g.deg)``."""
    n = min(f.deg, g.deg)
    return PowerSeries(_mul_coeffs(f.coeffs, g.coeffs, n))


def derivative(f: PowerSeries) -> PowerSeries:
    if f.deg == 0:
        return PowerSeries([0.0], deg=0)
    k = np.arange(1, f.deg + 1)
    return PowerSeries(k * f.coeffs[1:])


def antiderivative(f: PowerSeries, constant: complex = 0.0) -> PowerSeries:
    """Primitive vanishing at 0 (plus ``constant``); degree rises by one."""
    k = np.arange(1, f.deg + 2)
    return PowerSeries(np.concatenate([[constant], f.coeffs / k]))


def reciprocal(f: PowerSeries) -> PowerSeries:
    """Series of ``1/f``; requires ``f(0) != 0``."""
    c = f.coeffs
    if c[0] == 0:
        raise ZeroDivisionError("reciprocal of a series vanishing at 0")
    out = np.zeros_like(c)
    out[0] = 1.0 / c[0]
    for k in range(1, c.size):
        out[k] = -np.dot(c[1 : k + 1], out[k - 1 :: -1][:k]) / c[0]
    return PowerSeries(out)


def _compose_coeffs(fc: np.ndarray, gc: np.ndarray, n: int) -> np.ndarray:
    # Horner in the truncated ring; trailing zeros of f are skipped
    nz = np.flatnonzero(fc[: n + 1])
    top = int(nz[-1]) if nz.size else 0
    g = gc[: n + 1]
    acc = np.zeros(n + 1, dtype=complex)
    acc[0] = fc[top]
    for k in range(top - 1, -1, -1):
        acc = np.convolve(acc, g)[: n + 1]
        acc[0] += fc[k]
    return acc


def compose_tail_estimate(f: PowerSeries, g: PowerSeries) -> float:
    """Heuristic size of the error from ``f``'s unknown tail in ``f o g``."""
    n = min(f.deg, g.deg)
    g0 = abs(g.coeffs[0])
    if g0 == 0:
        return 0.0
    return float(g0 ** (n + 1) * np.sum(np.abs(f.coeffs)))


def compose_with_error(f: PowerSeries, g: PowerSeries) -> tuple[PowerSeries, float]:
    """``f o g`` together with :func:`compose_tail_estimate`."""
    g0 = g.coeffs[0]
    if abs(g0) >= 1:
        raise DomainEscape(f"inner series has |g(0)| = {abs(g0):.6g} >= 1")
    n = min(f.deg, g.deg)
    return PowerSeries(_compose_coeffs(f.coeffs, g.coeffs, n)), compose_tail_estimate(f, g)


def compose(f: PowerSeries, g: PowerSeries) -> PowerSeries:
    """Taylor coefficients of ``f o g`` up to the shared truncation degree.

    When ``g(0) != 0`` every coefficient of ``f`` feeds every coefficient of
    the result, so the unknown tail of ``f`` leaks in.  A
    :class:`TruncationWarning` is issued when the tail estimate exceeds
    ``TAIL_WARN_TOL``; use :func:`compose_with_error` to get it as a number.
    """
    out, err = compose_with_error(f, g)
    if err > TAIL_WARN_TOL:
        warnings.warn(f"composition tail estimate {err:.3g} (|g(0)| = {abs(g.coeffs[0]):.3g})",
                      TruncationWarning, stacklevel=2)
    return out


def evaluate(f: PowerSeries, z) -> complex:
    """Horner evaluation of the stored polynomial at ``z``.

    ``z`` may be a :class:`DiscPoint`, a complex number, or an array of
    points (evaluated elementwise).
    """
    if isinstance(z, DiscPoint):
        z = z.z
    c = f.coeffs
    if np.ndim(z) == 0:
        z = complex(z)
        acc = 0j
        for a in c[::-1]:
            acc = acc * z + a
        return acc
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for a in c[::-1]:
        acc = acc * z + a
    return acc


def power_sequence(g: PowerSeries, nmax: int) -> list[PowerSeries]:
    """``[g**0, g**1, ..., g**nmax]`` at the degree of ``g``."""
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    return [PowerSeries(c) for c in power_coefficients(g, nmax).T]


def power_coefficients(g: PowerSeries, nmax: int) -> np.ndarray:
    """Array whose column ``n`` holds the coefficients of ``g**n``."""
    n = g.deg
    out = np.zeros((n + 1, nmax + 1), dtype=complex)
    out[0, 0] = 1.0
    gc = g.coeffs
    for k in range(1, nmax + 1):
        out[:, k] = np.convolve(out[:, k - 1], gc)[: n + 1]
    return out


def geometric(ratio: complex = 1.0, deg: int = DEFAULT_DEGREE) -> PowerSeries:
    """Truncation of ``1/(1 - ratio*z)``."""
    return PowerSeries(np.asarray(ratio, dtype=complex) ** np.arange(deg + 1))


def exp_series(deg: int = DEFAULT_DEGREE) -> PowerSeries:
    from math import factorial

    return PowerSeries([1.0 / factorial(k) for k in range(deg + 1)])


def max_coeff_distance(f: PowerSeries, g: PowerSeries) -> float:
    n = min(f.deg, g.deg)
    return float(np.max(np.abs(f.coeffs[: n + 1] - g.coeffs[: n + 1])))


def polynomial(coeffs: Sequence[complex], deg: int = DEFAULT_DEGREE) -> PowerSeries:
    """Exact polynomial ``sum coeffs[k] z^k`` represented at degree ``deg``."""
    c = np.asarray(coeffs, dtype=complex)
    if c.size > deg + 1 and np.any(c[deg + 1 :] != 0):
        raise ValueError(f"polynomial of degree {c.size - 1} does not fit in degree {deg}")
    return PowerSeries(c, deg=deg)
