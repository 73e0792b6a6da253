"""Quasicontractivity of the Moebius semigroup on weighted Hardy spaces.

With ``alpha_r(z) = (z + r)/(1 + r z)`` and ``r = tanh t`` the operators
``T_t = C_{alpha_{tanh t}}`` form a semigroup generated by
``f -> (1 - z^2) f'``.  Writing ``x_n = beta_n a_n``, the real part of
``<A f, f>`` becomes ``sum c_n Re(x_n conj(x_{n+1}))`` with the coupling
sequence

    c_n = (n + 1) beta_n / beta_{n+1} - n beta_{n+1} / beta_n,

so the supremum ``Lambda`` over the unit sphere is the top of the spectrum
of the tridiagonal matrix with zero diagonal and off-diagonal ``c_n / 2``,
and ``||T_t|| <= exp(Lambda t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .series import PowerSeries
from .space import (WeightSequence, composition_matrix, operator_norm, weights)

BOUND_RTOL = 1e-6


def _weights(beta, N=None) -> WeightSequence:
    if isinstance(beta, WeightSequence):
        return beta if N is None else beta.truncate(N)
    if N is None:
        raise ValueError("N is required for preset names")
    return weights(beta, N)


def coupling_sequence(beta) -> np.ndarray:
    """``c_0..c_{N-1}`` for weights ``beta_0..beta_N``."""
    b = _weights(beta).values
    if b.size < 2:
        return np.zeros(0)
    n = np.arange(b.size - 1, dtype=float)
    ratio = b[1:] / b[:-1]
    return (n + 1) / ratio - n * ratio


@dataclass(frozen=True)
class LambdaReport:
    lambda_N: float
    sup_abs_c: float
    exponent: float
    bracket: tuple
    N: int
    c_monotone: bool
    c_limit: float
    note: str = ""

    def to_json(self) -> dict:
        return {
            "lambda_N": self.lambda_N,
            "sup_abs_c": self.sup_abs_c,
            "exponent": self.exponent,
            "bracket": list(self.bracket),
            "N": self.N,
            "c_monotone": self.c_monotone,
            "c_limit": self.c_limit,
            "note": self.note,
        }


def lambda_truncated(beta, N: int | None = None, tol: float = 1e-13) -> float:
    """Top eigenvalue of the order-``N+1`` truncation of the Lambda form."""
    c = coupling_sequence(_weights(beta, N))
    if c.size == 0:
        return 0.0
    return linalg.tridiagonal_eigenvalue(np.zeros(c.size + 1), c / 2.0, k=-1, tol=tol)


def lambda_report(beta, N: int | None = None) -> LambdaReport:
    """Two-sided bracket ``[Lambda_N, sup |c_n|]`` for the Lambda supremum.

    ``Lambda_N`` is nondecreasing in ``N`` (interlacing) and never exceeds
    ``sup |c_n|``.  When ``c_n`` is nondecreasing the Toeplitz comparison
    gives ``lim Lambda_N = lim c_n``, recorded in ``note``.
    """
    w = _weights(beta, N)
    if w.N < 1:
        raise ValueError("need N >= 1")
    c = coupling_sequence(w)
    lam = lambda_truncated(w)
    sup_c = float(np.max(np.abs(c)))
    monotone = bool(np.all(np.diff(c) >= -1e-12 * np.maximum(1.0, np.abs(c[1:]))))
    note = ""
    if monotone and c.size > 1:
        note = "c_n nondecreasing: lim Lambda_N = lim c_n (Toeplitz comparison)"
    return LambdaReport(lambda_N=lam, sup_abs_c=sup_c, exponent=lam / 2.0,
                        bracket=(lam, sup_c), N=w.N, c_monotone=monotone,
                        c_limit=float(c[-1]), note=note)


@dataclass(frozen=True)
class CritsupReport:
    values: list = field(repr=False)
    running_sup: float
    verdict: str
    witnesses: list

    @property
    def bounded(self) -> bool:
        return self.verdict == "bounded-so-far"

    def to_json(self) -> dict:
        return {"values": list(self.values), "running_sup": self.running_sup,
                "verdict": self.verdict, "witnesses": list(self.witnesses)}


def critsup(beta, N: int | None = None, growth: float = 1.5, windows: int = 3,
            threshold: float = 10.0) -> CritsupReport:
    """``n |1 - beta_{n+1}/beta_n|`` for ``n < N`` with a divergence verdict.

    The values are grouped into dyadic windows ``[2^k, 2^{k+1})``.  The
    verdict is ``diverging`` when the window maxima grow by at least
    ``growth`` over each of the last ``windows`` window transitions and the
    final maximum exceeds ``threshold``; the window argmaxima are listed as
    witnesses.
    """
    b = _weights(beta, N).values
    n = np.arange(b.size - 1, dtype=float)
    vals = n * np.abs(1 - b[1:] / b[:-1])
    maxima, argmax = [], []
    k = 0
    while 2**k < vals.size:
        lo, hi = 2**k, min(2 ** (k + 1), vals.size)
        seg = vals[lo:hi]
        j = int(np.argmax(seg))
        maxima.append(float(seg[j]))
        argmax.append(lo + j)
        k += 1
    diverging = False
    witnesses: list[int] = []
    if len(maxima) > windows:
        tail = maxima[-(windows + 1):]
        ratios = [tail[i + 1] / tail[i] if tail[i] > 0 else math.inf for i in range(windows)]
        if all(r >= growth for r in ratios) and tail[-1] > threshold:
            diverging = True
            witnesses = argmax[-(windows + 1):]
    running = float(np.max(vals)) if vals.size else 0.0
    return CritsupReport(values=vals.tolist(), running_sup=running,
                         verdict="diverging" if diverging else "bounded-so-far",
                         witnesses=witnesses)


def mobius(r: float, N: int = 128) -> PowerSeries:
    """``alpha_r(z) = (z + r)/(1 + r z) = r + (1 - r^2) sum_{k>=1} (-r)^{k-1} z^k``."""
    if not -1 < r < 1:
        raise ValueError("|r| must be < 1")
    c = np.zeros(N + 1, dtype=complex)
    c[0] = r
    if N >= 1:
        k = np.arange(1, N + 1)
        c[1:] = (1 - r * r) * (-r) ** (k - 1)
    return PowerSeries(c)


def mobius_parameter(r: float, s: float) -> float:
    """Parameter of ``alpha_r o alpha_s``."""
    return (r + s) / (1 + r * s)


def univalent_bound(phi0: complex, a: float) -> float:
    """``((1 + |phi0|) / (1 - |phi0|))^a``."""
    m = abs(phi0)
    if m >= 1:
        raise ValueError("|phi0| must be < 1")
    if a < 0:
        raise ValueError("a must be >= 0")
    return ((1 + m) / (1 - m)) ** a


@dataclass(frozen=True)
class BoundRow:
    t: float
    norm_N: float
    bound: float
    margin: float

    def to_json(self):
        return {"t": self.t, "norm_N": self.norm_N, "bound": self.bound, "margin": self.margin}


def verify_quasicontractive_bound(beta, tgrid, N: int, **norm_kw) -> list[BoundRow]:
    """Compression norm of ``C_{alpha_{tanh t}}`` against ``exp(Lambda_N t)``."""
    w = _weights(beta, N)
    if not critsup(w).bounded:
        raise ValueError("critsup diverges: no finite Lambda to test against")
    lam = lambda_truncated(w)
    rows = []
    for t in tgrid:
        t = float(t)
        M = composition_matrix(mobius(math.tanh(t), N), w, N)
        norm = operator_norm(M, **norm_kw).norm
        bound = math.exp(lam * t)
        rows.append(BoundRow(t, norm, bound, bound - norm))
    return rows


@dataclass(frozen=True)
class UnivRow:
    flow: str
    t: float
    phi0: complex
    norm_N: float
    bound: float
    violation: bool

    def to_json(self):
        return {"flow": self.flow, "t": self.t, "phi0": [self.phi0.real, self.phi0.imag],
                "norm_N": self.norm_N, "bound": self.bound, "violation": self.violation}


def check_proposition_univ(beta, flows, tgrid, N: int, rtol: float = BOUND_RTOL,
                           **norm_kw) -> list[UnivRow]:
    """Compare ``||C_{phi_t}||`` (compression) with the univalent bound.

    ``flows`` maps a label to a :class:`~semiflow.flow.Flow`; the exponent is
    ``a = Lambda_N / 2``.
    """
    from ._parallel import pmap

    w = _weights(beta, N)
    a = lambda_truncated(w) / 2.0
    cells = [(name, fl, float(t)) for name, fl in flows.items() for t in tgrid]

    def run(cell):
        name, fl, t = cell
        phi = fl.series(t, N)
        norm = operator_norm(composition_matrix(phi, w, N), **norm_kw).norm
        phi0 = complex(phi.coeffs[0])
        bound = univalent_bound(phi0, a)
        return UnivRow(name, t, phi0, norm, bound, norm > bound * (1 + rtol))

    return pmap(run, cells)


@dataclass(frozen=True)
class DominationVerdict:
    ratio_decreasing: bool
    beta0_ge_beta1: bool
    critsup_bounded: bool
    verdict: str

    def to_json(self):
        return {"ratio_decreasing": self.ratio_decreasing, "beta0_ge_beta1": self.beta0_ge_beta1,
                "critsup_bounded": self.critsup_bounded, "verdict": self.verdict}


POSITIVE_VERDICT = "quasicontractive for all flows, est-univ applies"


def check_dirichlet_domination(beta, N: int | None = None) -> DominationVerdict:
    """Sufficient test: ``beta_n/sqrt(n)`` nonincreasing, ``beta_0 >= beta_1``, critsup bounded."""
    w = _weights(beta, N)
    b = w.values
    ratio = b[1:] / np.sqrt(np.arange(1, b.size))
    dec = bool(np.all(np.diff(ratio) <= 1e-12 * ratio[1:]))
    first = bool(b.size < 2 or b[0] >= b[1] * (1 - 1e-15))
    bounded = critsup(w).bounded
    verdict = POSITIVE_VERDICT if dec and first and bounded else "inconclusive"
    return DominationVerdict(dec, first, bounded, verdict)
