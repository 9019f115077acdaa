"""Coefficient sequences of ``(1 + B(z) t + A(z) t^3)^(-alpha)``.

Three routes produce the normalized polynomials ``P_m(z)`` (the ``A = z``,
``B = 1`` case): the closed binomial sum, a three-term recurrence obtained
from ``u f' = -alpha u' f`` with ``u = 1 + t + z t^3``, and (in the test
suite) brute-force truncated series multiplication.  The recurrence is the
bulk path; the closed form is its oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha > 0 or not math.isfinite(alpha):
        raise ValueError(f"alpha must be a positive finite real, got {alpha!r}")
    return alpha


def _check_index(name: str, value: int) -> int:
    if isinstance(value, bool) or int(value) != value or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class SeriesParams:
    alpha: float
    m_max: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))
        object.__setattr__(self, "m_max", _check_index("m_max", self.m_max))


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class UnivariateCoeffs:
    """Dense coefficients ``c_0 .. c_d`` of one ``P_m(z)``, ascending in ``z``."""

    alpha: float
    m: int
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen(self.coeffs, float))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading_sign(self) -> int:
        """Sign of the top coefficient; always ``(-1)^m``, like every other coefficient."""
        return int(np.sign(self.coeffs[-1]))

    @property
    def end_sign(self) -> int:
        """Sign of ``P_m(z)`` as ``z -> -inf``, i.e. ``(-1)^degree`` times the leading sign."""
        return self.leading_sign * (-1) ** self.degree

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def __len__(self):
        return len(self.coeffs)


class PolynomialZ:
    """Polynomial in ``z`` with ascending coefficients; trailing zeros trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[complex] | np.ndarray):
        arr = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if arr.ndim != 1:
            raise ValueError("coefficients must form a one-dimensional sequence")
        nz = np.flatnonzero(arr)
        arr = arr[: nz[-1] + 1] if nz.size else np.zeros(1, dtype=complex)
        arr.setflags(write=False)
        self.coeffs = arr

    @classmethod
    def constant(cls, c: complex = 1.0) -> "PolynomialZ":
        return cls([c])

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return -1 if self.is_zero else len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.coeffs.imag == 0))

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def __mul__(self, other: "PolynomialZ") -> "PolynomialZ":
        return PolynomialZ(np.convolve(self.coeffs, other.coeffs))

    def __add__(self, other: "PolynomialZ") -> "PolynomialZ":
        n = max(len(self.coeffs), len(other.coeffs))
        out = np.zeros(n, dtype=complex)
        out[: len(self.coeffs)] += self.coeffs
        out[: len(other.coeffs)] += other.coeffs
        return PolynomialZ(out)

    def scale(self, factor: complex) -> "PolynomialZ":
        return PolynomialZ(self.coeffs * factor)

    def derivative(self) -> "PolynomialZ":
        if len(self.coeffs) == 1:
            return PolynomialZ([0.0])
        return PolynomialZ(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def __eq__(self, other):
        if not isinstance(other, PolynomialZ):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"PolynomialZ({self.coeffs.tolist()!r})"


@dataclass(frozen=True)
class BivariateSeries:
    """``H_0 .. H_{m_max}`` as polynomials in ``z``; index by the power of ``t``."""

    alpha: float
    A: PolynomialZ
    B: PolynomialZ
    terms: tuple

    def __getitem__(self, m: int) -> PolynomialZ:
        return self.terms[m]

    def __len__(self):
        return len(self.terms)

    @property
    def m_max(self) -> int:
        return len(self.terms) - 1


class ScaledValue(NamedTuple):
    """A real number stored as ``sign * exp(log_magnitude)``."""

    sign: int
    log_magnitude: float

    @property
    def value(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


def binom_neg_alpha(alpha: float, n: int) -> float:
    """Generalized binomial ``C(-alpha, n) = (-alpha)(-alpha-1)...(-alpha-n+1)/n!``."""
    alpha = _check_alpha(alpha)
    n = _check_index("n", n)
    b = 1.0
    for j in range(n):
        b *= (-alpha - j) / (j + 1)
    return b


def _binom_neg_alpha_table(alpha: float, n_max: int) -> np.ndarray:
    out = np.empty(n_max + 1)
    out[0] = 1.0
    for j in range(n_max):
        out[j + 1] = out[j] * (-alpha - j) / (j + 1)
    return out


def pm_coeffs(alpha: float, m: int) -> UnivariateCoeffs:
    """Closed form ``c_k = C(-alpha, m-2k) * C(m-2k, k)``, ``0 <= k <= m // 3``."""
    alpha = _check_alpha(alpha)
    m = _check_index("m", m)
    table = _binom_neg_alpha_table(alpha, m)
    coeffs = [table[m - 2 * k] * float(math.comb(m - 2 * k, k)) for k in range(m // 3 + 1)]
    return UnivariateCoeffs(alpha, m, coeffs)


def pm_coeffs_recurrence(params: SeriesParams) -> list[UnivariateCoeffs]:
    """All of ``P_0 .. P_{m_max}`` from the recurrence

    ``(n+1) P_{n+1} = -(n+alpha) P_n - (n-2+3 alpha) z P_{n-2}``.

    Every term on the right carries the sign ``(-1)^(n+1)``, so the
    recurrence never cancels and is forward-stable coefficientwise.
    """
    alpha, m_max = params.alpha, params.m_max
    polys = [np.array([1.0])]
    for n in range(m_max):
        nxt = np.zeros((n + 1) // 3 + 1)
        cur = polys[n]
        nxt[: len(cur)] -= (n + alpha) * cur
        if n >= 2:
            prev = polys[n - 2]
            nxt[1 : len(prev) + 1] -= (n - 2 + 3 * alpha) * prev
        polys.append(nxt / (n + 1))
    return [UnivariateCoeffs(alpha, m, c) for m, c in enumerate(polys)]


def hm_coeffs(alpha: float, A: PolynomialZ, B: PolynomialZ, m_max: int) -> BivariateSeries:
    """Coefficients ``H_0 .. H_{m_max}`` of ``(1 + B t + A t^3)^(-alpha)``.

    Uses ``(n+1) H_{n+1} = -(n+alpha) B H_n - (n-2+3 alpha) A H_{n-2}``.
    """
    alpha = _check_alpha(alpha)
    if isinstance(m_max, bool) or int(m_max) != m_max or m_max < 0:
        raise ValueError(f"m_max must be a non-negative integer, got {m_max!r}")
    if A.is_zero and B.is_zero:
        raise ValueError("A and B must not both be the zero polynomial")
    terms = [PolynomialZ.constant(1.0)]
    for n in range(int(m_max)):
        nxt = (B * terms[n]).scale(-(n + alpha))
        if n >= 2:
            nxt = nxt + (A * terms[n - 2]).scale(-(n - 2 + 3 * alpha))
        terms.append(nxt.scale(1.0 / (n + 1)))
    return BivariateSeries(alpha, A, B, tuple(terms))


def derivative_identity_residual(alpha: float, m: int) -> float:
    """Coefficientwise gap in ``-alpha P_m^(alpha+1) = d/dz P_{m+3}^(alpha)``."""
    alpha = _check_alpha(alpha)
    m = _check_index("m", m)
    lhs = -alpha * pm_coeffs(alpha + 1, m).coeffs
    upper = pm_coeffs(alpha, m + 3).coeffs
    rhs = upper[1:] * np.arange(1, len(upper))
    if len(lhs) != len(rhs):
        return math.inf
    return float(np.max(np.abs(lhs - rhs) / (1.0 + np.abs(lhs))))


def eval_scaled(coeffs: UnivariateCoeffs | Sequence[float], z: float) -> ScaledValue:
    """Horner evaluation with the binary exponent carried separately.

    Never overflows, whatever the size of ``|z|^degree``.  It does not cure
    cancellation: for large ``m`` and moderate ``z`` the coefficient route
    is ill-conditioned and :func:`eval_pm` should be used instead.
    """
    c = coeffs.coeffs if isinstance(coeffs, UnivariateCoeffs) else np.asarray(coeffs, float)
    z = float(z)
    mant, expo = 0.0, 0
    for ck in c[::-1]:
        mant *= z
        cm, ce = math.frexp(float(ck))
        if mant == 0.0:
            mant, expo = cm, ce
        elif cm != 0.0:
            # align to the larger exponent so ldexp only ever shrinks
            if ce > expo:
                mant, expo = math.ldexp(mant, expo - ce) + cm, ce
            else:
                mant += math.ldexp(cm, ce - expo)
        if mant == 0.0:
            expo = 0
            continue
        mant, e = math.frexp(mant)
        expo += e
    if mant == 0.0:
        return ScaledValue(0, -math.inf)
    return ScaledValue(1 if mant > 0 else -1, math.log(abs(mant)) + expo * math.log(2.0))


_RESCALE_HI = 1e150
_RESCALE_LO = 1e-150


def eval_pm(alpha: float, m: int, z) -> tuple[np.ndarray, np.ndarray]:
    """Sign and log-magnitude of ``P_m(z)`` by running the recurrence at fixed ``z``.

    For ``z < -4/27`` the wanted solution grows like ``r^(-m)`` with ``r`` the
    modulus of the complex root pair of ``1 + t + z t^3``, which is the
    dominant mode of the recurrence, so forward evaluation keeps full
    relative accuracy where coefficient-based Horner loses everything.
    Accepts scalar or array ``z``; returns ``(sign, log_magnitude)`` arrays.
    """
    alpha = _check_alpha(alpha)
    m = _check_index("m", m)
    z = np.asarray(z, dtype=float)
    shape = z.shape
    z = z.ravel()
    p2 = np.zeros_like(z)  # P_{n-2}
    p1 = np.zeros_like(z)  # P_{n-1}
    p0 = np.ones_like(z)  # P_n
    logscale = np.zeros_like(z)
    for n in range(m):
        nxt = (-(n + alpha) * p0 - z * (n - 2 + 3 * alpha) * p2) / (n + 1)
        p2, p1, p0 = p1, p0, nxt
        big = np.maximum(np.maximum(np.abs(p0), np.abs(p1)), np.abs(p2))
        fix = (big > _RESCALE_HI) | ((big < _RESCALE_LO) & (big > 0))
        if np.any(fix):
            s = np.where(fix, big, 1.0)
            p0, p1, p2 = p0 / s, p1 / s, p2 / s
            logscale += np.log(s)
    sign = np.sign(p0).astype(int)
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(p0)) + logscale
    return sign.reshape(shape), logmag.reshape(shape)


def eval_pm_scaled(alpha: float, m: int, z: float) -> ScaledValue:
    sign, logmag = eval_pm(alpha, m, float(z))
    return ScaledValue(int(sign), float(logmag))
