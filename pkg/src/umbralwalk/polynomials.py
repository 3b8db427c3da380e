"""Higher-order Bernoulli and Euler polynomials and related exact data.

B_n^(p)(x) and E_n^(p)(x) are the coefficients of t^n/n! in
(t/(e^t-1))^p e^(xt) and (2/(e^t+1))^p e^(xt). The order-p kernel power
is taken from the shared series memo and the polynomial in x is
assembled from the identity

    n! [t^n] K(t) e^(xt) = sum_j (n!/(n-j)!) K_j x^(n-j),

so no bivariate series type is needed. Also provides Bernoulli/Euler
numbers and the reciprocal-Chebyshev weights p_l^(N) defined by
1/T_N(1/t) = sum_l p_l^(N) t^l.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .series import (
    ExactScalar,
    Kernel,
    PowerSeries,
    as_scalar,
    kernel_power,
    ps_div,
)

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Poly:
    """Dense univariate polynomial with exact rational coefficients.

    Coefficients ascend by degree, trailing zeros are trimmed, and the
    zero polynomial is the empty tuple.
    """

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        vals = [as_scalar(c) for c in self.coeffs]
        while vals and vals[-1] == 0:
            vals.pop()
        object.__setattr__(self, "coeffs", tuple(vals))

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial assigned degree -1."""
        return len(self.coeffs) - 1

    @property
    def leading_coefficient(self) -> Fraction:
        if not self.coeffs:
            return _ZERO
        return self.coeffs[-1]

    def eval(self, x0: int | Fraction) -> Fraction:
        """Exact Horner evaluation."""
        x0 = as_scalar(x0)
        acc = _ZERO
        for c in reversed(self.coeffs):
            acc = acc * x0 + c
        return acc

    def derivative(self) -> "Poly":
        return Poly(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (_ZERO,) * (n - len(self.coeffs))
        b = other.coeffs + (_ZERO,) * (n - len(other.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + Poly(tuple(-c for c in other.coeffs))

    def scale(self, value: int | Fraction) -> "Poly":
        v = as_scalar(value)
        return Poly(tuple(v * c for c in self.coeffs))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = [f"({c})*x^{i}" if i else f"({c})" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(parts)


def eval_poly(q: Poly, x0: int | Fraction) -> ExactScalar:
    return q.eval(x0)


def _appell_from_kernel(kind: Kernel, n: int, p: int) -> Poly:
    """Polynomial n![t^n] of kernel(kind,1)**p * e^(xt), exact in x."""
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    if p < 0:
        raise ValueError(f"order must be nonnegative, got {p}")
    K = kernel_power(kind, 1, p, n + 1)
    n_fact = factorial(n)
    coeffs = [_ZERO] * (n + 1)
    for j in range(n + 1):
        kj = K.coefficient(j)
        if kj != 0:
            # contribution k_j * x^(n-j) * n!/(n-j)!
            coeffs[n - j] = kj * (n_fact // factorial(n - j))
    return Poly(tuple(coeffs))


@lru_cache(maxsize=None)
def hop_bernoulli(n: int, p: int) -> Poly:
    """Higher-order Bernoulli polynomial B_n^(p)(x); p = 0 gives x^n."""
    return _appell_from_kernel(Kernel.BERNOULLI, n, p)


@lru_cache(maxsize=None)
def hop_euler(n: int, p: int) -> Poly:
    """Higher-order Euler polynomial E_n^(p)(x); p = 0 gives x^n."""
    return _appell_from_kernel(Kernel.EULER, n, p)


def bernoulli_number(n: int) -> ExactScalar:
    """B_n = B_n(0)."""
    return hop_bernoulli(n, 1).eval(0)


def euler_number(n: int) -> ExactScalar:
    """E_n = 2^n E_n(1/2); zero for odd n."""
    return Fraction(2) ** n * hop_euler(n, 1).eval(Fraction(1, 2))


def chebyshev_polynomial(N: int) -> Poly:
    """Chebyshev polynomial of the first kind, exact coefficients."""
    if N < 0:
        raise ValueError(f"index must be nonnegative, got {N}")
    t_prev, t_cur = Poly((Fraction(1),)), Poly((_ZERO, Fraction(1)))
    if N == 0:
        return t_prev
    for _ in range(N - 1):
        doubled = Poly((_ZERO,) + tuple(2 * c for c in t_cur.coeffs))
        t_prev, t_cur = t_cur, doubled - t_prev
    return t_cur


def chebyshev_recip_weights(N: int, count: int) -> list[ExactScalar]:
    """First `count` coefficients p_0..p_{count-1} of 1/T_N(1/t).

    Writing T_N(1/t) = Q(t)/t^N with Q a polynomial of degree <= N and
    Q(0) = 2^(N-1) != 0, the weights are the series expansion of
    t^N / Q(t); in particular p_l = 0 for l < N.
    """
    if N < 1:
        raise ValueError(f"Chebyshev index must be >= 1, got {N}")
    if count < N:
        raise ValueError(f"need count >= N, got count={count}, N={N}")
    T = chebyshev_polynomial(N).coeffs
    # Q coefficient of t^j is the x^(N-j) coefficient of T_N
    q = [T[N - j] if 0 <= N - j < len(T) else _ZERO for j in range(count)]
    inv = ps_div(
        PowerSeries.one(count), PowerSeries.from_coeffs(q, count)
    )
    weights = [_ZERO] * count
    for l in range(N, count):
        weights[l] = inv.coefficient(l - N)
    return weights
