"""Exact series layer: kernels, arithmetic, resummation."""

from fractions import Fraction as F
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from umbralwalk import (
    ConstantTermError,
    Kernel,
    OrderMismatchError,
    PowerSeries,
    geometric_resum,
    kernel,
    kernel_power,
    ps_div,
    ps_mul,
    ps_pow,
    shift_factor,
    to_csv,
)

ONE8 = PowerSeries.one(8)


def series(values, order=8):
    return PowerSeries.from_coeffs([F(v) for v in values], order)


# --- multiplication -------------------------------------------------------


def test_mul_difference_of_squares():
    a = series([1, 1])
    b = series([1, -1])
    assert ps_mul(a, b) == series([1, 0, -1])


def test_mul_bernoulli_times_uniform_kernel_is_one():
    got = ps_mul(kernel(Kernel.BERNOULLI, 1, 10), kernel(Kernel.UNIFORM, 1, 10))
    assert got == PowerSeries.one(10)


def test_mul_sech_times_cosh_is_one():
    # oracle: multiply the two expansions by hand to order 6
    # sech = 1 - t^2/2 + 5t^4/24 - 61t^6/720, cosh = 1 + t^2/2 + t^4/24 + t^6/720
    sech = series([1, 0, F(-1, 2), 0, F(5, 24), 0, F(-61, 720), 0])
    cosh = series([1, 0, F(1, 2), 0, F(1, 24), 0, F(1, 720), 0])
    assert ps_mul(sech, cosh) == ONE8
    assert ps_mul(kernel(Kernel.SECH, 1, 8), kernel(Kernel.COSH, 1, 8)) == ONE8


def test_mul_order_mismatch_rejected():
    with pytest.raises(OrderMismatchError):
        ps_mul(PowerSeries.one(4), PowerSeries.one(5))


# --- division --------------------------------------------------------------


def test_div_geometric_series():
    got = ps_div(ONE8, series([1, -1]))
    assert got == series([1] * 8)


def test_div_reciprocal_of_bernoulli_kernel():
    # oracle: direct factorial expansion of (e^t - 1)/t
    expected = PowerSeries(tuple(F(1, factorial(n + 1)) for n in range(10)))
    got = ps_div(PowerSeries.one(10), kernel(Kernel.BERNOULLI, 1, 10))
    assert got == expected


def _longdiv_odd_ratio(a, b, order):
    """Brute-force oracle: long division of the raw sinh expansions.

    Both series carry a common leading power of the variable; divide it
    out and run schoolbook division on plain coefficient lists.
    """
    num = [F(a) ** (2 * j + 1) / factorial(2 * j + 1) for j in range(order)]
    den = [F(b) ** (2 * j + 1) / factorial(2 * j + 1) for j in range(order)]
    num_full = [num[j // 2] if j % 2 == 0 else F(0) for j in range(order)]
    den_full = [den[j // 2] if j % 2 == 0 else F(0) for j in range(order)]
    out = []
    rem = list(num_full)
    for k in range(order):
        q = rem[0] / den_full[0]
        out.append(q)
        rem = [
            rem[i + 1] - q * den_full[i + 1] for i in range(len(rem) - 1)
        ]
        rem.append(F(0))
    return out

SINH_RATIO_1_2 = [
    F(1, 2), 0, F(-1, 4), 0, F(5, 48), 0, F(-61, 1440), 0,
    F(277, 16128), 0, F(-50521, 7257600), 0,
]


def test_div_sinh_ratio_golden_values():
    oracle = _longdiv_odd_ratio(1, 2, 12)
    assert oracle == [F(v) for v in SINH_RATIO_1_2]
    got = ps_div(
        kernel(Kernel.SINH_OVER_ARG, 1, 12), kernel(Kernel.SINH_OVER_ARG, 2, 12)
    ).scale(F(1, 2))
    assert list(got.coeffs) == oracle


def test_div_zero_constant_term_rejected():
    t = series([0, 1])
    with pytest.raises(ConstantTermError):
        ps_div(ONE8, t)


# --- powers ----------------------------------------------------------------


def test_pow_zero_is_unit():
    assert ps_pow(series([3, 2, 1]), 0) == ONE8


def test_pow_sech_squared():
    got = ps_pow(kernel(Kernel.SECH, 1, 5), 2)
    assert got == series([1, 0, -1, 0, F(2, 3)], order=5)


def test_pow_monomial():
    t = PowerSeries.from_coeffs([0, 1], 5)
    assert ps_pow(t, 3) == PowerSeries.from_coeffs([0, 0, 0, 1], 5)


def test_pow_negative_exponent_rejected():
    with pytest.raises(ValueError):
        ps_pow(ONE8, -1)


# --- kernels ----------------------------------------------------------------


def test_kernel_bernoulli_golden():
    got = kernel(Kernel.BERNOULLI, 1, 6)
    assert got == series([1, F(-1, 2), F(1, 12), 0, F(-1, 720), 0], order=6)


def test_kernel_sech_golden():
    got = kernel(Kernel.SECH, 1, 6)
    assert got == series([1, 0, F(-1, 2), 0, F(5, 24), 0], order=6)


def test_kernel_exp_zero_scale():
    assert kernel(Kernel.EXP, 0, 4) == PowerSeries.one(4)


def test_kernel_zero_scale_degenerates_to_limit_value():
    for kind in Kernel:
        got = kernel(kind, 0, 5)
        limit = 0 if kind is Kernel.SINH else 1
        assert got == PowerSeries.constant(limit, 5)


@pytest.mark.parametrize("c", [F(1), F(1, 2), F(2), F(3)])
def test_kernel_cancel_identity(c):
    got = ps_mul(kernel(Kernel.BERNOULLI, c, 12), kernel(Kernel.UNIFORM, c, 12))
    assert got == PowerSeries.one(12)


@pytest.mark.parametrize("c", [F(1), F(1, 2), F(3, 2), F(-2)])
def test_kernel_double_scale_factors_through_euler(c):
    lhs = kernel(Kernel.BERNOULLI, 2 * c, 12)
    rhs = ps_mul(kernel(Kernel.BERNOULLI, c, 12), kernel(Kernel.EULER, c, 12))
    assert lhs == rhs


@pytest.mark.parametrize("c", [F(1), F(2, 3), F(-5, 2)])
def test_kernel_parity(c):
    sinh = kernel(Kernel.SINH, c, 11)
    assert all(sinh.coefficient(i) == 0 for i in range(0, 11, 2))
    for kind in (Kernel.COSH, Kernel.SECH, Kernel.SINH_OVER_ARG):
        even = kernel(kind, c, 11)
        assert all(even.coefficient(i) == 0 for i in range(1, 11, 2))


def test_kernel_power_matches_ps_pow():
    base = kernel(Kernel.EULER, F(2, 3), 7)
    for p in (0, 1, 2, 5, 9):
        assert kernel_power(Kernel.EULER, F(2, 3), p, 7) == ps_pow(base, p)


def test_kernel_bad_order_rejected():
    with pytest.raises(ValueError):
        kernel(Kernel.EXP, 1, 0)


# --- geometric resummation ---------------------------------------------------


def test_resum_of_zero_is_one():
    assert geometric_resum(PowerSeries.zero(6)) == PowerSeries.one(6)


def test_resum_scalar_geometric_sum():
    got = geometric_resum(PowerSeries.constant(F(1, 2), 6))
    assert got == PowerSeries.constant(2, 6)


def test_resum_half_sech_squared_roundtrip():
    loop = ps_pow(kernel(Kernel.SECH, 1, 12), 2).scale(F(1, 2))
    res = geometric_resum(loop)
    one = PowerSeries.one(12)
    assert ps_mul(res, one - loop) == one


def test_resum_constant_one_rejected():
    with pytest.raises(ConstantTermError):
        geometric_resum(PowerSeries.one(5))


# --- shift helper -------------------------------------------------------------


def test_shift_factor_removes_leading_power():
    s = PowerSeries.from_coeffs([0, 0, 3, 4], 6)
    got = shift_factor(s, 2)
    assert got == PowerSeries.from_coeffs([3, 4], 4)


def test_shift_factor_rejects_nonzero_low_coefficient():
    with pytest.raises(ConstantTermError):
        shift_factor(PowerSeries.from_coeffs([0, 1, 3], 6), 2)


# --- ring laws (randomized) ---------------------------------------------------

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=8)


@st.composite
def series_triples(draw):
    order = draw(st.integers(min_value=1, max_value=10))
    mk = lambda: PowerSeries(
        tuple(draw(fracs) for _ in range(order))
    )
    return mk(), mk(), mk()


@settings(max_examples=100, deadline=None)
@given(series_triples())
def test_ring_laws(triple):
    a, b, c = triple
    assert ps_mul(a, b) == ps_mul(b, a)
    assert ps_mul(ps_mul(a, b), c) == ps_mul(a, ps_mul(b, c))
    assert ps_mul(a, b + c) == ps_mul(a, b) + ps_mul(a, c)
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)


@settings(max_examples=100, deadline=None)
@given(series_triples())
def test_div_mul_roundtrip(triple):
    a, b, _ = triple
    if b.constant_term == 0:
        b = b + PowerSeries.one(b.order)
    if b.constant_term == 0:
        return
    assert ps_mul(ps_div(a, b), b) == a


# --- concurrency ----------------------------------------------------------------


def test_kernel_power_memo_safe_under_concurrent_use():
    from concurrent.futures import ThreadPoolExecutor

    reference = {
        p: ps_pow(kernel(Kernel.SECH, F(7, 3), 6), p) for p in range(24)
    }
    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(
            pool.map(
                lambda p: (p, kernel_power(Kernel.SECH, F(7, 3), p, 6)),
                list(range(24)) * 4,
            )
        )
    assert all(series == reference[p] for p, series in results)


# --- serialization -------------------------------------------------------------


def test_csv_exact_rationals():
    s = PowerSeries.from_coeffs([F(1, 2), F(-3)], 3)
    assert to_csv(s) == (
        "index,numerator,denominator\n0,1,2\n1,-3,1\n2,0,1\n"
    )


def test_float_coefficients_rejected():
    with pytest.raises(TypeError):
        PowerSeries.from_coeffs([0.5], 2)
