"""Hitting-time generating functions and loop resummation, bit-exact.

Levels 0 = a_0 < a_1 < ... < a_N are sites on the half-line (reflected
Brownian motion) or concentric sphere radii (Bessel(3) process). All
generating functions are exact series in w, where w^2 = 2z for the
Laplace variable z.

Closed forms, with levels a < b < c:

  reflected walk
    a -> b (free)          cosh(a w) / cosh(b w)
    b -> a avoiding c      sinh((c-b) w) / sinh((c-a) w)
    b -> c avoiding a      sinh((b-a) w) / sinh((c-a) w)

  Bessel(3)
    a -> b (free)          (b/a) sinh(a w) / sinh(b w), limit b w / sinh(b w) at a = 0
    taboo moves            radial prefactor target/start times the sinh ratio
    b -> 0 avoiding c      the zero series (the origin is never reached)

Every sinh ratio is built from sinh(c w)/(c w) kernels, whose constant
term is 1, so no leading-power bookkeeping is needed. The full transform
from 0 to the top level factors as (forward taboo moves) x (geometric
resummation of the loop kernels); `decomposition_residual` certifies the
factorization against the closed form, coefficient by coefficient, and
must be exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .series import (
    ExactScalar,
    Kernel,
    PowerSeries,
    as_scalar,
    geometric_resum,
    kernel,
    ps_div,
    ps_mul,
)

_ZERO = Fraction(0)


class InvalidSystemError(ValueError):
    """Level list violates the walk's constraints."""


class InvalidMoveError(ValueError):
    """Move is not one the closed forms cover."""


class Walk(str, Enum):
    REFLECTED_1D = "1d"
    BESSEL_3D = "bessel"


# loops the engine resums: one kernel per adjacent site pair that the
# walk can revisit. The reflected walk loops from the first site down to
# the origin; the Bessel walk cannot return to the origin, so its first
# loop sits one level higher and a fourth level stays within two loops.
_MAX_LEVELS = {Walk.REFLECTED_1D: 3, Walk.BESSEL_3D: 4}


@dataclass(frozen=True)
class LevelSystem:
    walk: Walk
    levels: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "walk", Walk(self.walk))
        levels = tuple(as_scalar(v) for v in self.levels)
        object.__setattr__(self, "levels", levels)
        if len(levels) < 2:
            raise InvalidSystemError("need at least levels (0, a_1)")
        if levels[0] != 0:
            raise InvalidSystemError(f"a_0 must be exactly 0, got {levels[0]}")
        if any(a >= b for a, b in zip(levels, levels[1:])):
            raise InvalidSystemError(f"levels must strictly increase: {levels}")
        if self.top_index > _MAX_LEVELS[self.walk]:
            raise InvalidSystemError(
                f"{self.walk.value} systems support at most "
                f"{_MAX_LEVELS[self.walk]} levels above the origin"
            )

    @property
    def top_index(self) -> int:
        return len(self.levels) - 1


@dataclass(frozen=True)
class PhiMove:
    """A site-to-site move, optionally avoiding the adjacent site beyond."""

    from_level: int
    to_level: int
    taboo_level: int | None = None


def _sinh_ratio(num_arg: Fraction, den_arg: Fraction, order: int) -> PowerSeries:
    """sinh(num_arg w)/sinh(den_arg w) for 0 < num_arg < den_arg."""
    ratio = ps_div(
        kernel(Kernel.SINH_OVER_ARG, num_arg, order, "w"),
        kernel(Kernel.SINH_OVER_ARG, den_arg, order, "w"),
    )
    return ratio.scale(num_arg / den_arg)


def phi(system: LevelSystem, move: PhiMove, order: int) -> PowerSeries:
    """Exact series in w of the move's hitting-time transform."""
    levels = system.levels
    f, t, tb = move.from_level, move.to_level, move.taboo_level
    top = system.top_index
    for idx in (f, t) + (() if tb is None else (tb,)):
        if not 0 <= idx <= top:
            raise InvalidMoveError(f"level index {idx} outside 0..{top}")
    if f == t:
        raise InvalidMoveError("move must change level")
    if tb is None:
        if t < f:
            raise InvalidMoveError("downward moves require a taboo level")
        if system.walk is Walk.REFLECTED_1D:
            return ps_div(
                kernel(Kernel.COSH, levels[f], order, "w"),
                kernel(Kernel.COSH, levels[t], order, "w"),
            )
        # (b/a) sinh(a w)/sinh(b w) == shifted-sinh ratio, exact at a = 0 too
        return ps_div(
            kernel(Kernel.SINH_OVER_ARG, levels[f], order, "w"),
            kernel(Kernel.SINH_OVER_ARG, levels[t], order, "w"),
        )
    # taboo moves: the avoided site sits adjacent on the far side
    if t > f:
        if tb != f - 1:
            raise InvalidMoveError(
                f"upward move {f}->{t} must avoid level {f - 1}, got {tb}"
            )
        ratio = _sinh_ratio(
            levels[f] - levels[tb], levels[t] - levels[tb], order
        )
    else:
        if tb != f + 1:
            raise InvalidMoveError(
                f"downward move {f}->{t} must avoid level {f + 1}, got {tb}"
            )
        if system.walk is Walk.BESSEL_3D and levels[t] == 0:
            return PowerSeries.zero(order, "w")
        ratio = _sinh_ratio(
            levels[tb] - levels[f], levels[tb] - levels[t], order
        )
    if system.walk is Walk.BESSEL_3D:
        ratio = ratio.scale(levels[t] / levels[f])
    return ratio


def loop_kernels(system: LevelSystem, order: int) -> list[PowerSeries]:
    """Back-and-forth excursion kernels I between adjacent revisitable sites."""
    N = system.top_index
    kernels = []
    if system.walk is Walk.REFLECTED_1D:
        if N >= 2:
            kernels.append(
                ps_mul(
                    phi(system, PhiMove(0, 1), order),
                    phi(system, PhiMove(1, 0, 2), order),
                )
            )
        if N >= 3:
            kernels.append(
                ps_mul(
                    phi(system, PhiMove(1, 2, 0), order),
                    phi(system, PhiMove(2, 1, 3), order),
                )
            )
    else:
        if N >= 3:
            kernels.append(
                ps_mul(
                    phi(system, PhiMove(1, 2, 0), order),
                    phi(system, PhiMove(2, 1, 3), order),
                )
            )
        if N >= 4:
            kernels.append(
                ps_mul(
                    phi(system, PhiMove(2, 3, 1), order),
                    phi(system, PhiMove(3, 2, 4), order),
                )
            )
    return kernels


def chain_mgf(system: LevelSystem, order: int) -> PowerSeries:
    """0 -> a_N as forward taboo moves times the resummed loop sum."""
    N = system.top_index
    out = phi(system, PhiMove(0, 1), order)
    for i in range(1, N):
        out = ps_mul(out, phi(system, PhiMove(i, i + 1, i - 1), order))
    kernels = loop_kernels(system, order)
    if kernels:
        total = kernels[0]
        for extra in kernels[1:]:
            total = total + extra
        out = ps_mul(out, geometric_resum(total))
    return out


def direct_mgf(system: LevelSystem, order: int) -> PowerSeries:
    """Closed form of the 0 -> a_N transform."""
    top = system.levels[-1]
    one = PowerSeries.one(order, "w")
    if system.walk is Walk.REFLECTED_1D:
        return ps_div(one, kernel(Kernel.COSH, top, order, "w"))
    return ps_div(one, kernel(Kernel.SINH_OVER_ARG, top, order, "w"))


def decomposition_residual(system: LevelSystem, order: int) -> ExactScalar:
    """Max |chain - direct| over all retained coefficients; exactly 0."""
    delta = chain_mgf(system, order) - direct_mgf(system, order)
    return max((abs(c) for c in delta.coeffs), default=_ZERO)
