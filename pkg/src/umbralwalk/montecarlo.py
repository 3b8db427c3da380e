"""Stochastic cross-validation of the hitting-time transforms.

Estimates E[e^(-z tau) ; target reached first] by Euler-scheme path
simulation and compares against the closed forms evaluated in double
precision. The reflected walk updates X <- |X + sqrt(dt) G|; the
Bessel(3) walk advances a 3-component Brownian state and watches its
norm. Taboo runs evolve without reflection (absorption happens before
the origin can matter) and paths that reach the forbidden level
contribute zero; paths still alive at the horizon contribute the upper
bound e^(-z t_max) and are counted as censored, never dropped.

Randomness is counter-based and keyed by (seed, path index, step):

    u(i, c) = mix64( mix64(seed ^ (i * P1)) ^ (c * P2) )

with mix64 the SplitMix64 finalizer, mapped to a uniform in (0, 1) and
then to a normal variate by the inverse-CDF method (scipy's ndtri).
Every path's contribution therefore depends only on (seed, path index),
so any chunking, ordering, or worker count reproduces bit-identical
results; the final mean is a fixed-order fold over the per-path
contribution array. Discretization overshoot bias is acknowledged, not
corrected; the comparator's 2% relative allowance absorbs it and the
dt-halving property test tracks it.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .loopcalc import Walk

_P1 = 0x9E3779B97F4A7C15
_P2 = 0xD1B54A32D192ED03
_M2 = np.uint64(0xBF58476D1CE4E5B9)
_M3 = np.uint64(0x94D049BB133111EB)
_U64 = (1 << 64) - 1

_CHUNK = 1 << 14


class ConfigError(ValueError):
    """Simulation configuration violates its invariants."""


@dataclass(frozen=True)
class WalkConfig:
    walk: Walk
    start: float
    target: float
    z: float
    taboo: float | None = None
    dt: float = 1e-4
    paths: int = 100_000
    seed: int = 0
    t_max: float = 50.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "walk", Walk(self.walk))
        if self.start < 0 or self.target < 0:
            raise ConfigError("levels live on the nonnegative half-line")
        if self.z <= 0:
            raise ConfigError(f"z must be positive, got {self.z}")
        if self.dt <= 0 or self.t_max <= 0:
            raise ConfigError("dt and t_max must be positive")
        if self.paths < 1:
            raise ConfigError(f"need at least one path, got {self.paths}")
        if self.taboo is not None:
            lo, hi = sorted((self.target, self.taboo))
            if not lo < self.start < hi:
                raise ConfigError(
                    "taboo runs need start strictly between target and taboo"
                )


@dataclass(frozen=True)
class HittingEstimate:
    mean: float
    stderr: float
    n_hit_target: int
    n_hit_taboo: int
    n_censored: int

    @property
    def paths(self) -> int:
        return self.n_hit_target + self.n_hit_taboo + self.n_censored


@dataclass(frozen=True)
class ComparisonReport:
    z_score: float
    rel_err: float
    passed: bool


def _mix64(z: np.ndarray) -> np.ndarray:
    # finalizer rounds applied in place; callers pass a fresh array
    z ^= z >> np.uint64(30)
    z *= _M2
    z ^= z >> np.uint64(27)
    z *= _M3
    z ^= z >> np.uint64(31)
    return z


def _path_keys(seed: int, lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.uint64)
    offsets = (idx * np.uint64(_P1 & _U64))  # wraps mod 2^64
    return _mix64(np.uint64(seed & _U64) ^ offsets)


def _uniforms(z: np.ndarray) -> np.ndarray:
    u = (z >> np.uint64(11)).astype(np.float64)
    u += 0.5
    u *= 2.0**-53
    return u


def _normals(keys: np.ndarray, counter: int) -> np.ndarray:
    c = np.uint64((counter * _P2) & _U64)
    return ndtri(_uniforms(_mix64(keys ^ c)))


def _normals3(keys: np.ndarray, step: int) -> np.ndarray:
    """Three components per path at one step, counters 3*step + (0,1,2)."""
    c = np.array(
        [((3 * step + comp) * _P2) & _U64 for comp in range(3)],
        dtype=np.uint64,
    )
    return ndtri(_uniforms(_mix64(keys[:, None] ^ c[None, :])))


def _simulate_chunk(cfg: WalkConfig, lo: int, hi: int) -> tuple[np.ndarray, int, int]:
    """Per-path contributions for path indices [lo, hi); pure in (cfg, lo, hi)."""
    n = hi - lo
    sqdt = math.sqrt(cfg.dt)
    n_steps = int(math.floor(cfg.t_max / cfg.dt + 1e-9))
    contrib = np.zeros(n)
    alive = np.arange(n)
    akeys = _path_keys(cfg.seed, lo, hi)
    hit_count = 0
    taboo_count = 0
    bessel = cfg.walk is Walk.BESSEL_3D
    reflect = cfg.taboo is None and not bessel
    upward = cfg.target >= cfg.start
    if bessel:
        xyz = np.zeros((n, 3))
        xyz[:, 0] = cfg.start
    else:
        pos = np.full(n, float(cfg.start))

    for step in range(n_steps):
        if alive.size == 0:
            break
        if bessel:
            xyz += sqdt * _normals3(akeys, step)
            radial = np.sqrt(np.einsum("ij,ij->i", xyz, xyz))
        else:
            pos += sqdt * _normals(akeys, step)
            if reflect:
                np.abs(pos, out=pos)
            radial = pos
        if upward:
            hit = radial >= cfg.target
        else:
            hit = radial <= cfg.target
        if cfg.taboo is not None:
            if upward:
                taboo_hit = ~hit & (radial <= cfg.taboo)
            else:
                taboo_hit = ~hit & (radial >= cfg.taboo)
            absorbed = hit | taboo_hit
        else:
            taboo_hit = None
            absorbed = hit
        if absorbed.any():
            contrib[alive[hit]] = math.exp(-cfg.z * (step + 1) * cfg.dt)
            hit_count += int(hit.sum())
            if taboo_hit is not None:
                taboo_count += int(taboo_hit.sum())
            keep = ~absorbed
            alive = alive[keep]
            akeys = akeys[keep]
            if bessel:
                xyz = xyz[keep]
            else:
                pos = pos[keep]
    contrib[alive] = math.exp(-cfg.z * cfg.t_max)
    return contrib, hit_count, taboo_count


def _chunk_task(args: tuple[WalkConfig, int, int]):
    return _simulate_chunk(*args)


def _run_chunks(
    cfg: WalkConfig, spans: list[tuple[int, int]]
) -> list[tuple[np.ndarray, int, int]]:
    """Evaluate chunks, in parallel when the workload justifies it.

    Each chunk is a pure function of (config, index range), so the
    execution strategy cannot change a single bit of the result; the
    parallel path exists only for speed and falls back to sequential
    execution wherever fork-based pools are unavailable.
    """
    workers = min(len(spans), os.cpu_count() or 1)
    if workers > 1 and cfg.paths >= _CHUNK:
        try:
            import multiprocessing
            from concurrent.futures import ProcessPoolExecutor

            ctx = multiprocessing.get_context("fork")
            with ProcessPoolExecutor(workers, mp_context=ctx) as pool:
                return list(
                    pool.map(_chunk_task, [(cfg, lo, hi) for lo, hi in spans])
                )
        except (ImportError, OSError, ValueError):
            pass
    return [_simulate_chunk(cfg, lo, hi) for lo, hi in spans]


def _simulate(cfg: WalkConfig, chunk_size: int = _CHUNK) -> HittingEstimate:
    spans = [
        (lo, min(lo + chunk_size, cfg.paths))
        for lo in range(0, cfg.paths, chunk_size)
    ]
    contribs = np.empty(cfg.paths)
    hit_count = 0
    taboo_count = 0
    for (lo, hi), (part, hits, taboos) in zip(spans, _run_chunks(cfg, spans)):
        contribs[lo:hi] = part
        hit_count += hits
        taboo_count += taboos
    censored = cfg.paths - hit_count - taboo_count
    mean = float(contribs.sum() / cfg.paths)
    if cfg.paths > 1:
        stderr = float(contribs.std(ddof=1) / math.sqrt(cfg.paths))
    else:
        stderr = 0.0
    return HittingEstimate(mean, stderr, hit_count, taboo_count, censored)


def simulate_hit(cfg: WalkConfig) -> HittingEstimate:
    """Estimate the free hitting transform E[e^(-z tau_target)]."""
    if cfg.taboo is not None:
        raise ConfigError("simulate_hit expects no taboo level")
    return _simulate(cfg)


def simulate_taboo(cfg: WalkConfig) -> HittingEstimate:
    """Estimate the taboo-restricted transform (defective distribution)."""
    if cfg.taboo is None:
        raise ConfigError("simulate_taboo needs a taboo level")
    return _simulate(cfg)


def eval_phi_numeric(
    walk: Walk | str,
    start: float,
    target: float,
    z: float,
    taboo: float | None = None,
) -> float:
    """Double-precision closed form of the move's transform at w = sqrt(2z).

    Evaluates the exact formulas directly, not a truncated series.
    """
    walk = Walk(walk)
    if z <= 0:
        raise ConfigError(f"z must be positive, got {z}")
    w = math.sqrt(2.0 * z)
    if walk is Walk.REFLECTED_1D:
        if taboo is None:
            if target < start:
                raise ConfigError("free reflected moves go upward")
            return math.cosh(start * w) / math.cosh(target * w)
        if target > start:
            return math.sinh((start - taboo) * w) / math.sinh(
                (target - taboo) * w
            )
        return math.sinh((taboo - start) * w) / math.sinh((taboo - target) * w)
    # Bessel(3)
    if taboo is None:
        if target == 0.0:
            return 0.0  # the origin is never reached
        if target < start:
            raise ConfigError("free Bessel moves go upward")
        if start == 0.0:
            return target * w / math.sinh(target * w)
        return target * math.sinh(start * w) / (start * math.sinh(target * w))
    if target == 0.0:
        return 0.0
    pref = target / start
    if target > start:
        return pref * math.sinh((start - taboo) * w) / math.sinh(
            (target - taboo) * w
        )
    return pref * math.sinh((taboo - start) * w) / math.sinh(
        (taboo - target) * w
    )


def compare_closed_form(
    est: HittingEstimate, reference: float
) -> ComparisonReport:
    """Sampling z-score plus a relative allowance for discretization bias.

    A vanishing reference (an unreachable target) defeats any relative
    test, because censored paths contribute a deliberately conservative
    upper bound; an absolute floor of 1e-9 covers that case.
    """
    if est.stderr <= 0:
        raise ConfigError("comparison needs a positive standard error")
    diff = abs(est.mean - reference)
    z_score = (est.mean - reference) / est.stderr
    rel_err = diff / max(abs(reference), 1e-300)
    passed = abs(z_score) <= 4.0 or rel_err <= 0.02 or diff <= 1e-9
    return ComparisonReport(z_score, rel_err, passed)
