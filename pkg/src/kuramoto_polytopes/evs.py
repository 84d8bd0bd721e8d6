"""Extreme-value scaling of the frequency spread and the synchronization
phase transition for iid frequencies.

For iid draws the spread M_N = Q_N - R_N (max minus min) concentrates on a
deterministic scale xi_N for Gumbel-class distributions, and coupling
gamma_N = kappa * xi_N separates almost-never-locked (kappa < 1/2) from
almost-surely-locked (kappa > 1) as N grows.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, stats

from .membership import order_param_locking_test

__all__ = [
    "FrequencyDistribution",
    "ScalingSequence",
    "MMCRow",
    "MMCReport",
    "TransitionRow",
    "TransitionCurve",
    "NotGumbelClassError",
    "GAP_NOTE",
    "parse_distribution",
    "scaling_gaussian",
    "scaling_exponential",
    "scaling_two_sided_exponential",
    "scaling_generic",
    "scaling_for",
    "tail_mean_excess",
    "trial_rng",
    "sample_frequencies",
    "sample_extremes",
    "mmc_check",
    "phase_transition_experiment",
]

GAP_NOTE = "no theoretical prediction"
_CHUNK = 1 << 20  # draws per chunk when simulating extremes


class NotGumbelClassError(ValueError):
    """The distribution is outside the Gumbel basin (q(t)/t does not vanish)."""


@dataclass(frozen=True)
class FrequencyDistribution:
    """A named one-dimensional frequency law backed by a frozen scipy
    distribution.

    ``xi`` optionally overrides the spread scale as a function of N.
    """

    name: str
    frozen: object
    symmetric: bool
    params: tuple = ()
    xi: Callable[[int], float] | None = field(default=None, compare=False)

    def cdf(self, z):
        return self.frozen.cdf(z)

    def ppf(self, p):
        return self.frozen.ppf(p)

    def isf(self, p):
        return self.frozen.isf(p)

    def sample(self, rng: np.random.Generator, size):
        return self.frozen.rvs(size=size, random_state=rng)

    def __str__(self):
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{p:g}" for p in self.params)


def parse_distribution(text: str) -> FrequencyDistribution:
    """Build a distribution from ``gaussian[:sigma]``, ``exp:rate``,
    ``dexp:rate``, ``uniform[:lo,hi]``, ``pareto:alpha`` or
    ``degenerate:value,noise``."""
    name, _, rest = text.strip().partition(":")
    try:
        args = tuple(float(a) for a in rest.split(",")) if rest else ()
    except ValueError:
        raise ValueError(f"bad distribution parameters in {text!r}") from None
    name = name.lower()

    def need(k_min, k_max):
        if not k_min <= len(args) <= k_max:
            raise ValueError(f"{name} takes {k_min}..{k_max} parameters, got {len(args)}")

    if name in ("gaussian", "normal"):
        need(0, 1)
        sigma = args[0] if args else 1.0
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        return FrequencyDistribution("gaussian", stats.norm(0.0, sigma), True, args)
    if name in ("exp", "dexp"):
        need(1, 1)
        lam = args[0]
        if lam <= 0:
            raise ValueError("rate must be positive")
        if name == "exp":
            return FrequencyDistribution("exp", stats.expon(scale=1 / lam), False, args)
        return FrequencyDistribution("dexp", stats.laplace(scale=1 / lam), True, args)
    if name == "uniform":
        need(0, 2)
        lo, hi = args if len(args) == 2 else (0.0, 1.0)
        if len(args) == 1 or hi <= lo:
            raise ValueError("uniform needs lo < hi")
        width = hi - lo
        return FrequencyDistribution(
            "uniform", stats.uniform(lo, width), True, args, xi=lambda n: width
        )
    if name == "pareto":
        need(1, 1)
        if args[0] <= 0:
            raise ValueError("alpha must be positive")
        return FrequencyDistribution("pareto", stats.pareto(args[0]), False, args)
    if name == "degenerate":
        need(1, 2)
        value = args[0]
        noise = args[1] if len(args) == 2 else 1e-12
        if noise <= 0:
            raise ValueError("noise must be positive")
        return FrequencyDistribution("degenerate", stats.norm(value, noise), True, args)
    raise ValueError(f"unknown distribution {name!r}")


@dataclass(frozen=True)
class ScalingSequence:
    """Normalizing constants for the maximum, (Q_N - b_N)/a_N, and the
    concentration scale xi_N of the spread."""

    n: int
    a: float
    b: float
    xi: float

    @property
    def ratio(self) -> float:
        return self.b / self.a


def _check_n(n):
    if n < 3:
        raise ValueError("n must be at least 3")


def scaling_gaussian(n: int, sigma: float = 1.0) -> ScalingSequence:
    _check_n(n)
    L = 2 * math.log(n)
    a = 1 / math.sqrt(L)
    b = math.sqrt(L) - math.log(4 * math.pi * math.log(n)) / (2 * math.sqrt(L))
    return ScalingSequence(n, sigma * a, sigma * b, 2 * sigma * b)


def scaling_exponential(n: int, lam: float) -> ScalingSequence:
    """One-sided: the minimum tends to 0, so the spread scale is b_N."""
    if lam <= 0:
        raise ValueError("rate must be positive")
    _check_n(n)
    b = math.log(n) / lam
    return ScalingSequence(n, 1 / lam, b, b)


def scaling_two_sided_exponential(n: int, lam: float) -> ScalingSequence:
    """Laplace law; b_N = 2 log(N/2)/lam already measures the spread."""
    if lam <= 0:
        raise ValueError("rate must be positive")
    _check_n(n)
    b = 2 * math.log(n / 2) / lam
    return ScalingSequence(n, 1 / lam, b, b)


def tail_mean_excess(dist: FrequencyDistribution, t: float, rtol: float = 1e-8) -> float:
    """q(t) = int_t^inf (1 - F(s)) ds / (1 - F(t))."""
    log_sf_t = float(dist.frozen.logsf(t))
    if not np.isfinite(log_sf_t):
        raise NotGumbelClassError(f"no tail mass beyond t={t}")

    def f(s):
        return math.exp(float(dist.frozen.logsf(s)) - log_sf_t)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(f, t, np.inf, epsrel=rtol, limit=200)
        except (integrate.IntegrationWarning, OverflowError) as exc:
            raise NotGumbelClassError(
                f"tail integral does not converge beyond t={t}: {exc}"
            ) from None
    if not np.isfinite(val):
        raise NotGumbelClassError(f"tail integral diverges beyond t={t}")
    return val


def scaling_generic(dist: FrequencyDistribution, n: int) -> ScalingSequence:
    """b_N = F^{-1}(1 - 1/N), a_N = q(b_N).

    Gumbel-class membership is screened by requiring q(t)/t to shrink by
    at least a quarter between the 1e-6 and 1e-12 upper quantiles.
    Asymmetric laws use xi_N = b_N - F^{-1}(1/N).
    """
    _check_n(n)
    if np.isfinite(dist.frozen.support()[1]):
        raise NotGumbelClassError("bounded support lies in the Weibull basin")
    t1 = float(dist.isf(1e-6))
    t2 = float(dist.isf(1e-12))
    r1 = tail_mean_excess(dist, t1) / t1
    r2 = tail_mean_excess(dist, t2) / t2
    if not r2 <= 0.75 * r1:
        raise NotGumbelClassError(
            f"q(t)/t does not vanish ({r1:.4g} at t={t1:.4g}, {r2:.4g} at t={t2:.4g})"
        )
    b = float(dist.isf(1 / n))
    a = tail_mean_excess(dist, b)
    xi = 2 * b if dist.symmetric else b - float(dist.ppf(1 / n))
    return ScalingSequence(n, a, b, xi)


def scaling_for(dist: FrequencyDistribution, n: int) -> ScalingSequence:
    """Closed-form sequences where known, the generic recipe otherwise."""
    if dist.xi is not None:
        _check_n(n)
        xi = float(dist.xi(n))
        return ScalingSequence(n, float("nan"), float("nan"), xi)
    if dist.name == "gaussian":
        return scaling_gaussian(n, dist.params[0] if dist.params else 1.0)
    if dist.name == "degenerate":
        return scaling_gaussian(n, dist.frozen.std())
    if dist.name == "exp":
        return scaling_exponential(n, dist.params[0])
    if dist.name == "dexp":
        return scaling_two_sided_exponential(n, dist.params[0])
    return scaling_generic(dist, n)


def trial_rng(seed: int, n: int, trial: int, stream: int = 0) -> np.random.Generator:
    """Independent stream for one (N, trial) pair."""
    return np.random.Generator(
        np.random.Philox(key=int(seed) % 2**64, counter=[0, int(stream), int(n), int(trial)])
    )


def sample_frequencies(dist: FrequencyDistribution, n: int, trials: int, seed: int, stream: int = 0):
    """``(trials, n)`` array; row t comes from its own counter-based stream."""
    return np.stack([dist.sample(trial_rng(seed, n, t, stream), n) for t in range(trials)])


def sample_extremes(dist: FrequencyDistribution, n: int, trials: int, seed: int, stream: int = 0):
    """Max and min of ``n`` iid draws, repeated ``trials`` times."""
    Q = np.empty(trials)
    R = np.empty(trials)
    for t in range(trials):
        rng = trial_rng(seed, n, t, stream)
        q, r = -np.inf, np.inf
        for start in range(0, n, _CHUNK):
            x = dist.sample(rng, min(_CHUNK, n - start))
            q = max(q, float(x.max()))
            r = min(r, float(x.min()))
        Q[t] = q
        R[t] = r
    return Q, R


@dataclass(frozen=True)
class MMCRow:
    n: int
    xi: float
    eps: float
    prob: float
    std_error: float


@dataclass
class MMCReport:
    distribution: str
    trials: int
    seed: int
    rows: list[MMCRow]
    nonincreasing: bool
    degenerate: bool

    def as_dict(self) -> dict:
        return asdict(self)


def mmc_check(
    dist: FrequencyDistribution,
    n_list: Sequence[int],
    trials: int,
    seed: int,
    eps_list: Sequence[float] = (0.1, 0.2),
) -> MMCReport:
    """Empirical P(|M_N/xi_N - 1| > eps) for each N and eps.

    ``nonincreasing`` holds when no step up in N raises the probability by
    more than two combined binomial standard errors. A spread scale that is
    essentially zero relative to the location is flagged ``degenerate``.
    """
    if trials < 2:
        raise ValueError("need at least two trials")
    rows = []
    degenerate = False
    loc = abs(float(dist.frozen.median()))
    for n in sorted(n_list):
        xi = scaling_for(dist, n).xi
        if not xi > 1e-8 * max(1.0, loc):
            degenerate = True
        Q, R = sample_extremes(dist, n, trials, seed)
        M = Q - R
        with np.errstate(divide="ignore", invalid="ignore"):
            dev = np.abs(M / xi - 1.0)
        for eps in eps_list:
            p = float(np.mean(dev > eps))
            rows.append(MMCRow(n, xi, eps, p, math.sqrt(p * (1 - p) / trials)))
    ok = True
    for eps in eps_list:
        seq = [r for r in rows if r.eps == eps]
        for prev, cur in zip(seq, seq[1:]):
            slack = 2 * math.hypot(prev.std_error, cur.std_error)
            if cur.prob > prev.prob + slack:
                ok = False
    return MMCReport(str(dist), trials, int(seed), rows, ok, degenerate)


@dataclass(frozen=True)
class TransitionRow:
    n: int
    kappa: float
    trials: int
    p_sync: float
    std_error: float
    xi: float
    note: str = ""


@dataclass
class TransitionCurve:
    distribution: str
    seed: int
    rows: list[TransitionRow]

    def p_sync(self, n: int, kappa: float) -> TransitionRow:
        for r in self.rows:
            if r.n == n and r.kappa == kappa:
                return r
        raise KeyError((n, kappa))

    def as_dict(self) -> dict:
        return asdict(self)


def _locked(omega: np.ndarray, gamma: float) -> np.ndarray:
    if gamma == 0:
        return np.all(omega == 0.0, axis=1)
    out = np.empty(omega.shape[0], dtype=bool)
    step = max(1, (1 << 21) // omega.shape[1])
    for s in range(0, omega.shape[0], step):
        out[s:s + step] = order_param_locking_test(omega[s:s + step], gamma)
    return out


def phase_transition_experiment(
    dist: FrequencyDistribution,
    n_list: Sequence[int],
    kappa_list: Sequence[float],
    trials: int,
    seed: int,
) -> TransitionCurve:
    """Estimate P_sync at coupling gamma_N = kappa * xi_N.

    Each trial draws N iid frequencies, recenters them to mean zero and
    applies the mean-field locking test with gamma = kappa * xi_N (pair
    coupling gamma_N / N). The same frequency vectors are reused for every
    kappa, which keeps each estimated curve monotone in kappa.
    """
    if trials < 30:
        raise ValueError("trials must be at least 30")
    kappas = [float(k) for k in kappa_list]
    if any(k < 0 for k in kappas):
        raise ValueError("kappa values must be nonnegative")
    rows = []
    for n in n_list:
        xi = scaling_for(dist, n).xi
        omega = sample_frequencies(dist, n, trials, seed)
        omega = omega - omega.mean(axis=1, keepdims=True)
        for k in kappas:
            p = float(np.mean(_locked(omega, k * xi)))
            note = GAP_NOTE if 0.5 <= k <= 1.0 else ""
            rows.append(
                TransitionRow(n, k, trials, p, math.sqrt(p * (1 - p) / trials), xi, note)
            )
    return TransitionCurve(str(dist), int(seed), rows)
