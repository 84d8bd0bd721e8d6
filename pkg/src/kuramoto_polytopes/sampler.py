"""Weighted Monte Carlo ("Poke" method) on the circumscribed CS polytope.

Uniform points of the cube [-tau_N, tau_N]^N project onto C_CS(N); the
fiber over omega has length sqrt(N) (2 tau_N - spread(omega)), so weighting
each projected sample by (2 tau_N)^N / (sqrt(N) (2 tau_N - spread)) gives an
unbiased estimate of the (N-1)-volume of any projection-invariant region
inside C_CS(N). The same identity holds for any cube [-h, h]^N with tau_N
replaced by h, which covers regions inside {spread <= 2 h}.

Randomness is counter based: block ``b`` of samples is drawn from a Philox
stream keyed by the seed with ``b`` in the counter, so the sample sequence
does not depend on how blocks are spread over threads, and block sums are
reduced in block order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Mapping

import numpy as np

from .core import project_rows
from .membership import in_polytope, order_param_locking_test
from .norms import PolytopeSpec, spread
from .points import tau, tau_general

__all__ = [
    "VolumeEstimate",
    "PokeSample",
    "TailReport",
    "BLOCK_SIZE",
    "MIN_SAMPLES",
    "block_rng",
    "sample_hypercube",
    "poke_samples",
    "poke_weight",
    "fiber_length",
    "poke_estimate",
    "poke_estimate_many",
    "covering_half_width",
    "indicator_for",
    "estimate_spec_volume",
    "true_region_indicator",
    "estimate_true_volume",
    "weight_tail_check",
]

BLOCK_SIZE = 1 << 14
MIN_SAMPLES = 1000
STD_ERROR_CAVEAT = (
    "std_error comes from the sample variance; the weight has a K^-2 tail, "
    "so it may be unreliable and convergence can be slow"
)

Indicator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    std_error: float
    samples: int
    seed: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class PokeSample:
    omega: np.ndarray
    weight: float


def block_rng(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=int(seed) % 2**64, counter=[0, 0, int(stream), int(block)])
    )


def sample_hypercube(n: int, half_width: float, rng: np.random.Generator, size: int | None = None):
    """Uniform draw(s) from [-half_width, half_width]^n."""
    if n < 2:
        raise ValueError("n must be at least 2")
    shape = (n,) if size is None else (size, n)
    return rng.uniform(-half_width, half_width, size=shape)


def poke_weight(n: int, omega, half_width: float | None = None) -> np.ndarray:
    t = tau(n).value if half_width is None else half_width
    gap = 2 * t - spread(omega)
    with np.errstate(divide="ignore"):
        w = (2 * t) ** n / (math.sqrt(n) * gap)
    return np.where(gap > 0, w, 0.0)


def fiber_length(n: int, omega, half_width: float | None = None) -> np.ndarray:
    """Length of {s : omega + s (1,...,1)/sqrt(n) in the cube}."""
    t = tau(n).value if half_width is None else half_width
    return math.sqrt(n) * np.maximum(2 * t - spread(omega), 0.0)


def poke_samples(n: int, m: int, seed: int) -> list[PokeSample]:
    """Materialize the first ``m`` weighted samples (for inspection)."""
    t = tau(n).value
    out = []
    block = 0
    while len(out) < m:
        X = sample_hypercube(n, t, block_rng(seed, block), BLOCK_SIZE)
        W = project_rows(X)
        w = poke_weight(n, W)
        for row, wt in zip(W, w):
            if wt > 0:
                out.append(PokeSample(row, float(wt)))
            if len(out) == m:
                break
        block += 1
    return out


def _block_sums(n, indicators, m_samp, seed, block, debug, half_width):
    size = min(BLOCK_SIZE, m_samp - block * BLOCK_SIZE)
    X = sample_hypercube(n, half_width, block_rng(seed, block), size)
    W = project_rows(X)
    w = poke_weight(n, W, half_width)
    sums = []
    for f in indicators:
        mask = np.asarray(f(W), dtype=bool)
        if debug and block == 0:
            k = min(100, size)
            if not np.array_equal(np.asarray(f(X[:k]), dtype=bool), mask[:k]):
                raise ValueError("indicator is not invariant under mean-zero projection")
        v = np.where(mask, w, 0.0)
        sums.append((float(v.sum()), float((v * v).sum())))
    return sums


def poke_estimate_many(
    n: int,
    indicators: Mapping[str, Indicator],
    m_samp: int,
    seed: int,
    threads: int = 1,
    debug: bool = False,
    half_width: float | None = None,
) -> dict[str, VolumeEstimate]:
    """Estimate several volumes from one shared set of samples.

    Each indicator maps an ``(m, n)`` array of mean-zero rows to a boolean
    mask. It must depend only on the mean-zero projection of its input and
    describe a region inside {spread <= 2 h}, where h is the cube
    ``half_width`` (default tau_N, i.e. the region lies in C_CS(n)).
    Neither condition is checked unless ``debug``.
    """
    if m_samp < MIN_SAMPLES:
        raise ValueError(f"m_samp must be at least {MIN_SAMPLES}")
    if n < 3:
        raise ValueError("n must be at least 3")
    h = tau(n).value if half_width is None else float(half_width)
    names = list(indicators)
    funcs = [indicators[k] for k in names]
    nblocks = -(-m_samp // BLOCK_SIZE)
    job = lambda b: _block_sums(n, funcs, m_samp, seed, b, debug, h)  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_block = list(pool.map(job, range(nblocks)))
    else:
        per_block = [job(b) for b in range(nblocks)]
    out = {}
    for i, name in enumerate(names):
        s1 = math.fsum(pb[i][0] for pb in per_block)
        s2 = math.fsum(pb[i][1] for pb in per_block)
        mean = s1 / m_samp
        var = max(s2 - s1 * mean, 0.0) / (m_samp - 1)
        out[name] = VolumeEstimate(mean, math.sqrt(var / m_samp), m_samp, int(seed))
    return out


def poke_estimate(
    n: int,
    indicator: Indicator,
    m_samp: int,
    seed: int,
    threads: int = 1,
    debug: bool = False,
    half_width: float | None = None,
) -> VolumeEstimate:
    return poke_estimate_many(n, {"f": indicator}, m_samp, seed, threads, debug, half_width)["f"]


def covering_half_width(spec: PolytopeSpec) -> float:
    """Smallest cube half-width h used to sample ``spec``: its spread never
    exceeds 2 h.

    Inscribed polytopes, C_CS and C_CS_all sit inside C_CS and use tau_N.
    C_DB has spread at most 2 (N - 1) (its k = 1 and k = N - 1
    inequalities bound the largest and smallest entry); C_CS_gen(j) has
    spread at most 2 j tau_{N,j}.
    """
    n = spec.n
    t = tau(n).value
    if spec.is_inscribed or spec.kind in ("C_CS", "C_CS_all"):
        return t
    if spec.kind == "C_DB":
        return max(float(n - 1), t)
    if spec.kind == "C_CS_gen":
        return max(spec.j * tau_general(n, spec.j).value, t)
    if spec.kind == "Intersection":
        return min(covering_half_width(m) for m in spec.members)
    raise AssertionError(spec.kind)


def indicator_for(spec: PolytopeSpec, prefilter: bool = True) -> Indicator:
    return lambda W: in_polytope(spec, W, prefilter=prefilter)


def estimate_spec_volume(
    spec: PolytopeSpec, m_samp: int, seed: int, threads: int = 1, prefilter: bool = True
) -> VolumeEstimate:
    return poke_estimate(
        spec.n,
        indicator_for(spec, prefilter),
        m_samp,
        seed,
        threads,
        half_width=covering_half_width(spec),
    )


def true_region_indicator(n: int) -> Indicator:
    return lambda W: order_param_locking_test(W, float(n))


def estimate_true_volume(n: int, m_samp: int, seed: int, threads: int = 1) -> VolumeEstimate:
    """Volume of the phase-locked region at unit pairwise coupling."""
    if n < 3:
        raise ValueError("n must be at least 3")
    return poke_estimate(n, true_region_indicator(n), m_samp, seed, threads)


@dataclass(frozen=True)
class TailReport:
    n: int
    samples: int
    slope: float
    intercept: float
    k_min: float
    k_max: float
    points: int


def weight_tail_check(n: int, m_samp: int, seed: int, min_tail_count: int = 30) -> TailReport:
    """Log-log slope of the survival function of 1/(2 tau_N - spread).

    The fit uses 40 log-spaced thresholds from the median up to the level
    still exceeded by ``min_tail_count`` samples.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    t = tau(n).value
    parts = []
    for b in range(-(-m_samp // BLOCK_SIZE)):
        size = min(BLOCK_SIZE, m_samp - b * BLOCK_SIZE)
        X = sample_hypercube(n, t, block_rng(seed, b), size)
        parts.append(1.0 / (2 * t - spread(X)))
    u = np.sort(np.concatenate(parts))
    k_lo = u[m_samp // 2]
    k_hi = u[m_samp - min_tail_count]
    ks = np.geomspace(k_lo, k_hi, 40)
    surv = (m_samp - np.searchsorted(u, ks, side="right")) / m_samp
    slope, intercept = np.polyfit(np.log(ks), np.log(surv), 1)
    return TailReport(n, m_samp, float(slope), float(intercept), float(k_lo), float(k_hi), 40)
