"""Acceptance checks and the deterministic JSON report.

Each check reproduces one published number or property at a stated
tolerance and returns the measured values. ``Profile.full()`` uses the
published sample sizes; ``Profile.quick()`` shrinks them for smoke runs
(pass/fail at quick sizes is informational only).
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np
from scipy import stats

from .core import project_rows
from .evs import (
    parse_distribution,
    phase_transition_experiment,
    sample_extremes,
    scaling_exponential,
)
from .membership import (
    eig_stability_oracle,
    hull_membership,
    jacobian,
    numeric_jacobian,
    order_param_locking_test,
    rado_membership,
    stability_check,
)
from .norms import PolytopeSpec, circ_norm_generic, norm_for, spread
from .points import cs_points, db_points, tau, tau_general
from .sampler import (
    STD_ERROR_CAVEAT,
    estimate_spec_volume,
    estimate_true_volume,
)
from .volumes import exact_volume, postnikov_volume, unit_cs_volume_closed_form

__all__ = [
    "Profile",
    "CheckResult",
    "CHECKS",
    "run_checks",
    "build_report",
    "report_json",
    "DEFAULT_SEED",
]

DEFAULT_SEED = 12345
SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Profile:
    name: str = "full"
    seed: int = DEFAULT_SEED
    threads: int = 1
    mc_samples: int = 10**6
    lp_samples: int = 10**4
    property_points: int = 10**3
    sandwich_points: int = 10**4
    ks_trials: int = 10**4
    gumbel_n: int = 10**4
    transition_trials: int = 500

    @classmethod
    def full(cls, seed: int = DEFAULT_SEED, threads: int = 1) -> "Profile":
        return cls(seed=seed, threads=threads)

    @classmethod
    def quick(cls, seed: int = DEFAULT_SEED, threads: int = 1) -> "Profile":
        return cls(
            name="quick",
            seed=seed,
            threads=threads,
            mc_samples=20_000,
            lp_samples=1_000,
            property_points=50,
            sandwich_points=500,
            ks_trials=1_000,
            gumbel_n=1_000,
            transition_trials=60,
        )


@dataclass
class CheckResult:
    id: int
    title: str
    passed: bool
    measured: dict
    tolerance: str
    seconds: float = field(default=0.0, compare=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.id:2d}: {self.title} ({self.seconds:.1f} s)"


def _within_sigma(est, target, k=3.0):
    return abs(est.value - target) <= k * est.std_error


def _rng(p: Profile, tag: int) -> np.random.Generator:
    return np.random.default_rng([p.seed % 2**63, tag])


def check_tau(p: Profile):
    t3 = tau(3).value
    t4 = tau(4).value
    bracket = all(n - 2 <= tau(n).value <= n - 1 for n in range(3, 51))
    ok = abs(t3 - 1.76017) <= 1e-4 and abs(t4 - 1.5 * SQRT3) <= 1e-10 and bracket
    return ok, {"tau3": t3, "tau4": t4, "bracket_3_50": bracket}, "tau3 1e-4, tau4 1e-10"


def check_exact_volumes(p: Profile):
    t3 = tau(3).value
    want = {
        "I_DB": 9 * SQRT3,
        "C_DB": 12 * SQRT3,
        "I_CS": 3 * SQRT3 * t3**2,
        "C_CS": 4 * SQRT3 * t3**2,
    }
    got = {k: exact_volume(PolytopeSpec(k, 3)) for k in want}
    ok = all(abs(got[k] / want[k] - 1) <= 1e-9 for k in want)
    c5 = exact_volume(PolytopeSpec("C_CS", 5))
    d5 = exact_volume(PolytopeSpec("C_DB", 5))
    ok = ok and abs(c5 - 5277.32) <= 0.01 and abs(d5 - 4472.14) <= 0.01
    measured = {f"{k}(3)": v for k, v in got.items()}
    measured.update({"C_CS(5)": c5, "C_DB(5)": d5})
    return ok, measured, "1e-9 relative at N=3, 0.01 absolute at N=5"


def check_poke_n4(p: Profile):
    targets = {
        "C_CS": 162 * SQRT3,
        "C_DB": 256.0,
        "I_DB": 128.0,
        "I_CS": 135 * SQRT3 / 2,
    }
    measured, ok = {}, True
    for kind, target in targets.items():
        est = estimate_spec_volume(PolytopeSpec(kind, 4), p.mc_samples, p.seed, p.threads)
        measured[kind] = est.as_dict()
        ok &= _within_sigma(est, target)
    inter = PolytopeSpec.intersection(PolytopeSpec("C_DB", 4), PolytopeSpec("C_CS", 4))
    est = estimate_spec_volume(inter, p.mc_samples, p.seed, p.threads)
    measured["C_DB&C_CS"] = est.as_dict()
    ok &= _within_sigma(est, 236.34)
    return ok, measured, "3 std errors"


def check_true_volume(p: Profile):
    measured, ok = {}, True
    for n, target in ((4, 210.0), (5, 3210.0)):
        est = estimate_true_volume(n, p.mc_samples, p.seed, p.threads)
        measured[f"true({n})"] = est.as_dict()
        ok &= abs(est.value / target - 1) <= 0.05
    return ok, measured, "5% relative"


def check_circumscribed_ratios(p: Profile):
    c_cs = exact_volume(PolytopeSpec("C_CS", 10))
    r_db = exact_volume(PolytopeSpec("C_DB", 10)) / c_cs
    est = estimate_true_volume(10, p.mc_samples, p.seed, p.threads)
    r_true = est.value / c_cs
    ok = abs(r_db - 0.58) <= 0.03 and abs(r_true - 0.19) <= 0.03
    measured = {"C_DB/C_CS": r_db, "true/C_CS": r_true, "true(10)": est.as_dict()}
    return ok, measured, "0.03 absolute on each ratio"


def check_inscribed_volumes(p: Profile):
    i_db = PolytopeSpec("I_DB", 5)
    i_cs = PolytopeSpec("I_CS", 5)
    hull = PolytopeSpec.hull_of_union(i_cs, i_db)
    e_hull = estimate_spec_volume(hull, p.lp_samples, p.seed, p.threads, prefilter=False)
    e_db = estimate_spec_volume(i_db, p.lp_samples, p.seed, p.threads)
    e_cs = estimate_spec_volume(i_cs, p.lp_samples, p.seed, p.threads)
    ok = (
        abs(e_hull.value / 2032 - 1) <= 0.10
        and _within_sigma(e_db, 5**4.5)
        and _within_sigma(e_cs, 962.1)
    )
    measured = {"hull": e_hull.as_dict(), "I_DB": e_db.as_dict(), "I_CS": e_cs.as_dict()}
    return ok, measured, "hull 10% relative, I_DB and I_CS 3 std errors"


def check_postnikov(p: Profile):
    errs = {}
    for n in range(3, 9):
        x = [1.0] + [0.0] * (n - 2) + [-1.0]
        errs[n] = abs(postnikov_volume(x, euclidean=True) / unit_cs_volume_closed_form(n) - 1)
    return max(errs.values()) < 1e-9, {"max_rel_error": max(errs.values())}, "1e-9 relative"


def _boundary_cloud(rng, n, m, norm, lo=0.5, hi=1.5):
    """Random mean-zero points whose ``norm`` is uniform in [lo, hi]."""
    y = project_rows(rng.normal(size=(m, n)))
    return y / norm(y)[:, None] * rng.uniform(lo, hi, size=(m, 1))


def check_oracles(p: Profile):
    m = p.property_points
    rng = _rng(p, 8)
    rado_mismatch = 0
    rado_count = 0
    for n in range(3, 8):
        for j in range(1, n // 2 + 1):
            spec = PolytopeSpec("I_CS_gen", n, j)
            fam = cs_points(n, j)
            V = fam.array()
            v = V[0]
            Y = _boundary_cloud(rng, n, m, lambda y: norm_for(spec, y))
            margin = np.abs(norm_for(spec, Y) - 1) > 1e-7
            for y in Y[margin]:
                rado_mismatch += rado_membership(y, v) != hull_membership(V, y).inside
                rado_count += 1

    norm_err = 0.0
    for n in range(3, 9):
        Y = project_rows(rng.normal(size=(m, n)))
        pairs = [(db_points(n), PolytopeSpec("C_DB", n))]
        pairs += [(cs_points(n, j), PolytopeSpec("C_CS_gen", n, j)) for j in range(1, n // 2 + 1)]
        pairs.append((cs_points(n, 1), PolytopeSpec("C_CS", n)))
        for fam, spec in pairs:
            a = circ_norm_generic(fam, Y)
            b = norm_for(spec, Y)
            norm_err = max(norm_err, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))))

    stab_mismatch = 0
    stab_count = 0
    fd_err = 0.0
    for n in range(3, 9):
        widths = rng.uniform(0.05, math.pi, size=m)
        thetas = rng.uniform(-1, 1, size=(m, n)) * widths[:, None]
        for th in thetas:
            rep = stability_check(th)
            J = jacobian(th)
            # skip near-degenerate cases where either side is ill-conditioned
            marginal = np.min(np.abs(rep.kappas)) < 1e-6 or abs(rep.tau_sum - 2) < 1e-6
            if not marginal:
                stab_count += 1
                stab_mismatch += rep.verdict != eig_stability_oracle(J)
            fd_err = max(fd_err, float(np.max(np.abs(numeric_jacobian(th) - J))))

    ok = rado_mismatch == 0 and norm_err < 1e-9 and stab_mismatch == 0 and fd_err < 1e-6
    measured = {
        "rado_vs_lp_mismatches": int(rado_mismatch),
        "rado_vs_lp_points": int(rado_count),
        "circ_norm_max_rel_error": norm_err,
        "stability_mismatches": int(stab_mismatch),
        "stability_points": int(stab_count),
        "fd_jacobian_max_error": fd_err,
    }
    return ok, measured, "zero mismatches; norms 1e-9; finite differences 1e-6"


def check_three_oscillator(p: Profile):
    beta = (-1 + math.sqrt(33)) / 8
    a_plus = math.acos(beta)
    rep = stability_check(np.array([-a_plus, 0.0, a_plus]))
    k1 = (15 + math.sqrt(33)) / 16
    k2 = (3 + math.sqrt(33)) / 4
    nu13 = math.cos(2 * a_plus)
    inside = stability_check(np.array([-0.28 * math.pi, 0.0, 0.28 * math.pi]))
    ok = (
        abs(rep.tau_sum - 2) <= 1e-9
        and abs(rep.kappas[0] - k1) <= 1e-12
        and abs(rep.kappas[2] - k1) <= 1e-12
        and abs(rep.kappas[1] - k2) <= 1e-12
        and abs(nu13 + 0.296535) <= 1e-5
        and inside.verdict == "stable"
        and math.cos(0.56 * math.pi) < 0
    )
    measured = {
        "alpha_plus": a_plus,
        "tau_sum": rep.tau_sum,
        "kappa1": float(rep.kappas[0]),
        "kappa2": float(rep.kappas[1]),
        "nu13": nu13,
        "verdict_0.28pi": inside.verdict,
    }
    return ok, measured, "tau 1e-9, kappas 1e-12, nu13 1e-5"


def check_sandwich(p: Profile):
    rng = _rng(p, 10)
    violations = {"lower": 0, "upper": 0}
    m = p.sandwich_points
    for n in range(3, 9):
        t = tau(n).value
        w = project_rows(rng.normal(size=(m, n)))
        s = spread(w)
        gamma = s / rng.uniform(0.5, 1.3 * 2 * t / n, size=m)
        locked = order_param_locking_test(w / gamma[:, None], 1.0)
        violations["lower"] += int(np.sum((s < gamma) & ~locked))
        violations["upper"] += int(np.sum(locked & ~(s < 2 * t * gamma / n)))
    ok = violations["lower"] == 0 and violations["upper"] == 0
    return ok, violations, "zero violations"


def check_evs(p: Profile):
    measured, ok = {}, True
    uni = parse_distribution("uniform")
    for n in (3, 5, 10):
        Q, R = sample_extremes(uni, n, p.ks_trials, p.seed, stream=1)
        pval = float(stats.kstest(Q - R, stats.beta(n - 1, 2).cdf).pvalue)
        measured[f"beta_ks_pvalue_N{n}"] = pval
        ok &= pval > 0.01

    expo = parse_distribution("exp:1")
    seq = scaling_exponential(p.gumbel_n, 1.0)
    Q, _ = sample_extremes(expo, p.gumbel_n, p.ks_trials, p.seed, stream=2)
    d = float(stats.kstest((Q - seq.b) / seq.a, stats.gumbel_r.cdf).statistic)
    measured["gumbel_ks_distance"] = d
    ok &= d < 0.02

    kappas = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0]
    curve = phase_transition_experiment(
        parse_distribution("gaussian"), [512], kappas, p.transition_trials, p.seed
    )
    ps = [r.p_sync for r in curve.rows]
    ses = [r.std_error for r in curve.rows]
    lo, hi = ps[0], ps[-1]
    monotone = all(b >= a - 2 * math.hypot(sa, sb) for a, b, sa, sb in zip(ps, ps[1:], ses, ses[1:]))
    measured["p_sync_gaussian_512"] = dict(zip(map(str, kappas), ps))
    ok &= lo < 0.5 < hi and hi - lo > 0.5 and monotone
    return bool(ok), measured, "KS level 0.01; Gumbel KS < 0.02; gap > 0.5; monotone within 2 sigma"


@dataclass(frozen=True)
class Check:
    id: int
    title: str
    func: Callable[[Profile], tuple]


CHECKS = (
    Check(1, "tau_N closed form and bracket", check_tau),
    Check(2, "exact volumes at N=3 and N=5", check_exact_volumes),
    Check(3, "Poke volumes at N=4", check_poke_n4),
    Check(4, "true-region volume at N=4 and N=5", check_true_volume),
    Check(5, "volume ratios at N=10", check_circumscribed_ratios),
    Check(6, "inscribed volumes at N=5 with LP hull", check_inscribed_volumes),
    Check(7, "Postnikov volume vs closed form", check_postnikov),
    Check(8, "oracle equivalences", check_oracles),
    Check(9, "three-oscillator threshold family", check_three_oscillator),
    Check(10, "spread sandwich around the locking test", check_sandwich),
    Check(11, "extreme-value suite", check_evs),
)


def run_checks(profile: Profile, ids=None, log=None) -> list[CheckResult]:
    out = []
    for chk in CHECKS:
        if ids is not None and chk.id not in ids:
            continue
        t0 = time.perf_counter()
        ok, measured, tol = chk.func(profile)
        res = CheckResult(chk.id, chk.title, bool(ok), measured, tol, time.perf_counter() - t0)
        if log is not None:
            log(res.line())
        out.append(res)
    return out


def _n4_panel(p: Profile) -> dict:
    panel = {}
    for kind in ("I_DB", "C_DB", "I_CS", "C_CS"):
        panel[kind] = {"value": exact_volume(PolytopeSpec(kind, 4)), "method": "exact"}
    inter = PolytopeSpec.intersection(PolytopeSpec("C_DB", 4), PolytopeSpec("C_CS", 4))
    hull = PolytopeSpec.hull_of_union(PolytopeSpec("I_DB", 4), PolytopeSpec("I_CS", 4))
    panel["true"] = dict(estimate_true_volume(4, p.mc_samples, p.seed, p.threads).as_dict(), method="mc")
    panel[str(inter)] = dict(
        estimate_spec_volume(inter, p.mc_samples, p.seed, p.threads).as_dict(), method="mc"
    )
    panel[str(hull)] = dict(
        estimate_spec_volume(hull, p.lp_samples, p.seed, p.threads).as_dict(), method="mc"
    )
    return panel


def build_report(profile: Profile, ids=None, log=None, results=None) -> dict:
    """Full JSON-ready report; ``results`` reuses an earlier run_checks."""
    if results is None:
        results = run_checks(profile, ids, log)
    cfg = asdict(profile)
    # results do not depend on the thread count, so it is not echoed
    del cfg["threads"]
    return {
        "config": cfg,
        "std_error_caveat": STD_ERROR_CAVEAT,
        "tau_table": [
            {"n": n, "tau": tau(n).value, "tau_j": {str(j): tau_general(n, j).value for j in range(1, n // 2 + 1)}}
            for n in range(3, 11)
        ],
        "n4_volume_panel": _n4_panel(profile),
        "acceptance": [
            {k: v for k, v in asdict(r).items() if k != "seconds"} for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }


def _clean(obj):
    """Make numpy scalars JSON-serializable."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def report_json(report: dict) -> str:
    return json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"


def with_threads(p: Profile, threads: int) -> Profile:
    return replace(p, threads=threads)
