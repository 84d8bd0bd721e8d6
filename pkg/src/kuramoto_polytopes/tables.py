"""Volume tables for the circumscribed and inscribed polytope families.

Rows are in long format: one row per (N, column). Closed forms are used
where they exist; the remaining cells are Poké estimates, with all
columns that fit inside C_CS sharing one sample set per N.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .norms import PolytopeSpec
from .sampler import (
    covering_half_width,
    indicator_for,
    poke_estimate_many,
    true_region_indicator,
)
from .points import tau
from .volumes import exact_volume

__all__ = [
    "TableRow",
    "TABLE1_COLUMNS",
    "TABLE2_COLUMNS",
    "table1_specs",
    "table2_specs",
    "volume_table",
    "table1",
    "table2",
]

TABLE1_COLUMNS = ("C_CS", "C_DB", "C_CS_all", "C_DB&C_CS", "C_DB&C_CS_all", "true")
TABLE2_COLUMNS = ("true", "Hull(I_CS,I_DB)", "I_DB", "I_CS")


@dataclass(frozen=True)
class TableRow:
    n: int
    column: str
    spec: str
    volume: float
    std_error: float
    method: str
    ratio_to_C_CS: float
    samples: int = 0
    error: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def table1_specs(n: int) -> dict:
    c_db = PolytopeSpec("C_DB", n)
    c_cs = PolytopeSpec("C_CS", n)
    c_all = PolytopeSpec("C_CS_all", n)
    return {
        "C_CS": c_cs,
        "C_DB": c_db,
        "C_CS_all": c_all,
        "C_DB&C_CS": PolytopeSpec.intersection(c_db, c_cs),
        "C_DB&C_CS_all": PolytopeSpec.intersection(c_db, c_all),
        "true": None,
    }


def table2_specs(n: int) -> dict:
    i_db = PolytopeSpec("I_DB", n)
    i_cs = PolytopeSpec("I_CS", n)
    return {
        "true": None,
        "Hull(I_CS,I_DB)": PolytopeSpec.hull_of_union(i_cs, i_db),
        "I_DB": i_db,
        "I_CS": i_cs,
    }


def volume_table(
    n_list,
    specs_for,
    samples: int,
    seed: int,
    threads: int = 1,
    lp_samples: int | None = None,
    verify: bool = False,
) -> list[TableRow]:
    """Evaluate every column of ``specs_for(n)`` for each n.

    Columns with a closed form are exact (``verify`` adds an MC row for
    them too). Hulls of unions use ``lp_samples`` and the exact prefilter;
    everything else shares ``samples`` draws from the tau_N cube. A column
    that fails becomes a row with ``method == "error"``.
    """
    rows: list[TableRow] = []
    for n in n_list:
        specs = specs_for(n)
        c_cs = exact_volume(PolytopeSpec("C_CS", n))
        t = tau(n).value
        shared, lp, exact = {}, {}, {}
        for col, spec in specs.items():
            if spec is None:
                shared[col] = true_region_indicator(n)
                continue
            try:
                exact[col] = exact_volume(spec)
                if not verify:
                    continue
            except ValueError:
                pass
            if spec.kind == "HullOfUnion":
                lp[col] = spec
            elif covering_half_width(spec) <= t:
                shared[col] = indicator_for(spec)
            else:
                lp[col] = spec  # needs its own cube; estimate separately
        results, errors = {}, {}
        if shared:
            try:
                results.update(poke_estimate_many(n, shared, samples, seed, threads))
            except Exception as exc:  # row-level error markers
                errors.update({c: str(exc) for c in shared})
        for col, spec in lp.items():
            m = lp_samples if (spec.kind == "HullOfUnion" and lp_samples) else samples
            try:
                results[col] = poke_estimate_many(
                    n, {col: indicator_for(spec)}, m, seed, threads,
                    half_width=covering_half_width(spec),
                )[col]
            except Exception as exc:
                errors[col] = str(exc)
        for col, spec in specs.items():
            label = str(spec) if spec is not None else f"true({n})"
            if col in exact:
                v = exact[col]
                rows.append(TableRow(n, col, label, v, 0.0, "exact", v / c_cs))
            if col in results:
                e = results[col]
                rows.append(
                    TableRow(n, col, label, e.value, e.std_error, "mc", e.value / c_cs, e.samples)
                )
            if col in errors:
                rows.append(
                    TableRow(n, col, label, math.nan, math.nan, "error", math.nan, 0, errors[col])
                )
    return rows


def table1(n_list=(5, 10, 15, 20), samples: int = 10**6, seed: int = 12345, threads: int = 1, verify=False):
    return volume_table(n_list, table1_specs, samples, seed, threads, verify=verify)


def table2(
    n_list=(5, 10, 15),
    samples: int = 10**6,
    lp_samples: int = 10**4,
    seed: int = 12345,
    threads: int = 1,
    verify=False,
):
    return volume_table(n_list, table2_specs, samples, seed, threads, lp_samples, verify)
