"""Outage probability and the energy-efficiency utility, plus ratio sweeps.

Energy efficiency is served traffic per watt of base-station consumption:
the closed-form mean cell load, discounted by the outage probability, over
the linear consumption model.  Algebraically this equals the direct form

    EE = mean_load * F(P_max)^2 / [ (1/eta_RF) * int_0^Pmax x dF + P_circuit * F(P_max) ],

and both forms are computed and cross-checked on every call.

Sweeps over the user/BS intensity ratio reuse one quadrature cache: the
ratio only scales the exponent of the total-power CF, so each row costs a
single inversion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateConfigError, InvalidInputError, NumericsError, PvtError
from .numerics import DistributionTable
from .power import (
    PowerNodeCache,
    PowerParams,
    mean_bs_power,
    required_power_distribution,
)


@dataclass
class EnergySweepRow:
    ratio: float
    ee: float                   # bits/Hz/J in normalized mode
    p_out: float
    mean_power_w: float         # E[P_BS], the consumption-model mean
    mean_traffic: float
    error: str | None = None


@dataclass
class EnergySweepResult:
    rows: list[EnergySweepRow]
    config_digest: str = ""
    meta: dict = field(default_factory=dict)

    def best(self) -> EnergySweepRow:
        ok = [r for r in self.rows if r.error is None and np.isfinite(r.ee)]
        if not ok:
            raise DegenerateConfigError("sweep produced no finite rows")
        return max(ok, key=lambda r: r.ee)

    def as_columns(self):
        return {
            "ratio": np.array([r.ratio for r in self.rows]),
            "ee": np.array([r.ee for r in self.rows]),
            "p_out": np.array([r.p_out for r in self.rows]),
            "mean_power_w": np.array([r.mean_power_w for r in self.rows]),
            "mean_traffic": np.array([r.mean_traffic for r in self.rows]),
        }


def outage_probability(table: DistributionTable, p_max: float) -> float:
    """P(required power exceeds the ceiling) = 1 - F(p_max)."""
    if p_max <= 0:
        raise InvalidInputError("p_max must be positive")
    return float(np.clip(1.0 - table.cdf_at(p_max), 0.0, 1.0))


def energy_efficiency(p: PowerParams, table: DistributionTable | None = None,
                      ratio: float | None = None,
                      cache: PowerNodeCache | None = None,
                      tol_identity: float = 1e-6) -> float:
    """Energy-efficiency utility for one parameter point.

    Computes the composed form (mean load x (1 - p_out) / E[P_BS]) and the
    direct form and verifies they agree to tol_identity relative (they are
    the same algebra; disagreement flags an implementation fault).
    """
    r = p.traffic.ratio if ratio is None else float(ratio)
    tr = p.traffic
    mean_load = r * tr.theta * tr.rho_min / (tr.theta - 1.0)
    if r == 0.0:
        return 0.0
    if table is None:
        table = required_power_distribution(p, ratio=ratio, cache=cache, with_pdf=False)
    F = float(table.cdf_at(p.p_max))
    if F <= 0.0:
        return 0.0
    pm = table.partial_mean(p.p_max)
    composed = mean_load * F / mean_bs_power(table, p)
    direct = mean_load * F * F / (pm / p.eta_rf + p.p_circuit * F)
    if abs(composed - direct) > tol_identity * max(abs(composed), 1e-300):
        raise NumericsError("energy-efficiency identity violated",
                            value=composed, error_estimate=abs(composed - direct))
    return composed


def ee_sweep(p: PowerParams, ratios, tol: float = 3e-4,
             cache: PowerNodeCache | None = None) -> EnergySweepResult:
    """Analytic sweep over user/BS intensity ratios; failures are recorded
    per row and the sweep continues."""
    ratios = np.asarray(ratios, dtype=float)
    if ratios.ndim != 1 or ratios.size == 0 or np.any(np.diff(ratios) <= 0):
        raise InvalidInputError("ratios must be a nonempty ascending sequence")
    cache = cache or PowerNodeCache(p)
    base_mean = p.traffic.theta * p.traffic.rho_min / (p.traffic.theta - 1.0)
    rows = []
    for r in ratios:
        mt = base_mean * r
        try:
            table = required_power_distribution(p, ratio=r, cache=cache,
                                                with_pdf=False, tol=tol)
            po = outage_probability(table, p.p_max)
            if po >= 1.0:
                rows.append(EnergySweepRow(r, 0.0, 1.0, float("nan"), mt))
                continue
            epb = mean_bs_power(table, p)
            ee = energy_efficiency(p, table=table, ratio=r)
            rows.append(EnergySweepRow(r, ee, po, epb, mt))
        except PvtError as exc:
            rows.append(EnergySweepRow(r, float("nan"), float("nan"), float("nan"),
                                       mt, error=f"{type(exc).__name__}: {exc}"))
    return EnergySweepResult(rows=rows, meta={"p_max_w": p.p_max, "eta_rf": p.eta_rf,
                                              "p_circuit_w": p.p_circuit})
