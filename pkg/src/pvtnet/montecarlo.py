"""Snapshot simulator of the full generative model.

One snapshot: sample BS and user Poisson patterns on a disc, associate users
to their nearest BS, thin cells into interferer hosts (one co-channel
interfering user each, a uniformly chosen member of the cell), then per user
draw the rate, set the SIR target, aggregate interference over all hosted
interferers (actual distances, sampled shadow/fade ratio factors,
deterministic interferer receiving power), back out the serving power, and
per cell drop uniformly random users until the total fits under the ceiling.

Statistics come from interior cells only (BS at least one guard band inside
the window edge).  Trials are independent; each gets its own child stream
spawned from the master seed, so results do not depend on scheduling.  The
PVT_THREADS environment variable caps process-level parallelism.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import SHADOW_COEF, rate_to_sir
from .errors import InvalidInputError
from .numerics import empirical_cf as mc_empirical_cf  # noqa: F401 - module surface
from .geometry import (
    PointPattern,
    Window,
    assign_nearest_bs,
    default_guard,
    interior_mask,
    sample_poisson_pattern,
)
from .power import PowerParams
from .traffic import sample_pareto

_DEEP_FADE_FLOOR = 1e-6   # fades below this are resampled (outage-bound anyway)
_POWER_SENTINEL = 1e30    # W; cap for links that overflow double precision


def _cap_astronomic(eps: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Replace overflowed/astronomic link powers by jittered finite sentinels.

    Such links are pure outage regardless of the exact value; the jitter
    keeps their contribution to empirical characteristic functions
    incoherent, as the true (random, astronomically spread) values would be.
    """
    big = ~(eps < _POWER_SENTINEL)
    if big.any():
        eps = eps.copy()
        eps[big] = _POWER_SENTINEL * (1.0 + rng.random(int(big.sum())))
    return eps


@dataclass
class NetworkSnapshot:
    bs_pattern: PointPattern
    ms_pattern: PointPattern
    bs_of_ms: np.ndarray          # per-MS cell index
    # per-MS records
    rate: np.ndarray
    sir_target: np.ndarray
    i_agg: np.ndarray             # W
    recv_power: np.ndarray        # W (S0)
    link_power: np.ndarray        # W (required)
    dropped: np.ndarray           # bool
    # per-cell records
    cell_traffic: np.ndarray
    cell_p_req: np.ndarray
    cell_p_real: np.ndarray
    cell_served: np.ndarray
    cell_n_ms: np.ndarray
    interferer_cell: np.ndarray   # bool, hosts a co-channel interferer
    interior: np.ndarray          # bool
    meta: dict = field(default_factory=dict)


@dataclass
class McEstimate:
    mean: float
    ci_halfwidth: float
    n_trials: int
    seed: int
    extras: dict = field(default_factory=dict)


def simulate_snapshot(p: PowerParams, window: Window, rng: np.random.Generator,
                      guard: float | None = None) -> NetworkSnapshot:
    tr, ch = p.traffic, p.channel
    if guard is None:
        guard = default_guard(tr.lambda_b)
    if guard >= window.radius:
        raise InvalidInputError("guard band swallows the whole window")

    bs = sample_poisson_pattern(tr.lambda_b, window, rng)
    while bs.n == 0:
        bs = sample_poisson_pattern(tr.lambda_b, window, rng)
    ms = sample_poisson_pattern(tr.lambda_m, window, rng)
    part = assign_nearest_bs(ms, bs)
    n_ms, n_bs = ms.n, bs.n

    # interferer-hosting cells: independent thinning, one uniformly chosen
    # member MS per nonempty selected cell
    p_host = min(1.0, p.lambda_inf / tr.lambda_b) if tr.lambda_b > 0 else 0.0
    hosts = rng.random(n_bs) < p_host
    counts = np.bincount(part.bs_index, minlength=n_bs) if n_ms else np.zeros(n_bs, dtype=int)
    hosts &= counts > 0
    host_idx = np.nonzero(hosts)[0]
    int_ms = np.empty(host_idx.size, dtype=int)
    order = np.argsort(part.bs_index, kind="stable") if n_ms else np.empty(0, dtype=int)
    starts = np.searchsorted(part.bs_index[order], host_idx, side="left") if n_ms else None
    for j, (c, s) in enumerate(zip(host_idx, starts if host_idx.size else [])):
        int_ms[j] = order[s + rng.integers(counts[c])]

    rate = sample_pareto(tr, rng, n_ms)
    sir = rate_to_sir(np.minimum(rate, p.rate_cap), ch)

    if host_idx.size and n_ms:
        s_k = _interferer_receive_power(p, rng, host_idx.size)
        r_kk = part.distance[int_ms]                                # own-link distances
        d = ms.points[:, None, :] - bs.points[host_idx][None, :, :]
        r_k0 = np.sqrt((d * d).sum(axis=2))                         # (n_ms, n_hosts)
        beta = ch.path_loss_exp
        # ratio factor per (target, interferer) pair: shadowing difference is
        # N(0, 2 c^2 sigma^2); a unit-exponential ratio is U/(1-U)
        g = rng.standard_normal(r_k0.shape)
        u = rng.random(r_k0.shape)
        q = np.exp(np.sqrt(2.0) * SHADOW_COEF * ch.shadowing_db * g) * u / (1.0 - u)
        with np.errstate(over="ignore"):
            terms = (s_k[None, :] * (r_kk[None, :] / r_k0) ** beta) * q
        # a cell's own interferer never interferes with its own users
        terms[part.bs_index[:, None] == host_idx[None, :]] = 0.0
        i_agg = terms.sum(axis=1)
    else:
        i_agg = np.zeros(n_ms)

    s0 = sir * i_agg
    xi = rng.standard_normal(n_ms)
    zeta = rng.exponential(1.0, n_ms)
    bad = zeta < _DEEP_FADE_FLOOR
    while bad.any():
        zeta[bad] = rng.exponential(1.0, int(bad.sum()))
        bad = zeta < _DEEP_FADE_FLOOR
    with np.errstate(over="ignore"):
        eps = (part.distance ** ch.path_loss_exp
               * np.exp(-SHADOW_COEF * ch.shadowing_db * xi)
               * s0 / (ch.gain_const * zeta))
    eps = _cap_astronomic(eps, rng)

    dropped = np.zeros(n_ms, dtype=bool)
    cell_p_req = np.zeros(n_bs)
    if n_ms:
        np.add.at(cell_p_req, part.bs_index, eps)
    for c in np.nonzero(cell_p_req > p.p_max)[0]:
        members = np.nonzero(part.bs_index == c)[0]
        perm = members[rng.permutation(members.size)]
        # drop the random-order prefix until the remaining suffix fits;
        # suffix sums stay well-defined even with inf entries
        sfx = np.append(np.cumsum(eps[perm][::-1])[::-1], 0.0)
        k = int(np.argmax(sfx <= p.p_max))
        dropped[perm[:k]] = True

    keep = ~dropped
    cell_traffic = np.zeros(n_bs)
    cell_served = np.zeros(n_bs)
    cell_p_real = np.zeros(n_bs)
    if n_ms:
        np.add.at(cell_traffic, part.bs_index, rate)
        np.add.at(cell_served, part.bs_index[keep], rate[keep])
        np.add.at(cell_p_real, part.bs_index[keep], eps[keep])

    return NetworkSnapshot(
        bs_pattern=bs, ms_pattern=ms, bs_of_ms=part.bs_index,
        rate=rate, sir_target=sir, i_agg=i_agg, recv_power=s0,
        link_power=eps, dropped=dropped,
        cell_traffic=cell_traffic, cell_p_req=cell_p_req,
        cell_p_real=cell_p_real, cell_served=cell_served,
        cell_n_ms=counts, interferer_cell=hosts,
        interior=interior_mask(bs, guard),
        meta={"guard_m": guard,
              "interference_free": bool(p.lambda_inf == 0.0),
              "host_count": int(host_idx.size)},
    )


def _interferer_receive_power(p: PowerParams, rng, n: int) -> np.ndarray:
    """Interferer receiving powers matched to the configured (2/beta)-moment."""
    if p.interferer_power == "deterministic":
        return np.full(n, p.interferer_receive_scale())
    s = 2.0 / p.channel.path_loss_exp
    tau = p.interferer_sigma
    mu = np.log(p.recv_moment) / s - s * tau * tau / 2.0
    return np.exp(mu + tau * rng.standard_normal(n))


# ---------------------------------------------------------------------------
# Trial aggregation
# ---------------------------------------------------------------------------

def _trial_stats(p: PowerParams, window: Window, seed_seq) -> dict:
    rng = np.random.default_rng(seed_seq)
    snap = simulate_snapshot(p, window, rng)
    sel = snap.interior
    n = int(sel.sum())
    if n == 0:
        raise InvalidInputError("window too small: no interior cells")
    served = snap.cell_served[sel]
    p_real = snap.cell_p_real[sel]
    p_req = snap.cell_p_req[sel]
    ee = served.mean() / (p_real.mean() / p.eta_rf + p.p_circuit)
    return {
        "ee": float(ee),
        "outage": float((p_req > p.p_max).mean()),
        "mean_power": float(p_real.mean()),
        "mean_traffic": float(snap.cell_traffic[sel].mean()),
        "drop_rate": float(snap.dropped.mean()) if snap.dropped.size else 0.0,
        "interior_cells": n,
    }


def _n_workers() -> int:
    raw = os.environ.get("PVT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_trials(p: PowerParams, window: Window, n_trials: int, seed: int) -> list[dict]:
    """Independent snapshot trials with spawned child streams; deterministic
    for a given seed regardless of worker count."""
    if n_trials < 1:
        raise InvalidInputError("need at least one trial")
    seqs = np.random.SeedSequence(seed).spawn(n_trials)
    workers = min(_n_workers(), n_trials)
    if workers <= 1:
        return [_trial_stats(p, window, s) for s in seqs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_trial_stats, [p] * n_trials, [window] * n_trials, seqs))


def mc_energy_efficiency(p: PowerParams, window: Window, n_trials: int,
                         seed: int) -> McEstimate:
    """MC energy efficiency over interior cells, 95% CI from trial spread."""
    stats = run_trials(p, window, n_trials, seed)
    ees = np.array([s["ee"] for s in stats])
    hw = 1.96 * ees.std(ddof=1) / np.sqrt(n_trials) if n_trials > 1 else np.inf
    return McEstimate(
        mean=float(ees.mean()), ci_halfwidth=float(hw),
        n_trials=n_trials, seed=seed,
        extras={
            "outage": float(np.mean([s["outage"] for s in stats])),
            "mean_power_w": float(np.mean([s["mean_power"] for s in stats])),
            "mean_traffic": float(np.mean([s["mean_traffic"] for s in stats])),
            "drop_rate": float(np.mean([s["drop_rate"] for s in stats])),
            "interior_cells": int(np.sum([s["interior_cells"] for s in stats])),
        },
    )


# ---------------------------------------------------------------------------
# Light-weight marginal samplers (oracles for the analytic CFs)
# ---------------------------------------------------------------------------

def sample_interference(p: PowerParams, n: int, rng: np.random.Generator,
                        field_radius: float = 30_000.0, chunk: int = 20_000) -> np.ndarray:
    """Marginal aggregate interference at a typical user.

    Interfering BSs form a Poisson field of intensity lambda_inf on a disc
    large enough that the truncated far field is negligible; each carries an
    in-cell interfering user at a nearest-distance-law radius and a sampled
    shadow/fade ratio factor.
    """
    lam_b = p.traffic.lambda_b
    sig = p.channel.shadowing_db
    beta = p.channel.path_loss_exp
    out = np.empty(n)
    for i0 in range(0, n, chunk):
        m = min(chunk, n - i0)
        counts = rng.poisson(p.lambda_inf * np.pi * field_radius ** 2, m)
        tot = int(counts.sum())
        y = field_radius * np.sqrt(rng.random(tot))
        r1 = np.sqrt(-np.log(rng.random(tot)) / (np.pi * lam_b))
        s_k = _interferer_receive_power(p, rng, tot)
        g = rng.standard_normal(tot)
        u = rng.random(tot)
        q = np.exp(np.sqrt(2.0) * SHADOW_COEF * sig * g) * u / (1.0 - u)
        acc = np.zeros(m)
        np.add.at(acc, np.repeat(np.arange(m), counts), s_k * (r1 / y) ** beta * q)
        out[i0:i0 + m] = acc
    return out


def sample_receiving_power(p: PowerParams, n: int, rng: np.random.Generator,
                           **kw) -> np.ndarray:
    """S0 = target SIR x aggregate interference, both freshly sampled."""
    rho = np.minimum(sample_pareto(p.traffic, rng, n), p.rate_cap)
    return rate_to_sir(rho, p.channel) * sample_interference(p, n, rng, **kw)


def sample_typical_cell_power(p: PowerParams, n: int, rng: np.random.Generator,
                              **kw) -> np.ndarray:
    """Required total power of a typical cell under the reduced marked-process
    model: user count Poisson(lambda_M/lambda_B), user distances from the
    nearest-BS law, and i.i.d. per-user marks gamma * V * I with an
    unconditioned interference field.

    This is the exact generative dual of the analytic total-power CF; the
    full tessellation simulator differs from it through the interferer
    exclusion geometry the analytic chain averages away.
    """
    tr, ch = p.traffic, p.channel
    counts = rng.poisson(tr.ratio, n)
    tot = int(counts.sum())
    rho = np.minimum(sample_pareto(tr, rng, tot), p.rate_cap)
    gam = rate_to_sir(rho, ch)
    i_agg = sample_interference(p, tot, rng, **kw)
    v = np.exp(-SHADOW_COEF * ch.shadowing_db * rng.standard_normal(tot)) \
        / rng.exponential(1.0, tot)
    r = np.sqrt(-np.log(rng.random(tot)) / (np.pi * tr.lambda_b))
    with np.errstate(over="ignore"):
        eps = r ** ch.path_loss_exp * v * gam * i_agg / ch.gain_const
    eps = _cap_astronomic(eps, rng)
    out = np.zeros(n)
    np.add.at(out, np.repeat(np.arange(n), counts), eps)
    return out
