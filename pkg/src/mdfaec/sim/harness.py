"""Run echo scenarios through a canceller and summarize ERLE, misalignment and eta."""
import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ..canceller import CancellerConfig, EchoCanceller
from .metrics import erle_series, frame_energies, misalignment_db
from .scenario import synthesize

# adaptation transient left out of the steady-state averages
TRANSIENT_S = 2.0
ACTIVITY_THRESHOLD = 1e-5

METRICS_HEADER = ["frame", "time_s", "erle_db", "misalignment_db", "eta", "mu_mean", "double_talk_active"]
SUMMARY_HEADER = ["policy", "nfr_db", "erle_ss_db", "erle_ss_excl_switch_db", "final_misalignment_db"]


@dataclass(frozen=True)
class MetricsRow:
    frame: int
    time_s: float
    erle_db: float
    misalignment_db: float
    eta: float
    mu_mean: float
    double_talk_active: bool


@dataclass(frozen=True)
class ScenarioSummary:
    policy: str
    nfr_db: float
    erle_ss_db: float
    erle_ss_excl_switch_db: float
    final_misalignment_db: float
    eta_min: float
    eta_max: float


@dataclass
class ScenarioRun:
    rows: list
    summary: ScenarioSummary
    echo_estimate: np.ndarray
    signals: object


def canceller_config(scenario, policy, **overrides):
    return CancellerConfig(block_size=scenario.block_size, partitions=scenario.partitions, policy=policy, **overrides)


def run_scenario(config, policy="proposed", signals=None, erle_window=16, **overrides):
    """Stream one scenario through a fresh canceller.

    Extra keyword arguments override :class:`CancellerConfig` fields
    (e.g. ``mu=0.0`` or ``eta_init=1.0``). Pass ``signals`` to reuse a
    previously synthesized scenario.

    Returns a :class:`ScenarioRun` holding one :class:`MetricsRow` per frame,
    the summary, the echo estimate stream and the synthesized signals.
    """
    if signals is None:
        signals = synthesize(config)
    aec = EchoCanceller(canceller_config(config, policy, **overrides))
    n = config.block_size
    frames = signals.far.size // n
    y_hat = np.zeros(frames * n)
    h1, h2 = signals.paths
    diags = []
    mis = np.empty(frames)
    for i in range(frames):
        s = slice(i * n, (i + 1) * n)
        out, d = aec.process_frame(signals.far[s], signals.mic[s])
        y_hat[s] = signals.mic[s] - out
        diags.append(d)
        # frames straddling the change are scored against the new response
        h = h1 if (i + 1) * n <= signals.change_sample else h2
        mis[i] = misalignment_db(h, aec.filter.export_impulse_response())

    erle = erle_series(signals.echo[: y_hat.size], y_hat, n, erle_window)
    talk = frame_energies(signals.talk, n) > n * ACTIVITY_THRESHOLD**2
    rate = config.sample_rate
    rows = [
        MetricsRow(i, i * n / rate, float(erle[i]), float(mis[i]), d.eta, d.mu_mean, bool(talk[i]))
        for i, d in enumerate(diags)
    ]
    return ScenarioRun(rows, summarize(rows, config, policy), y_hat, signals)


def steady_state_mask(times, change_s=None, transient_s=TRANSIENT_S):
    times = np.asarray(times)
    keep = times >= transient_s
    if change_s is not None:
        keep &= ~((times >= change_s) & (times < change_s + transient_s))
    return keep


def summarize(rows, config, policy):
    times = np.array([r.time_s for r in rows])
    erle = np.array([r.erle_db for r in rows])
    eta = np.array([r.eta for r in rows])
    incl = steady_state_mask(times)
    excl = steady_state_mask(times, config.path_change_at_s)
    finite_eta = eta[np.isfinite(eta)]
    return ScenarioSummary(
        policy=policy,
        nfr_db=config.nfr_db,
        erle_ss_db=float(erle[incl].mean()) if incl.any() else math.nan,
        erle_ss_excl_switch_db=float(erle[excl].mean()) if excl.any() else math.nan,
        final_misalignment_db=rows[-1].misalignment_db if rows else math.nan,
        eta_min=float(finite_eta.min()) if finite_eta.size else math.nan,
        eta_max=float(finite_eta.max()) if finite_eta.size else math.nan,
    )


def _cell(args):
    config, policy, overrides = args
    return run_scenario(config, policy, **overrides).summary


def nfr_sweep(base_config, nfr_list, policies, jobs=1, **overrides):
    """Summaries for every (NFR, policy) pair, NFR-major, all sharing the base seed."""
    cells = [(replace(base_config, nfr_db=float(nfr)), p, overrides) for nfr in nfr_list for p in policies]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_cell, cells))
    return [_cell(c) for c in cells]


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.6g}"


def write_metrics_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(METRICS_HEADER)
    for r in rows:
        w.writerow([fmt(getattr(r, k)) for k in METRICS_HEADER])


def write_summary_csv(summaries, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SUMMARY_HEADER)
    for s in summaries:
        w.writerow([s.policy] + [fmt(getattr(s, k)) for k in SUMMARY_HEADER[1:]])
