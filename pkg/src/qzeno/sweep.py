"""Drive-intensity sweeps of the loss current, and peak location.

Every emitted record re-checks the steady-state continuity invariant
I_L + I_R = I_loss; a violation aborts the run rather than emitting a bad
row.  Output ordering is deterministic (gamma-major, then e_nh, then
delta_mu) no matter how many workers computed the points.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import SweepConfig
from .keldysh import AccuracyError, solve_transport, loss_current
from .model import EffectiveModel

__all__ = ["SweepConfig", "SweepRecord", "SweepResult", "NoPeakError",
           "model_for_point", "run_sweep", "find_zeno_peak",
           "write_csv", "read_csv", "CSV_HEADER"]

CSV_HEADER = ("gamma,e_nh,delta_mu,I_loss,I_L,I_R,"
              "n_g,n_e,n_5,continuity_residual,grid_error")

CONTINUITY_BOUND = 1e-8


class NoPeakError(RuntimeError):
    """The curve is monotone on the grid; no interior maximum exists."""


@dataclass(frozen=True)
class SweepRecord:
    gamma: float
    e_nh: float
    delta_mu: float
    I_loss: float
    I_L: float
    I_R: float
    n_g: float
    n_e: float
    n_5: float
    continuity_residual: float
    grid_error: float


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    records: tuple

    def curve(self, e_nh, delta_mu):
        """(gamma, I_loss) arrays of one curve, gamma ascending."""
        rows = [r for r in self.records
                if r.e_nh == e_nh and r.delta_mu == delta_mu]
        rows.sort(key=lambda r: r.gamma)
        return (np.array([r.gamma for r in rows]),
                np.array([r.I_loss for r in rows]))


def model_for_point(cfg: SweepConfig, gamma, e_nh, delta_mu) -> EffectiveModel:
    """Effective network at one grid point.  Drive bond sqrt(gamma), lead
    and drain widths |t|^2 / (2 v_F), symmetric bias mu_L = -mu_R."""
    Gamma_L = cfg.t_L ** 2 / cfg.two_v_F
    Gamma_R = cfg.t_R ** 2 / cfg.two_v_F
    Gamma_5 = cfg.t_5 ** 2 / cfg.two_v_F
    eps_shifted = cfg.eps_g - cfg.delta_eg
    return EffectiveModel(
        eps_g_eff=cfg.eps_g,
        eps_e_eff=eps_shifted,
        eps_5_eff=complex(eps_shifted, -e_nh * Gamma_5),
        t_eg_eff=math.sqrt(gamma),
        t_e5_eff=cfg.t_e5,
        Gamma_L=Gamma_L, Gamma_R=Gamma_R,
        mu_L=delta_mu / 2.0, mu_R=-delta_mu / 2.0,
        T=cfg.temperature,
        Gamma_5=Gamma_5, e_nh=e_nh)


def _evaluate_point(cfg, gamma, e_nh, delta_mu):
    model = model_for_point(cfg, gamma, e_nh, delta_mu)
    res = solve_transport(model, tol=cfg.tolerance)
    bound = CONTINUITY_BOUND * max(1.0, abs(res.I_loss))
    if abs(res.continuity_residual) > bound:
        raise AccuracyError(
            f"continuity violated at gamma={gamma:g}, e_nh={e_nh:g}, "
            f"delta_mu={delta_mu:g}: residual {res.continuity_residual:.3e}")
    return SweepRecord(
        gamma=gamma, e_nh=e_nh, delta_mu=delta_mu,
        I_loss=res.I_loss, I_L=res.I_L, I_R=res.I_R,
        n_g=float(res.occupations[0]), n_e=float(res.occupations[1]),
        n_5=float(res.occupations[2]),
        continuity_residual=res.continuity_residual,
        grid_error=res.grid_error)


def run_sweep(cfg: SweepConfig, threads: int = 1) -> SweepResult:
    """Evaluate the full Cartesian grid.

    ``threads = 0`` uses all cores; points are independent and the output
    order is fixed regardless of completion order.  Accuracy failures
    propagate with the offending parameter point in the message.
    """
    gammas = np.logspace(math.log10(cfg.gamma_min), math.log10(cfg.gamma_max),
                         cfg.gamma_count)
    points = [(float(g), float(e), float(d))
              for g in gammas for e in cfg.e_nh for d in cfg.delta_mu]
    if threads == 0:
        import os
        threads = os.cpu_count() or 1
    if threads <= 1:
        records = [_evaluate_point(cfg, *pt) for pt in points]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_evaluate_point, cfg, *pt) for pt in points]
            records = [f.result() for f in futures]
    return SweepResult(config=cfg, records=tuple(records))


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_csv(result: SweepResult, path) -> None:
    """Plot-ready CSV with a fixed header and 17-significant-digit floats;
    identical configs produce byte-identical files."""
    lines = [CSV_HEADER]
    for r in result.records:
        lines.append(",".join(_fmt(v) for v in (
            r.gamma, r.e_nh, r.delta_mu, r.I_loss, r.I_L, r.I_R,
            r.n_g, r.n_e, r.n_5, r.continuity_residual, r.grid_error)))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    """Records back from a sweep CSV (header checked verbatim)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path} is not a sweep CSV (unexpected header)")
    records = []
    for ln in lines[1:]:
        vals = [float(x) for x in ln.split(",")]
        records.append(SweepRecord(*vals))
    return records


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def find_zeno_peak(result: SweepResult, e_nh, delta_mu, evaluator=None,
                   rel_tol=1e-4):
    """Locate the loss-current maximum of one curve.

    Starts from the grid argmax and refines by golden-section search on
    log(gamma) using fresh solver evaluations (``evaluator(gamma)`` may
    override, e.g. for synthetic curves).  A curve whose argmax sits on a
    grid endpoint has no interior maximum and raises :class:`NoPeakError`
    describing the end behavior.
    """
    gammas, currents = result.curve(e_nh, delta_mu)
    if gammas.size < 8:
        raise ValueError("need at least 8 grid points to locate a peak")
    k = int(np.argmax(currents))
    if k == 0 or k == gammas.size - 1:
        side = "left" if k == 0 else "right"
        raise NoPeakError(
            f"curve is monotone toward the {side} end of the grid "
            f"(argmax at gamma={gammas[k]:g}); no interior maximum")

    if evaluator is None:
        cfg = result.config

        def evaluator(g):
            return loss_current(model_for_point(cfg, g, e_nh, delta_mu),
                                tol=cfg.tolerance)

    a, b = math.log(gammas[k - 1]), math.log(gammas[k + 1])
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = evaluator(math.exp(x1)), evaluator(math.exp(x2))
    while (b - a) > rel_tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = evaluator(math.exp(x2))
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = evaluator(math.exp(x1))
    g_star = math.exp(0.5 * (a + b))
    return g_star, evaluator(g_star)
