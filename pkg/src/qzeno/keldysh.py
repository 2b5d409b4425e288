"""Steady-state Green-function solver for the effective three-site network.

Retarded and Keldysh components are assembled from wide-band self-energies:
Gibbsian leads on site g with Sigma^R = -i Gamma and
Sigma^K = -2i Gamma tanh((w - mu)/2T), and the enhanced Markovian drain on
site 5 with Sigma^R = -i e_nh Gamma_5 and Sigma^K = -2i e_nh Gamma_5 (an
empty reservoir injects nothing, so Sigma^< = 0).  Occupations and currents
follow from frequency integrals of G^< and the spectral function; the
integrator maps the real line onto a finite interval and refines
Gauss-Legendre panels adaptively, so Lorentzian tails are integrated to
machine-level accuracy without ad hoc cutoffs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .model import EffectiveModel

__all__ = [
    "AccuracyError", "FrequencyGrid", "TransportResult",
    "lead_self_energy", "markov_self_energy", "thermal_sign", "greens",
    "integrate", "solve_transport", "occupation", "lead_current",
    "loss_current",
]


class AccuracyError(RuntimeError):
    """Frequency integration failed to reach the requested tolerance."""


_GL_CACHE: dict = {}


def _gl(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = leggauss(n)
    return _GL_CACHE[n]


def thermal_sign(omega, mu, T):
    """Distribution factor tanh((omega - mu) / 2T); sign(omega - mu) at T = 0."""
    omega = np.asarray(omega, dtype=float)
    if T == 0.0:
        return np.sign(omega - mu)
    return np.tanh((omega - mu) / (2.0 * T))


def lead_self_energy(Gamma, mu, T, omega):
    """Wide-band Gibbsian lead: (Sigma^R, Sigma^K) at frequency omega."""
    if Gamma < 0:
        raise ValueError("Gamma must be >= 0")
    if T < 0:
        raise ValueError("T must be >= 0")
    s = thermal_sign(omega, mu, T)
    return -1j * Gamma, -2j * Gamma * s


def markov_self_energy(Gamma_5, e_nh):
    """Empty Markovian drain with enhanced coupling: frequency independent.

    Sigma^R = -i e_nh Gamma_5 realizes the enhanced level broadening as a
    self-energy (equivalent to the complex site energy; the solver uses one
    of the two, never both).  Sigma^K = -2i e_nh Gamma_5 follows from the
    no-injection condition Sigma^< = (Sigma^K - Sigma^R + Sigma^A)/2 = 0.
    """
    if Gamma_5 <= 0:
        raise ValueError("Gamma_5 must be > 0")
    if e_nh < 1.0:
        raise ValueError("enhancement must be >= 1")
    g = e_nh * Gamma_5
    return -1j * g, -2j * g


def _injection_drain(model: EffectiveModel, omega):
    """Per-site injection p(w) and drain q(w): Sigma^< = i p, Sigma^> = -i q."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    N = omega.size
    p = np.zeros((N, 3))
    q = np.zeros((N, 3))
    for Gamma, mu, occ in ((model.Gamma_L, model.mu_L, model.lead_occ_L),
                           (model.Gamma_R, model.mu_R, model.lead_occ_R)):
        if occ is not None:
            f = np.full(N, occ)
        else:
            f = 0.5 * (1.0 - thermal_sign(omega, mu, model.T))
        p[:, 0] += 2.0 * Gamma * f
        q[:, 0] += 2.0 * Gamma * (1.0 - f)
    q[:, 2] = 2.0 * model.e_nh * model.Gamma_5
    return p, q


def _check_assembly(model: EffectiveModel):
    # the complex site energy must be the display twin of the drain
    # self-energy, otherwise the broadening would be double counted
    expected = -model.e_nh * model.Gamma_5
    if abs(model.eps_5_eff.imag - expected) > 1e-12 * max(1.0, abs(expected)):
        raise ValueError(
            "Im eps_5_eff inconsistent with -e_nh * Gamma_5: the drain "
            "broadening would be double counted or lost (carry it either in "
            "the site energy or in the self-energy, never both)")


def _greens_batch(model: EffectiveModel, omega):
    """(G^R, G^K) stacked over a frequency batch."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    H = model.hamiltonian()
    widths = model.site_widths()
    M = (omega[:, None, None] * np.eye(3)[None] - H[None]
         + 1j * np.diag(widths)[None])
    GR = np.linalg.inv(M)
    p, q = _injection_drain(model, omega)
    sigK = 1j * (p - q)
    GA = np.conj(np.swapaxes(GR, 1, 2))
    GK = np.einsum("nij,nj,njk->nik", GR, sigK, GA)
    return GR, GK


def greens(omega, model: EffectiveModel):
    """Retarded and Keldysh 3x3 Green functions at a single frequency.

    G^R = [w - H0 - Sigma^R]^(-1) with H0 built from the real site
    energies, and G^K = G^R Sigma^K G^A.  Raises on a singular matrix
    (possible only with all broadenings zero).
    """
    _check_assembly(model)
    if np.all(model.site_widths() == 0.0):
        H = model.hamiltonian()
        if np.min(np.abs(np.linalg.eigvalsh(H) - omega)) < 1e-14:
            raise np.linalg.LinAlgError("omega hits an eigenvalue of a "
                                        "dissipationless network")
    GR, GK = _greens_batch(model, omega)
    return GR[0], GK[0]


@dataclass(frozen=True)
class FrequencyGrid:
    """Adaptive panel layout for integrals over the whole frequency axis.

    The axis is mapped through omega = scale * tan(theta); panel edges are
    seeded on every spectral feature (resonances, chemical potentials) at
    multiples of its width, then bisected adaptively until the summed
    Richardson estimate (half- vs full-order Gauss-Legendre per panel)
    drops below ``tol``.  ``window`` reports the equivalent [-Omega, Omega]
    coverage of the seeded region.
    """

    features: tuple
    widths: tuple
    tol: float = 1e-9
    map_scale: float = 1.0
    base_nodes: int = 16
    max_depth: int = 12
    window_factor: float = 50.0

    @classmethod
    def for_model(cls, model: EffectiveModel, tol=1e-9):
        H = model.hamiltonian()
        eigs = [float(x) for x in np.linalg.eigvalsh(H).real]
        feats = list(eigs) + [0.0]
        wmax = float(np.max(model.site_widths()))
        wmin = max(min(model.Gamma_L + model.Gamma_R,
                       model.e_nh * model.Gamma_5), 1e-3)
        wids = [wmin] * len(feats)
        for mu, occ in ((model.mu_L, model.lead_occ_L),
                        (model.mu_R, model.lead_occ_R)):
            if occ is None:
                feats.append(float(mu))
                wids.append(max(model.T, 1e-3))
        scale = max(1.0, np.max(np.abs(feats)) / 3.0, wmax / 10.0)
        return cls(features=tuple(feats), widths=tuple(wids), tol=tol,
                   map_scale=scale)

    @property
    def window(self):
        hi = max((abs(f) + self.window_factor * w
                  for f, w in zip(self.features, self.widths)), default=50.0)
        biggest = max((abs(x) for x in (*self.features, *self.widths)),
                      default=1.0)
        return max(hi, 10.0 * biggest, 50.0)

    def theta_edges(self):
        W = self.map_scale
        edges = {-np.pi / 2.0, np.pi / 2.0}
        for x in np.linspace(-np.pi / 2, np.pi / 2, 17):
            edges.add(float(x))
        for f, w in zip(self.features, self.widths):
            for c in (-self.window_factor, -10.0, -3.0, -1.0, 0.0,
                      1.0, 3.0, 10.0, self.window_factor):
                edges.add(float(np.arctan((f + c * w) / W)))
        out = np.array(sorted(edges))
        return out[np.concatenate([[True], np.diff(out) > 1e-13])]


def _integrate_mapped(fvec, grid: FrequencyGrid):
    """Adaptive integration of a vector integrand over the mapped axis.

    ``fvec(omega_array) -> (N, k)``.  Returns (value, error_estimate,
    panel_count); raises AccuracyError when the depth budget is exhausted.
    """
    W = grid.map_scale
    n_lo, n_hi = grid.base_nodes, 2 * grid.base_nodes

    def panel(a, b):
        res = {}
        for n in (n_lo, n_hi):
            x, wgt = _gl(n)
            th = 0.5 * (b - a) * x + 0.5 * (a + b)
            om = W * np.tan(th)
            jac = W / np.cos(th) ** 2
            vals = fvec(om) * jac[:, None]
            res[n] = 0.5 * (b - a) * (wgt[:, None] * vals).sum(axis=0)
        return res[n_hi], float(np.max(np.abs(res[n_hi] - res[n_lo])))

    panels = []
    for a, b in zip(grid.theta_edges()[:-1], grid.theta_edges()[1:]):
        val, err = panel(a, b)
        panels.append((err, a, b, val, 0))

    while True:
        total_err = sum(p[0] for p in panels)
        if total_err < grid.tol:
            break
        panels.sort(key=lambda p: -p[0])
        err, a, b, _, depth = panels[0]
        if depth >= grid.max_depth:
            raise AccuracyError(
                f"integration stalled at error estimate {total_err:.3e} "
                f"(tolerance {grid.tol:.1e}, {len(panels)} panels)")
        panels.pop(0)
        mid = 0.5 * (a + b)
        for aa, bb in ((a, mid), (mid, b)):
            val, e = panel(aa, bb)
            panels.append((e, aa, bb, val, depth + 1))

    total = np.sum([p[3] for p in panels], axis=0)
    return total, sum(p[0] for p in panels), len(panels)


def integrate(f, grid: FrequencyGrid):
    """Integrate a scalar or vector function of frequency over the axis.

    Returns ``(value, error_estimate)``; the estimate is the summed
    half-order vs full-order panel defect.  AccuracyError when the adaptive
    refinement cannot reach ``grid.tol``.
    """
    probe = np.atleast_1d(f(np.array([0.0])))
    scalar = probe.ndim == 1

    def fvec(om):
        vals = f(om)
        vals = np.asarray(vals)
        if scalar:
            return vals.reshape(-1, 1)
        return vals

    total, err, _ = _integrate_mapped(fvec, grid)
    if scalar:
        return float(total[0]), err
    return total, err


@dataclass(frozen=True)
class TransportResult:
    occupations: np.ndarray      # n_g, n_e, n_5
    I_L: float
    I_R: float
    I_loss: float
    sum_rules: np.ndarray        # spectral-weight integral per site
    continuity_residual: float
    grid_error: float
    panel_count: int

    def as_dict(self):
        return {
            "n_g": float(self.occupations[0]),
            "n_e": float(self.occupations[1]),
            "n_5": float(self.occupations[2]),
            "I_L": self.I_L, "I_R": self.I_R, "I_loss": self.I_loss,
            "continuity_residual": self.continuity_residual,
            "grid_error": self.grid_error,
        }


def solve_transport(model: EffectiveModel, tol=1e-9, grid=None) -> TransportResult:
    """Occupations, lead currents and loss current in one integration pass.

    Sign convention: lead currents are positive flowing from the lead into
    the junction; the loss current is positive into the drain, so particle
    conservation reads I_L + I_R = I_loss in the steady state.
    """
    _check_assembly(model)
    if grid is None:
        grid = FrequencyGrid.for_model(model, tol=tol)
    H = model.hamiltonian()
    widths = model.site_widths()
    eye = np.eye(3)
    q5 = 2.0 * model.e_nh * model.Gamma_5

    def fvec(omega):
        omega = np.atleast_1d(omega)
        M = (omega[:, None, None] * eye[None] - H[None]
             + 1j * np.diag(widths)[None])
        G = np.linalg.inv(M)
        absG2 = np.abs(G) ** 2
        p, q = _injection_drain(model, omega)
        n = np.einsum("njk,nk->nj", absG2, p)
        m = np.einsum("njk,nk->nj", absG2, q)
        A = -2.0 * np.imag(np.einsum("njj->nj", G))
        pL, pR = np.zeros_like(omega), np.zeros_like(omega)
        qL, qR = np.zeros_like(omega), np.zeros_like(omega)
        for (Gam, mu, occ, pa, qa) in (
                (model.Gamma_L, model.mu_L, model.lead_occ_L, pL, qL),
                (model.Gamma_R, model.mu_R, model.lead_occ_R, pR, qR)):
            f = (np.full(omega.shape, occ) if occ is not None
                 else 0.5 * (1.0 - thermal_sign(omega, mu, model.T)))
            pa += 2.0 * Gam * f
            qa += 2.0 * Gam * (1.0 - f)
        I_L = pL * m[:, 0] - qL * n[:, 0]
        I_R = pR * m[:, 0] - qR * n[:, 0]
        I_loss = q5 * n[:, 2]
        cols = [n[:, 0], n[:, 1], n[:, 2], I_L, I_R, I_loss,
                A[:, 0], A[:, 1], A[:, 2]]
        return np.stack(cols, axis=1) / (2.0 * np.pi)

    total, err, npanels = _integrate_mapped(fvec, grid)
    occ = total[0:3]
    I_L, I_R, I_loss = float(total[3]), float(total[4]), float(total[5])
    if np.any(occ < -1e-8) or np.any(occ > 1.0 + 1e-8):
        raise AccuracyError(f"occupations out of [0, 1]: {occ}")
    return TransportResult(
        occupations=occ, I_L=I_L, I_R=I_R, I_loss=I_loss,
        sum_rules=total[6:9],
        continuity_residual=I_L + I_R - I_loss,
        grid_error=err, panel_count=npanels)


_SITE_INDEX = {"g": 0, "e": 1, "5": 2, 0: 0, 1: 1, 2: 2}


def occupation(model: EffectiveModel, site, tol=1e-9) -> float:
    """Steady-state occupation of one site, n = Int dw/2pi (-i) G^<_jj."""
    res = solve_transport(model, tol=tol)
    return float(res.occupations[_SITE_INDEX[site]])


def lead_current(model: EffectiveModel, which, tol=1e-9) -> float:
    """Particle current from lead 'L' or 'R' into the junction."""
    res = solve_transport(model, tol=tol)
    if which not in ("L", "R"):
        raise ValueError("lead must be 'L' or 'R'")
    return res.I_L if which == "L" else res.I_R


def loss_current(model: EffectiveModel, tol=1e-9) -> float:
    """Particle current into the Markovian drain,
    I_loss = Int dw/2pi 2 e_nh Gamma_5 (-i) G^<_55; equals I_L + I_R."""
    return solve_transport(model, tol=tol).I_loss
