"""Cross-validation between the master-equation and Green-function solvers.

Both solvers are pointed at instances they can represent exactly or in a
controlled regime, and must produce the same steady-state loss current:

* exact-quadratic instances carry no photon mode (the drive is already a
  classical bond and the photon loss is folded into the drain enhancement);
  the two descriptions are the same quadratic model and must agree to
  solver precision;
* adiabatic instances keep the leaky photon mode explicitly, with a decay
  rate well above every coupling; the effective description then matches
  up to controlled corrections that shrink as the photon mode gets faster.

Leads are flat-occupation Markovian on both sides (a dense master equation
cannot represent a finite-(mu, T) thermal lead), so the comparison is an
equality of models, not of approximations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fock import HilbertSpace
from .lindblad import JumpChannel, steady_state, expectation
from .model import EffectiveModel, enhancement
from .keldysh import solve_transport

__all__ = ["BridgeInstance", "BridgeReport", "ConvergenceError",
           "build_full_lindblad", "effective_counterpart", "compare",
           "adiabatic_ladder"]

EXACT_QUADRATIC_TOL = 1e-6
ADIABATIC_TOL = 5e-2


class ConvergenceError(RuntimeError):
    """Cutoff or grid refinement shifted the result above tolerance/10."""


@dataclass(frozen=True)
class BridgeInstance:
    """One comparison point.

    ``regime`` is ``"exact-quadratic"`` (no photon mode) or ``"adiabatic"``
    (explicit photon mode with cutoff ``n_ph``).  ``t_e5`` is the e-5 bond
    of the quadratic network, and doubles as the light-matter coupling
    lambda of the photon vertex in the adiabatic regime.
    """

    regime: str
    t_eg: float
    t_e5: float
    Gamma_5: float
    Gamma_e5: float
    Gamma_L: float = 0.25
    Gamma_R: float = 0.25
    nbar_L: float = 1.0
    nbar_R: float = 1.0
    eps: tuple = (0.0, 0.0, 0.0)
    n_ph: int | None = None

    def __post_init__(self):
        if self.regime not in ("exact-quadratic", "adiabatic"):
            raise ValueError(f"unknown regime {self.regime!r}")
        if not (0 <= self.nbar_L <= 1 and 0 <= self.nbar_R <= 1):
            raise ValueError("lead occupations must lie in [0, 1]")
        if self.Gamma_5 <= 0 or self.Gamma_e5 < 0:
            raise ValueError("need Gamma_5 > 0 and Gamma_e5 >= 0")
        if self.regime == "exact-quadratic":
            if self.n_ph is not None:
                raise ValueError("exact-quadratic instances carry no photon mode")
        else:
            if self.n_ph is None or self.n_ph < 1:
                raise ValueError("adiabatic instances need a photon cutoff >= 1")
            fastest = 5.0 * max(abs(self.t_e5), abs(self.t_eg))
            if self.Gamma_e5 < fastest:
                raise ValueError(
                    f"adiabatic regime needs Gamma_e5 >= {fastest}, "
                    f"got {self.Gamma_e5}")

    @property
    def e_nh(self):
        return enhancement(self.Gamma_e5, self.Gamma_5)


def build_full_lindblad(inst: BridgeInstance):
    """Hilbert space, Hamiltonian and jump channels of the instance.

    Exact-quadratic: three fermion modes, drive and e-5 bonds, lead
    exchange on g, and the folded drain (c_5 at rate 2 e_nh Gamma_5).
    Adiabatic: additionally the photon mode with the three-operator vertex
    lambda (c_e^+ a c_5 + h.c.), photon loss (a at 2 Gamma_e5) and the bare
    atom drain (c_5 at 2 Gamma_5).
    """
    with_photon = inst.regime == "adiabatic"
    space = HilbertSpace(["g", "e", "5"],
                         boson_cutoff=inst.n_ph if with_photon else None)
    cg, ce, c5 = (space.annihilator(n) for n in ("g", "e", "5"))
    H = (inst.eps[0] * space.number("g") + inst.eps[1] * space.number("e")
         + inst.eps[2] * space.number("5")
         + inst.t_eg * (ce.conj().T @ cg + cg.conj().T @ ce))
    channels = [
        JumpChannel(cg, 2 * inst.Gamma_L * (1 - inst.nbar_L)
                    + 2 * inst.Gamma_R * (1 - inst.nbar_R)),
        JumpChannel(cg.conj().T, 2 * inst.Gamma_L * inst.nbar_L
                    + 2 * inst.Gamma_R * inst.nbar_R),
    ]
    if with_photon:
        a = space.annihilator(space.boson_name)
        H = H + inst.t_e5 * (ce.conj().T @ a @ c5 + c5.conj().T @ a.conj().T @ ce)
        channels.append(JumpChannel(a, 2 * inst.Gamma_e5))
        channels.append(JumpChannel(c5, 2 * inst.Gamma_5))
    else:
        H = H + inst.t_e5 * (ce.conj().T @ c5 + c5.conj().T @ ce)
        channels.append(JumpChannel(c5, 2 * inst.e_nh * inst.Gamma_5))
    return space, H, channels


def effective_counterpart(inst: BridgeInstance) -> EffectiveModel:
    """The matching Green-function model: flat leads with
    Sigma^K = -2i Gamma (1 - 2 nbar), drain enhancement e_nh = 1 + Gamma_e5/Gamma_5."""
    enh = inst.e_nh
    return EffectiveModel(
        eps_g_eff=inst.eps[0], eps_e_eff=inst.eps[1],
        eps_5_eff=complex(inst.eps[2], -enh * inst.Gamma_5),
        t_eg_eff=inst.t_eg, t_e5_eff=inst.t_e5,
        Gamma_L=inst.Gamma_L, Gamma_R=inst.Gamma_R,
        mu_L=0.0, mu_R=0.0, T=0.0,
        Gamma_5=inst.Gamma_5, e_nh=enh,
        lead_occ_L=inst.nbar_L, lead_occ_R=inst.nbar_R)


@dataclass(frozen=True)
class BridgeReport:
    instance: BridgeInstance
    I_loss_lindblad: float
    I_loss_keldysh: float
    occupations_lindblad: tuple
    occupations_keldysh: tuple
    relative_deviation: float
    cutoff_shift: float
    grid_shift: float
    photon_number: float | None
    tolerance: float
    within_tolerance: bool

    def as_dict(self):
        return {
            "regime": self.instance.regime,
            "Gamma_e5": self.instance.Gamma_e5,
            "Gamma_5": self.instance.Gamma_5,
            "e_nh": self.instance.e_nh,
            "I_loss_lindblad": self.I_loss_lindblad,
            "I_loss_keldysh": self.I_loss_keldysh,
            "occupations_lindblad": list(self.occupations_lindblad),
            "occupations_keldysh": list(self.occupations_keldysh),
            "relative_deviation": self.relative_deviation,
            "cutoff_shift": self.cutoff_shift,
            "grid_shift": self.grid_shift,
            "photon_number": self.photon_number,
            "tolerance": self.tolerance,
            "within_tolerance": self.within_tolerance,
        }


def _lindblad_observables(inst: BridgeInstance, n_ph=None):
    if n_ph is None:
        work = inst
    else:
        work = BridgeInstance(**{**inst.__dict__, "n_ph": n_ph})
    space, H, channels = build_full_lindblad(work)
    rho = steady_state(H, channels)
    occ = tuple(float(expectation(space.number(n), rho).real)
                for n in ("g", "e", "5"))
    if work.regime == "adiabatic":
        I_loss = 2.0 * work.Gamma_5 * occ[2]
        n_phot = float(expectation(space.number(space.boson_name), rho).real)
    else:
        I_loss = 2.0 * work.e_nh * work.Gamma_5 * occ[2]
        n_phot = None
    return occ, I_loss, n_phot


def compare(inst: BridgeInstance, tol=None, grid_tol=1e-9) -> BridgeReport:
    """Run both solvers on one instance and report the deviation.

    Convergence is established before comparing: doubling the photon cutoff
    (adiabatic regime) and tightening the frequency grid must each move the
    loss current by less than a tenth of the agreement tolerance, else
    :class:`ConvergenceError`.
    """
    if tol is None:
        tol = (ADIABATIC_TOL if inst.regime == "adiabatic"
               else EXACT_QUADRATIC_TOL)

    occ_ld, I_ld, n_phot = _lindblad_observables(inst)
    cutoff_shift = 0.0
    if inst.regime == "adiabatic":
        _, I_ld_2, _ = _lindblad_observables(inst, n_ph=2 * inst.n_ph)
        cutoff_shift = abs(I_ld_2 - I_ld) / max(abs(I_ld), 1e-300)
        if cutoff_shift > tol / 10.0:
            raise ConvergenceError(
                f"photon cutoff {inst.n_ph} not converged: doubling moves "
                f"I_loss by {cutoff_shift:.2e} (> {tol / 10:.1e})")

    model = effective_counterpart(inst)
    res = solve_transport(model, tol=grid_tol)
    res_fine = solve_transport(model, tol=grid_tol / 16.0)
    grid_shift = abs(res_fine.I_loss - res.I_loss) / max(abs(res.I_loss), 1e-300)
    if grid_shift > tol / 10.0:
        raise ConvergenceError(
            f"frequency grid not converged: refinement moves I_loss by "
            f"{grid_shift:.2e}")

    scale = max(abs(I_ld), abs(res.I_loss))
    deviation = 0.0 if scale < 1e-12 else abs(res.I_loss - I_ld) / scale
    return BridgeReport(
        instance=inst,
        I_loss_lindblad=I_ld, I_loss_keldysh=res.I_loss,
        occupations_lindblad=occ_ld,
        occupations_keldysh=tuple(float(x) for x in res.occupations),
        relative_deviation=deviation,
        cutoff_shift=cutoff_shift, grid_shift=grid_shift,
        photon_number=n_phot, tolerance=tol,
        within_tolerance=deviation <= tol)


def adiabatic_ladder(ratios=(5.0, 10.0, 20.0), t_eg=1.0, t_e5=1.0,
                     Gamma_5=1.0, n_ph=8):
    """The photon-elimination convergence suite: one instance per ratio
    Gamma_e5 / max coupling, everything else held fixed."""
    coupling = max(abs(t_eg), abs(t_e5))
    return [BridgeInstance(regime="adiabatic", t_eg=t_eg, t_e5=t_e5,
                           Gamma_5=Gamma_5, Gamma_e5=r * coupling,
                           n_ph=n_ph)
            for r in ratios]
