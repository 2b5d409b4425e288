"""Physical parameters and the reduction to the effective fermionic network.

The microscopic description holds three atomic levels (g, e, 5), two photon
modes (a driven one on the g-e transition, a leaky one on the e-5
transition), a system-bath hopping that drains level 5, and two transport
leads on level g.  A chain of time-dependent field redefinitions plus the
coherent-state replacement of the photon operators turns this into a static
three-site fermion network with one complex site energy; the bookkeeping of
every accumulated exponent lives in :class:`GaugeLedger`.

Units: hbar = k_B = 1, and 2 v_F = 1 by default for all linearized baths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MicroscopicParams", "EffectiveModel", "GaugeLedger",
    "detuning", "enhancement", "bath_rate", "reduce_to_effective",
    "ledger_residual", "LEDGER_TERMS",
]


@dataclass(frozen=True)
class MicroscopicParams:
    """All inputs of the microscopic light-matter model.

    ``omega_e5 = None`` pins the spontaneous mode exactly on resonance,
    omega_e5 = eps_e - eps_5.  The effective e-5 bond may be given either
    through a coherent amplitude ``alpha_e5`` or directly as ``t_e5_eff``
    (the spontaneous-mode amplitude has no closed expression, so the
    effective bond is normally treated as an input).
    """

    eps_g: float
    eps_e: float
    eps_5: float
    omega_eg: float
    lambda_eg: complex
    alpha_eg: complex
    Gamma_e5: float
    t_5: complex
    t_L: complex = 0.5
    t_R: complex = 0.5
    mu_L: float = 0.0
    mu_R: float = 0.0
    T: float = 0.1
    v_F: float = 0.5
    omega_e5: float | None = None
    lambda_e5: complex | None = None
    alpha_e5: complex | None = None
    t_e5_eff: complex | None = None

    def __post_init__(self):
        if not (self.eps_e > self.eps_5 > self.eps_g):
            raise ValueError(
                "level ordering must satisfy eps_e > eps_5 > eps_g, got "
                f"({self.eps_e}, {self.eps_5}, {self.eps_g})")
        if self.Gamma_e5 < 0:
            raise ValueError("Gamma_e5 must be >= 0")
        if self.T < 0:
            raise ValueError("temperature must be >= 0")
        if self.v_F <= 0:
            raise ValueError("v_F must be > 0")

    @property
    def omega_e5_resolved(self) -> float:
        if self.omega_e5 is not None:
            return self.omega_e5
        return self.eps_e - self.eps_5


@dataclass(frozen=True)
class EffectiveModel:
    """The static three-site network: two thermal leads on site g, Hermitian
    bonds g-e and e-5, and a Markovian drain on site 5 whose coupling is
    enhanced by ``e_nh``.

    ``eps_5_eff`` carries the full complex site energy for display; the
    Green-function solver always works with the real part plus the drain
    self-energy, never both (see :func:`qzeno.keldysh.greens`).

    ``lead_occ_L/R`` switch the leads from Gibbsian (mu, T) to flat
    constant-occupation reservoirs; used by the cross-validation bridge,
    where the master-equation side can only represent flat leads.
    """

    eps_g_eff: float
    eps_e_eff: float
    eps_5_eff: complex
    t_eg_eff: complex
    t_e5_eff: complex
    Gamma_L: float
    Gamma_R: float
    mu_L: float
    mu_R: float
    T: float
    Gamma_5: float
    e_nh: float
    lead_occ_L: float | None = None
    lead_occ_R: float | None = None

    def __post_init__(self):
        if self.Gamma_L < 0 or self.Gamma_R < 0:
            raise ValueError("lead couplings must be >= 0")
        if self.Gamma_5 <= 0:
            raise ValueError("bath coupling Gamma_5 must be > 0")
        if self.e_nh < 1.0:
            raise ValueError("enhancement must be >= 1")
        if self.eps_5_eff.imag > 1e-15:
            raise ValueError("Im eps_5_eff must be <= 0")
        for occ in (self.lead_occ_L, self.lead_occ_R):
            if occ is not None and not (0.0 <= occ <= 1.0):
                raise ValueError("flat lead occupation must lie in [0, 1]")

    def hamiltonian(self) -> np.ndarray:
        """Hermitian 3x3 single-particle matrix in the (g, e, 5) basis,
        using the real part of the site-5 energy."""
        teg, te5 = complex(self.t_eg_eff), complex(self.t_e5_eff)
        return np.array(
            [[self.eps_g_eff, np.conj(teg), 0.0],
             [teg, self.eps_e_eff, np.conj(te5)],
             [0.0, te5, self.eps_5_eff.real]], dtype=complex)

    def site_widths(self) -> np.ndarray:
        """Level broadenings -Im Sigma^R per site: leads on g, drain on 5."""
        return np.array([self.Gamma_L + self.Gamma_R, 0.0,
                         self.e_nh * self.Gamma_5])


def detuning(p: MicroscopicParams) -> float:
    """Probe-laser detuning: delta_eg = omega_eg - (eps_e - eps_g)."""
    return p.omega_eg - (p.eps_e - p.eps_g)


def enhancement(Gamma_e5: float, Gamma_5: float) -> float:
    """Drain enhancement e_nh = 1 + Gamma_e5 / Gamma_5 (requires Gamma_5 > 0)."""
    if Gamma_5 <= 0:
        raise ValueError("Gamma_5 must be > 0 for the reduction to exist")
    if Gamma_e5 < 0:
        raise ValueError("Gamma_e5 must be >= 0")
    return 1.0 + Gamma_e5 / Gamma_5

def bath_rate(t_5: complex, v_F: float) -> float:
    """Hybridization width of a linearized chiral bath attached by hopping
    t_5: Gamma_5 = |t_5|^2 / (2 v_F).  With 2 v_F = 1 this is |t_5|^2, i.e.
    a loss rate gamma_5 = 2 Gamma_5 = 2 |t_5|^2."""
    if v_F <= 0:
        raise ValueError("v_F must be > 0")
    return abs(t_5) ** 2 / (2.0 * v_F)


# Canonical operator content of each Hamiltonian term tracked by the ledger.
# sign +1: annihilation factor (accumulates exp(-i r t))
# sign -1: creation factor    (accumulates exp(+i r t), same complex r)
LEDGER_TERMS = {
    "site_g": (("c_g", -1), ("c_g", +1)),
    "site_e": (("c_e", -1), ("c_e", +1)),
    "site_5": (("c_5", -1), ("c_5", +1)),
    "bond_ge": (("c_e", -1), ("a_eg", +1), ("c_g", +1)),
    "bond_e5": (("c_e", -1), ("a_e5", +1), ("c_5", +1)),
    "bond_55b": (("psi_5b", -1), ("c_5", +1)),
}


@dataclass(frozen=True)
class GaugeLedger:
    """Accumulated complex exponent rates of the field redefinitions.

    Every annihilation operator x carries a factor exp(-i * rate[x] * t)
    after the full chain; daggered operators carry exp(+i * rate * t) with
    the *same* complex rate, so that diagonal (number) terms never acquire
    time dependence even when the rate is complex.

    ``residual(term)`` is the net rate r of the factor exp(-i r t) left on
    a Hamiltonian term.  Final rates are constructed so that the residual
    of every term of the effective model is an exact complex zero, not a
    rounded one.  ``stages`` records the chain step by step for inspection;
    stage-resolved residuals are float sums and carry normal rounding.
    """

    rates: dict
    stages: tuple
    delta_eg: float
    delta_mu_eff: complex
    dagger_uses_same_rate: bool = True
    terms: dict = field(default_factory=lambda: dict(LEDGER_TERMS))

    def rate_at_stage(self, mode: str, upto_stage: str) -> complex:
        total = 0.0 + 0.0j
        for name, increments in self.stages:
            total += increments.get(mode, 0.0)
            if name == upto_stage:
                return total
        raise KeyError(f"unknown stage {upto_stage!r}")

    def residual(self, term: str, upto_stage: str | None = None) -> complex:
        if term not in self.terms:
            raise KeyError(f"unknown Hamiltonian term {term!r}")
        acc = 0.0 + 0.0j
        for mode, sign in self.terms[term]:
            if upto_stage is None:
                r = self.rates[mode]
            else:
                r = self.rate_at_stage(mode, upto_stage)
            acc = acc + r if sign > 0 else acc - r
        return acc


def ledger_residual(ledger: GaugeLedger, term: str, upto_stage: str | None = None) -> complex:
    """Net complex exponent rate of a named Hamiltonian term; zero for every
    term of the final effective model.  Unknown names raise KeyError."""
    return ledger.residual(term, upto_stage)


def _build_ledger(p: MicroscopicParams, delta_eg: float) -> GaugeLedger:
    omega_e5 = p.omega_e5_resolved
    r_aeg = complex(p.omega_eg)
    r_ae5 = complex(omega_e5, -p.Gamma_e5)

    # Stage-by-stage increments, as performed.  The second chain is defined
    # by the removal condition on each bond, so the recorded increments are
    # differences of already-accumulated rates.
    photon_frame = {"a_eg": r_aeg, "a_e5": r_ae5}
    atom_frame = {"c_g": complex(p.eps_g), "c_e": complex(p.eps_e),
                  "c_5": complex(p.eps_5)}
    undo_g = {"c_g": complex(-p.eps_g)}

    r_ce_after_atom = complex(p.eps_e)
    r_cg_final = complex(p.eps_g) + complex(-p.eps_g)
    shift_e = {"c_e": (r_aeg + r_cg_final) - r_ce_after_atom}
    r_ce_final = r_aeg + r_cg_final

    r_c5_after_atom = complex(p.eps_5)
    shift_5 = {"c_5": (r_ce_final - r_ae5) - r_c5_after_atom}
    r_c5_final = r_ce_final - r_ae5

    bath = {"psi_5b": r_c5_final}

    rates = {
        "a_eg": r_aeg,
        "a_e5": r_ae5,
        "c_g": r_cg_final,
        "c_e": r_ce_final,
        "c_5": r_c5_final,
        "psi_5b": r_c5_final,
    }
    stages = (
        ("photon_frame", photon_frame),
        ("atom_frame", atom_frame),
        ("undo_g", undo_g),
        ("shift_e", shift_e),
        ("shift_5", shift_5),
        ("bath", bath),
    )
    delta_mu_eff = complex(delta_eg + (p.eps_5 - p.eps_g), p.Gamma_e5)
    return GaugeLedger(rates=rates, stages=stages, delta_eg=delta_eg,
                       delta_mu_eff=delta_mu_eff)


def reduce_to_effective(p: MicroscopicParams) -> tuple[EffectiveModel, GaugeLedger]:
    """Collapse the microscopic model to the static fermionic network.

    The drive bond becomes t_eg = lambda_eg * alpha_eg; lead and drain
    hoppings become hybridization widths Gamma = |t|^2 / (2 v_F); level 5
    acquires the complex energy (eps_g - delta_eg) - i * e_nh * Gamma_5.
    Returns the effective model together with the gauge ledger whose final
    bond residuals are exactly zero.
    """
    delta_eg = detuning(p)
    Gamma_5 = bath_rate(p.t_5, p.v_F)
    Gamma_L = bath_rate(p.t_L, p.v_F)
    Gamma_R = bath_rate(p.t_R, p.v_F)
    e_nh = enhancement(p.Gamma_e5, Gamma_5)

    if p.t_e5_eff is not None:
        t_e5 = complex(p.t_e5_eff)
    elif p.lambda_e5 is not None and p.alpha_e5 is not None:
        t_e5 = complex(p.lambda_e5) * complex(p.alpha_e5)
    else:
        raise ValueError(
            "the effective e-5 bond needs either t_e5_eff or both "
            "lambda_e5 and alpha_e5")

    eps_shifted = p.eps_g - delta_eg
    model = EffectiveModel(
        eps_g_eff=p.eps_g,
        eps_e_eff=eps_shifted,
        eps_5_eff=complex(eps_shifted, -e_nh * Gamma_5),
        t_eg_eff=complex(p.lambda_eg) * complex(p.alpha_eg),
        t_e5_eff=t_e5,
        Gamma_L=Gamma_L, Gamma_R=Gamma_R,
        mu_L=p.mu_L, mu_R=p.mu_R, T=p.T,
        Gamma_5=Gamma_5, e_nh=e_nh,
    )
    return model, _build_ledger(p, delta_eg)
