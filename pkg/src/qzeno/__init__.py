"""Numerical toolkit for a dissipative lambda-system junction.

Two independent descriptions of the same steady-state transport problem:

* a dense Lindblad master-equation engine for the microscopic model
  (three fermionic levels plus a leaky photon mode), and
* a Keldysh Green-function solver for the effective purely fermionic
  network (two thermal leads, one Markovian drain with an enhanced
  coupling).

The `bridge` module cross-validates the two; the `cli` front end runs
drive-intensity sweeps of the loss current and writes CSV tables and
figures.

Units: hbar = k_B = 1 and 2 v_F = 1 for all linearized reservoirs.
"""

from .model import (
    MicroscopicParams,
    EffectiveModel,
    GaugeLedger,
    detuning,
    enhancement,
    bath_rate,
    reduce_to_effective,
    ledger_residual,
)
from .fock import HilbertSpace
from .lindblad import (
    JumpChannel,
    liouvillian_apply,
    evolve,
    steady_state,
    expectation,
    commutant_drift_check,
    leap_expectation_check,
    quadratic_steady_state,
)
from .keldysh import (
    FrequencyGrid,
    AccuracyError,
    lead_self_energy,
    markov_self_energy,
    greens,
    integrate,
    occupation,
    lead_current,
    loss_current,
    solve_transport,
)
from .bridge import BridgeInstance, BridgeReport, build_full_lindblad, effective_counterpart, compare
from .sweep import SweepConfig, SweepResult, run_sweep, find_zeno_peak

__all__ = [
    "MicroscopicParams", "EffectiveModel", "GaugeLedger",
    "detuning", "enhancement", "bath_rate", "reduce_to_effective",
    "ledger_residual",
    "HilbertSpace", "JumpChannel", "liouvillian_apply", "evolve",
    "steady_state", "expectation", "commutant_drift_check",
    "leap_expectation_check", "quadratic_steady_state",
    "FrequencyGrid", "AccuracyError", "lead_self_energy",
    "markov_self_energy", "greens", "integrate", "occupation",
    "lead_current", "loss_current", "solve_transport",
    "BridgeInstance", "BridgeReport", "build_full_lindblad",
    "effective_counterpart", "compare",
    "SweepConfig", "SweepResult", "run_sweep", "find_zeno_peak",
]

__version__ = "0.1.0"
