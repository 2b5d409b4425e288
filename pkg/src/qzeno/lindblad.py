"""Dense Lindblad master-equation engine and a quadratic steady-state oracle.

The generator is the diagonal-form master equation

    d rho / dt = -i [H, rho]
                 + sum_m gamma_m ( L_m rho L_m^+ - {L_m^+ L_m, rho} / 2 )

acting on explicit density matrices (hbar = 1).  Besides propagation and
stationary-state solvers, this module carries the expectation-value
identities used as consistency checks: operators commuting with every jump
operator evolve under H alone, and the expectation of a jump operator
itself evolves under the non-Hermitian H_eff = H - i (gamma/2) L^+ L.

For quadratic models with linear jump operators, `quadratic_steady_state`
solves the polynomial-size stationarity equation for the correlation
matrix and serves as an independent oracle for the exponential-size solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = [
    "JumpChannel", "liouvillian_apply", "evolve", "steady_state",
    "steady_state_by_evolution", "expectation", "commutant_drift_check",
    "leap_expectation_check", "quadratic_steady_state",
    "liouvillian_matrix", "default_timestep", "density_matrix_checks",
    "DivergenceError", "NonUniqueSteadyStateError", "NoDecayError",
    "CommutantPreconditionError",
]


class DivergenceError(RuntimeError):
    """Integration produced non-finite entries."""


class NonUniqueSteadyStateError(RuntimeError):
    def __init__(self, dimension):
        self.dimension = dimension
        super().__init__(f"steady state is not unique (null-space dimension {dimension})")


class NoDecayError(ValueError):
    """Drift matrix spectrum touches the imaginary axis; no stationary state."""


class CommutantPreconditionError(ValueError):
    """Observable does not commute with every jump operator."""


@dataclass(frozen=True)
class JumpChannel:
    """One dissipative channel: jump operator L and rate gamma >= 0."""
    operator: np.ndarray
    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError("jump rate must be >= 0")


def _check_shapes(H, channels, rho):
    D = H.shape[0]
    if H.shape != (D, D) or rho.shape != (D, D):
        raise ValueError(f"shape mismatch: H {H.shape}, rho {rho.shape}")
    for ch in channels:
        if ch.operator.shape != (D, D):
            raise ValueError(
                f"jump operator shape {ch.operator.shape} does not match H {H.shape}")


def liouvillian_apply(H, channels, rho):
    """Right-hand side d rho / dt of the master equation."""
    _check_shapes(H, channels, rho)
    out = -1j * (H @ rho - rho @ H)
    for ch in channels:
        L = ch.operator
        Ld = L.conj().T
        LdL = Ld @ L
        out += ch.rate * (L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL))
    return out


def default_timestep(H, channels):
    """Fixed RK4 step 0.02 / (spectral scale of the generator)."""
    scale = np.linalg.norm(H, 2)
    for ch in channels:
        scale += ch.rate * np.linalg.norm(ch.operator, 2) ** 2
    return 0.02 / max(scale, 1e-12)


def evolve(rho0, H, channels, t_final, dt=None, n_snapshots=None):
    """Propagate with classical fixed-step RK4.

    After every step the state is re-Hermitized ((rho + rho^+)/2) and
    renormalized to unit trace.  With ``n_snapshots`` set, returns
    ``(times, states)`` sampled uniformly (endpoints included); otherwise
    returns the final state.
    """
    _check_shapes(H, channels, rho0)
    if dt is None:
        dt = default_timestep(H, channels)
    if dt <= 0:
        raise ValueError("dt must be > 0")
    n_steps = max(1, int(np.ceil(t_final / dt)))
    dt = t_final / n_steps

    snap_every = None
    times, states = [0.0], [rho0.copy()]
    if n_snapshots is not None and n_snapshots > 1:
        snap_every = max(1, n_steps // (n_snapshots - 1))

    rho = rho0.astype(complex).copy()
    for k in range(1, n_steps + 1):
        with np.errstate(invalid="ignore", over="ignore"):
            k1 = liouvillian_apply(H, channels, rho)
            k2 = liouvillian_apply(H, channels, rho + 0.5 * dt * k1)
            k3 = liouvillian_apply(H, channels, rho + 0.5 * dt * k2)
            k4 = liouvillian_apply(H, channels, rho + dt * k3)
            rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(rho)):
            raise DivergenceError(f"non-finite density matrix at step {k}")
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            rho = 0.5 * (rho + rho.conj().T)
            rho /= np.trace(rho).real
        if snap_every is not None and (k % snap_every == 0 or k == n_steps):
            times.append(k * dt)
            states.append(rho.copy())
    if n_snapshots is not None:
        return np.array(times), states
    return rho


def liouvillian_matrix(H, channels):
    """Sparse matrix of the generator acting on row-major vectorized rho."""
    D = H.shape[0]
    I = sp.identity(D, format="csr", dtype=complex)
    Hs = sp.csr_matrix(H)
    L = -1j * (sp.kron(Hs, I) - sp.kron(I, Hs.T))
    for ch in channels:
        Ls = sp.csr_matrix(ch.operator)
        LdL = (Ls.conj().T @ Ls).tocsr()
        L = L + ch.rate * (sp.kron(Ls, Ls.conj())
                           - 0.5 * sp.kron(LdL, I) - 0.5 * sp.kron(I, LdL.T))
    return L.tocsr()


_DENSE_STEADY_DIM = 64
_STEADY_RESIDUAL_TOL = 1e-10


def steady_state(H, channels):
    """Unique stationary density matrix of the generator.

    Solves the stationarity system L vec(rho) = 0 with the trace pinned to
    one: dense linear algebra for D <= 64, sparse factorization above.  The
    returned state always satisfies || d rho/dt ||_1 < 1e-10; a degenerate
    null space raises :class:`NonUniqueSteadyStateError` with its dimension.
    """
    if not any(ch.rate > 0 for ch in channels):
        raise ValueError("need at least one channel with a positive rate")
    D = H.shape[0]
    _check_shapes(H, channels, np.zeros((D, D)))
    L = liouvillian_matrix(H, channels)
    n2 = D * D
    trace_row = sp.csr_matrix(
        (np.ones(D), (np.zeros(D, dtype=int), np.arange(0, n2, D + 1))),
        shape=(1, n2), dtype=complex)
    M = sp.vstack([trace_row, L[1:]]).tocsc()
    rhs = np.zeros(n2, dtype=complex)
    rhs[0] = 1.0

    try:
        if D <= _DENSE_STEADY_DIM:
            vec = np.linalg.solve(M.toarray(), rhs)
        else:
            vec = spla.spsolve(M, rhs)
    except (np.linalg.LinAlgError, RuntimeError):
        vec = None

    if vec is not None and np.all(np.isfinite(vec)):
        rho = vec.reshape(D, D)
        rho = 0.5 * (rho + rho.conj().T)
        tr = np.trace(rho).real
        if abs(tr) > 1e-300:
            rho = rho / tr
            residual = np.abs(L @ rho.reshape(-1)).sum()
            if residual < _STEADY_RESIDUAL_TOL:
                return rho

    dim = _null_space_dimension(L, D)
    if dim > 1:
        raise NonUniqueSteadyStateError(dim)
    raise RuntimeError("stationary solve failed although the null space "
                       "appears one-dimensional")


def _null_space_dimension(L, D):
    n2 = D * D
    if n2 <= 4096:
        svals = np.linalg.svd(L.toarray(), compute_uv=False)
        smax = svals[0] if svals[0] > 0 else 1.0
        return int(np.sum(svals < 1e-10 * max(1.0, smax)))
    k = min(6, n2 - 2)
    vals = spla.eigs(L, k=k, sigma=1e-12, return_eigenvectors=False)
    return int(np.sum(np.abs(vals) < 1e-10))


def steady_state_by_evolution(H, channels, rho0=None, t_start=None,
                              tol=1e-10, max_doublings=40):
    """Stationary state by long-time propagation with doubling horizons.

    Keeps evolving from ``rho0`` (default: maximally mixed) over windows
    t, 2t, 4t, ... until || d rho/dt ||_1 < tol.  Slower than
    :func:`steady_state` but independent of it; the two must agree wherever
    both apply.
    """
    D = H.shape[0]
    rho = (np.eye(D, dtype=complex) / D) if rho0 is None else rho0.copy()
    if t_start is None:
        t_start = 50.0 * default_timestep(H, channels)
    t = t_start
    for _ in range(max_doublings):
        rho = evolve(rho, H, channels, t)
        if np.abs(liouvillian_apply(H, channels, rho)).sum() < tol:
            return rho
        t *= 2.0
    raise DivergenceError(
        f"no stationary state reached after {max_doublings} horizon doublings")


def expectation(O, rho):
    """Trace formula <O> = Tr(O rho)."""
    if O.shape != rho.shape:
        raise ValueError(f"shape mismatch: O {O.shape}, rho {rho.shape}")
    return complex(np.trace(O @ rho))


def _comm_norm(A, B):
    return np.linalg.norm(A @ B - B @ A)


def commutant_drift_check(O_L, H, channels, rho, comm_tol=1e-12):
    """Residual of the reduced evolution law for channel-commuting operators.

    For [O_L, L_m] = [O_L, L_m^+] = 0 (all m), d<O_L>/dt is set by H alone;
    returns |Tr(O_L d rho/dt) - Tr(O_L (-i)[H, rho])|, which must vanish.
    """
    scale = max(1.0, np.linalg.norm(O_L))
    for ch in channels:
        for op in (ch.operator, ch.operator.conj().T):
            c = _comm_norm(O_L, op)
            if c > comm_tol * scale * max(1.0, np.linalg.norm(op)):
                raise CommutantPreconditionError(
                    f"observable fails to commute with a jump operator, "
                    f"commutator norm {c:.3e}")
    full = np.trace(O_L @ liouvillian_apply(H, channels, rho))
    ham = np.trace(O_L @ (-1j * (H @ rho - rho @ H)))
    return abs(full - ham)


def leap_expectation_check(channel, H, trajectory, extra_channels=(),
                           comm_tol=1e-12):
    """Residual of the jump-operator evolution law along a trajectory.

    With H_eff = H - i (gamma/2) L^+ L, the expectation of L obeys
    i d<L>/dt = Tr(L [H_eff, rho]) provided every other channel commutes
    with L.  Returns the maximum over the supplied states of the defect
    |i Tr(L d rho/dt) - Tr(L [H_eff, rho])|.  (The adjoint law follows by
    Hermitian conjugation; see the paired property test.)
    """
    L = channel.operator
    for ch in extra_channels:
        for op in (ch.operator, ch.operator.conj().T):
            c = _comm_norm(L, op)
            if c > comm_tol * max(1.0, np.linalg.norm(L)) * max(1.0, np.linalg.norm(op)):
                raise CommutantPreconditionError(
                    f"channel does not commute with an extra channel, "
                    f"commutator norm {c:.3e}")
    H_eff = H - 0.5j * channel.rate * (L.conj().T @ L)
    all_channels = [channel, *extra_channels]
    worst = 0.0
    for rho in trajectory:
        lhs = 1j * np.trace(L @ liouvillian_apply(H, all_channels, rho))
        rhs = np.trace(L @ (H_eff @ rho - rho @ H_eff))
        worst = max(worst, abs(lhs - rhs))
    return worst


def quadratic_steady_state(h, loss_rates, gain_rates):
    """Stationary correlation matrix C_ij = <c_i^+ c_j> of a quadratic model.

    The model: fermions with single-particle Hamiltonian h, plus loss
    channels L_i = c_i at rates loss_rates[i] and gain channels L_i = c_i^+
    at rates gain_rates[i].  C solves  A C + C A^+ = -Q  with drift
    A = i h^T - diag(loss + gain)/2 and source Q = diag(gain); solved here
    through the vectorized n^2 x n^2 linear system.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    if not np.allclose(h, h.conj().T, atol=1e-12):
        raise ValueError("h must be Hermitian")
    loss = np.asarray(loss_rates, dtype=float)
    gain = np.asarray(gain_rates, dtype=float)
    if loss.shape != (n,) or gain.shape != (n,):
        raise ValueError("rate vectors must have length n")
    if np.any(loss < 0) or np.any(gain < 0):
        raise ValueError("rates must be >= 0")

    A = 1j * h.T - 0.5 * np.diag(loss + gain)
    margin = np.max(np.linalg.eigvals(A).real)
    if margin > -1e-12:
        raise NoDecayError(
            f"drift spectrum touches the imaginary axis (max Re = {margin:.3e})")
    Q = np.diag(gain).astype(complex)
    eye = np.eye(n)
    M = np.kron(A, eye) + np.kron(eye, A.conj())
    C = np.linalg.solve(M, -Q.reshape(-1)).reshape(n, n)
    return 0.5 * (C + C.conj().T)


def density_matrix_checks(rho):
    """Hermiticity defect, trace defect and minimum eigenvalue of rho."""
    herm = np.linalg.norm(rho - rho.conj().T) / max(np.linalg.norm(rho), 1e-300)
    trace = abs(np.trace(rho).real - 1.0)
    min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    return {"hermiticity_defect": float(herm), "trace_defect": float(trace),
            "min_eigenvalue": min_eig}
