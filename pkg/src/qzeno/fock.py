"""Operator construction on small composite Hilbert spaces.

Fermionic modes are represented with Jordan-Wigner sign strings in the
order the modes are listed, so annihilators of distinct modes anticommute
exactly; an optional truncated boson mode sits last in the tensor product
and carries no string.
"""

from __future__ import annotations

import numpy as np

__all__ = ["HilbertSpace"]

_SMINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
_ZSTR = np.diag([1.0, -1.0]).astype(complex)


class HilbertSpace:
    """Ordered collection of fermionic modes plus an optional boson mode.

    Parameters
    ----------
    fermions : sequence of str
        Mode names, Jordan-Wigner ordered as given.
    boson_cutoff : int or None
        Fock-space cutoff N_ph of the boson mode (dimension N_ph + 1).
    boson_name : str
        Name under which the boson annihilator is registered.
    """

    def __init__(self, fermions, boson_cutoff=None, boson_name="ph"):
        self.fermion_names = list(fermions)
        self.boson_cutoff = boson_cutoff
        self.boson_name = boson_name
        nf = len(self.fermion_names)
        dims = [2] * nf + ([boson_cutoff + 1] if boson_cutoff is not None else [])
        self.dim = int(np.prod(dims)) if dims else 1
        if self.dim < 2:
            raise ValueError("need at least one mode")

        self._ann = {}
        eye_b = (np.eye(boson_cutoff + 1, dtype=complex)
                 if boson_cutoff is not None else None)
        for i, name in enumerate(self.fermion_names):
            factors = [_ZSTR] * i + [_SMINUS] + [np.eye(2, dtype=complex)] * (nf - i - 1)
            if eye_b is not None:
                factors.append(eye_b)
            self._ann[name] = _kron_chain(factors)
        if boson_cutoff is not None:
            b = np.diag(np.sqrt(np.arange(1.0, boson_cutoff + 1)), k=1).astype(complex)
            self._ann[boson_name] = _kron_chain(
                [np.eye(2 ** nf, dtype=complex), b])

    def annihilator(self, name: str) -> np.ndarray:
        return self._ann[name]

    def creator(self, name: str) -> np.ndarray:
        return self._ann[name].conj().T

    def number(self, name: str) -> np.ndarray:
        a = self._ann[name]
        return a.conj().T @ a

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def total_fermion_number(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for name in self.fermion_names:
            out += self.number(name)
        return out

    def vacuum(self) -> np.ndarray:
        """Density matrix of the all-empty state."""
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho

    def mode_names(self):
        names = list(self.fermion_names)
        if self.boson_cutoff is not None:
            names.append(self.boson_name)
        return names


def _kron_chain(factors):
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out
