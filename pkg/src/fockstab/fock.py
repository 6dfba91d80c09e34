"""Linear algebra on a photon-number-truncated cavity mode.

Everything is real.  The global phase of a number state is arbitrary, so
density matrices are real symmetric, and the coherent injection
``exp(alpha * (a^T - a))`` is a real orthogonal matrix.  Keeping the
generator truncation-exact (rather than truncating the infinite-dimensional
displacement) preserves orthogonality, and with it positivity and trace of
every conjugated state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "FockOperators",
    "make_operators",
    "displacement",
    "apply_displacement",
    "coherent_state",
    "fidelity",
    "validate_density",
    "resymmetrize",
]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def resymmetrize(x: np.ndarray) -> np.ndarray:
    """Halve the floating-point asymmetry of ``x`` and renormalize its trace.

    Applied after every conjugation and projection so rounding drift cannot
    accumulate.  Negativity is never repaired here; a state drifting below
    the positivity tolerance is a bug upstream, not something to clamp.
    """
    x = 0.5 * (x + x.T)
    return x / np.trace(x)


@dataclass(frozen=True)
class FockOperators:
    """Ladder operators on the space truncated at ``n_max`` photons.

    ``a`` is the annihilation operator (superdiagonal sqrt(1..n_max)),
    ``n_op`` the photon-number operator, and ``q = a^T - a`` the
    antisymmetric generator of coherent displacements.  The eigensystem of
    the Hermitian matrix ``i*q`` is cached so that ``exp(alpha*q)`` reduces
    to a diagonal phase rotation for any ``alpha``.  All arrays are
    read-only after construction.
    """

    n_max: int
    a: np.ndarray = field(init=False, repr=False)
    n_op: np.ndarray = field(init=False, repr=False)
    q: np.ndarray = field(init=False, repr=False)
    _evals: np.ndarray = field(init=False, repr=False)
    _evecs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        dim = self.n_max + 1
        a = np.diag(np.sqrt(np.arange(1.0, dim)), k=1)
        q = a.T - a
        evals, evecs = np.linalg.eigh(1j * q)
        object.__setattr__(self, "a", _readonly(a))
        object.__setattr__(self, "n_op", _readonly(np.diag(np.arange(float(dim)))))
        object.__setattr__(self, "q", _readonly(q))
        object.__setattr__(self, "_evals", _readonly(evals))
        object.__setattr__(self, "_evecs", _readonly(evecs))

    @property
    def dim(self) -> int:
        return self.n_max + 1


@lru_cache(maxsize=None)
def make_operators(n_max: int) -> FockOperators:
    """Build (and cache) the operator set for a given truncation."""
    if n_max < 1:
        raise ValueError(
            f"n_max must be at least 1, got {n_max}: the target level needs "
            "room for the displacement to act"
        )
    return FockOperators(int(n_max))


def displacement(ops: FockOperators, alpha: float) -> np.ndarray:
    """Coherent displacement ``exp(alpha * q)`` on the truncated space.

    The result is orthogonal to ~1e-15 because it is assembled from the
    unitary eigensystem of ``i*q``; its tiny imaginary part is rounding
    noise and is dropped.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ValueError(f"displacement amplitude must be finite, got {alpha!r}")
    if alpha == 0.0:
        return np.eye(ops.dim)
    phases = np.exp(-1j * alpha * ops._evals)
    d = (ops._evecs * phases) @ ops._evecs.conj().T
    return np.ascontiguousarray(d.real)


def apply_displacement(rho: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Conjugate a state by an orthogonal displacement: ``d @ rho @ d.T``."""
    return resymmetrize(d @ rho @ d.T)


def _poisson_tail(mean: float, n_max: int) -> float:
    """Poisson mass strictly above ``n_max``, by direct summation."""
    term = math.exp(-mean)
    acc = term
    for n in range(1, n_max + 1):
        term *= mean / n
        acc += term
    return max(0.0, 1.0 - acc)


def coherent_state(ops: FockOperators, n_bar: int) -> np.ndarray:
    """Pure coherent state of mean photon number ``n_bar``: D(sqrt(n_bar))|0>.

    Warns when the Poisson tail mass above the truncation exceeds 1e-3,
    i.e. when the requested amplitude does not fit the space.
    """
    if n_bar < 0:
        raise ValueError(f"mean photon number must be non-negative, got {n_bar}")
    if n_bar > 0:
        tail = _poisson_tail(float(n_bar), ops.n_max)
        if tail > 1e-3:
            warnings.warn(
                f"coherent state with mean {n_bar} loses Poisson tail mass "
                f"{tail:.2e} above n_max={ops.n_max}",
                stacklevel=2,
            )
    vac = displacement(ops, math.sqrt(n_bar))[:, 0]
    return resymmetrize(np.outer(vac, vac))


def fidelity(rho: np.ndarray, n_bar: int) -> float:
    """Population of the target number state: ``tr(rho |n_bar><n_bar|)``."""
    if not 0 <= n_bar < rho.shape[0]:
        raise ValueError(
            f"target level {n_bar} lies outside the truncated space of "
            f"dimension {rho.shape[0]}"
        )
    return float(rho[n_bar, n_bar])


def validate_density(
    rho: np.ndarray,
    *,
    sym_tol: float = 1e-12,
    trace_tol: float = 1e-10,
    psd_tol: float = 1e-10,
    name: str = "density matrix",
) -> None:
    """Check the density-matrix invariants, raising ValueError on violation.

    Symmetry within ``sym_tol``, unit trace within ``trace_tol``, and
    minimum eigenvalue above ``-psd_tol``.
    """
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {rho.shape}")
    asym = float(np.abs(rho - rho.T).max())
    if asym > sym_tol:
        raise ValueError(f"{name} is not symmetric: max asymmetry {asym:.3e}")
    tr = float(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"{name} does not have unit trace: tr = {tr!r}")
    lowest = float(np.linalg.eigvalsh(rho)[0])
    if lowest < -psd_tol:
        raise ValueError(
            f"{name} is not positive semidefinite: min eigenvalue {lowest:.3e}"
        )
