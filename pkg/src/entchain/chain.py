"""Coupled-oscillator chain model: coupling matrix and normal modes.

A chain of N unit-mass oscillators with on-site frequency ``omega`` and
nearest-neighbour spring constant ``k`` has potential energy
``(1/2) x.T K x`` with

    K = omega**2 * I + k * L,

where L is the bond Laplacian of the chain graph (open or periodic
boundary).  A sudden quench switches (omega, k) from the "pre" values to
the "post" values at t = 0.  Because K is an affine function of L in both
phases, a single orthogonal transformation decouples the dynamics before
and after the quench; :func:`quench_modes` exposes that shared basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import NumericsError

Boundary = Literal["open", "periodic"]
Phase = Literal["pre", "post"]

# Bond-Laplacian eigenvalues below this (relative) size are snapped to zero.
# The periodic chain has an exact zero mode that eigh returns as O(1e-16).
_MU_SNAP = 1e-13


@dataclass(frozen=True)
class ChainSpec:
    """Chain geometry plus pre- and post-quench parameters.

    Frequencies and couplings are in natural units (hbar = 1, unit masses).
    ``omega_i`` must be positive so the pre-quench ground state exists;
    ``omega_f`` may be zero (gapless post-quench chain).
    """

    n: int
    omega_i: float
    k_i: float
    omega_f: float
    k_f: float
    boundary: Boundary = "periodic"

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"chain needs at least 2 sites, got n={self.n}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.omega_i <= 0:
            raise ValueError("pre-quench on-site frequency must be positive")
        if self.omega_f < 0 or self.k_i < 0 or self.k_f < 0:
            raise ValueError("omega_f, k_i, k_f must be non-negative")

    def params(self, phase: Phase) -> tuple[float, float]:
        if phase == "pre":
            return self.omega_i, self.k_i
        if phase == "post":
            return self.omega_f, self.k_f
        raise ValueError(f"unknown phase {phase!r}")


@dataclass(frozen=True)
class NormalModes:
    """Orthogonal mode basis of one coupling matrix.

    ``matrix`` holds the mode vectors as rows, so that
    ``matrix @ K @ matrix.T`` is diagonal with entries ``lam`` (ascending).
    ``perm`` records how the solver's output order was rearranged into
    ascending order, for reproducible mode indexing under degeneracy.
    """

    matrix: np.ndarray
    lam: np.ndarray
    perm: np.ndarray

    @property
    def n(self) -> int:
        return self.lam.shape[0]


@dataclass(frozen=True)
class QuenchModes:
    """Shared normal-mode data for both phases of a quench.

    ``u`` diagonalizes the pre- and the post-quench coupling matrix
    simultaneously (rows are mode vectors).  ``mu`` are the bond-Laplacian
    eigenvalues, so ``lam = omega**2 + k * mu`` in either phase.
    """

    u: np.ndarray
    mu: np.ndarray
    lam_pre: np.ndarray
    lam_post: np.ndarray

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    def pre(self) -> NormalModes:
        return NormalModes(self.u, self.lam_pre, np.arange(self.n))


def bond_laplacian(n: int, boundary: Boundary) -> np.ndarray:
    """Laplacian of the chain's bond graph (coupling structure for k = 1).

    Open chains have n - 1 bonds; periodic chains close the ring with an
    extra (x_n - x_1) bond.  For n = 2 the periodic ring doubles the single
    bond, which is why open and periodic two-site chains differ exactly by
    a factor of two in the effective coupling.
    """
    if n < 2:
        raise ValueError("need at least 2 sites")
    lap = np.zeros((n, n))
    bonds = [(j, j + 1) for j in range(n - 1)]
    if boundary == "periodic":
        bonds.append((n - 1, 0))
    elif boundary != "open":
        raise ValueError(f"unknown boundary {boundary!r}")
    for a, b in bonds:
        lap[a, a] += 1.0
        lap[b, b] += 1.0
        lap[a, b] -= 1.0
        lap[b, a] -= 1.0
    return lap


def build_coupling_matrix(spec: ChainSpec, phase: Phase) -> np.ndarray:
    """Coupling matrix K for one phase: omega**2 on site, -k per bond."""
    omega, k = spec.params(phase)
    return omega**2 * np.eye(spec.n) + k * bond_laplacian(spec.n, spec.boundary)


def eigendecompose(coupling: np.ndarray) -> NormalModes:
    """Diagonalize a symmetric coupling matrix into :class:`NormalModes`."""
    coupling = np.asarray(coupling, dtype=float)
    if coupling.ndim != 2 or coupling.shape[0] != coupling.shape[1]:
        raise ValueError("coupling matrix must be square")
    if not np.allclose(coupling, coupling.T, rtol=0, atol=1e-12 * max(1.0, np.abs(coupling).max())):
        raise ValueError("coupling matrix must be symmetric")
    try:
        lam, vecs = np.linalg.eigh(coupling)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"eigendecomposition failed: {exc}") from exc
    perm = np.argsort(lam, kind="stable")
    return NormalModes(matrix=vecs[:, perm].T, lam=lam[perm], perm=perm)


def periodic_eigenvalues(spec: ChainSpec, phase: Phase) -> np.ndarray:
    """Closed-form mode eigenvalues of the periodic chain, in mode order
    j = 1..N: ``omega**2 + 2 k (1 - cos(2 pi j / N))``."""
    if spec.boundary != "periodic":
        raise ValueError("closed-form eigenvalues exist only for periodic chains")
    omega, k = spec.params(phase)
    j = np.arange(1, spec.n + 1)
    return omega**2 + 2.0 * k * (1.0 - np.cos(2.0 * np.pi * j / spec.n))


def quench_modes(spec: ChainSpec) -> QuenchModes:
    """Shared mode basis plus eigenvalues for both phases of the quench.

    The basis comes from the bond Laplacian, which both coupling matrices
    are affine functions of; this keeps degenerate pairs consistently
    paired across the quench.  Raises if any pre-quench eigenvalue is not
    positive (no ground state to quench from).
    """
    modes = eigendecompose(bond_laplacian(spec.n, spec.boundary))
    mu = modes.lam.copy()
    mu[np.abs(mu) <= _MU_SNAP * max(1.0, np.abs(mu).max())] = 0.0
    lam_pre = spec.omega_i**2 + spec.k_i * mu
    lam_post = spec.omega_f**2 + spec.k_f * mu
    if lam_pre.min() <= 0:
        raise NumericsError(
            f"pre-quench spectrum must be positive, got min eigenvalue {lam_pre.min():.3e}"
        )
    for phase, lam in (("pre", lam_pre), ("post", lam_post)):
        check = modes.matrix @ build_coupling_matrix(spec, phase) @ modes.matrix.T
        off = check - np.diag(np.diag(check))
        scale = max(1.0, np.abs(lam).max())
        if np.abs(off).max() > 1e-10 * scale:
            raise NumericsError(f"mode basis failed to decouple the {phase}-quench matrix")
    return QuenchModes(u=modes.matrix, mu=mu, lam_pre=lam_pre, lam_post=lam_post)
