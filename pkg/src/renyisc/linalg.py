"""Matrix functions, Schatten norms, fidelity, and purification."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, NotPositiveSemidefiniteError, UsageError
from .spaces import LabeledOperator, SystemSpace

CLIP_REL = 1e-12
PSD_REL = 1e-8


def _herm(m: np.ndarray) -> np.ndarray:
    return (m + m.conj().T) / 2


def fractional_power_matrix(m: np.ndarray, p: float, clip_rel: float = CLIP_REL) -> np.ndarray:
    """m**p for a Hermitian PSD matrix, on the support only.

    Eigenvalues below ``clip_rel`` times the largest are treated as exact
    zeros; negative ``p`` is applied on the support, zeros map to zero.
    """
    m = _herm(np.asarray(m, dtype=complex))
    vals, vecs = np.linalg.eigh(m)
    top = max(vals[-1], 0.0)
    if vals[0] < -PSD_REL * max(top, 1.0):
        raise NotPositiveSemidefiniteError(
            f"eigenvalue {vals[0]} below PSD tolerance"
        )
    vals = np.clip(vals, 0.0, None)
    zero = vals <= clip_rel * top
    powered = np.zeros_like(vals)
    np.power(vals, p, out=powered, where=~zero)
    return (vecs * powered) @ vecs.conj().T


def fractional_power(op: LabeledOperator, p: float, clip_rel: float = CLIP_REL) -> LabeledOperator:
    return LabeledOperator.square(op.space, fractional_power_matrix(op.matrix, p, clip_rel))


def schatten_norm(m, p: float) -> float:
    """Schatten p-(quasi)norm, (sum of singular values**p)**(1/p).

    Accepts a LabeledOperator or a raw matrix; p = inf gives the operator
    norm.
    """
    if isinstance(m, LabeledOperator):
        m = m.matrix
    m = np.asarray(m, dtype=complex)
    s = np.linalg.svd(m, compute_uv=False)
    if p == np.inf:
        return float(s[0]) if s.size else 0.0
    if not p > 0:
        raise UsageError(f"Schatten norm requires p > 0, got {p}")
    return float(np.sum(s**p) ** (1.0 / p))


def trace_norm(m) -> float:
    return schatten_norm(m, 1)


def fidelity_matrix(rho: np.ndarray, sigma: np.ndarray) -> float:
    """F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1."""
    sr = fractional_power_matrix(rho, 0.5)
    ss = fractional_power_matrix(sigma, 0.5)
    s = np.linalg.svd(sr @ ss, compute_uv=False)
    return float(min(np.sum(s), 1.0 + 1e-9))


def fidelity(rho: LabeledOperator, sigma: LabeledOperator) -> float:
    if rho.space_out.dim != sigma.space_out.dim:
        raise DimensionMismatchError("fidelity requires operators on the same space")
    return fidelity_matrix(rho.matrix, sigma.matrix)


def _phase_fix(vecs: np.ndarray) -> np.ndarray:
    """Rotate each column so its first nonzero component is real positive."""
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            ph = col[nz[0]] / abs(col[nz[0]])
            vecs[:, j] = col / ph
    return vecs


def purify(rho: LabeledOperator, ref_label: str = "R") -> LabeledOperator:
    """Canonical purification of ``rho`` with a fresh reference system.

    The reference dimension equals the rank of ``rho``.  The construction
    sorts eigenvalues in descending order and fixes each eigenvector phase
    so that its first nonzero component is real positive, making the output
    deterministic.
    """
    space = rho.space
    if space.has(ref_label):
        raise UsageError(f"label {ref_label!r} already present")
    vals, vecs = np.linalg.eigh(_herm(rho.matrix))
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    top = max(vals[0], 0.0)
    support = vals > CLIP_REL * top
    vals, vecs = np.clip(vals[support], 0.0, None), _phase_fix(vecs[:, support])
    r = int(vals.size)
    d = space.dim
    psi = (vecs * np.sqrt(vals)).reshape(d * r)
    psi /= np.linalg.norm(psi)
    big = space.tensor(SystemSpace.of((ref_label, r)))
    return LabeledOperator.square(big, np.outer(psi, psi.conj()))
