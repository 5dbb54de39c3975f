"""Dense complex matrix core and quantum-state primitives.

Everything here is plain dense numpy, complex128, on spaces of total
dimension up to roughly 64 (larger matrices appear only transiently inside
the code simulator). Entropies and rates elsewhere are in bits, so square
roots, norms and spectra here feed base-2 logarithms downstream.

Subsystem bookkeeping convention: a state carries an ordered tuple ``dims``
of subsystem dimensions whose product equals the matrix size; subsystem 0
is the leftmost tensor factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

HERMITICITY_TOL = 1e-8
EIGENVALUE_CLAMP = 1e-12


class DimensionMismatchError(ValueError):
    """Operands have incompatible sizes or subsystem dimensions."""


def _square(mat) -> np.ndarray:
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    return m


def hermitian_eig(mat):
    """Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (m + m†)/2 before solving. Returns
    (eigenvalues, eigenvectors) with eigenvalues sorted descending and the
    matching orthonormal eigenvectors as columns.
    """
    m = _square(mat)
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    h = (m + m.conj().T) / 2.0
    vals, vecs = np.linalg.eigh(h)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def tensor(a, b) -> np.ndarray:
    """Kronecker product; subsystem dimension lists concatenate."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor_all(mats) -> np.ndarray:
    return reduce(tensor, mats)


def trace_norm(mat) -> float:
    """Sum of singular values of a square matrix."""
    m = _square(mat)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def sqrt_psd(mat) -> np.ndarray:
    """Matrix square root via eigendecomposition, negative eigenvalues clamped."""
    vals, vecs = hermitian_eig(mat)
    vals = np.where(np.abs(vals) < EIGENVALUE_CLAMP, 0.0, vals)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def pinv_sqrt_psd(mat) -> np.ndarray:
    """Pseudo-inverse square root of a PSD matrix (zero block on the kernel)."""
    vals, vecs = hermitian_eig(mat)
    cutoff = max(EIGENVALUE_CLAMP, 1e-12 * max(vals[0], 0.0))
    inv = np.where(vals > cutoff, 1.0 / np.sqrt(np.clip(vals, cutoff, None)), 0.0)
    return (vecs * inv) @ vecs.conj().T


@dataclass(frozen=True)
class DensityMatrix:
    """PSD unit-trace matrix with an ordered list of subsystem dimensions."""

    mat: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = _square(self.mat)
        dims = tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != m.shape[0]:
            raise DimensionMismatchError(
                f"dims {dims} inconsistent with matrix size {m.shape[0]}"
            )
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise ValueError("density matrix is not Hermitian within tolerance")
        if abs(np.trace(m).real - 1.0) > HERMITICITY_TOL or abs(np.trace(m).imag) > HERMITICITY_TOL:
            raise ValueError("density matrix trace differs from 1")
        if np.linalg.eigvalsh((m + m.conj().T) / 2.0)[0] < -HERMITICITY_TOL:
            raise ValueError("density matrix has a negative eigenvalue")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def eigenvalues(self) -> np.ndarray:
        vals, _ = hermitian_eig(self.mat)
        return vals


@dataclass(frozen=True)
class PureState:
    """Unit vector with subsystem dimensions."""

    vec: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        v = np.asarray(self.vec, dtype=complex).reshape(-1)
        dims = tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != v.shape[0]:
            raise DimensionMismatchError(
                f"dims {dims} inconsistent with vector length {v.shape[0]}"
            )
        if abs(np.linalg.norm(v) - 1.0) > HERMITICITY_TOL:
            raise ValueError("pure state vector is not normalized")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "vec", v)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.vec.shape[0]

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.vec, self.vec.conj()), self.dims)


def maximally_entangled(d: int) -> PureState:
    """(1/sqrt(d)) sum_x |x>|x> on two d-dimensional factors."""
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0 / np.sqrt(d)
    return PureState(v, (d, d))


def maximally_mixed(d: int) -> DensityMatrix:
    return DensityMatrix(np.eye(d, dtype=complex) / d, (d,))


def partial_trace_mat(mat: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace on a raw matrix; ``keep`` lists the subsystem indices retained."""
    dims = tuple(int(d) for d in dims)
    keep = sorted(set(int(i) for i in keep))
    k = len(dims)
    if any(i < 0 or i >= k for i in keep):
        raise DimensionMismatchError(f"keep indices {keep} out of range for {k} subsystems")
    t = np.asarray(mat, dtype=complex).reshape(dims + dims)
    row = list(range(k))
    col = [i if i not in keep else k + i for i in range(k)]
    out = [i for i in keep] + [k + i for i in keep]
    return np.einsum(t, row + col, out).reshape(
        int(np.prod([dims[i] for i in keep])), -1
    )


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    keep = sorted(set(int(i) for i in keep))
    reduced = partial_trace_mat(rho.mat, rho.dims, keep)
    return DensityMatrix(reduced, tuple(rho.dims[i] for i in keep))


def permute_mat(mat: np.ndarray, dims, perm) -> np.ndarray:
    """Reorder subsystems of a raw matrix so new factor i is old factor perm[i]."""
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    perm = list(perm)
    if sorted(perm) != list(range(k)):
        raise DimensionMismatchError(f"perm {perm} is not a permutation of {k} subsystems")
    t = np.asarray(mat, dtype=complex).reshape(dims + dims)
    t = t.transpose(perm + [k + p for p in perm])
    n = int(np.prod(dims))
    return t.reshape(n, n)


def permute_vec(vec: np.ndarray, dims, perm) -> np.ndarray:
    dims = tuple(int(d) for d in dims)
    t = np.asarray(vec, dtype=complex).reshape(dims)
    return t.transpose(list(perm)).reshape(-1)


def fidelity(a, b) -> float:
    """Quantum fidelity ||sqrt(a) sqrt(b)||_1^2 of two states."""
    ma = a.mat if isinstance(a, DensityMatrix) else _square(a)
    mb = b.mat if isinstance(b, DensityMatrix) else _square(b)
    if ma.shape != mb.shape:
        raise DimensionMismatchError(f"state shapes differ: {ma.shape} vs {mb.shape}")
    val = trace_norm(sqrt_psd(ma) @ sqrt_psd(mb)) ** 2
    return float(min(max(val, 0.0), 1.0 + 1e-9))


def pure_fidelity(vec: np.ndarray, rho) -> float:
    """<psi| rho |psi> for a pure reference state."""
    m = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return float(np.real(v.conj() @ m @ v))


def purify(rho: DensityMatrix) -> PureState:
    """Purification with the reference system appended as the last factor."""
    vals, vecs = hermitian_eig(rho.mat)
    vals = np.clip(vals, 0.0, None)
    vals = vals / np.sum(vals)
    d = rho.dim
    vec = np.zeros(d * d, dtype=complex)
    for i in range(d):
        if vals[i] <= 0.0:
            continue
        ref = np.zeros(d, dtype=complex)
        ref[i] = 1.0
        vec += np.sqrt(vals[i]) * np.kron(vecs[:, i], ref)
    return PureState(vec / np.linalg.norm(vec), (d, d))


def entanglement_fidelity(rho: DensityMatrix, channel) -> float:
    """Entanglement fidelity of ``rho`` under a channel acting on its full space.

    Evaluated through a purification: the channel is applied to the system
    half of |psi><psi| and the overlap with psi itself is returned. The
    channel must map the state space to itself.
    """
    ops = channel.kraus_ops if hasattr(channel, "kraus_ops") else tuple(channel)
    d = rho.dim
    for k in ops:
        if k.shape != (d, d):
            raise DimensionMismatchError(
                f"channel Kraus shape {k.shape} does not match state dimension {d}"
            )
    psi = purify(rho)
    v = psi.vec
    out = np.zeros((d * d, d * d), dtype=complex)
    eye = np.eye(d, dtype=complex)
    for k in ops:
        w = np.kron(k, eye) @ v
        out += np.outer(w, w.conj())
    return float(min(max(np.real(v.conj() @ out @ v), 0.0), 1.0 + 1e-9))
