"""CPTP maps, classical-quantum channels, compound sets and coverings.

A channel is a Kraus-operator list between labeled input/output subsystem
spaces. Trace-non-increasing instruments (decoder branches) carry an
explicit flag; completeness of a branch family is checked where the family
is assembled, not per branch.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property, reduce

import numpy as np

from .qmatrix import (
    DensityMatrix,
    DimensionMismatchError,
    partial_trace_mat,
    permute_mat,
    tensor,
    trace_norm,
)

CPTP_TOL = 1e-8
DIM_BUDGET = 64


class CptpError(ValueError):
    """Kraus family fails the (sub)normalization it claims."""

    def __init__(self, message: str, defect: float = float("nan")):
        super().__init__(message)
        self.defect = defect


class BudgetExceededError(RuntimeError):
    """Requested construction exceeds the dense matrix size budget."""


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive map given by Kraus operators (out_dim x in_dim).

    ``trace_nonincreasing`` marks an instrument branch: sum K†K <= I instead
    of equality.
    """

    kraus_ops: tuple[np.ndarray, ...]
    in_dims: tuple[int, ...]
    out_dims: tuple[int, ...]
    trace_nonincreasing: bool = False
    cptp_tol: float = CPTP_TOL

    def __post_init__(self):
        in_dims = tuple(int(d) for d in self.in_dims)
        out_dims = tuple(int(d) for d in self.out_dims)
        din = int(np.prod(in_dims))
        dout = int(np.prod(out_dims))
        ops = []
        for k in self.kraus_ops:
            k = np.asarray(k, dtype=complex)
            if k.shape != (dout, din):
                raise DimensionMismatchError(
                    f"Kraus operator shape {k.shape} does not match ({dout}, {din})"
                )
            k = k.copy()
            k.flags.writeable = False
            ops.append(k)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        stacked = np.vstack(ops)
        gram = stacked.conj().T @ stacked
        if self.trace_nonincreasing:
            top = np.linalg.eigvalsh(gram)[-1]
            defect = max(0.0, float(top) - 1.0)
            if defect > self.cptp_tol:
                raise CptpError(
                    f"instrument exceeds trace preservation by {defect:.3e}", defect
                )
        else:
            defect = float(np.max(np.abs(gram - np.eye(din))))
            if defect > self.cptp_tol:
                raise CptpError(
                    f"channel is not trace preserving, defect {defect:.3e}", defect
                )
        object.__setattr__(self, "kraus_ops", tuple(ops))
        object.__setattr__(self, "in_dims", in_dims)
        object.__setattr__(self, "out_dims", out_dims)

    @property
    def in_dim(self) -> int:
        return int(np.prod(self.in_dims))

    @property
    def out_dim(self) -> int:
        return int(np.prod(self.out_dims))

    @cached_property
    def stacked(self) -> np.ndarray:
        """Kraus operators as one (count, out, in) array."""
        return np.stack(self.kraus_ops)


def identity_channel(dims) -> KrausChannel:
    dims = tuple(int(d) for d in np.atleast_1d(dims))
    n = int(np.prod(dims))
    return KrausChannel((np.eye(n, dtype=complex),), dims, dims)


def depolarizing_channel(dim: int) -> KrausChannel:
    """Completely depolarizing map rho -> I/d."""
    ops = []
    for i in range(dim):
        for j in range(dim):
            k = np.zeros((dim, dim), dtype=complex)
            k[i, j] = 1.0 / np.sqrt(dim)
            ops.append(k)
    return KrausChannel(tuple(ops), (dim,), (dim,))


def dephasing_channel(flip_prob: float = 0.5, full: bool = False) -> KrausChannel:
    """Qubit phase noise; ``full`` kills all off-diagonal terms."""
    if full:
        ops = (
            np.diag([1.0, 0.0]).astype(complex),
            np.diag([0.0, 1.0]).astype(complex),
        )
    else:
        z = np.diag([1.0, -1.0]).astype(complex)
        ops = (
            np.sqrt(1.0 - flip_prob) * np.eye(2, dtype=complex),
            np.sqrt(flip_prob) * z,
        )
    return KrausChannel(ops, (2,), (2,))


def erasure_channel(dim: int, prob: float = 0.5) -> KrausChannel:
    """Erasure to a flag state: output dimension dim + 1."""
    embed = np.zeros((dim + 1, dim), dtype=complex)
    embed[:dim, :] = np.eye(dim)
    ops = [np.sqrt(1.0 - prob) * embed]
    for j in range(dim):
        k = np.zeros((dim + 1, dim), dtype=complex)
        k[dim, j] = np.sqrt(prob)
        ops.append(k)
    return KrausChannel(tuple(ops), (dim,), (dim + 1,))


def channel_tensor(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    ops = tuple(tensor(ka, kb) for ka in a.kraus_ops for kb in b.kraus_ops)
    return KrausChannel(
        ops,
        a.in_dims + b.in_dims,
        a.out_dims + b.out_dims,
        trace_nonincreasing=a.trace_nonincreasing or b.trace_nonincreasing,
    )


def compose(after: KrausChannel, before: KrausChannel) -> KrausChannel:
    if after.in_dim != before.out_dim:
        raise DimensionMismatchError("composition dimensions do not match")
    ops = tuple(ka @ kb for ka in after.kraus_ops for kb in before.kraus_ops)
    return KrausChannel(
        ops,
        before.in_dims,
        after.out_dims,
        trace_nonincreasing=after.trace_nonincreasing or before.trace_nonincreasing,
    )


def tensor_power(channel: KrausChannel, k: int, budget: int = DIM_BUDGET) -> KrausChannel:
    """k-fold memoryless extension. Refuses to grow past the dense budget."""
    if k < 1:
        raise ValueError("tensor power needs k >= 1")
    if channel.in_dim**k > budget or channel.out_dim**k > budget:
        raise BudgetExceededError(
            f"tensor power dimension {max(channel.in_dim, channel.out_dim) ** k} "
            f"exceeds budget {budget}"
        )
    if k == 1:
        return channel
    return reduce(channel_tensor, [channel] * k)


def blocked_tensor_power(channel: KrausChannel, k: int, budget: int = DIM_BUDGET) -> KrausChannel:
    """Tensor power with the input regrouped into per-sender blocks.

    For a two-input channel on (A, B) the k-fold power naturally acts on
    A1 B1 A2 B2 ...; this variant accepts (A^k, B^k) so blocked encoders
    can feed it directly. Output ordering is unchanged (per use).
    """
    if len(channel.in_dims) != 2:
        raise DimensionMismatchError("blocked power needs a two-part input (A, B)")
    powered = tensor_power(channel, k, budget=budget)
    if k == 1:
        return powered
    da, db = channel.in_dims
    dout = powered.out_dim
    col_perm = [1 + 2 * i for i in range(k)] + [2 + 2 * i for i in range(k)]
    ops = tuple(
        op.reshape((dout,) + (da, db) * k)
        .transpose([0] + col_perm)
        .reshape(dout, (da * db) ** k)
        for op in powered.kraus_ops
    )
    return KrausChannel(ops, (da**k, db**k), powered.out_dims)


def apply_channel(channel: KrausChannel, rho: DensityMatrix, positions=None) -> DensityMatrix:
    """Apply a channel to the listed subsystems of a state.

    ``positions`` gives the state's subsystem indices forming the channel
    input, in channel input order; the remaining subsystems are untouched.
    The result orders untouched subsystems first (original order), then the
    channel output subsystems.
    """
    mat, dims = apply_channel_mat(channel, rho.mat, rho.dims, positions)
    return DensityMatrix(mat, dims)


def apply_channel_mat(channel: KrausChannel, mat: np.ndarray, dims, positions=None):
    """Raw-array version of :func:`apply_channel`; returns (matrix, dims)."""
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    if positions is None:
        positions = list(range(k))
    positions = [int(p) for p in positions]
    if sorted(set(positions)) != sorted(positions):
        raise DimensionMismatchError("duplicate positions")
    rest = [i for i in range(k) if i not in positions]
    if int(np.prod([dims[p] for p in positions])) != channel.in_dim:
        raise DimensionMismatchError(
            f"subsystems {positions} of dims {dims} do not match channel input "
            f"dimension {channel.in_dim}"
        )
    perm = rest + positions
    work = permute_mat(mat, dims, perm)
    r = int(np.prod([dims[i] for i in rest])) if rest else 1
    din, dout = channel.in_dim, channel.out_dim
    t = work.reshape(r, din, r, din).transpose(0, 2, 1, 3).reshape(r * r, din, din)
    ops = channel.stacked
    j = ops.shape[0]
    if r * r * j * dout * din <= 1 << 22:
        # two flat GEMMs: a[k,o,rr,j'] then contract (k,j') away
        a = (ops.reshape(j * dout, din) @ t.transpose(1, 0, 2).reshape(din, -1)).reshape(
            j, dout, r * r, din
        )
        b = a.transpose(2, 1, 0, 3).reshape(r * r * dout, j * din)
        c = ops.conj().transpose(1, 0, 2).reshape(dout, j * din)
        out4 = (b @ c.T).reshape(r * r, dout, dout)
    else:
        out4 = np.zeros((r * r, dout, dout), dtype=complex)
        for op in channel.kraus_ops:
            out4 += (op @ t) @ op.conj().T
    out = (
        out4.reshape(r, r, dout, dout)
        .transpose(0, 2, 1, 3)
        .reshape(r * dout, r * dout)
    )
    new_dims = tuple(dims[i] for i in rest) + channel.out_dims
    return out, new_dims


@dataclass(frozen=True)
class ChoiMatrix:
    """Unnormalized Choi operator on in (x) out, trace = in_dim."""

    matrix: np.ndarray
    in_dim: int
    out_dim: int

    def trace_preserving_defect(self) -> float:
        reduced = partial_trace_mat(self.matrix, (self.in_dim, self.out_dim), [0])
        return float(np.max(np.abs(reduced - np.eye(self.in_dim))))


def choi_matrix(channel: KrausChannel) -> ChoiMatrix:
    din, dout = channel.in_dim, channel.out_dim
    j = np.zeros((din * dout, din * dout), dtype=complex)
    for k in channel.kraus_ops:
        w = k.T.reshape(-1)  # w[(i, o)] = K[o, i]
        j += np.outer(w, w.conj())
    return ChoiMatrix(j, din, dout)


def diamond_distance_bounds(a: KrausChannel, b: KrausChannel) -> tuple[float, float]:
    """Choi trace-norm sandwich around the diamond distance.

    lower = ||J_a - J_b||_1 / in_dim <= ||a - b||_diamond <= ||J_a - J_b||_1.
    """
    if a.in_dim != b.in_dim or a.out_dim != b.out_dim:
        raise DimensionMismatchError("channels act between different spaces")
    jd = trace_norm(choi_matrix(a).matrix - choi_matrix(b).matrix)
    return jd / a.in_dim, jd


@dataclass(frozen=True)
class CqChannel:
    """Finite alphabet to pure-state outputs."""

    outputs: tuple[DensityMatrix, ...]

    def __post_init__(self):
        if not self.outputs:
            raise ValueError("cq channel needs a nonempty alphabet")
        dim = self.outputs[0].dim
        for i, out in enumerate(self.outputs):
            if out.dim != dim:
                raise DimensionMismatchError("cq outputs live on different spaces")
            top = np.linalg.eigvalsh(out.mat)[-1]
            if abs(top - 1.0) > 1e-7:
                raise ValueError(f"cq output {i} is not pure (top eigenvalue {top})")
        object.__setattr__(self, "outputs", tuple(self.outputs))

    @classmethod
    def from_vectors(cls, vectors, dims=None) -> "CqChannel":
        outs = []
        for v in vectors:
            v = np.asarray(v, dtype=complex).reshape(-1)
            v = v / np.linalg.norm(v)
            d = dims if dims is not None else (v.shape[0],)
            outs.append(DensityMatrix(np.outer(v, v.conj()), d))
        return cls(tuple(outs))

    @classmethod
    def basis(cls, dim: int, alphabet_size: int | None = None) -> "CqChannel":
        """Orthogonal computational-basis inputs."""
        size = dim if alphabet_size is None else alphabet_size
        if size > dim:
            raise DimensionMismatchError("alphabet larger than the space dimension")
        eye = np.eye(dim, dtype=complex)
        return cls.from_vectors([eye[:, x] for x in range(size)])

    @property
    def alphabet_size(self) -> int:
        return len(self.outputs)

    @property
    def dim(self) -> int:
        return self.outputs[0].dim


def cq_tensor(a: CqChannel, b: CqChannel) -> CqChannel:
    """Product alphabet, row-major pairing (x_a, x_b)."""
    outs = []
    for oa in a.outputs:
        for ob in b.outputs:
            outs.append(DensityMatrix(tensor(oa.mat, ob.mat), oa.dims + ob.dims))
    return CqChannel(tuple(outs))


@dataclass(frozen=True)
class CompoundSet:
    """Finite family of channels sharing input and output spaces."""

    members: tuple[KrausChannel, ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.members:
            raise ValueError("compound set must be nonempty")
        first = self.members[0]
        for m in self.members:
            if m.in_dims != first.in_dims or m.out_dims != first.out_dims:
                raise DimensionMismatchError("compound members have mismatched spaces")
        labels = self.labels or tuple(f"s{i}" for i in range(len(self.members)))
        if len(labels) != len(self.members):
            raise ValueError("label count does not match member count")
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "labels", tuple(labels))

    def __len__(self) -> int:
        return len(self.members)


def average_channel(cset: CompoundSet) -> KrausChannel:
    """Uniform Kraus mixture of the members."""
    n = len(cset)
    ops = []
    for m in cset.members:
        ops.extend(np.sqrt(1.0 / n) * k for k in m.kraus_ops)
    first = cset.members[0]
    return KrausChannel(tuple(ops), first.in_dims, first.out_dims)


def build_net(cset: CompoundSet, theta: float) -> CompoundSet:
    """Greedy farthest-point cover of a compound set at radius theta.

    Distances use the upper Choi trace-norm bound on the diamond distance,
    so the returned subset is a valid covering for the true metric as well.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    chois = [choi_matrix(m).matrix for m in cset.members]
    chosen = [0]
    min_dist = np.array([trace_norm(j - chois[0]) for j in chois])
    while True:
        far_idx = int(np.argmax(min_dist))
        if min_dist[far_idx] <= theta:
            break
        chosen.append(far_idx)
        new_d = np.array([trace_norm(j - chois[far_idx]) for j in chois])
        min_dist = np.minimum(min_dist, new_d)
    chosen.sort()
    net = CompoundSet(
        tuple(cset.members[i] for i in chosen),
        tuple(cset.labels[i] for i in chosen),
    )
    if theta < 6.0:
        din = cset.members[0].in_dim
        dout = cset.members[0].out_dim
        log_bound = 2.0 * (din * dout) ** 2 * np.log(6.0 / theta)
        if np.log(max(len(net), 1)) > log_bound:
            raise AssertionError("net cardinality exceeds the covering bound")
    return net


# ---------------------------------------------------------------------------
# JSON channel format
#
# {"in_dims": [...], "out_dims": [...], "kraus": [[[re, im], ...], ...]}
# with each Kraus operator flattened row-major. A compound set is either a
# single channel object or {"members": [...], "labels": [...]}.
# ---------------------------------------------------------------------------

LOAD_CPTP_TOL = 1e-6


class ChannelFormatError(ValueError):
    """Malformed channel JSON."""


def _channel_to_obj(channel: KrausChannel) -> dict:
    ops = []
    for k in channel.kraus_ops:
        flat = k.reshape(-1)
        ops.append([[float(z.real), float(z.imag)] for z in flat])
    return {
        "in_dims": list(channel.in_dims),
        "out_dims": list(channel.out_dims),
        "kraus": ops,
    }


def _channel_from_obj(obj: dict) -> KrausChannel:
    try:
        in_dims = tuple(int(d) for d in obj["in_dims"])
        out_dims = tuple(int(d) for d in obj["out_dims"])
        raw_ops = obj["kraus"]
    except (KeyError, TypeError) as exc:
        raise ChannelFormatError(f"missing or malformed channel field: {exc}") from exc
    din = int(np.prod(in_dims))
    dout = int(np.prod(out_dims))
    ops = []
    for idx, entries in enumerate(raw_ops):
        if len(entries) != din * dout:
            raise ChannelFormatError(
                f"kraus operator {idx} has {len(entries)} entries, expected {din * dout}"
            )
        flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
        ops.append(flat.reshape(dout, din))
    try:
        return KrausChannel(tuple(ops), in_dims, out_dims, cptp_tol=LOAD_CPTP_TOL)
    except CptpError as exc:
        raise CptpError(
            f"channel in file is not CPTP within {LOAD_CPTP_TOL}: defect {exc.defect:.3e}",
            exc.defect,
        ) from exc


def dump_compound_json(cset: CompoundSet) -> str:
    obj = {
        "members": [_channel_to_obj(m) for m in cset.members],
        "labels": list(cset.labels),
    }
    return json.dumps(obj, indent=1, sort_keys=True)


def load_compound_json(text: str) -> CompoundSet:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ChannelFormatError("top-level JSON value must be an object")
    if "members" in obj:
        members = tuple(_channel_from_obj(m) for m in obj["members"])
        labels = tuple(str(s) for s in obj.get("labels", ()))
        return CompoundSet(members, labels)
    return CompoundSet((_channel_from_obj(obj),))
