"""Resource-state synthesis for layered networks.

The recipe: pick a multiqubit reference state per layer (perfectly
correlated, all-uniform, or collaboration-forcing depending on the protocol
and the members' honesty), tensor the layers together in ascending layer-id
order, regroup the qubits so each participant's qubits sit together ordered
by that participant's ascending layer ids, and read each group as one
``2**l``-dimensional qudit via the big-endian binary-to-decimal mapping.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Sequence

import numpy as np

from .network import Honesty, NetworkSpec, require_valid
from .qudit import QuditError, QuditState, make_state, permute_subsystems, regroup, tensor

SCHMIDT_RANK_TOL = 1e-9


class ProtocolKind(str, Enum):
    LSQKD = "lsqkd"
    LSQSS = "lsqss"
    ILSKSS = "ilskss"
    SQKD07 = "sqkd07"


@dataclass(frozen=True)
class QubitAssignment:
    """Bookkeeping from layer qubits to participant-grouped register positions.

    ``qubits`` lists (layer_id, participant_id) in pre-permutation order, one
    entry per qubit of the tensored reference states; ``permutation[k]`` is
    the pre-permutation position moved to grouped position k.
    """

    qubits: tuple[tuple[int, str], ...]
    permutation: tuple[int, ...]


@dataclass(frozen=True)
class ResourceState:
    """Multiqudit resource state with one subsystem per participant."""

    state: QuditState
    owners: tuple[str, ...]
    assignment: QubitAssignment
    protocol_kind: ProtocolKind

    def subsystem_of(self, pid: str) -> int:
        return self.owners.index(pid)


def ghz_reference(m: int) -> QuditState:
    """m-qubit state (|0...0> + |1...1>)/sqrt(2): perfect correlation."""
    if m < 2:
        raise QuditError("correlated reference state needs at least 2 qubits")
    amps = np.zeros(2**m, dtype=np.complex128)
    amps[0] = amps[-1] = 1.0
    return make_state((2,) * m, amps)


def plus_product_reference(m: int) -> QuditState:
    """m-qubit uniform product state: no member can infer another's outcome."""
    if m < 2:
        raise QuditError("uniform reference state needs at least 2 qubits")
    amps = np.full(2**m, 1.0, dtype=np.complex128)
    return make_state((2,) * m, amps)


def alpha_reference(t: int, h: int) -> QuditState:
    """Reference state for a layer with t dishonest and h honest members.

    Dishonest qubits come first, then honest qubits.  The dishonest block is
    (|+>^t + |->^t) against honest |0...0> plus (|+>^t - |->^t) against
    honest |1...1>, so the parity of the dishonest outcomes always equals
    the honest members' common bit: all dishonest members must pool their
    bits to learn anything.
    """
    if t < 1 or h < 1:
        raise QuditError("mixed-layer reference needs at least one of each kind")
    plus = np.full(2**t, 1.0, dtype=np.complex128) / np.sqrt(2**t)
    signs = np.array(
        [(-1) ** bin(x).count("1") for x in range(2**t)], dtype=np.complex128
    )
    minus = signs / np.sqrt(2**t)
    honest_zero = np.zeros(2**h, dtype=np.complex128)
    honest_zero[0] = 1.0
    honest_one = np.zeros(2**h, dtype=np.complex128)
    honest_one[-1] = 1.0
    amps = np.kron(plus + minus, honest_zero) + np.kron(plus - minus, honest_one)
    return make_state((2,) * (t + h), amps)


def binary_to_decimal(bits: Sequence[int]) -> int:
    """Big-endian bits to integer: (1, 0, 1) -> 5."""
    value = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        value = (value << 1) | b
    return value


def decimal_to_binary(value: int, width: int) -> tuple[int, ...]:
    """Big-endian bit expansion over ``width`` places."""
    if value < 0 or value >= (1 << width):
        raise ValueError(f"{value} does not fit in {width} bits")
    return tuple((value >> (width - 1 - r)) & 1 for r in range(width))


def layer_member_order(network: NetworkSpec, layer_id: int, kind: ProtocolKind) -> tuple[str, ...]:
    """Qubit order of a layer's reference state.

    Register order throughout, except that a mixed layer under the
    integrated protocol puts its dishonest block before its honest block.
    """
    members = network.layer(layer_id).members
    reg = [pid for pid in network.register_order() if pid in members]
    if kind is ProtocolKind.ILSKSS and network.layer_kind(layer_id) == "mixed":
        dis = [pid for pid in reg if network.participant(pid).honesty is Honesty.DISHONEST]
        hon = [pid for pid in reg if network.participant(pid).honesty is Honesty.HONEST]
        return tuple(dis + hon)
    return tuple(reg)


def _layer_reference(network: NetworkSpec, layer_id: int, kind: ProtocolKind) -> QuditState:
    m = len(network.layer(layer_id).members)
    if kind is ProtocolKind.LSQKD:
        return ghz_reference(m)
    if kind is ProtocolKind.LSQSS:
        return plus_product_reference(m)
    if kind is ProtocolKind.ILSKSS:
        layer_kind = network.layer_kind(layer_id)
        if layer_kind == "honest":
            return ghz_reference(m)
        if layer_kind == "dishonest":
            return plus_product_reference(m)
        order = layer_member_order(network, layer_id, kind)
        t = sum(1 for pid in order if network.participant(pid).honesty is Honesty.DISHONEST)
        return alpha_reference(t, m - t)
    raise ValueError(f"no multiparty resource state for protocol kind {kind}")


def synthesize(network: NetworkSpec, protocol_kind: ProtocolKind | str) -> ResourceState:
    """Build the resource state for a validated network and protocol kind."""
    kind = ProtocolKind(protocol_kind)
    if kind is ProtocolKind.SQKD07:
        raise ValueError("the two-party baseline protocol has no layered resource state")
    require_valid(network)

    layer_ids = sorted(l.id for l in network.layers)
    refs = []
    qubits: list[tuple[int, str]] = []
    for lid in layer_ids:
        refs.append(_layer_reference(network, lid, kind))
        qubits.extend((lid, pid) for pid in layer_member_order(network, lid, kind))

    combined = reduce(tensor, refs)

    owners = network.register_order()
    permutation: list[int] = []
    group_sizes: list[int] = []
    for pid in owners:
        positions = sorted(
            (i for i, (lid, q) in enumerate(qubits) if q == pid),
            key=lambda i: qubits[i][0],
        )
        permutation.extend(positions)
        group_sizes.append(len(positions))

    grouped = regroup(permute_subsystems(combined, permutation), group_sizes)
    assignment = QubitAssignment(qubits=tuple(qubits), permutation=tuple(permutation))

    expected = tuple(network.participant_dimension(pid) for pid in owners)
    if grouped.dims != expected:
        raise RuntimeError(
            f"synthesized dims {grouped.dims} disagree with membership counts {expected}"
        )
    return ResourceState(state=grouped, owners=owners, assignment=assignment, protocol_kind=kind)


def schmidt_vector(state: QuditState) -> tuple[int, ...]:
    """Per-subsystem Schmidt ranks of a pure state.

    Rank of each single-subsystem reduced density operator, i.e. the number
    of singular values of the subsystem-vs-rest matricization above
    ``SCHMIDT_RANK_TOL``.
    """
    ranks = []
    n = state.num_subsystems
    psi = state.tensor_view()
    for k in range(n):
        mat = np.moveaxis(psi, k, 0).reshape(state.dims[k], -1)
        singular = np.linalg.svd(mat, compute_uv=False)
        ranks.append(int(np.sum(singular > SCHMIDT_RANK_TOL)))
    return tuple(ranks)
