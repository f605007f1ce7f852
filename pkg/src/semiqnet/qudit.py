"""Dense state-vector engine for registers of mixed-dimension qudits.

A register is described by a tuple of per-subsystem dimensions ("dims").
Amplitude indexing is big-endian mixed-radix: subsystem 0 is the most
significant digit, so ``amps.reshape(dims)[i0, i1, ...]`` is the amplitude
of the basis state ``|i0 i1 ...>``.  States are immutable values; every
operation returns a fresh state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10

Dims = tuple[int, ...]


class QuditError(ValueError):
    """Raised for malformed states, registers, or operator mismatches."""


def _check_dims(dims: Sequence[int]) -> Dims:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise QuditError("register needs at least one subsystem")
    if any(d < 2 for d in dims):
        raise QuditError(f"every subsystem dimension must be >= 2, got {dims}")
    return dims


@dataclass(frozen=True)
class QuditState:
    """Normalized pure state over a mixed-radix register.

    ``normalization_applied`` records the scale divided out of the input
    amplitudes at construction; it does not participate in comparisons.
    """

    dims: Dims
    amps: np.ndarray
    normalization_applied: float = field(default=1.0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "dims", _check_dims(self.dims))
        total = 1
        for d in self.dims:
            total *= d
        object.__setattr__(self, "_total", total)
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (total,):
            raise QuditError(f"amplitude vector has length {amps.shape}, expected {total}")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)
        norm = np.linalg.norm(self.amps)
        if abs(norm - 1.0) > 1e-9:
            raise QuditError(f"state is not normalized (|norm - 1| = {abs(norm - 1.0):.3e})")

    @property
    def total_dim(self) -> int:
        return self._total

    @property
    def num_subsystems(self) -> int:
        return len(self.dims)

    def tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per subsystem (read-only view)."""
        return self.amps.reshape(self.dims)

    def index_of(self, outcome: Sequence[int]) -> int:
        """Flat index of a basis state given per-subsystem digits."""
        if len(outcome) != self.num_subsystems:
            raise QuditError("outcome length does not match register")
        idx = 0
        for digit, dim in zip(outcome, self.dims):
            if not 0 <= digit < dim:
                raise QuditError(f"digit {digit} out of range for dimension {dim}")
            idx = idx * dim + digit
        return idx

    def digits_of(self, index: int) -> tuple[int, ...]:
        """Per-subsystem digits of a flat basis index."""
        digits = []
        for dim in reversed(self.dims):
            digits.append(index % dim)
            index //= dim
        return tuple(reversed(digits))

    def amplitude(self, outcome: Sequence[int]) -> complex:
        return complex(self.amps[self.index_of(outcome)])


def _fresh(dims: Dims, amps: np.ndarray) -> QuditState:
    """Wrap a freshly computed, already normalized amplitude array.

    Internal fast path for norm-preserving operations: skips the defensive
    copy and validation of the public constructor.  ``amps`` must not be
    aliased elsewhere.
    """
    state = object.__new__(QuditState)
    object.__setattr__(state, "dims", dims)
    object.__setattr__(state, "_total", amps.size)
    amps.setflags(write=False)
    object.__setattr__(state, "amps", amps)
    object.__setattr__(state, "normalization_applied", 1.0)
    return state


@dataclass(frozen=True)
class UnitaryMatrix:
    """Square complex matrix acting on an ordered list of subsystem dimensions."""

    matrix: np.ndarray
    acting_dims: Dims

    def __post_init__(self):
        object.__setattr__(self, "acting_dims", _check_dims(self.acting_dims))
        mat = np.asarray(self.matrix, dtype=np.complex128)
        d = int(np.prod(self.acting_dims))
        if mat.shape != (d, d):
            raise QuditError(f"matrix shape {mat.shape} does not match dims {self.acting_dims}")
        defect = np.abs(mat.conj().T @ mat - np.eye(d)).max()
        if defect > UNITARY_TOL:
            raise QuditError(f"matrix is not unitary (max defect {defect:.3e})")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return int(np.prod(self.acting_dims))


def make_state(dims: Sequence[int], amplitudes: Iterable[complex]) -> QuditState:
    """Build a normalized state from raw amplitudes.

    The input is normalized; the applied scale is recorded on the returned
    state as ``normalization_applied``.
    """
    dims = _check_dims(dims)
    amps = np.asarray(list(amplitudes) if not isinstance(amplitudes, np.ndarray) else amplitudes,
                      dtype=np.complex128)
    total = int(np.prod(dims))
    if amps.shape != (total,):
        raise QuditError(f"expected {total} amplitudes for dims {dims}, got {amps.shape}")
    norm = float(np.linalg.norm(amps))
    if norm <= NORM_TOL:
        raise QuditError("cannot normalize the zero vector")
    return QuditState(dims, amps / norm, normalization_applied=norm)


def basis_state(dims: Sequence[int], outcome: Sequence[int]) -> QuditState:
    """Computational basis state |outcome> on the given register."""
    dims = _check_dims(dims)
    amps = np.zeros(int(np.prod(dims)), dtype=np.complex128)
    idx = 0
    for digit, dim in zip(outcome, dims):
        if not 0 <= digit < dim:
            raise QuditError(f"digit {digit} out of range for dimension {dim}")
        idx = idx * dim + digit
    if len(outcome) != len(dims):
        raise QuditError("outcome length does not match register")
    amps[idx] = 1.0
    return QuditState(dims, amps)


def tensor(a: QuditState, b: QuditState) -> QuditState:
    """Tensor product; subsystems of ``b`` are appended after those of ``a``."""
    amps = np.kron(a.amps, b.amps)
    return _fresh(a.dims + b.dims, amps)


def attach_ancilla(state: QuditState, dim: int, init_index: int = 0) -> QuditState:
    """Append a fresh ancilla prepared in |init_index> as the last subsystem."""
    if dim < 2:
        raise QuditError("ancilla dimension must be >= 2")
    if not 0 <= init_index < dim:
        raise QuditError(f"ancilla index {init_index} out of range for dimension {dim}")
    return tensor(state, basis_state((dim,), (init_index,)))


def _check_targets(state: QuditState, targets: Sequence[int]) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets):
        raise QuditError(f"duplicate target subsystems: {targets}")
    for t in targets:
        if not 0 <= t < state.num_subsystems:
            raise QuditError(f"target {t} out of range for {state.num_subsystems} subsystems")
    return targets


def apply_unitary(state: QuditState, targets: Sequence[int], u: UnitaryMatrix) -> QuditState:
    """Apply ``u`` on the listed subsystems (identity elsewhere)."""
    targets = _check_targets(state, targets)
    target_dims = tuple(state.dims[t] for t in targets)
    if target_dims != u.acting_dims:
        raise QuditError(
            f"unitary acts on dims {u.acting_dims} but targets have dims {target_dims}"
        )
    k = len(targets)
    u_tensor = u.matrix.reshape(u.acting_dims + u.acting_dims)
    psi = state.tensor_view()
    # Contract the input axes of u with the target axes of psi; tensordot
    # puts the k output axes first, so move them back into place.
    out = np.tensordot(u_tensor, psi, axes=(tuple(range(k, 2 * k)), targets))
    out = np.moveaxis(out, tuple(range(k)), targets)
    return _fresh(state.dims, np.ascontiguousarray(out).reshape(-1))


def outcome_distribution(state: QuditState, targets: Sequence[int]) -> dict[tuple[int, ...], float]:
    """Exact marginal Born distribution over joint outcomes on ``targets``."""
    targets = _check_targets(state, targets)
    other = tuple(i for i in range(state.num_subsystems) if i not in targets)
    probs = np.abs(state.tensor_view()) ** 2
    # After summing out the other axes, remaining axes follow ascending
    # subsystem order; re-key each entry into the requested target order.
    marginal = probs.sum(axis=other) if other else probs
    table: dict[tuple[int, ...], float] = {}
    target_sorted = sorted(targets)
    for flat_idx, p in enumerate(marginal.reshape(-1)):
        if p <= 0.0:
            continue
        digits = []
        rem = flat_idx
        for dim in reversed([state.dims[t] for t in target_sorted]):
            digits.append(rem % dim)
            rem //= dim
        digits = tuple(reversed(digits))
        keyed = tuple(digits[target_sorted.index(t)] for t in targets)
        table[keyed] = table.get(keyed, 0.0) + float(p)
    return table


def measure_computational(
    state: QuditState, targets: Sequence[int], rng: np.random.Generator
) -> tuple[tuple[int, ...], QuditState, float]:
    """Sample a computational-basis measurement of ``targets`` and collapse.

    Returns (outcomes in target order, post-measurement state, exact
    probability of the sampled outcome).
    """
    targets = _check_targets(state, targets)
    other = tuple(i for i in range(state.num_subsystems) if i not in targets)
    psi = state.tensor_view()
    probs = (psi.real**2 + psi.imag**2)
    marginal = probs.sum(axis=other) if other else probs
    flat = marginal.reshape(-1)
    cum = np.cumsum(flat)
    pick = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    pick = min(pick, flat.size - 1)
    target_sorted = sorted(targets)
    digits = []
    rem = pick
    for dim in reversed([state.dims[t] for t in target_sorted]):
        digits.append(rem % dim)
        rem //= dim
    digits = tuple(reversed(digits))
    prob = float(flat[pick])

    # Collapse: zero every amplitude whose target digits differ.
    selector = [slice(None)] * state.num_subsystems
    for t, d in zip(target_sorted, digits):
        selector[t] = d
    collapsed = np.zeros_like(psi)
    collapsed[tuple(selector)] = psi[tuple(selector)] / np.sqrt(prob)
    outcomes = tuple(digits[target_sorted.index(t)] for t in targets)
    return outcomes, _fresh(state.dims, collapsed.reshape(-1)), prob


def project_outcome(
    state: QuditState, targets: Sequence[int], digits: Sequence[int]
) -> tuple[float, QuditState | None]:
    """Probability of reading ``digits`` on ``targets`` and the collapsed state.

    The deterministic counterpart of measure_computational; the collapsed
    state is None when the outcome has zero probability.
    """
    targets = _check_targets(state, targets)
    if len(digits) != len(targets):
        raise QuditError("digits and targets must have equal length")
    psi = state.tensor_view()
    selector = [slice(None)] * state.num_subsystems
    for t, d in zip(targets, digits):
        if not 0 <= d < state.dims[t]:
            raise QuditError(f"digit {d} out of range for dimension {state.dims[t]}")
        selector[t] = d
    block = psi[tuple(selector)]
    prob = float((block.real**2 + block.imag**2).sum())
    if prob <= NORM_TOL**2:
        return 0.0, None
    collapsed = np.zeros_like(psi)
    collapsed[tuple(selector)] = block / np.sqrt(prob)
    return prob, _fresh(state.dims, collapsed.reshape(-1))


def project_onto(
    state: QuditState, target: QuditState
) -> tuple[float, QuditState | None, QuditState | None]:
    """Rank-1 projection of ``state`` onto ``target`` (modulo trailing ancillas).

    ``target.dims`` must be a prefix of ``state.dims``; on any extra trailing
    subsystems the projector acts as the identity.  Returns
    (success probability, renormalized pass branch, renormalized fail branch).
    A branch is None when its weight is numerically zero.
    """
    n = target.num_subsystems
    if state.dims[:n] != target.dims:
        raise QuditError(
            f"target register {target.dims} is not a prefix of state register {state.dims}"
        )
    anc_dim = int(np.prod(state.dims[n:], dtype=np.int64)) if state.num_subsystems > n else 1
    mat = state.amps.reshape(target.total_dim, anc_dim)
    coeff = target.amps.conj() @ mat  # vector over the ancilla register
    success = float(np.real(coeff.conj() @ coeff))
    success = min(max(success, 0.0), 1.0)
    pass_amps = np.outer(target.amps, coeff).reshape(-1)
    fail_amps = state.amps - pass_amps
    pass_state = None
    fail_state = None
    if success > NORM_TOL:
        pass_state = _fresh(state.dims, pass_amps / np.linalg.norm(pass_amps))
    if 1.0 - success > NORM_TOL:
        fail_state = _fresh(state.dims, fail_amps / np.linalg.norm(fail_amps))
    return success, pass_state, fail_state


def permute_subsystems(state: QuditState, order: Sequence[int]) -> QuditState:
    """Reorder subsystems so new position k holds old subsystem order[k]."""
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(state.num_subsystems)):
        raise QuditError(f"order {order} is not a permutation of the register")
    psi = np.ascontiguousarray(np.transpose(state.tensor_view(), order))
    return _fresh(tuple(state.dims[i] for i in order), psi.reshape(-1))


def regroup(state: QuditState, group_sizes: Sequence[int]) -> QuditState:
    """Merge consecutive runs of subsystems into single higher-dimensional ones.

    Big-endian indexing makes this a pure relabeling: amplitudes are unchanged.
    """
    if sum(group_sizes) != state.num_subsystems:
        raise QuditError("group sizes must cover the register exactly")
    new_dims = []
    pos = 0
    for size in group_sizes:
        if size < 1:
            raise QuditError("group sizes must be >= 1")
        new_dims.append(int(np.prod(state.dims[pos : pos + size])))
        pos += size
    return _fresh(tuple(new_dims), state.amps.copy())


def phase_fixed(state: QuditState) -> QuditState:
    """Rotate the global phase so the first nonzero amplitude is real-positive."""
    amps = state.amps
    nz = np.flatnonzero(np.abs(amps) > NORM_TOL)
    if nz.size == 0:
        return state
    ref = amps[nz[0]]
    return _fresh(state.dims, amps * (abs(ref) / ref))


def states_equal(a: QuditState, b: QuditState, tol: float = NORM_TOL) -> bool:
    """Amplitude-exact equality after phase fixing."""
    if a.dims != b.dims:
        return False
    return bool(np.abs(phase_fixed(a).amps - phase_fixed(b).amps).max() <= tol)


def support(state: QuditState, tol: float = NORM_TOL) -> set[tuple[int, ...]]:
    """Basis outcomes with probability above ``tol``."""
    probs = np.abs(state.amps) ** 2
    return {state.digits_of(int(i)) for i in np.flatnonzero(probs > tol)}


def identity_unitary(dims: Sequence[int]) -> UnitaryMatrix:
    dims = _check_dims(dims)
    return UnitaryMatrix(np.eye(int(np.prod(dims))), dims)
