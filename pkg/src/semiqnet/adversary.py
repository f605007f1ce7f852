"""Eavesdropping strategies and their action on traveling subsystems.

A strategy is pure data the protocol engine consumes: which CPs are
targeted, which channel legs (forward = toward the CP, backward = toward
the QP) are tapped, and what Eve does there.  Interception is modeled as a
computational-basis measurement of the traveling subsystem; entangling
attacks attach a fresh ancilla and apply a declared unitary on
(subsystem, ancilla).  Eve's ancillas stay in the joint state, so the
honest parties' statistics remain exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping

import numpy as np

from .network import NetworkSpec
from .qudit import QuditState, UnitaryMatrix, apply_unitary, attach_ancilla, measure_computational


class AttackKind(str, Enum):
    INTERCEPT_RESEND = "intercept"
    ENTANGLE_MEASURE = "entangle"
    TWO_WAY_ENTANGLE = "twoway"
    LYING_PARTICIPANT = "lying"


@dataclass(frozen=True)
class LyingPolicy:
    """How a dishonest CP misreports CTRL outcomes.

    kinds: 'honest' (truthful), 'uniform' (uniformly random symbol),
    'offset' (truth + offset mod dimension).
    """

    kind: str = "uniform"
    offset: int = 1

    def __post_init__(self):
        if self.kind not in ("honest", "uniform", "offset"):
            raise ValueError(f"unknown lying policy {self.kind!r}")


def lying_policy_apply(
    policy: LyingPolicy, true_outcome: int, dim: int, rng: np.random.Generator
) -> int:
    """Reported value for a true CTRL outcome under the policy."""
    if policy.kind == "honest":
        return true_outcome
    if policy.kind == "uniform":
        return int(rng.integers(dim))
    return (true_outcome + policy.offset) % dim


def lying_match_probability(policy: LyingPolicy, dim: int) -> float:
    """Probability that the reported value equals the true value."""
    if policy.kind == "honest":
        return 1.0
    if policy.kind == "uniform":
        return 1.0 / dim
    return 1.0 if policy.offset % dim == 0 else 0.0


@dataclass(frozen=True)
class EveStrategy:
    """Attack description consumed by the protocol engine and the analyzers."""

    kind: AttackKind
    targets: tuple[str, ...]
    forward: bool = True
    backward: bool = False
    forward_unitaries: Mapping[str, UnitaryMatrix] = field(default_factory=dict)
    backward_unitaries: Mapping[str, UnitaryMatrix] = field(default_factory=dict)
    lying_policy: LyingPolicy | None = None
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.targets:
            raise ValueError("strategy needs at least one target")
        if self.kind in (AttackKind.ENTANGLE_MEASURE, AttackKind.TWO_WAY_ENTANGLE):
            if self.forward and set(self.forward_unitaries) != set(self.targets):
                raise ValueError("forward unitaries must cover every target")
            if self.backward and set(self.backward_unitaries) != set(self.targets):
                raise ValueError("backward unitaries must cover every target")
        if self.kind is AttackKind.LYING_PARTICIPANT and self.lying_policy is None:
            object.__setattr__(self, "lying_policy", LyingPolicy())

    @property
    def touches_state(self) -> bool:
        return self.kind is not AttackKind.LYING_PARTICIPANT

    def evidence_slots(self) -> tuple[tuple[str, str], ...]:
        """Canonical (target, leg) order of Eve's records and ancillas.

        Forward slots for every target first, then backward slots.  Both the
        sampled engine and the exact evaluator emit evidence in this order.
        """
        if not self.touches_state:
            return ()
        slots = []
        if self.forward:
            slots.extend((t, "forward") for t in self.targets)
        if self.backward:
            slots.extend((t, "backward") for t in self.targets)
        return tuple(slots)

    def describe(self) -> str:
        legs = ("f" if self.forward else "") + ("b" if self.backward else "")
        parts = [self.kind.value, ",".join(self.targets)]
        if self.touches_state:
            parts.append(legs)
        if self.params:
            parts.append(",".join(f"{k}={v:g}" for k, v in sorted(self.params.items())))
        if self.lying_policy is not None and self.kind is AttackKind.LYING_PARTICIPANT:
            parts.append(f"policy={self.lying_policy.kind}")
        return ":".join(parts)


@dataclass
class TapResult:
    state: QuditState
    ancilla_index: int | None = None
    measured: int | None = None


def _entangling_unitary(strategy: EveStrategy, target: str, leg: str) -> UnitaryMatrix:
    table = strategy.forward_unitaries if leg == "forward" else strategy.backward_unitaries
    try:
        return table[target]
    except KeyError:
        raise ValueError(f"strategy has no {leg} unitary for target {target!r}") from None


def apply_tap(
    strategy: EveStrategy,
    state: QuditState,
    target: str,
    subsystem: int,
    leg: str,
    rng: np.random.Generator | None,
) -> TapResult:
    """Apply Eve's tap for one target on one leg of the channel.

    With an rng, interception actually measures (collapse plus a logged
    outcome).  Without one the measurement is deferred: a copy ancilla is
    attached instead, which leaves identical statistics and lets the exact
    evaluator work on pure states throughout.
    """
    if not strategy.touches_state:
        return TapResult(state)
    if leg == "forward" and not strategy.forward:
        return TapResult(state)
    if leg == "backward" and not strategy.backward:
        return TapResult(state)

    if strategy.kind is AttackKind.INTERCEPT_RESEND:
        if rng is not None:
            outcomes, post, _ = measure_computational(state, (subsystem,), rng)
            return TapResult(post, measured=int(outcomes[0]))
        dim = state.dims[subsystem]
        grown = attach_ancilla(state, dim, 0)
        anc = grown.num_subsystems - 1
        grown = apply_unitary(grown, (subsystem, anc), copy_unitary(dim))
        return TapResult(grown, ancilla_index=anc)

    u = _entangling_unitary(strategy, target, leg)
    if u.acting_dims[0] != state.dims[subsystem]:
        raise ValueError(
            f"{leg} unitary for {target!r} acts on dimension {u.acting_dims[0]}, "
            f"subsystem has dimension {state.dims[subsystem]}"
        )
    grown = attach_ancilla(state, u.acting_dims[1], 0)
    anc = grown.num_subsystems - 1
    grown = apply_unitary(grown, (subsystem, anc), u)
    return TapResult(grown, ancilla_index=anc)


def tap_forward(
    strategy: EveStrategy,
    joint_state: QuditState,
    target: str,
    subsystem: int,
    rng: np.random.Generator | None,
) -> TapResult:
    """Tap the subsystem traveling from the QP toward ``target``."""
    return apply_tap(strategy, joint_state, target, subsystem, "forward", rng)


def tap_backward(
    strategy: EveStrategy,
    joint_state: QuditState,
    target: str,
    subsystem: int,
    rng: np.random.Generator | None,
) -> TapResult:
    """Tap the subsystem returning from ``target`` toward the QP."""
    return apply_tap(strategy, joint_state, target, subsystem, "backward", rng)


# -- unitary builders -------------------------------------------------------


def copy_unitary(dim: int) -> UnitaryMatrix:
    """|i>|a> -> |i>|a + i mod dim>: a computational-basis copier."""
    size = dim * dim
    mat = np.zeros((size, size), dtype=np.complex128)
    for i in range(dim):
        for a in range(dim):
            mat[i * dim + (a + i) % dim, i * dim + a] = 1.0
    return UnitaryMatrix(mat, (dim, dim))


def controlled_rotation_unitary(dim: int, angle: float) -> UnitaryMatrix:
    """Basis index i of the system rotates a qubit ancilla by angle*i.

    angle = 0 is the identity; on a two-level system angle = pi/2 reproduces
    the computational-basis copier.
    """
    size = dim * 2
    mat = np.zeros((size, size), dtype=np.complex128)
    for i in range(dim):
        c, s = np.cos(angle * i), np.sin(angle * i)
        mat[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = np.array([[c, -s], [s, c]])
    return UnitaryMatrix(mat, (dim, 2))


def intercept_resend(
    targets: tuple[str, ...] | list[str], forward: bool = True, backward: bool = False
) -> EveStrategy:
    return EveStrategy(
        AttackKind.INTERCEPT_RESEND, tuple(targets), forward=forward, backward=backward
    )


def entangle_measure(network: NetworkSpec, targets: tuple[str, ...] | list[str]) -> EveStrategy:
    """Forward copy attack: Eve's ancilla mirrors the target's basis index."""
    units = {t: copy_unitary(network.participant_dimension(t)) for t in targets}
    return EveStrategy(
        AttackKind.ENTANGLE_MEASURE,
        tuple(targets),
        forward=True,
        backward=False,
        forward_unitaries=units,
    )


def two_way_entangle(
    network: NetworkSpec,
    targets: tuple[str, ...] | list[str],
    theta: float,
    phi: float,
    forward: bool = True,
    backward: bool = True,
) -> EveStrategy:
    """Controlled-rotation family: theta on the forward leg, phi backward."""
    fwd = {t: controlled_rotation_unitary(network.participant_dimension(t), theta) for t in targets}
    bwd = {t: controlled_rotation_unitary(network.participant_dimension(t), phi) for t in targets}
    return EveStrategy(
        AttackKind.TWO_WAY_ENTANGLE,
        tuple(targets),
        forward=forward,
        backward=backward,
        forward_unitaries=fwd if forward else {},
        backward_unitaries=bwd if backward else {},
        params={"theta": theta, "phi": phi},
    )


def lying_participant(targets: tuple[str, ...] | list[str], policy: LyingPolicy) -> EveStrategy:
    return EveStrategy(
        AttackKind.LYING_PARTICIPANT,
        tuple(targets),
        forward=False,
        backward=False,
        lying_policy=policy,
    )


@dataclass(frozen=True)
class ControlledRotationFamily:
    """One-parameter slice of the two-way family used for tradeoff curves.

    ``build(theta)`` entangles with angle theta forward and phi_scale*theta
    backward; theta = 0 is the do-nothing endpoint.
    """

    targets: tuple[str, ...]
    forward: bool = True
    backward: bool = True
    phi_scale: float = 1.0

    def build(self, network: NetworkSpec, theta: float) -> EveStrategy:
        return two_way_entangle(
            network,
            self.targets,
            theta=theta,
            phi=self.phi_scale * theta if self.backward else 0.0,
            forward=self.forward,
            backward=self.backward,
        )


# -- shorthand parsing ------------------------------------------------------


def unitary_from_pairs(rows: list[list[list[float]]], dims: tuple[int, ...]) -> UnitaryMatrix:
    """Row-major [re, im] pairs to a UnitaryMatrix on the given register."""
    mat = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)
    return UnitaryMatrix(mat, tuple(dims))


def _load_unitary_doc(doc: dict, targets: tuple[str, ...]) -> tuple[dict, dict]:
    fwd, bwd = {}, {}
    for t in targets:
        entry = doc.get(t)
        if entry is None:
            raise ValueError(f"unitary file has no entry for target {t!r}")
        for leg, table in (("forward", fwd), ("backward", bwd)):
            if leg in entry:
                spec = entry[leg]
                table[t] = unitary_from_pairs(spec["matrix"], tuple(spec["acting_dims"]))
    return fwd, bwd


def parse_attack(
    text: str, network: NetworkSpec, unitary_doc: dict | None = None
) -> EveStrategy:
    """Parse the shorthand ``kind:target[,target][:legs][:params]``.

    Examples: ``intercept:bob1``, ``intercept:bob2:b``,
    ``twoway:bob1:fb:theta=0.4,phi=0.8``, ``lying:bob3:policy=uniform``,
    ``twoway:bob1:fb:file=unitaries.json`` (explicit row-major complex-pair
    matrices; also satisfiable by passing ``unitary_doc`` directly).
    """
    pieces = text.split(":")
    if len(pieces) < 2:
        raise ValueError(f"attack shorthand needs kind:targets, got {text!r}")
    try:
        kind = AttackKind(pieces[0].strip().lower())
    except ValueError:
        raise ValueError(f"unknown attack kind {pieces[0]!r}") from None
    targets = tuple(t.strip() for t in pieces[1].split(",") if t.strip())
    known = {p.id for p in network.cps}
    unknown = [t for t in targets if t not in known]
    if unknown:
        raise ValueError(f"attack targets unknown CPs: {unknown}")

    legs = None
    params: dict[str, str] = {}
    for piece in pieces[2:]:
        piece = piece.strip()
        if not piece:
            continue
        if "=" not in piece and set(piece) <= {"f", "b"}:
            legs = piece
        else:
            for item in piece.split(","):
                key, _, value = item.partition("=")
                if not _:
                    raise ValueError(f"malformed attack parameter {item!r}")
                params[key.strip()] = value.strip()

    if legs is None:
        legs = {"intercept": "f", "entangle": "f", "twoway": "fb", "lying": ""}[kind.value]
    forward, backward = "f" in legs, "b" in legs

    if kind is AttackKind.LYING_PARTICIPANT:
        policy = LyingPolicy(
            kind=params.get("policy", "uniform"), offset=int(params.get("offset", 1))
        )
        return lying_participant(targets, policy)

    if kind is AttackKind.INTERCEPT_RESEND:
        return intercept_resend(targets, forward=forward, backward=backward)

    if "file" in params and unitary_doc is None:
        unitary_doc = json.loads(Path(params["file"]).read_text(encoding="utf-8"))
    if unitary_doc is not None:
        fwd, bwd = _load_unitary_doc(unitary_doc, targets)
        return EveStrategy(
            kind,
            targets,
            forward=forward,
            backward=backward,
            forward_unitaries=fwd,
            backward_unitaries=bwd,
        )

    if kind is AttackKind.ENTANGLE_MEASURE:
        return entangle_measure(network, targets)

    theta = float(params.get("theta", np.pi / 2))
    phi = float(params.get("phi", 0.0))
    return two_way_entangle(network, targets, theta, phi, forward=forward, backward=backward)


def eve_guess(strategy: EveStrategy, transcript, layer_id: int):
    """Eve's per-round best guess of a layer's symbols, with accuracy.

    Uses the exact maximum-a-posteriori table for the strategy (built from
    the same unitaries by direct state evolution) applied to the evidence
    Eve actually collected in the transcript's generation rounds.  Returns
    (guesses, accuracy); guesses align with the layer's generation rounds.
    """
    from .analysis import build_guess_model, apply_guess_model

    model = build_guess_model(transcript.protocol, transcript.network, strategy, layer_id)
    return apply_guess_model(model, transcript, layer_id)
