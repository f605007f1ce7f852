"""Layered-network description: participants, layers, honesty, validation.

A network has exactly one quantum participant (QP) who either belongs to
layers like any other member or acts as an external server, plus classical
participants (CPs) grouped into layers.  A participant belonging to ``l``
layers holds a ``2**l``-dimensional subsystem of the resource state.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable


class Role(str, Enum):
    QP = "QP"
    CP = "CP"


class Honesty(str, Enum):
    HONEST = "honest"
    DISHONEST = "dishonest"


class NetworkError(ValueError):
    """Raised when a network document cannot be interpreted at all."""


@dataclass(frozen=True)
class Participant:
    id: str
    role: Role = Role.CP
    honesty: Honesty = Honesty.HONEST


@dataclass(frozen=True)
class Layer:
    id: int
    members: tuple[str, ...]


@dataclass(frozen=True)
class NetworkSpec:
    """Immutable network structure; build via the constructor and `validate`.

    Field names of the serialized form (participants / layers / qp_is_member)
    are fixed; see `to_document` / `from_document`.
    """

    participants: tuple[Participant, ...]
    layers: tuple[Layer, ...]
    qp_is_member: bool

    # -- derived structure ------------------------------------------------

    def participant(self, pid: str) -> Participant:
        for p in self.participants:
            if p.id == pid:
                return p
        raise NetworkError(f"unknown participant {pid!r}")

    @property
    def qp(self) -> Participant:
        qps = [p for p in self.participants if p.role == Role.QP]
        if len(qps) != 1:
            raise NetworkError(f"network must have exactly one QP, found {len(qps)}")
        return qps[0]

    @property
    def cps(self) -> tuple[Participant, ...]:
        return tuple(p for p in self.participants if p.role == Role.CP)

    @property
    def num_layers(self) -> int:
        return len(self.layers)

    def layer(self, layer_id: int) -> Layer:
        for layer in self.layers:
            if layer.id == layer_id:
                return layer
        raise NetworkError(f"unknown layer {layer_id}")

    def layers_of(self, pid: str) -> tuple[int, ...]:
        """Layer ids containing the participant, ascending.

        The ascending order is contractual: a participant's most significant
        outcome bit serves their lowest-id layer.
        """
        self.participant(pid)
        return tuple(sorted(l.id for l in self.layers if pid in l.members))

    def membership_count(self, pid: str) -> int:
        return len(self.layers_of(pid))

    def participant_dimension(self, pid: str) -> int:
        """Subsystem dimension 2**l for a participant in l layers."""
        l = self.membership_count(pid)
        if l == 0:
            raise NetworkError(f"participant {pid!r} belongs to no layer")
        return 2**l

    def register_order(self) -> tuple[str, ...]:
        """Participants owning a resource-state subsystem, in register order.

        The QP comes first when she is a layer member; CPs follow in their
        declared order.  An external QP owns no subsystem.
        """
        order = []
        if self.qp_is_member:
            order.append(self.qp.id)
        order.extend(p.id for p in self.cps)
        return tuple(order)

    def layer_kind(self, layer_id: int) -> str:
        """'honest', 'dishonest', or 'mixed' from the members' honesty flags."""
        members = self.layer(layer_id).members
        honesty = {self.participant(m).honesty for m in members}
        if honesty == {Honesty.HONEST}:
            return "honest"
        if honesty == {Honesty.DISHONEST}:
            return "dishonest"
        return "mixed"

    # -- serialization ----------------------------------------------------

    def to_document(self) -> dict:
        return {
            "participants": [
                {"id": p.id, "role": p.role.value, "honesty": p.honesty.value}
                for p in self.participants
            ],
            "layers": [{"id": l.id, "members": list(l.members)} for l in self.layers],
            "qp_is_member": self.qp_is_member,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "NetworkSpec":
        try:
            participants = tuple(
                Participant(
                    id=str(p["id"]),
                    role=Role(p.get("role", "CP")),
                    honesty=Honesty(p.get("honesty", "honest")),
                )
                for p in doc["participants"]
            )
            layers = tuple(
                Layer(id=int(l["id"]), members=tuple(str(m) for m in l["members"]))
                for l in doc["layers"]
            )
            qp_is_member = bool(doc["qp_is_member"])
        except (KeyError, TypeError, ValueError) as exc:
            raise NetworkError(f"malformed network document: {exc}") from exc
        return cls(participants=participants, layers=layers, qp_is_member=qp_is_member)


def load_network(path: str | Path) -> NetworkSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return NetworkSpec.from_document(json.load(fh))


def save_network(spec: NetworkSpec, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec.to_document(), fh, indent=2)
        fh.write("\n")


def validate(spec: NetworkSpec) -> tuple[list[str], list[str]]:
    """Collect structural violations and advisory warnings.

    Violations make the network unusable; warnings flag legal but unusual
    structure (e.g. two layers with identical member sets, which simply get
    independent keys).
    """
    violations: list[str] = []
    warnings: list[str] = []

    ids = [p.id for p in spec.participants]
    if len(set(ids)) != len(ids):
        violations.append("participant ids are not unique")
    qps = [p for p in spec.participants if p.role == Role.QP]
    if len(qps) != 1:
        violations.append(f"exactly one QP required, found {len(qps)}")

    layer_ids = [l.id for l in spec.layers]
    if len(set(layer_ids)) != len(layer_ids):
        violations.append("layer ids are not unique")
    if not spec.layers:
        violations.append("network has no layers")

    known = set(ids)
    for layer in spec.layers:
        if len(layer.members) < 2:
            violations.append(f"layer {layer.id} has fewer than two members")
        if len(set(layer.members)) != len(layer.members):
            violations.append(f"layer {layer.id} repeats a member")
        for m in layer.members:
            if m not in known:
                violations.append(f"layer {layer.id} references unknown participant {m!r}")

    if len(qps) == 1:
        qp_id = qps[0].id
        in_layers = any(qp_id in l.members for l in spec.layers)
        if spec.qp_is_member and not in_layers:
            violations.append("qp_is_member is set but the QP belongs to no layer")
        if not spec.qp_is_member and in_layers:
            violations.append("qp_is_member is unset but the QP appears in a layer")
        for p in spec.participants:
            if p.role == Role.CP and not any(p.id in l.members for l in spec.layers):
                violations.append(f"participant {p.id!r} belongs to no layer")

    seen_member_sets: dict[frozenset, int] = {}
    for layer in spec.layers:
        key = frozenset(layer.members)
        if key in seen_member_sets:
            warnings.append(
                f"layers {seen_member_sets[key]} and {layer.id} have identical member sets; "
                "they will carry independent keys"
            )
        else:
            seen_member_sets[key] = layer.id

    return violations, warnings


def require_valid(spec: NetworkSpec) -> NetworkSpec:
    violations, _ = validate(spec)
    if violations:
        raise NetworkError("; ".join(violations))
    return spec


def make_network(
    cp_ids: Iterable[str],
    layers: dict[int, Iterable[str]],
    qp_id: str = "alice",
    qp_is_member: bool = False,
    dishonest: Iterable[str] = (),
) -> NetworkSpec:
    """Convenience constructor used by tests and fixtures."""
    dishonest = set(dishonest)
    participants = [Participant(qp_id, Role.QP)]
    participants += [
        Participant(cid, Role.CP, Honesty.DISHONEST if cid in dishonest else Honesty.HONEST)
        for cid in cp_ids
    ]
    layer_objs = tuple(
        Layer(id=lid, members=tuple(members)) for lid, members in sorted(layers.items())
    )
    return NetworkSpec(tuple(participants), layer_objs, qp_is_member)
