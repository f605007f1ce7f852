"""Round-by-round execution of the layered semi-quantum protocols.

One round: the QP prepares a fresh resource state and sends each CP their
subsystem (Eve may tap the forward leg), every CP independently chooses
CTRL (measure and return) or Reflect (return untouched), the subsystems
travel back (Eve may tap again), and the QP either measures everything in
the computational basis or tests the returned state against the resource
state projectively.  Classical reconciliation afterwards (sift) splits
rounds into test rounds, per-layer generation rounds, and discards; keys
and secret shares fall out of the binary expansion of the measured symbols.

The two-party baseline (sqkd07) with prepare-and-measure single qubits
lives here too, with its own record types.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .adversary import AttackKind, EveStrategy, apply_tap, lying_policy_apply
from .network import Honesty, NetworkSpec, require_valid
from .qudit import (
    QuditState,
    UnitaryMatrix,
    basis_state,
    make_state,
    apply_unitary,
    measure_computational,
    project_onto,
    support,
)
from .synthesis import ProtocolKind, ResourceState, synthesize

MASK64 = (1 << 64) - 1


class Action(str, Enum):
    CTRL = "ctrl"
    REFLECT = "reflect"


class AliceChoice(str, Enum):
    COMPUTATIONAL = "computational"
    PROJECTIVE = "projective"


def round_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for one round: reproducible and order-free."""
    key = np.array([seed & MASK64, index & MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class Session:
    """Prepared context for running rounds of one protocol on one network."""

    protocol: ProtocolKind
    network: NetworkSpec
    resource: ResourceState
    cp_ids: tuple[str, ...]
    cp_subsystems: tuple[int, ...]
    cp_dims: tuple[int, ...]
    alice_subsystem: int | None
    support: frozenset


def make_session(protocol: ProtocolKind | str, network: NetworkSpec) -> Session:
    protocol = ProtocolKind(protocol)
    require_valid(network)
    resource = synthesize(network, protocol)
    owners = resource.owners
    cp_ids = tuple(p.id for p in network.cps)
    cp_subsystems = tuple(owners.index(pid) for pid in cp_ids)
    cp_dims = tuple(resource.state.dims[i] for i in cp_subsystems)
    alice_subsystem = owners.index(network.qp.id) if network.qp_is_member else None
    return Session(
        protocol=protocol,
        network=network,
        resource=resource,
        cp_ids=cp_ids,
        cp_subsystems=cp_subsystems,
        cp_dims=cp_dims,
        alice_subsystem=alice_subsystem,
        support=frozenset(support(resource.state)),
    )


@dataclass(frozen=True, slots=True)
class RoundRecord:
    """Everything one round produced; CP-indexed fields follow session.cp_ids."""

    index: int
    decoy: bool
    actions: tuple[Action, ...]
    choice: AliceChoice
    reported: tuple[int | None, ...]
    true_outcomes: tuple[int | None, ...]
    alice_outcomes: tuple[int, ...] | None
    projective_pass: bool | None
    decoy_sent: tuple[int, ...] | None
    eve_evidence: tuple[int, ...] | None

    def ctrl_set(self, cp_ids: tuple[str, ...]) -> frozenset:
        return frozenset(pid for pid, a in zip(cp_ids, self.actions) if a is Action.CTRL)


@dataclass
class Transcript:
    protocol: ProtocolKind
    network: NetworkSpec
    resource: ResourceState
    cp_ids: tuple[str, ...]
    rounds: list[RoundRecord]
    seed: int | None = None
    strategy: str | None = None

    def compact_rows(self) -> list[str]:
        """One terse line per round: index, actions, choice, outcomes.

        Actions render as C/R per CP in register order; the QP column is
        ``c`` (computational, with her readout) or ``p+``/``p-`` for a
        passed/failed projective test; decoy rounds carry the sent digits.
        """
        lines = []
        for rec in self.rounds:
            actions = "".join("C" if a is Action.CTRL else "R" for a in rec.actions)
            reported = ",".join(
                "-" if v is None else str(v) for v in rec.reported
            )
            if rec.choice is AliceChoice.COMPUTATIONAL:
                alice = "c:" + ",".join(str(v) for v in rec.alice_outcomes)
            else:
                alice = "p+" if rec.projective_pass else "p-"
            row = f"{rec.index} {actions} {alice} cp={reported}"
            if rec.decoy:
                row += " decoy=" + ",".join(str(v) for v in rec.decoy_sent)
            lines.append(row)
        return lines


def _apply_taps(
    state: QuditState,
    session: Session,
    eve: EveStrategy | None,
    leg: str,
    evidence: dict,
    ancillas: dict,
    rng: np.random.Generator | None,
) -> QuditState:
    if eve is None or not eve.touches_state:
        return state
    from .adversary import apply_tap

    for target in eve.targets:
        sub = session.cp_subsystems[session.cp_ids.index(target)]
        result = apply_tap(eve, state, target, sub, leg, rng)
        state = result.state
        if result.measured is not None:
            evidence[(target, leg)] = result.measured
        if result.ancilla_index is not None:
            ancillas[(target, leg)] = result.ancilla_index
    return state


def _report(
    eve: EveStrategy | None, pid: str, true_value: int, dim: int, rng: np.random.Generator
) -> int:
    if (
        eve is not None
        and eve.kind is AttackKind.LYING_PARTICIPANT
        and pid in eve.targets
    ):
        return lying_policy_apply(eve.lying_policy, true_value, dim, rng)
    return true_value


def run_round(
    session: Session,
    actions: tuple[Action, ...],
    choice: AliceChoice,
    eve: EveStrategy | None,
    rng: np.random.Generator,
    *,
    index: int = 0,
    decoy_sent: tuple[int, ...] | None = None,
) -> RoundRecord:
    """Execute one round; ``decoy_sent`` replaces the resource state with a
    known computational-basis product (one digit per register subsystem)."""
    if decoy_sent is not None:
        state = basis_state(session.resource.state.dims, decoy_sent)
        choice = AliceChoice.COMPUTATIONAL
    else:
        state = session.resource.state

    evidence: dict = {}
    ancillas: dict = {}
    state = _apply_taps(state, session, eve, "forward", evidence, ancillas, rng)

    true_outcomes: list[int | None] = [None] * len(session.cp_ids)
    reported: list[int | None] = [None] * len(session.cp_ids)
    for i, (pid, action) in enumerate(zip(session.cp_ids, actions)):
        if action is Action.CTRL:
            outcomes, state, _ = measure_computational(state, (session.cp_subsystems[i],), rng)
            true_outcomes[i] = int(outcomes[0])
            reported[i] = _report(eve, pid, true_outcomes[i], session.cp_dims[i], rng)

    state = _apply_taps(state, session, eve, "backward", evidence, ancillas, rng)

    alice_outcomes: tuple[int, ...] | None = None
    projective_pass: bool | None = None
    register = tuple(range(len(session.resource.owners)))
    if choice is AliceChoice.COMPUTATIONAL:
        outcomes, state, _ = measure_computational(state, register, rng)
        alice_outcomes = tuple(int(o) for o in outcomes)
    else:
        success, pass_state, fail_state = project_onto(state, session.resource.state)
        projective_pass = bool(rng.random() < success)
        branch = pass_state if projective_pass else fail_state
        state = branch if branch is not None else (pass_state or fail_state)

    eve_evidence: tuple[int, ...] | None = None
    if eve is not None and eve.touches_state:
        slots = eve.evidence_slots()
        if ancillas:
            anc_targets = tuple(ancillas[slot] for slot in slots if slot in ancillas)
            outcomes, state, _ = measure_computational(state, anc_targets, rng)
            for slot, value in zip((s for s in slots if s in ancillas), outcomes):
                evidence[slot] = int(value)
        eve_evidence = tuple(evidence[slot] for slot in slots)

    return RoundRecord(
        index=index,
        decoy=decoy_sent is not None,
        actions=tuple(actions),
        choice=choice,
        reported=tuple(reported),
        true_outcomes=tuple(true_outcomes),
        alice_outcomes=alice_outcomes,
        projective_pass=projective_pass,
        decoy_sent=decoy_sent,
        eve_evidence=eve_evidence,
    )


def run_decoy_round(
    session: Session,
    target_cp: str,
    basis_state_index: int,
    rng: np.random.Generator,
    eve: EveStrategy | None = None,
    *,
    index: int = 0,
) -> RoundRecord:
    """Send known computational-basis states to expose misreporting CPs.

    The target CP receives |basis_state_index>; every other register
    subsystem gets an independently drawn known basis state.  A truthful
    CTRL report must equal the sent digit, and a reflected decoy comes back
    unchanged on an ideal channel.
    """
    if target_cp not in session.cp_ids:
        raise ValueError(f"{target_cp!r} is not a CP of this session")
    dims = session.resource.state.dims
    target_sub = session.cp_subsystems[session.cp_ids.index(target_cp)]
    if not 0 <= basis_state_index < dims[target_sub]:
        raise ValueError(f"basis index {basis_state_index} out of range")
    sent = [int(rng.integers(d)) for d in dims]
    sent[target_sub] = basis_state_index
    actions = tuple(
        Action.CTRL if rng.random() < 0.5 else Action.REFLECT for _ in session.cp_ids
    )
    return run_round(
        session,
        actions,
        AliceChoice.COMPUTATIONAL,
        eve,
        rng,
        index=index,
        decoy_sent=tuple(sent),
    )


@dataclass(frozen=True)
class SessionConfig:
    protocol: ProtocolKind
    network: NetworkSpec
    rounds: int
    seed: int
    eve: EveStrategy | None = None
    decoy_rate: float | None = None
    alice_computational_prob: float = 0.5

    def resolved_decoy_rate(self) -> float:
        if self.decoy_rate is not None:
            return self.decoy_rate
        return 0.05 if self.protocol in (ProtocolKind.LSQSS, ProtocolKind.ILSKSS) else 0.0


def run_session(config: SessionConfig) -> Transcript:
    """Run independent rounds with one counter-based stream per round."""
    if config.rounds < 1:
        raise ValueError("rounds must be >= 1")
    protocol = ProtocolKind(config.protocol)
    decoy_rate = config.resolved_decoy_rate()
    if decoy_rate > 0 and protocol is ProtocolKind.LSQKD:
        raise ValueError("decoy rounds are a secret-sharing feature; not used for lsqkd")
    session = make_session(protocol, config.network)
    rounds: list[RoundRecord] = []
    for i in range(config.rounds):
        rng = round_rng(config.seed, i)
        is_decoy = decoy_rate > 0 and rng.random() < decoy_rate
        if is_decoy:
            target_idx = int(rng.integers(len(session.cp_ids)))
            target = session.cp_ids[target_idx]
            digit = int(rng.integers(session.cp_dims[target_idx]))
            rec = run_decoy_round(session, target, digit, rng, eve=config.eve, index=i)
        else:
            actions = tuple(
                Action.CTRL if rng.random() < 0.5 else Action.REFLECT for _ in session.cp_ids
            )
            choice = (
                AliceChoice.COMPUTATIONAL
                if rng.random() < config.alice_computational_prob
                else AliceChoice.PROJECTIVE
            )
            rec = run_round(session, actions, choice, config.eve, rng, index=i)
        rounds.append(rec)
    return Transcript(
        protocol=protocol,
        network=config.network,
        resource=session.resource,
        cp_ids=session.cp_ids,
        rounds=rounds,
        seed=config.seed,
        strategy=config.eve.describe() if config.eve is not None else None,
    )


# -- sifting ------------------------------------------------------------------


@dataclass
class DecoyCpStat:
    ctrl_checked: int = 0
    ctrl_mismatch: int = 0
    reflect_checked: int = 0
    reflect_mismatch: int = 0


@dataclass(frozen=True, slots=True)
class GenerationRound:
    round_index: int
    outcomes: tuple[tuple[str, int], ...]  # (participant, symbol) for layer members

    def value(self, pid: str) -> int:
        for q, v in self.outcomes:
            if q == pid:
                return v
        raise KeyError(pid)


@dataclass
class SiftedData:
    total_rounds: int = 0
    projective_tests: int = 0
    projective_failures: int = 0
    support_tests: int = 0
    support_violations: int = 0
    ctrl_checked_rounds: int = 0
    ctrl_mismatch_rounds: int = 0
    decoy_rounds: int = 0
    decoy_checks: int = 0
    decoy_mismatches: int = 0
    decoy_mismatch_rounds: int = 0
    decoy_per_cp: dict = field(default_factory=dict)
    generation: dict = field(default_factory=dict)
    discarded: int = 0

    def rate(self, failures: int, total: int) -> float:
        return failures / total if total else 0.0


def _layer_members_with_values(
    transcript: Transcript, layer_members: tuple[str, ...], rec: RoundRecord
) -> tuple[tuple[str, int], ...]:
    values = []
    qp = transcript.network.qp.id
    owners = transcript.resource.owners
    for pid in layer_members:
        if pid == qp:
            values.append((pid, rec.alice_outcomes[owners.index(pid)]))
        else:
            values.append((pid, rec.reported[transcript.cp_ids.index(pid)]))
    return tuple(values)


def sift(transcript: Transcript) -> SiftedData:
    """Classify rounds after the public reveal of actions and basis choices.

    Test rounds are the all-Reflect rounds (projective outcome, or support
    membership when the QP measured computationally).  A round generates a
    symbol for every layer whose CPs all performed CTRL while the QP
    measured computationally; rounds where only part of a layer performed
    CTRL are discarded for that layer.  Decoy rounds are checked against
    the known sent digits and never generate.
    """
    data = SiftedData(total_rounds=len(transcript.rounds))
    net = transcript.network
    cp_ids = transcript.cp_ids
    cp_subsystems = tuple(transcript.resource.owners.index(pid) for pid in cp_ids)
    state_support = support(transcript.resource.state)
    layers = {l.id: l.members for l in net.layers}
    data.generation = {lid: [] for lid in layers}
    data.decoy_per_cp = {pid: DecoyCpStat() for pid in cp_ids}

    for rec in transcript.rounds:
        if rec.decoy:
            data.decoy_rounds += 1
            round_clean = True
            for i, pid in enumerate(cp_ids):
                sent = rec.decoy_sent[cp_subsystems[i]]
                stat = data.decoy_per_cp[pid]
                if rec.actions[i] is Action.CTRL:
                    stat.ctrl_checked += 1
                    ok = rec.reported[i] == sent
                    stat.ctrl_mismatch += 0 if ok else 1
                else:
                    stat.reflect_checked += 1
                    ok = rec.alice_outcomes[cp_subsystems[i]] == sent
                    stat.reflect_mismatch += 0 if ok else 1
                data.decoy_checks += 1
                data.decoy_mismatches += 0 if ok else 1
                round_clean = round_clean and ok
            data.decoy_mismatch_rounds += 0 if round_clean else 1
            continue

        ctrl_idx = [i for i, a in enumerate(rec.actions) if a is Action.CTRL]
        if not ctrl_idx:
            if rec.choice is AliceChoice.PROJECTIVE:
                data.projective_tests += 1
                data.projective_failures += 0 if rec.projective_pass else 1
            else:
                data.support_tests += 1
                data.support_violations += 0 if rec.alice_outcomes in state_support else 1
            continue

        if rec.choice is AliceChoice.PROJECTIVE:
            data.discarded += 1
            continue

        data.ctrl_checked_rounds += 1
        mismatch = any(
            rec.alice_outcomes[cp_subsystems[i]] != rec.reported[i] for i in ctrl_idx
        )
        data.ctrl_mismatch_rounds += 1 if mismatch else 0

        generated = False
        ctrl_set = {cp_ids[i] for i in ctrl_idx}
        for lid, members in layers.items():
            member_cps = {m for m in members if m != net.qp.id}
            if member_cps <= ctrl_set:
                data.generation[lid].append(
                    GenerationRound(rec.index, _layer_members_with_values(transcript, members, rec))
                )
                generated = True
        if not generated:
            data.discarded += 1

    return data


# -- key and secret derivation ------------------------------------------------


def routed_bit(network: NetworkSpec, pid: str, layer_id: int, outcome: int) -> int:
    """The bit of a participant's outcome serving the given layer.

    Outcomes expand big-endian over a participant's ascending layer ids: with
    l memberships, the coefficient of 2**(l-r) serves the r-th layer.
    """
    memberships = network.layers_of(pid)
    r = memberships.index(layer_id) + 1
    return (outcome >> (len(memberships) - r)) & 1


def layer_rule(
    network: NetworkSpec, protocol: ProtocolKind, layer_id: int
) -> tuple[str, tuple[str, ...]]:
    """('identity', members) for plain keys, ('xor', holders) for shares."""
    members = network.layer(layer_id).members
    if protocol is ProtocolKind.LSQKD:
        return "identity", members
    if protocol is ProtocolKind.LSQSS:
        return "xor", members
    kind = network.layer_kind(layer_id)
    if kind == "honest":
        return "identity", members
    if kind == "dishonest":
        return "xor", members
    dishonest = tuple(
        m for m in members if network.participant(m).honesty is Honesty.DISHONEST
    )
    return "xor", dishonest


@dataclass
class LayerKeyMaterial:
    layer_id: int
    members: tuple[str, ...]
    rule: str
    rule_participants: tuple[str, ...]
    streams: dict
    reconstructed: list[int]

    def key_stream(self) -> list[int]:
        """The symbol stream the layer actually shares.

        Identity layers: the common bit stream (first CP member's view);
        share layers: the XOR reconstruction, which for a mixed layer equals
        the honest members' direct bits.
        """
        if self.rule == "identity":
            return self.reconstructed
        honest_holders = [m for m in self.members if m not in self.rule_participants]
        if honest_holders:
            return self.streams[honest_holders[0]]
        return self.reconstructed

    def bitstring(self) -> str:
        return "".join(str(b) for b in self.key_stream())


@dataclass
class KeyMaterial:
    layers: dict

    def layer(self, layer_id: int) -> LayerKeyMaterial:
        return self.layers[layer_id]


def derive_keys(
    sifted: SiftedData, network: NetworkSpec, protocol: ProtocolKind | str
) -> KeyMaterial:
    """Route each member's outcome bits to their layers and combine.

    Every generation-round outcome b of a participant with l memberships
    expands as b = sum 2**m b_m; bit b_m serves the participant's
    (l - m)-th layer.  Identity layers use the bits directly; share layers
    XOR the holders' bits.
    """
    protocol = ProtocolKind(protocol)
    material = {}
    for lid, gen_rounds in sifted.generation.items():
        members = network.layer(lid).members
        rule, holders = layer_rule(network, protocol, lid)
        streams: dict[str, list[int]] = {m: [] for m in members}
        reconstructed: list[int] = []
        for gen in gen_rounds:
            for pid in members:
                value = gen.value(pid)
                if value is None:
                    raise ValueError(
                        f"round {gen.round_index}: member {pid!r} has no outcome"
                    )
                streams[pid].append(routed_bit(network, pid, lid, value))
            if rule == "identity":
                first_cp = next(m for m in members if m != network.qp.id)
                reconstructed.append(streams[first_cp][-1])
            else:
                acc = 0
                for pid in holders:
                    acc ^= streams[pid][-1]
                reconstructed.append(acc)
        material[lid] = LayerKeyMaterial(
            layer_id=lid,
            members=members,
            rule=rule,
            rule_participants=holders,
            streams=streams,
            reconstructed=reconstructed,
        )
    return KeyMaterial(layers=material)


@dataclass(frozen=True)
class EavesdropVerdict:
    passed: bool
    rates: dict
    counts: dict

    def __bool__(self) -> bool:
        return self.passed


def detect_eavesdropping(sifted: SiftedData, tolerance: float = 0.0) -> EavesdropVerdict:
    """Fail when any test-round statistic exceeds the tolerated rate.

    The verdict uses the three statistics the reconciliation phase defines:
    projective-test failures, support violations on all-Reflect
    computational rounds, and decoy mismatches.  CTRL-report mismatches are
    tracked in the sift for the analyzers but do not gate the verdict.
    """
    rates = {
        "projective_failure": sifted.rate(sifted.projective_failures, sifted.projective_tests),
        "support_violation": sifted.rate(sifted.support_violations, sifted.support_tests),
        "decoy_mismatch": sifted.rate(sifted.decoy_mismatches, sifted.decoy_checks),
    }
    counts = {
        "projective_tests": sifted.projective_tests,
        "projective_failures": sifted.projective_failures,
        "support_tests": sifted.support_tests,
        "support_violations": sifted.support_violations,
        "decoy_checks": sifted.decoy_checks,
        "decoy_mismatches": sifted.decoy_mismatches,
        "ctrl_checked_rounds": sifted.ctrl_checked_rounds,
        "ctrl_mismatch_rounds": sifted.ctrl_mismatch_rounds,
    }
    passed = all(rate <= tolerance for rate in rates.values())
    return EavesdropVerdict(passed=passed, rates=rates, counts=counts)


# -- two-party baseline (sqkd07) ----------------------------------------------


class PrepBasis(str, Enum):
    Z = "z"
    X = "x"


@dataclass(frozen=True, slots=True)
class Sqkd07Round:
    index: int
    basis: PrepBasis
    bit: int
    action: Action
    bob_outcome: int | None
    alice_outcome: int


@dataclass
class Sqkd07Transcript:
    rounds: list
    seed: int
    eavesdropped: bool


_HADAMARD = UnitaryMatrix(np.array([[1, 1], [1, -1]]) / np.sqrt(2), (2,))


def _prep_qubit(basis: PrepBasis, bit: int) -> QuditState:
    if basis is PrepBasis.Z:
        return basis_state((2,), (bit,))
    sign = 1.0 if bit == 0 else -1.0
    return make_state((2,), np.array([1.0, sign]))


def _measure_in_basis(
    state: QuditState, basis: PrepBasis, rng: np.random.Generator
) -> tuple[int, QuditState]:
    if basis is PrepBasis.X:
        state = apply_unitary(state, (0,), _HADAMARD)
    outcomes, state, _ = measure_computational(state, (0,), rng)
    if basis is PrepBasis.X:
        state = apply_unitary(state, (0,), _HADAMARD)
    return int(outcomes[0]), state


def run_sqkd07(rounds: int, eve: bool = False, seed: int = 0) -> Sqkd07Transcript:
    """Two-party baseline: random Z/X preparation against a CTRL/Reflect CP.

    With ``eve`` set, an interceptor measures the traveling qubit in a
    uniformly random basis each round and resends the collapsed state; on
    Reflect rounds with X-basis preparation this shows up as a 1/4 error
    rate in the QP's re-measurement.
    """
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    records = []
    for i in range(rounds):
        rng = round_rng(seed, i)
        basis = PrepBasis.Z if rng.random() < 0.5 else PrepBasis.X
        bit = int(rng.integers(2))
        state = _prep_qubit(basis, bit)
        if eve:
            eve_basis = PrepBasis.Z if rng.random() < 0.5 else PrepBasis.X
            _, state = _measure_in_basis(state, eve_basis, rng)
        action = Action.CTRL if rng.random() < 0.5 else Action.REFLECT
        bob_outcome = None
        if action is Action.CTRL:
            outcomes, state, _ = measure_computational(state, (0,), rng)
            bob_outcome = int(outcomes[0])
        alice_outcome, _ = _measure_in_basis(state, basis, rng)
        records.append(
            Sqkd07Round(
                index=i,
                basis=basis,
                bit=bit,
                action=action,
                bob_outcome=bob_outcome,
                alice_outcome=alice_outcome,
            )
        )
    return Sqkd07Transcript(rounds=records, seed=seed, eavesdropped=eve)


@dataclass
class Sqkd07Sifted:
    reflect_tests: dict
    reflect_errors: dict
    key_alice: list
    key_bob: list

    def error_rate(self, basis: PrepBasis) -> float:
        total = self.reflect_tests[basis]
        return self.reflect_errors[basis] / total if total else 0.0


def sift_sqkd07(transcript: Sqkd07Transcript) -> Sqkd07Sifted:
    """Reflect rounds test the channel; CTRL + Z-preparation rounds key."""
    tests = {PrepBasis.Z: 0, PrepBasis.X: 0}
    errors = {PrepBasis.Z: 0, PrepBasis.X: 0}
    key_alice: list[int] = []
    key_bob: list[int] = []
    for rec in transcript.rounds:
        if rec.action is Action.REFLECT:
            tests[rec.basis] += 1
            errors[rec.basis] += 0 if rec.alice_outcome == rec.bit else 1
        elif rec.basis is PrepBasis.Z:
            key_alice.append(rec.alice_outcome)
            key_bob.append(rec.bob_outcome)
    return Sqkd07Sifted(
        reflect_tests=tests, reflect_errors=errors, key_alice=key_alice, key_bob=key_bob
    )
