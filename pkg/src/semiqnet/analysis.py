"""Exact and Monte Carlo analysis of detection, confidentiality, and rates.

The exact evaluator enumerates every CTRL/Reflect combination with its
occurrence probability, evolves the joint participant+Eve state per
combination (interceptions become explicit measurement branches), and
computes the conditional detection probability of each round class:

* ``ctrl_mismatch``      - some CTRL report disagrees with the QP's readout,
* ``reflect_computational`` - an all-Reflect computational readout falls
  outside the resource state's support,
* ``reflect_projective`` - the all-Reflect projective test fails.

The same machinery yields Eve's exact maximum-a-posteriori accuracy per
layer, and closed-form expressions built directly from the attack-unitary
matrix elements provide an independent cross-check for two-way entangling
strategies.  Monte Carlo counterparts tally the identical statistics from
sampled sessions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

from .adversary import AttackKind, EveStrategy, apply_tap, lying_match_probability
from .network import NetworkSpec
from .protocol import (
    AliceChoice,
    Session,
    SessionConfig,
    Transcript,
    derive_keys,
    layer_rule,
    make_session,
    routed_bit,
    run_session,
    sift,
)
from .qudit import (
    QuditState,
    UnitaryMatrix,
    outcome_distribution,
    project_onto,
    project_outcome,
    support,
)
from .synthesis import ProtocolKind

AMPLITUDE_CAP = 1 << 22

CLASS_CTRL = "ctrl_mismatch"
CLASS_REFLECT_COMP = "reflect_computational"
CLASS_REFLECT_PROJ = "reflect_projective"


class AnalysisError(ValueError):
    pass


def cumulative_detection(p: float, l: int) -> float:
    """Probability of at least one detection in l independent rounds."""
    if not 0.0 <= p <= 1.0:
        raise AnalysisError(f"per-round probability must be in [0, 1], got {p}")
    if l < 0:
        raise AnalysisError("round count must be >= 0")
    return 1.0 - (1.0 - p) ** l


def entropy_bits(stream: Sequence[int]) -> float:
    """Empirical Shannon entropy of a symbol stream, in bits."""
    if len(stream) == 0:
        raise AnalysisError("cannot compute the entropy of an empty stream")
    _, counts = np.unique(np.asarray(stream), return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


# -- detection reports ---------------------------------------------------------


@dataclass
class ClassStat:
    probability: float
    events: int | None = None
    rounds: int | None = None
    stderr: float | None = None

    @classmethod
    def from_counts(cls, events: int, rounds: int) -> "ClassStat":
        p = events / rounds if rounds else 0.0
        se = math.sqrt(p * (1.0 - p) / rounds) if rounds else 0.0
        return cls(probability=p, events=events, rounds=rounds, stderr=se)


@dataclass
class DetectionReport:
    source: str  # "exact" | "sampled"
    protocol: ProtocolKind
    strategy: str | None
    classes: dict
    overall: float
    combo_detection: dict = field(default_factory=dict)
    combo_probability: dict = field(default_factory=dict)
    decoy_ctrl_mismatch: dict = field(default_factory=dict)

    def combo(self, ctrl_ids: Iterable[str], choice: AliceChoice) -> float:
        key = (frozenset(ctrl_ids), AliceChoice(choice))
        return self.combo_detection[key]

    def cumulative(self, class_name: str, l: int) -> float:
        return cumulative_detection(self.classes[class_name].probability, l)


# -- exact evolution over one action combination -------------------------------


@dataclass
class _Leaf:
    prob: float
    state: QuditState
    ctrl: dict
    evidence: dict


def _tap_leaves(
    leaves: Iterator[_Leaf], session: Session, eve: EveStrategy, leg: str
) -> Iterator[_Leaf]:
    """Apply one leg of Eve's taps; interception fans out into branches."""
    for leaf in leaves:
        stack = [leaf]
        for target in eve.targets:
            sub = session.cp_subsystems[session.cp_ids.index(target)]
            next_stack = []
            for item in stack:
                if eve.kind is AttackKind.INTERCEPT_RESEND:
                    if (leg == "forward" and not eve.forward) or (
                        leg == "backward" and not eve.backward
                    ):
                        next_stack.append(item)
                        continue
                    for (digit,), p in outcome_distribution(item.state, (sub,)).items():
                        _, post = project_outcome(item.state, (sub,), (digit,))
                        ev = dict(item.evidence)
                        ev[(target, leg)] = digit
                        next_stack.append(_Leaf(item.prob * p, post, dict(item.ctrl), ev))
                else:
                    result = apply_tap(eve, item.state, target, sub, leg, rng=None)
                    item.state = result.state
                    next_stack.append(item)
            stack = next_stack
        yield from stack


def _ctrl_leaves(
    leaves: Iterator[_Leaf], session: Session, ctrl_ids: tuple[str, ...]
) -> Iterator[_Leaf]:
    """Branch over the joint CTRL measurement outcomes."""
    subs = tuple(session.cp_subsystems[session.cp_ids.index(pid)] for pid in ctrl_ids)
    for leaf in leaves:
        if not ctrl_ids:
            yield leaf
            continue
        for digits, p in outcome_distribution(leaf.state, subs).items():
            _, post = project_outcome(leaf.state, subs, digits)
            ctrl = dict(leaf.ctrl)
            ctrl.update(zip(ctrl_ids, digits))
            yield _Leaf(leaf.prob * p, post, ctrl, dict(leaf.evidence))


def _evolve_combo(
    session: Session, eve: EveStrategy | None, ctrl_ids: tuple[str, ...]
) -> Iterator[_Leaf]:
    """Leaves of one action combination: (probability, state, records).

    Entangling taps keep the ancillas in the state (appended subsystems, in
    the strategy's evidence-slot order); interception and CTRL measurements
    are explicit branches.
    """
    leaves: Iterator[_Leaf] = iter(
        [_Leaf(1.0, session.resource.state, {}, {})]
    )
    if eve is not None and eve.touches_state:
        leaves = _tap_leaves(leaves, session, eve, "forward")
    leaves = _ctrl_leaves(leaves, session, ctrl_ids)
    if eve is not None and eve.touches_state:
        leaves = _tap_leaves(leaves, session, eve, "backward")
    return leaves


def _register_amplitudes(network: NetworkSpec, eve: EveStrategy | None) -> int:
    total = 1
    for pid in network.register_order():
        total *= 2 ** network.membership_count(pid)
    if eve is not None and eve.touches_state and eve.kind is not AttackKind.INTERCEPT_RESEND:
        for target, leg in eve.evidence_slots():
            table = eve.forward_unitaries if leg == "forward" else eve.backward_unitaries
            total *= table[target].acting_dims[1]
    return total


def _check_register_cap(network: NetworkSpec, eve: EveStrategy | None) -> None:
    total = _register_amplitudes(network, eve)
    if total > AMPLITUDE_CAP:
        raise AnalysisError(
            f"joint register needs {total} amplitudes, above the exact-path cap "
            f"{AMPLITUDE_CAP}; use the sampled estimators"
        )


def _support_pass_probability(
    state: QuditState, register_size: int, support_flat: np.ndarray
) -> float:
    reg_total = int(np.prod(state.dims[:register_size]))
    probs = (np.abs(state.amps) ** 2).reshape(reg_total, -1).sum(axis=1)
    return float(probs[support_flat].sum())


def _match_probability(state: QuditState, subs: tuple[int, ...], digits: tuple[int, ...]) -> float:
    prob, _ = project_outcome(state, subs, digits)
    return prob


def exact_detection(
    protocol: ProtocolKind | str,
    network: NetworkSpec,
    strategy: EveStrategy | None,
    *,
    workers: int = 1,
) -> DetectionReport:
    """Deterministic per-round detection probabilities by round class.

    Enumerates the CTRL/Reflect combinations of all CPs and the QP's basis
    choice; combinations where part of the CPs measured while the QP chose
    the projective test are discarded in sifting and contribute nothing.
    """
    protocol = ProtocolKind(protocol)
    if protocol is ProtocolKind.SQKD07:
        raise AnalysisError("the two-party baseline has no layered exact evaluator")
    if strategy is None or strategy.kind is not AttackKind.LYING_PARTICIPANT:
        _check_register_cap(network, strategy)
    session = make_session(protocol, network)
    if strategy is not None and strategy.kind is AttackKind.LYING_PARTICIPANT:
        return _exact_detection_lying(protocol, session, strategy)

    cps = session.cp_ids
    n = len(cps)
    register = tuple(range(len(session.resource.owners)))
    support_flat = np.array(
        sorted(
            session.resource.state.index_of(outcome)
            for outcome in support(session.resource.state)
        ),
        dtype=np.int64,
    )

    def combo_events(ctrl_ids: tuple[str, ...]) -> tuple[float, float]:
        """(computational-class detection, projective detection)."""
        comp_det = 0.0
        proj_det = 0.0
        ctrl_subs = tuple(session.cp_subsystems[cps.index(pid)] for pid in ctrl_ids)
        for leaf in _evolve_combo(session, strategy, ctrl_ids):
            if ctrl_ids:
                digits = tuple(leaf.ctrl[pid] for pid in ctrl_ids)
                comp_det += leaf.prob * (
                    1.0 - _match_probability(leaf.state, ctrl_subs, digits)
                )
            else:
                comp_det += leaf.prob * (
                    1.0
                    - _support_pass_probability(leaf.state, len(register), support_flat)
                )
                success, _, _ = project_onto(leaf.state, session.resource.state)
                proj_det += leaf.prob * (1.0 - success)
        return comp_det, proj_det

    subsets = [
        tuple(pid for pid in cps if pid in combo)
        for r in range(n + 1)
        for combo in map(frozenset, combinations(cps, r))
    ]
    subsets = sorted(set(subsets), key=lambda s: (len(s), s))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(combo_events, subsets))
    else:
        results = [combo_events(s) for s in subsets]

    combo_det: dict = {}
    combo_prob: dict = {}
    p_action = 0.5**n
    ctrl_class_num = ctrl_class_den = 0.0
    reflect_comp = reflect_proj = 0.0
    overall = 0.0
    for ctrl_ids, (comp_det, proj_det) in zip(subsets, results):
        key_c = (frozenset(ctrl_ids), AliceChoice.COMPUTATIONAL)
        key_p = (frozenset(ctrl_ids), AliceChoice.PROJECTIVE)
        combo_det[key_c] = comp_det
        combo_prob[key_c] = p_action * 0.5
        combo_prob[key_p] = p_action * 0.5
        overall += p_action * 0.5 * comp_det
        if ctrl_ids:
            ctrl_class_num += p_action * 0.5 * comp_det
            ctrl_class_den += p_action * 0.5
            combo_det[key_p] = float("nan")  # discarded in sifting
        else:
            reflect_comp = comp_det
            reflect_proj = proj_det
            combo_det[key_p] = proj_det
            overall += p_action * 0.5 * proj_det

    classes = {
        CLASS_CTRL: ClassStat(ctrl_class_num / ctrl_class_den if ctrl_class_den else 0.0),
        CLASS_REFLECT_COMP: ClassStat(reflect_comp),
        CLASS_REFLECT_PROJ: ClassStat(reflect_proj),
    }
    return DetectionReport(
        source="exact",
        protocol=protocol,
        strategy=strategy.describe() if strategy else None,
        classes=classes,
        overall=overall,
        combo_detection=combo_det,
        combo_probability=combo_prob,
    )


def _exact_detection_lying(
    protocol: ProtocolKind, session: Session, strategy: EveStrategy
) -> DetectionReport:
    """Misreporting CPs leave the state untouched; mismatch odds are combinatorial."""
    cps = session.cp_ids
    n = len(cps)
    match = {}
    for pid, dim in zip(cps, session.cp_dims):
        match[pid] = (
            lying_match_probability(strategy.lying_policy, dim)
            if pid in strategy.targets
            else 1.0
        )
    combo_det: dict = {}
    combo_prob: dict = {}
    ctrl_num = ctrl_den = 0.0
    overall = 0.0
    p_action = 0.5**n
    for r in range(n + 1):
        for combo in combinations(cps, r):
            det = 1.0 - math.prod(match[pid] for pid in combo) if combo else 0.0
            key_c = (frozenset(combo), AliceChoice.COMPUTATIONAL)
            key_p = (frozenset(combo), AliceChoice.PROJECTIVE)
            combo_det[key_c] = det
            combo_det[key_p] = float("nan") if combo else 0.0
            combo_prob[key_c] = combo_prob[key_p] = p_action * 0.5
            overall += p_action * 0.5 * det
            if combo:
                ctrl_num += p_action * 0.5 * det
                ctrl_den += p_action * 0.5
    decoy = {
        pid: 1.0 - match[pid]
        for pid in strategy.targets
    }
    classes = {
        CLASS_CTRL: ClassStat(ctrl_num / ctrl_den if ctrl_den else 0.0),
        CLASS_REFLECT_COMP: ClassStat(0.0),
        CLASS_REFLECT_PROJ: ClassStat(0.0),
    }
    return DetectionReport(
        source="exact",
        protocol=protocol,
        strategy=strategy.describe(),
        classes=classes,
        overall=overall,
        combo_detection=combo_det,
        combo_probability=combo_prob,
        decoy_ctrl_mismatch=decoy,
    )


def sampled_detection(
    protocol: ProtocolKind | str,
    network: NetworkSpec,
    strategy: EveStrategy | None,
    rounds: int,
    seed: int,
    *,
    decoy_rate: float | None = None,
) -> DetectionReport:
    """Monte Carlo estimate of the same per-class statistics."""
    config = SessionConfig(
        protocol=ProtocolKind(protocol),
        network=network,
        rounds=rounds,
        seed=seed,
        eve=strategy,
        decoy_rate=decoy_rate,
    )
    transcript = run_session(config)
    return detection_from_sift(ProtocolKind(protocol), strategy, sift(transcript))


def detection_from_sift(
    protocol: ProtocolKind, strategy: EveStrategy | None, sifted
) -> DetectionReport:
    """Per-class frequencies from an already sifted transcript."""
    classes = {
        CLASS_CTRL: ClassStat.from_counts(
            sifted.ctrl_mismatch_rounds, sifted.ctrl_checked_rounds
        ),
        CLASS_REFLECT_COMP: ClassStat.from_counts(
            sifted.support_violations, sifted.support_tests
        ),
        CLASS_REFLECT_PROJ: ClassStat.from_counts(
            sifted.projective_failures, sifted.projective_tests
        ),
    }
    events = (
        sifted.projective_failures
        + sifted.support_violations
        + sifted.ctrl_mismatch_rounds
        + sifted.decoy_mismatch_rounds
    )
    decoy = {
        pid: stat.ctrl_mismatch / stat.ctrl_checked
        for pid, stat in sifted.decoy_per_cp.items()
        if stat.ctrl_checked
    }
    return DetectionReport(
        source="sampled",
        protocol=protocol,
        strategy=strategy.describe() if strategy else None,
        classes=classes,
        overall=events / sifted.total_rounds if sifted.total_rounds else 0.0,
        decoy_ctrl_mismatch=decoy,
    )


# -- closed forms from attack-matrix elements ----------------------------------


def forward_injections(u: UnitaryMatrix) -> list[np.ndarray]:
    """Eve's post-interaction ancilla states e_i with |i>|0> -> |i>|e_i>.

    Valid only for forward unitaries diagonal in the system basis; raises
    otherwise, because the closed-form expressions presuppose that shape.
    """
    d, a = u.acting_dims
    out = []
    for i in range(d):
        col = u.matrix[:, i * a].reshape(d, a)
        off = np.delete(col, i, axis=0)
        if np.abs(off).max() > 1e-12:
            raise AnalysisError(
                "closed forms need a forward unitary diagonal in the system basis"
            )
        out.append(col[i].copy())
    return out


def return_injections(u: UnitaryMatrix) -> list[list[np.ndarray]]:
    """Unnormalized ancilla states f[i][j] with |i>|0> -> sum_j |j>|f_ij>."""
    d, a = u.acting_dims
    return [[u.matrix[:, i * a].reshape(d, a)[j].copy() for j in range(d)] for i in range(d)]


def _leg_vectors(strategy: EveStrategy, target: str) -> tuple[list, list]:
    if strategy.forward:
        e = forward_injections(strategy.forward_unitaries[target])
    else:
        d = strategy.backward_unitaries[target].acting_dims[0]
        e = [np.array([1.0 + 0j]) for _ in range(d)]
    if strategy.backward:
        f = return_injections(strategy.backward_unitaries[target])
    else:
        d = len(e)
        f = [
            [np.array([1.0 + 0j]) if j == i else np.array([0.0j]) for j in range(d)]
            for i in range(d)
        ]
    return e, f


def _norm2(vec: np.ndarray) -> float:
    return float(np.real(np.vdot(vec, vec)))


def closed_form_lsqkd_low_layer(strategy: EveStrategy) -> dict:
    """Two-way attack on the two-level CP of the three-party key network."""
    (target,) = strategy.targets
    e, f = _leg_vectors(strategy, target)
    ctrl = 0.5 * (_norm2(f[0][1]) + _norm2(f[1][0]))
    reflect_comp = 0.5 * (
        _norm2(np.kron(e[0], f[0][1])) + _norm2(np.kron(e[1], f[1][0]))
    )
    reflect_proj = 1.0 - 0.25 * _norm2(np.kron(e[0], f[0][0]) + np.kron(e[1], f[1][1]))
    return {CLASS_CTRL: ctrl, CLASS_REFLECT_COMP: reflect_comp, CLASS_REFLECT_PROJ: reflect_proj}


def closed_form_lsqkd_both_layers(strategy: EveStrategy) -> dict:
    """Two-way attack on the four-level CP belonging to both layers."""
    (target,) = strategy.targets
    e, f = _leg_vectors(strategy, target)
    ctrl = 0.25 * sum(_norm2(f[i][j]) for i in range(4) for j in range(4) if j != i)
    reflect_comp = 0.25 * sum(
        _norm2(np.kron(e[i], f[i][j])) for i in range(4) for j in range(4) if j != i
    )
    reflect_proj = 1.0 - _norm2(
        sum(np.kron(e[i], f[i][i]) for i in range(4))
    ) / 16.0
    return {CLASS_CTRL: ctrl, CLASS_REFLECT_COMP: reflect_comp, CLASS_REFLECT_PROJ: reflect_proj}


def closed_form_lsqss_pair(strategy: EveStrategy) -> dict:
    """Two-way attack on both members of a two-CP secret-sharing layer.

    Keys: 'both_ctrl' (both targets measured, QP computational),
    'single_ctrl' (first target measured, second reflected), and the
    all-Reflect projective test.
    """
    t1, t2 = strategy.targets
    e1, f1 = _leg_vectors(strategy, t1)
    e2, f2 = _leg_vectors(strategy, t2)
    both = 1.0 - sum(
        _norm2(f1[i][i]) * _norm2(f2[j][j]) for i in range(4) for j in range(4)
    ) / 16.0
    single = 0.25 * sum(_norm2(f1[i][j]) for i in range(4) for j in range(4) if j != i)
    amp = sum(
        np.kron(np.kron(e1[i], e2[j]), np.kron(f1[i][k], f2[j][l]))
        for i in range(4)
        for j in range(4)
        for k in range(4)
        for l in range(4)
    )
    reflect_proj = 1.0 - _norm2(amp) / 256.0
    return {"both_ctrl": both, "single_ctrl": single, CLASS_REFLECT_PROJ: reflect_proj}


def closed_form_ilskss_key_leg(strategy: EveStrategy) -> dict:
    """Two-way attack on a two-level CP of the integrated protocol."""
    (target,) = strategy.targets
    e, f = _leg_vectors(strategy, target)
    ctrl = 1.0 - 0.5 * (_norm2(f[0][0]) + _norm2(f[1][1]))
    reflect_comp = 1.0 - 0.5 * (
        _norm2(np.kron(e[0], f[0][0])) + _norm2(np.kron(e[1], f[1][1]))
    )
    reflect_proj = 1.0 - 0.25 * _norm2(np.kron(e[0], f[0][0]) + np.kron(e[1], f[1][1]))
    return {CLASS_CTRL: ctrl, CLASS_REFLECT_COMP: reflect_comp, CLASS_REFLECT_PROJ: reflect_proj}


# -- eavesdropper information --------------------------------------------------


def _true_symbol(network: NetworkSpec, protocol: ProtocolKind, layer_id: int, values: dict) -> int:
    """Layer symbol implied by the CP members' outcomes.

    Identity layers use the first CP member's routed bit (all members agree
    on the resource support); share layers XOR the holders' routed bits.
    """
    rule, holders = layer_rule(network, protocol, layer_id)
    members = network.layer(layer_id).members
    if rule == "identity":
        first_cp = next(m for m in members if m != network.qp.id)
        return routed_bit(network, first_cp, layer_id, values[first_cp])
    acc = 0
    for pid in holders:
        acc ^= routed_bit(network, pid, layer_id, values[pid])
    return acc


@dataclass
class GuessModel:
    """Exact MAP decision tables for Eve over a layer's generation rounds."""

    protocol: ProtocolKind
    layer_id: int
    accuracy: float
    tables: dict  # frozenset(ctrl ids) -> {evidence tuple: guessed symbol}


def build_guess_model(
    protocol: ProtocolKind | str,
    network: NetworkSpec,
    strategy: EveStrategy | None,
    layer_id: int,
) -> GuessModel:
    """Joint (evidence, symbol) distribution over generation rounds, exactly.

    Evidence is the tuple of Eve's records in the strategy's slot order:
    intercepted values and/or computational outcomes of her retained
    ancillas.  The model's accuracy is the exact success probability of the
    maximum-a-posteriori guess; with no usable evidence it degrades to the
    symbol's majority probability.
    """
    protocol = ProtocolKind(protocol)
    _check_register_cap(network, strategy)
    session = make_session(protocol, network)
    members = network.layer(layer_id).members
    layer_cps = tuple(pid for pid in session.cp_ids if pid in members)
    others = tuple(pid for pid in session.cp_ids if pid not in members)
    slots = strategy.evidence_slots() if strategy is not None else ()

    joint: dict = {}
    total = 0.0
    for r in range(len(others) + 1):
        for extra in combinations(others, r):
            ctrl_ids = tuple(pid for pid in session.cp_ids if pid in layer_cps + extra)
            key = frozenset(ctrl_ids)
            for leaf in _evolve_combo(session, strategy, ctrl_ids):
                symbol = _true_symbol(network, protocol, layer_id, leaf.ctrl)
                anc_slots = [s for s in slots if s not in leaf.evidence]
                if anc_slots:
                    # remaining slots are retained ancillas, appended to the
                    # register in slot order during the evolution
                    n_reg = len(session.resource.owners)
                    anc_subs = tuple(range(n_reg, n_reg + len(anc_slots)))
                    dist = outcome_distribution(leaf.state, anc_subs)
                else:
                    dist = {(): 1.0}
                for anc_values, p_anc in dist.items():
                    evidence = []
                    anc_iter = iter(anc_values)
                    for slot in slots:
                        if slot in leaf.evidence:
                            evidence.append(leaf.evidence[slot])
                        else:
                            evidence.append(next(anc_iter))
                    cell = joint.setdefault(key, {}).setdefault(tuple(evidence), {})
                    w = leaf.prob * p_anc
                    cell[symbol] = cell.get(symbol, 0.0) + w
                    total += w

    correct = 0.0
    tables: dict = {}
    for key, by_evidence in joint.items():
        table = {}
        for evidence, by_symbol in by_evidence.items():
            guess = max(sorted(by_symbol), key=lambda s: by_symbol[s])
            table[evidence] = guess
            correct += by_symbol[guess]
        tables[key] = table
    accuracy = correct / total if total else 0.0
    return GuessModel(protocol=protocol, layer_id=layer_id, accuracy=accuracy, tables=tables)


def apply_guess_model(
    model: GuessModel, transcript: Transcript, layer_id: int
) -> tuple[list[int], float]:
    """Run the MAP tables over a transcript's generation rounds."""
    sifted = sift(transcript)
    gen = sifted.generation.get(layer_id, [])
    if not gen:
        raise AnalysisError(f"no generation rounds for layer {layer_id}")
    guesses: list[int] = []
    hits = 0
    for item in gen:
        rec = transcript.rounds[item.round_index]
        key = rec.ctrl_set(transcript.cp_ids)
        evidence = rec.eve_evidence if rec.eve_evidence is not None else ()
        table = model.tables.get(key, {})
        guess = table.get(tuple(evidence))
        if guess is None:
            guess = 0
        truth = _true_symbol(
            transcript.network, model.protocol, layer_id, dict(item.outcomes)
        )
        guesses.append(guess)
        hits += 1 if guess == truth else 0
    return guesses, hits / len(gen)


def eve_accuracy_exact(
    protocol: ProtocolKind | str,
    network: NetworkSpec,
    strategy: EveStrategy | None,
    layer_id: int,
) -> float:
    return build_guess_model(protocol, network, strategy, layer_id).accuracy


# -- confidentiality -----------------------------------------------------------


@dataclass
class ConfidentialityReport:
    outsiders: tuple[str, ...]
    layer_id: int
    joint: dict  # (outsider outcome tuple, symbol) -> probability
    mutual_information_bits: float
    symbol_entropy_bits: float


def confidentiality(
    protocol: ProtocolKind | str,
    network: NetworkSpec,
    outsiders: Iterable[str],
    layer_id: int,
) -> ConfidentialityReport:
    """Exact mutual information between outsiders' outcomes and a layer symbol.

    Enumerates the resource state's support with exact weights; no sampling.
    Outsiders may include share holders of the target layer (a lone holder
    is supposed to learn nothing), but not a participant who reads the key
    directly off their own outcome.
    """
    protocol = ProtocolKind(protocol)
    outsiders = tuple(outsiders)
    session = make_session(protocol, network)
    rule, holders = layer_rule(network, protocol, layer_id)
    members = network.layer(layer_id).members
    for pid in outsiders:
        if pid in members:
            direct_reader = rule == "identity" or pid not in holders
            if direct_reader:
                raise AnalysisError(
                    f"{pid!r} reads the layer-{layer_id} key directly; "
                    "mutual information is trivially maximal"
                )
        if pid not in session.resource.owners:
            raise AnalysisError(f"{pid!r} holds no subsystem of the resource state")

    owners = session.resource.owners
    out_subs = tuple(owners.index(pid) for pid in outsiders)
    joint: dict = {}
    for outcome in sorted(support(session.resource.state)):
        p = abs(session.resource.state.amplitude(outcome)) ** 2
        values = {pid: outcome[owners.index(pid)] for pid in members}
        symbol = _true_symbol(network, protocol, layer_id, values)
        key = (tuple(outcome[s] for s in out_subs), symbol)
        joint[key] = joint.get(key, 0.0) + p

    px: dict = {}
    ps: dict = {}
    for (x, s), p in joint.items():
        px[x] = px.get(x, 0.0) + p
        ps[s] = ps.get(s, 0.0) + p
    mi = 0.0
    for (x, s), p in joint.items():
        if p > 0:
            mi += p * math.log2(p / (px[x] * ps[s]))
    entropy = -sum(p * math.log2(p) for p in ps.values() if p > 0)
    return ConfidentialityReport(
        outsiders=outsiders,
        layer_id=layer_id,
        joint=joint,
        mutual_information_bits=max(mi, 0.0),
        symbol_entropy_bits=entropy,
    )


# -- rates and tradeoff curves ---------------------------------------------


def sifted_rate(transcript: Transcript, layer_id: int) -> float:
    """Empirical entropy (bits per generation round) of a layer's symbols."""
    sifted = sift(transcript)
    material = derive_keys(sifted, transcript.network, transcript.protocol)
    return entropy_bits(material.layer(layer_id).key_stream())


@dataclass
class CurvePoint:
    parameter: float
    detection_exact: float
    detection_classes: dict
    eve_accuracy: float
    detection_sampled: float | None = None
    stderr: float | None = None


def eve_tradeoff_curve(
    protocol: ProtocolKind | str,
    network: NetworkSpec,
    family,
    grid: Sequence[float],
    *,
    layer_id: int | None = None,
    sampled_rounds: int = 0,
    seed: int = 0,
) -> list[CurvePoint]:
    """Exact detection and Eve accuracy across a parameterized attack family.

    ``family.build(network, theta)`` must yield a strategy per grid point.
    Accuracy refers to ``layer_id`` (default: the lowest layer containing a
    target).  With ``sampled_rounds`` > 0 each point also gets a Monte Carlo
    overall detection frequency with its standard error.
    """
    if len(grid) == 0:
        raise AnalysisError("parameter grid is empty")
    protocol = ProtocolKind(protocol)
    if layer_id is None:
        candidates = [
            l.id
            for l in sorted(network.layers, key=lambda l: l.id)
            if any(t in l.members for t in family.targets)
        ]
        if not candidates:
            raise AnalysisError("no layer contains any attack target")
        layer_id = candidates[0]
    points = []
    for theta in grid:
        strategy = family.build(network, float(theta))
        report = exact_detection(protocol, network, strategy)
        accuracy = eve_accuracy_exact(protocol, network, strategy, layer_id)
        sampled = stderr = None
        if sampled_rounds:
            mc = sampled_detection(
                protocol, network, strategy, sampled_rounds, seed, decoy_rate=0.0
            )
            sampled = mc.overall
            stderr = math.sqrt(max(sampled * (1 - sampled), 1e-12) / sampled_rounds)
        points.append(
            CurvePoint(
                parameter=float(theta),
                detection_exact=report.overall,
                detection_classes={k: v.probability for k, v in report.classes.items()},
                eve_accuracy=accuracy,
                detection_sampled=sampled,
                stderr=stderr,
            )
        )
    return points
