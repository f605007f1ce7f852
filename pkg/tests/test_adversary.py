"""Eve strategies: taps, unitary builders, lying policies, shorthand parsing."""

import json

import numpy as np
import pytest

from semiqnet.adversary import (
    AttackKind,
    ControlledRotationFamily,
    EveStrategy,
    LyingPolicy,
    controlled_rotation_unitary,
    copy_unitary,
    entangle_measure,
    eve_guess,
    intercept_resend,
    lying_participant,
    lying_match_probability,
    lying_policy_apply,
    parse_attack,
    tap_backward,
    tap_forward,
    two_way_entangle,
    unitary_from_pairs,
)
from semiqnet.protocol import SessionConfig, make_session, run_session
from semiqnet.qudit import states_equal, support
from semiqnet.synthesis import ProtocolKind


class TestLyingPolicy:
    def test_honest_policy(self):
        rng = np.random.default_rng(1)
        assert lying_policy_apply(LyingPolicy("honest"), 3, 4, rng) == 3
        assert lying_match_probability(LyingPolicy("honest"), 4) == 1.0

    def test_uniform_policy_mismatch_rate(self):
        rng = np.random.default_rng(2)
        policy = LyingPolicy("uniform")
        hits = sum(lying_policy_apply(policy, 1, 4, rng) == 1 for _ in range(20_000))
        assert abs(hits / 20_000 - 0.25) < 0.02
        assert lying_match_probability(policy, 4) == 0.25

    def test_offset_policy_never_matches(self):
        rng = np.random.default_rng(3)
        policy = LyingPolicy("offset", offset=1)
        assert all(
            lying_policy_apply(policy, v, 4, rng) == (v + 1) % 4 for v in range(4)
        )
        assert lying_match_probability(policy, 4) == 0.0

    def test_unknown_policy(self):
        with pytest.raises(ValueError):
            LyingPolicy("gaslight")


class TestUnitaryBuilders:
    def test_copy_unitary_action(self):
        u = copy_unitary(4)
        # |i>|0> -> |i>|i>
        for i in range(4):
            col = u.matrix[:, i * 4]
            assert col[i * 4 + i] == 1.0 and np.count_nonzero(col) == 1

    def test_controlled_rotation_endpoints(self):
        assert np.allclose(controlled_rotation_unitary(4, 0.0).matrix, np.eye(8))
        u = controlled_rotation_unitary(2, np.pi / 2)
        # on a two-level target this is the computational-basis copier
        assert np.allclose(np.abs(u.matrix), np.abs(copy_unitary(2).matrix), atol=1e-12)

    def test_unitary_from_pairs(self):
        rows = [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]
        u = unitary_from_pairs(rows, (2,))
        assert np.allclose(u.matrix, [[0, 1], [1, 0]])


class TestTaps:
    def test_copy_tap_entangles_with_layer_index(self, fig2):
        session = make_session("lsqkd", fig2)
        strategy = entangle_measure(fig2, ("bob1",))
        result = tap_forward(strategy, session.resource.state, "bob1", 1, rng=None)
        grown = result.state
        assert grown.dims == (4, 4, 2, 4)
        # joint state is sum over |a a bit> |a>_E with weight 1/2
        for a, b1, b2 in [(0, 0, 0), (1, 1, 1), (2, 2, 0), (3, 3, 1)]:
            assert grown.amplitude((a, b1, b2, a)) == pytest.approx(0.5)

    def test_identity_forward_unitary_is_noop_on_probabilities(self, fig2):
        session = make_session("lsqkd", fig2)
        strategy = two_way_entangle(fig2, ("bob1",), theta=0.0, phi=0.0)
        result = tap_forward(strategy, session.resource.state, "bob1", 1, rng=None)
        # ancilla attached but unentangled: tracing it back gives the state
        kept = {outcome[:3] for outcome in support(result.state)}
        assert kept == support(session.resource.state)

    def test_intercept_tap_measures_and_collapses(self, fig2):
        session = make_session("lsqkd", fig2)
        strategy = intercept_resend(("bob2",))
        rng = np.random.default_rng(7)
        result = tap_forward(strategy, session.resource.state, "bob2", 2, rng)
        assert result.measured in (0, 1)
        outcomes = {o[2] for o in support(result.state)}
        assert outcomes == {result.measured}

    def test_backward_tap_respects_leg_flags(self, fig2):
        session = make_session("lsqkd", fig2)
        strategy = intercept_resend(("bob2",), forward=True, backward=False)
        rng = np.random.default_rng(8)
        result = tap_backward(strategy, session.resource.state, "bob2", 2, rng)
        assert result.measured is None
        assert result.state is session.resource.state

    def test_untargeted_subsystems_untouched(self, fig5):
        session = make_session("lsqss", fig5)
        strategy = entangle_measure(fig5, ("bob1",))
        result = tap_forward(strategy, session.resource.state, "bob1", 0, rng=None)
        # bob2..bob5 marginals remain uniform
        from semiqnet.qudit import outcome_distribution

        for sub in range(1, 5):
            table = outcome_distribution(result.state, (sub,))
            for p in table.values():
                assert p == pytest.approx(0.25)


class TestStrategyValidation:
    def test_entangling_strategy_needs_unitaries(self):
        with pytest.raises(ValueError):
            EveStrategy(AttackKind.TWO_WAY_ENTANGLE, ("bob1",), forward=True, backward=True)

    def test_needs_targets(self):
        with pytest.raises(ValueError):
            intercept_resend(())

    def test_describe_round_trips_key_facts(self, fig2):
        strategy = two_way_entangle(fig2, ("bob1",), theta=0.3, phi=0.6)
        text = strategy.describe()
        assert "twoway" in text and "bob1" in text and "theta=0.3" in text


class TestParseAttack:
    def test_intercept_shorthand(self, fig2):
        strategy = parse_attack("intercept:bob1", fig2)
        assert strategy.kind is AttackKind.INTERCEPT_RESEND
        assert strategy.targets == ("bob1",) and strategy.forward and not strategy.backward

    def test_legs_token(self, fig2):
        strategy = parse_attack("intercept:bob2:b", fig2)
        assert not strategy.forward and strategy.backward

    def test_twoway_with_params(self, fig2):
        strategy = parse_attack("twoway:bob1:fb:theta=0.5,phi=1.0", fig2)
        assert strategy.kind is AttackKind.TWO_WAY_ENTANGLE
        assert strategy.params["theta"] == 0.5 and strategy.params["phi"] == 1.0

    def test_lying_policy_params(self, fig5):
        strategy = parse_attack("lying:bob3:policy=offset,offset=2", fig5)
        assert strategy.kind is AttackKind.LYING_PARTICIPANT
        assert strategy.lying_policy == LyingPolicy("offset", offset=2)

    def test_multiple_targets(self, fig5):
        strategy = parse_attack("intercept:bob1,bob2,bob3", fig5)
        assert strategy.targets == ("bob1", "bob2", "bob3")

    def test_unknown_target_rejected(self, fig2):
        with pytest.raises(ValueError):
            parse_attack("intercept:mallory", fig2)

    def test_unknown_kind_rejected(self, fig2):
        with pytest.raises(ValueError):
            parse_attack("teleport:bob1", fig2)

    def test_explicit_unitary_file(self, fig2, tmp_path):
        u = controlled_rotation_unitary(2, 0.7)
        doc = {
            "bob2": {
                "forward": {
                    "acting_dims": [2, 2],
                    "matrix": [[[v.real, v.imag] for v in row] for row in u.matrix],
                }
            }
        }
        path = tmp_path / "attack.json"
        path.write_text(json.dumps(doc))
        strategy = parse_attack(f"twoway:bob2:f:file={path}", fig2)
        assert np.allclose(strategy.forward_unitaries["bob2"].matrix, u.matrix)


class TestEveGuess:
    def test_copy_attack_reads_both_layers(self, fig2):
        strategy = entangle_measure(fig2, ("bob1",))
        config = SessionConfig(ProtocolKind.LSQKD, fig2, 3000, seed=9, eve=strategy)
        transcript = run_session(config)
        for layer in (1, 2):
            _, accuracy = eve_guess(strategy, transcript, layer)
            assert accuracy == 1.0

    def test_intercept_attack_reads_both_layers(self, fig2):
        strategy = intercept_resend(("bob1",))
        config = SessionConfig(ProtocolKind.LSQKD, fig2, 3000, seed=10, eve=strategy)
        transcript = run_session(config)
        guesses, accuracy = eve_guess(strategy, transcript, 1)
        assert accuracy == 1.0 and set(guesses) <= {0, 1}

    def test_identity_attack_guesses_at_chance_and_leaves_no_trace(self, fig2):
        from semiqnet.protocol import sift

        strategy = two_way_entangle(fig2, ("bob1",), theta=0.0, phi=0.0)
        config = SessionConfig(ProtocolKind.LSQKD, fig2, 8000, seed=11, eve=strategy)
        transcript = run_session(config)
        sifted = sift(transcript)
        assert sifted.projective_failures == 0
        assert sifted.support_violations == 0
        assert sifted.ctrl_mismatch_rounds == 0
        _, accuracy = eve_guess(strategy, transcript, 1)
        n = 8000 * 0.25
        assert abs(accuracy - 0.5) < 4 * np.sqrt(0.25 / n)


class TestFamily:
    def test_family_endpoints(self, fig2):
        family = ControlledRotationFamily(targets=("bob2",), phi_scale=0.0)
        identity = family.build(fig2, 0.0)
        assert np.allclose(identity.forward_unitaries["bob2"].matrix, np.eye(4))
        copyish = family.build(fig2, np.pi / 2)
        assert np.allclose(
            np.abs(copyish.forward_unitaries["bob2"].matrix),
            np.abs(copy_unitary(2).matrix),
            atol=1e-12,
        )
