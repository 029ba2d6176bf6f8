import numpy as np
import pytest

from givenclause.agents import (
    MaskedRandomAgent,
    ThompsonAgent,
    ThompsonState,
    UniformArmAgent,
    thompson_act,
    thompson_update,
)


class TestThompsonState:
    def test_fresh_update_win_on_arm_zero(self):
        state = thompson_update(ThompsonState(), arm=0, reward=1.0)
        assert state.alpha == (2.0, 1.0)
        assert state.beta == (1.0, 1.0)

    def test_two_losses_on_arm_one(self):
        state = ThompsonState()
        state = thompson_update(state, arm=1, reward=0.0)
        state = thompson_update(state, arm=1, reward=0.0)
        assert state.alpha == (1.0, 1.0)
        assert state.beta == (1.0, 3.0)

    def test_reward_outside_bernoulli_rejected(self):
        with pytest.raises(ValueError):
            thompson_update(ThompsonState(), arm=0, reward=0.5)

    def test_unknown_arm_rejected(self):
        with pytest.raises(ValueError):
            thompson_update(ThompsonState(), arm=2, reward=1.0)

    def test_posterior_bookkeeping_invariant(self):
        rng = np.random.default_rng(3)
        state = ThompsonState()
        wins = [0, 0]
        losses = [0, 0]
        for _ in range(200):
            arm = int(rng.integers(2))
            reward = float(rng.integers(2))
            state = thompson_update(state, arm, reward)
            if reward:
                wins[arm] += 1
            else:
                losses[arm] += 1
        for arm in (0, 1):
            assert state.alpha[arm] - 1 == wins[arm]
            assert state.beta[arm] - 1 == losses[arm]
            updates = wins[arm] + losses[arm]
            assert state.alpha[arm] + state.beta[arm] - 2 == updates

    def test_dominant_posterior_wins_almost_always(self):
        # P(theta_0 > theta_1) for Beta(100,1) vs Beta(1,100) is ~1
        state = ThompsonState(alpha=(100.0, 1.0), beta=(1.0, 100.0))
        rng = np.random.default_rng(12345)
        draws = sum(thompson_act(state, rng) == 0 for _ in range(10_000))
        assert draws / 10_000 > 0.99


class TestAgents:
    def test_masked_random_only_legal_actions(self):
        from givenclause.env import Observation
        from givenclause.clauses import Clause

        clauses = tuple(
            Clause.from_text("p(a)", label=str(i)) for i in range(4)
        )
        mask = np.array([0.0, 1.0, 0.0, 1.0, 0.0], dtype=np.float32)
        obs = Observation(real_obs=clauses, action_mask=mask)
        agent = MaskedRandomAgent()
        agent.begin_episode(obs, np.random.default_rng(0))
        picks = {agent.act(obs) for _ in range(50)}
        assert picks <= {1, 3}

    def test_uniform_arm_commits_per_episode(self):
        agent = UniformArmAgent()
        agent.begin_episode(None, np.random.default_rng(9))
        first = agent.act(None)
        assert all(agent.act(None) == first for _ in range(10))

    def test_thompson_agent_learns_from_terminal_reward(self):
        agent = ThompsonAgent()
        agent.begin_episode(None, np.random.default_rng(1))
        arm = agent.act(None)
        agent.learn(1.0)
        assert agent.state.alpha[arm] == 2.0
