import numpy as np
import pytest

from givenclause.backend import BackendStartupError
from givenclause.env import (
    EnvConfig,
    EpisodeFinishedError,
    InvalidActionError,
    Observation,
    SaturationEnv,
)
from givenclause.tptp import ProblemFileError, parse_cnf_line, read_problem

from invariants import run_suite


def make_env(problem_path=None, max_clauses=50, **kwargs):
    return SaturationEnv(
        EnvConfig(max_clauses=max_clauses, problem_path=problem_path, **kwargs)
    )


class TestSetTask:
    def test_default_task_is_group_idempotence(self):
        env = SaturationEnv()
        assert env.task_path.endswith("group_idempotent.p")
        obs, _ = env.reset()
        assert any("product(a,a,a)" == c.literals for c in obs.real_obs)

    def test_set_task_loads_problem(self, problem_path):
        env = make_env()
        env.set_task(problem_path("set_membership.p"))
        obs, _ = env.reset()
        expected = read_problem(problem_path("set_membership.p"))
        assert len(obs.real_obs) == len(expected)
        for got, want in zip(obs.real_obs, expected):
            assert got.parsed_literals == want.parsed_literals
            assert got.role == want.role
            assert got.birth_step == 0

    def test_missing_file_leaves_env_unchanged(self, problem_path):
        env = make_env(problem_path=problem_path("trivial_pair.p"))
        with pytest.raises(ProblemFileError):
            env.set_task("/nonexistent/task.p")
        assert env.task_path.endswith("trivial_pair.p")
        obs, _ = env.reset()
        assert len(obs.real_obs) == 2

    def test_parse_failure_surfaces_at_set_task(self, tmp_path):
        bad = tmp_path / "bad.p"
        bad.write_text("cnf(oops, axiom, p(a) | ).\n")
        env = make_env()
        with pytest.raises(ProblemFileError):
            env.set_task(str(bad))


class TestReset:
    def test_input_rules_and_birth_steps(self):
        env = SaturationEnv()
        obs, info = env.reset()
        assert info == {}
        for clause in obs.real_obs:
            assert clause.inference_rule in ("axiom", "input", "negated_conjecture")
            assert clause.birth_step == 0

    def test_reset_twice_is_identical(self):
        env = make_env()
        first, _ = env.reset()
        second, _ = env.reset()
        assert len(first.real_obs) == len(second.real_obs)
        for a, b in zip(first.real_obs, second.real_obs):
            assert a.same_structure(b)
        assert np.array_equal(first.action_mask, second.action_mask)

    def test_reset_after_finished_episode(self, problem_path):
        env = make_env(problem_path=problem_path("trivial_pair.p"))
        env.reset()
        env.step(0)
        out = env.step(1)
        assert out.terminated
        obs, _ = env.reset()
        assert env.state.step_count == 0
        assert len(obs.real_obs) == 2

    def test_mask_marks_live_inputs(self, problem_path):
        env = make_env(problem_path=problem_path("trivial_pair.p"), max_clauses=10)
        obs, _ = env.reset()
        assert obs.action_mask.tolist() == [1.0, 1.0] + [0.0] * 8

    def test_too_many_inputs_for_budget(self, problem_path):
        env = make_env(problem_path=problem_path("group_idempotent.p"), max_clauses=3)
        with pytest.raises(ValueError):
            env.reset()

    def test_seed_stored_for_agents(self):
        env = make_env()
        env.reset(seed=17)
        assert env.seed == 17

    def test_startup_failure_names_backend(self, problem_path):
        class Exploding:
            def start(self, problem):
                raise OSError("boom")

            def select(self, label):
                raise AssertionError

            def close(self):
                pass

        env = SaturationEnv(
            EnvConfig(problem_path=problem_path("trivial_pair.p"), backend=Exploding)
        )
        with pytest.raises(BackendStartupError) as err:
            env.reset()
        assert "Exploding" in str(err.value)


class TestStep:
    def test_one_resolution_refutation(self, problem_path):
        env = make_env(problem_path=problem_path("trivial_pair.p"))
        env.reset()
        out = env.step(0)
        assert out.reward == 0.0 and not out.terminated
        out = env.step(1)
        assert out.reward == 1.0
        assert out.terminated and not out.truncated
        assert any(c.is_empty for c in out.observation.real_obs)

    def test_five_tuple_unpacking(self, problem_path):
        env = make_env(problem_path=problem_path("trivial_pair.p"))
        env.reset()
        observation, reward, terminated, truncated, info = env.step(0)
        assert isinstance(observation, Observation)
        assert reward == 0.0 and not terminated and not truncated and info == {}

    def test_masked_action_raises_and_preserves_state(self, problem_path):
        env = make_env(problem_path=problem_path("trivial_pair.p"))
        obs, _ = env.reset()
        before = [c.label for c in obs.real_obs]
        with pytest.raises(InvalidActionError):
            env.step(7)
        with pytest.raises(InvalidActionError):
            env.step(-1)
        assert [c.label for c in env.state.clauses] == before
        assert env.state.step_count == 0

    def test_selected_clause_becomes_unselectable(self, problem_path):
        env = make_env(problem_path=problem_path("satisfiable_pair.p"))
        env.reset()
        out = env.step(0)
        assert out.observation.action_mask[0] == 0.0
        with pytest.raises(InvalidActionError):
            env.step(0)

    def test_truncation_on_clause_budget(self, problem_path):
        env = make_env(problem_path=problem_path("bandit_separation.p"), max_clauses=15)
        obs, _ = env.reset()
        terminated = truncated = False
        reward = None
        steps = 0
        while not (terminated or truncated):
            out = env.step(int(obs.action_mask.argmax()))
            obs, reward = out.observation, out.reward
            terminated, truncated = out.terminated, out.truncated
            steps += 1
            assert steps < 50
        assert truncated and not terminated
        assert reward == 0.0
        assert len(obs.real_obs) > 15

    def test_state_survives_truncation(self, problem_path):
        env = make_env(problem_path=problem_path("bandit_separation.p"), max_clauses=15)
        obs, _ = env.reset()
        done = False
        while not done:
            out = env.step(int(obs.action_mask.argmax()))
            obs, done = out.observation, out.terminated or out.truncated
        text = env.render(mode="ansi")
        lines = text.splitlines()
        assert len(lines) == len(obs.real_obs)
        for line, clause in zip(lines, obs.real_obs):
            assert parse_cnf_line(line).same_structure(clause)

    def test_step_after_end_raises(self, problem_path):
        env = make_env(problem_path=problem_path("trivial_pair.p"))
        env.reset()
        env.step(0)
        env.step(1)
        with pytest.raises(EpisodeFinishedError):
            env.step(0)

    def test_step_before_reset_raises(self):
        env = make_env()
        with pytest.raises(RuntimeError):
            env.step(0)

    def test_saturation_terminates_without_reward(self, problem_path):
        env = make_env(problem_path=problem_path("satisfiable_pair.p"))
        env.reset()
        env.step(0)
        out = env.step(1)
        assert out.terminated and out.reward == 0.0
        assert not any(c.is_empty for c in out.observation.real_obs)


class TestRender:
    def test_ansi_roundtrips_input_clauses(self):
        env = SaturationEnv()
        obs, _ = env.reset()
        text = env.render(mode="ansi")
        lines = text.splitlines()
        assert len(lines) == len(obs.real_obs)
        for line, clause in zip(lines, obs.real_obs):
            assert parse_cnf_line(line).same_structure(clause)

    def test_render_before_reset_raises(self):
        env = make_env()
        with pytest.raises(RuntimeError):
            env.render(mode="ansi")

    def test_human_prints_ansi_bytes(self, capsys, problem_path):
        env = make_env(problem_path=problem_path("trivial_pair.p"))
        env.reset()
        text = env.render(mode="ansi")
        assert env.render(mode="human") is None
        captured = capsys.readouterr()
        assert captured.out == text + "\n"

    def test_unknown_mode(self, problem_path):
        env = make_env(problem_path=problem_path("trivial_pair.p"))
        env.reset()
        with pytest.raises(ValueError):
            env.render(mode="rgb_array")


class TestInvariantSuite:
    """A quick slice of the semantics suite; acceptance runs >= 1000."""

    @pytest.mark.parametrize(
        "name,max_clauses",
        [
            ("trivial_pair.p", 10),
            ("satisfiable_pair.p", 10),
            ("set_membership.p", 40),
            ("bandit_separation.p", 15),
            ("group_idempotent.p", 60),
        ],
    )
    def test_random_action_sequences(self, problem_path, name, max_clauses):
        stats = run_suite(
            lambda: SaturationEnv(
                EnvConfig(max_clauses=max_clauses, problem_path=problem_path(name))
            ),
            episodes=40,
            seed=11,
        )
        assert stats["episodes"] == 40
