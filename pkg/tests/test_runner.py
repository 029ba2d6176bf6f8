import dataclasses
import json

import pytest

from givenclause.agents import MaskedRandomAgent, UniformArmAgent
from givenclause.env import EnvConfig, SaturationEnv
from givenclause.runner import (
    ConfigError,
    EpisodeRecord,
    ExperimentConfig,
    build_env,
    episode_seed,
    run_episode,
    run_experiment,
)
from givenclause.wrappers import BanditActionWrapper, StepLimitWrapper


def make_env(problem_path, name, max_clauses=50):
    return SaturationEnv(
        EnvConfig(max_clauses=max_clauses, problem_path=problem_path(name))
    )


class TestRunEpisode:
    def test_random_agent_refutes_trivial_pair(self, problem_path):
        # both selection orders refute within two steps
        for seed in range(8):
            env = make_env(problem_path, "trivial_pair.p", max_clauses=10)
            record = run_episode(env, MaskedRandomAgent(), seed=seed)
            assert record.reward == 1.0
            assert record.steps <= 2
            assert record.end_cause == "terminated-refutation"

    def test_budget_below_any_proof_length(self, problem_path):
        # with a budget of 5 the group task forces both arms through the
        # associativity clause, whose inference batch bursts the budget
        # long before any proof can complete
        for seed in range(6):
            env = BanditActionWrapper(
                make_env(problem_path, "group_idempotent.p", max_clauses=5)
            )
            record = run_episode(env, UniformArmAgent(), seed=seed)
            assert record.reward == 0.0
            assert record.end_cause == "truncated-clauses"

    def test_same_seed_identical_records(self, problem_path):
        records = []
        for _ in range(2):
            env = make_env(problem_path, "set_membership.p", max_clauses=30)
            records.append(run_episode(env, MaskedRandomAgent(), seed=123))
        a, b = records
        assert dataclasses.replace(a, wall_time=0.0) == dataclasses.replace(
            b, wall_time=0.0
        )

    def test_arm_counts_recorded_for_bandit_agents(self, problem_path):
        env = BanditActionWrapper(
            make_env(problem_path, "bandit_separation.p", max_clauses=15)
        )
        record = run_episode(env, UniformArmAgent(), seed=4)
        assert record.arm_counts is not None
        assert sum(record.arm_counts.values()) == record.steps

    def test_step_limit_cause(self, problem_path):
        env = StepLimitWrapper(
            make_env(problem_path, "set_membership.p", max_clauses=200), limit=2
        )
        record = run_episode(env, MaskedRandomAgent(), seed=0)
        assert record.end_cause == "truncated-steps"

    def test_record_consistency_enforced(self):
        with pytest.raises(ValueError):
            EpisodeRecord(
                episode=0, steps=3, reward=1.0,
                end_cause="truncated-clauses", arm_counts=None, wall_time=0.1,
            )


class TestRunExperiment:
    def test_zero_episodes_writes_empty_file(self, tmp_path, problem_path):
        out = tmp_path / "stats.jsonl"
        result = run_experiment(
            ExperimentConfig(
                problem=problem_path("trivial_pair.p"),
                max_clauses=10,
                episodes=0,
                out=str(out),
            )
        )
        assert out.exists() and out.read_text() == ""
        assert result.records == []

    def test_unknown_agent_rejected_before_running(self):
        with pytest.raises(ConfigError):
            run_experiment(ExperimentConfig(agent="sarsa"))

    def test_thompson_requires_bandit_wrapper(self):
        with pytest.raises(ConfigError):
            run_experiment(ExperimentConfig(agent="thompson", wrapper="none"))

    def test_deterministic_statistics_files(self, tmp_path, problem_path):
        outs = []
        for run in range(2):
            out = tmp_path / f"stats{run}.jsonl"
            run_experiment(
                ExperimentConfig(
                    agent="random",
                    problem=problem_path("set_membership.p"),
                    max_clauses=30,
                    episodes=20,
                    seed=42,
                    out=str(out),
                )
            )
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_records_carry_series_fields(self, tmp_path, problem_path):
        out = tmp_path / "stats.jsonl"
        run_experiment(
            ExperimentConfig(
                agent="random",
                wrapper="bandit",
                problem=problem_path("bandit_separation.p"),
                max_clauses=15,
                episodes=10,
                seed=7,
                out=str(out),
            )
        )
        lines = [json.loads(line) for line in out.read_text().splitlines()]
        assert len(lines) == 10
        cumulative = 0
        rewards = []
        for i, line in enumerate(lines):
            assert line["episode"] == i
            cumulative += line["steps"]
            rewards.append(line["reward"])
            assert line["cumulative_steps"] == cumulative
            assert line["episode_reward_mean"] == pytest.approx(
                sum(rewards) / len(rewards)
            )
            assert "wall_time" not in line
            assert set(line["arm_counts"]) <= {"0", "1"}

    def test_thompson_separates_from_uniform(self, problem_path):
        sep = problem_path("bandit_separation.p")
        thompson = run_experiment(
            ExperimentConfig(
                agent="thompson", wrapper="bandit", problem=sep,
                max_clauses=15, episodes=120, seed=11,
            )
        )
        uniform = run_experiment(
            ExperimentConfig(
                agent="random", wrapper="bandit", problem=sep,
                max_clauses=15, episodes=120, seed=11,
            )
        )
        assert thompson.mean_reward_last(50) >= 0.9
        assert uniform.mean_reward_last(50) <= 0.7

    def test_seed_derivation_is_stable(self):
        assert episode_seed(42, 0) == (42 * 1_000_003) % 2**31
        assert episode_seed(42, 1) == episode_seed(42, 0) + 1

    def test_build_env_applies_wrappers(self, problem_path):
        env = build_env(
            ExperimentConfig(
                wrapper="bandit",
                step_limit=5,
                problem=problem_path("trivial_pair.p"),
                max_clauses=10,
            )
        )
        assert isinstance(env, StepLimitWrapper)
        assert isinstance(env.env, BanditActionWrapper)
