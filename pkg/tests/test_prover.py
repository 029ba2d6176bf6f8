import pytest

from givenclause.backend import ProverStatus, UnknownClauseError
from givenclause.clauses import Clause
from givenclause.prover import EmbeddedProver

from oracles import entails


def problem(*texts, roles=None):
    roles = roles or ["axiom"] * len(texts)
    out = []
    for i, (text, role) in enumerate(zip(texts, roles)):
        rule = role if role in ("axiom", "negated_conjecture") else "input"
        out.append(
            Clause.from_text(text, label=f"in{i}", role=role, inference_rule=rule)
        )
    return out


class TestEmbeddedSelect:
    def test_two_step_refutation(self):
        prover = EmbeddedProver()
        initial = prover.start(problem("p(a)", "~p(X)"))
        assert [c.label for c in initial] == ["0", "1"]

        first = prover.select("0")
        assert first.new_clauses == []
        assert first.status is ProverStatus.RUNNING

        second = prover.select("1")
        assert len(second.new_clauses) == 1
        assert second.new_clauses[0].is_empty
        assert second.status is ProverStatus.REFUTATION

    def test_lone_clause_saturates(self):
        prover = EmbeddedProver()
        prover.start(problem("p(a)"))
        result = prover.select("0")
        assert result.new_clauses == []
        assert result.status is ProverStatus.SATURATED

    def test_variant_not_readded(self):
        prover = EmbeddedProver()
        prover.start(problem("q(X)", "~p(Y) | q(Y)", "p(Z)"))
        prover.select("2")
        result = prover.select("1")
        # the resolvent q(Z) is a variant of the input q(X)
        assert result.new_clauses == []

    def test_tautologies_discarded(self):
        prover = EmbeddedProver()
        prover.start(problem("p(a) | q(X)", "~p(a) | p(a)"))
        prover.select("0")
        result = prover.select("1")
        assert all(not _is_tautology(c) for c in result.new_clauses)

    def test_unknown_label(self):
        prover = EmbeddedProver()
        prover.start(problem("p(a)"))
        with pytest.raises(UnknownClauseError):
            prover.select("99")

    def test_already_processed_label(self):
        prover = EmbeddedProver()
        prover.start(problem("p(a)", "q(b)"))
        prover.select("0")
        with pytest.raises(UnknownClauseError):
            prover.select("0")

    def test_parent_bookkeeping(self):
        prover = EmbeddedProver()
        prover.start(problem("p(a)", "~p(X) | q(X) | q(a)"))
        prover.select("0")
        result = prover.select("1")
        labels = {"0", "1"}
        for c in result.new_clauses:
            assert set(c.inference_parents) <= labels | {
                n.label for n in result.new_clauses
            }
            if c.inference_rule == "resolution":
                assert len(c.inference_parents) == 2
            elif c.inference_rule == "factoring":
                assert len(c.inference_parents) == 1

    def test_restart_clears_state(self):
        prover = EmbeddedProver()
        prover.start(problem("p(a)", "~p(a)"))
        prover.select("0")
        initial = prover.start(problem("q(b)"))
        assert [c.label for c in initial] == ["0"]
        assert prover.select("0").status is ProverStatus.SATURATED


class TestSoundness:
    """Every clause in any reachable state follows from the inputs,
    checked with the ground-model oracle over a depth-bounded base."""

    def run_exhaustively(self, inputs):
        prover = EmbeddedProver()
        state = list(prover.start(inputs))
        frontier = [c.label for c in state]
        steps = 0
        while frontier and steps < 40:
            label = frontier.pop(0)
            result = prover.select(label)
            state.extend(result.new_clauses)
            frontier.extend(c.label for c in result.new_clauses)
            steps += 1
            if result.status is not ProverStatus.RUNNING:
                break
        return state

    def test_ground_model_soundness(self):
        inputs = problem("p(a)", "~p(X) | q(X)", "~q(b) | r(b)")
        state = self.run_exhaustively(inputs)
        derived = [c for c in state if c.inference_rule not in ("axiom", "input")]
        assert derived, "expected some derived clauses"
        for c in derived:
            assert entails(inputs, c), c.literals

    def test_refutation_soundness(self):
        inputs = problem("p(a)", "~p(X)")
        state = self.run_exhaustively(inputs)
        empty = [c for c in state if c.is_empty]
        assert empty
        assert entails(inputs, empty[0])


class TestBreadthFirstCompleteness:
    """Exhaustive lowest-live-index selection refutes each bundled
    unsatisfiable fixture within its clause budget (acceptance oracle)."""

    @pytest.mark.parametrize(
        "name,budget,step_limit",
        [
            ("trivial_pair.p", 10, 5),
            ("set_membership.p", 1000, 100),
            ("bandit_separation.p", 1000, 50),
            ("group_idempotent.p", 5000, 500),
        ],
    )
    def test_breadth_first_refutes(self, problem_path, name, budget, step_limit):
        from givenclause.env import EnvConfig, SaturationEnv

        env = SaturationEnv(EnvConfig(max_clauses=budget, problem_path=problem_path(name)))
        obs, _ = env.reset()
        reward, terminated, truncated, steps = 0.0, False, False, 0
        while not (terminated or truncated) and steps < step_limit:
            outcome = env.step(int(obs.action_mask.argmax()))
            obs = outcome.observation
            reward, terminated, truncated = (
                outcome.reward,
                outcome.terminated,
                outcome.truncated,
            )
            steps += 1
        assert terminated and reward == 1.0, (name, steps, truncated)


def _is_tautology(clause):
    from givenclause.clauses import is_tautology

    return is_tautology(clause)
