import ast
import hashlib
import threading

import pytest

from givenclause.embeddings import (
    EmbeddingClient,
    EmbeddingProtocolError,
    EmbeddingServiceError,
    StubEmbeddingServer,
    stub_vector,
    tptp_to_expr,
)
from givenclause.env import default_problem_path
from givenclause.tptp import read_problem


class TestTptpToExpr:
    def test_member_example(self):
        assert tptp_to_expr("member(X0,bb) | ~member(X0,b)") == (
            "member(v_x0, bb) or not member(v_x0, b)"
        )

    def test_equality_becomes_double_equals(self):
        assert tptp_to_expr("a = b") == "a == b"

    def test_empty_clause_is_false_literal(self):
        assert tptp_to_expr("$false") == "False"

    def test_inequality_kept(self):
        assert tptp_to_expr("a != b") == "a != b"
        assert tptp_to_expr("~(a = b)") == "a != b"

    def test_variables_prefixed_and_lowercased(self):
        assert tptp_to_expr("X = Y | ~p(f(X),c)") == "v_x == v_y or not p(f(v_x), c)"

    def test_outputs_parse_as_expressions(self):
        corpus = self._corpus()
        for text in corpus:
            expr = tptp_to_expr(text)
            ast.parse(expr, mode="eval")

    def test_injective_on_fixture_corpus(self):
        corpus = self._corpus()
        exprs = {}
        for text in corpus:
            expr = tptp_to_expr(text)
            assert exprs.setdefault(expr, text) == text, (
                f"{text!r} and {exprs[expr]!r} map to one expression"
            )

    def _corpus(self):
        texts = []
        for name in (
            "group_idempotent.p",
            "set_membership.p",
            "bandit_separation.p",
            "trivial_pair.p",
            "satisfiable_pair.p",
        ):
            for clause in read_problem(default_problem_path(name)):
                texts.append(clause.literals)
        texts += ["a = b", "a != b", "p(X) | ~q(Y)"]
        return texts


class TestStubVector:
    # values frozen from the documented hash-expansion procedure
    GOLDEN = {
        "member(v_x0, bb) or not member(v_x0, b)": [
            0.26700968743465703, -0.41288068738341432,
            -0.24410579474176697, -0.27132699490749335,
        ],
        "a == b": [
            0.05434976376770484, -0.36298466223319636,
            -0.28375364030373706, 0.77639964795537986,
        ],
        "False": [
            0.33370980165532416, -0.8158994987340874,
            -0.16109464396006323, 0.72638780363499311,
        ],
    }

    def test_golden_values(self):
        for expr, expected in self.GOLDEN.items():
            assert stub_vector(expr, 4) == pytest.approx(expected, abs=0)

    def test_matches_documented_procedure(self):
        expr = "p(v_x) or q"
        got = stub_vector(expr, 6)
        for i, value in enumerate(got):
            digest = hashlib.sha256(f"{expr}\x00{i}".encode()).digest()
            expected = int.from_bytes(digest[:8], "big") / 2**64 * 2 - 1
            assert value == expected

    def test_range_and_determinism(self):
        first = stub_vector("anything", 256)
        assert len(first) == 256
        assert all(-1.0 <= v <= 1.0 for v in first)
        assert stub_vector("anything", 256) == first


@pytest.fixture(scope="module")
def stub_server():
    with StubEmbeddingServer(dimension=16) as server:
        yield server


class TestEmbeddingClient:
    def test_roundtrip_matches_stub(self, stub_server):
        client = EmbeddingClient(url=stub_server.url, dimension=16)
        got = client.embed("a == b")
        assert got == stub_vector("a == b", 16)

    def test_second_call_hits_cache(self, stub_server):
        client = EmbeddingClient(url=stub_server.url, dimension=16)
        client.embed("p(c)")
        client.embed("p(c)")
        assert client.stats.count == 2
        assert client.stats.hits == 1
        assert client.stats.hit_ratio == 0.5

    def test_cache_transparency(self, stub_server):
        exprs = ["a == b", "p(c)", "a == b", "q(d) or p(c)", "p(c)"]
        cached = EmbeddingClient(url=stub_server.url, dimension=16)
        uncached = EmbeddingClient(url=stub_server.url, dimension=16, cache=False)
        got_cached = [cached.embed(e) for e in exprs]
        got_uncached = [uncached.embed(e) for e in exprs]
        assert got_cached == got_uncached

    def test_wrong_dimension_is_protocol_error(self, stub_server):
        client = EmbeddingClient(url=stub_server.url, dimension=17)
        with pytest.raises(EmbeddingProtocolError) as err:
            client.embed("a == b")
        assert "17" in str(err.value) and "16" in str(err.value)

    def test_invalid_expression_rejected_by_stub(self, stub_server):
        client = EmbeddingClient(url=stub_server.url, dimension=16)
        with pytest.raises(EmbeddingProtocolError):
            client.embed("1 +")

    def test_unreachable_service_fails_after_retries(self):
        client = EmbeddingClient(
            url="http://127.0.0.1:9/embeddings", dimension=16,
            retries=2, backoff=0.001, timeout=0.2,
        )
        with pytest.raises(EmbeddingServiceError) as err:
            client.embed("a == b")
        assert "2 retries" in str(err.value)

    def test_concurrent_requests_fetch_once(self, stub_server, monkeypatch):
        import givenclause.embeddings as module

        fetches = []
        lock = threading.Lock()
        original = module.stub_vector

        def counting(expression, dimension):
            with lock:
                fetches.append(expression)
            return original(expression, dimension)

        monkeypatch.setattr(module, "stub_vector", counting)
        client = EmbeddingClient(url=stub_server.url, dimension=16)
        threads = [
            threading.Thread(target=client.embed, args=("r(s, t)",)) for _ in range(8)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert fetches.count("r(s, t)") == 1
        assert client.stats.hits == 7

    def test_embed_clause_helper(self, stub_server):
        client = EmbeddingClient(url=stub_server.url, dimension=16)
        assert client.embed_clause("a = b") == client.embed("a == b")

    def test_env_var_configures_url(self, stub_server, monkeypatch):
        monkeypatch.setenv("GIVENCLAUSE_EMBEDDING_URL", stub_server.url)
        client = EmbeddingClient(dimension=16)
        assert client.embed("p") == stub_vector("p", 16)

    def test_missing_url_is_an_error(self, monkeypatch):
        monkeypatch.delenv("GIVENCLAUSE_EMBEDDING_URL", raising=False)
        with pytest.raises(EmbeddingServiceError):
            EmbeddingClient()
