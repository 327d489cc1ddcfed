"""The brute-force conversion oracle and the conjecture probe."""

import random
from collections import deque

import pytest

from qnarrow import (
    App,
    GradedTrs,
    OracleBounds,
    Quantale,
    RewriteRule,
    Signature,
    Substitution,
    best_conversion_degree,
    check_trs,
    conjecture_probe,
    enumerate_best_unifiers,
    q_geq,
    q_tensor,
    rewrite_steps,
    verify_solution,
)
from qnarrow.oracle import (
    CONFIRMED,
    INCONCLUSIVE,
    OracleError,
    REFUTED,
    SystemConfig,
    _edges_from,
    random_linear_problem,
    random_system,
)

from conftest import S, X, Z, num

L = Quantale.LAWVERE


def f3(*ts):
    return App("f", tuple(ts))


class TestBestConversionDegree:
    def test_cubic_optimum(self, cubic):
        a, b, c, d = (App(n) for n in "abcd")
        out = best_conversion_degree(cubic, f3(c, c, c), f3(a, b, d))
        assert out.degree == L.degree(3)
        assert out.optimal
        # the witness path multiplies out to the reported degree
        acc = L.unit
        for edge in out.path:
            acc = q_tensor(acc, edge.degree)
        assert acc == L.degree(3)

    def test_same_term_unit(self, cubic):
        t = f3(App("a"), App("b"), App("c"))
        out = best_conversion_degree(cubic, t, t)
        assert out.degree == L.unit and out.path == [] and out.optimal

    def test_unbalanced_identity_conversion(self, unbalanced):
        out = best_conversion_degree(unbalanced, App("f", (App("a"),)),
                                     App("g", (App("b"),)))
        assert out.degree == L.degree(1) and out.optimal

    def test_inconvertible_is_exhausted(self):
        sig = Signature(L, {"a": (), "b": (), "c": ()})
        trs = GradedTrs(sig, (RewriteRule(L.degree(1), App("a"), App("b")),))
        out = best_conversion_degree(trs, App("a"), App("c"))
        assert out.degree is None and out.exhausted

    def test_non_ground_rejected(self, cubic):
        with pytest.raises(OracleError):
            best_conversion_degree(cubic, X, App("a"))

    def test_matches_exhaustive_enumeration(self, cubic, chain, unbalanced):
        # on these systems the conversion component of every sampled pair is
        # finite, so a plain path enumeration of sufficient depth is complete
        # and the oracle must agree with it exactly
        for trs in (cubic, chain, unbalanced):
            consts = [App(c) for c in trs.signature.constants()]
            rng = random.Random(1)
            pairs = [(rng.choice(consts), rng.choice(consts)) for _ in range(6)]
            if trs.signature.has("f") and len(trs.signature.arity("f")) == 3:
                pairs += [(f3(*[rng.choice(consts) for _ in range(3)]),
                           f3(*[rng.choice(consts) for _ in range(3)]))
                          for _ in range(4)]
            for t, s in pairs:
                expected = _exhaustive_best(trs, t, s, 8)
                out = best_conversion_degree(trs, t, s)
                assert out.degree == expected
                if expected is not None:
                    assert out.optimal

    def test_all_quantales_match_exhaustive_on_finite_graphs(self):
        """Constant-only systems have finite conversion graphs; the
        bidirectional stop rule must be exact for every tensor (addition,
        max, min, product, conjunction)."""
        rng = random.Random(53)
        for trial in range(40):
            q = list(Quantale)[trial % 5]
            cfg = SystemConfig(quantale=q, n_constants=3, n_unary=0,
                               n_binary=0, max_rules=3)
            trs = random_system(rng, cfg)
            consts = [App(c) for c in trs.signature.constants()]
            for t in consts:
                for s in consts:
                    expected = _exhaustive_best(trs, t, s, 6)
                    out = best_conversion_degree(trs, t, s)
                    assert out.degree == expected, (trs.rules, t, s)
                    if expected is None:
                        assert out.exhausted
                    else:
                        assert out.optimal

    def test_edges_agree_with_rewriter(self, cubic, unbalanced, peano):
        for trs in (cubic, unbalanced, peano):
            consts = [App(c) for c in trs.signature.constants()]
            if trs is unbalanced:
                sample = [App("f", (App("a"),)), App("g", (App("b"),))]
            elif trs is peano:
                sample = [num(2), App("+", (num(1), num(1)))]
            else:
                sample = [f3(App("a"), App("b"), App("c"))]
            pool = tuple(consts)
            for u in sample:
                edges, _ = _edges_from(trs, u, pool)
                forward_from_u = {(st.position, st.rule_index, st.result, st.degree)
                                  for st in rewrite_steps(trs, u)}
                for edge in edges:
                    if edge.forward:
                        assert (edge.position, edge.rule_index, edge.target,
                                edge.degree) in forward_from_u
                    else:
                        back = {(st.position, st.rule_index, st.result, st.degree)
                                for st in rewrite_steps(trs, edge.target)}
                        assert (edge.position, edge.rule_index, u,
                                edge.degree) in back


def _exhaustive_best(trs, t, s, max_len):
    """Plain breadth-first path enumeration over the symmetric graph."""
    consts = tuple(App(c) for c in trs.signature.constants())
    best = None
    frontier = deque([(t, trs.quantale.unit)])
    seen = {}
    for _ in range(max_len + 1):
        nxt = deque()
        while frontier:
            node, degree = frontier.popleft()
            if node == s and (best is None or q_geq(degree, best)):
                best = degree
            prev = seen.get(node)
            if prev is not None and q_geq(prev, degree):
                continue
            seen[node] = degree
            edges, _ = _edges_from(trs, node, consts)
            for edge in edges:
                nxt.append((edge.target, q_tensor(degree, edge.degree)))
        frontier = nxt
    return best


class TestVerify:
    def test_cubic_confirmed(self, cubic):
        verdict = verify_solution(cubic, f3(X, X, X),
                                  f3(App("a"), App("b"), App("d")),
                                  Substitution({X: App("d")}), L.degree(4))
        assert verdict.status == CONFIRMED

    def test_peano_solution_confirmed(self, peano):
        verdict = verify_solution(
            peano, App("+", (X, S(Z))), App("+", (App("+", (X, X)), X)),
            Substitution({X: Z}), L.degree(1),
            bounds=OracleBounds(max_nodes=4000, max_term_size=10))
        assert verdict.status == CONFIRMED

    def test_better_than_possible_claim_refuted(self, cubic):
        verdict = verify_solution(cubic, f3(X, X, X),
                                  f3(App("a"), App("b"), App("d")),
                                  Substitution({X: App("d")}), L.degree(3))
        assert verdict.status == REFUTED

    def test_worse_claim_still_true(self, cubic):
        # degree statements are downward closed in the quantale order
        verdict = verify_solution(cubic, f3(X, X, X),
                                  f3(App("a"), App("b"), App("d")),
                                  Substitution({X: App("d")}), L.degree(5))
        assert verdict.status == CONFIRMED

    def test_tiny_bounds_inconclusive(self, peano):
        verdict = verify_solution(
            peano, App("+", (X, S(Z))), App("+", (App("+", (X, X)), X)),
            Substitution({X: Z}), L.degree(1),
            bounds=OracleBounds(max_nodes=2, max_term_size=4))
        assert verdict.status == INCONCLUSIVE

    def test_open_solution_grounded_over_pool(self, peano):
        # x stays free after the substitution; groundings come from the pool
        verdict = verify_solution(
            peano, S(X), S(X), Substitution(), L.unit,
            pool=[Z, S(Z)], bounds=OracleBounds(max_nodes=500, max_term_size=6))
        assert verdict.status == CONFIRMED
        assert len(verdict.checks) == 2


class TestEnumerate:
    def test_cubic_ranking(self, cubic):
        a, b, c, d = (App(n) for n in "abcd")
        ranked = enumerate_best_unifiers(
            cubic, f3(X, X, X), f3(a, b, d), [a, b, c, d])
        assert ranked[0] == (Substitution({X: c}), L.degree(3))
        assert {(str(s), str(deg)) for s, deg in ranked[1:]} == {
            ("{x -> a}", "4"), ("{x -> b}", "4"), ("{x -> d}", "4")}

    def test_chain_ranking(self, chain):
        a, b, c = App("a"), App("b"), App("c")
        ranked = enumerate_best_unifiers(chain, f3(X, X, X), f3(a, b, c), [a, b, c])
        assert ranked[0] == (Substitution({X: b}), L.degree(2))
        assert (Substitution({X: c}), L.degree(3)) in ranked[1:]

    def test_empty_pool_with_variables(self, cubic):
        assert enumerate_best_unifiers(cubic, f3(X, X, X),
                                       f3(App("a"), App("b"), App("d")), []) == []

    def test_ground_problem_ignores_pool(self, cubic):
        a = App("a")
        ranked = enumerate_best_unifiers(cubic, a, a, [])
        assert ranked == [(Substitution(), L.unit)]


class TestScaledSoundness:
    def test_solver_confirmed_under_nontrivial_sensitivities(self):
        """Non-identity argument CBEs amplify degrees on both sides of the
        check; every solver claim must still hold on ground instances."""
        from qnarrow import solve

        rng = random.Random(777)
        bounds = OracleBounds(max_nodes=1500, max_term_depth=8)
        confirmed = 0
        for trial in range(40):
            q = list(Quantale)[trial % 5]
            cfg = SystemConfig(quantale=q, max_rules=3, n_constants=2,
                               n_unary=2, n_binary=1, nontrivial_cbes=True)
            trs = random_system(rng, cfg)
            t, s = random_linear_problem(rng, trs)
            result = solve(trs, t, s, max_steps=3, max_solutions=3,
                           max_configs=1500)
            for sol in result.solutions:
                verdict = verify_solution(trs, t, s, sol.subst, sol.degree,
                                          bounds=bounds, max_groundings=3)
                assert verdict.status != REFUTED, (trs.rules, t, s, sol)
                confirmed += verdict.status == CONFIRMED
        assert confirmed > 10


class TestProbe:
    def test_zero_trials(self):
        report = conjecture_probe(SystemConfig(), 0)
        assert report.trials == [] and report.flagged == []

    def test_unbalanced_system_flags_gap(self, unbalanced):
        report = conjecture_probe(
            SystemConfig(), 1, max_steps=3,
            systems=[(unbalanced, App("f", (App("a"),)), App("g", (App("b"),)))])
        assert len(report.trials) == 1
        trial = report.trials[0]
        assert trial.flagged
        identity_gaps = [(s, d) for s, d in trial.gaps if s.is_identity]
        assert identity_gaps and identity_gaps[0][1] == L.degree(1)
        assert (Substitution(), L.degree(3)) in trial.basic

    def test_right_ground_trials_never_flag(self):
        cfg = SystemConfig(right_ground=True)
        report = conjecture_probe(cfg, 10, max_steps=3, seed=5)
        assert report.flagged == []


class TestGenerator:
    def test_gates_respected(self):
        rng = random.Random(41)
        for gate in ("right_ground", "right_linear", "balanced"):
            cfg = SystemConfig(**{gate: True})
            for _ in range(10):
                trs = random_system(rng, cfg)
                report = check_trs(trs)
                assert getattr(report, gate)

    def test_problem_is_linear(self):
        rng = random.Random(43)
        cfg = SystemConfig()
        from qnarrow import is_linear
        for _ in range(20):
            trs = random_system(rng, cfg)
            t, s = random_linear_problem(rng, trs)
            assert is_linear(App("", (t, s)))
