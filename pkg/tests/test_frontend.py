"""The rule-file format, diagnostics, rendering, and the CLI."""

import json
from pathlib import Path

import pytest

from qnarrow import App, GtrsError, Quantale, Substitution, Var, parse, solve
from qnarrow.cli import main
from qnarrow.frontend import (
    parse_term_text,
    parse_trace_step_header,
    render_problem_file,
    render_solution,
    render_trace,
)
from qnarrow.narrow import Solution

DEMOS = Path(__file__).resolve().parent.parent / "demos"

PEANO_TEXT = (DEMOS / "peano.gtrs").read_text()


class TestParse:
    def test_peano_file(self):
        pf = parse(PEANO_TEXT)
        assert pf.quantale is Quantale.LAWVERE
        assert [v.name for v in pf.variables] == ["x", "y"]
        assert pf.signature.arity("+") == pf.signature.arity("+")
        assert len(pf.trs.rules) == 3
        assert len(pf.problems) == 1
        problem = pf.problems[0]
        assert problem.threshold == Quantale.LAWVERE.degree(1)
        assert str(problem.left) == "+(x, S(Z))"

    def test_round_trip_is_identity_on_normal_forms(self):
        for name in ("peano", "cubic", "chain", "unbalanced", "innermost", "fuzzy"):
            text = (DEMOS / f"{name}.gtrs").read_text()
            once = parse(text)
            rendered = render_problem_file(once)
            twice = parse(rendered)
            assert render_problem_file(twice) == rendered
            assert twice.quantale is once.quantale
            assert twice.trs.rules == once.trs.rules
            assert twice.problems == once.problems
            assert twice.signature == once.signature

    def test_term_text(self):
        pf = parse(PEANO_TEXT)
        t = parse_term_text(pf, "+(S(Z), x)")
        assert t == App("+", (App("S", (App("Z"),)), Var("x")))

    def test_random_files_round_trip(self):
        import random
        from qnarrow.frontend import Problem, ProblemFile
        from qnarrow.oracle import SystemConfig, random_system, random_linear_problem
        from qnarrow import vars_of

        rng = random.Random(61)
        for trial in range(100):
            q = list(Quantale)[trial % 5]
            cfg = SystemConfig(quantale=q, n_constants=2, n_unary=1, n_binary=1,
                               nontrivial_cbes=True)
            trs = random_system(rng, cfg)
            left, right = random_linear_problem(rng, trs)
            threshold = q.unit if rng.random() < 0.5 else None
            used = set()
            for rule in trs.rules:
                used |= vars_of(rule.lhs) | vars_of(rule.rhs)
            used |= vars_of(left) | vars_of(right)
            pf = ProblemFile(q, tuple(sorted(used, key=lambda v: v.name)),
                             trs.signature, trs,
                             (Problem(left, right, threshold),))
            rendered = render_problem_file(pf)
            back = parse(rendered)
            assert back.quantale is q
            assert back.signature == trs.signature
            assert back.trs.rules == trs.rules
            assert back.problems == pf.problems
            assert render_problem_file(back) == rendered

    def test_trailing_semicolons_tolerated(self):
        pf = parse("quantale lawvere\nvar x y;\nfun a/0;\n"
                    "rule 1 : a -> a;\nsolve a =? a;\n")
        assert [v.name for v in pf.variables] == ["x", "y"]
        assert len(pf.problems) == 1


def expect_error(text, fragment):
    with pytest.raises(GtrsError) as err:
        parse(text)
    assert fragment in str(err.value), str(err.value)
    return err.value


class TestDiagnostics:
    def test_unknown_symbol(self):
        expect_error("quantale lawvere\nfun a/0\nrule 1 : g(a) -> a\n",
                     "unknown symbol 'g'")

    def test_arity_mismatch(self):
        expect_error("quantale lawvere\nfun a/0\nfun f/2\nrule 1 : f(a) -> a\n",
                     "arity mismatch")

    def test_undeclared_variable(self):
        expect_error("quantale lawvere\nfun f/1\nfun a/0\nrule 1 : f(z) -> a\n",
                     "unknown symbol 'z'")

    def test_inadmissible_degree(self):
        expect_error("quantale fuzzy-godel\nfun a/0\nfun b/0\nrule 2 : a -> b\n",
                     "inadmissible degree")
        expect_error("quantale bool\nfun a/0\nfun b/0\nrule 1/2 : a -> b\n",
                     "inadmissible degree")

    def test_inadmissible_cbe(self):
        expect_error("quantale fuzzy-godel\nfun f/1 : (scale(3))\n",
                     "not admitted")
        expect_error("quantale lawvere\nfun f/1 : (pow(2))\n",
                     "not admitted")

    def test_lhs_variable_rule(self):
        expect_error("quantale lawvere\nvar x\nfun a/0\nrule 1 : x -> a\n",
                     "must not be a variable")

    def test_extra_rhs_variable(self):
        expect_error("quantale lawvere\nvar x y\nfun f/1\n"
                     "rule 1 : f(x) -> f(y)\n",
                     "introduces variables")

    def test_reserved_tokens(self):
        expect_error("quantale lawvere\nfun true/0\n", "reserved")
        expect_error("quantale lawvere\nvar true\n", "reserved")
        expect_error("quantale lawvere\nfun a/0\nrule 1 : =?(a, a) -> a\n",
                     "reserved")

    def test_position_reported(self):
        err = expect_error("quantale lawvere\nfun a/0\nrule 1 : g(a) -> a\n",
                           "unknown symbol")
        assert err.line == 3 and err.col > 1

    def test_missing_quantale(self):
        expect_error("fun a/0\n", "quantale must be declared first")

    def test_duplicate_declarations(self):
        expect_error("quantale lawvere\nfun a/0\nfun a/1\n", "already declared")
        expect_error("quantale lawvere\nvar x\nvar x\n", "already declared")


class TestRendering:
    def test_solution_line(self):
        sol = Solution(Substitution({Var("x"): App("S", (App("Z"),))}),
                       Quantale.LAWVERE.degree(1), ())
        assert render_solution(sol) == "solution {x -> S(Z)} degree 1"

    def test_trace_round_trip_headers(self, cubic):
        result = solve(cubic, Var("x"), App("d"), max_steps=2)
        assert result.solutions
        for line in render_trace(result.solutions[0].trace):
            tag, pos, rule = parse_trace_step_header(line)
            assert tag in ("LP", "SU", "Cla", "Con")

    def test_trace_replay_reproduces_configuration(self, cubic):
        from qnarrow import FreshCounter, bq_step, initial_config
        from qnarrow.narrow import TRUE_TERM, canonical_subst
        x = Var("x")
        result = solve(cubic, App("f", (x, x, x)),
                       App("f", (App("a"), App("b"), App("d"))),
                       strategy="lazy", max_steps=5, max_solutions=1)
        trace = result.solutions[0].trace
        headers = [parse_trace_step_header(line) for line in render_trace(trace)]
        cfg = initial_config(cubic, App("f", (x, x, x)),
                             App("f", (App("a"), App("b"), App("d"))))
        counter = FreshCounter(500)
        for tag, pos, rule in headers:
            candidates = [nxt for tg, nxt in bq_step(cfg, cubic, counter)
                          if tg == tag and nxt is not None
                          and (tag != "LP" or (nxt.trace[-1].position == pos
                                               and nxt.trace[-1].rule_index == rule))]
            assert candidates
            cfg = candidates[0]
        assert cfg.goal == TRUE_TERM and not cfg.constraints
        assert canonical_subst(cfg.subst.restrict({x})) == result.solutions[0].subst
        assert cfg.degree == result.solutions[0].degree


class TestCli:
    def test_solve_peano(self, capsys):
        code = main(["solve", str(DEMOS / "peano.gtrs"), "--max-steps", "12"])
        out = capsys.readouterr().out
        assert code == 0
        assert "solution {x -> S(Z)} degree 1" in out
        assert "solution {x -> Z} degree 1" in out

    def test_solve_json(self, capsys):
        code = main(["solve", str(DEMOS / "cubic.gtrs"), "--max-steps", "8",
                     "--json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        problem = payload["problems"][0]
        assert problem["solutions"] == [
            {"substitution": {"x": "d"}, "degree": "4", "dominated": False}]
        assert problem["complete"] is True

    def test_solve_trace_flag(self, capsys):
        code = main(["solve", str(DEMOS / "unbalanced.gtrs"), "--trace"])
        out = capsys.readouterr().out
        assert code == 0
        assert "solution {} degree 3" in out
        assert any(line.strip().startswith("LP") for line in out.splitlines())

    def test_solve_no_problems_is_usage_error(self, tmp_path, capsys):
        path = tmp_path / "empty.gtrs"
        path.write_text("quantale lawvere\nfun a/0\n")
        assert main(["solve", str(path)]) == 2

    def test_solve_without_solutions_exits_one(self, tmp_path, capsys):
        path = tmp_path / "none.gtrs"
        path.write_text("quantale lawvere\nfun a/0\nfun b/0\n"
                        "solve a =? b threshold 0\n")
        assert main(["solve", str(path)]) == 1

    def test_parse_error_exits_two(self, tmp_path, capsys):
        path = tmp_path / "bad.gtrs"
        path.write_text("quantale lawvere\nrule 1 : g(a) -> a\n")
        assert main(["solve", str(path)]) == 2
        assert "unknown symbol" in capsys.readouterr().err

    def test_rewrite_innermost(self, capsys):
        code = main(["rewrite", str(DEMOS / "innermost.gtrs"),
                     "--term", "f(a)", "--innermost"])
        out = capsys.readouterr().out.strip().splitlines()
        assert code == 0
        assert out == ["1: f(a) -> f(b) @ 2"]

    def test_rewrite_unrestricted(self, capsys):
        code = main(["rewrite", str(DEMOS / "innermost.gtrs"), "--term", "f(a)"])
        out = capsys.readouterr().out
        assert code == 0
        assert "^: f(a) -> f(b) @ 0" in out
        assert "1: f(a) -> f(b) @ 2" in out

    def test_rewrite_search_mode(self, capsys):
        code = main(["rewrite", str(DEMOS / "innermost.gtrs"),
                     "--term", "f(a)", "--steps", "3"])
        out = capsys.readouterr().out
        assert code == 0
        assert "f(b) @ 0" in out

    def test_narrow(self, capsys):
        code = main(["narrow", str(DEMOS / "cubic.gtrs"), "--term", "f(a, b, d)",
                     "--steps", "1"])
        out = capsys.readouterr().out
        assert code == 0
        assert "f(c, b, d)  unifier {}  degree 1" in out

    def test_narrow_into_variables_finds_nothing(self, capsys):
        # variable positions are not narrowing positions
        code = main(["narrow", str(DEMOS / "cubic.gtrs"), "--term", "f(x, x, x)"])
        assert code == 1

    def test_oracle_ranking(self, capsys):
        code = main(["oracle", str(DEMOS / "cubic.gtrs"),
                     "--pool", "a,b,c,d"])
        out = capsys.readouterr().out.splitlines()
        assert code == 0
        assert out[1] == "1. {x -> c} degree 3"
        assert set(out[2:5]) == {"2. {x -> a} degree 4",
                                 "3. {x -> b} degree 4",
                                 "4. {x -> d} degree 4"}

    def test_oracle_verify(self, capsys):
        code = main(["oracle", str(DEMOS / "cubic.gtrs"),
                     "--pool", "a,b,c,d", "--verify"])
        out = capsys.readouterr().out
        assert code == 0
        assert "CONFIRMED solution {x -> d} degree 4" in out

    def test_check_report(self, capsys):
        code = main(["check", str(DEMOS / "cubic.gtrs")])
        out = capsys.readouterr().out
        assert code == 0
        assert "right-ground=yes" in out and "balanced=yes" in out

    def test_check_unbalanced(self, capsys):
        main(["check", str(DEMOS / "unbalanced.gtrs")])
        out = capsys.readouterr().out
        lines = out.splitlines()
        assert "balanced=no" in lines[0]
        assert "balanced=no" in lines[-1]

    def test_fuzzy_solve(self, capsys):
        code = main(["solve", str(DEMOS / "fuzzy.gtrs")])
        out = capsys.readouterr().out
        assert code == 0
        assert "solution {} degree 9/16" in out
