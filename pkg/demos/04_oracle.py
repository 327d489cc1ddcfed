#!/usr/bin/env python3
"""The brute-force oracle: ranking unifiers and auditing the solver.

The oracle runs bidirectional best-first search over the ground conversion
graph, sharing no code path with the solver, and qualifies every verdict
by its exploration bounds.
"""

from pathlib import Path

from qnarrow import (
    OracleBounds,
    best_conversion_degree,
    conjecture_probe,
    enumerate_best_unifiers,
    parse_file,
    solve,
    verify_solution,
)
from qnarrow.frontend import parse_term_text, render_solution
from qnarrow.oracle import SystemConfig

HERE = Path(__file__).resolve().parent

cubic = parse_file(HERE / "cubic.gtrs")
problem = cubic.problems[0]
pool = [parse_term_text(cubic, c) for c in "abcd"]

print("=== Ranking every pool unifier of f(x,x,x) =? f(a,b,d) ===")
for rank, (sigma, degree) in enumerate(
        enumerate_best_unifiers(cubic.trs, problem.left, problem.right, pool), 1):
    print(f"  {rank}. {sigma} degree {degree}")

print()
print("=== Verifying solver output ===")
result = solve(cubic.trs, problem.left, problem.right,
               threshold=problem.threshold, max_steps=8)
for sol in result.solutions:
    verdict = verify_solution(cubic.trs, problem.left, problem.right,
                              sol.subst, sol.degree)
    print(f"  {verdict.status}: {render_solution(sol)}")

print()
print("A claim better than the proven optimum is refuted:")
claim = result.solutions[0]
verdict = verify_solution(cubic.trs, problem.left, problem.right,
                          claim.subst, cubic.quantale.degree(3))
print(f"  {verdict.status}: {claim.subst} at degree 3 (optimum is 4)")

print()
print("=== Conversion paths as witnesses ===")
unbal = parse_file(HERE / "unbalanced.gtrs")
fa = parse_term_text(unbal, "f(a)")
gb = parse_term_text(unbal, "g(b)")
outcome = best_conversion_degree(unbal.trs, fa, gb)
print(f"f(a) converts to g(b) at degree {outcome.degree} "
      f"(proven optimal: {outcome.optimal}):")
for edge in outcome.path:
    arrow = "->" if edge.forward else "<-"
    print(f"  {edge.source} {arrow} {edge.target} @ {edge.degree}")
print("The solver's best was 3: narrowing is incomplete here, and the")
print("oracle documents exactly how much it misses.")

print()
print("=== Probing the lifting conjecture ===")
print("Feeding the unbalanced system to the probe (its balance gate off)")
report = conjecture_probe(SystemConfig(), 1, max_steps=3,
                          systems=[(unbal.trs, fa, gb)])
trial = report.trials[0]
print(f"flagged: {trial.flagged}; ordinary reaches {sorted(map(str, {d for _, d in trial.ordinary}))}, "
      f"basic only {sorted(map(str, {d for _, d in trial.basic}))}")

print()
print("Balanced right-linear random trials (the conjecture's setting):")
report = conjecture_probe(SystemConfig(balanced=True, right_linear=True),
                          20, max_steps=3, seed=7)
print(f"  {len(report.trials)} trials, {len(report.flagged)} flagged "
      "(no flags proves nothing, but a flag would be a counterexample candidate)")
