#!/usr/bin/env python3
"""Solving quantitative unification problems by narrowing.

The solver searches derivations of a four-rule calculus over
configurations  goal; constraints; substitution; degree  and emits every
unifier whose degree clears the threshold.
"""

from pathlib import Path

from qnarrow import parse_file, solve
from qnarrow.frontend import render_solution, render_trace

HERE = Path(__file__).resolve().parent


def show(name, **kwargs):
    pf = parse_file(HERE / f"{name}.gtrs")
    problem = pf.problems[0]
    print(f"--- {name}: {problem.left} =? {problem.right}"
          + (f"  threshold {problem.threshold}" if problem.threshold else ""))
    result = solve(pf.trs, problem.left, problem.right,
                   threshold=problem.threshold, **kwargs)
    for sol in result.solutions:
        print("   ", render_solution(sol))
    print(f"    (search {result.stopped}, {result.configs_expanded} configurations)")
    return result


print("=== Approximate solutions of x + 1 = 3x over the naturals ===")
print("Within distance 1 there are exactly two: x = 0 and x = 1.")
result = show("peano", max_steps=12)

print()
print("Calculus trace of the first solution:")
for line in render_trace(result.solutions[0].trace):
    print("   ", line)

print()
print("=== What narrowing cannot find ===")
print("The best unifier of f(x,x,x) =? f(a,b,d) is {x -> c} at degree 3,")
print("but it needs backward steps; forward narrowing only reaches {x -> d}:")
show("cubic", max_steps=8)

print()
print("Same effect with a two-rule chain (best is {x -> b} at 2):")
show("chain", max_steps=8)

print()
print("=== Unbalanced sensitivities make basic narrowing suboptimal ===")
print("The identity solves f(a) =? g(b) at degree 1, but the degree-1 route")
print("hides the argument behind the substitution where narrowing cannot")
print("touch it, so the solver pays the amplified price:")
show("unbalanced", max_steps=6)

print()
print("=== Other strategies and orders ===")
show("cubic", max_steps=8, strategy="lazy", order="best-first")
