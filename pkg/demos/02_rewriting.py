#!/usr/bin/env python3
"""Graded rewriting: steps carry degrees amplified by their context.

Uses the natural-number system from peano.gtrs: the + rules are free and
dropping a successor costs 1, so conversion degree is numeric distance.
"""

from pathlib import Path

from qnarrow import (
    innermost_rewrite_steps,
    joinable,
    parse_file,
    rewrite_search,
    rewrite_steps,
)
from qnarrow.frontend import parse_term_text, render_rewrite_trace

HERE = Path(__file__).resolve().parent

peano = parse_file(HERE / "peano.gtrs")
term = parse_term_text(peano, "+(S(Z), S(S(Z)))")   # 1 + 2

print("=== Single steps from 1 + 2 ===")
for st in rewrite_steps(peano.trs, term):
    print(f"  at {'.'.join(map(str, st.position)) or '^'} "
          f"by rule {st.rule_index + 1}: -> {st.result} @ {st.degree}")

print()
print("=== Everything reachable in 5 steps, with best degrees ===")
reached = rewrite_search(peano.trs, term, 5)
for t, entries in sorted(reached.items(), key=lambda kv: str(kv[0])):
    for degree, trace in entries:
        print(f"  {t}  @ {degree}  ({len(trace)} steps)")

print()
print("=== Joinability: 1+2 meets 2 at distance 1 ===")
from qnarrow.term import App, EQ_SYMBOL

two = parse_term_text(peano, "S(S(Z))")
degree, trace = joinable(peano.trs, term, two, 10)
print(f"degree {degree}; witnessing trace on the equation term:")
for line in render_rewrite_trace(App(EQ_SYMBOL, (term, two)), trace):
    print("  " + line)

print()
print("=== Innermost rewriting can be forced into costly steps ===")
inn = parse_file(HERE / "innermost.gtrs")
fa = parse_term_text(inn, "f(a)")
print("innermost only:", [(str(st.result), str(st.degree))
                          for st in innermost_rewrite_steps(inn.trs, fa)])
print("unrestricted:  ", [(str(st.result), str(st.degree))
                          for st in rewrite_steps(inn.trs, fa)])
print("the root step reaches f(b) at degree 0; innermost pays 2")
