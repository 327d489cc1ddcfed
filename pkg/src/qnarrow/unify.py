"""Syntactic first-order unification and one-sided matching."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .term import App, Substitution, Term, Var, vars_of

Equation = tuple[Term, Term]
EquationSet = Iterable[Equation]


@dataclass(frozen=True)
class UnifyFailure:
    """Why a unification problem has no solution."""

    reason: str  # "clash" or "occurs"
    left: Term
    right: Term

    def __str__(self):
        return f"{self.reason}: {self.left} vs {self.right}"


def mgu(equations: EquationSet) -> Union[Substitution, UnifyFailure]:
    """Most general idempotent unifier of a set of term pairs.

    Transformation-style solver with an eager occurs check: the worklist and
    the solved bindings are kept fully instantiated, so the result is
    idempotent by construction and most general up to renaming.
    """
    work: list[Equation] = list(equations)
    solved: dict[Var, Term] = {}
    while work:
        a, b = work.pop()
        if a == b:
            continue
        if isinstance(a, Var) or isinstance(b, Var):
            x, t = (a, b) if isinstance(a, Var) else (b, a)
            # bind the fresher of two variables, keeping problem variables
            # (and therefore the rendered output) stable under renaming
            if isinstance(t, Var) and (t.index, t.name) > (x.index, x.name):
                x, t = t, x
            if x in vars_of(t):
                return UnifyFailure("occurs", x, t)
            one = Substitution({x: t})
            work = [(one.apply(u), one.apply(v)) for u, v in work]
            solved = {y: one.apply(u) for y, u in solved.items()}
            solved[x] = t
            continue
        if a.symbol != b.symbol or len(a.args) != len(b.args):
            return UnifyFailure("clash", a, b)
        work.extend(zip(a.args, b.args))
    return Substitution(solved)


def unifiable(equations: EquationSet) -> bool:
    return isinstance(mgu(equations), Substitution)


def match(pattern: Term, subject: Term) -> Optional[Substitution]:
    """Substitution sending the pattern to the subject, or None.

    Subject variables are rigid.  The pattern must not share variables with
    the subject (use a fresh variant), which keeps the matcher idempotent.
    """
    bindings: dict[Var, Term] = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            if p in bindings:
                if bindings[p] != s:
                    return None
            elif p != s:
                bindings[p] = s
            continue
        if not isinstance(s, App) or p.symbol != s.symbol or len(p.args) != len(s.args):
            return None
        stack.extend(zip(p.args, s.args))
    return Substitution(bindings)
