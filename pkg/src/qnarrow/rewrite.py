"""Graded term rewriting systems and the quantitative rewrite relation.

A rewrite step at position p with a rule of degree d contributes the degree
grade(p)(d), the rule degree amplified by the argument sensitivities along
the path to p.  Accumulated trace degrees combine by the quantale tensor
and can only move downward in the quantale order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .quantale import QuantaleValue, cbe_apply, cbe_equal, q_leq, q_tensor
from .term import (
    App,
    EQ_SYMBOL,
    FreshCounter,
    Position,
    Signature,
    Substitution,
    Term,
    TRUE_SYMBOL,
    Var,
    fresh_variant,
    fun_positions,
    grade_of_position,
    grade_of_var,
    is_ground,
    is_linear,
    is_prefix,
    max_var_index,
    replace_at,
    subterm_at,
    vars_of,
)
from .unify import match


class TrsError(ValueError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    """A rule `degree : lhs -> rhs` with the usual variable conditions."""

    degree: QuantaleValue
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if isinstance(self.lhs, Var):
            raise TrsError(f"rule left-hand side is a variable: {self.lhs}")
        if not vars_of(self.rhs) <= vars_of(self.lhs):
            raise TrsError(f"rule introduces variables on the right: {self}")

    def __str__(self):
        return f"{self.degree} : {self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class RuleAttributes:
    left_linear: bool
    right_linear: bool
    left_ground: bool
    right_ground: bool
    balanced: bool


@dataclass(frozen=True)
class TrsReport:
    per_rule: tuple[RuleAttributes, ...]
    confluent_declared: bool

    def _all(self, attr: str) -> bool:
        return all(getattr(r, attr) for r in self.per_rule)

    @property
    def left_linear(self) -> bool:
        return self._all("left_linear")

    @property
    def right_linear(self) -> bool:
        return self._all("right_linear")

    @property
    def left_ground(self) -> bool:
        return self._all("left_ground")

    @property
    def right_ground(self) -> bool:
        return self._all("right_ground")

    @property
    def balanced(self) -> bool:
        return self._all("balanced")


class GradedTrs:
    """A finite set of degree-carrying rewrite rules over a graded signature.

    Confluence is a declared attribute, never verified here.
    """

    def __init__(self, signature: Signature, rules, confluent: bool = False):
        self.signature = signature
        self.rules = tuple(rules)
        self.confluent = confluent
        for rule in self.rules:
            if rule.degree.quantale is not signature.quantale:
                raise TrsError(f"rule degree {rule.degree} not in {signature.quantale.value}")

    @property
    def quantale(self):
        return self.signature.quantale

    @cached_property
    def report(self) -> TrsReport:
        return check_trs(self)

    @cached_property
    def goal_signature(self) -> Signature:
        """The signature extended with the reserved symbols, under which
        calculus goals (which carry `=?` at the root) are graded."""
        return self.signature if self.signature.is_extended else self.signature.extend()

    def __repr__(self):
        return f"GradedTrs({self.signature.quantale.value}, {len(self.rules)} rules)"


def check_trs(trs: GradedTrs) -> TrsReport:
    """Per-rule and global attribute report (linearity, groundness, balance).

    The mandatory variable conditions are enforced by the RewriteRule
    constructor; everything reported here is informational.
    """
    per_rule = []
    for rule in trs.rules:
        touched = vars_of(rule.lhs) | vars_of(rule.rhs)
        balanced = all(
            cbe_equal(
                trs.quantale,
                grade_of_var(trs.signature, rule.lhs, x),
                grade_of_var(trs.signature, rule.rhs, x),
            )
            for x in touched
        )
        per_rule.append(RuleAttributes(
            left_linear=is_linear(rule.lhs),
            right_linear=is_linear(rule.rhs),
            left_ground=is_ground(rule.lhs),
            right_ground=is_ground(rule.rhs),
            balanced=balanced,
        ))
    return TrsReport(tuple(per_rule), trs.confluent)


def extend_trs(trs: GradedTrs) -> GradedTrs:
    """The joinability extension: adds `=?`, `true`, and the unit-degree
    rule rewriting `x =? x` to `true`."""
    if trs.signature.is_extended:
        raise TrsError("rewrite system is already extended")
    x = Var("x")
    join_rule = RewriteRule(trs.quantale.unit, App(EQ_SYMBOL, (x, x)), App(TRUE_SYMBOL))
    return GradedTrs(trs.signature.extend(), trs.rules + (join_rule,), trs.confluent)


@dataclass(frozen=True)
class RewriteStep:
    """One single-step rewrite: where, by which rule, and at what degree."""

    position: Position
    rule_index: int
    subst: Substitution
    degree: QuantaleValue
    result: Term


def rewrite_steps(trs: GradedTrs, s: Term) -> list[RewriteStep]:
    """The complete (finite) list of single-step rewrites from s."""
    counter = FreshCounter(max_var_index([s]) + 1)
    steps = []
    for p in fun_positions(s):
        sub = subterm_at(s, p)
        grade = grade_of_position(trs.signature, s, p)
        for i, rule in enumerate(trs.rules):
            lhs, rhs = fresh_variant((rule.lhs, rule.rhs), counter)
            matcher = match(lhs, sub)
            if matcher is None:
                continue
            steps.append(RewriteStep(
                position=p,
                rule_index=i,
                subst=matcher,
                degree=cbe_apply(grade, rule.degree),
                result=replace_at(s, p, matcher.apply(rhs)),
            ))
    return steps


def innermost_rewrite_steps(trs: GradedTrs, s: Term) -> list[RewriteStep]:
    """Steps whose redex has no redex strictly below it."""
    steps = rewrite_steps(trs, s)
    redexes = {st.position for st in steps}
    return [st for st in steps
            if not any(p != st.position and is_prefix(st.position, p) for p in redexes)]


Trace = tuple[RewriteStep, ...]
ReachEntry = tuple[QuantaleValue, Trace]


def rewrite_search(trs: GradedTrs, start: Term, max_steps: int,
                   threshold: Optional[QuantaleValue] = None,
                   innermost: bool = False) -> dict[Term, list[ReachEntry]]:
    """All terms reachable in at most max_steps rewrite steps.

    For each reached term, keeps the order-maximal accumulated degrees found
    (a singleton on totally ordered quantales) with one witnessing trace
    each.  Branches whose accumulated degree drops below the threshold are
    pruned, which is sound because the tensor is deflationary.
    """
    expand = innermost_rewrite_steps if innermost else rewrite_steps
    unit = trs.quantale.unit
    # Entries per term: (degree, depth reached, trace).  A candidate is
    # redundant only if some entry is at least as good in degree *and* was
    # reached at most as deep, since leftover depth can still pay off.
    book: dict[Term, list[tuple[QuantaleValue, int, Trace]]] = {start: [(unit, 0, ())]}
    frontier: list[tuple[Term, QuantaleValue, Trace]] = [(start, unit, ())]
    for depth in range(1, max_steps + 1):
        next_frontier = []
        for term, degree, trace in frontier:
            for step in expand(trs, term):
                new_degree = q_tensor(degree, step.degree)
                if threshold is not None and not q_leq(threshold, new_degree):
                    continue
                entries = book.setdefault(step.result, [])
                if any(q_leq(new_degree, d) and dep <= depth for d, dep, _ in entries):
                    continue
                new_trace = trace + (step,)
                entries[:] = [(d, dep, tr) for d, dep, tr in entries
                              if not (q_leq(d, new_degree) and dep >= depth)]
                entries.append((new_degree, depth, new_trace))
                next_frontier.append((step.result, new_degree, new_trace))
        frontier = next_frontier
        if not frontier:
            break
    result: dict[Term, list[ReachEntry]] = {}
    for term, entries in book.items():
        maximal = [(d, tr) for d, dep, tr in entries
                   if not any(q_leq(d, d2) and d != d2 for d2, _, _ in entries)]
        seen: set[QuantaleValue] = set()
        unique = []
        for d, tr in maximal:
            if d not in seen:
                seen.add(d)
                unique.append((d, tr))
        result[term] = unique
    return result


def joinable(trs: GradedTrs, t: Term, s: Term, max_steps: int,
             threshold: Optional[QuantaleValue] = None) -> Optional[ReachEntry]:
    """Best degree at which t and s rewrite to a common term within the
    bound, found by searching `t =? s` for `true` over the extended system."""
    extended = trs if trs.signature.is_extended else extend_trs(trs)
    goal = App(TRUE_SYMBOL)
    reached = rewrite_search(extended, App(EQ_SYMBOL, (t, s)), max_steps, threshold)
    entries = reached.get(goal)
    if not entries:
        return None
    best = entries[0]
    for entry in entries[1:]:
        if q_leq(best[0], entry[0]):
            best = entry
    return best
