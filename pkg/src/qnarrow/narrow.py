"""Graded narrowing and the four-rule equational unification calculus.

Narrowing replaces the matching of rewriting by unification, so terms with
variables can be reduced while their variables are instantiated.  The
calculus works on configurations  goal; constraints; substitution; degree
with four rules:

  LP   rewrite a non-variable subterm of the goal by a fresh rule variant,
       record the equation between the rule's left side and the replaced
       subterm (both under the current substitution), and multiply the
       degree by the grade of the position applied to the rule degree;
  SU   discharge the constraint set by a most general unifier, composing it
       onto the substitution;
  Cla  fail when the constraint set is not unifiable;
  Con  turn a goal equation into a constraint and set the goal to true.

The goal is never instantiated, which is exactly what makes every calculus
derivation basic: content introduced through the substitution is invisible
to LP.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional

from .quantale import (
    CBE_ID,
    QuantaleValue,
    cbe_apply,
    cbe_compose,
    cbe_normalize,
    q_leq,
    q_tensor,
)
from .rewrite import GradedTrs, RewriteRule, TrsError, extend_trs
from .term import (
    App,
    EQ_SYMBOL,
    FreshCounter,
    IDENTITY,
    Position,
    RESERVED_SYMBOLS,
    ROOT,
    Substitution,
    Term,
    TRUE_SYMBOL,
    Var,
    fresh_variant,
    fun_positions,
    grade_of_position,
    is_prefix,
    iter_subterms,
    max_var_index,
    replace_at,
    subterm_at,
    vars_of,
)
from .unify import Equation, mgu, unifiable

TRUE_TERM = App(TRUE_SYMBOL)


class NarrowError(ValueError):
    pass


class NonBasicStepError(NarrowError):
    pass


# ---------------------------------------------------------------------------
# Ordinary narrowing.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NarrowStep:
    """One narrowing step: rewrite at a non-variable position through the
    most general unifier of the subterm with a fresh rule variant."""

    position: Position
    rule_index: int
    variant: RewriteRule
    unifier: Substitution
    degree: QuantaleValue
    result: Term


def narrowing_steps(trs: GradedTrs, t: Term, counter: FreshCounter) -> list[NarrowStep]:
    """All narrowing steps from t, using rule variants fresh per candidate."""
    steps = []
    for p in fun_positions(t):
        sub = subterm_at(t, p)
        grade = grade_of_position(trs.signature, t, p)
        for i, rule in enumerate(trs.rules):
            lhs, rhs = fresh_variant((rule.lhs, rule.rhs), counter)
            unifier = mgu([(sub, lhs)])
            if not isinstance(unifier, Substitution):
                continue
            steps.append(NarrowStep(
                position=p,
                rule_index=i,
                variant=RewriteRule(rule.degree, lhs, rhs),
                unifier=unifier,
                degree=cbe_apply(grade, rule.degree),
                result=unifier.apply(replace_at(t, p, rhs)),
            ))
    return steps


def basic_update(basic: frozenset[Position], p: Position, rhs: Term,
                 require_basic: bool = True) -> frozenset[Position]:
    """Basic positions after a step at p with a rule whose right side is rhs:
    drop everything at or below p, then graft the non-variable skeleton of
    the (uninstantiated) right side."""
    if require_basic and p not in basic:
        raise NonBasicStepError(f"step at non-basic position {p}")
    kept = {q for q in basic if not is_prefix(p, q)}
    grafted = {p + q for q in fun_positions(rhs)}
    return frozenset(kept | grafted)


@dataclass(frozen=True)
class NarrowingDerivation:
    """A sequence of narrowing steps together with basic-position sets."""

    start: Term
    steps: tuple[NarrowStep, ...] = ()
    basics: tuple[frozenset[Position], ...] = ()

    def __post_init__(self):
        if not self.basics:
            object.__setattr__(self, "basics", (frozenset(fun_positions(self.start)),))

    @property
    def end(self) -> Term:
        return self.steps[-1].result if self.steps else self.start

    @property
    def is_basic(self) -> bool:
        return all(step.position in basic
                   for step, basic in zip(self.steps, self.basics))

    def substitution(self) -> Substitution:
        acc = IDENTITY
        for step in self.steps:
            acc = acc.compose(step.unifier)
        return acc

    def degree(self, quantale) -> QuantaleValue:
        acc = quantale.unit
        for step in self.steps:
            acc = q_tensor(acc, step.degree)
        return acc

    def extended(self, step: NarrowStep) -> "NarrowingDerivation":
        nxt = basic_update(self.basics[-1], step.position, step.variant.rhs,
                           require_basic=False)
        return NarrowingDerivation(self.start, self.steps + (step,),
                                   self.basics + (nxt,))


def derivations(trs: GradedTrs, t: Term, max_steps: int,
                basic_only: bool = False,
                counter: Optional[FreshCounter] = None) -> Iterator[NarrowingDerivation]:
    """Every narrowing derivation from t of length at most max_steps,
    including the empty one; basic_only restricts steps to basic positions."""
    if counter is None:
        start = max_var_index([t] + [s for r in trs.rules for s in (r.lhs, r.rhs)]) + 1
        counter = FreshCounter(start)

    def walk(deriv: NarrowingDerivation) -> Iterator[NarrowingDerivation]:
        yield deriv
        if len(deriv.steps) >= max_steps:
            return
        basic = deriv.basics[-1]
        for step in narrowing_steps(trs, deriv.end, counter):
            if basic_only and step.position not in basic:
                continue
            yield from walk(deriv.extended(step))

    yield from walk(NarrowingDerivation(t))


def iterate_narrowing(trs: GradedTrs, t: Term, n: int) -> set:
    """Reachable (term, composed substitution, accumulated degree) triples
    over at most n narrowing steps; n = 0 gives (t, identity, unit)."""
    out = set()
    for deriv in derivations(trs, t, n):
        out.add((deriv.end, deriv.substitution(), deriv.degree(trs.quantale)))
    return out


# ---------------------------------------------------------------------------
# The calculus.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BqTraceStep:
    """One applied calculus rule and the configuration it produced."""

    tag: str  # "LP" | "SU" | "Cla" | "Con"
    position: Optional[Position]
    rule_index: Optional[int]
    goal: Term
    constraints: frozenset[Equation]
    subst: Substitution
    degree: QuantaleValue


@dataclass(frozen=True)
class BqConfig:
    """A calculus configuration  goal; constraints; substitution; degree
    plus the log of rules applied to reach it."""

    goal: Term
    constraints: frozenset[Equation]
    subst: Substitution
    degree: QuantaleValue
    trace: tuple[BqTraceStep, ...] = ()

    def check_invariants(self) -> None:
        """Constraint terms never mention substituted variables."""
        dom = self.subst.domain()
        for a, b in self.constraints:
            if (vars_of(a) | vars_of(b)) & dom:
                raise NarrowError(f"constraint not instantiated: {a} = {b}")

    def _advance(self, tag, position, rule_index, goal, constraints, subst, degree):
        entry = BqTraceStep(tag, position, rule_index, goal, constraints, subst, degree)
        return BqConfig(goal, constraints, subst, degree, self.trace + (entry,))


def initial_config(trs: GradedTrs, t: Term, s: Term) -> BqConfig:
    return BqConfig(App(EQ_SYMBOL, (t, s)), frozenset(), IDENTITY, trs.quantale.unit)


def _goal_is_equation(e: Term) -> bool:
    return isinstance(e, App) and e.symbol == EQ_SYMBOL and len(e.args) == 2


def bq_step(cfg: BqConfig, trs: GradedTrs,
            counter: FreshCounter) -> list[tuple[str, Optional[BqConfig]]]:
    """All applicable calculus rule instances; Cla yields (tag, None).

    Rule variants are drawn fresh from the counter per LP instance.  The
    goal is rewritten with the *uninstantiated* right side; only the
    recorded equation sees the current substitution.
    """
    out: list[tuple[str, Optional[BqConfig]]] = []
    e = cfg.goal
    if e != TRUE_TERM:
        for p in fun_positions(e):
            sub_inst = cfg.subst.apply(subterm_at(e, p))
            grade = grade_of_position(trs.goal_signature, e, p)
            for i, rule in enumerate(trs.rules):
                lhs, rhs = fresh_variant((rule.lhs, rule.rhs), counter)
                factor = cbe_apply(grade, rule.degree)
                nxt = cfg._advance(
                    "LP", p, i,
                    replace_at(e, p, rhs),
                    cfg.constraints | {(lhs, sub_inst)},
                    cfg.subst,
                    q_tensor(cfg.degree, factor),
                )
                out.append(("LP", nxt))
    if cfg.constraints:
        rho = mgu(cfg.constraints)
        if isinstance(rho, Substitution):
            out.append(("SU", cfg._advance(
                "SU", None, None, e, frozenset(), cfg.subst.compose(rho), cfg.degree)))
        else:
            out.append(("Cla", None))
    if e != TRUE_TERM and _goal_is_equation(e):
        left, right = e.args
        out.append(("Con", cfg._advance(
            "Con", None, None, TRUE_TERM,
            cfg.constraints | {(cfg.subst.apply(left), cfg.subst.apply(right))},
            cfg.subst, cfg.degree)))
    return out


# ---------------------------------------------------------------------------
# Canonical keys: configurations and solutions are compared after renaming
# the counter-issued variables in first-occurrence order, so search never
# re-expands a state that differs only in fresh names.
# ---------------------------------------------------------------------------


class _Canon:
    def __init__(self):
        self.renaming: dict[Var, Var] = {}

    def term(self, t: Term) -> Term:
        if isinstance(t, Var):
            if t.index == 0:
                return t
            if t not in self.renaming:
                self.renaming[t] = Var("?", len(self.renaming) + 1)
            return self.renaming[t]
        return App(t.symbol, tuple(self.term(a) for a in t.args))


def canonical_subst(subst: Substitution) -> Substitution:
    canon = _Canon()
    items = sorted(subst.items(), key=lambda kv: (kv[0].name, kv[0].index))
    return Substitution({x: canon.term(t) for x, t in items})


# ---------------------------------------------------------------------------
# Solving.
# ---------------------------------------------------------------------------


@dataclass
class Solution:
    """An emitted unifier with its degree, restricted to problem variables."""

    subst: Substitution
    degree: QuantaleValue
    trace: tuple[BqTraceStep, ...]
    dominated: bool = False

    def __str__(self):
        return f"solution {self.subst} degree {self.degree}"


@dataclass
class SolveResult:
    solutions: list[Solution]
    complete: bool
    stopped: str  # "exhausted" | "depth-limit" | "solution-limit" | "config-limit"
    configs_expanded: int = 0


STRATEGIES = ("eager-su", "lazy")
ORDERS = ("bfs", "iddfs", "best-first")


# The search engine keeps substitutions in triangular form: a plain dict of
# bindings extended copy-on-write, resolved on demand.  Unifiers returned by
# mgu only ever bind variables that are unbound in the current state (their
# inputs are fully resolved and rule variants are fresh), so extension never
# rebinds and resolution chains stay acyclic.  Idempotent substitutions are
# materialized only when a solution is emitted.

Bindings = dict


def _resolve(t: Term, bindings: Bindings) -> Term:
    if isinstance(t, Var):
        bound = bindings.get(t)
        return t if bound is None else _resolve(bound, bindings)
    if not bindings or not t.args:
        return t
    new_args = tuple(_resolve(a, bindings) for a in t.args)
    if all(n is o for n, o in zip(new_args, t.args)):
        return t
    return App(t.symbol, new_args)


def _unify_walk(a: Term, b: Term, bindings: Bindings) -> Optional[Bindings]:
    """Unify a and b modulo the triangular bindings; returns the extension
    (new bindings only) or None.  Equivalent to running mgu on the resolved
    terms, without materializing the resolution."""
    new: Bindings = {}

    def walk(t: Term) -> Term:
        while isinstance(t, Var):
            nxt = new.get(t)
            if nxt is None:
                nxt = bindings.get(t)
            if nxt is None:
                return t
            t = nxt
        return t

    def occurs(x: Var, t: Term) -> bool:
        t = walk(t)
        if isinstance(t, Var):
            return t == x
        return any(occurs(x, arg) for arg in t.args)

    stack = [(a, b)]
    while stack:
        u, v = stack.pop()
        u = walk(u)
        v = walk(v)
        if u == v:
            continue
        if isinstance(u, Var) and isinstance(v, Var):
            # bind the fresher variable, keeping problem variables stable
            if (v.index, v.name) > (u.index, u.name):
                u, v = v, u
            new[u] = v
            continue
        if isinstance(u, Var):
            if occurs(u, v):
                return None
            new[u] = v
            continue
        if isinstance(v, Var):
            if occurs(v, u):
                return None
            new[v] = u
            continue
        if u.symbol != v.symbol or len(u.args) != len(v.args):
            return None
        stack.extend(zip(u.args, v.args))
    return new


def _solved_form(bindings: Bindings, keep=None) -> Substitution:
    """The idempotent substitution denoted by triangular bindings."""
    scope = bindings.keys() if keep is None else [x for x in keep if x in bindings]
    return Substitution({x: _resolve(x, bindings) for x in scope})


@dataclass(frozen=True)
class _Node:
    """Internal search state; traces snapshot the bindings per applied rule
    and are expanded to BqTraceStep records only on emission."""

    goal: Term
    constraints: frozenset
    bindings: Bindings
    degree: QuantaleValue
    frames: tuple = ()

    def advance(self, tag, position, rule_index, goal, constraints, bindings, degree):
        frame = (tag, position, rule_index, goal, constraints, bindings, degree)
        return _Node(goal, constraints, bindings, degree, self.frames + (frame,))


def _node_trace(node_frames) -> tuple[BqTraceStep, ...]:
    return tuple(
        BqTraceStep(tag, pos, rule, goal,
                    frozenset((_resolve(a, bindings), _resolve(b, bindings))
                              for a, b in constraints),
                    _solved_form(bindings), degree)
        for tag, pos, rule, goal, constraints, bindings, degree in node_frames)


def _node_key(node: _Node, problem_vars: frozenset[Var]):
    """Hashable state identity: the goal as written (its skeleton decides
    where LP may still fire, so it must not be resolved), the constraints,
    and the resolved bindings of every variable in scope, with fresh
    variables renamed by first occurrence.  Serialized in one pass without
    building terms."""
    bindings = node.bindings
    out: list = []
    slots: dict[Var, int] = {}
    order: list[Var] = []

    def slot(v: Var) -> int:
        s = slots.get(v)
        if s is None:
            s = slots[v] = len(slots)
            order.append(v)
        return s

    def emit_raw(t: Term) -> None:
        if isinstance(t, Var):
            out.append(("pv", t.name) if t.index == 0 else slot(t))
            return
        out.append(t.symbol)
        out.append(len(t.args))
        for a in t.args:
            emit_raw(a)

    def emit_resolved(t: Term) -> None:
        while isinstance(t, Var):
            nxt = bindings.get(t)
            if nxt is None:
                break
            t = nxt
        if isinstance(t, Var):
            out.append(("pv", t.name) if t.index == 0 else slot(t))
            return
        out.append(t.symbol)
        out.append(len(t.args))
        for a in t.args:
            emit_resolved(a)

    emit_raw(node.goal)
    if node.constraints:
        out.append("|C")
        for a, b in sorted(node.constraints, key=str):
            out.append("|")
            emit_resolved(a)
            emit_resolved(b)
    out.append("|B")
    for x in sorted(problem_vars, key=lambda v: (v.name, v.index)):
        if x in bindings:
            out.append(("=pv", x.name))
            emit_resolved(x)
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        if v in bindings:
            out.append(("=", slots[v]))
            emit_resolved(v)
    out.append(node.degree)
    return tuple(out)


def solve(trs: GradedTrs, t: Term, s: Term,
          threshold: Optional[QuantaleValue] = None,
          strategy: str = "eager-su",
          order: str = "bfs",
          max_steps: int = 10,
          max_solutions: Optional[int] = None,
          max_configs: Optional[int] = None,
          head_filter: bool = False) -> SolveResult:
    """Search calculus derivations from  t =? s; {}; identity; unit.

    Every configuration reaching goal true with no constraints is emitted as
    a solution (substitution restricted to the problem variables).  A
    threshold prunes configurations whose degree falls below it; max_steps
    bounds the number of LP applications on a branch.  Configurations whose
    constraint set has no unifier are dropped the moment they arise (the
    clash rule cannot be outrun: constraint sets only grow).  head_filter
    additionally skips LP candidates whose rule head differs from the redex
    head before attempting unification; it cannot change the solution set
    and is off by default.
    """
    if trs.signature.is_extended:
        raise TrsError("solve expects the unextended system")
    for side in (t, s):
        for _, sub in iter_subterms(side):
            if isinstance(sub, App) and sub.symbol in RESERVED_SYMBOLS:
                raise TrsError(f"reserved symbol {sub.symbol!r} in problem term")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if order not in ORDERS:
        raise ValueError(f"unknown order {order!r}")
    if order == "best-first" and not trs.quantale.totally_ordered:
        order = "bfs"

    quantale = trs.quantale
    problem_vars = frozenset(vars_of(t) | vars_of(s))
    counter = FreshCounter(
        max_var_index([t, s] + [x for r in trs.rules for x in (r.lhs, r.rhs)]) + 1)
    start = _Node(App(EQ_SYMBOL, (t, s)), frozenset(), {}, quantale.unit)

    def below_threshold(degree: QuantaleValue) -> bool:
        return threshold is not None and not q_leq(threshold, degree)

    goal_sig = trs.goal_signature
    unit_grade = cbe_normalize(quantale, CBE_ID)

    def compatible(pattern: Term, t: Term, bindings: Bindings) -> bool:
        """Cheap refutation test: False means no instantiation can unify."""
        while isinstance(t, Var):
            nxt = bindings.get(t)
            if nxt is None:
                return True
            t = nxt
        if isinstance(pattern, Var):
            return True
        if pattern.symbol != t.symbol:
            return False
        return all(compatible(a, b, bindings) for a, b in zip(pattern.args, t.args))

    def lp_candidates(node: _Node):
        """(position, rule index, rule, redex, degree factor); the position
        grade is accumulated along the traversal."""
        e = node.goal
        if e == TRUE_TERM:
            return
        bindings = node.bindings
        stack = [(ROOT, e, unit_grade)]
        while stack:
            p, sub, grade = stack.pop()
            if not isinstance(sub, App):
                continue
            for i, cbe in enumerate(goal_sig.arity(sub.symbol)):
                stack.append((p + (i + 1,), sub.args[i],
                              cbe_compose(quantale, grade, cbe)))
            for i, rule in enumerate(trs.rules):
                if head_filter and rule.lhs.symbol != sub.symbol:
                    continue
                if not compatible(rule.lhs, sub, bindings):
                    continue
                yield p, i, rule, sub, cbe_apply(grade, rule.degree)

    def eager_successors(node: _Node) -> list[tuple["_Node", int]]:
        out = []
        for p, i, rule, sub, factor in lp_candidates(node):
            new_degree = q_tensor(node.degree, factor)
            if below_threshold(new_degree):
                continue
            lhs, rhs = fresh_variant((rule.lhs, rule.rhs), counter)
            extension = _unify_walk(lhs, sub, node.bindings)
            if extension is None:
                continue
            goal = replace_at(node.goal, p, rhs)
            constraint = frozenset({(lhs, sub)})
            new_bindings = dict(node.bindings)
            new_bindings.update(extension)
            nxt = node.advance("LP", p, i, goal, constraint,
                               node.bindings, new_degree)
            nxt = nxt.advance("SU", None, None, goal, frozenset(),
                              new_bindings, new_degree)
            out.append((nxt, 1))
        return out

    def has_live_lp(node: _Node) -> bool:
        """Whether LP could still fire (an over-approximation: a compatible
        redex/rule pair may yet fail unification), used only to report
        whether the depth bound cut anything."""
        e = node.goal
        if e == TRUE_TERM:
            return False
        stack = [e]
        while stack:
            sub = stack.pop()
            if not isinstance(sub, App):
                continue
            stack.extend(sub.args)
            for rule in trs.rules:
                if compatible(rule.lhs, sub, node.bindings):
                    return True
        return False

    def lazy_successors(node: _Node, include_lp: bool = True) -> list:
        out = []
        if not include_lp:
            candidates = ()
        else:
            candidates = lp_candidates(node)
        for p, i, rule, sub, factor in candidates:
            new_degree = q_tensor(node.degree, factor)
            if below_threshold(new_degree):
                continue
            lhs, rhs = fresh_variant((rule.lhs, rule.rhs), counter)
            constraints = node.constraints | {(lhs, _resolve(sub, node.bindings))}
            if not unifiable(constraints):
                continue  # Cla fires on this configuration
            out.append((node.advance("LP", p, i, replace_at(node.goal, p, rhs),
                                     constraints, node.bindings, new_degree), 1))
        if node.constraints:
            rho = mgu(node.constraints)
            if isinstance(rho, Substitution):
                new_bindings = dict(node.bindings)
                new_bindings.update(rho.items())
                out.append((node.advance("SU", None, None, node.goal, frozenset(),
                                         new_bindings, node.degree), 0))
        e = node.goal
        if e != TRUE_TERM and _goal_is_equation(e):
            constraints = node.constraints | {
                (_resolve(e.args[0], node.bindings), _resolve(e.args[1], node.bindings))}
            if unifiable(constraints):
                out.append((node.advance("Con", None, None, TRUE_TERM, constraints,
                                         node.bindings, node.degree), 0))
        return out

    successors = eager_successors if strategy == "eager-su" else lazy_successors

    emitted: dict[object, Solution] = {}
    expanded = 0
    depth_cut = False
    stopped = "exhausted"

    def emit(final: _Node) -> None:
        restricted = canonical_subst(_solved_form(final.bindings, problem_vars))
        key = (restricted, final.degree)
        if key not in emitted:
            emitted[key] = Solution(restricted, final.degree,
                                    _node_trace(final.frames))

    def try_emit(node: _Node) -> None:
        if strategy != "eager-su":
            if node.goal == TRUE_TERM and not node.constraints:
                emit(node)
            return
        e = node.goal
        if not _goal_is_equation(e):
            return
        extension = _unify_walk(e.args[0], e.args[1], node.bindings)
        if extension is None:
            return
        constraint = (_resolve(e.args[0], node.bindings),
                      _resolve(e.args[1], node.bindings))
        new_bindings = dict(node.bindings)
        new_bindings.update(extension)
        final = node.advance("Con", None, None, TRUE_TERM,
                             node.constraints | {constraint},
                             node.bindings, node.degree)
        final = final.advance("SU", None, None, TRUE_TERM, frozenset(),
                              new_bindings, node.degree)
        emit(final)

    def run(order_name: str, bound: int) -> None:
        nonlocal expanded, depth_cut, stopped
        seen: dict[object, int] = {_node_key(start, problem_vars): 0}
        if order_name == "bfs":
            queue = deque([(start, 0)])
            pop = queue.popleft
            push = queue.append
        else:  # best-first on the accumulated degree
            seq = 0
            heap = [(quantale.sort_key(start.degree), 0, start, 0)]

            def pop():
                _, _, node, depth = heapq.heappop(heap)
                return node, depth

            def push(item):
                nonlocal seq
                node, depth = item
                seq += 1
                heapq.heappush(heap, (quantale.sort_key(node.degree), seq, node, depth))

            queue = heap
        while queue:
            if max_configs is not None and expanded >= max_configs:
                stopped = "config-limit"
                return
            node, depth = pop()
            expanded += 1
            try_emit(node)
            if max_solutions is not None and len(emitted) >= max_solutions:
                stopped = "solution-limit"
                return
            at_bound = depth >= bound
            if at_bound:
                # LP successors would overrun the bound: skip building them,
                # but record whether the bound actually cut a live branch
                if not depth_cut and has_live_lp(node):
                    depth_cut = True
                if strategy == "eager-su":
                    continue
                succs = lazy_successors(node, include_lp=False)
            else:
                succs = successors(node)
            for nxt, cost in succs:
                new_depth = depth + cost
                key = _node_key(nxt, problem_vars)
                if seen.get(key, bound + 1) <= new_depth:
                    continue
                seen[key] = new_depth
                push((nxt, new_depth))

    if order == "iddfs":
        # iterative deepening over the LP-step bound; each round is explored
        # breadth-first (depth-monotone pops avoid re-expanding states that a
        # depth-first round would rediscover at shallower depths)
        for bound in range(0, max_steps + 1):
            depth_cut = False
            run("bfs", bound)
            if stopped != "exhausted":
                break
    else:
        run(order, max_steps)

    solutions = list(emitted.values())
    by_subst: dict[Substitution, list[Solution]] = {}
    for sol in solutions:
        by_subst.setdefault(sol.subst, []).append(sol)
    for group in by_subst.values():
        for sol in group:
            sol.dominated = any(
                other is not sol and q_leq(sol.degree, other.degree)
                and sol.degree != other.degree for other in group)
    solutions.sort(key=lambda sol: (quantale.sort_key(sol.degree), str(sol.subst)))
    if stopped == "exhausted" and depth_cut:
        stopped = "depth-limit"
    complete = stopped == "exhausted"
    return SolveResult(solutions, complete, stopped, expanded)


# ---------------------------------------------------------------------------
# Correspondence with basic narrowing.
# ---------------------------------------------------------------------------


def derivation_to_calculus(trs: GradedTrs,
                           derivation: NarrowingDerivation) -> list[BqConfig]:
    """Translate a basic narrowing derivation into the calculus, pairing
    every narrowing step with LP followed by SU (reusing the step's own
    unifier, which solves exactly the recorded constraint).

    Returns the configuration sequence; the final goal instantiated by the
    final substitution equals the derivation's end term, and its
    non-variable positions are the derivation's basic positions.
    """
    if not derivation.is_basic:
        raise NonBasicStepError("derivation is not basic")
    cfg = BqConfig(derivation.start, frozenset(), IDENTITY, trs.quantale.unit)
    configs = [cfg]
    for step in derivation.steps:
        e = cfg.goal
        constraint = (step.variant.lhs, cfg.subst.apply(subterm_at(e, step.position)))
        if step.unifier.apply(constraint[0]) != step.unifier.apply(constraint[1]):
            raise NarrowError("derivation unifier does not solve the LP constraint")
        factor = cbe_apply(grade_of_position(trs.goal_signature, e, step.position),
                           step.variant.degree)
        cfg = cfg._advance("LP", step.position, step.rule_index,
                           replace_at(e, step.position, step.variant.rhs),
                           cfg.constraints | {constraint},
                           cfg.subst, q_tensor(cfg.degree, factor))
        configs.append(cfg)
        cfg = cfg._advance("SU", None, None, cfg.goal, frozenset(),
                           cfg.subst.compose(step.unifier), cfg.degree)
        configs.append(cfg)
    final = configs[-1]
    if final.subst.apply(final.goal) != derivation.end:
        raise NarrowError("calculus replay does not reproduce the derivation")
    if frozenset(fun_positions(final.goal)) != derivation.basics[-1]:
        raise NarrowError("goal skeleton disagrees with the basic positions")
    return configs


def narrowing_solutions(trs: GradedTrs, t: Term, s: Term, max_steps: int,
                        basic_only: bool = False) -> set:
    """Unifiers found by plain narrowing on `t =? s` over the extended
    system: canonical (restricted substitution, degree) pairs of derivations
    reaching true within the step bound."""
    extended = trs if trs.signature.is_extended else extend_trs(trs)
    problem_vars = vars_of(t) | vars_of(s)
    goal = App(EQ_SYMBOL, (t, s))
    out = set()
    for deriv in derivations(extended, goal, max_steps, basic_only=basic_only):
        if deriv.end == TRUE_TERM:
            sigma = canonical_subst(deriv.substitution().restrict(problem_vars))
            out.add((sigma, deriv.degree(trs.quantale)))
    return out
