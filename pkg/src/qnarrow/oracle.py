"""Independent brute-force checking of solver output.

The oracle computes best conversion degrees between ground terms by
best-first search over the symmetric rewrite graph (forward steps plus
reversed steps), which for the Lawvere quantale is literally a weighted
shortest-path problem.  It shares no search code with the solver: edges are
enumerated from the rewrite relation directly and re-weighted from the
grades, so agreement between the two is evidence, not tautology.

Only totally ordered quantales are accepted here; every verdict is
qualified by the exploration bounds.
"""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .quantale import (
    CBE_ID,
    Cbe,
    CbePow,
    CbeScale,
    Quantale,
    QuantaleValue,
    cbe_apply,
    cbe_compose,
    cbe_normalize,
    q_geq,
    q_tensor,
)
from .rewrite import GradedTrs, RewriteRule, check_trs
from .narrow import narrowing_solutions
from .term import (
    App,
    Position,
    Signature,
    Substitution,
    Term,
    Var,
    is_ground,
    is_linear,
    replace_at,
    term_depth,
    term_size,
    vars_of,
)


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class OracleBounds:
    """Caps on the explored ground graph; exceeding them can only ever make
    a verdict inconclusive, never wrong.

    max_term_size defaults to the endpoint sizes plus slack: rules reversed
    right-to-left can pad terms at zero cost (think appending a neutral
    argument anywhere), and without a size cap that region starves the node
    budget before any real path is settled."""

    max_term_depth: int = 10
    max_nodes: int = 100_000
    max_term_size: Optional[int] = None

    def size_cap(self, t: Term, s: Term) -> int:
        if self.max_term_size is not None:
            return self.max_term_size
        return max(term_size(t), term_size(s)) + 4


@dataclass(frozen=True)
class ConversionEdge:
    source: Term
    target: Term
    position: Position
    rule_index: int
    forward: bool
    degree: QuantaleValue


@dataclass
class ConversionOutcome:
    """Result of a bounded best-degree conversion search.

    optimal means the degree is proven best (the search closed without any
    cap interfering); exhausted means the whole reachable component was
    explored, so a missing path is a proof of non-convertibility.
    """

    degree: Optional[QuantaleValue]
    path: Optional[list[ConversionEdge]]
    optimal: bool
    exhausted: bool
    capped: bool


def _match_env(pattern: Term, subject: Term) -> Optional[dict]:
    """Ground matching as a plain dict (subject is ground, no variants)."""
    env: dict = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            if p in env:
                if env[p] != s:
                    return None
            else:
                env[p] = s
            continue
        if not isinstance(s, App) or p.symbol != s.symbol or len(p.args) != len(s.args):
            return None
        stack.extend(zip(p.args, s.args))
    return env


def _apply_env(t: Term, env: dict) -> Term:
    if isinstance(t, Var):
        return env.get(t, t)
    if not t.args:
        return t
    return App(t.symbol, tuple(_apply_env(a, env) for a in t.args))


def _edges_from(trs: GradedTrs, u: Term,
                instantiation_pool: tuple[Term, ...]) -> tuple[list[ConversionEdge], bool]:
    """The symmetric adjacency of a ground term: forward rewrite steps plus
    reversed steps, each weighted by the grade of its position applied to
    the rule degree (the context above the redex is the same on both ends).

    Reversing a rule that drops variables leaves left-side variables
    unbound; those are filled from the pool and the enumeration is flagged
    incomplete, since no finite pool covers all ground instantiations.
    """
    quantale = trs.quantale
    edges: list[ConversionEdge] = []
    incomplete = False
    unit_grade = cbe_normalize(quantale, CBE_ID)
    stack = [((), u, unit_grade)]
    while stack:
        p, sub, grade = stack.pop()
        if not isinstance(sub, App):
            continue
        for i, cbe in enumerate(trs.signature.arity(sub.symbol)):
            stack.append((p + (i + 1,), sub.args[i], cbe_compose(quantale, grade, cbe)))
        for i, rule in enumerate(trs.rules):
            degree = None
            env = _match_env(rule.lhs, sub)
            if env is not None:
                degree = cbe_apply(grade, rule.degree)
                edges.append(ConversionEdge(
                    u, replace_at(u, p, _apply_env(rule.rhs, env)), p, i, True, degree))
            env = _match_env(rule.rhs, sub)
            if env is not None:
                if degree is None:
                    degree = cbe_apply(grade, rule.degree)
                unbound = sorted(vars_of(rule.lhs) - env.keys(),
                                 key=lambda v: (v.name, v.index))
                if not unbound:
                    fillings: Iterable[tuple[Term, ...]] = ((),)
                else:
                    incomplete = True
                    fillings = itertools.product(instantiation_pool, repeat=len(unbound))
                for filling in fillings:
                    env2 = dict(env)
                    env2.update(zip(unbound, filling))
                    edges.append(ConversionEdge(
                        u, replace_at(u, p, _apply_env(rule.lhs, env2)), p, i, False,
                        degree))
    return edges, incomplete


def _flip(edge: ConversionEdge) -> ConversionEdge:
    # the conversion graph is symmetric: each step is usable both ways
    return ConversionEdge(edge.target, edge.source, edge.position,
                          edge.rule_index, not edge.forward, edge.degree)


def best_conversion_degree(trs: GradedTrs, t: Term, s: Term,
                           bounds: OracleBounds = OracleBounds(),
                           instantiation_pool: Optional[Iterable[Term]] = None
                           ) -> ConversionOutcome:
    """Greatest accumulated tensor degree over conversion paths from t to s.

    Bidirectional best-first search from both endpoints over the symmetric
    rewrite graph.  Expansion by the quantale order is admissible because
    the tensor is monotone and deflationary; a node scored from both ends
    closes a path, and search stops once no pair of frontier extensions can
    beat the best closed path.  Caps only ever cost optimality, never
    soundness: a returned degree is always witnessed by a real path.
    """
    if not trs.quantale.totally_ordered:
        raise OracleError("oracle requires a totally ordered quantale")
    if not is_ground(t) or not is_ground(s):
        raise OracleError("oracle works on ground terms")
    if instantiation_pool is None:
        pool = tuple(App(c) for c in trs.signature.constants())
    else:
        pool = tuple(instantiation_pool)

    quantale = trs.quantale
    unit = quantale.unit
    size_cap = bounds.size_cap(t, s)
    dist: tuple[dict, dict] = ({t: unit}, {s: unit})
    parent: tuple[dict, dict] = ({}, {})
    settled: tuple[set, set] = (set(), set())
    heaps = ([(quantale.sort_key(unit), 0, t)], [(quantale.sort_key(unit), 0, s)])
    tops = [unit, unit]
    seq = 0
    capped = False
    best_meet: Optional[tuple[QuantaleValue, Term]] = None

    def consider_meet(node: Term) -> None:
        nonlocal best_meet
        if node in dist[0] and node in dist[1]:
            degree = q_tensor(dist[0][node], dist[1][node])
            if best_meet is None or (q_geq(degree, best_meet[0])
                                     and degree != best_meet[0]):
                best_meet = (degree, node)

    def stop_rule() -> bool:
        return best_meet is not None and q_geq(
            best_meet[0], q_tensor(tops[0], tops[1]))

    consider_meet(t)
    while (heaps[0] or heaps[1]) and not stop_rule():
        side = 0 if heaps[0] and (not heaps[1] or len(heaps[0]) <= len(heaps[1])) else 1
        _, _, u = heapq.heappop(heaps[side])
        if u in settled[side]:
            continue
        settled[side].add(u)
        du = dist[side][u]
        tops[side] = du
        if stop_rule():
            break
        edges, incomplete = _edges_from(trs, u, pool)
        if incomplete:
            capped = True
        for edge in edges:
            v = edge.target
            if v in settled[side]:
                continue
            if term_depth(v) > bounds.max_term_depth or term_size(v) > size_cap:
                capped = True
                continue
            if v not in dist[side] and len(dist[0]) + len(dist[1]) >= bounds.max_nodes:
                capped = True
                continue
            dv = q_tensor(du, edge.degree)
            known = dist[side].get(v)
            if known is None or (q_geq(dv, known) and dv != known):
                dist[side][v] = dv
                parent[side][v] = edge
                consider_meet(v)
                seq += 1
                heapq.heappush(heaps[side], (quantale.sort_key(dv), seq, v))

    if best_meet is None:
        return ConversionOutcome(None, None, optimal=False,
                                 exhausted=not capped, capped=capped)
    degree, meet = best_meet
    forward: list[ConversionEdge] = []
    node = meet
    while node in parent[0]:
        edge = parent[0][node]
        forward.append(edge)
        node = edge.source
    forward.reverse()
    node = meet
    while node in parent[1]:
        edge = parent[1][node]
        forward.append(_flip(edge))
        node = edge.source
    return ConversionOutcome(degree, forward, optimal=not capped,
                             exhausted=False, capped=capped)


CONFIRMED = "CONFIRMED"
INCONCLUSIVE = "INCONCLUSIVE"
REFUTED = "REFUTED"


@dataclass
class GroundingCheck:
    grounding: Substitution
    outcome: ConversionOutcome
    status: str


@dataclass
class Verdict:
    status: str
    checks: list[GroundingCheck] = field(default_factory=list)

    def __str__(self):
        return self.status


def verify_solution(trs: GradedTrs, t: Term, s: Term,
                    subst: Substitution, degree: QuantaleValue,
                    pool: Optional[Iterable[Term]] = None,
                    bounds: OracleBounds = OracleBounds(),
                    max_groundings: int = 16) -> Verdict:
    """Check a claimed unifier: over sampled groundings of the leftover
    variables, some conversion at least as good as the claimed degree must
    exist.  REFUTED (a proven-absent conversion) always means a solver bug.

    Note the direction: degree statements are downward closed in the
    quantale order, so claiming a degree *worse* than the best conversion
    is still true; only a claim strictly better than a proven-optimal best
    (or a claim about inconvertible terms) can be refuted.
    """
    left, right = subst.apply(t), subst.apply(s)
    free = sorted(vars_of(left) | vars_of(right), key=lambda v: (v.name, v.index))
    if pool is None:
        pool = tuple(App(c) for c in trs.signature.constants())
    else:
        pool = tuple(pool)
    if free and not pool:
        return Verdict(INCONCLUSIVE)

    checks = []
    groundings = itertools.islice(itertools.product(pool, repeat=len(free)),
                                  max_groundings)
    for combo in groundings:
        theta = Substitution(dict(zip(free, combo)))
        outcome = best_conversion_degree(trs, theta.apply(left), theta.apply(right),
                                         bounds)
        if outcome.degree is not None and q_geq(outcome.degree, degree):
            status = CONFIRMED
        elif outcome.degree is None and outcome.exhausted:
            status = REFUTED
        elif outcome.degree is not None and outcome.optimal:
            status = REFUTED
        else:
            status = INCONCLUSIVE
        checks.append(GroundingCheck(theta, outcome, status))
    if any(c.status == REFUTED for c in checks):
        overall = REFUTED
    elif checks and all(c.status == CONFIRMED for c in checks):
        overall = CONFIRMED
    else:
        overall = INCONCLUSIVE
    return Verdict(overall, checks)


def enumerate_best_unifiers(trs: GradedTrs, t: Term, s: Term,
                            pool: Iterable[Term],
                            bounds: OracleBounds = OracleBounds()
                            ) -> list[tuple[Substitution, QuantaleValue]]:
    """Exhaust substitutions of the problem variables into a ground pool and
    rank them by their best conversion degree, best first."""
    pool = tuple(pool)
    free = sorted(vars_of(t) | vars_of(s), key=lambda v: (v.name, v.index))
    ranked = []
    for combo in itertools.product(pool, repeat=len(free)):
        sigma = Substitution(dict(zip(free, combo)))
        outcome = best_conversion_degree(trs, sigma.apply(t), sigma.apply(s), bounds)
        if outcome.degree is not None:
            ranked.append((sigma, outcome.degree))
    ranked.sort(key=lambda pair: (trs.quantale.sort_key(pair[1]), str(pair[0])))
    return ranked


# ---------------------------------------------------------------------------
# Random systems and the completeness-conjecture probe.
# ---------------------------------------------------------------------------


@dataclass
class SystemConfig:
    """Shape of randomly generated systems (small by construction)."""

    quantale: Quantale = Quantale.LAWVERE
    max_rules: int = 3
    n_constants: int = 3
    n_unary: int = 1
    n_binary: int = 1
    max_rule_depth: int = 2
    nontrivial_cbes: bool = False
    right_ground: bool = False
    right_linear: bool = False
    balanced: bool = False


_DEGREE_CHOICES = {
    Quantale.BOOL: ("1", "1", "1", "0"),
    Quantale.LAWVERE: ("0", "1", "2", "1/2"),
    Quantale.LAWVERE_MAX: ("0", "1", "2", "1/2"),
    Quantale.FUZZY_GODEL: ("1", "1/2", "3/4", "1/4"),
    Quantale.FUZZY_PRODUCT: ("1", "1/2", "3/4", "1/4"),
}


def _random_cbe(rng: random.Random, cfg: SystemConfig) -> Cbe:
    if not cfg.nontrivial_cbes or rng.random() < 0.7:
        return CBE_ID
    if cfg.quantale.reversed_order:
        return CbeScale(rng.choice((2, 3)))
    if cfg.quantale is Quantale.FUZZY_PRODUCT:
        return CbePow(rng.choice((2, 3)))
    return CBE_ID


def random_signature(rng: random.Random, cfg: SystemConfig) -> Signature:
    symbols: dict[str, tuple] = {}
    for i in range(cfg.n_constants):
        symbols[chr(ord("a") + i)] = ()
    for i in range(cfg.n_unary):
        symbols[f"f{i}"] = (_random_cbe(rng, cfg),)
    for i in range(cfg.n_binary):
        symbols[f"g{i}"] = (_random_cbe(rng, cfg), _random_cbe(rng, cfg))
    return Signature(cfg.quantale, symbols)


def random_term(rng: random.Random, sig: Signature, variables: list[Var],
                depth: int) -> Term:
    names = list(sig.names())
    if depth <= 0 or (variables and rng.random() < 0.3):
        if variables and rng.random() < 0.6:
            return rng.choice(variables)
        constants = sig.constants()
        if constants:
            return App(rng.choice(constants))
        return rng.choice(variables)
    name = rng.choice(names)
    arity = sig.arity(name)
    return App(name, tuple(random_term(rng, sig, variables, depth - 1)
                           for _ in arity))


def random_system(rng: random.Random, cfg: SystemConfig,
                  max_attempts: int = 200) -> GradedTrs:
    """Sample a system matching the config gates, retrying per rule."""
    sig = random_signature(rng, cfg)
    quantale = cfg.quantale
    xs = [Var("x"), Var("y")]
    rules = []
    n_rules = rng.randint(1, cfg.max_rules)
    for _ in range(n_rules):
        rule = None
        for _ in range(max_attempts):
            lhs = random_term(rng, sig, xs, cfg.max_rule_depth)
            if isinstance(lhs, Var):
                continue
            lhs_vars = sorted(vars_of(lhs), key=lambda v: v.name)
            rhs_vars = [] if cfg.right_ground else lhs_vars
            rhs = random_term(rng, sig, rhs_vars, cfg.max_rule_depth)
            if cfg.right_ground and not is_ground(rhs):
                continue
            if cfg.right_linear and not is_linear(rhs):
                continue
            degree = quantale.parse_degree(rng.choice(_DEGREE_CHOICES[quantale]))
            candidate = RewriteRule(degree, lhs, rhs)
            if cfg.balanced:
                probe = GradedTrs(sig, (candidate,))
                if not check_trs(probe).balanced:
                    continue
            rule = candidate
            break
        if rule is None:
            # ground-to-ground rules satisfy every gate
            consts = sig.constants()
            rule = RewriteRule(quantale.parse_degree(_DEGREE_CHOICES[quantale][1]),
                               App(consts[0]), App(consts[-1]))
        rules.append(rule)
    return GradedTrs(sig, rules)


def random_linear_problem(rng: random.Random, trs: GradedTrs,
                          n_vars: int = 1, depth: int = 2) -> tuple[Term, Term]:
    """A pair of terms that is linear as a whole (sides share no variables)."""
    sig = trs.signature
    left_vars = [Var(f"u{i}") for i in range(n_vars)]
    right_vars = [Var(f"w{i}") for i in range(n_vars)]
    while True:
        t = random_term(rng, sig, left_vars, depth)
        s = random_term(rng, sig, right_vars, depth)
        if is_linear(App("", (t, s))):
            return t, s


@dataclass
class ProbeTrial:
    trs: GradedTrs
    left: Term
    right: Term
    ordinary: set
    basic: set
    gaps: list

    @property
    def flagged(self) -> bool:
        return bool(self.gaps)


@dataclass
class ProbeReport:
    trials: list[ProbeTrial] = field(default_factory=list)

    @property
    def flagged(self) -> list[ProbeTrial]:
        return [t for t in self.trials if t.flagged]


def conjecture_probe(config: SystemConfig, trials: int,
                     max_steps: int = 4,
                     seed: int = 0,
                     systems: Optional[list[tuple[GradedTrs, Term, Term]]] = None
                     ) -> ProbeReport:
    """Look for candidate counterexamples to lifting ordinary narrowing
    derivations to basic ones: a trial is flagged when ordinary narrowing
    reaches a unifier at a degree that no basic derivation of the same
    unifier attains (at equal step bounds).  A flag is only a candidate for
    manual inspection; an empty report proves nothing.
    """
    rng = random.Random(seed)
    report = ProbeReport()
    for k in range(trials):
        if systems is not None:
            if k >= len(systems):
                break
            trs, t, s = systems[k]
        else:
            trs = random_system(rng, config)
            t, s = random_linear_problem(rng, trs)
        ordinary = narrowing_solutions(trs, t, s, max_steps, basic_only=False)
        basic = narrowing_solutions(trs, t, s, max_steps, basic_only=True)
        gaps = []
        for sigma, delta in sorted(ordinary, key=str):
            lifted = any(sigma2 == sigma and q_geq(delta2, delta)
                         for sigma2, delta2 in basic)
            if not lifted:
                gaps.append((sigma, delta))
        report.trials.append(ProbeTrial(trs, t, s, ordinary, basic, gaps))
    return report
