"""Terms, positions, grades, substitutions, and fresh variants."""

import random

import pytest

from qnarrow import (
    App,
    CBE_CONST,
    CBE_ID,
    CbeScale,
    FreshCounter,
    IDENTITY,
    Quantale,
    Signature,
    Substitution,
    cbe_apply,
    cbe_equal,
    fresh_variant,
    fun_positions,
    grade_of_position,
    grade_of_var,
    is_ground,
    is_linear,
    positions,
    replace_at,
    subterm_at,
    var_positions,
    vars_of,
)
from qnarrow.term import (
    InvalidPositionError,
    SignatureError,
    SubstitutionError,
    position_from_str,
    position_to_str,
)
from qnarrow.oracle import SystemConfig, random_signature, random_term

from conftest import S, X, Y, Z, plus, random_value

L = Quantale.LAWVERE


def lawvere_sig(**extra):
    symbols = {"a": (), "f": (CBE_ID, CBE_ID)}
    symbols.update(extra)
    return Signature(L, symbols)


class TestPositions:
    def test_example_f_x_a(self):
        sig = lawvere_sig()
        t = App("f", (X, App("a")))
        assert fun_positions(t) == [(), (2,)]
        assert var_positions(t) == [(1,)]
        assert positions(t) == [(), (1,), (2,)]

    def test_constant(self):
        assert positions(App("a")) == [()]

    def test_repeated_variable_positions(self):
        t = plus(plus(X, X), X)
        assert var_positions(t) == [(1, 1), (1, 2), (2,)]

    def test_subterm_and_replace(self):
        t = App("f", (App("a"), App("b")))
        assert subterm_at(t, (2,)) == App("b")
        assert replace_at(t, (), Z) == Z
        three = App("g", (X, X, X))
        assert replace_at(three, (1,), App("d")) == App("g", (App("d"), X, X))
        assert replace_at(t, (2,), subterm_at(t, (2,))) == t
        with pytest.raises(InvalidPositionError):
            subterm_at(t, (3,))
        with pytest.raises(InvalidPositionError):
            replace_at(t, (1, 1), Z)

    def test_rendering(self):
        assert position_to_str(()) == "^"
        assert position_to_str((1, 2)) == "1.2"
        assert position_from_str("^") == ()
        assert position_from_str("2.1") == (2, 1)


class TestGrades:
    def test_root_grade_is_identity(self):
        sig = lawvere_sig()
        t = App("f", (X, App("a")))
        assert cbe_equal(L, grade_of_position(sig, t, ()), CBE_ID)

    def test_scaled_argument(self):
        sig = Signature(L, {"a": (), "f": (CbeScale(3),)})
        t = App("f", (App("a"),))
        assert grade_of_position(sig, t, (1,)) == CbeScale(3)

    def test_identity_arities_stay_identity(self):
        sig = lawvere_sig()
        t = App("f", (App("f", (X, App("a"))), X))
        for p in positions(t):
            assert cbe_equal(L, grade_of_position(sig, t, p), CBE_ID)

    def test_grade_of_var(self):
        sig = Signature(L, {"g": (CBE_ID, CBE_ID, CBE_ID)})
        t = App("g", (X, X, X))
        assert grade_of_var(sig, t, X) == CbeScale(3)
        assert grade_of_var(sig, t, Y) == CBE_CONST
        assert cbe_equal(L, grade_of_var(sig, X, X), CBE_ID)

    def test_grade_of_var_matches_pointwise_sampling(self):
        # tensor over occurrences agrees with summed applications
        sig = Signature(L, {"g": (CBE_ID, CbeScale(2), CBE_ID)})
        t = App("g", (X, X, X))
        g = grade_of_var(sig, t, X)
        rng = random.Random(3)
        for _ in range(20):
            a = random_value(rng, L)
            parts = [cbe_apply(grade_of_position(sig, t, p), a)
                     for p in var_positions(t) if subterm_at(t, p) == X]
            total = parts[0]
            from qnarrow import q_tensor
            for part in parts[1:]:
                total = q_tensor(total, part)
            assert cbe_apply(g, a) == total

    def test_grade_composition_random(self):
        rng = random.Random(5)
        for qk in Quantale:
            cfg = SystemConfig(quantale=qk, nontrivial_cbes=True)
            for _ in range(60):
                sig = random_signature(rng, cfg)
                t = random_term(rng, sig, [X, Y], 3)
                from qnarrow.quantale import cbe_compose
                for p in positions(t):
                    for k in range(len(p) + 1):
                        left, right = p[:k], p[k:]
                        combined = cbe_compose(
                            qk,
                            grade_of_position(sig, t, left),
                            grade_of_position(sig, subterm_at(t, left), right))
                        assert cbe_equal(qk, grade_of_position(sig, t, p), combined)


class TestSignature:
    def test_reserved_rejected(self):
        with pytest.raises(SignatureError):
            Signature(L, {"true": ()})
        with pytest.raises(SignatureError):
            Signature(L, {"=?": (CBE_ID, CBE_ID)})

    def test_admissibility_checked(self):
        with pytest.raises(SignatureError):
            Signature(Quantale.FUZZY_GODEL, {"f": (CbeScale(3),)})

    def test_extend(self):
        sig = lawvere_sig()
        ext = sig.extend()
        assert ext.is_extended
        assert ext.arity("=?") == (CbeScale(1), CbeScale(1))
        assert ext.arity("true") == ()
        with pytest.raises(SignatureError):
            ext.extend()


class TestSubstitution:
    def test_apply(self):
        sigma = Substitution({X: Z})
        assert sigma.apply(X) == Z
        assert sigma.apply(plus(X, S(X))) == plus(Z, S(Z))
        assert IDENTITY.apply(plus(X, Y)) == plus(X, Y)

    def test_compose(self):
        f_y = App("f", (Y, Y))
        sigma = Substitution({X: f_y})
        rho = Substitution({Y: App("a")})
        composed = sigma.compose(rho)
        assert composed.apply(X) == App("f", (App("a"), App("a")))
        assert composed.apply(Y) == App("a")

    def test_idempotency_enforced(self):
        with pytest.raises(SubstitutionError):
            Substitution({X: S(X)})
        sigma = Substitution({X: S(Y)})
        with pytest.raises(SubstitutionError):
            sigma.compose(Substitution({Y: App("f", (X, X))}))

    def test_apply_twice_is_apply_once(self):
        rng = random.Random(9)
        cfg = SystemConfig()
        for _ in range(100):
            sig = random_signature(rng, cfg)
            value = random_term(rng, sig, [], 2)
            t = random_term(rng, sig, [X, Y], 3)
            sigma = Substitution({X: value})
            assert sigma.apply(sigma.apply(t)) == sigma.apply(t)

    def test_rendering(self):
        assert str(Substitution({X: S(Z)})) == "{x -> S(Z)}"
        assert str(IDENTITY) == "{}"


class TestFreshVariants:
    def test_rule_variant_disjoint(self):
        counter = FreshCounter()
        t = plus(S(X), Y)
        first = fresh_variant(t, counter)
        second = fresh_variant(t, counter)
        assert not (vars_of(first) & vars_of(second))
        assert not (vars_of(first) & vars_of(t))

    def test_ground_unchanged(self):
        counter = FreshCounter()
        assert fresh_variant(S(Z), counter) == S(Z)

    def test_hundred_calls_pairwise_disjoint(self):
        counter = FreshCounter()
        t = plus(X, plus(Y, X))
        seen = []
        for _ in range(100):
            seen.append(frozenset(vars_of(fresh_variant(t, counter))))
        for i in range(len(seen)):
            for j in range(i + 1, len(seen)):
                assert not (seen[i] & seen[j])

    def test_counter_strictly_increases(self):
        counter = FreshCounter()
        values = [counter.next() for _ in range(50)]
        assert values == sorted(set(values))


class TestPredicates:
    def test_linear(self):
        assert is_linear(App("f", (X, Y)))
        assert not is_linear(App("g", (X, X, X)))
        assert is_linear(S(Z))

    def test_ground(self):
        assert is_ground(S(Z))
        assert not is_ground(S(X))
