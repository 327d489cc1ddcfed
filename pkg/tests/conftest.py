"""Shared systems and samplers for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from qnarrow import (
    App,
    CBE_CONST,
    CBE_ID,
    CbeCompose,
    CbePow,
    CbeScale,
    CbeTensor,
    GradedTrs,
    INF,
    Quantale,
    RewriteRule,
    Signature,
    Var,
)

X, Y = Var("x"), Var("y")
Z = App("Z")


def S(t):
    return App("S", (t,))


def plus(a, b):
    return App("+", (a, b))


def num(n):
    t = Z
    for _ in range(n):
        t = S(t)
    return t


@pytest.fixture(scope="session")
def peano():
    """The natural-number distance system: +, successor elimination at cost 1."""
    L = Quantale.LAWVERE
    sig = Signature(L, {"Z": (), "S": (CBE_ID,), "+": (CBE_ID, CBE_ID)})
    return GradedTrs(sig, (
        RewriteRule(L.degree(0), plus(X, Z), X),
        RewriteRule(L.degree(0), plus(X, S(Y)), S(plus(X, Y))),
        RewriteRule(L.degree(1), S(X), X),
    ), confluent=True)


@pytest.fixture(scope="session")
def cubic():
    """Three constants collapsing towards d; narrowing misses the optimum."""
    L = Quantale.LAWVERE
    sig = Signature(L, {"a": (), "b": (), "c": (), "d": (), "f": (CBE_ID,) * 3})
    return GradedTrs(sig, (
        RewriteRule(L.degree(1), App("a"), App("c")),
        RewriteRule(L.degree(1), App("b"), App("c")),
        RewriteRule(L.degree(1), App("c"), App("d")),
    ))


@pytest.fixture(scope="session")
def chain():
    L = Quantale.LAWVERE
    sig = Signature(L, {"a": (), "b": (), "c": (), "f": (CBE_ID,) * 3})
    return GradedTrs(sig, (
        RewriteRule(L.degree(1), App("a"), App("b")),
        RewriteRule(L.degree(1), App("b"), App("c")),
    ))


@pytest.fixture(scope="session")
def unbalanced():
    """f amplifies its argument threefold; basic narrowing pays for it."""
    L = Quantale.LAWVERE
    sig = Signature(L, {"a": (), "b": (), "f": (CbeScale(3),), "g": (CBE_ID,)})
    return GradedTrs(sig, (
        RewriteRule(L.degree(0), App("f", (X,)), App("g", (X,))),
        RewriteRule(L.degree(1), App("a"), App("b")),
    ))


@pytest.fixture(scope="session")
def innermost_system():
    L = Quantale.LAWVERE
    sig = Signature(L, {"a": (), "b": (), "f": (CBE_ID,)})
    return GradedTrs(sig, (
        RewriteRule(L.degree(0), App("f", (App("a"),)), App("f", (App("b"),))),
        RewriteRule(L.degree(2), App("a"), App("b")),
    ))


# -- random samplers ---------------------------------------------------------


_FRACTIONS = [Fraction(n, d) for n in range(0, 7) for d in range(1, 5)]


def random_value(rng: random.Random, quantale: Quantale):
    if quantale is Quantale.BOOL:
        return quantale.degree(rng.choice((0, 1)))
    if quantale.reversed_order:
        if rng.random() < 0.1:
            return quantale.degree(INF)
        return quantale.degree(rng.choice(_FRACTIONS))
    candidates = [f for f in _FRACTIONS if f <= 1]
    return quantale.degree(rng.choice(candidates))


def random_cbe(rng: random.Random, quantale: Quantale, depth: int = 3):
    leaves = [CBE_ID, CBE_CONST]
    if quantale.reversed_order:
        leaves.append(CbeScale(rng.choice((0, 1, 2, Fraction(1, 2), 3))))
    if quantale is Quantale.FUZZY_PRODUCT:
        leaves.append(CbePow(rng.choice((1, 2, 3))))
    if depth <= 0 or rng.random() < 0.4:
        return rng.choice(leaves)
    ctor = rng.choice((CbeCompose, CbeTensor))
    return ctor(random_cbe(rng, quantale, depth - 1),
                random_cbe(rng, quantale, depth - 1))
