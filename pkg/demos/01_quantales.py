#!/usr/bin/env python3
"""Tour of the degree algebra: five quantales and their CBE fragments.

Degrees measure how far apart two terms are allowed to be.  Each quantale
fixes what "combining two steps" (tensor) and "at least as good" (the
order) mean; change-of-base endomorphisms (CBEs) describe how a function
argument position amplifies the degrees happening beneath it.
"""

from fractions import Fraction

from qnarrow import (
    CBE_CONST,
    CBE_ID,
    CbeCompose,
    CbeScale,
    CbePow,
    CbeTensor,
    INF,
    Quantale,
    cbe_apply,
    cbe_normalize,
    q_join,
    q_leq,
    q_tensor,
)

print("=== The five quantales ===")
for q in Quantale:
    print(f"{q.value:14s} unit={q.unit}  top={q.top}  bottom={q.bottom}")

print()
print("=== Tensor: how step costs combine ===")
L = Quantale.LAWVERE
print("lawvere (costs add):     1 (x) 2 =", q_tensor(L.degree(1), L.degree(2)))
LM = Quantale.LAWVERE_MAX
print("lawvere-max (worst one): 1 (x) 2 =", q_tensor(LM.degree(1), LM.degree(2)))
FG = Quantale.FUZZY_GODEL
print("fuzzy-godel (weakest):   3/10 (x) 7/10 =",
      q_tensor(FG.degree("3/10"), FG.degree("7/10")))
FP = Quantale.FUZZY_PRODUCT
print("fuzzy-product:           1/2 (x) 1/2 =",
      q_tensor(FP.degree("1/2"), FP.degree("1/2")))

print()
print("=== The order is reversed on the Lawvere carriers ===")
print("cost 3 'at most' cost 1?", q_leq(L.degree(3), L.degree(1)),
      " (3 is below 1 in the quantale order: a bigger distance is worse)")
print("join of costs {3, 1, 2} =", q_join(L, [L.degree(n) for n in (3, 1, 2)]),
      " (the best one)")
print("infinity is the bottom:", q_leq(L.degree(INF), L.degree(1000)))

print()
print("=== CBEs: argument sensitivities ===")
triple = CbeScale(3)
print("scale(3) applied to cost 1:", cbe_apply(triple, L.degree(1)))
print("composition scale(2) . scale(3) normalizes to:",
      cbe_normalize(L, CbeCompose(CbeScale(2), CbeScale(3))))
print("pointwise tensor id (x) id (x) id normalizes to:",
      cbe_normalize(L, CbeTensor(CBE_ID, CbeTensor(CBE_ID, CBE_ID))),
      " (an argument used three times costs three times as much)")
print("the constant CBE forgets everything:",
      cbe_apply(CBE_CONST, L.degree(INF)))
print("fuzzy-product fragment uses powers: pow(2) at 3/4 =",
      cbe_apply(CbePow(2), FP.degree(Fraction(3, 4))))
