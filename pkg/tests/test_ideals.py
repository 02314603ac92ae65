import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from idealsieve.ideals import (FractionalIdeal, TruncatedClass,
                               class_equivalent, count_ideals,
                               enumerate_prime_ideals, euler_phi,
                               factor_ideal, factor_rational_prime,
                               is_prime_element, mobius, principal_generator,
                               residue_degrees, zeta_residue)
from idealsieve.numberfield import make_field

Q = make_field("Q")
QI = make_field("Q(i)")


# ---------------------------------------------------------------- splitting

def test_qi_splitting_oracle():
    # frozen: ramified at 2, inert at 3, split at 5
    (P2,) = factor_rational_prime(QI, 2)
    assert (P2.e, P2.f, P2.gpoly) == (2, 1, (1, 1))
    (P3,) = factor_rational_prime(QI, 3)
    assert (P3.e, P3.f) == (1, 2)
    P5a, P5b = factor_rational_prime(QI, 5)
    assert {P5a.gpoly, P5b.gpoly} == {(2, 1), (3, 1)}
    assert P5a.norm() == P5b.norm() == 5


def test_splitting_matches_legendre():
    K = make_field("Q(sqrt-3)")
    for p in sympy.primerange(5, 200):
        fs = residue_degrees(K, p)
        if pow(-3 % p, (p - 1) // 2, p) == 1:
            assert fs == [1, 1]
        else:
            assert fs == [2]


def test_quartic_splitting_by_order_mod_5():
    K = make_field("Q(zeta5)")
    for p in sympy.primerange(2, 300):
        primes = factor_rational_prime(K, p)
        if p == 5:
            assert len(primes) == 1 and primes[0].e == 4
            continue
        f = 1
        while pow(p, f, 5) != 1:
            f += 1
        assert all(P.f == f and P.e == 1 for P in primes)
        assert len(primes) == 4 // f


def test_sum_ef_small():
    for name in ("Q", "Q(i)", "Q(sqrt5)", "Q(zeta5)"):
        K = make_field(name)
        for p in sympy.primerange(2, 100):
            assert sum(P.e * P.f for P in factor_rational_prime(K, p)) \
                == K.degree


# ---------------------------------------------------------------- ideals

def test_principal_norm_and_inverse():
    a = FractionalIdeal.principal(QI, QI.element([1, 1]))
    assert a.norm() == 2
    inv = a.inverse()
    # frozen: (1+i)^{-1} lattice {(1+i)/2, (1-i)/2} -> HNF ((1,1),(0,2))/2
    assert (inv.mat, inv.den) == (((1, 1), (0, 2)), 2)
    assert a * inv == FractionalIdeal.unit_ideal(QI)


def test_hnf_canonical_equality():
    x = QI.element([3, 1])
    u = QI.element([0, 1])  # unit i
    assert FractionalIdeal.principal(QI, x) == \
        FractionalIdeal.principal(QI, x * u)


def test_contains_and_module_structure():
    a = FractionalIdeal.principal(QI, QI.element([1, 2]))
    assert a.contains(QI.element([1, 2]))
    assert a.contains(QI.element([-2, 1]))  # i * (1 + 2i)
    assert not a.contains(QI.one)
    assert a.validate_module_structure()


def test_factor_reconstructs():
    x = QI.element([4, 3])  # 4 + 3i = i (2 - i)^2
    fac = factor_ideal(FractionalIdeal.principal(QI, x))
    assert fac.product(QI) == FractionalIdeal.principal(QI, x)
    ((P, e),) = fac.factors
    assert (P.norm(), e) == (5, 2)
    y = QI.element([2, 1]) * QI.element([2, -1])  # (2+i)(2-i) = 5
    fac2 = factor_ideal(FractionalIdeal.principal(QI, y))
    assert sorted(P.norm() ** e for P, e in fac2.factors) == [5, 5]


def test_mobius_values():
    two = FractionalIdeal.principal(QI, QI.element(2))
    assert mobius(two) == 0  # (2) = p^2 is not squarefree
    five = FractionalIdeal.principal(QI, QI.element(5))
    assert mobius(five) == 1  # two distinct primes
    pr = FractionalIdeal.principal(QI, QI.element([1, 1]))
    assert mobius(pr) == -1


def test_euler_phi_brute_force():
    # |(O_K/(m))^x| for Q(i) by counting residues coprime to m
    for m in (2, 3, 5, 6):
        count = 0
        mm = FractionalIdeal.principal(QI, QI.element(m))
        for a in range(m):
            for b in range(m):
                x = QI.element([a, b])
                g = FractionalIdeal.principal(QI, x) + mm if (a or b) else mm
                if g == FractionalIdeal.unit_ideal(QI):
                    count += 1
        assert euler_phi(QI, m) == count
    assert euler_phi(Q, 6) == 2
    assert euler_phi(Q, 1) == 1


def test_enumerate_prime_ideals_sorted():
    primes = enumerate_prime_ideals(QI, 25)
    norms = [P.norm() for P in primes]
    assert norms == sorted(norms)
    assert norms == [2, 5, 5, 9, 13, 13, 17, 17]


# ---------------------------------------------------------------- counting

def _gaussian_count_oracle(X):
    # ideals of Z[i] with norm <= X: sum of (d_1(n) - d_3(n)) over n <= X
    total = 0
    for n in range(1, X + 1):
        for d in range(1, n + 1):
            if n % d == 0:
                if d % 4 == 1:
                    total += 1
                elif d % 4 == 3:
                    total -= 1
    return total


def test_count_ideals_oracle_qi():
    for X in (10, 100, 400):
        assert count_ideals(QI, X) == _gaussian_count_oracle(X)


def test_count_ideals_rational():
    assert count_ideals(Q, 1000) == 1000


def test_zeta_residue_against_counts():
    # the residue table must match the ideal-count slope
    for name in ("Q", "Q(i)", "Q(sqrt-3)", "Q(sqrt2)", "Q(sqrt5)",
                 "Q(sqrt-5)", "Q(zeta5)"):
        K = make_field(name)
        X = 60000
        slope = count_ideals(K, X, budget=10**6) / X
        assert slope == pytest.approx(zeta_residue(K), rel=0.02), name


# ---------------------------------------------------------------- classes

def test_principal_generator():
    a = FractionalIdeal.principal(QI, QI.element([1, 1]))
    g = principal_generator(a)
    assert FractionalIdeal.principal(QI, g) == a


def test_non_principal_prime_has_no_generator():
    K = make_field("Q(sqrt-5)")
    (P2,) = factor_rational_prime(K, 2)
    assert principal_generator(P2.ideal()) is None


def test_class_equivalent_qi():
    O = FractionalIdeal.unit_ideal(QI)
    b = FractionalIdeal.principal(QI, QI.element(2))
    m = FractionalIdeal.principal(QI, QI.one)
    ok, xi = class_equivalent(O, b, m)
    assert ok
    assert FractionalIdeal.principal(QI, xi) == b


def test_class_equivalent_respects_congruence():
    O = FractionalIdeal.unit_ideal(Q)
    b = FractionalIdeal.principal(Q, Q.element(5))
    m3 = FractionalIdeal.principal(Q, Q.element(3))
    ok, xi = class_equivalent(O, b, m3)
    # 5 = 2 mod 3, -5 = 1 mod 3: witness must be -5
    assert ok and xi.coords == (Fraction(-5),)
    m4 = FractionalIdeal.principal(Q, Q.element(4))
    ok4, _ = class_equivalent(O, b, m4)
    assert ok4  # 5 = 1 mod 4


def test_class_inequivalent_sqrt5m():
    K = make_field("Q(sqrt-5)")
    O = FractionalIdeal.unit_ideal(K)
    (P2,) = factor_rational_prime(K, 2)
    ok, _ = class_equivalent(O, P2.ideal(),
                             FractionalIdeal.principal(K, K.one))
    assert not ok  # h = 2: the prime above 2 is not principal


# ---------------------------------------------------------------- primality

def test_is_prime_element_rational():
    O = FractionalIdeal.unit_ideal(Q)
    for m in range(2, 60):
        assert is_prime_element(Q, O, Q.element(m)) == sympy.isprime(m)
        assert is_prime_element(Q, O, Q.element(-m)) == sympy.isprime(m)


def test_is_prime_element_gaussian():
    O = FractionalIdeal.unit_ideal(QI)
    assert is_prime_element(QI, O, QI.element([1, 1]))
    assert is_prime_element(QI, O, QI.element([0, 3]))   # 3i inert
    assert not is_prime_element(QI, O, QI.element([5, 0]))  # 5 splits
    assert not is_prime_element(QI, O, QI.element([2, 0]))  # 2 ramifies
    assert not is_prime_element(QI, O, QI.one)


def test_is_prime_element_nonprincipal_ambient():
    K = make_field("Q(sqrt-5)")
    (P2,) = factor_rational_prime(K, 2)
    b = P2.ideal()
    # 2 is in b and (2) b^{-1} = b, prime: 2 is a prime element of b
    assert is_prime_element(K, b, K.element(2))
    # 4 gives (4) b^{-1} = b^3, not prime
    assert not is_prime_element(K, b, K.element(4))


# ---------------------------------------------------------------- truncated class

def test_truncated_class_build_and_verify():
    O = FractionalIdeal.unit_ideal(Q)
    m = FractionalIdeal.principal(Q, Q.element(6))
    tc = TruncatedClass.build(O, m, Q.element(11), 13.0)
    values = sorted(int(x.coords[0]) for x in tc.members)
    assert values == [-1, 5, 11, 17, 23]
    assert tc.verify()


# ---------------------------------------------------------------- properties

@settings(max_examples=40, deadline=None)
@given(a=st.lists(st.integers(-9, 9), min_size=2, max_size=2),
       b=st.lists(st.integers(-9, 9), min_size=2, max_size=2))
def test_norm_of_product_ideal(a, b):
    if all(c == 0 for c in a) or all(c == 0 for c in b):
        return
    x = FractionalIdeal.principal(QI, QI.element(a))
    y = FractionalIdeal.principal(QI, QI.element(b))
    assert (x * y).norm() == x.norm() * y.norm()


@settings(max_examples=30, deadline=None)
@given(a=st.lists(st.integers(-9, 9), min_size=2, max_size=2))
def test_inverse_roundtrip(a):
    if all(c == 0 for c in a):
        return
    x = FractionalIdeal.principal(QI, QI.element(a))
    assert x.inverse().inverse() == x
    assert x * x.inverse() == FractionalIdeal.unit_ideal(QI)


@settings(max_examples=30, deadline=None)
@given(p=st.sampled_from(list(sympy.primerange(2, 500))))
def test_sum_ef_property(p):
    K = make_field("Q(zeta5)")
    assert sum(P.e * P.f for P in factor_rational_prime(K, p)) == 4
