"""Correlation sums, singular series, local densities, and the
hypergraph pseudo-randomness conditions.

Local densities omega are exact rationals obtained by counting residues;
the singular series is evaluated either by a factored fast path (when the
form system has full row rank at every prime) or by direct enumeration of
squarefree ideal tuples.  All floating accumulations use fixed-order
compensated summation so reports are byte-identical across worker counts.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from .errors import BudgetExceededError
from .ideals import (FractionalIdeal, PrimeIdeal, enumerate_prime_ideals,
                     factor_ideal, factor_rational_prime, mobius, zeta_residue)
from .lattice import LatticeBasis, Parallelotope, points_in_parallelotope
from .linalg import hnf
from .numberfield import FieldElement, NumberField
from .sieve import SieveConfig, lambda_R, nu_weight

_N_SLABS = 16


def _sharded_fsum(items, term, workers: int = 1) -> float:
    """Compensated sum of term(x) over items, split into a fixed number of
    slabs so the reduction order never depends on the worker count."""
    items = list(items)
    slabs = [items[i::_N_SLABS] for i in range(_N_SLABS)]

    def slab_sum(slab):
        return math.fsum(term(x) for x in slab)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(slab_sum, slabs))
    else:
        partials = [slab_sum(s) for s in slabs]
    return math.fsum(partials)


# ---------------------------------------------------------------------
# Linear form systems

class LinearFormSystem:
    """s linear forms in m variables, coefficients in O_K, shifts in b."""

    def __init__(self, K, coeffs, shifts=None, ambient=None):
        self.K = K
        self.coeffs = [[c if isinstance(c, FieldElement) else K.element(c)
                        for c in row] for row in coeffs]
        self.s = len(self.coeffs)
        self.m = len(self.coeffs[0]) if self.coeffs else 0
        if any(len(row) != self.m for row in self.coeffs):
            raise ValueError("ragged coefficient matrix")
        self.ambient = ambient if ambient is not None \
            else FractionalIdeal.unit_ideal(K)
        if shifts is None:
            shifts = [K.zero] * self.s
        self.shifts = [b if isinstance(b, FieldElement) else K.element(b)
                       for b in shifts]
        self._validate()

    def _validate(self):
        for row in self.coeffs:
            if all(not c for c in row):
                raise ValueError("zero form")
        for i in range(self.s):
            for j in range(i + 1, self.s):
                if self._proportional(self.coeffs[i], self.coeffs[j]):
                    raise ValueError(f"forms {i} and {j} are proportional")

    @staticmethod
    def _proportional(u, v):
        # u, v proportional over K iff all 2x2 minors vanish
        m = len(u)
        for a in range(m):
            for b in range(a + 1, m):
                if u[a] * v[b] - u[b] * v[a]:
                    return False
        return True

    def apply(self, j: int, x) -> FieldElement:
        acc = self.K.zero
        for c, xi in zip(self.coeffs[j], x):
            if c:
                acc = acc + c * xi
        return acc

    def minor_norm(self) -> int:
        """Norm of the ideal generated by all s x s minors of the
        coefficient matrix (0 when rank < s over K).  Primes away from
        this norm see the system at full row rank."""
        if self.s > self.m:
            return 0
        minors = []
        for cols in itertools.combinations(range(self.m), self.s):
            sub = [[self.coeffs[i][c] for c in cols] for i in range(self.s)]
            minors.append(_det_elements(self.K, sub))
        minors = [d for d in minors if d]
        if not minors:
            return 0
        return int(FractionalIdeal.from_generators(self.K, minors).norm()
                   .limit_denominator(1))


def _det_elements(K, rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    det = K.zero
    for c in range(n):
        sub = [[rows[r][cc] for cc in range(n) if cc != c]
               for r in range(1, n)]
        term = rows[0][c] * _det_elements(K, sub)
        det = det + term if c % 2 == 0 else det - term
    return det


@dataclass
class CorrelationReport:
    op: str
    empirical: float
    predicted: float
    sample_size: int
    parameters: dict
    wall_time: float = 0.0

    @property
    def ratio(self):
        return self.empirical / self.predicted if self.predicted else math.inf

    def to_json(self) -> str:
        # wall_time deliberately excluded: reports must be byte-identical
        # across worker counts and runs
        return json.dumps({"op": self.op, "empirical": self.empirical,
                           "predicted": self.predicted, "ratio": self.ratio,
                           "sample_size": self.sample_size,
                           "params": self.parameters}, sort_keys=True)


# ---------------------------------------------------------------------
# Cross-correlation

def region_points(ambient, region: Parallelotope, lam, budget: int = 10**7):
    return points_in_parallelotope(ambient, region.scaled(lam), budget=budget)

def cross_correlation_sum(forms: LinearFormSystem, region: Parallelotope,
                          lam, weight, workers: int = 1,
                          budget: int = 10**7) -> CorrelationReport:
    """(1/|b cap lam I|^m) sum over x in (b cap lam I)^m of
    prod_j weight(psi_j(x) + b_j)."""
    t0 = time.time()
    pts = region_points(forms.ambient, region, lam, budget=budget)
    if not pts:
        raise ValueError("empty region")
    count = len(pts) ** forms.m
    if count > budget:
        raise BudgetExceededError(
            f"{count} sample tuples exceed budget {budget}")

    def term(x):
        prod = 1.0
        for j in range(forms.s):
            prod *= weight(forms.apply(j, x) + forms.shifts[j])
        return prod

    total = _sharded_fsum(itertools.product(pts, repeat=forms.m), term,
                          workers)
    emp = total / count
    return CorrelationReport("cross_correlation", emp, 1.0, count,
                             {"s": forms.s, "m": forms.m, "lambda": float(lam),
                              "field": forms.K.name},
                             wall_time=time.time() - t0)


# ---------------------------------------------------------------------
# Local factors omega

def _coset_reps(ambient, sub):
    """Coset representatives of sub inside ambient (sub <= ambient)."""
    K = ambient.K
    n = K.degree
    # coordinates of sub's basis in ambient's basis
    L = LatticeBasis(ambient)
    rows = []
    for b in sub.basis_elements():
        c = L.coords_of(b)
        if any(ci.denominator != 1 for ci in c):
            raise ValueError("sub is not contained in ambient")
        rows.append([int(ci) for ci in c])
    H = hnf(rows, n)
    reps = []
    basis = ambient.basis_elements()
    for combo in itertools.product(*(range(H[i][i]) for i in range(n))):
        acc = K.zero
        for r, b in zip(combo, basis):
            if r:
                acc = acc + b * K.element(r)
        reps.append(acc)
    return reps


def local_factor_omega(forms: LinearFormSystem, P: PrimeIdeal, marks,
                       W: int, alpha, budget: int = 10**6) -> Fraction:
    """Exact density of x in (b / P b)^m with P b | W psi_i(x) + b'_i for
    every marked i, where b'_i = W b_i + alpha.  Exhaustive count."""
    marks = tuple(bool(t) for t in marks)
    if len(marks) != forms.s:
        raise ValueError("one mark per form required")
    if not any(marks):
        return Fraction(1)
    if W % P.p == 0:
        return Fraction(0)
    return _omega_counted(forms, P, marks, W,
                          alpha if isinstance(alpha, FieldElement)
                          else forms.K.element(alpha), budget)


@lru_cache(maxsize=None)
def _omega_cached_key(forms_id, P, marks, W, alpha_coords, budget):
    forms = _FORMS_REGISTRY[forms_id]
    K = forms.K
    alpha = K.element(alpha_coords)
    Pb = P.ideal() * forms.ambient
    reps = _coset_reps(forms.ambient, Pb)
    q = P.norm()
    if q ** forms.m > budget:
        raise BudgetExceededError(
            f"residue space {q}^{forms.m} exceeds budget {budget}")
    Wel = K.element(W)
    binv = forms.ambient.inverse()
    marked = [i for i, t in enumerate(marks) if t]
    bprime = [Wel * forms.shifts[i] + alpha for i in marked]
    count = 0
    for x in itertools.product(reps, repeat=forms.m):
        ok = True
        for i, bp in zip(marked, bprime):
            v = Wel * forms.apply(i, x) + bp
            if not Pb.contains(v):
                ok = False
                break
        if ok:
            count += 1
    return Fraction(count, q ** forms.m)


_FORMS_REGISTRY = {}


def _forms_id(forms):
    key = id(forms)
    _FORMS_REGISTRY[key] = forms
    return key


def _omega_counted(forms, P, marks, W, alpha, budget):
    return _omega_cached_key(_forms_id(forms), P, marks, W,
                             tuple(alpha.coords), budget)


def omega_tuple(forms, primes_marks, W, alpha, budget: int = 10**6):
    """omega of a squarefree pattern: CRT product over its primes."""
    out = Fraction(1)
    for P, marks in primes_marks:
        out *= local_factor_omega(forms, P, marks, W, alpha, budget)
        if not out:
            break
    return out


# ---------------------------------------------------------------------
# Squarefree ideal enumeration (as frozensets of prime ideals)

def squarefree_ideals(K, R, W, prime_support=None, budget: int = 10**6):
    """Squarefree integral ideals of norm < R whose primes avoid W,
    represented as (frozenset of primes, norm) pairs, including (|, 1)."""
    if prime_support is None:
        primes = [P for P in enumerate_prime_ideals(K, int(math.ceil(R)))
                  if W % P.p != 0 and P.norm() < R]
    else:
        primes = [P for P in prime_support if W % P.p != 0 and P.norm() < R]
    out = [(frozenset(), 1)]
    for P in primes:
        q = P.norm()
        new = []
        for S, n in out:
            if n * q < R:
                new.append((S | {P}, n * q))
        out.extend(new)
        if len(out) > budget:
            raise BudgetExceededError("squarefree ideal list exceeds budget")
    out.sort(key=lambda t: (t[1], tuple(sorted(P.sort_key() for P in t[0]))))
    return out


# ---------------------------------------------------------------------
# Singular series

def singular_series_direct(forms: LinearFormSystem, R: float, W: int,
                           alpha=1, budget: int = 10**8,
                           prime_support=None, weights="bump",
                           t=None, tprime=None, phi=None):
    """The double sum over squarefree ideal s-tuples d, d' of

        omega((d_j cap d'_j)_j) prod_j mu(d_j) mu(d'_j) g_j(d_j) g'_j(d'_j)

    with g the bump weight phi(log N d / log R) (weights="bump") or the
    Euler weight N d^{-(1+i t_j)/log R} (weights="euler").

    Fast path: when the coefficient matrix has full row rank at every
    prime off W (empty exceptional set), omega factors across forms and
    the sum collapses to a product of s independent pair sums.
    """
    from .sieve import DEFAULT_BUMP

    K = forms.K
    phi = phi or DEFAULT_BUMP
    logR = math.log(R)
    alpha = alpha if isinstance(alpha, FieldElement) else K.element(alpha)

    if weights == "bump":
        def gw(j, n):  # same for d and d'
            return phi(math.log(n) / logR) if n < R else 0.0
        gws = [gw, gw]
    else:
        tv = list(t) if t is not None else [0.0] * forms.s
        tpv = list(tprime) if tprime is not None else [0.0] * forms.s

        def g1(j, n):
            return n ** complex(-1 / logR, -tv[j] / logR)

        def g2(j, n):
            return n ** complex(-1 / logR, -tpv[j] / logR)
        gws = [g1, g2]

    exceptional = _exceptional_primes(forms, W)
    if not exceptional and forms.s <= forms.m and prime_support is None \
            and weights == "bump" and _generic_shift(forms, W, alpha):
        if K.degree == 1:
            val = 1.0
            for j in range(forms.s):
                val *= _pair_sum_rational(R, W, logR, phi)
            return val
        pairs = squarefree_ideals(K, R, W, budget=budget)
        val = 1.0
        for j in range(forms.s):
            val *= _pair_sum_ideals(pairs, logR, phi, budget)
        return val

    # direct tuple enumeration
    pairs = squarefree_ideals(K, R, W, prime_support=prime_support,
                              budget=budget)
    D = len(pairs)
    if D ** (2 * forms.s) > budget:
        raise BudgetExceededError(
            f"{D}^{2 * forms.s} tuples exceed budget {budget}")
    total = []
    for dd in itertools.product(range(D), repeat=forms.s):
        for dp in itertools.product(range(D), repeat=forms.s):
            term = 1.0 + 0.0j if weights == "euler" else 1.0
            union = {}
            for j in range(forms.s):
                Sd, nd = pairs[dd[j]]
                Sp, np_ = pairs[dp[j]]
                sgn = (-1) ** (len(Sd) + len(Sp))
                term *= sgn * gws[0](j, nd) * gws[1](j, np_)
                for P in Sd | Sp:
                    union.setdefault(P, [False] * forms.s)[j] = True
            if not term:
                continue
            om = omega_tuple(forms, sorted(union.items(),
                                           key=lambda kv: kv[0].sort_key()),
                             W, alpha)
            if om:
                total.append(term * float(om))
    if weights == "euler":
        return complex(math.fsum(x.real for x in total),
                       math.fsum(x.imag for x in total))
    return math.fsum(total)


def _exceptional_primes(forms, W):
    """Primes not dividing W where the coefficient matrix drops below
    full row rank (all s x s minors vanish)."""
    G = forms.minor_norm()
    if G == 0:
        return None  # rank deficient everywhere: no fast path
    out = []
    for p in sympy.primefactors(G):
        if W % p == 0:
            continue
        for P in factor_rational_prime(forms.K, p):
            om = local_factor_omega(forms, P, (True,) * forms.s, W,
                                    forms.K.one)
            if om != Fraction(1, P.norm() ** forms.s):
                out.append(P)
    return out


def _generic_shift(forms, W, alpha):
    """The factored fast path also needs each single-mark density to be
    exactly 1/Np; with full row rank this holds automatically for every
    prime off W, so only the rank condition matters."""
    return True


def _pair_sum_rational(R, W, logR, phi):
    """sum over squarefree d, d' < R coprime to W of
    mu mu' phi phi' / lcm(d,d') using integer arithmetic and numpy."""
    Ri = int(math.ceil(R)) - 1
    d = np.arange(1, Ri + 1, dtype=np.int64)
    mob = np.array([int(sympy.mobius(int(x))) for x in d], dtype=np.int64)
    keep = mob != 0
    if W > 1:
        keep &= np.gcd(d, W) == 1
    d = d[keep]
    mob = mob[keep]
    phiv = np.array([phi(math.log(int(x)) / logR) for x in d])
    c = mob * phiv
    g = np.gcd.outer(d, d)
    lcm = (d[:, None] // g) * d[None, :]
    M = (c[:, None] * c[None, :]) / lcm
    # fixed-order compensated reduction: fsum over rows, then over row sums
    return math.fsum(math.fsum(row) for row in M)


def _pair_sum_ideals(pairs, logR, phi, budget):
    if len(pairs) ** 2 > budget:
        raise BudgetExceededError("ideal pair sum exceeds budget")
    vals = []
    phis = [phi(math.log(n) / logR) if n > 1 else 1.0 for _, n in pairs]
    for i, (Si, ni) in enumerate(pairs):
        mi = (-1) ** len(Si)
        for j, (Sj, nj) in enumerate(pairs):
            lcm_norm = 1
            for P in Si | Sj:
                lcm_norm *= P.norm()
            mj = (-1) ** len(Sj)
            vals.append(mi * mj * phis[i] * phis[j] / lcm_norm)
    return math.fsum(vals)


def singular_series_main_term(forms, R, W, cphi_value=None):
    """(c_phi W^n / (phi_K(W) log R Res zeta_K))^s."""
    from .ideals import euler_phi

    K = forms.K
    if cphi_value is None:
        from .sieve import DEFAULT_BUMP, _c_phi_cached
        cphi_value = _c_phi_cached(DEFAULT_BUMP)
    n = K.degree
    base = (cphi_value * W ** n
            / (euler_phi(K, W) * math.log(R) * zeta_residue(K)))
    return base ** forms.s


# ---------------------------------------------------------------------
# Euler product route

def F_euler(forms: LinearFormSystem, t, tprime, P_cutoff: float, R: float,
            W: int, alpha=1, budget: int = 10**6):
    """Truncated Euler product of the local mark sums, with the predicted
    main term and a multiplicative tail bound.

    Returns (value, main_term, tail_factor_bound)."""
    from .ideals import euler_phi

    K = forms.K
    s = forms.s
    logR = math.log(R)
    t = list(t)
    tprime = list(tprime)
    alpha = alpha if isinstance(alpha, FieldElement) else K.element(alpha)
    value = complex(1.0)
    for P in enumerate_prime_ideals(K, int(P_cutoff)):
        if W % P.p == 0:
            continue
        q = P.norm()
        local = complex(0.0)
        for dd in itertools.product((0, 1), repeat=s):
            for dp in itertools.product((0, 1), repeat=s):
                marks = tuple(bool(a or b) for a, b in zip(dd, dp))
                om = local_factor_omega(forms, P, marks, W, alpha, budget)
                if not om:
                    continue
                term = complex(float(om))
                for j in range(s):
                    if dd[j]:
                        term *= -q ** complex(-(1) / logR, -t[j] / logR)
                    if dp[j]:
                        term *= -q ** complex(-(1) / logR, -tprime[j] / logR)
                local += term
        value *= local
    n = K.degree
    main = (W ** n / (euler_phi(K, W) * logR * zeta_residue(K))) ** s
    for j in range(s):
        main *= ((1 + 1j * t[j]) * (1 + 1j * tprime[j])
                 / (2 + 1j * (t[j] + tprime[j])))
    # tail: remaining local factors are 1 + O_s(1/Np^2)
    tail_log = 3.0 * s * s * sum(
        1.0 / p ** 2 * K.degree
        for p in sympy.primerange(int(P_cutoff) + 1, 10 * int(P_cutoff)))
    tail = math.exp(tail_log)
    return value, main, tail


# ---------------------------------------------------------------------
# Auto-correlation and tau

def tau_factor(cfg: SieveConfig, y: FieldElement) -> float:
    """prod over primes of (y) b^{-1} off W with norm <= R^2 of
    (1 + c_tau / Np), with c_tau = s^2."""
    if not y:
        raise ValueError("tau_factor requires y != 0")
    c_tau = float(cfg.s ** 2)
    ideal = FractionalIdeal.principal(cfg.K, y) * cfg.ambient.inverse()
    out = 1.0
    for P, _ in factor_ideal(ideal).factors:
        if cfg.W % P.p == 0:
            continue
        if P.norm() <= cfg.R ** 2:
            out *= 1.0 + c_tau / P.norm()
    return out


def tau_weight(cfg: SieveConfig, y: FieldElement) -> float:
    """C_s * tau_factor with C_s = 2^s."""
    return (2.0 ** cfg.s) * tau_factor(cfg, y)


def tau_moments(cfg: SieveConfig, region: Parallelotope,
                moments=(1, 2, 4), budget: int = 10**6):
    pts = points_in_parallelotope(cfg.ambient, region.scaled(cfg.N),
                                  budget=budget)
    out = {}
    for M in moments:
        vals = [tau_weight(cfg, x) ** M for x in pts if x]
        out[M] = math.fsum(vals) / len(pts)
    return out


def auto_correlation_check(y, region: Parallelotope, cfg: SieveConfig,
                           workers: int = 1,
                           budget: int = 10**6) -> CorrelationReport:
    """Empirical mean of prod_i nu_N(x + y_i) over x in (N I) cap b versus
    the bound C_s prod_{i<j} tau_factor(y_i - y_j)."""
    t0 = time.time()
    y = list(y)
    s = len(y)
    for i in range(s):
        for j in range(i + 1, s):
            if not (y[i] - y[j]):
                raise ValueError("coincident coordinates in y")
    pts = points_in_parallelotope(cfg.ambient, region.scaled(cfg.N),
                                  budget=budget)
    if not pts:
        raise ValueError("empty region")

    def term(x):
        prod = 1.0
        for yi in y:
            prod *= nu_weight(cfg, x + yi)
        return prod

    emp = _sharded_fsum(pts, term, workers) / len(pts)
    bound = 2.0 ** cfg.s
    for i in range(s):
        for j in range(i + 1, s):
            bound *= tau_factor(cfg, y[i] - y[j])
    return CorrelationReport("auto_correlation", emp, bound, len(pts),
                             dict(cfg.params_echo(), s_tuple=s),
                             wall_time=time.time() - t0)


# ---------------------------------------------------------------------
# Hypergraph conditions

def pattern_points(K, k: float):
    """O_K cap B_k, sorted by coordinates."""
    from .lattice import ball_elements

    return ball_elements(K, FractionalIdeal.unit_ideal(K), k)


def hypergraph_nu(nu_table, K, N, j, e_j, x: dict) -> float:
    """nu~_{N,j}(x) = nu~_N(sum_{i in e_j} (i - j) x_i), with nu~_N given
    as a residue table and x a dict i -> residue element."""
    acc = K.zero
    for i in e_j:
        acc = acc + (i - j) * x[i]
    return _table_lookup(nu_table, K, N, acc)


def _table_lookup(table, K, N, x):
    if K.degree == 1:
        return table[int(x.coords[0]) % N]
    key = tuple(int(c) % N for c in x.coords)
    return table[key]


def hypergraph_conditions_report(cfg: SieveConfig, nu_table,
                                 Omegas=None, M: int = 2,
                                 budget: int = 10**8) -> dict:
    """Exact brute-force evaluation of the three pseudo-randomness
    conditions for the measure system nu~_{N,j} built from nu_table.

    Pattern J = O_K cap B_k, hyperedges e_j = J \\ {j}.  Omegas maps j to
    a list of 0/1 vectors over e_j; default is the all-ones vector for
    each j.  Only the variables that actually occur in some term are
    enumerated; unused coordinates factor out of the normalized average
    exactly.
    """
    K = cfg.K
    N = cfg.N
    J = pattern_points(K, cfg.k)
    idx = {tuple(j.coords): pos for pos, j in enumerate(J)}
    edges = {pos: [q for q in range(len(J)) if q != pos]
             for pos in range(len(J))}
    if Omegas is None:
        Omegas = {pos: [tuple(1 for _ in edges[pos])] for pos in edges}

    def coeff(i_pos, j_pos):
        return J[i_pos] - J[j_pos]

    cond2 = _condition2(cfg, nu_table, J, edges, Omegas, budget)
    cond3 = _condition3(cfg, nu_table, J, edges, Omegas, M, budget)
    cond1 = _condition1(cfg, nu_table, J, edges, Omegas, budget)
    return {"condition1_sup": cond1, "condition2": cond2,
            "condition3": cond3, "pattern_size": len(J), "N": N, "M": M}


def _enumerate_terms(J, edges, Omegas):
    """Terms of the condition-2 product: (j_pos, omega) with the list of
    (i_pos, delta) variables each depends on."""
    terms = []
    for j_pos, omegas in Omegas.items():
        for om in omegas:
            deps = [(i_pos, om[a]) for a, i_pos in enumerate(edges[j_pos])]
            terms.append((j_pos, om, deps))
    return terms


def _residues(K, N):
    if K.degree == 1:
        return [K.element(r) for r in range(N)]
    return [K.element(list(c))
            for c in itertools.product(range(N), repeat=K.degree)]


def _condition2(cfg, table, J, edges, Omegas, budget):
    K, N = cfg.K, cfg.N
    terms = _enumerate_terms(J, edges, Omegas)
    used = sorted({v for _, _, deps in terms for v in deps})
    states = N ** (len(used) * K.degree)
    if states > budget:
        raise BudgetExceededError(f"{states} states exceed budget {budget}")
    if K.degree == 1 and len(used) <= 4:
        return _condition2_vectorized(cfg, table, J, edges, terms, used)
    pos = {v: a for a, v in enumerate(used)}
    vals = []
    for assign in itertools.product(_residues(K, N), repeat=len(used)):
        prod = 1.0
        for j_pos, om, deps in terms:
            acc = K.zero
            for (i_pos, delta) in deps:
                acc = acc + (J[i_pos] - J[j_pos]) * assign[pos[(i_pos, delta)]]
            prod *= _table_lookup(table, K, N, acc)
        vals.append(prod)
    return math.fsum(vals) / states


def _product_mean_vectorized(N, table, lin_terms, used_count):
    """Mean over (Z/N)^used_count of prod_t table[(sum c_a x_a + const) % N]
    with lin_terms a list of ([(axis, coeff), ...], const)."""
    grids = np.meshgrid(*([np.arange(N)] * used_count), indexing="ij",
                        sparse=True)
    T = np.asarray(table, dtype=float)
    prod = None
    for coeffs, const in lin_terms:
        acc = None
        for axis, c in coeffs:
            contrib = (c * grids[axis]) % N
            acc = contrib if acc is None else (acc + contrib) % N
        acc = np.asarray(const % N) if acc is None else (acc + const) % N
        f = T[acc]
        prod = f if prod is None else prod * f
    if prod.ndim == 0:
        return float(prod)
    total = math.fsum(np.sum(prod, axis=tuple(range(1, prod.ndim))).tolist())
    return total / N ** used_count


def _condition2_vectorized(cfg, table, J, edges, terms, used):
    K, N = cfg.K, cfg.N
    pos = {v: a for a, v in enumerate(used)}
    lin_terms = []
    for j_pos, om, deps in terms:
        coeffs = [(pos[(i_pos, delta)],
                   int((J[i_pos] - J[j_pos]).coords[0]) % N)
                  for (i_pos, delta) in deps]
        lin_terms.append((coeffs, 0))
    return _product_mean_vectorized(N, table, lin_terms, len(used))


def _condition3(cfg, table, J, edges, Omegas, M, budget):
    K, N = cfg.K, cfg.N
    # fix j = first pattern point with a nonempty edge, i = first of e_j
    j_pos = next(iter(Omegas))
    omegas = Omegas[j_pos]
    e = edges[j_pos]
    if not e:
        return 1.0
    i_pos = e[0]
    terms = [(om, [(ip, om[a]) for a, ip in enumerate(e)]) for om in omegas]
    outer_used = sorted({v for _, deps in terms for v in deps
                         if v[0] != i_pos})
    inner_used = sorted({v for _, deps in terms for v in deps
                         if v[0] == i_pos})
    states = N ** ((len(outer_used) + len(inner_used)) * K.degree)
    if states > budget:
        raise BudgetExceededError(f"{states} states exceed budget {budget}")
    res = _residues(K, N)
    opos = {v: a for a, v in enumerate(outer_used)}
    vals = []
    for outer in itertools.product(res, repeat=len(outer_used)):
        inner_vals = []
        for inner in itertools.product(res, repeat=len(inner_used)):
            ipos = {v: a for a, v in enumerate(inner_used)}
            prod = 1.0
            for om, deps in terms:
                acc = K.zero
                for v in deps:
                    x = inner[ipos[v]] if v[0] == i_pos else outer[opos[v]]
                    acc = acc + (J[v[0]] - J[j_pos]) * x
                prod *= _table_lookup(table, K, N, acc)
            inner_vals.append(prod)
        # inner normalization: the unused of the 2 delta-copies of x_i
        # factor out exactly
        inner_avg = math.fsum(inner_vals) / (N ** (len(inner_used) * K.degree))
        vals.append(inner_avg ** M)
    return math.fsum(vals) / (N ** (len(outer_used) * K.degree))


def _condition1(cfg, table, J, edges, Omegas, budget, sup_samples: int = 8):
    """sup over x^(0) of the condition-1 average; Omega entries equal to
    the all-ones vector make the average x^(0)-independent."""
    K, N = cfg.K, cfg.N
    terms = _enumerate_terms(J, edges, Omegas)
    used1 = sorted({v for _, _, deps in terms for v in deps if v[1] == 1})
    used0 = sorted({v for _, _, deps in terms for v in deps if v[1] == 0})
    states = N ** (len(used1) * K.degree)
    if states > budget:
        raise BudgetExceededError(f"{states} states exceed budget {budget}")
    res = _residues(K, N)
    import random

    rng = random.Random(0)
    if used0:
        samples = [tuple(rng.choice(res) for _ in used0)
                   for _ in range(sup_samples)]
    else:
        samples = [()]
    pos1 = {v: a for a, v in enumerate(used1)}
    pos0 = {v: a for a, v in enumerate(used0)}
    if K.degree == 1 and len(used1) <= 4:
        sup = 0.0
        for x0 in samples:
            lin_terms = []
            for j_pos, om, deps in terms:
                coeffs, const = [], 0
                for v in deps:
                    c = int((J[v[0]] - J[j_pos]).coords[0]) % N
                    if v[1] == 1:
                        coeffs.append((pos1[v], c))
                    else:
                        const += c * int(x0[pos0[v]].coords[0])
                lin_terms.append((coeffs, const % N))
            sup = max(sup, _product_mean_vectorized(N, table, lin_terms,
                                                    len(used1)))
        return sup
    sup = 0.0
    for x0 in samples:
        vals = []
        for x1 in itertools.product(res, repeat=len(used1)):
            prod = 1.0
            for j_pos, om, deps in terms:
                acc = K.zero
                for v in deps:
                    x = x1[pos1[v]] if v[1] == 1 else x0[pos0[v]]
                    acc = acc + (J[v[0]] - J[j_pos]) * x
                prod *= _table_lookup(table, K, N, acc)
            vals.append(prod)
        sup = max(sup, math.fsum(vals) / states)
    return sup


# ---------------------------------------------------------------------
# Relative density

def relative_density(subset, ambient, weight) -> float:
    """Weighted density of subset inside ambient."""
    denom = math.fsum(weight(x) for x in ambient)
    if denom == 0:
        raise ZeroDivisionError("zero total weight over the ambient set")
    num = math.fsum(weight(x) for x in subset)
    return num / denom
