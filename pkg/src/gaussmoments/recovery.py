"""Exact recovery of a two-component Gaussian mixture from third moments.

Fixing distinct first mean coordinates mu11 and mu21 pins down a point of
the two-dimensional fiber; the remaining 17 parameters are then determined
uniquely and rationally.  The elimination follows the structure of the
moment equations:

1. the mixture weight comes from the first-coordinate mean equation;
2. the two remaining first-component mean coordinates are eliminated
   linearly;
3. all 12 covariance entries occur linearly and are solved in 2x2 blocks
   whose coefficient matrices are constant (their determinants are nonzero
   multiples of lambda*(1-lambda)*(mu21 - mu11));
4. what remains is a system of four polynomial equations in the two unknown
   mean coordinates of the second component.  Eliminating one unknown by a
   Sylvester resultant and intersecting with the univariate residual by a
   polynomial gcd leaves a linear factor, i.e. a unique rational solution.

Every recovered parameter set is verified against all binom(n+3, 3) moment
equations; the report carries the exact residual, which must be zero.
Inputs that are off the secant variety, or degenerate (equal first mean
coordinates, which force m300 = 3*m100*m200 - 2*m100^3), are rejected with a
structured error instead of being fitted approximately.

For n >= 4, recovery runs on the restrictions to the coordinate subsets
{1, i, j} in lexicographic order; the per-subset results must agree exactly
on every shared parameter.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import poly_det
from .moments import (GaussianParams, MixtureParams, MomentVector,
                      gaussian_moment_expr, mixture_moments, multi_indices)
from .polyring import QQ, Polynomial, PolyRing

Index = tuple[int, ...]


class RecoveryError(ValueError):
    """Recovery failed for a structural reason (bad input, off-variety
    moments, or a non-generic configuration)."""

    def __init__(self, reason: str, equation: Index | None = None):
        self.reason = reason
        self.equation = equation
        msg = reason if equation is None else f"{reason} (equation {equation})"
        super().__init__(msg)


@dataclass(frozen=True)
class RecoveryInput:
    """Moments of order <= 3 in the chart, plus the fixed distinct first
    coordinates of the two mean vectors."""

    m: MomentVector
    mu11: Fraction
    mu21: Fraction

    def __post_init__(self):
        object.__setattr__(self, "mu11", Fraction(self.mu11))
        object.__setattr__(self, "mu21", Fraction(self.mu21))
        if self.m.n < 3:
            raise RecoveryError("recovery needs n >= 3 (the n = 2 fiber has "
                                "three points, not one)")
        if self.m.d != 3:
            raise RecoveryError("recovery uses moments of order exactly 3")
        if self.mu11 == self.mu21:
            raise RecoveryError("the fixed first coordinates must be distinct")


@dataclass(frozen=True)
class RecoveryResult:
    params: MixtureParams
    residual: Fraction  # max absolute defect over all moment equations


def degenerate_mean_test(m: MomentVector) -> bool:
    """True iff m300 = 3*m100*m200 - 2*m100^3 holds exactly (the collapsed
    first-mean-coordinate identity)."""
    if m.d < 3:
        raise ValueError("the degenerate-mean test needs d >= 3")
    e1 = lambda v: tuple([v] + [0] * (m.n - 1))
    m1, m2, m3 = m[e1(1)], m[e1(2)], m[e1(3)]
    return m3 == 3 * m1 * m2 - 2 * m1 ** 3


# -- the n = 3 core -------------------------------------------------------------

_SVARS = ("s11", "s12", "s13", "s22", "s23", "s33")
_TVARS = ("t11", "t12", "t13", "t22", "t23", "t33")

# (equation for the plain entry, equation with one extra first-coordinate
# power, unknown pair); later pairs may use earlier solutions
_PAIR_STEPS = (
    ((2, 0, 0), (3, 0, 0), "s11", "t11"),
    ((1, 1, 0), (2, 1, 0), "s12", "t12"),
    ((1, 0, 1), (2, 0, 1), "s13", "t13"),
    ((0, 2, 0), (1, 2, 0), "s22", "t22"),
    ((0, 0, 2), (1, 0, 2), "s33", "t33"),
    ((0, 1, 1), (1, 1, 1), "s23", "t23"),
)

_RESIDUAL_EQS = ((0, 3, 0), (0, 0, 3), (0, 2, 1), (0, 1, 2))


def _sigma_name(prefix: str, i: int, j: int) -> str:
    if i > j:
        i, j = j, i
    return f"{prefix}{i + 1}{j + 1}"


def _constant_of(p: Polynomial, what: str) -> Fraction:
    if p.total_degree() > 0:
        raise RecoveryError(f"{what} is not constant; the moment vector is "
                            "not in the generic regime")
    return p.constant_term()


def _coeffs_in(p: Polynomial, var: str) -> list[Polynomial]:
    """Coefficients of p as a polynomial in one variable, ascending."""
    ring = p.ring
    i = ring.var_index(var)
    deg = max((e[i] for e in p.terms), default=0)
    buckets: list[dict] = [{} for _ in range(deg + 1)]
    for e, c in p.terms.items():
        stripped = list(e)
        k = stripped[i]
        stripped[i] = 0
        buckets[k][tuple(stripped)] = c
    return [ring.from_terms(b) for b in buckets]


def _sylvester_resultant(p: Polynomial, q: Polynomial, var: str) -> Polynomial:
    """Resultant eliminating ``var``; entries stay polynomials in the rest."""
    ring = p.ring
    if p.is_zero() or q.is_zero():
        return ring.zero()
    pc = _coeffs_in(p, var)
    qc = _coeffs_in(q, var)
    dp, dq = len(pc) - 1, len(qc) - 1
    if dp == 0:
        return pc[0] ** dq
    if dq == 0:
        return qc[0] ** dp
    size = dp + dq
    zero = ring.zero()
    rows = []
    for shift in range(dq):
        row = [zero] * size
        for t, c in enumerate(reversed(pc)):
            row[shift + t] = c
        rows.append(row)
    for shift in range(dp):
        row = [zero] * size
        for t, c in enumerate(reversed(qc)):
            row[shift + t] = c
        rows.append(row)
    return poly_det(rows)


def _univariate(p: Polynomial, var: str) -> list[Fraction]:
    """Fraction coefficient list (ascending) of a polynomial that may only
    involve ``var``."""
    out = []
    for c in _coeffs_in(p, var):
        out.append(_constant_of(c, "coefficient in the final system"))
    while out and out[-1] == 0:
        out.pop()
    return out


def _gcd_lists(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Monic gcd of univariate rational coefficient lists (Euclid)."""
    a, b = list(a), list(b)
    while b:
        # a mod b
        while len(a) >= len(b):
            if a[-1] == 0:
                a.pop()
                continue
            f = a[-1] / b[-1]
            off = len(a) - len(b)
            for i in range(len(b)):
                a[off + i] -= f * b[i]
            a.pop()
        a, b = b, a
        while b and b[-1] == 0:
            b.pop()
    lead = a[-1] if a else Fraction(1)
    return [c / lead for c in a]


def _unique_root(candidates: list[list[Fraction]], what: str) -> Fraction:
    """Common root of the candidate polynomials; must be a single simple one."""
    cands = [c for c in candidates if c]
    if not cands:
        raise RecoveryError(f"final system for {what} is identically zero; "
                            "moments are non-generic")
    if any(len(c) == 1 for c in cands):
        raise RecoveryError(f"final system for {what} has no solution; the "
                            "moment vector is not on the secant variety")
    g = cands[0]
    for c in cands[1:]:
        g = _gcd_lists(g, c)
    if len(g) == 1:
        raise RecoveryError(f"final system for {what} has no common solution; "
                            "the moment vector is not on the secant variety")
    if len(g) != 2:
        raise RecoveryError(
            f"final system for {what} does not have a unique solution "
            f"(gcd degree {len(g) - 1})")
    return -g[0] / g[1]


@dataclass(frozen=True)
class _Eliminated:
    """State after the linear eliminations: only (b2, b3) = (mu22, mu23)
    remain unknown."""

    lam: Fraction
    a2: Polynomial            # mu12 as a polynomial in b2
    a3: Polynomial            # mu13 as a polynomial in b3
    solutions: dict           # covariance name -> polynomial in (b2, b3)
    e_b2: Polynomial          # residual of m030, univariate in b2
    e_b3: Polynomial          # residual of m003, univariate in b3
    e_mix1: Polynomial        # residual of m021
    e_mix2: Polynomial        # residual of m012


def _eliminate(inp: RecoveryInput) -> _Eliminated:
    """Steps 1-3: weight, first-component means, and all covariances."""
    m = inp.m
    if m.n != 3:
        raise RecoveryError("recover_n3 needs a trivariate moment vector")
    if degenerate_mean_test(m):
        raise RecoveryError("moments satisfy the collapsed-mean identity "
                            "m300 = 3*m100*m200 - 2*m100^3; the fixed first "
                            "coordinates cannot be distinct")
    a1, b1 = inp.mu11, inp.mu21

    lam = (m[(1, 0, 0)] - b1) / (a1 - b1)
    if lam == 0 or lam == 1:
        raise RecoveryError(
            "degenerate mixture weight for the chosen first coordinates")

    ring = PolyRing(("b2", "b3") + _SVARS + _TVARS, QQ)
    b2, b3 = ring.var("b2"), ring.var("b3")

    # eliminate the first component's remaining mean coordinates
    a2 = ring.const(m[(0, 1, 0)] / lam) - b2.scale((1 - lam) / lam)
    a3 = ring.const(m[(0, 0, 1)] / lam) - b3.scale((1 - lam) / lam)

    mean_a = [ring.const(a1), a2, a3]
    mean_b = [ring.const(b1), b2, b3]
    sig_a = lambda i, j: ring.var(_sigma_name("s", i, j))
    sig_b = lambda i, j: ring.var(_sigma_name("t", i, j))

    eqs: dict[Index, Polynomial] = {}
    for idx in multi_indices(3, 3, min_order=2):
        expr = (gaussian_moment_expr(idx, mean_a, sig_a, ring.zero()).scale(lam)
                + gaussian_moment_expr(idx, mean_b, sig_b, ring.zero())
                .scale(1 - lam))
        eqs[idx] = expr - ring.const(m[idx])

    # the covariances occur linearly; solve them in 2x2 blocks
    solutions: dict[str, Polynomial] = {}
    for i1, i2, u, v in _PAIR_STEPS:
        e1, e2 = eqs[i1], eqs[i2]
        for (e, name) in ((e1, u), (e1, v), (e2, u), (e2, v)):
            if e.degree_in(name) > 1:
                raise AssertionError(f"covariance {name} is not linear in "
                                     f"equation {i1}/{i2}")
        cu1 = _constant_of(e1.differentiate(u), f"coefficient of {u}")
        cv1 = _constant_of(e1.differentiate(v), f"coefficient of {v}")
        cu2 = _constant_of(e2.differentiate(u), f"coefficient of {u}")
        cv2 = _constant_of(e2.differentiate(v), f"coefficient of {v}")
        det = cu1 * cv2 - cv1 * cu2
        if det == 0:
            raise RecoveryError(
                f"singular covariance block for ({u}, {v}); the chosen first "
                "coordinates are degenerate")
        rest1 = e1.substitute({u: 0, v: 0})
        rest2 = e2.substitute({u: 0, v: 0})
        u_sol = (rest2.scale(cv1) - rest1.scale(cv2)).scale(1 / det)
        v_sol = (rest1.scale(cu2) - rest2.scale(cu1)).scale(1 / det)
        solutions[u] = u_sol
        solutions[v] = v_sol
        sub = {u: u_sol, v: v_sol}
        eqs = {idx: e.substitute(sub) for idx, e in eqs.items()}

    for idx in _RESIDUAL_EQS:
        for name in _SVARS + _TVARS:
            if eqs[idx].degree_in(name) > 0:
                raise AssertionError(f"covariance {name} survived elimination")
    if (eqs[(0, 3, 0)].degree_in("b3") > 0
            or eqs[(0, 0, 3)].degree_in("b2") > 0):
        raise AssertionError("unexpected coupling in the univariate residuals")

    return _Eliminated(lam, a2, a3, solutions, eqs[(0, 3, 0)],
                       eqs[(0, 0, 3)], eqs[(0, 2, 1)], eqs[(0, 1, 2)])


def recover_n3(inp: RecoveryInput) -> RecoveryResult:
    """Exact recovery for n = 3 from the 19 moment equations."""
    m = inp.m
    st = _eliminate(inp)

    res1 = _sylvester_resultant(st.e_mix1, st.e_b3, "b3")
    res2 = _sylvester_resultant(st.e_mix2, st.e_b3, "b3")
    b2_star = _unique_root(
        [_univariate(q, "b2") for q in (st.e_b2, res1, res2)], "mu22")

    at_b2 = {"b2": b2_star}
    b3_star = _unique_root(
        [_univariate(q.substitute(at_b2), "b3")
         for q in (st.e_b3, st.e_mix1, st.e_mix2)], "mu23")

    point = {"b2": b2_star, "b3": b3_star}
    point.update({name: 0 for name in _SVARS + _TVARS})
    sval = {name: st.solutions[name].evaluate(point) for name in _SVARS}
    tval = {name: st.solutions[name].evaluate(point) for name in _TVARS}

    comp1 = GaussianParams(
        (inp.mu11, st.a2.evaluate(point), st.a3.evaluate(point)),
        tuple(sval[n] for n in _SVARS))
    comp2 = GaussianParams(
        (inp.mu21, b2_star, b3_star),
        tuple(tval[n] for n in _TVARS))
    params = MixtureParams((comp1, comp2), (st.lam, 1 - st.lam))
    return _verified(params, m)


def _verified(params: MixtureParams, m: MomentVector) -> RecoveryResult:
    """Exact verification of every moment equation; zero residual or error."""
    regen = mixture_moments(params, m.d)
    for idx in multi_indices(m.n, m.d):
        if regen[idx] != m[idx]:
            raise RecoveryError(
                "recovered parameters do not reproduce the moments; the "
                "input is not on the secant variety", equation=idx)
    return RecoveryResult(params, Fraction(0))


def recover_general(inp: RecoveryInput) -> RecoveryResult:
    """Recovery for n >= 4 by stitching the 3-coordinate subsets {1, i, j}.

    Subsets are processed in lexicographic order; any disagreement between
    overlapping recovered parameters is an error, never a vote.
    """
    m = inp.m
    n = m.n
    if n < 4:
        raise RecoveryError("recover_general needs n >= 4; use recover_n3")

    lam = None
    mean1: dict[int, Fraction] = {0: inp.mu11}
    mean2: dict[int, Fraction] = {0: inp.mu21}
    cov1: dict[tuple[int, int], Fraction] = {}
    cov2: dict[tuple[int, int], Fraction] = {}

    def put(store: dict, key, value, what: str):
        if key in store and store[key] != value:
            raise RecoveryError(
                f"cross-subset inconsistency for {what}; the moment vector "
                "is not on the secant variety")
        store[key] = value

    for i in range(1, n):
        for j in range(i + 1, n):
            sub = m.restrict((0, i, j))
            res = recover_n3(RecoveryInput(sub, inp.mu11, inp.mu21))
            c1, c2 = res.params.components
            w = res.params.weights[0]
            if lam is None:
                lam = w
            elif lam != w:
                raise RecoveryError("cross-subset inconsistency for the "
                                    "mixture weight")
            for pos, t in ((i, 1), (j, 2)):
                put(mean1, pos, c1.mean[t], f"mu1{pos + 1}")
                put(mean2, pos, c2.mean[t], f"mu2{pos + 1}")
            local = (0, i, j)
            for a in range(3):
                for b in range(a, 3):
                    key = (local[a], local[b])
                    put(cov1, key, c1.sigma(a, b), f"sigma1{key}")
                    put(cov2, key, c2.sigma(a, b), f"sigma2{key}")

    upper1 = tuple(cov1[(i, j)] for i in range(n) for j in range(i, n))
    upper2 = tuple(cov2[(i, j)] for i in range(n) for j in range(i, n))
    params = MixtureParams(
        (GaussianParams(tuple(mean1[i] for i in range(n)), upper1),
         GaussianParams(tuple(mean2[i] for i in range(n)), upper2)),
        (lam, 1 - lam))
    return _verified(params, m)


def recover(m: MomentVector, mu11, mu21) -> RecoveryResult:
    """Recover the two-component mixture behind a third-order moment vector,
    given the two (distinct) first mean coordinates."""
    inp = RecoveryInput(m, mu11, mu21)
    if m.n == 3:
        return recover_n3(inp)
    return recover_general(inp)
