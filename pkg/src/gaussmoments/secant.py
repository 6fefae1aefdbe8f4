"""Dimensions and defects of secant varieties of Gaussian moment varieties.

The dimension of the k-th secant variety equals the generic rank of the
Jacobian of the mixture parametrization, computed here exactly over a prime
field at seeded random points.  The Jacobian is assembled from the symbolic
partials of the single-Gaussian moment polynomials: the column block of one
component is its weight times the per-component partials, and the column of
a free mixture weight is the difference between that component's moments and
the last component's.  The last weight is eliminated (lambda_k = 1 - sum),
so the column count is exactly the parameter count k*n*(n+3)/2 + k - 1.

A reported dimension is a certified lower bound for the generic rank; by
Schwartz-Zippel it equals the generic rank with probability at least
1 - r*d/p per trial, which the attached certificate records.

The closed-form dimension, defect and degree formulas from the d=3 and d=4
censuses live here as exact integer evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .linalg import rank_mod_p
from .moments import (MixtureParams, moment_polynomials, multi_indices)
from .rng import PRNG_NAME, SplitMix64, derive_seed

# Fixed 62-bit default prime (2^62 - 57).  It exceeds 20!, so modular
# factorials are invertible for every order d <= 20 used in rank runs, and
# Schwartz-Zippel failure is negligible.
DEFAULT_PRIME = 4611686018427387847
DEFAULT_TRIALS = 3
DEFAULT_SEED = 2016


@dataclass(frozen=True)
class SecantProblem:
    """The triple (n, d, k): k-mixtures of n-dimensional Gaussians, moments
    of order <= d."""

    n: int
    d: int
    k: int

    def __post_init__(self):
        if self.n < 1 or self.d < 1 or self.k < 1:
            raise ValueError("n, d, k must be positive")

    @property
    def ambient(self) -> int:
        """N = binom(n+d, d) - 1."""
        return comb(self.n + self.d, self.d) - 1

    @property
    def parameters(self) -> int:
        """par = k*n*(n+3)/2 + k - 1."""
        return self.k * self.n * (self.n + 3) // 2 + self.k - 1

    @property
    def expected(self) -> int:
        return min(self.ambient, self.parameters)


def expected_dimension(p: SecantProblem) -> int:
    """The parameter-count upper bound min(N, k*n*(n+3)/2 + k - 1)."""
    return p.expected


@dataclass(frozen=True)
class RankCertificate:
    """Record of one seeded rank experiment.

    ``reported`` (the max over trials) is an exact lower bound for the
    generic rank; per trial it equals the generic rank except with
    probability at most degree_bound / prime.
    """

    prime: int
    seed: int
    trials: int
    prng: str
    ranks: tuple[int, ...]
    reported: int
    degree_bound: int

    def failure_bound(self) -> Fraction:
        return Fraction(self.degree_bound, self.prime)

    def to_json(self) -> dict:
        return {
            "prime": self.prime,
            "seed": self.seed,
            "trials": self.trials,
            "prng": self.prng,
            "ranks": list(self.ranks),
            "reported": self.reported,
            "degree_bound": self.degree_bound,
            "failure_bound": f"{self.degree_bound}/{self.prime}",
        }


@dataclass(frozen=True)
class DefectRow:
    """One census row, with the column layout of the defect tables."""

    n: int
    k: int
    d: int
    par: int
    N: int
    exp: int
    dim: int
    delta: int
    par_minus_dim: int

    COLUMNS = ("n", "k", "d", "par", "N", "exp", "dim", "delta", "par_minus_dim")

    def astuple(self) -> tuple[int, ...]:
        return (self.n, self.k, self.d, self.par, self.N, self.exp, self.dim,
                self.delta, self.par_minus_dim)

    def fills_ambient(self) -> bool:
        return self.dim == self.N

    def is_defective(self) -> bool:
        return self.delta > 0


# -- Jacobian machinery --------------------------------------------------------


@dataclass(frozen=True)
class _JacobianContext:
    n: int
    d: int
    indices: tuple            # multi-indices of order 1..d (the rows)
    n_params: int             # M = n(n+3)/2
    moment_terms: tuple       # per row: ((coeff, ((var, exp), ...)), ...)
    partial_terms: tuple      # per row: ((param, terms), ...) nonzero partials


def _compile(poly) -> tuple:
    out = []
    for e, c in sorted(poly.terms.items()):
        assert c.denominator == 1
        powers = tuple((i, k) for i, k in enumerate(e) if k)
        out.append((int(c), powers))
    return tuple(out)


@lru_cache(maxsize=None)
def _jacobian_context(n: int, d: int) -> _JacobianContext:
    polys = moment_polynomials(n, d)
    ring = next(iter(polys.values())).ring
    indices = tuple(multi_indices(n, d, min_order=1))
    moment_terms = []
    partial_terms = []
    for idx in indices:
        poly = polys[idx]
        moment_terms.append(_compile(poly))
        parts = []
        for j, v in enumerate(ring.vars):
            dp = poly.differentiate(v)
            if not dp.is_zero():
                parts.append((j, _compile(dp)))
        partial_terms.append(tuple(parts))
    return _JacobianContext(n, d, indices, len(ring.vars),
                            tuple(moment_terms), tuple(partial_terms))


def _eval_terms(terms, vals, p: int) -> int:
    acc = 0
    for c, powers in terms:
        t = c
        for i, k in powers:
            t = t * pow(vals[i], k, p)
        acc += t
    return acc % p


def _jacobian_mod_p(ctx: _JacobianContext, comp_vals, weights, p: int):
    """Rows: moments of order 1..d; columns: per-component (mu, sigma) blocks
    then the k-1 free weights."""
    k = len(comp_vals)
    m = ctx.n_params
    n_rows = len(ctx.indices)
    par = k * m + k - 1
    jac = [[0] * par for _ in range(n_rows)]
    for ell in range(k):
        vals = comp_vals[ell]
        lam = weights[ell]
        base = ell * m
        for r in range(n_rows):
            row = jac[r]
            for j, terms in ctx.partial_terms[r]:
                row[base + j] = lam * _eval_terms(terms, vals, p) % p
    if k > 1:
        mom = [[_eval_terms(ctx.moment_terms[r], comp_vals[ell], p)
                for r in range(n_rows)] for ell in range(k)]
        last = mom[k - 1]
        for ell in range(k - 1):
            col = k * m + ell
            mell = mom[ell]
            for r in range(n_rows):
                jac[r][col] = (mell[r] - last[r]) % p
    return jac


def _params_to_modular(point: MixtureParams, p: int):
    def red(x: Fraction) -> int:
        den = x.denominator % p
        if den == 0:
            raise ZeroDivisionError("parameter denominator vanishes mod p")
        return x.numerator % p * pow(den, p - 2, p) % p

    comp_vals = [
        [red(x) for x in comp.mean] + [red(x) for x in comp.cov_upper]
        for comp in point.components
    ]
    weights = [red(w) for w in point.weights]
    return comp_vals, weights


def secant_jacobian(problem: SecantProblem, point: MixtureParams,
                    prime: int = DEFAULT_PRIME) -> list[list[int]]:
    """The N x par Jacobian of the mixture parametrization at the point,
    over GF(prime).  The prime must exceed d!."""
    if prime <= factorial(problem.d):
        raise ValueError(f"prime {prime} too small: must exceed {problem.d}!")
    if point.n != problem.n or point.k != problem.k:
        raise ValueError("parameter point does not match the problem")
    ctx = _jacobian_context(problem.n, problem.d)
    comp_vals, weights = _params_to_modular(point, prime)
    return _jacobian_mod_p(ctx, comp_vals, weights, prime)


def _random_modular_point(problem: SecantProblem, prime: int, rng: SplitMix64):
    m = problem.n * (problem.n + 3) // 2
    comp_vals = [[rng.below(prime) for _ in range(m)]
                 for _ in range(problem.k)]
    free = [rng.below(prime) for _ in range(problem.k - 1)]
    last = (1 - sum(free)) % prime
    return comp_vals, free + [last]


def secant_dimension(problem: SecantProblem, trials: int = DEFAULT_TRIALS,
                     seed: int = DEFAULT_SEED,
                     prime: int = DEFAULT_PRIME) -> tuple[int, RankCertificate]:
    """Dimension of the k-th secant variety as the max Jacobian rank over
    seeded random prime-field points, with a reproducible certificate."""
    if trials < 1:
        raise ValueError("at least one trial required")
    if prime <= factorial(problem.d):
        raise ValueError(f"prime {prime} too small: must exceed {problem.d}!")
    ctx = _jacobian_context(problem.n, problem.d)
    ranks = []
    for t in range(trials):
        rng = SplitMix64(derive_seed(seed, problem.n, problem.d, problem.k, t))
        comp_vals, weights = _random_modular_point(problem, prime, rng)
        jac = _jacobian_mod_p(ctx, comp_vals, weights, prime)
        ranks.append(rank_mod_p(jac, prime))
    dim = max(ranks)
    if dim > problem.expected:
        raise AssertionError(
            f"computed rank {dim} exceeds the expected dimension "
            f"{problem.expected}; this is an implementation bug")
    cert = RankCertificate(prime=prime, seed=seed, trials=trials,
                           prng=PRNG_NAME, ranks=tuple(ranks), reported=dim,
                           degree_bound=dim * problem.d)
    return dim, cert


def defect_row(problem: SecantProblem, trials: int = DEFAULT_TRIALS,
               seed: int = DEFAULT_SEED,
               prime: int = DEFAULT_PRIME) -> tuple[DefectRow, RankCertificate]:
    dim, cert = secant_dimension(problem, trials=trials, seed=seed, prime=prime)
    row = DefectRow(
        n=problem.n, k=problem.k, d=problem.d,
        par=problem.parameters, N=problem.ambient, exp=problem.expected,
        dim=dim, delta=problem.expected - dim,
        par_minus_dim=problem.parameters - dim)
    return row, cert


def census(d: int, n_values, k_values, defective_only: bool = True,
           trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED,
           prime: int = DEFAULT_PRIME) -> list[DefectRow]:
    """One DefectRow per (n, k) in the given ranges, merged in (n, k) order.

    ``k_values`` is either an iterable of k, or a mapping n -> iterable of k.
    With ``defective_only`` rows with zero defect (in particular all rows
    that fill the ambient space) are dropped, matching the published tables.
    """
    rows = []
    for n in sorted(set(n_values)):
        ks = k_values[n] if isinstance(k_values, dict) else k_values
        for k in sorted(set(ks)):
            row, _ = defect_row(SecantProblem(n, d, k), trials=trials,
                                seed=seed, prime=prime)
            if defective_only and not row.is_defective():
                continue
            rows.append(row)
    return rows


# -- closed-form formulas --------------------------------------------------------


def dim_formula_d3(n: int, k: int) -> int:
    """Conjectured dimension of the k-th secant at d = 3:
    (1/6) k [k^2 - 3(n+4)k + 3n(n+6) + 23] - (n+2)."""
    if n < 2 or k < 1:
        raise ValueError("the d=3 dimension formula needs n >= 2, k >= 1")
    num = k * (k * k - 3 * (n + 4) * k + 3 * n * (n + 6) + 23)
    if num % 6:
        raise ArithmeticError(f"formula value not divisible by 6 at (n={n}, k={k})")
    return num // 6 - (n + 2)


def defect_identity_d3(n: int, k: int) -> int:
    """The rewritten identity for (parameters) - (dimension) at d = 3:
    (1/2)(k-1)(k-2) n - (1/6)(k-1)(k^2 - 11k + 6)."""
    num = 3 * (k - 1) * (k - 2) * n - (k - 1) * (k * k - 11 * k + 6)
    if num % 6:
        raise ArithmeticError(f"defect identity not integral at (n={n}, k={k})")
    return num // 6


def dim_formula_d3_max_k(n: int) -> int:
    """Largest K for which the d=3 dimension formula still tracks secant
    dimensions: the formula must stay within the ambient dimension and in
    its increasing range (the cubic dips again after the secants fill, which
    happens for n = 2 already at k = 3)."""
    ambient = comb(n + 3, 3) - 1
    k = 1
    prev = dim_formula_d3(n, 1)
    while True:
        nxt = dim_formula_d3(n, k + 1)
        if nxt <= prev or nxt > ambient:
            return k
        k += 1
        prev = nxt


def conjecture_eleven_defect(n: int, r: int) -> int:
    """Conjectured (n+r)-defect binom(r-1, 2) of the d = 4 moment variety."""
    if n < 8 or r < 3:
        raise ValueError("the d=4 defect pattern needs n >= 8 and r >= 3")
    return comb(r - 1, 2)


def _exact_quotient(num: int, den: int, what: str) -> int:
    if num % den:
        raise ArithmeticError(f"{what} is not an integer")
    return num // den


def degree_formula_sec2_g1(d: int) -> int:
    """Degree of the secant of two-component univariate mixtures:
    (d+7)(d-4)(d-3)(d-2)/8.  Zero for d in {2, 3, 4}; 9 at d = 5 (Pearson)."""
    if d < 2:
        raise ValueError("degree formula needs d >= 2")
    return _exact_quotient((d + 7) * (d - 4) * (d - 3) * (d - 2), 8,
                           "secant degree")


def degree_formula_sec2_x(d: int) -> int:
    """Degree of the secant of a general surface with the same matrix format:
    (d-4)(d-3)(d^2+5d-2)/8."""
    if d < 4:
        raise ValueError("general-surface degree formula needs d >= 4")
    return _exact_quotient((d - 4) * (d - 3) * (d * d + 5 * d - 2), 8,
                           "secant degree")


def degree_formula_sec3_x(d: int) -> int:
    """Trisecant degree of a general surface:
    (d-6)(d^5+3d^4-57d^3-43d^2+752d-512)/48."""
    if d < 6:
        raise ValueError("trisecant degree formula needs d >= 6")
    return _exact_quotient(
        (d - 6) * (d ** 5 + 3 * d ** 4 - 57 * d ** 3 - 43 * d ** 2
                   + 752 * d - 512), 48, "trisecant degree")


DEG_SEC2_G1_VERIFIED_MAX = 11  # largest d with the degree checked numerically
