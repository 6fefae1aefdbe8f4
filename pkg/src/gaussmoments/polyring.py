"""Exact sparse multivariate polynomial and truncated power-series arithmetic.

A polynomial is a map from exponent tuples to nonzero coefficients, tied to a
ring that fixes the ordered variable list and the coefficient field.  Two
coefficient fields are supported and nothing else:

* the rationals, represented by ``fractions.Fraction`` (always in lowest
  terms with positive denominator), and
* a prime field GF(p) for a word-sized prime p, represented by ints in
  ``[0, p)``.

There is no floating point anywhere in this module.  Term order for
iteration and text serialization is graded lexicographic (total degree
first, then lexicographic with the first variable most significant), which
makes all output deterministic.

A polynomial may carry a truncation bound T: terms of total degree > T are
discarded on construction and after every operation, which turns the ring
into the quotient by the (T+1)st power of the maximal ideal.  That is the
representation used for truncated power series, and it is what
:func:`series_exp` and :func:`series_log` operate on.

Polynomials are immutable values; all operations are pure functions, so
instances can be shared freely across threads.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

Exponent = tuple[int, ...]
ScalarLike = Union[int, Fraction]

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3 * 10**24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Rationals:
    """The field QQ.  Coefficients are ``Fraction`` instances."""

    name = "QQ"

    def coerce(self, x: ScalarLike) -> Fraction:
        return x if isinstance(x, Fraction) else Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in QQ")
        return 1 / Fraction(a)

    zero = Fraction(0)
    one = Fraction(1)

    def __repr__(self):  # pragma: no cover
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")


class PrimeField:
    """The field GF(p) for a word-sized prime p.  Elements are ints in [0, p)."""

    def __init__(self, p: int):
        if p >= 1 << 62:
            raise ValueError(f"prime {p} too large (must be < 2^62)")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.name = f"GF({p})"
        self.zero = 0
        self.one = 1 % p

    def coerce(self, x: ScalarLike) -> int:
        if isinstance(x, Fraction):
            den = x.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(
                    f"denominator {x.denominator} vanishes mod {self.p}")
            return x.numerator % self.p * pow(den, self.p - 2, self.p) % self.p
        return x % self.p

    def add(self, a, b):
        c = a + b
        return c - self.p if c >= self.p else c

    def sub(self, a, b):
        c = a - b
        return c + self.p if c < 0 else c

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return self.p - a if a else 0

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of zero in GF({self.p})")
        return pow(a, self.p - 2, self.p)

    def __repr__(self):  # pragma: no cover
        return self.name

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = Rationals()


def grlex_key(e: Exponent):
    """Sort key realizing the graded lexicographic order (ascending)."""
    return (sum(e), e)


class PolyRing:
    """A polynomial ring: an ordered tuple of variable names over a field."""

    def __init__(self, variables: Iterable[str], field=QQ):
        self.vars = tuple(variables)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable names")
        self.field = field
        self._index = {v: i for i, v in enumerate(self.vars)}
        self._zero_exp = (0,) * len(self.vars)

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and other.vars == self.vars
                and other.field == self.field)

    def __hash__(self):
        return hash((self.vars, self.field))

    def __repr__(self):  # pragma: no cover
        return f"PolyRing({list(self.vars)}, {self.field!r})"

    def var_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown variable {name!r}") from None

    def zero(self, trunc: int | None = None) -> "Polynomial":
        return Polynomial(self, {}, trunc)

    def one(self, trunc: int | None = None) -> "Polynomial":
        return self.const(1, trunc)

    def const(self, c: ScalarLike, trunc: int | None = None) -> "Polynomial":
        c = self.field.coerce(c)
        terms = {} if c == self.field.zero else {self._zero_exp: c}
        return Polynomial(self, terms, trunc)

    def var(self, name: str, trunc: int | None = None) -> "Polynomial":
        i = self.var_index(name)
        e = list(self._zero_exp)
        e[i] = 1
        return Polynomial(self, {tuple(e): self.field.one}, trunc)

    def monomial(self, exponent: Exponent, c: ScalarLike = 1,
                 trunc: int | None = None) -> "Polynomial":
        if len(exponent) != len(self.vars):
            raise ValueError("exponent length does not match variable count")
        c = self.field.coerce(c)
        terms = {} if c == self.field.zero else {tuple(exponent): c}
        return Polynomial(self, terms, trunc)

    def from_terms(self, terms: Mapping[Exponent, ScalarLike],
                   trunc: int | None = None) -> "Polynomial":
        f = self.field
        clean = {}
        for e, c in terms.items():
            c = f.coerce(c)
            if c != f.zero:
                clean[tuple(e)] = c
        return Polynomial(self, clean, trunc)


class Polynomial:
    """Immutable sparse polynomial, optionally truncated at total degree T."""

    __slots__ = ("ring", "terms", "trunc")

    def __init__(self, ring: PolyRing, terms: dict, trunc: int | None = None):
        if trunc is not None:
            terms = {e: c for e, c in terms.items() if sum(e) <= trunc}
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "trunc", trunc)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Polynomial is immutable")

    # -- basic queries ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        """Degree in one variable; -1 for the zero polynomial."""
        i = self.ring.var_index(name)
        return max((e[i] for e in self.terms), default=-1)

    def coefficient(self, exponent: Exponent):
        return self.terms.get(tuple(exponent), self.ring.field.zero)

    def constant_term(self):
        return self.terms.get(self.ring._zero_exp, self.ring.field.zero)

    def sorted_terms(self, reverse: bool = True):
        """Terms in graded-lex order; ``reverse=True`` puts the leading term first."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]),
                      reverse=reverse)

    # -- arithmetic --------------------------------------------------------

    def _check_compatible(self, other: "Polynomial"):
        if self.ring.vars != other.ring.vars:
            raise ValueError("variable-list mismatch between polynomial operands")
        if self.ring.field != other.ring.field:
            raise ValueError("coefficient-field mismatch between polynomial operands")

    @staticmethod
    def _merge_trunc(a: int | None, b: int | None) -> int | None:
        if a is None:
            return b
        if b is None:
            return a
        return min(a, b)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.const(other)
        self._check_compatible(other)
        f = self.ring.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = f.add(out.get(e, f.zero), c)
            if s == f.zero:
                out.pop(e, None)
            else:
                out[e] = s
        return Polynomial(self.ring, out, self._merge_trunc(self.trunc, other.trunc))

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        f = self.ring.field
        return Polynomial(self.ring, {e: f.neg(c) for e, c in self.terms.items()},
                          self.trunc)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = self.ring.const(other)
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        return self.__neg__().__add__(other)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check_compatible(other)
        f = self.ring.field
        trunc = self._merge_trunc(self.trunc, other.trunc)
        out: dict = {}
        for ea, ca in self.terms.items():
            da = sum(ea)
            for eb, cb in other.terms.items():
                if trunc is not None and da + sum(eb) > trunc:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                s = f.add(out.get(e, f.zero), f.mul(ca, cb))
                if s == f.zero:
                    out.pop(e, None)
                else:
                    out[e] = s
        return Polynomial(self.ring, out, trunc)

    def __rmul__(self, other):
        return self.__mul__(other)

    def scale(self, c: ScalarLike) -> "Polynomial":
        f = self.ring.field
        c = f.coerce(c)
        if c == f.zero:
            return Polynomial(self.ring, {}, self.trunc)
        return Polynomial(self.ring, {e: f.mul(v, c) for e, v in self.terms.items()},
                          self.trunc)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one(self.trunc)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            if self.ring._zero_exp in self.terms or not self.terms:
                return self == self.ring.const(other)
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    __hash__ = None

    # -- calculus and evaluation -------------------------------------------

    def differentiate(self, name: str) -> "Polynomial":
        """Formal partial derivative; the truncation bound is preserved."""
        i = self.ring.var_index(name)
        f = self.ring.field
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k == 0:
                continue
            d = list(e)
            d[i] = k - 1
            v = f.mul(c, f.coerce(k))
            if v != f.zero:
                out[tuple(d)] = v
        return Polynomial(self.ring, out, self.trunc)

    def evaluate(self, point: Mapping[str, ScalarLike]):
        """Exact evaluation; ``point`` must assign every ring variable."""
        f = self.ring.field
        vals = []
        for v in self.ring.vars:
            if v not in point:
                raise ValueError(f"missing assignment for variable {v!r}")
            vals.append(f.coerce(point[v]))
        if isinstance(f, PrimeField):
            p = f.p
            acc = 0
            for e, c in self.terms.items():
                t = c
                for i, k in enumerate(e):
                    if k:
                        t = t * pow(vals[i], k, p) % p
                acc = (acc + t) % p
            return acc
        acc = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    t = t * vals[i] ** k
            acc = acc + t
        return acc

    def substitute(self, mapping: Mapping[str, "Polynomial | ScalarLike"]) -> "Polynomial":
        """Substitute polynomials (or scalars) for a subset of the variables.

        Substituted polynomials must live in the same ring.  Variables not in
        ``mapping`` are left alone.
        """
        ring = self.ring
        subs: dict[int, Polynomial] = {}
        for name, val in mapping.items():
            i = ring.var_index(name)
            if isinstance(val, Polynomial):
                self._check_compatible(val)
                subs[i] = val
            else:
                subs[i] = ring.const(val)
        out = ring.zero(self.trunc)
        for e, c in self.terms.items():
            rest = list(e)
            factor = None
            for i, p in subs.items():
                k = e[i]
                if k:
                    rest[i] = 0
                    q = p ** k
                    factor = q if factor is None else factor * q
            term = ring.monomial(tuple(rest), c, self.trunc)
            out = out + (term * factor if factor is not None else term)
        return out

    # -- serialization -----------------------------------------------------

    def __str__(self) -> str:
        """Canonical text form: graded-lex order, ``coeff*var^e`` syntax."""
        if not self.terms:
            return "0"
        rational = isinstance(self.ring.field, Rationals)
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"{v}^{k}" if k > 1 else v
                for v, k in zip(self.ring.vars, e) if k)
            if rational:
                neg = c < 0
                a = -c if neg else c
                if not mono:
                    body = str(a)
                elif a == 1:
                    body = mono
                else:
                    body = f"{a}*{mono}"
                if not pieces:
                    pieces.append(f"-{body}" if neg else body)
                else:
                    pieces.append(f"- {body}" if neg else f"+ {body}")
            else:
                body = str(c) if not mono else (mono if c == 1 else f"{c}*{mono}")
                pieces.append(body if not pieces else f"+ {body}")
        return " ".join(pieces)

    def __repr__(self):  # pragma: no cover
        t = f", trunc={self.trunc}" if self.trunc is not None else ""
        return f"<Polynomial {self}{t}>"


# -- truncated power series ------------------------------------------------


def series_exp(p: Polynomial) -> Polynomial:
    """exp of a truncated series: sum of p^j / j! for j = 0..T.

    Requires a zero constant term and a truncation bound T.  Over GF(p) the
    prime must exceed T so that every 1/j! exists.
    """
    if p.trunc is None:
        raise ValueError("series_exp requires a truncation bound")
    if p.constant_term() != p.ring.field.zero:
        raise ValueError("series_exp requires a zero constant term")
    f = p.ring.field
    if isinstance(f, PrimeField) and f.p <= p.trunc:
        raise ValueError(f"prime {f.p} must exceed the truncation {p.trunc}")
    acc = p.ring.one(p.trunc)
    term = p.ring.one(p.trunc)
    for j in range(1, p.trunc + 1):
        term = (term * p).scale(f.inv(f.coerce(j)))
        if term.is_zero():
            break
        acc = acc + term
    return acc


def series_log(p: Polynomial) -> Polynomial:
    """log of a truncated series: sum of (-1)^(j+1) (p-1)^j / j for j = 1..T.

    Requires constant term 1 and a truncation bound T.
    """
    if p.trunc is None:
        raise ValueError("series_log requires a truncation bound")
    if p.constant_term() != p.ring.field.one:
        raise ValueError("series_log requires constant term 1")
    f = p.ring.field
    if isinstance(f, PrimeField) and f.p <= p.trunc:
        raise ValueError(f"prime {f.p} must exceed the truncation {p.trunc}")
    q = p - p.ring.one(p.trunc)
    acc = p.ring.zero(p.trunc)
    power = p.ring.one(p.trunc)
    for j in range(1, p.trunc + 1):
        power = power * q
        if power.is_zero():
            break
        term = power.scale(f.inv(f.coerce(j)))
        acc = acc + term if j % 2 else acc - term
    return acc


def exact_div(num: Polynomial, den: Polynomial) -> Polynomial:
    """Exact polynomial division: returns q with num = q * den.

    Raises ``ValueError``.  Used by fraction-free elimination, where
    divisibility is guaranteed; works with any monomial order, here grlex.
    """
    num._check_compatible(den)
    if den.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    ring = num.ring
    f = ring.field
    den_lead, den_lc = max(den.terms.items(), key=lambda t: grlex_key(t[0]))
    den_lc_inv = f.inv(den_lc)
    rem = num
    q_terms: dict = {}
    while not rem.is_zero():
        lead, lc = max(rem.terms.items(), key=lambda t: grlex_key(t[0]))
        e = tuple(a - b for a, b in zip(lead, den_lead))
        if any(k < 0 for k in e):
            raise ValueError("inexact polynomial division")
        c = f.mul(lc, den_lc_inv)
        q_terms[e] = c
        rem = rem - den * ring.monomial(e, c)
    return ring.from_terms(q_terms)
