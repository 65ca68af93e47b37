"""Sparse multivariate polynomials with exact rational coefficients.

Terms are stored in a dict mapping exponent tuples to non-zero coefficients.
Coefficients are Python ints whenever they are integral and ``Fraction``
otherwise, so integer-only workloads (fraction-free elimination, gcds) never
pay for rational normalisation.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from math import gcd, isqrt, lcm
from numbers import Rational
from typing import Iterable, Mapping, Sequence

Exps = tuple[int, ...]


class DimensionError(ValueError):
    pass


def grlex_key(e: Exps) -> tuple[int, Exps]:
    return (sum(e), e)


def _norm_coeff(c):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    if isinstance(c, Rational):
        return _norm_coeff(Fraction(c.numerator, c.denominator))
    raise TypeError(f"non-rational coefficient {c!r}")


def parse_coeff(text: str):
    return _norm_coeff(Fraction(text))


def format_coeff(c) -> str:
    c = _norm_coeff(c)
    return str(c) if isinstance(c, int) else f"{c.numerator}/{c.denominator}"


class MultiPoly:
    """Polynomial in ``nvars`` variables over the rationals."""

    __slots__ = ("nvars", "terms", "_lt")

    def __init__(self, nvars: int, terms: Mapping[Exps, object] | None = None, *, _trusted=False):
        self.nvars = nvars
        self._lt = None
        if _trusted:
            self.terms = terms
            return
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise DimensionError(f"exponent {e} does not have {nvars} entries")
            if any(x < 0 for x in e):
                raise ValueError(f"negative exponent in {e}")
            c = _norm_coeff(c)
            if c:
                clean[e] = clean.get(e, 0) + c
        self.terms = {e: _norm_coeff(c) for e, c in clean.items() if c}

    # construction helpers
    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars, {}, _trusted=True)

    @classmethod
    def constant(cls, nvars: int, c) -> "MultiPoly":
        c = _norm_coeff(c)
        return cls(nvars, {(0,) * nvars: c} if c else {}, _trusted=True)

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1}, _trusted=True)

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "MultiPoly":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def gens(cls, nvars: int) -> list["MultiPoly"]:
        return [cls.variable(nvars, i) for i in range(nvars)]

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self):
        return self.terms.get((0,) * self.nvars, 0)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def leading_term(self) -> tuple[Exps, object]:
        if self._lt is None:
            if not self.terms:
                raise ValueError("zero polynomial has no leading term")
            e = max(self.terms, key=grlex_key)
            self._lt = (e, self.terms[e])
        return self._lt

    def leading_coeff(self):
        return self.leading_term()[1]

    def sorted_terms(self) -> list[tuple[Exps, object]]:
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.terms.values())

    def max_norm(self) -> int:
        return max((abs(c) for c in self.terms.values()), default=0)

    # arithmetic
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise DimensionError(f"{self.nvars} vs {other.nvars} variables")
            return other
        return MultiPoly.constant(self.nvars, other)

    def __add__(self, other):
        if not isinstance(other, (MultiPoly, int, Fraction)):
            return NotImplemented
        other = self._coerce(other)
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        for e, c in b.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly(self.nvars, {e: _norm_coeff(c) for e, c in out.items()}, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        if not isinstance(other, (MultiPoly, int, Fraction)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "MultiPoly":
        c = _norm_coeff(c)
        if not c:
            return MultiPoly.zero(self.nvars)
        if c == 1:
            return self
        return MultiPoly(self.nvars, {e: _norm_coeff(v * c) for e, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        other = self._coerce(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return MultiPoly.zero(self.nvars)
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        n = self.nvars
        if n == 1:
            for (x,), c in b.items():
                for (y,), d in a.items():
                    k = (x + y,)
                    out[k] = get(k, 0) + c * d
        elif n == 2:
            for (x0, x1), c in b.items():
                for (y0, y1), d in a.items():
                    k = (x0 + y0, x1 + y1)
                    out[k] = get(k, 0) + c * d
        else:
            for eb, c in b.items():
                for ea, d in a.items():
                    k = tuple(x + y for x, y in zip(ea, eb))
                    out[k] = get(k, 0) + c * d
        return MultiPoly(n, {e: _norm_coeff(c) for e, c in out.items() if c}, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # content and primitive parts
    def content(self) -> Fraction:
        """Positive rational c with self/c integral and primitive."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            if isinstance(c, int):
                num = gcd(num, c)
            else:
                num = gcd(num, c.numerator)
                den = lcm(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> tuple[Fraction, "MultiPoly"]:
        """Return (c, p) with self = c*p, p integral primitive, leading coefficient > 0."""
        if not self.terms:
            return Fraction(0), self
        c = self.content()
        if self.leading_coeff() < 0:
            c = -c
        p = MultiPoly(self.nvars, {e: _norm_coeff(v / c) for e, v in self.terms.items()}, _trusted=True)
        return c, p

    def monic(self) -> "MultiPoly":
        return self.scale(Fraction(1) / Fraction(self.leading_coeff()))

    # calculus and evaluation
    def diff(self, i: int) -> "MultiPoly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                k = list(e)
                k[i] -= 1
                out[tuple(k)] = c * e[i]
        return MultiPoly(self.nvars, out, _trusted=True)

    def evaluate(self, values: Sequence):
        if len(values) != self.nvars:
            raise DimensionError(f"expected {self.nvars} values")
        total = 0
        for e, c in self.terms.items():
            t = c
            for v, k in zip(values, e):
                if k:
                    t = t * v**k
            total = total + t
        return total

    def eval_var(self, i: int, value) -> "MultiPoly":
        """Substitute a rational number for variable i (the variable stays in the ring)."""
        out: dict = {}
        for e, c in self.terms.items():
            k = e[:i] + (0,) + e[i + 1:]
            out[k] = out.get(k, 0) + c * value ** e[i]
        return MultiPoly(self.nvars, out)

    def compose(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute polynomials (possibly in another ring) for the variables."""
        if len(images) != self.nvars:
            raise DimensionError("wrong number of images")
        nv = images[0].nvars
        total = MultiPoly.zero(nv)
        cache: dict = {}
        for e, c in self.terms.items():
            t = MultiPoly.constant(nv, c)
            for i, k in enumerate(e):
                if k:
                    if (i, k) not in cache:
                        cache[(i, k)] = images[i] ** k
                    t = t * cache[(i, k)]
            total = total + t
        return total

    def coefficients_in(self, i: int) -> dict[int, "MultiPoly"]:
        """View as a polynomial in variable i: {power: coefficient free of variable i}."""
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            out.setdefault(e[i], {})[e[:i] + (0,) + e[i + 1:]] = c
        return {k: MultiPoly(self.nvars, v, _trusted=True) for k, v in out.items()}

    # division
    def divmod_by(self, divisor: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        """Multivariate division by a single polynomial under grlex."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        lt_e, lt_c = divisor.leading_term()
        rest = [(e, c) for e, c in divisor.terms.items() if e != lt_e]
        work = dict(self.terms)
        heap = [(-sum(e), tuple(-x for x in e)) for e in work]
        heapq.heapify(heap)
        quot: dict = {}
        rem: dict = {}
        n = self.nvars
        while heap:
            _, neg = heapq.heappop(heap)
            e = tuple(-x for x in neg)
            c = work.pop(e, 0)
            if not c:
                continue
            if all(a >= b for a, b in zip(e, lt_e)):
                qe = tuple(a - b for a, b in zip(e, lt_e))
                qc = Fraction(c) / lt_c if not (isinstance(c, int) and isinstance(lt_c, int) and c % lt_c == 0) else c // lt_c
                quot[qe] = qc
                for de, dc in rest:
                    k = tuple(a + b for a, b in zip(qe, de))
                    if k in work:
                        v = work[k] - qc * dc
                        if v:
                            work[k] = v
                        else:
                            del work[k]
                    else:
                        work[k] = -qc * dc
                        heapq.heappush(heap, (-sum(k), tuple(-x for x in k)))
            else:
                rem[e] = c
        return MultiPoly(n, quot), MultiPoly(n, rem)

    def exact_div(self, divisor: "MultiPoly") -> "MultiPoly":
        q, r = self.divmod_by(divisor)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def try_exact_div(self, divisor: "MultiPoly") -> "MultiPoly | None":
        """Exact quotient, or None if divisor does not divide self (cheap early exit)."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return MultiPoly.zero(self.nvars)
        for i in range(self.nvars):
            if divisor.degree_in(i) > self.degree_in(i):
                return None
        q, r = self.divmod_by(divisor)
        return None if r else q

    # presentation and serialisation
    def to_json(self) -> list:
        return [[list(e), format_coeff(c)] for e, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, nvars: int, data: Iterable) -> "MultiPoly":
        return cls(nvars, {tuple(e): parse_coeff(str(c)) for e, c in data})

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or default_names(self.nvars)
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = format_coeff(a)
            elif a == 1:
                body = mono
            else:
                body = f"{format_coeff(a)}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"MultiPoly({self.format()!r})"


def default_names(nvars: int) -> list[str]:
    return [f"z{i + 1}" for i in range(nvars)]


def parse_poly(text: str, names: Sequence[str]) -> MultiPoly:
    """Parse a polynomial written with +, -, *, ^ (or **) and integer/rational literals."""
    nvars = len(names)
    index = {n: i for i, n in enumerate(names)}
    s = text.replace("**", "^").replace(" ", "")
    if not s:
        raise ValueError("empty polynomial text")
    if s[0] not in "+-":
        s = "+" + s
    total = MultiPoly.zero(nvars)
    i = 0
    while i < len(s):
        sign = -1 if s[i] == "-" else 1
        i += 1
        j = i
        while j < len(s) and s[j] not in "+-":
            j += 1
        term = s[i:j]
        i = j
        coeff = Fraction(sign)
        exps = [0] * nvars
        for factor in term.split("*"):
            if not factor:
                raise ValueError(f"malformed term {term!r}")
            base, _, power = factor.partition("^")
            k = int(power) if power else 1
            if base in index:
                exps[index[base]] += k
            else:
                coeff *= Fraction(base) ** k
        total = total + MultiPoly(nvars, {tuple(exps): coeff})
    return total


# ----------------------------------------------------------------------------
# gcd


class HeuristicGCDFailed(Exception):
    pass


def _drop_last(p: MultiPoly, x: int) -> MultiPoly:
    """Evaluate the last variable at integer x, returning a polynomial in nvars-1 variables."""
    out: dict = {}
    for e, c in p.terms.items():
        k = e[:-1]
        out[k] = out.get(k, 0) + c * x ** e[-1]
    return MultiPoly(p.nvars - 1, {k: v for k, v in out.items() if v}, _trusted=True)


def _interpolate_last(h: MultiPoly, x: int) -> MultiPoly:
    """Inverse of _drop_last for integer polynomials with small coefficients (symmetric x-adic digits)."""
    out: dict = {}
    half = x // 2
    for e, c in h.terms.items():
        i = 0
        while c:
            r = c % x
            if r > half:
                r -= x
            if r:
                out[e + (i,)] = r
            c = (c - r) // x
            i += 1
    return MultiPoly(h.nvars + 1, out, _trusted=True)


def _int_primitive(p: MultiPoly) -> MultiPoly:
    c = 0
    for v in p.terms.values():
        c = gcd(c, v)
        if c == 1:
            break
    if c in (0, 1):
        return p
    return MultiPoly(p.nvars, {e: v // c for e, v in p.terms.items()}, _trusted=True)


def _heu_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """gcd of two non-zero integer polynomials up to sign (heuristic, verified by division)."""
    if f.nvars == 0:
        return MultiPoly(0, {(): gcd(f.constant_value(), g.constant_value())}, _trusted=True)
    cf = _int_primitive(f)
    cg = _int_primitive(g)
    cont = gcd(f.content().numerator, g.content().numerator)
    f, g = cf, cg
    fn, gn = f.max_norm(), g.max_norm()
    b = 2 * min(fn, gn) + 29
    x = max(min(b, 99 * isqrt(b)), 2 * min(fn // max(1, abs(f.leading_coeff())), gn // max(1, abs(g.leading_coeff()))) + 2)
    for _ in range(8):
        ff = _drop_last(f, x)
        gg = _drop_last(g, x)
        if ff and gg:
            try:
                h = _heu_gcd(ff, gg)
            except HeuristicGCDFailed:
                h = None
            if h is not None:
                h = _int_primitive(_interpolate_last(h, x))
                if h.terms and h.leading_coeff() < 0:
                    h = -h
                if h.terms and f.try_exact_div(h) is not None and g.try_exact_div(h) is not None:
                    return h.scale(cont)
        x = 73794 * x * isqrt(isqrt(x)) // 27011
    raise HeuristicGCDFailed


def _univariate_view(p: MultiPoly, i: int) -> dict[int, MultiPoly]:
    return p.coefficients_in(i)


def _prs_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Primitive pseudo-remainder gcd over Q, recursive on the highest-index variable present."""
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    n = f.nvars
    var = next((i for i in reversed(range(n)) if f.degree_in(i) > 0 or g.degree_in(i) > 0), None)
    if var is None:
        return MultiPoly.constant(n, 1)
    if f.degree_in(var) <= 0 or g.degree_in(var) <= 0:
        # one side is free of var: gcd divides every coefficient of the other
        a, b = (f, g) if f.degree_in(var) <= 0 else (g, f)
        h = a
        for c in _univariate_view(b, var).values():
            h = _prs_gcd(h, c)
        return h

    def content_in(p: MultiPoly) -> MultiPoly:
        h = MultiPoly.zero(n)
        for c in _univariate_view(p, var).values():
            h = _prs_gcd(h, c)
            if h.is_constant():
                return MultiPoly.constant(n, 1)
        return h

    cf, cg = content_in(f), content_in(g)
    f = f.exact_div(cf)
    g = g.exact_div(cg)
    c = _prs_gcd(cf, cg)
    if f.degree_in(var) < g.degree_in(var):
        f, g = g, f
    while not g.is_zero() and g.degree_in(var) > 0:
        r = _pseudo_rem(f, g, var)
        if r.is_zero():
            break
        f, g = g, r.exact_div(content_in(r))
    if g.is_zero() or g.degree_in(var) > 0:
        return g * c
    return c


def _pseudo_rem(f: MultiPoly, g: MultiPoly, var: int) -> MultiPoly:
    dg = g.degree_in(var)
    lc = _univariate_view(g, var)[dg]
    xv = MultiPoly.variable(f.nvars, var)
    r = f
    while not r.is_zero() and r.degree_in(var) >= dg:
        dr = r.degree_in(var)
        lr = _univariate_view(r, var)[dr]
        r = r * lc - g * lr * xv ** (dr - dg)
    return r


def poly_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Greatest common divisor over Q, normalised integral primitive with positive leading coefficient."""
    if f.nvars != g.nvars:
        raise DimensionError("gcd of polynomials in different rings")
    n = f.nvars
    if f.is_zero() and g.is_zero():
        return MultiPoly.zero(n)
    if f.is_zero():
        return g.primitive()[1]
    if g.is_zero():
        return f.primitive()[1]
    if f.is_constant() or g.is_constant():
        return MultiPoly.constant(n, 1)
    # common monomial factor first; the heuristic works on the cofactors
    fp = f.primitive()[1]
    gp = g.primitive()[1]
    mono = tuple(min(a, b) for a, b in zip(_min_exps(fp), _min_exps(gp)))
    fp = _shift_down(fp, _min_exps(fp))
    gp = _shift_down(gp, _min_exps(gp))
    if fp.is_constant() or gp.is_constant():
        h = MultiPoly.constant(n, 1)
    else:
        try:
            h = _heu_gcd(fp, gp)
        except HeuristicGCDFailed:
            h = _prs_gcd(fp, gp)
        h = h.primitive()[1]
    if any(mono):
        h = h * MultiPoly(n, {mono: 1}, _trusted=True)
    return h


def _min_exps(p: MultiPoly) -> Exps:
    return tuple(min(col) for col in zip(*p.terms))


def _shift_down(p: MultiPoly, e: Exps) -> MultiPoly:
    if not any(e):
        return p
    return MultiPoly(p.nvars, {tuple(a - b for a, b in zip(k, e)): c for k, c in p.terms.items()}, _trusted=True)


def poly_lcm(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    h = poly_gcd(f, g)
    return (f.exact_div(h) * g).primitive()[1]


# ----------------------------------------------------------------------------
# principal ideals


class PrincipalIdeal:
    """Ideal generated by one non-zero polynomial; grlex remainders are unique normal forms."""

    def __init__(self, generator: MultiPoly):
        if generator.is_zero():
            raise ValueError("the zero polynomial does not generate a proper principal ideal")
        self.generator = generator.primitive()[1]
        self.nvars = generator.nvars

    def divmod(self, p: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
        if p.nvars != self.nvars:
            raise DimensionError(f"polynomial in {p.nvars} variables, ideal in {self.nvars}")
        return p.divmod_by(self.generator)

    def normal_form(self, p: MultiPoly) -> MultiPoly:
        return self.divmod(p)[1]

    def contains(self, p: MultiPoly) -> bool:
        return self.normal_form(p).is_zero()

    def __repr__(self):
        return f"PrincipalIdeal({self.generator.format()!r})"


def normal_form(p: MultiPoly, ideal: PrincipalIdeal) -> MultiPoly:
    return ideal.normal_form(p)
