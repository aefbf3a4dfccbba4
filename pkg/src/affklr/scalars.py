"""Exact scalar arithmetic.

Everything downstream computes over these types:

* ``QMono``      -- a signed quantum monomial c*(-q)^m with rational c,
* ``Poly`` terms -- multivariate polynomials as dicts {exponent tuple: Fraction},
* ``RatFun``     -- reduced fractions of such polynomials, canonically normalized
                    (denominator monic under graded-lex order with q compared last),
* ``LaurentQ``   -- Laurent polynomials in q (graded dimensions, quantum integers),
* ``TruncPoly``  -- polynomials in nilpotent variables truncated per-variable,
                    with RatFun-in-q coefficients.

All coefficients are Fractions, so equality is decidable and every operation
is exact.  RatFun values are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd as _int_gcd

Terms = dict  # {tuple[int, ...]: Fraction}


class ScalarError(ArithmeticError):
    pass


class PoleError(ScalarError):
    """Raised when an expansion point hits a vanishing denominator."""

    def __init__(self, factor_repr):
        super().__init__("denominator vanishes at the anchor: %s" % factor_repr)
        self.factor = factor_repr


# ---------------------------------------------------------------------------
# signed quantum monomials c * (-q)^m


@dataclass(frozen=True)
class QMono:
    """A signed q-monomial c*(-q)^m; the only spectral anchors we allow."""

    c: Fraction
    m: int

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c == 0:
            raise ScalarError("zero is not an invertible anchor")

    def __mul__(self, other):
        return QMono(self.c * other.c, self.m + other.m)

    def __truediv__(self, other):
        return QMono(self.c / other.c, self.m - other.m)

    def inv(self):
        return QMono(1 / self.c, -self.m)

    def __pow__(self, e):
        return QMono(self.c ** e, self.m * e)

    def is_one(self):
        return self.c == 1 and self.m == 0

    def signed_coeff(self):
        """Coefficient of q^m, i.e. c*(-1)^m."""
        return self.c if self.m % 2 == 0 else -self.c

    def __str__(self):
        if self.m == 0:
            return str(self.c)
        base = "(-q)" if self.m != 0 else ""
        s = "%s^%d" % (base, self.m) if self.m != 1 else base
        return s if self.c == 1 else "%s*%s" % (self.c, s)


ONE_QM = QMono(Fraction(1), 0)


def qmono_parse(text):
    """Parse 'm' or 'c (-q)^m' shorthand: "2", "-3", "1/2:4" -> c=1/2, m=4."""
    text = text.strip()
    if ":" in text:
        c, m = text.split(":")
        return QMono(Fraction(c), int(m))
    return QMono(Fraction(1), int(text))


# ---------------------------------------------------------------------------
# raw polynomial dict helpers


def _zeros(n):
    return (0,) * n


def t_add(a: Terms, b: Terms) -> Terms:
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def t_neg(a: Terms) -> Terms:
    return {e: -c for e, c in a.items()}

def t_sub(a: Terms, b: Terms) -> Terms:
    return t_add(a, t_neg(b))


def t_scale(a: Terms, s) -> Terms:
    if not s:
        return {}
    return {e: c * s for e, c in a.items()}


def t_mul(a: Terms, b: Terms) -> Terms:
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = out.get(e, 0) + ca * cb
            if s:
                out[e] = s
            else:
                del out[e]
    return out


def t_pow(a: Terms, n: int, nvars: int) -> Terms:
    if n < 0:
        raise ScalarError("negative power of a polynomial")
    out = t_const(nvars, 1)
    base = a
    while n:
        if n & 1:
            out = t_mul(out, base)
        n >>= 1
        if n:
            base = t_mul(base, base)
    return out


def t_const(n, c) -> Terms:
    c = Fraction(c)
    return {_zeros(n): c} if c else {}


def t_var(n, i, e=1) -> Terms:
    exp = [0] * n
    exp[i] = e
    return {tuple(exp): Fraction(1)}


def _order_key(ctx):
    """Graded lex with q compared last; ties broken by remaining vars in ctx order."""
    n = len(ctx)
    if "q" in ctx:
        iq = ctx.index("q")
        idx = [i for i in range(n) if i != iq] + [iq]
    else:
        idx = list(range(n))

    def key(e):
        return (sum(e),) + tuple(e[i] for i in idx)

    return key


def t_leading(a: Terms, key):
    e = max(a, key=key)
    return e, a[e]


def t_degree_in(a: Terms, i) -> int:
    return max((e[i] for e in a), default=0)


def t_divexact(a: Terms, b: Terms, key):
    """Return a/b if b divides a exactly, else None."""
    if not a:
        return {}
    if not b:
        return None
    eb, cb = t_leading(b, key)
    rem = dict(a)
    quo = {}
    while rem:
        ea, ca = t_leading(rem, key)
        de = tuple(x - y for x, y in zip(ea, eb))
        if any(x < 0 for x in de):
            return None
        qc = ca / cb
        quo[de] = qc
        rem = t_sub(rem, t_mul({de: qc}, b))
    return quo


def _t_content_frac(a: Terms) -> Fraction:
    """gcd of the coefficients, sign matching the given leading coefficient."""
    num = 0
    den = 1
    for c in a.values():
        num = _int_gcd(num, c.numerator)
        den = den * c.denominator // _int_gcd(den, c.denominator)
    return Fraction(num, den)


def _coeffs_in_var(a: Terms, i):
    """View a as univariate in var i: {deg: coefficient-poly (var-i exponent zeroed)}."""
    out = {}
    for e, c in a.items():
        d = e[i]
        e0 = e[:i] + (0,) + e[i + 1:]
        out.setdefault(d, {})[e0] = c
    return out


def _from_coeffs(cs, i):
    out = {}
    for d, sub in cs.items():
        for e, c in sub.items():
            out[e[:i] + (d,) + e[i + 1:]] = c
    return out


def _active_vars(a: Terms, b: Terms, n):
    act = []
    for i in range(n):
        if any(e[i] for e in a) or any(e[i] for e in b):
            act.append(i)
    return act


def _t_monic(a: Terms, key) -> Terms:
    if not a:
        return a
    _, lc = t_leading(a, key)
    if lc == 1:
        return a
    return {e: c / lc for e, c in a.items()}


def _gcd_univar(a: Terms, b: Terms, i, key):
    """Euclid for polys involving only variable i."""
    while b:
        cb = _coeffs_in_var(b, i)
        db = max(cb)
        lcb = cb[db][next(iter(cb[db]))]
        r = a
        while r:
            cr = _coeffs_in_var(r, i)
            dr = max(cr)
            if dr < db:
                break
            lcr = cr[dr][next(iter(cr[dr]))]
            shift = t_var(len(next(iter(r))), i, dr - db)
            r = t_sub(r, t_scale(t_mul(shift, b), lcr / lcb))
        a, b = b, r
    return _t_monic(a, key)


def t_gcd(a: Terms, b: Terms, ctx) -> Terms:
    """gcd over Q[ctx], normalized monic under the canonical order."""
    key = _order_key(ctx)
    n = len(ctx)
    if not a:
        return _t_monic(b, key)
    if not b:
        return _t_monic(a, key)
    if a == b:
        return _t_monic(a, key)
    # monomial fast path
    if len(a) == 1 or len(b) == 1:
        mins_a = [min(e[i] for e in a) for i in range(n)]
        mins_b = [min(e[i] for e in b) for i in range(n)]
        e = tuple(min(x, y) for x, y in zip(mins_a, mins_b))
        return {e: Fraction(1)}
    act = _active_vars(a, b, n)
    if not act:
        return t_const(n, 1)
    if len(act) == 1:
        return _gcd_univar(a, b, act[0], key)
    # multivariate: primitive PRS in the active var of smallest max-degree
    v = min(act, key=lambda i: max(t_degree_in(a, i), t_degree_in(b, i)))

    def content_pp(p):
        cs = _coeffs_in_var(p, v)
        cont = {}
        for sub in cs.values():
            cont = t_gcd(cont, sub, ctx)
            if len(cont) == 1 and sum(next(iter(cont))) == 0:
                break
        pp = {}
        for d, sub in cs.items():
            q = t_divexact(sub, cont, key)
            assert q is not None
            for e, c in q.items():
                pp[e[:v] + (d,) + e[v + 1:]] = c
        return cont, pp

    ca, pa = content_pp(a)
    cb, pb = content_pp(b)
    cont = t_gcd(ca, cb, ctx)
    f, g = pa, pb
    if t_degree_in(f, v) < t_degree_in(g, v):
        f, g = g, f
    while True:
        r = _pseudo_rem(f, g, v, n)
        if not r:
            break
        if t_degree_in(r, v) == 0:
            g = t_const(n, 1)
            break
        _, r = content_pp(r)
        f, g = g, r
    result = t_mul(cont, g)
    return _t_monic(result, key)


def _pseudo_rem(f: Terms, g: Terms, v, n):
    """Pseudo-remainder of f by g w.r.t. variable v."""
    dg = t_degree_in(g, v)
    cg = _coeffs_in_var(g, v)
    lcg = _from_coeffs({0: cg[dg]}, v)
    r = f
    while r:
        dr = t_degree_in(r, v)
        if dr < dg:
            break
        cr = _coeffs_in_var(r, v)
        lcr = _from_coeffs({0: cr[dr]}, v)
        shift = t_var(n, v, dr - dg)
        r = t_sub(t_mul(lcg, r), t_mul(t_mul(lcr, shift), g))
    return r


def t_str(a: Terms, ctx) -> str:
    if not a:
        return "0"
    key = _order_key(ctx)
    parts = []
    for e in sorted(a, key=key, reverse=True):
        c = a[e]
        factors = []
        for name, k in zip(ctx, e):
            if k == 1:
                factors.append(name)
            elif k:
                factors.append("%s^%d" % (name, k))
        mono = "*".join(factors)
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append("%s*%s" % (c, mono))
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


# ---------------------------------------------------------------------------
# rational functions


class RatFun:
    """A reduced rational function over an ordered variable context.

    Canonical form: numerator and denominator share no factor (including
    monomials), and the denominator is monic under graded-lex with q last.
    Equality is then plain dict equality.
    """

    __slots__ = ("ctx", "num", "den")

    def __init__(self, ctx, num: Terms, den: Terms, _normalized=False):
        self.ctx = ctx
        if _normalized:
            self.num = num
            self.den = den
            return
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num:
            self.num = {}
            self.den = t_const(len(ctx), 1)
            return
        n = len(ctx)
        # clear any negative (Laurent) exponents and common monomial factors
        shifts = []
        for i in range(n):
            mn = min(min(e[i] for e in num), min(e[i] for e in den))
            shifts.append(-mn)
        if any(shifts):
            num = {tuple(x + s for x, s in zip(e, shifts)): c for e, c in num.items()}
            den = {tuple(x + s for x, s in zip(e, shifts)): c for e, c in den.items()}
        key = _order_key(ctx)
        if den != t_const(n, 1):
            g = t_gcd(num, den, ctx)
            if len(g) > 1 or sum(next(iter(g))) > 0:
                num = t_divexact(num, g, key)
                den = t_divexact(den, g, key)
        _, lc = t_leading(den, key)
        if lc != 1:
            num = {e: c / lc for e, c in num.items()}
            den = {e: c / lc for e, c in den.items()}
        self.num = num
        self.den = den

    # -- constructors ------------------------------------------------------

    @staticmethod
    def const(ctx, c):
        n = len(ctx)
        return RatFun(ctx, t_const(n, c), t_const(n, 1), _normalized=Fraction(c) != 0)

    @staticmethod
    def zero(ctx):
        return RatFun(ctx, {}, t_const(len(ctx), 1), _normalized=True)

    @staticmethod
    def one(ctx):
        return RatFun.const(ctx, 1)

    @staticmethod
    def var(ctx, name, e=1):
        i = ctx.index(name)
        n = len(ctx)
        if e >= 0:
            return RatFun(ctx, t_var(n, i, e), t_const(n, 1), _normalized=True)
        return RatFun(ctx, t_const(n, 1), t_var(n, i, -e), _normalized=True)

    @staticmethod
    def qmono(ctx, qm: QMono):
        """The anchor c*(-q)^m as a rational function (q must be in ctx)."""
        i = ctx.index("q")
        n = len(ctx)
        c = qm.signed_coeff()
        if qm.m >= 0:
            return RatFun(ctx, t_scale(t_var(n, i, qm.m), c), t_const(n, 1))
        return RatFun(ctx, t_const(n, c), t_var(n, i, -qm.m))

    def _lift(self, other):
        if isinstance(other, RatFun):
            if other.ctx != self.ctx:
                raise ScalarError("context mismatch: %r vs %r" % (self.ctx, other.ctx))
            return other
        if isinstance(other, (int, Fraction)):
            return RatFun.const(self.ctx, other)
        return NotImplemented

    # -- ring operations ----------------------------------------------------

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not self.num:
            return o
        if not o.num:
            return self
        if self.den == o.den:
            return RatFun(self.ctx, t_add(self.num, o.num), self.den)
        num = t_add(t_mul(self.num, o.den), t_mul(o.num, self.den))
        return RatFun(self.ctx, num, t_mul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return RatFun(self.ctx, t_neg(self.num), self.den, _normalized=True)

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not self.num or not o.num:
            return RatFun.zero(self.ctx)
        return RatFun(self.ctx, t_mul(self.num, o.num), t_mul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if not o.num:
            raise ZeroDivisionError("division by zero rational function")
        if not self.num:
            return self
        return RatFun(self.ctx, t_mul(self.num, o.den), t_mul(self.den, o.num))

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, e):
        if e == 0:
            return RatFun.one(self.ctx)
        if e < 0:
            return 1 / (self ** (-e))
        out = self
        for _ in range(e - 1):
            out = out * self
        return out

    def inv(self):
        return 1 / self

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.ctx, tuple(sorted(self.num.items())),
                     tuple(sorted(self.den.items()))))

    # -- structure ----------------------------------------------------------

    def is_polynomial(self):
        return self.den == t_const(len(self.ctx), 1)

    def is_constant(self):
        return self.is_polynomial() and (not self.num or set(self.num) == {_zeros(len(self.ctx))})

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ScalarError("not a constant: %s" % self)
        return self.num.get(_zeros(len(self.ctx)), Fraction(0))

    def embed(self, big_ctx):
        """Reinterpret over a larger context containing all current variables."""
        pos = [big_ctx.index(v) for v in self.ctx]
        n = len(big_ctx)

        def conv(terms):
            out = {}
            for e, c in terms.items():
                ee = [0] * n
                for p, x in zip(pos, e):
                    ee[p] = x
                out[tuple(ee)] = c
            return out

        return RatFun(big_ctx, conv(self.num), conv(self.den), _normalized=True)

    def subs_monomial(self, var, coeff, exps=None):
        """Substitute var := coeff * prod(other_var^e); exps maps var name -> int.

        Covers z -> 1/z, z -> B/A, and z -> anchor monomials in q.
        """
        i = self.ctx.index(var)
        exps = exps or {}
        repl_idx = {self.ctx.index(v): e for v, e in exps.items()}
        if i in repl_idx:
            raise ScalarError("substitution target occurs in replacement")
        coeff = Fraction(coeff)

        def conv(terms):
            out = {}
            for e, c in terms.items():
                k = e[i]
                ee = list(e)
                ee[i] = 0
                for j, x in repl_idx.items():
                    ee[j] += x * k
                ee = tuple(ee)
                s = out.get(ee, 0) + c * coeff ** k
                if s:
                    out[ee] = s
                else:
                    del out[ee]
            return out

        num, den = conv(self.num), conv(self.den)
        if not den:
            raise ZeroDivisionError("substitution annihilated the denominator")
        return RatFun(self.ctx, num, den)

    def subs_qmono(self, var, qm: QMono):
        """Substitute var := c*(-q)^m."""
        return self.subs_monomial(var, qm.signed_coeff(), {"q": qm.m})

    def drop_var(self, var):
        """Remove an unused variable from the context."""
        i = self.ctx.index(var)
        if t_degree_in(self.num, i) or t_degree_in(self.den, i):
            raise ScalarError("variable %s still occurs" % var)
        ctx = self.ctx[:i] + self.ctx[i + 1:]

        def conv(terms):
            return {e[:i] + e[i + 1:]: c for e, c in terms.items()}

        return RatFun(ctx, conv(self.num), conv(self.den), _normalized=True)

    def eval_fractions(self, values: dict) -> Fraction:
        """Evaluate at rational points; values maps every variable to a Fraction."""
        vals = [Fraction(values[v]) for v in self.ctx]

        def ev(terms):
            tot = Fraction(0)
            for e, c in terms.items():
                t = c
                for x, k in zip(vals, e):
                    if k:
                        t *= x ** k
                tot += t
            return tot

        d = ev(self.den)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at evaluation point")
        return ev(self.num) / d

    def __str__(self):
        if self.is_polynomial():
            return t_str(self.num, self.ctx)
        ns = t_str(self.num, self.ctx)
        ds = t_str(self.den, self.ctx)
        if len(self.num) > 1:
            ns = "(%s)" % ns
        return "%s/(%s)" % (ns, ds)

    __repr__ = __str__


class ScalarRing:
    """Handle bundling a context with zero/one literals, for generic linear algebra."""

    def __init__(self, ctx):
        self.ctx = tuple(ctx)
        self.zero = RatFun.zero(self.ctx)
        self.one = RatFun.one(self.ctx)

    def const(self, c):
        return RatFun.const(self.ctx, c)

    def var(self, name, e=1):
        return RatFun.var(self.ctx, name, e)

    def qmono(self, qm):
        return RatFun.qmono(self.ctx, qm)

    def __eq__(self, other):
        return isinstance(other, ScalarRing) and self.ctx == other.ctx

    def __hash__(self):
        return hash(self.ctx)

    def __repr__(self):
        return "ScalarRing%r" % (self.ctx,)


class FractionRing:
    """The rationals, with the same handle protocol."""

    zero = Fraction(0)
    one = Fraction(1)

    @staticmethod
    def const(c):
        return Fraction(c)


QRING = ScalarRing(("q",))


def pole_order(f: RatFun, var, point: QMono) -> int:
    """Order of the pole of f at var = point (= c*(-q)^m).

    Returns k >= 0 for a pole of order k (so (var-point)^k * f is finite and
    nonzero there) and k < 0 for a zero of order -k.  Errors on f == 0.
    """
    if not f:
        raise ScalarError("pole_order of the zero function")
    ctx = f.ctx
    n = len(ctx)
    iv = ctx.index(var)
    iq = ctx.index("q")
    key = _order_key(ctx)
    # linear factor, cleared of negative q-powers:  q^a * var - c*(-1)^m * q^b
    a, b = (0, point.m) if point.m >= 0 else (-point.m, 0)
    ev = [0] * n
    ev[iv] = 1
    ev[iq] = a
    ec = [0] * n
    ec[iq] = b
    lin = {tuple(ev): Fraction(1), tuple(ec): -point.signed_coeff()}

    def mult(terms):
        k = 0
        while True:
            q = t_divexact(terms, lin, key)
            if q is None:
                return k, terms
            terms = q
            k += 1

    mn, _ = mult(f.num)
    md, _ = mult(f.den)
    return md - mn


# ---------------------------------------------------------------------------
# Laurent polynomials in q


class LaurentQ:
    """Finitely supported map degree -> Fraction; no stored zeros."""

    __slots__ = ("d",)

    def __init__(self, d=None):
        self.d = {k: Fraction(v) for k, v in (d or {}).items() if v}

    @staticmethod
    def one():
        return LaurentQ({0: 1})

    @staticmethod
    def mono(deg, c=1):
        return LaurentQ({deg: c})

    def __add__(self, other):
        out = dict(self.d)
        for k, v in other.d.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                del out[k]
        return LaurentQ(out)

    def __sub__(self, other):
        return self + LaurentQ({k: -v for k, v in other.d.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentQ({k: v * other for k, v in self.d.items()})
        out = {}
        for k1, v1 in self.d.items():
            for k2, v2 in other.d.items():
                k = k1 + k2
                s = out.get(k, 0) + v1 * v2
                if s:
                    out[k] = s
                else:
                    del out[k]
        return LaurentQ(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, LaurentQ) and self.d == other.d

    def __hash__(self):
        return hash(tuple(sorted(self.d.items())))

    def __bool__(self):
        return bool(self.d)

    def bar(self):
        """q -> 1/q."""
        return LaurentQ({-k: v for k, v in self.d.items()})

    def truncate(self, deg_cap):
        return LaurentQ({k: v for k, v in self.d.items() if k <= deg_cap})

    def to_ratfun(self, ctx=("q",)):
        iq = ctx.index("q")
        n = len(ctx)
        num, den = {}, t_const(n, 1)
        shift = -min(self.d, default=0)
        if shift > 0:
            e = [0] * n
            e[iq] = shift
            den = {tuple(e): Fraction(1)}
        for k, v in self.d.items():
            e = [0] * n
            e[iq] = k + max(shift, 0)
            num[tuple(e)] = v
        return RatFun(tuple(ctx), num, den)

    @staticmethod
    def from_ratfun(f: RatFun):
        """Convert when the denominator is a q-monomial; error otherwise."""
        if len(f.den) != 1:
            raise ScalarError("not a Laurent polynomial: %s" % f)
        iq = f.ctx.index("q")
        (ed, cd), = f.den.items()
        if any(x for j, x in enumerate(ed) if j != iq):
            raise ScalarError("denominator involves non-q variables: %s" % f)
        out = {}
        for e, c in f.num.items():
            if any(x for j, x in enumerate(e) if j != iq):
                raise ScalarError("numerator involves non-q variables: %s" % f)
            out[e[iq] - ed[iq]] = c / cd
        return LaurentQ(out)

    def __str__(self):
        if not self.d:
            return "0"
        parts = []
        for k in sorted(self.d, reverse=True):
            v = self.d[k]
            if k == 0:
                parts.append(str(v))
            else:
                var = "q" if k == 1 else "q^%d" % k
                if v == 1:
                    parts.append(var)
                elif v == -1:
                    parts.append("-" + var)
                else:
                    parts.append("%s*%s" % (v, var))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    __repr__ = __str__


def quantum_integer(n: int, s: int = 1) -> LaurentQ:
    """[n]_{q^s} = (q^{sn} - q^{-sn}) / (q^s - q^{-s})."""
    if n == 0:
        return LaurentQ()
    if n < 0:
        return LaurentQ() - quantum_integer(-n, s)
    return LaurentQ({s * (n - 1 - 2 * j): 1 for j in range(n)})


def quantum_factorial(n: int, s: int = 1) -> LaurentQ:
    out = LaurentQ.one()
    for k in range(1, n + 1):
        out = out * quantum_integer(k, s)
    return out


def quantum_binomial(m: int, n: int, s: int = 1) -> LaurentQ:
    """[m choose n]_{q^s}, computed exactly through the rational function field."""
    if n < 0 or n > m:
        return LaurentQ()
    num = quantum_factorial(m, s).to_ratfun()
    den = (quantum_factorial(n, s) * quantum_factorial(m - n, s)).to_ratfun()
    return LaurentQ.from_ratfun(num / den)


# ---------------------------------------------------------------------------
# truncated polynomials in nilpotent variables


def _binom_general(e: int, j: int) -> Fraction:
    """Generalized binomial C(e, j) for any integer e, j >= 0."""
    out = Fraction(1)
    for t in range(j):
        out *= Fraction(e - t, t + 1)
    return out


class TruncPoly:
    """Element of Q(q)[x_1..x_k] / (x_1^{N_1}, ..., x_k^{N_k}).

    Coefficients are RatFun in q; exponents below the per-variable orders.
    """

    __slots__ = ("orders", "terms")

    def __init__(self, orders, terms=None):
        self.orders = tuple(orders)
        out = {}
        for e, c in (terms or {}).items():
            if all(x < N for x, N in zip(e, self.orders)) and c:
                out[e] = c
        self.terms = out

    @staticmethod
    def const(orders, c: RatFun):
        return TruncPoly(orders, {(0,) * len(orders): c})

    @staticmethod
    def one(orders):
        return TruncPoly.const(orders, QRING.one)

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, QRING.zero) + c
            if s:
                out[e] = s
            else:
                del out[e]
        return TruncPoly(self.orders, out)

    def __neg__(self):
        return TruncPoly(self.orders, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RatFun):
            return TruncPoly(self.orders, {e: c * other for e, c in self.terms.items()})
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                if any(x >= N for x, N in zip(e, self.orders)):
                    continue
                s = out.get(e, QRING.zero) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return TruncPoly(self.orders, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, TruncPoly) and self.orders == other.orders
                and self.terms == other.terms)

    def __bool__(self):
        return bool(self.terms)

    def constant_term(self) -> RatFun:
        return self.terms.get((0,) * len(self.orders), QRING.zero)

    def inv(self):
        c0 = self.constant_term()
        if not c0:
            raise ScalarError("non-unit truncated polynomial (zero constant term)")
        u = TruncPoly(self.orders,
                      {e: -c / c0 for e, c in self.terms.items() if any(e)})
        out = TruncPoly.one(self.orders)
        p = TruncPoly.one(self.orders)
        bound = sum(N - 1 for N in self.orders)
        for _ in range(bound):
            p = p * u
            if not p:
                break
            out = out + p
        return TruncPoly(self.orders, {e: c / c0 for e, c in out.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            mono = "*".join("x%d^%d" % (i + 1, k) if k > 1 else "x%d" % (i + 1)
                            for i, k in enumerate(e) if k)
            c = str(self.terms[e])
            parts.append("(%s)%s" % (c, "*" + mono if mono else ""))
        return " + ".join(parts)

    __repr__ = __str__


def trunc_eval(f: RatFun, anchors, orders) -> TruncPoly:
    """Taylor-expand f at var_k = anchors[var_k] * (1 + x_k), truncated.

    anchors/orders map every non-q variable of f's context to a QMono / order.
    Inverses come from finite geometric series; a vanishing denominator at the
    anchor raises PoleError naming the factor.
    """
    ctx = f.ctx
    xvars = [v for v in ctx if v != "q"]
    if set(anchors) != set(xvars) or set(orders) != set(xvars):
        raise ScalarError("anchors/orders must cover exactly the non-q variables")
    ordv = tuple(orders[v] for v in xvars)
    iq = ctx.index("q")
    xpos = [ctx.index(v) for v in xvars]

    def expand(terms):
        out = TruncPoly(ordv)
        for e, c in terms.items():
            coeff = RatFun.const(("q",), c) * RatFun.var(("q",), "q", e[iq])
            tp = TruncPoly.const(ordv, coeff)
            for k, p in enumerate(xpos):
                ek = e[p]
                if ek == 0:
                    continue
                a = anchors[xvars[k]] ** ek
                fac_terms = {}
                for j in range(ordv[k]):
                    bc = _binom_general(ek, j)
                    if bc == 0:
                        break
                    exp = [0] * len(xvars)
                    exp[k] = j
                    fac_terms[tuple(exp)] = QRING.const(bc)
                fac = TruncPoly(ordv, fac_terms) * RatFun.qmono(("q",), a)
                tp = tp * fac
            out = out + tp
        return out

    num_t = expand(f.num)
    den_t = expand(f.den)
    if not den_t.constant_term():
        raise PoleError(t_str(f.den, ctx))
    return num_t * den_t.inv()
