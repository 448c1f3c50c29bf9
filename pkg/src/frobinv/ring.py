"""Polynomials over a prime field F_p.

A polynomial is a map from exponent tuples to nonzero residues mod p.  Terms
are kept in a plain dict; canonical order is only imposed when a polynomial is
printed or compared term by term, using the monomial order of its ring.

Every order is expressed through a *negated key*: ``nkey(a) < nkey(b)`` iff
the monomial ``a`` is larger than ``b``.  That lets ``min`` and min-heaps pick
leading terms directly.
"""

from __future__ import annotations

import re
from functools import lru_cache

MAX_EXPONENT = 2**31 - 1


class RingError(ValueError):
    """Raised for malformed rings, mixed-ring operands and parse failures."""


class PolynomialSyntaxError(RingError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# -- monomial orders ---------------------------------------------------------

def _lex_nkey(e):
    return tuple(-a for a in e)


def _grevlex_nkey(e):
    return (-sum(e),) + tuple(reversed(e))


ORDERS = {"lex": _lex_nkey, "grevlex": _grevlex_nkey}


def block_nkey(first, second):
    """Elimination order: grevlex on the ``first`` indices, ties broken by
    grevlex on ``second``."""
    first = tuple(first)
    second = tuple(second)

    def nkey(e):
        return (_grevlex_nkey([e[i] for i in first]),
                _grevlex_nkey([e[i] for i in second]))

    return nkey


# -- rings -------------------------------------------------------------------

class RingSpec:
    """F_p[vars], optionally modulo a single polynomial ``modulus``.

    Ideals and elements of the quotient are always represented by their
    preimages in the polynomial ring.
    """

    __slots__ = ("p", "vars", "order", "modulus", "nkey", "_dim")

    def __init__(self, p, vars, order="grevlex", modulus=None):
        p = int(p)
        if not is_prime(p):
            raise RingError(f"characteristic {p} is not prime")
        vars = tuple(vars)
        if not vars:
            raise RingError("at least one variable is required")
        if len(set(vars)) != len(vars):
            raise RingError("duplicate variable names")
        for v in vars:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", v):
                raise RingError(f"invalid variable name {v!r}")
        if order not in ORDERS:
            raise RingError(f"unknown monomial order {order!r}")
        self.p = p
        self.vars = vars
        self.order = order
        self.nkey = lru_cache(maxsize=None)(ORDERS[order])
        self.modulus = None
        self._dim = None
        if modulus is not None:
            if isinstance(modulus, str):
                modulus = parse_polynomial(modulus, self)
            modulus = self.coerce(modulus)
            if modulus.is_zero():
                raise RingError("modulus must be nonzero")
            if modulus.constant_term() != 0:
                raise RingError("modulus must have zero constant term")
            self.modulus = modulus

    @property
    def nvars(self):
        return len(self.vars)

    def base_key(self):
        return (self.p, self.vars, self.order)

    def polynomial_ring(self):
        """The ambient ring S with the modulus dropped."""
        if self.modulus is None:
            return self
        return RingSpec(self.p, self.vars, self.order)

    def with_modulus(self, modulus):
        return RingSpec(self.p, self.vars, self.order, modulus)

    def with_order(self, order):
        ring = RingSpec(self.p, self.vars, order)
        if self.modulus is not None:
            ring.modulus = Polynomial(ring, self.modulus.terms)
        return ring

    @property
    def dim(self):
        """Krull dimension of S/(modulus)."""
        if self._dim is None:
            if self.modulus is None:
                self._dim = self.nvars
            else:
                from .ideals import Ideal
                self._dim = Ideal(self, []).dimension()
        return self._dim

    def rank(self, e):
        """rank(F^e_* R) = p^(e dim R); the residue field F_p is perfect."""
        return self.p ** (e * self.dim)

    # constructors
    def zero(self):
        return Polynomial(self, {})

    def one(self):
        return self.constant(1)

    def constant(self, c):
        c %= self.p
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def var(self, name):
        try:
            i = self.vars.index(name)
        except ValueError:
            raise RingError(f"unknown variable {name!r}") from None
        exps = [0] * self.nvars
        exps[i] = 1
        return Polynomial(self, {tuple(exps): 1})

    def gens(self):
        return [self.var(v) for v in self.vars]

    def monomial(self, exps, coeff=1):
        exps = tuple(exps)
        if len(exps) != self.nvars or any(a < 0 for a in exps):
            raise RingError(f"bad exponent vector {exps}")
        coeff %= self.p
        return Polynomial(self, {exps: coeff} if coeff else {})

    def coerce(self, f):
        if isinstance(f, Polynomial):
            if f.ring is self:
                return f
            if f.ring.base_key() != self.base_key():
                raise RingError("polynomial belongs to a different ring")
            return Polynomial(self, f.terms)
        if isinstance(f, int):
            return self.constant(f)
        if isinstance(f, str):
            return parse_polynomial(f, self)
        raise TypeError(f"cannot coerce {type(f).__name__} to a polynomial")

    def parse(self, text):
        return parse_polynomial(text, self)

    def __eq__(self, other):
        if not isinstance(other, RingSpec):
            return NotImplemented
        return self.base_key() == other.base_key() and self.modulus == other.modulus

    def __hash__(self):
        return hash(self.base_key())

    def __repr__(self):
        s = f"GF({self.p})[{','.join(self.vars)}]"
        if self.modulus is not None:
            s += f"/({self.modulus})"
        return s


# -- polynomials -------------------------------------------------------------

def _add_exps(a, b):
    return tuple(x + y for x, y in zip(a, b))


class Polynomial:
    """An element of F_p[vars].  Treat instances as immutable."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    @classmethod
    def from_terms(cls, ring, terms):
        p = ring.p
        clean = {}
        for m, c in terms.items():
            c %= p
            if c:
                clean[tuple(m)] = c
        return cls(ring, clean)

    # -- inspection
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def sorted_terms(self):
        """Terms in descending monomial order."""
        nkey = self.ring.nkey
        return sorted(self.terms.items(), key=lambda t: nkey(t[0]))

    def leading_monomial(self):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return min(self.terms, key=self.ring.nkey)

    def leading_coefficient(self):
        return self.terms[self.leading_monomial()]

    def constant_term(self):
        return self.terms.get((0,) * self.ring.nvars, 0)

    def degree(self):
        return max((sum(m) for m in self.terms), default=-1)

    def is_monomial(self):
        return len(self.terms) == 1

    def is_homogeneous(self):
        return len({sum(m) for m in self.terms}) <= 1

    def monic(self):
        if not self.terms:
            return self
        inv = pow(self.leading_coefficient(), -1, self.ring.p)
        return self.scale(inv)

    # -- arithmetic
    def _check(self, other):
        if isinstance(other, int):
            return self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return None
        if other.ring is not self.ring and other.ring.base_key() != self.ring.base_key():
            raise RingError("operands belong to different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        p = self.ring.p
        out = dict(self.terms)
        for m, c in other.terms.items():
            c = (out.get(m, 0) + c) % p
            if c:
                out[m] = c
            else:
                out.pop(m, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial(self.ring, {m: p - c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        p = self.ring.p
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _add_exps(m1, m2)
                c = (out.get(m, 0) + c1 * c2) % p
                if c:
                    out[m] = c
                else:
                    out.pop(m, None)
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c):
        p = self.ring.p
        c %= p
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {m: v * c % p for m, v in self.terms.items()})

    def mul_monomial(self, exps, c=1):
        p = self.ring.p
        c %= p
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {_add_exps(m, exps): v * c % p for m, v in self.terms.items()})

    def exact_divide(self, g):
        """Return q with self = q*g; raise if g does not divide self."""
        g = self._check(g)
        if g.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        p = self.ring.p
        lm = g.leading_monomial()
        inv = pow(g.terms[lm], -1, p)
        rem = self
        quot = {}
        while rem.terms:
            m = rem.leading_monomial()
            shift = tuple(a - b for a, b in zip(m, lm))
            if any(s < 0 for s in shift):
                raise ArithmeticError("polynomial is not divisible")
            c = rem.terms[m] * inv % p
            quot[shift] = c
            rem = rem - g.mul_monomial(shift, c)
        return Polynomial(self.ring, quot)

    def evaluate_vars(self, values):
        """Substitute ``{var_index: Polynomial}``; other variables are kept."""
        ring = self.ring
        out = ring.zero()
        for m, c in self.terms.items():
            term = ring.monomial(tuple(0 if i in values else a for i, a in enumerate(m)), c)
            for i, val in values.items():
                if m[i]:
                    term = term * val ** m[i]
            out = out + term
        return out

    # -- comparison / printing
    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring.base_key() == other.ring.base_key() and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.ring.vars
        parts = []
        for m, c in self.sorted_terms():
            factors = []
            for name, a in zip(names, m):
                if a == 1:
                    factors.append(name)
                elif a > 1:
                    factors.append(f"{name}^{a}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"Polynomial({self})"


def frobenius_power(f: Polynomial, e: int) -> Polynomial:
    """f^(p^e), computed term-wise: F_p is fixed by Frobenius."""
    if e < 0:
        raise ValueError("e must be nonnegative")
    q = f.ring.p ** e
    out = {}
    for m, c in f.terms.items():
        m2 = tuple(a * q for a in m)
        if any(a > MAX_EXPONENT for a in m2):
            raise OverflowError("exponent overflow in Frobenius power")
        out[m2] = c
    return Polynomial(f.ring, out)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()]))")


def _tokenize(text):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            stripped = len(text) - len(text[pos:].lstrip())
            raise PolynomialSyntaxError(f"unexpected character {text[stripped]!r}", stripped)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text, ring):
        self.ring = ring
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise PolynomialSyntaxError(f"expected {op!r}", pos)

    def parse(self):
        if self.peek()[0] == "end":
            raise PolynomialSyntaxError("empty expression", 0)
        f = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolynomialSyntaxError(f"unexpected token {val!r}", pos)
        return f

    def expr(self):
        f = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                g = self.term()
                f = f + g if val == "+" else f - g
            else:
                return f

    def term(self):
        f = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                f = f * self.unary()
            else:
                return f

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            f = self.unary()
            return -f if val == "-" else f
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, n, pos = self.take()
            if kind != "int":
                raise PolynomialSyntaxError("exponent must be a nonnegative integer", pos)
            if n > MAX_EXPONENT or base.degree() * n > MAX_EXPONENT:
                raise OverflowError(f"exponent overflow at position {pos}")
            return base ** n
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "int":
            return self.ring.constant(val)
        if kind == "name":
            if val not in self.ring.vars:
                raise PolynomialSyntaxError(f"unknown variable {val!r}", pos)
            return self.ring.var(val)
        if kind == "op" and val == "(":
            f = self.expr()
            self.expect_op(")")
            return f
        if kind == "end":
            raise PolynomialSyntaxError("unexpected end of input", pos)
        raise PolynomialSyntaxError(f"unexpected token {val!r}", pos)


def parse_polynomial(text: str, ring: RingSpec) -> Polynomial:
    """Parse integer-coefficient text such as ``"x^2*y - 3*z"`` into ``ring``."""
    return _Parser(text, ring).parse()
