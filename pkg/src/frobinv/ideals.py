"""Ideals of S = F_p[vars] and of hypersurface quotients S/(f).

An ideal of S/(f) is stored through generators of its preimage in S; the
modulus is added whenever a Groebner basis is computed.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from .groebner import (
    GroebnerBasis,
    normal_form,
    reduced_groebner,
    syzygies,
)
from .ring import Polynomial, RingError, RingSpec, block_nkey

INFINITE = float("inf")


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class Ideal:
    """Finitely generated ideal with a lazily computed reduced Groebner basis."""

    def __init__(self, ring: RingSpec, generators=()):
        gens = []
        for g in generators:
            g = ring.coerce(g)
            if g:
                gens.append(g)
        self.ring = ring
        self.generators = tuple(gens)
        self._gb = None
        self._lock = threading.Lock()

    @classmethod
    def maximal(cls, ring):
        """The homogeneous maximal ideal (all variables)."""
        return cls(ring, ring.gens())

    @classmethod
    def parse(cls, ring, texts):
        return cls(ring, [ring.parse(t) for t in texts])

    # -- Groebner data
    def gb(self) -> GroebnerBasis:
        if self._gb is None:
            with self._lock:
                if self._gb is None:
                    self._gb = reduced_groebner(self.generators, self.ring)
        return self._gb

    def contains(self, f) -> bool:
        return normal_form(self.ring.coerce(f), self.gb()).is_zero()

    def reduce(self, f):
        return normal_form(self.ring.coerce(f), self.gb())

    def issubset(self, other) -> bool:
        return all(other.contains(g) for g in self.generators)

    def __le__(self, other):
        return self.issubset(other)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.gb() == other.gb()

    def __hash__(self):
        return hash(self.gb())

    def is_unit(self):
        return self.gb().is_unit()

    def is_zero(self):
        """True when the ideal is zero in the ring (i.e. inside the modulus)."""
        if self.ring.modulus is None:
            return not self.generators
        return all(_mod_reduce(g).is_zero() for g in self.generators)

    def generators_in_ring(self):
        """Canonical generators of the image in S/(f): the reduced Groebner
        basis with members of (f) removed and the rest reduced modulo f."""
        gens = []
        for g in self.gb().generators:
            h = _mod_reduce(g)
            if h and h not in gens:
                gens.append(h)
        return gens

    def canonical_strings(self):
        return sorted(str(g) for g in self.generators_in_ring())

    # -- arithmetic
    def __add__(self, other):
        if isinstance(other, Ideal):
            other = other.generators
        return Ideal(self.ring, list(self.generators) + [self.ring.coerce(g) for g in other])

    def __mul__(self, other):
        if isinstance(other, Ideal):
            other = other.generators
        other = [self.ring.coerce(g) for g in other]
        return Ideal(self.ring, [g * h for g in self.generators for h in other])

    def power(self, n):
        if n == 0:
            return Ideal(self.ring, [self.ring.one()])
        gens = [self.ring.one()]
        for _ in range(n):
            prods = {}
            for g in gens:
                for h in self.generators:
                    gh = g * h
                    prods.setdefault(frozenset(gh.terms.items()), gh)
            gens = list(prods.values())
        return Ideal(self.ring, gens)

    def bracket_power(self, e):
        return bracket_power(self, e)

    def quotient(self, J, saturate=False):
        return ideal_quotient(self, J, saturate)

    def colength(self):
        return colength(self)

    def dimension(self):
        return dimension(self)

    def __repr__(self):
        return f"Ideal({', '.join(str(g) for g in self.generators)})"


def _mod_reduce(f):
    ring = f.ring
    if ring.modulus is None:
        return f
    return ring.coerce(normal_form(f, _modulus_gb(ring)))


_MOD_GB_CACHE = {}


def _modulus_gb(ring):
    key = (ring.base_key(), frozenset(ring.modulus.terms.items()))
    gb = _MOD_GB_CACHE.get(key)
    if gb is None:
        gb = _MOD_GB_CACHE[key] = reduced_groebner([ring.modulus], ring.polynomial_ring())
    return gb


def as_ideal(ring, gens):
    if isinstance(gens, Ideal):
        return gens
    return Ideal(ring, gens)


# -- bracket powers ------------------------------------------------------------

def bracket_power(I: Ideal, e: int) -> Ideal:
    """I^[p^e], generated by the p^e-th powers of the generators of I."""
    from .ring import frobenius_power
    if e < 0:
        raise ValueError("e must be nonnegative")
    return Ideal(I.ring, [frobenius_power(g, e) for g in I.generators])


# -- intersections, colons, saturation -------------------------------------

def _extended(ring):
    name = "_t"
    while name in ring.vars:
        name += "_"
    ext = RingSpec(ring.p, ring.vars + (name,), ring.order)
    return ext


def _embed(f, ext):
    return Polynomial(ext, {m + (0,): c for m, c in f.terms.items()})


def _restrict(f, ring):
    return Polynomial(ring, {m[:-1]: c for m, c in f.terms.items()})


def _preimage_gens(I):
    gens = list(I.generators)
    if I.ring.modulus is not None:
        gens.append(I.ring.modulus)
    return gens


def _eliminate_t(gens, ext, ring):
    n = ring.nvars
    gb = reduced_groebner(gens, ext, nkey=block_nkey([n], range(n)), order_name="elimination")
    return [_restrict(g, ring) for g in gb.generators if all(m[n] == 0 for m in g.terms)]


def _intersect_in_s(gens1, gens2, S):
    ext = _extended(S)
    t = ext.var(ext.vars[-1])
    gens = [t * _embed(S.coerce(g), ext) for g in gens1]
    gens += [(1 - t) * _embed(S.coerce(g), ext) for g in gens2]
    return _eliminate_t(gens, ext, S)


def intersect(I: Ideal, J: Ideal) -> Ideal:
    """I ∩ J (of preimages, hence of ideals of the quotient)."""
    ring = I.ring
    S = ring.polynomial_ring()
    meet = _intersect_in_s(_preimage_gens(I), _preimage_gens(J), S)
    return Ideal(ring, [ring.coerce(g) for g in meet])


def _colon_element(I, g):
    ring = I.ring
    S = ring.polynomial_ring()
    gS = S.coerce(g)
    meet = _intersect_in_s(_preimage_gens(I), [gS], S)
    return Ideal(ring, [ring.coerce(h.exact_divide(gS)) for h in meet])


def _saturate_element(I, g):
    ring = I.ring
    S = ring.polynomial_ring()
    ext = _extended(S)
    t = ext.var(ext.vars[-1])
    gens = [_embed(S.coerce(h), ext) for h in _preimage_gens(I)]
    gens.append(1 - t * _embed(S.coerce(g), ext))
    return Ideal(ring, [ring.coerce(h) for h in _eliminate_t(gens, ext, S)])


def ideal_quotient(I: Ideal, J, saturate: bool = False) -> Ideal:
    """(I : J), or (I : J^infinity) when ``saturate``."""
    ring = I.ring
    if isinstance(J, Polynomial):
        J = Ideal(ring, [J])
    elif not isinstance(J, Ideal):
        J = Ideal(ring, J)
    gens = [g for g in J.generators if not _mod_reduce(g).is_zero()]
    if not gens:
        raise PreconditionError("colon by the zero ideal")
    op = _saturate_element if saturate else _colon_element
    result = None
    for g in gens:
        part = op(I, g)
        result = part if result is None else intersect(result, part)
    return Ideal(ring, result.gb().generators)


# -- dimension and colength --------------------------------------------------

def _leading_monomials(I):
    return I.gb().leading_monomials()


def dimension(I: Ideal) -> int:
    """Krull dimension of R/I; -1 for the unit ideal."""
    lms = _leading_monomials(I)
    if any(not any(m) for m in lms):
        return -1
    n = I.ring.nvars
    supports = [frozenset(i for i, a in enumerate(m) if a) for m in lms]
    for size in range(n, -1, -1):
        for U in itertools.combinations(range(n), size):
            U = frozenset(U)
            if not any(s <= U for s in supports):
                return size
    return 0


def standard_monomials(I: Ideal):
    """Exponent tuples outside the leading-term ideal (I must be zero-dimensional)."""
    lms = _leading_monomials(I)
    n = I.ring.nvars
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if all(a == 0 for j, a in enumerate(m) if j != i) and m[i] > 0]
        if not pure:
            raise PreconditionError("ideal is not zero-dimensional")
        bounds.append(min(pure))
    out = []

    def rec(i, partial):
        mono = partial + (0,) * (n - i)
        if any(all(a <= b for a, b in zip(m, mono)) for m in lms):
            return
        if i == n:
            out.append(mono)
            return
        for a in range(bounds[i]):
            cand = partial + (a,)
            pad = cand + (0,) * (n - i - 1)
            if any(all(x <= y for x, y in zip(m, pad)) for m in lms):
                break
            rec(i + 1, cand)

    rec(0, ())
    return out


def colength(I: Ideal):
    """lambda(R/I): number of standard monomials, or INFINITE when dim R/I > 0."""
    if I.is_unit():
        return 0
    if dimension(I) != 0:
        return INFINITE
    return len(standard_monomials(I))


# -- monomial minimal primes ----------------------------------------------------

def monomial_minimal_primes(I: Ideal):
    """Minimal primes of a monomial ideal (each generated by variables)."""
    gens = list(I.generators)
    if I.ring.modulus is not None:
        gens.append(I.ring.modulus)
    supports = []
    for g in gens:
        if not g.is_monomial():
            raise PreconditionError(f"non-monomial generator {g}")
        (m,) = g.terms
        if not any(m):
            return []
        supports.append(frozenset(i for i, a in enumerate(m) if a))
    covers = set()

    def rec(chosen, remaining):
        todo = [s for s in remaining if not (s & chosen)]
        if not todo:
            covers.add(frozenset(chosen))
            return
        for v in sorted(min(todo, key=lambda s: (len(s), sorted(s)))):
            rec(chosen | {v}, todo)

    rec(frozenset(), supports)
    minimal = [c for c in covers if not any(o < c for o in covers)]
    minimal.sort(key=lambda c: (len(c), sorted(c)))
    ring = I.ring
    return [Ideal(ring, [ring.var(ring.vars[i]) for i in sorted(c)]) for c in minimal]


# -- generic rank over a domain ------------------------------------------------

class ZeroDivisorError(PreconditionError):
    """A pivot turned out to be a zero-divisor: the ring is not a domain."""


def generic_rank(rows, prime: Ideal, check_pivot=None):
    """Rank over Frac(S/prime) of a matrix given as a list of rows of
    polynomials.  Fraction-free elimination; entries are kept reduced modulo
    ``prime`` and zero-tested by normal form.  ``check_pivot(a)`` may raise if
    a pivot is a zero-divisor.
    """
    gb = prime.gb()
    work = [[normal_form(a, gb) for a in row] for row in rows]
    work = [r for r in work if any(r)]
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    for col in range(ncols):
        piv = next((k for k in range(rank, len(work)) if work[k][col]), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        prow = work[rank]
        a = prow[col]
        if check_pivot is not None:
            check_pivot(a)
        for k in range(rank + 1, len(work)):
            b = work[k][col]
            if b:
                work[k] = [normal_form(a * x - b * y, gb) for x, y in zip(work[k], prow)]
        rank += 1
        if rank == len(work):
            break
    return rank


# -- local lengths ---------------------------------------------------------------

@dataclass
class LocalLengthCertificate:
    prime: Ideal
    primary_component: Ideal
    filtration_ranks: list = field(default_factory=list)
    separator: Polynomial | None = None

    @property
    def total(self):
        return sum(self.filtration_ranks)


def _layer_rank(P, Pi, Q):
    """Generic rank over S/P of (P^i + Q)/(P^(i+1) + Q)."""
    ring = P.ring
    S = ring.polynomial_ring()
    nxt = Q + (Pi * P)
    gens = [g for g in Pi.generators if not nxt.contains(g)]
    if not gens:
        return 0
    cols = [S.coerce(g) for g in gens] + [S.coerce(h) for h in nxt.gb().generators]
    r = len(gens)
    rels = syzygies(cols, S)
    rows = [[ring.coerce(x) for x in s.entries()[:r]] for s in rels]
    if not rows:
        return r
    return r - generic_rank(rows, P)


def local_length(J: Ideal, P: Ideal, other_primes=(), max_layers=64) -> LocalLengthCertificate:
    """lambda(R_P / J R_P) for a prime P minimal over J.

    The P-primary component Q = J : s^infinity uses a separating element s
    lying in every other minimal prime but not in P; the length is then the
    sum of generic ranks of the P-adic layers of R/Q, which stop at the first
    zero layer (Nakayama over R_P).
    """
    ring = J.ring
    if not J.issubset(P):
        raise PreconditionError("J is not contained in P")
    s = ring.one()
    if other_primes:
        s = None
        pools = [list(Q.generators) for Q in other_primes]
        for combo in itertools.product(*pools):
            cand = ring.one()
            for g in combo:
                cand = cand * g
            if not P.contains(cand):
                s = cand
                break
        if s is None:
            raise PreconditionError("no separating element found outside P")
        Q = ideal_quotient(J, Ideal(ring, [s]), saturate=True)
    else:
        Q = J
    cert = LocalLengthCertificate(prime=P, primary_component=Q, separator=s)
    Pi = Ideal(ring, [ring.one()])
    for _ in range(max_layers):
        r = _layer_rank(P, Pi, Q)
        cert.filtration_ranks.append(r)
        if r == 0:
            return cert
        Pi = Ideal(ring, (Pi * P).gb().generators)
    raise PreconditionError("filtration did not terminate: P is not minimal over J")


# -- regular sequences and parameter multiplicities -------------------------

@dataclass
class RegularSequenceResult:
    regular: bool
    index: int | None = None
    witness: Polynomial | None = None

    def __bool__(self):
        return self.regular


def is_regular_sequence(xs, J: Ideal) -> RegularSequenceResult:
    """Whether xs is a regular sequence on R/J (tested by successive colons)."""
    ring = J.ring
    K = J
    for i, x in enumerate(xs):
        x = ring.coerce(x)
        if (K + [x]).is_unit():
            return RegularSequenceResult(False, i, ring.one())
        C = ideal_quotient(K, Ideal(ring, [x]))
        bad = [g for g in C.gb().generators if not K.contains(g)]
        if bad:
            witness = min(bad, key=lambda g: (len(str(g)), str(g)))
            return RegularSequenceResult(False, i, witness)
        K = K + [x]
    return RegularSequenceResult(True)


def _radical_member(P, f):
    ring = P.ring
    S = ring.polynomial_ring()
    ext = _extended(S)
    t = ext.var(ext.vars[-1])
    gens = [_embed(S.coerce(g), ext) for g in _preimage_gens(P)]
    gens.append(1 - t * _embed(S.coerce(f), ext))
    return reduced_groebner(gens, ext).is_unit()


def check_prime_candidate(P: Ideal):
    """Cheap necessary conditions for P to be prime; raises otherwise.

    Monomial ideals are decided exactly.  Otherwise P must be proper and no
    variable outside P may lie in its radical.
    """
    if P.is_unit():
        raise PreconditionError("unit ideal is not prime")
    gens = P.gb().generators
    if all(g.is_monomial() for g in gens):
        if any(sum(next(iter(g.terms))) != 1 for g in gens):
            raise PreconditionError("monomial ideal is not generated by variables, so not prime")
        return
    for v in P.ring.gens():
        if not P.contains(v) and _radical_member(P, v):
            raise PreconditionError(f"{v} lies in the radical but not in the ideal: not prime")


def cm_parameter_multiplicity(xs, P: Ideal) -> int:
    """e(xs; R/P) = lambda(R/(P + xs)) for R/P Cohen-Macaulay."""
    check_prime_candidate(P)
    xs = [P.ring.coerce(x) for x in xs]
    if dimension(P) != len(xs):
        raise PreconditionError("dim R/P differs from the number of parameters")
    if len(xs) > 1 and not is_regular_sequence(xs, P):
        raise PreconditionError("parameters are not a regular sequence on R/P")
    lam = colength(P + xs)
    if lam == INFINITE:
        raise PreconditionError("not a system of parameters on R/P")
    return lam
