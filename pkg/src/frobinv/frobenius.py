"""Frobenius pushforwards and splitting ideals.

Over S = F_p[x_1..x_n] the module F^e_*S is free on the monomials x^b with
every b_i < q = p^e.  For a hypersurface R = S/(f) the pushforward F^e_*R is
presented over R by the q^n columns F^e_*(f x^a) written in that basis.

Splitting ideals come from the Fedder colon
    I_e(a) = (A^[q] :_S f^(q-1)) / (f),   A = preimage of a,
which collapses to the bracket power a^[q] when there is no modulus.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .groebner import ModuleElement, normal_form, reduced_groebner
from .ideals import Ideal, PreconditionError, bracket_power, colength, ideal_quotient, INFINITE
from .ring import Polynomial, RingSpec, frobenius_power


@dataclass(frozen=True)
class FrobeniusDecomposition:
    """g = sum_b parts[b]^(p^e) * x^b with every entry of b below p^e."""

    e: int
    parts: dict

    def reassemble(self, ring):
        total = ring.zero()
        for b, u in self.parts.items():
            total = total + frobenius_power(u, self.e).mul_monomial(b)
        return total


def frobenius_decompose(g: Polynomial, e: int) -> FrobeniusDecomposition:
    if e < 1:
        raise ValueError("e must be at least 1")
    q = g.ring.p ** e
    buckets = {}
    for m, c in g.terms.items():
        b = tuple(a % q for a in m)
        u = tuple(a // q for a in m)
        buckets.setdefault(b, {})[u] = c
    parts = {b: Polynomial(g.ring, terms) for b, terms in sorted(buckets.items())}
    return FrobeniusDecomposition(e, parts)


def frobenius_basis(ring: RingSpec, e: int):
    """Exponents b with 0 <= b_i < p^e, in lexicographic order of the tuples."""
    q = ring.p ** e
    return list(itertools.product(range(q), repeat=ring.nvars))


@dataclass
class PushforwardPresentation:
    """F^e_*R as the cokernel of ``relation_columns`` (each of rank
    ``generator_count``) over the ring."""

    ring: RingSpec
    e: int
    basis: list
    relation_columns: list

    @property
    def generator_count(self):
        return len(self.basis)

    def basis_strings(self):
        return [str(self.ring.monomial(b)) for b in self.basis]


def pushforward_presentation(ring: RingSpec, e: int) -> PushforwardPresentation:
    if e < 1:
        raise ValueError("e must be at least 1")
    basis = frobenius_basis(ring, e)
    index = {b: i for i, b in enumerate(basis)}
    columns = []
    f = ring.modulus
    if f is not None:
        for a in basis:
            dec = frobenius_decompose(f.mul_monomial(a), e)
            terms = {}
            for b, u in dec.parts.items():
                for m, c in u.terms.items():
                    terms[(index[b], m)] = c
            columns.append(ModuleElement(ring, len(basis), terms))
    return PushforwardPresentation(ring, e, basis, columns)


@dataclass
class SplittingIdeal:
    base: Ideal
    e: int
    result: Ideal


def _check_local(a: Ideal):
    for g in a.generators:
        if g.constant_term() != 0:
            raise PreconditionError(
                f"generator {g} has a nonzero constant term; ideals must lie in the "
                "maximal ideal at the origin")


def splitting_ideal(a: Ideal, e: int) -> SplittingIdeal:
    """I_e(a) = {r : phi(F^e_* r) in a for every phi in Hom(F^e_*R, R)}."""
    if e < 0:
        raise ValueError("e must be nonnegative")
    ring = a.ring
    if a.is_unit():
        return SplittingIdeal(a, e, Ideal(ring, [ring.one()]))
    _check_local(a)
    if e == 0 or ring.modulus is None:
        return SplittingIdeal(a, e, bracket_power(a, e))
    S = ring.polynomial_ring()
    f = S.coerce(ring.modulus)
    q = ring.p ** e
    lifted = [S.coerce(g) for g in a.generators] + [f]
    A_q = Ideal(S, [frobenius_power(g, e) for g in lifted])
    colon = ideal_quotient(A_q, Ideal(S, [f ** (q - 1)]))
    return SplittingIdeal(a, e, Ideal(ring, [ring.coerce(g) for g in colon.gb().generators]))


def splitting_number(ring: RingSpec, e: int) -> int:
    """a_e(R) = lambda(R / I_e(m)); the residue field F_p is perfect."""
    if e < 1:
        raise ValueError("e must be at least 1")
    lam = colength(splitting_ideal(Ideal.maximal(ring), e).result)
    if lam == INFINITE:
        raise PreconditionError("R/I_e(m) has infinite length: degenerate modulus")
    return lam


def fedder_is_fpure(ring: RingSpec, e: int = 1) -> bool:
    """Fedder's test: S/(f) is F-pure at the origin iff f^(q-1) is not in m^[q]."""
    if ring.modulus is None:
        return True
    S = ring.polynomial_ring()
    f = S.coerce(ring.modulus)
    q = ring.p ** e
    mq = reduced_groebner([frobenius_power(v, e) for v in S.gens()], S)
    return not normal_form(f ** (q - 1), mq).is_zero()
