"""Randomized instances and checks for the basic properties of splitting ideals."""

from __future__ import annotations

import random

from frobinv.frobenius import fedder_is_fpure, splitting_ideal
from frobinv.ideals import Ideal, bracket_power, dimension, ideal_quotient, is_regular_sequence
from frobinv.ring import RingSpec

import oracles

PLANE = RingSpec(2, ["x", "y"])
QUADRIC = RingSpec(2, "xyzw", modulus="x*y+z*w")

PRIMES = {
    PLANE: [["x"], ["y"], ["x + y"], ["x", "y"], ["y + x^2"], ["x^2 + x*y + y^2"], ["x^3 + y^2"]],
    QUADRIC: [["x", "z"], ["x", "w"], ["y", "z"], ["y", "w"], ["x", "y", "z"], ["x", "z", "w"],
              ["x", "y", "z", "w"]],
}


def random_ideal(ring, rng, gens=(1, 2), degrees=(1, 2)):
    out = []
    for _ in range(rng.randint(*gens)):
        g = oracles.random_polynomial(ring, rng, homogeneous=rng.choice(degrees), terms=rng.randint(1, 3))
        g = ring.coerce(g)
        if g:
            out.append(g)
    return Ideal(ring, out or [ring.gens()[0]])


def splitting(a, e):
    return splitting_ideal(a, e).result


def check_basic_properties(ring, e, rng):
    """Items (2), (3), (7), (10), (11) on one random instance; returns failed names."""
    a = random_ideal(ring, rng)
    b = a + random_ideal(ring, rng, gens=(1, 1))
    J = random_ideal(ring, rng, gens=(1, 1), degrees=(1,))
    Ia = splitting(a, e)
    failed = []
    if not bracket_power(a, e) <= Ia:
        failed.append("bracket_contained")
    if not bracket_power(Ia, 1) <= splitting(a, e + 1):
        failed.append("frobenius_growth")
    colon = ideal_quotient(a, J)
    if not splitting(colon, e) == ideal_quotient(Ia, bracket_power(J, e)):
        failed.append("colon_compatible")
    if ring.modulus is None and not Ia == bracket_power(a, e):
        failed.append("bracket_equality")
    if not Ia <= splitting(b, e):
        failed.append("monotone")
    return failed, (a, b, J)


def check_prime_properties(ring, gens, e, rng):
    """Item (8) as a primary test and item (9) as regular-element transfer."""
    P = Ideal.parse(ring, gens)
    IP = splitting(P, e)
    failed = []
    if not (bracket_power(P, e) <= IP <= P):
        failed.append("between_bracket_and_prime")
    if dimension(P) == 0:
        # every element outside the maximal ideal is a unit
        return failed, (P, None)
    while True:
        r = ring.coerce(oracles.random_polynomial(ring, rng, homogeneous=1, terms=2))
        if r and not P.contains(r):
            break
    if not ideal_quotient(IP, Ideal(ring, [r ** (ring.p ** e)])) == IP:
        failed.append("primary")
    # r is regular on the domain R/P, hence must stay regular on R/I_e(P)
    if not is_regular_sequence([r], IP):
        failed.append("regular_transfer")
    return failed, (P, r)


def check_strictness(ring, e, rng):
    """For F-pure rings, J strictly inside I forces I_e(J) strictly inside I_e(I)."""
    assert fedder_is_fpure(ring, e)
    I = random_ideal(ring, rng)
    J = I * Ideal.maximal(ring)
    if J == I:
        return [], None
    big, small = splitting(I, e), splitting(J, e)
    witnesses = [g for g in big.generators_in_ring() if not small.contains(g)]
    ok = small <= big and bool(witnesses)
    return ([] if ok else ["strict"]), witnesses
