"""Buchberger's algorithm for ideals and submodules of free modules over F_p[vars].

The engine works on *vectors*: dicts mapping ``(component, exponents)`` to a
nonzero residue.  An ideal is the rank-one case (component 0 everywhere).
Module terms are compared position-over-term with component 0 the largest,
so the first components act as an elimination block.

Pairs are chosen by the normal strategy (smallest lcm degree, ties broken by
the monomial order) and pruned with the Gebauer--Moeller update, which
applies Buchberger's product criterion (ideals only) and chain criterion.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .ring import Polynomial, RingError, RingSpec, block_nkey


def _vkey_factory(ekey):
    cache = {}

    def vkey(t):
        k = cache.get(t)
        if k is None:
            k = cache[t] = (t[0], ekey(t[1]))
        return k

    return vkey


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(x if x >= y else y for x, y in zip(a, b))


def _coprime(a, b):
    return all(x == 0 or y == 0 for x, y in zip(a, b))


def _lead(vec, vkey):
    return min(vec, key=vkey)


class _Basis:
    """Monic reducers indexed by component for fast divisor lookup."""

    def __init__(self):
        self.by_comp = {}

    def add(self, lm, terms):
        self.by_comp.setdefault(lm[0], []).append((lm[1], terms))

    def find(self, t):
        for exps, terms in self.by_comp.get(t[0], ()):
            if _divides(exps, t[1]):
                return exps, terms
        return None


def _reduce(vec, basis, p, vkey):
    """Full normal form of ``vec`` against the monic reducers in ``basis``."""
    f = dict(vec)
    heap = [(vkey(t), t) for t in f]
    heapq.heapify(heap)
    rem = {}
    while heap:
        _, t = heapq.heappop(heap)
        c = f.pop(t, None)
        if c is None:
            continue
        hit = basis.find(t)
        if hit is None:
            rem[t] = c
            continue
        gexps, gterms = hit
        comp, e = t
        shift = tuple(a - b for a, b in zip(e, gexps))
        for (gc, ge), gv in gterms.items():
            if ge == gexps and gc == comp:
                continue
            nt = (gc, tuple(a + b for a, b in zip(ge, shift)))
            old = f.get(nt)
            nc = ((old or 0) - c * gv) % p
            if nc:
                if old is None:
                    heapq.heappush(heap, (vkey(nt), nt))
                f[nt] = nc
            elif old is not None:
                del f[nt]
    return rem


def _monic(vec, p, vkey):
    lm = _lead(vec, vkey)
    inv = pow(vec[lm], -1, p)
    if inv == 1:
        return lm, vec
    return lm, {t: c * inv % p for t, c in vec.items()}


def _spoly(lm1, f1, lm2, f2, p):
    comp = lm1[0]
    l = _lcm(lm1[1], lm2[1])
    s1 = tuple(a - b for a, b in zip(l, lm1[1]))
    s2 = tuple(a - b for a, b in zip(l, lm2[1]))
    out = {}
    for (c, e), v in f1.items():
        out[(c, tuple(a + b for a, b in zip(e, s1)))] = v
    for (c, e), v in f2.items():
        t = (c, tuple(a + b for a, b in zip(e, s2)))
        nv = (out.get(t, 0) - v) % p
        if nv:
            out[t] = nv
        else:
            out.pop(t, None)
    return out


def buchberger(vectors, p, ekey, ideal_mode=True, criteria=True):
    """Reduced Groebner basis of the vectors, as a list of monic dicts sorted
    by descending leading term.

    ``ideal_mode`` enables the product criterion, which is only valid when all
    vectors live in a single component.  ``criteria=False`` switches off both
    pair criteria (used to cross-check the pruning).
    """
    vkey = _vkey_factory(ekey)
    lms = []
    polys = []
    sugar = []
    G = []
    B = []

    def current_basis():
        basis = _Basis()
        for i in G:
            basis.add(lms[i], polys[i])
        return basis

    def pair_lcm(i, j):
        return _lcm(lms[i][1], lms[j][1])

    def pair_sugar(i, j):
        l = sum(pair_lcm(i, j))
        return max(sugar[i] + l - sum(lms[i][1]), sugar[j] + l - sum(lms[j][1]))

    def update(h):
        nonlocal G, B
        lh = lms[h]
        same = [g for g in G if lms[g][0] == lh[0]]
        if not criteria:
            B.extend((g, h) for g in same)
            G.append(h)
            return
        C = list(same)
        D = []
        while C:
            g1 = C.pop(0)
            l1 = pair_lcm(h, g1)
            if ideal_mode and _coprime(lh[1], lms[g1][1]):
                D.append(g1)
                continue
            if any(_divides(pair_lcm(h, g2), l1) for g2 in C):
                continue
            if any(_divides(pair_lcm(h, g2), l1) for g2 in D):
                continue
            D.append(g1)
        E = [g for g in D if not (ideal_mode and _coprime(lh[1], lms[g][1]))]
        kept = []
        for g1, g2 in B:
            if lms[g1][0] == lh[0]:
                l12 = pair_lcm(g1, g2)
                if (_divides(lh[1], l12) and pair_lcm(g1, h) != l12
                        and pair_lcm(h, g2) != l12):
                    continue
            kept.append((g1, g2))
        B = kept + [(g, h) for g in E]
        G = [g for g in G if not (lms[g][0] == lh[0] and _divides(lh[1], lms[g][1]))] + [h]

    def add(vec, deg):
        lm, vec = _monic(vec, p, vkey)
        lms.append(lm)
        polys.append(vec)
        sugar.append(max(deg, max(sum(e) for _, e in vec)))
        update(len(polys) - 1)

    for v in vectors:
        if not v:
            continue
        r = _reduce(v, current_basis(), p, vkey)
        if r:
            add(r, max(sum(e) for _, e in v))

    # sugar strategy: plain lcm degree misbehaves badly for lex orders
    while B:
        best = min(range(len(B)), key=lambda k: (
            pair_sugar(*B[k]), sum(pair_lcm(*B[k])), vkey((lms[B[k][0]][0], pair_lcm(*B[k]))), B[k]))
        i, j = B.pop(best)
        s = _spoly(lms[i], polys[i], lms[j], polys[j], p)
        if not s:
            continue
        r = _reduce(s, current_basis(), p, vkey)
        if r:
            add(r, pair_sugar(i, j))

    # minimal basis, then interreduce
    final = []
    for i in G:
        if any(j != i and lms[j][0] == lms[i][0] and _divides(lms[j][1], lms[i][1])
               and (lms[j] != lms[i] or j < i) for j in G):
            continue
        final.append(i)
    out = []
    for i in final:
        basis = _Basis()
        for j in final:
            if j != i:
                basis.add(lms[j], polys[j])
        r = _reduce(polys[i], basis, p, vkey)
        out.append(_monic(r, p, vkey))
    out.sort(key=lambda t: vkey(t[0]))
    return [vec for _, vec in out]


# -- ideals ------------------------------------------------------------------

def _poly_to_vec(f):
    return {(0, m): c for m, c in f.terms.items()}


def _vec_to_poly(ring, vec):
    return Polynomial(ring, {m: c for (_, m), c in vec.items()})


@dataclass(frozen=True, eq=False)
class GroebnerBasis:
    """Reduced Groebner basis.  ``generators`` are monic and sorted by
    descending leading monomial; ``order`` names the monomial order used."""

    generators: tuple
    ring: RingSpec
    order: str = "ring"

    @property
    def nkey(self):
        nkey = getattr(self, "_nkey", None)
        return self.ring.nkey if nkey is None else nkey

    def leading_monomials(self):
        nkey = self.nkey
        return [min(g.terms, key=nkey) for g in self.generators]

    def is_unit(self):
        return any(not any(m) for m in self.leading_monomials())

    def __eq__(self, other):
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return (self.ring.base_key() == other.ring.base_key()
                and self.order == other.order
                and [g.terms for g in self.generators] == [g.terms for g in other.generators])

    def __hash__(self):
        return hash(tuple(self.generators))

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)


def _make_gb(gens, ring, order, nkey):
    gb = GroebnerBasis(tuple(gens), ring, order)
    object.__setattr__(gb, "_nkey", nkey)
    return gb


def reduced_groebner(gens, ring=None, nkey=None, order_name=None, criteria=True):
    """Reduced Groebner basis of the ideal generated by ``gens``.

    Zero generators are dropped; the ring modulus, if any, is appended.  A
    custom order can be given as a negated-key function ``nkey``.
    """
    gens = list(gens)
    if ring is None:
        if not gens:
            raise RingError("cannot infer the ring of an empty generator list")
        ring = gens[0].ring
    gens = [ring.coerce(g) for g in gens]
    if ring.modulus is not None:
        gens.append(ring.modulus)
    ekey = nkey or ring.nkey
    vecs = [_poly_to_vec(g) for g in gens if g]
    basis = buchberger(vecs, ring.p, ekey, ideal_mode=True, criteria=criteria)
    polys = [_vec_to_poly(ring, v) for v in basis]
    return _make_gb(polys, ring, order_name or ("ring" if nkey is None else "custom"), nkey)


def _basis_of(gb):
    basis = _Basis()
    nkey = gb.nkey
    for g in gb.generators:
        lm = min(g.terms, key=nkey)
        basis.add((0, lm), _poly_to_vec(g))
    return basis


def normal_form(f, gb):
    """Remainder of ``f`` modulo the Groebner basis; zero iff f is in the ideal."""
    ring = gb.ring
    f = ring.coerce(f)
    if not f:
        return f
    vkey = _vkey_factory(gb.nkey)
    return _vec_to_poly(ring, _reduce(_poly_to_vec(f), _basis_of(gb), ring.p, vkey))


def eliminate(gens, drop_vars, ring=None):
    """Generators of (gens) intersected with the subring on the kept variables."""
    gens = list(gens)
    ring = ring or gens[0].ring
    drop_vars = set(drop_vars)
    unknown = drop_vars - set(ring.vars)
    if unknown:
        raise RingError(f"unknown variables {sorted(unknown)}")
    drop = [i for i, v in enumerate(ring.vars) if v in drop_vars]
    keep = [i for i, v in enumerate(ring.vars) if v not in drop_vars]
    gb = reduced_groebner(gens, ring, nkey=block_nkey(drop, keep), order_name="elimination")
    out = [g for g in gb.generators if all(m[i] == 0 for m in g.terms for i in drop)]
    # present the result in the ring's own order
    return list(reduced_groebner(out, ring.polynomial_ring()).generators) if out else []


# -- modules -----------------------------------------------------------------

class ModuleElement:
    """Element of the free module of rank ``rank`` over the ring."""

    __slots__ = ("ring", "rank", "terms")

    def __init__(self, ring, rank, terms):
        self.ring = ring
        self.rank = rank
        self.terms = terms

    @classmethod
    def from_entries(cls, ring, entries):
        terms = {}
        for i, f in enumerate(entries):
            f = ring.coerce(f)
            for m, c in f.terms.items():
                terms[(i, m)] = c
        return cls(ring, len(entries), terms)

    @classmethod
    def unit(cls, ring, rank, i, coeff=None):
        coeff = ring.one() if coeff is None else ring.coerce(coeff)
        return cls(ring, rank, {(i, m): c for m, c in coeff.terms.items()})

    def entry(self, i):
        return Polynomial(self.ring, {m: c for (j, m), c in self.terms.items() if j == i})

    def entries(self):
        rows = [dict() for _ in range(self.rank)]
        for (j, m), c in self.terms.items():
            rows[j][m] = c
        return [Polynomial(self.ring, r) for r in rows]

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if self.rank != other.rank:
            raise RingError("module elements of different rank")
        p = self.ring.p
        out = dict(self.terms)
        for t, c in other.terms.items():
            c = (out.get(t, 0) + c) % p
            if c:
                out[t] = c
            else:
                out.pop(t, None)
        return ModuleElement(self.ring, self.rank, out)

    def __mul__(self, f):
        """Scalar multiplication by a polynomial."""
        f = self.ring.coerce(f)
        p = self.ring.p
        out = {}
        for (j, m), c in self.terms.items():
            for m2, c2 in f.terms.items():
                t = (j, tuple(a + b for a, b in zip(m, m2)))
                v = (out.get(t, 0) + c * c2) % p
                if v:
                    out[t] = v
                else:
                    out.pop(t, None)
        return ModuleElement(self.ring, self.rank, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    def __hash__(self):
        return hash((self.rank, frozenset(self.terms.items())))

    def __repr__(self):
        return "ModuleElement([" + ", ".join(str(f) for f in self.entries()) + "])"


def combine(columns, coeffs):
    """sum_i coeffs[i] * columns[i]."""
    if not columns:
        raise ValueError("no columns")
    total = ModuleElement(columns[0].ring, columns[0].rank, {})
    for col, c in zip(columns, coeffs):
        if c:
            total = total + col * c
    return total


def _shift_vec(terms, offset):
    return {(j + offset, m): c for (j, m), c in terms.items()}


def module_groebner(elements, rank, ring, criteria=True):
    """Reduced Groebner basis (position-over-term) of the submodule of R^rank
    generated by ``elements``; over S/(f) the relations f*e_i are included."""
    vecs = [dict(v.terms) for v in elements if v.terms]
    if ring.modulus is not None:
        for i in range(rank):
            vecs.append({(i, m): c for m, c in ring.modulus.terms.items()})
    basis = buchberger(vecs, ring.p, ring.nkey, ideal_mode=(rank == 1), criteria=criteria)
    return [ModuleElement(ring, rank, v) for v in basis]


def module_normal_form(v, basis):
    if not basis:
        return v
    ring = basis[0].ring
    vkey = _vkey_factory(ring.nkey)
    red = _Basis()
    for g in basis:
        red.add(_lead(g.terms, vkey), g.terms)
    return ModuleElement(ring, v.rank, _reduce(v.terms, red, ring.p, vkey))


def reduce_mod_modulus(v):
    """Normal form of each entry modulo the ring's modulus."""
    ring = v.ring
    if ring.modulus is None or not v.terms:
        return v
    f = ring.modulus
    vkey = _vkey_factory(ring.nkey)
    lm, ft = _monic(_poly_to_vec(f), ring.p, vkey)
    red = _Basis()
    for i in range(v.rank):
        red.add((i, lm[1]), {(i, m): c for (_, m), c in ft.items()})
    return ModuleElement(ring, v.rank, _reduce(v.terms, red, ring.p, vkey))


def syzygies(columns, ring=None, rank=None):
    """Generators of the syzygy module of ``columns``.

    Columns are ModuleElements of a common rank (Polynomials are treated as
    rank-one columns).  The result lives in the free module of rank
    ``len(columns)``.  Over S/(f) the relations f*e_i are adjoined on the
    target side, so the result is the syzygy module over the quotient,
    reduced modulo f with zero vectors dropped.

    Method: a position-over-term Groebner basis of the graph
    {(c_i, eps_i)} in R^(N+m); the basis elements with vanishing first N
    coordinates generate the syzygies.
    """
    columns = list(columns)
    if not columns:
        return []
    if ring is None:
        ring = columns[0].ring
    cols = []
    for c in columns:
        if isinstance(c, Polynomial):
            c = ModuleElement.from_entries(ring, [c])
        cols.append(c)
    N = rank if rank is not None else cols[0].rank
    if any(c.rank != N for c in cols):
        raise RingError("columns have different ranks")
    m = len(cols)
    vecs = []
    for i, c in enumerate(cols):
        v = dict(c.terms)
        v[(N + i, (0,) * ring.nvars)] = 1
        vecs.append(v)
    if ring.modulus is not None:
        for j in range(N):
            vecs.append({(j, mm): cc for mm, cc in ring.modulus.terms.items()})
    basis = buchberger(vecs, ring.p, ring.nkey, ideal_mode=False)
    out = []
    seen = set()
    for v in basis:
        if all(t[0] >= N for t in v):
            s = ModuleElement(ring, m, _shift_vec(v, -N))
            s = reduce_mod_modulus(s)
            key = frozenset(s.terms.items())
            if s.terms and key not in seen:
                seen.add(key)
                out.append(s)
    return out
