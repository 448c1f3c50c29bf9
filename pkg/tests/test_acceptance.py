"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import json
import random
import sys
import time
import traceback
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import oracles  # noqa: E402
import splitting_checks as checks  # noqa: E402
from frobinv.cli import main as cli_main  # noqa: E402
from frobinv.frobenius import pushforward_presentation, splitting_ideal, splitting_number  # noqa: E402
from frobinv.groebner import (  # noqa: E402
    ModuleElement,
    module_groebner,
    module_normal_form,
    reduced_groebner,
    syzygies,
)
from frobinv.ideals import Ideal, bracket_power, colength  # noqa: E402
from frobinv.invariants import (  # noqa: E402
    assoc_check,
    equi_check,
    euler_numbers,
    frobenius_betti_euler,
    fsig_estimates,
    localize_betti,
    minimal_resolution,
)
from frobinv.ring import RingSpec  # noqa: E402

SESSIONS = Path(__file__).resolve().parent.parent / "sessions"
QUADRIC = checks.QUADRIC
PLANE = checks.PLANE
CROSSING = RingSpec(2, ["x", "y"], modulus="x*y")

_LINES = []


@contextmanager
def criterion(number, title, limit, log=None):
    """Collect named checks, time them, and emit one PASS/FAIL line."""
    results = {}
    start = time.perf_counter()
    error = None
    try:
        yield results
    except Exception as exc:  # a crash is a failure of the criterion, reported as such
        error = f"{type(exc).__name__}: {exc}"
        traceback.print_exc()
    elapsed = time.perf_counter() - start
    failed = [name for name, ok in results.items() if not ok]
    ok = error is None and not failed and elapsed < limit and results
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({elapsed:.1f}s of {limit}s)"
    if failed:
        line += "  failed: " + ", ".join(failed)
    if error:
        line += "  error: " + error
    if elapsed >= limit:
        line += "  over time limit"
    print(line)
    _LINES.append(line)
    if log is not None:
        log.append(line)
    assert ok, line


def _cli(argv, tmp):
    out = Path(tmp) / "report.json"
    code = cli_main(list(argv) + ["--out", str(out)])
    return code, json.loads(out.read_text()) if out.exists() else None


# -- 1 ---------------------------------------------------------------------------

def test_criterion_1_paper_example(tmp_path, acceptance_log):
    with criterion(1, "splitting ideal of (x, z) on the quadric cone", 5, acceptance_log) as r:
        code, rep = _cli(["splitting-ideal", str(SESSIONS / "quadric.yaml"), "--ideal", "P", "--e", "1"], tmp_path)
        r["exit status 0"] = code == 0
        got = Ideal.parse(QUADRIC, rep["tables"]["generators"])
        r["reduced basis equals (xz, x^2, z^2)"] = (
            got.gb() == Ideal.parse(QUADRIC, ["x*z", "x^2", "z^2"]).gb())
        r["printed generators"] = rep["tables"]["generators"] == ["x*z", "x^2", "z^2"]


# -- 2 ---------------------------------------------------------------------------

def test_criterion_2_depth_one(tmp_path, acceptance_log):
    with criterion(2, "depth of R/I_1(P) is exactly one", 10, acceptance_log) as r:
        code, rep = _cli(["depth-probe", str(SESSIONS / "quadric.yaml"), "--prime", "P", "--e", "1"], tmp_path)
        r["exit status 0"] = code == 0
        row = rep["tables"]["depth"][0]
        r["probe runs on the splitting ideal"] = row["ideal"] == ["x*z", "x^2", "z^2"]
        r["one regular element found"] = row["length"] == 1
        r["maximal ideal associated after one step"] = row["depth_certified"]
        r["socle witness present"] = bool(rep["witnesses"].get("splitting_socle"))


# -- 3 ---------------------------------------------------------------------------

def test_criterion_3_regular_rings(acceptance_log):
    with criterion(3, "Kunz suite for polynomial rings", 60, acceptance_log) as r:
        names = ["x", "y", "z"]
        for p, n, e in itertools.product((2, 3, 5), (1, 2, 3), (1, 2)):
            ring = RingSpec(p, names[:n])
            q = p ** e
            m = Ideal.maximal(ring)
            tag = f"p={p} n={n} e={e}"
            r[f"colength of bracket power {tag}"] = colength(bracket_power(m, e)) == q ** n
            row = fsig_estimates(m, e).tables["fsig"][-1]
            r[f"splitting estimate is one {tag}"] = Fraction(row["normalized"]) == 1
            rep = frobenius_betti_euler(ring, e, 2)
            betti = [row["beta"] for row in rep.tables["betti"]]
            chi = [row["chi"] for row in rep.tables["betti"]]
            r[f"higher Betti numbers vanish {tag}"] = betti[1:] == [0, 0]
            r[f"Euler numbers alternate {tag}"] = chi == [(-1) ** i * q ** n for i in range(3)]
        rng = random.Random(2024)
        for k in range(20):
            p, n, e = rng.choice((2, 3, 5)), rng.choice((1, 2, 3)), rng.choice((1, 2))
            ring = RingSpec(p, names[:n])
            a = checks.random_ideal(ring, rng)
            expected = Ideal(ring, [g ** (p ** e) for g in a.generators])
            # the same ideal computed through the hypersurface colon formula in S[t]/(t)
            hyper = RingSpec(p, names[:n] + ["t"], modulus="t")
            lifted = Ideal(hyper, [hyper.parse(str(g)) for g in a.generators])
            via_colon = splitting_ideal(lifted, e).result
            back = Ideal(hyper, [hyper.parse(str(g)) for g in expected.generators])
            r[f"splitting ideal is the bracket power #{k}"] = (
                splitting_ideal(a, e).result == expected and via_colon == back)


# -- 4 ---------------------------------------------------------------------------

def test_criterion_4_basic_properties(acceptance_log):
    with criterion(4, "basic properties of splitting ideals", 300, acceptance_log) as r:
        rng = random.Random(7)
        count = 0
        failures = []
        for ring, e in itertools.product((PLANE, QUADRIC), (1, 2)):
            for _ in range(25):
                failed, instance = checks.check_basic_properties(ring, e, rng)
                count += 1
                if failed:
                    failures.append((failed, instance))
        r["at least 100 randomized instances"] = count >= 100
        r["items (2) (3) (7) (10) (11) hold"] = not failures
        prime_count = 0
        prime_failures = []
        for ring, e in itertools.product((PLANE, QUADRIC), (1, 2)):
            for gens in checks.PRIMES[ring]:
                failed, instance = checks.check_prime_properties(ring, gens, e, rng)
                prime_count += 1
                if failed:
                    prime_failures.append((failed, instance))
        r["at least 20 prime instances"] = prime_count >= 20
        r["items (8) and (9) hold"] = not prime_failures
        if failures or prime_failures:
            print(failures[:3], prime_failures[:3])


# -- 5 ---------------------------------------------------------------------------

def test_criterion_5_quadric_anchors(acceptance_log):
    with criterion(5, "quadric cone anchors", 30, acceptance_log) as r:
        S = QUADRIC.polynomial_ring()
        box = oracles.Box(QUADRIC, [2] * 4)
        oracle_hk = box.colength([S.coerce(QUADRIC.modulus)])
        r["oracle colength of m^[2] is 10"] = oracle_hk == 10
        r["package colength of m^[2] is 10"] = colength(bracket_power(Ideal.maximal(QUADRIC), 1)) == 10
        oracle_a1 = oracles.splitting_number_by_kernel(QUADRIC, 1)
        r["oracle splitting number is 6"] = oracle_a1 == 6
        r["package splitting number is 6"] = splitting_number(QUADRIC, 1) == 6
        rep = equi_check(Ideal.parse(QUADRIC, ["x", "z"]), 1, "fsig")
        r["equimultiplicity check fails"] = rep.verdicts["splitting_equality"] is False
        r["witness x*w"] = rep.witnesses["splitting_equality"][0] == "x*w"


# -- 6 ---------------------------------------------------------------------------

def test_criterion_6_resolution_identities(acceptance_log):
    with criterion(6, "resolution identities at e = 1", 120, acceptance_log) as r:
        for name, ring in (("crossing", CROSSING), ("quadric", QUADRIC)):
            sl = minimal_resolution(pushforward_presentation(ring, 1), 2)
            rank = ring.rank(1)
            betti, ranks = sl.betti, sl.syzygy_ranks
            chi = euler_numbers(betti)
            r[f"{name}: consecutive differentials compose to zero"] = sl.is_complex()
            r[f"{name}: minimal"] = sl.is_minimal()
            r[f"{name}: ranks certified"] = ranks is not None
            r[f"{name}: rank identity"] = all(
                ranks[i] == chi[i - 1] + (-1) ** i * rank for i in range(1, 3))
            r[f"{name}: Betti numbers exceed syzygy ranks"] = all(b > k for b, k in zip(betti, ranks))
            r[f"{name}: Euler numbers exceed the bound"] = all(
                c > (-1) ** i * rank for i, c in enumerate(chi))
            r[f"{name}: Betti numbers recomputed from Euler numbers"] = all(
                betti[i] == chi[i] + (chi[i - 1] if i else 0) for i in range(3))
            rep = frobenius_betti_euler(ring, 1, 2, sl)
            r[f"{name}: report verdicts"] = all(rep.verdicts.values())


# -- 7 ---------------------------------------------------------------------------

def test_criterion_7_localization(acceptance_log):
    with criterion(7, "semicontinuity at (x, z)", 60, acceptance_log) as r:
        sl = minimal_resolution(pushforward_presentation(QUADRIC, 1), 2)
        rep = localize_betti(sl, Ideal.parse(QUADRIC, ["x", "z"]))
        rows = rep.tables["localized"]
        r["Betti numbers drop"] = all(row["beta"] >= row["beta_local"] for row in rows)
        r["Euler numbers drop"] = all(row["chi"] >= row["chi_local"] for row in rows)
        r["localized higher Betti numbers vanish"] = all(row["beta_local"] == 0 for row in rows[1:])


# -- 8 ---------------------------------------------------------------------------

def _oracle_lhs(n):
    """lambda(F_2[x,y]/(x^2 y^2, (x+y)^(2n))) by dense linear algebra."""
    S = PLANE
    x, y = S.gens()
    gens = [x ** 2 * y ** 2, (x + y) ** (2 * n), x ** (2 * n + 2), y ** (2 * n + 2)]
    return oracles.Box(S, [2 * n + 2] * 2).colength(gens)


def test_criterion_8_associativity(acceptance_log):
    with criterion(8, "associativity at fixed e for (xy)", 120, acceptance_log) as r:
        I = Ideal.parse(PLANE, ["x*y"])
        primes = [Ideal.parse(PLANE, ["x"]), Ideal.parse(PLANE, ["y"])]
        rep = assoc_check(I, [PLANE.parse("x + y")], 1, 8, primes)
        r["right-hand side is 8"] = rep.tables["rhs"]["value"] == 8
        lhs = [Fraction(row["lhs"]) for row in rep.tables["lhs"]]
        oracle = [Fraction(_oracle_lhs(n), n) for n in range(1, 9)]
        r["left-hand side matches the oracle"] = lhs == oracle
        gaps = [abs(v - 8) for v in lhs]
        r["distance to 8 nonincreasing"] = all(a >= b for a, b in zip(gaps, gaps[1:]))
        r["reaches 8"] = lhs[-1] == 8
        r["stabilization verdict"] = rep.verdicts["stabilizes"]
        cells = rep.tables["claim"]
        r["claim grid covers n, m up to 4"] = {(c["n"], c["m"]) for c in cells} >= {
            (n, m) for n in range(1, 5) for m in range(1, 5)}
        r["claim identity holds"] = rep.verdicts["claim_identity"]
        r["step monotonicity"] = rep.verdicts["steps_nondecreasing"]
        r["average monotonicity"] = rep.verdicts["average_nondecreasing"]


# -- 9 ---------------------------------------------------------------------------

def _syzygy_instances(rng):
    out = []
    while len(out) < 8:
        ring = RingSpec(rng.choice((2, 3)), ["x", "y", "z"][: rng.choice((2, 3))])
        cols = [[oracles.random_polynomial(ring, rng, max_deg=2, terms=2)] for _ in range(rng.choice((2, 3)))]
        if all(c[0] for c in cols):
            out.append((ring, cols))
    # vector-valued columns and a hypersurface
    ring = RingSpec(2, ["x", "y", "z"])
    out.append((ring, [[ring.parse(a), ring.parse(b)] for a, b in (("x", "y"), ("y", "z"), ("z", "x"))]))
    out.append((CROSSING, [[CROSSING.parse("x")], [CROSSING.parse("x + y")]]))
    return out


def _module_contains(basis, vec, ring):
    return module_normal_form(ModuleElement.from_entries(ring, vec), basis).is_zero()


def test_criterion_9_oracle_equivalences(acceptance_log):
    with criterion(9, "oracle equivalences", 300, acceptance_log) as r:
        rng = random.Random(99)
        agree = 0
        for _ in range(50):
            ring = RingSpec(rng.choice((2, 3, 5)), ["x", "y", "z"][: rng.choice((2, 3))])
            gens = oracles.random_zero_dim_gens(ring, rng)
            box = oracles.box_for(gens, ring)
            agree += colength(Ideal(ring, gens)) == box.colength(gens)
        r["colength agrees with linear algebra on 50 ideals"] = agree == 50

        same = 0
        for _ in range(25):
            ring = RingSpec(rng.choice((2, 3, 5)), ["x", "y", "z"], order=rng.choice(("lex", "grevlex")))
            gens = [oracles.random_polynomial(ring, rng, max_deg=3, terms=3) for _ in range(3)]
            fast = reduced_groebner(gens, ring)
            naive = reduced_groebner(gens, ring, criteria=False)
            reference = oracles.sympy_groebner(gens, ring)
            same += (fast == naive and
                     sorted(map(str, fast.generators)) == sorted(map(str, reference)))
        r["criteria and naive Buchberger agree on 25 ideals"] = same == 25

        contained = 0
        instances = _syzygy_instances(rng)
        for ring, cols in instances:
            elements = [ModuleElement.from_entries(ring, c) for c in cols]
            ours = syzygies(elements, ring)
            ours_vecs = [s.entries() for s in ours]
            top = max((g.degree() for v in ours_vecs for g in v if g), default=0)
            truncated = oracles.truncated_syzygies(cols, ring, max(top, 1) + 1)
            truncated = [[ring.coerce(g) for g in v] for v in truncated]
            m = len(cols)
            ours_basis = module_groebner(ours, m, ring) if ours else []
            theirs_basis = module_groebner(
                [ModuleElement.from_entries(ring, v) for v in truncated], m, ring) if truncated else []
            forward = all(_module_contains(theirs_basis, v, ring) for v in ours_vecs) if theirs_basis \
                else not ours_vecs
            backward = all(_module_contains(ours_basis, v, ring) for v in truncated) if ours_basis \
                else not truncated
            contained += forward and backward
        r[f"syzygies agree with the truncated solver on {len(instances)} instances"] = (
            contained == len(instances) >= 10)


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    import tempfile

    failed = 0
    for fn in tests:
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as tmp:
                    fn(Path(tmp), [])
            else:
                fn([])
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
