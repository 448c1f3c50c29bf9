"""Command-line front end.

    frobinv COMMAND SESSION [flags]

A session is a YAML (or JSON) document describing one ring and a set of named
ideals.  Every command writes a JSON report with keys command, inputs, tables,
verdicts, witnesses and timings, in that order.  Exit status is 0 on success,
1 on bad input or a failed precondition, and 2 when ``--assert`` is given and
some verdict is false.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .frobenius import fedder_is_fpure, splitting_ideal
from .ideals import INFINITE, Ideal, bracket_power, colength, dimension
from .invariants import (
    InvariantReport,
    assoc_check,
    depth_probe,
    equi_check,
    frobenius_betti_euler,
    fsig_estimates,
    hk_function,
    localize_betti,
    minimal_resolution,
)
from .frobenius import pushforward_presentation
from .ring import RingError, RingSpec

MAX_E = 3
MAX_N = 64
MAX_I = 8


class SessionError(ValueError):
    pass


@dataclass
class SessionDocument:
    ring: RingSpec
    ideals: dict = field(default_factory=dict)
    primes: dict = field(default_factory=dict)
    lists: dict = field(default_factory=dict)

    def ideal(self, name, prefer="ideals"):
        first, second = (self.ideals, self.primes) if prefer == "ideals" else (self.primes, self.ideals)
        for table in (first, second):
            if name in table:
                return table[name]
        if name == "m":
            return Ideal.maximal(self.ring)
        raise SessionError(f"no ideal named {name!r} in the session")

    def generator_list(self, name):
        if name in self.lists:
            return self.lists[name]
        if name == "m":
            return self.ring.gens()
        raise SessionError(f"no ideal named {name!r} in the session")


# -- session loading ---------------------------------------------------------------

def _plain(node, path, lines):
    """Convert a composed YAML node to plain data, keeping scalars as text and
    recording the line of every path; duplicate keys are rejected."""
    lines[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        out = {}
        for key_node, value_node in node.value:
            key = key_node.value
            if key in out:
                raise SessionError(
                    f"line {key_node.start_mark.line + 1}: duplicate key {key!r} in {path or 'document'}")
            out[key] = _plain(value_node, f"{path}.{key}" if path else key, lines)
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_plain(v, f"{path}[{i}]", lines) for i, v in enumerate(node.value)]
    if node.tag == "tag:yaml.org,2002:null" or (node.value in ("", "~", "null") and node.style is None):
        return None
    return node.value


def _field_error(lines, path, msg):
    return SessionError(f"line {lines.get(path, '?')}, field {path}: {msg}")


def parse_session(text: str) -> SessionDocument:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        raise SessionError(f"malformed session: {exc}") from None
    if root is None:
        raise SessionError("empty session")
    lines = {}
    doc = _plain(root, "", lines)
    if not isinstance(doc, dict):
        raise SessionError("session must be a mapping with keys ring, ideals, primes")
    unknown = set(doc) - {"ring", "ideals", "primes"}
    if unknown:
        raise SessionError(f"unknown top-level keys: {', '.join(sorted(unknown))}")
    ring_doc = doc.get("ring")
    if not isinstance(ring_doc, dict):
        raise SessionError("missing ring section")
    try:
        p = int(ring_doc.get("p"))
    except (TypeError, ValueError):
        raise _field_error(lines, "ring.p", "characteristic must be an integer") from None
    names = ring_doc.get("vars")
    if not isinstance(names, list) or not names:
        raise _field_error(lines, "ring.vars", "expected a nonempty list of variable names")
    try:
        ring = RingSpec(p, names, order=ring_doc.get("order") or "grevlex",
                        modulus=ring_doc.get("modulus"))
    except RingError as exc:
        raise SessionError(f"line {lines.get('ring', '?')}, field ring: {exc}") from None

    session = SessionDocument(ring)
    for section in ("ideals", "primes"):
        entries = doc.get(section) or {}
        if not isinstance(entries, dict):
            raise _field_error(lines, section, "expected a mapping of names to generator lists")
        for name, gens in entries.items():
            path = f"{section}.{name}"
            if name in session.lists:
                raise _field_error(lines, path, f"name {name!r} is already defined")
            if not isinstance(gens, list):
                raise _field_error(lines, path, "expected a list of polynomial strings")
            polys = []
            for i, text in enumerate(gens):
                try:
                    polys.append(ring.parse(str(text)))
                except RingError as exc:
                    raise _field_error(lines, f"{path}[{i}]", str(exc)) from None
            if section == "primes":
                for i, g in enumerate(polys):
                    if g.constant_term() != 0:
                        raise _field_error(lines, f"{path}[{i}]",
                                           "prime generators must have zero constant term")
            session.lists[name] = polys
            getattr(session, section)[name] = Ideal(ring, polys)
    return session


def load_session(path) -> SessionDocument:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SessionError(f"cannot read session: {exc}") from None
    return parse_session(text)


# -- commands ----------------------------------------------------------------------

def _cap(value, ceiling, flag):
    if value < 0 or value > ceiling:
        raise SessionError(f"{flag} must lie between 0 and {ceiling}")
    return value


def _cmd_groebner(s, a):
    I = s.ideal(a.ideal)
    rep = InvariantReport("groebner", s.ring, {"ideal": a.ideal})
    rep.tables["groebner_basis"] = I.canonical_strings()
    return rep


def _cmd_colength(s, a):
    I = s.ideal(a.ideal)
    lam = colength(I)
    rep = InvariantReport("colength", s.ring, {"ideal": a.ideal})
    rep.tables["colength"] = {
        "lambda": "infinite" if lam == INFINITE else lam,
        "dimension": dimension(I),
    }
    return rep


def _cmd_bracket_power(s, a):
    I = s.ideal(a.ideal)
    rep = InvariantReport("bracket-power", s.ring, {"ideal": a.ideal, "e": a.e})
    rep.tables["generators"] = bracket_power(I, a.e).canonical_strings()
    return rep


def _cmd_splitting_ideal(s, a):
    I = s.ideal(a.ideal)
    result = splitting_ideal(I, a.e).result
    rep = InvariantReport("splitting-ideal", s.ring, {"ideal": a.ideal, "e": a.e})
    rep.tables["generators"] = result.canonical_strings()
    rep.verdicts["contains_bracket_power"] = bracket_power(I, a.e).issubset(result)
    if s.ring.modulus is None or fedder_is_fpure(s.ring, a.e):
        rep.verdicts["contained_in_base"] = result.issubset(I)
    return rep


def _cmd_hk(s, a):
    rep = hk_function(s.ideal(a.ideal), _cap(a.e_max, MAX_E, "--e-max"))
    rep.inputs["name"] = a.ideal
    return rep


def _cmd_fsig(s, a):
    rep = fsig_estimates(s.ideal(a.ideal), _cap(a.e_max, MAX_E, "--e-max"))
    rep.inputs["name"] = a.ideal
    return rep


def _cmd_betti(s, a):
    i_max = _cap(a.i_max, MAX_I, "--i-max")
    slice_ = minimal_resolution(pushforward_presentation(s.ring, a.e), i_max)
    rep = frobenius_betti_euler(s.ring, a.e, i_max, slice_)
    if a.prime:
        local = localize_betti(slice_, s.ideal(a.prime, prefer="primes"))
        rep.inputs["prime"] = a.prime
        rep.tables.update(local.tables)
        rep.verdicts.update(local.verdicts)
    return rep


def _cmd_equi_check(s, a):
    extra = s.ideal(a.ideal) if a.ideal else None
    rep = equi_check(s.ideal(a.prime, prefer="primes"), a.e, a.mode, extra)
    rep.inputs["name"] = a.prime
    return rep


def _default_candidates(ring):
    gens = ring.gens()
    sums = [gens[i] + gens[j] for i in range(len(gens)) for j in range(i + 1, len(gens))]
    return gens + sums


def _cmd_depth_probe(s, a):
    cands = s.generator_list(a.ideal) if a.ideal else _default_candidates(s.ring)
    rep = depth_probe(s.ideal(a.prime, prefer="primes"), a.e, cands)
    rep.inputs["name"] = a.prime
    return rep


def _cmd_assoc_check(s, a):
    params = s.generator_list(a.params) if a.params else []
    primes = None
    if a.primes:
        primes = [s.ideal(n.strip(), prefer="primes") for n in a.primes.split(",") if n.strip()]
    rep = assoc_check(s.ideal(a.ideal), params, a.e, _cap(a.n_max, MAX_N, "--n-max"), primes)
    rep.inputs["name"] = a.ideal
    return rep


def _cmd_fpure(s, a):
    rep = InvariantReport("fpure", s.ring, {"e": a.e})
    rep.tables["fpure"] = fedder_is_fpure(s.ring, a.e)
    return rep


COMMANDS = {
    "groebner": (_cmd_groebner, ("ideal",)),
    "colength": (_cmd_colength, ("ideal",)),
    "bracket-power": (_cmd_bracket_power, ("ideal", "e")),
    "splitting-ideal": (_cmd_splitting_ideal, ("ideal", "e")),
    "hk": (_cmd_hk, ("ideal", "e_max")),
    "fsig": (_cmd_fsig, ("ideal", "e_max")),
    "betti": (_cmd_betti, ("e", "i_max", "prime")),
    "equi-check": (_cmd_equi_check, ("prime", "e", "mode", "ideal")),
    "depth-probe": (_cmd_depth_probe, ("prime", "e", "ideal")),
    "assoc-check": (_cmd_assoc_check, ("ideal", "params", "e", "n_max", "primes")),
    "fpure": (_cmd_fpure, ("e",)),
}

_REQUIRED = {"equi-check": ("prime",), "depth-probe": ("prime",)}


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1; status 2 is reserved for --assert."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_flag(sp, name, required):
    if name == "ideal":
        optional = sp.prog.split()[-1] in ("equi-check", "depth-probe")
        sp.add_argument("--ideal", default=None if optional else "m")
    elif name == "prime":
        sp.add_argument("--prime", required=required)
    elif name == "e":
        sp.add_argument("--e", type=int, default=1)
    elif name == "e_max":
        sp.add_argument("--e-max", type=int, default=2)
    elif name == "n_max":
        sp.add_argument("--n-max", type=int, default=8)
    elif name == "i_max":
        sp.add_argument("--i-max", type=int, default=2)
    elif name == "mode":
        sp.add_argument("--mode", choices=("fsig", "hk"), default="fsig")
    elif name == "params":
        sp.add_argument("--params", default=None, help="named generator list used as parameters")
    elif name == "primes":
        sp.add_argument("--primes", default=None, help="comma-separated prime names")


def build_parser():
    parser = _Parser(prog="frobinv", description="Frobenius invariants over F_p")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, flags) in COMMANDS.items():
        sp = sub.add_parser(name)
        sp.add_argument("session")
        for flag in flags:
            required = flag in _REQUIRED.get(name, ())
            _add_flag(sp, flag, required)
        sp.add_argument("--assert", dest="check", action="store_true",
                        help="exit 2 when any verdict is false")
        sp.add_argument("--out", default=None)
        sp.add_argument("--timings", action="store_true",
                        help="record wall-clock time (reports are then not reproducible)")
    return parser


def run_command(session: SessionDocument, command: str, args) -> InvariantReport:
    if command not in COMMANDS:
        raise SessionError(f"unknown command {command!r}")
    if getattr(args, "e", 1) is not None:
        _cap(getattr(args, "e", 1), MAX_E, "--e")
    start = time.perf_counter()
    report = COMMANDS[command][0](session, args)
    if getattr(args, "timings", False):
        report.timings["seconds"] = round(time.perf_counter() - start, 3)
    return report


def render(report: InvariantReport) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        session = load_session(args.session)
        report = run_command(session, args.command, args)
    except (ValueError, OverflowError) as exc:
        print(f"frobinv: {exc}", file=sys.stderr)
        return 1
    text = render(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.check and not report.ok:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
