"""Line-oriented scenario files.

::

    # comments run to end of line
    space n_bits=2 exhaustive            # or: samples=<M> seed=<s>  |  points: 0x0 0x3 ...
    eps 1/100
    rv id builtin identity
    rv a table 0 1 0 1
    rv f circuit xor.circ                # path relative to this file
    rv c2 const 2
    family: id a f                       # or repeated 'family level <k>: ...'
    quantify core                        # core | all
    autoclose off
    formula small := "x <= 2"

Sampled spaces draw ``samples`` distinct points from
``random.Random(seed).getrandbits(n_bits)`` in draw order.  Random variables
declared but not listed in the family act as named constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .circuit import load_circuit
from .errors import CircuitError, FiltrationError, RVForceError, ScenarioError
from .family import Family, RandomVariable
from .logic import Formula
from .parser import parse_formula
from .space import SampleSpace


@dataclass
class Scenario:
    space: SampleSpace
    rvs: dict[str, RandomVariable]
    family_names: list[str] = field(default_factory=list)
    levels: list[list[str]] | None = None
    eps: Fraction = Fraction(0)
    quantify: str = "core"
    autoclose: bool = False
    formulas: dict[str, str] = field(default_factory=dict)
    circuit_paths: dict[str, str] = field(default_factory=dict)
    family: Family = field(init=False)

    def __post_init__(self):
        self.family = self._build_family()

    def _build_family(self) -> Family:
        members = self.family_names if self.levels is None else self.levels[0]
        missing = [n for n in members if n not in self.rvs]
        if self.levels:
            missing += [n for lvl in self.levels[1:] for n in lvl if n not in self.rvs]
        if missing:
            raise ScenarioError(f"undeclared random variable(s) in family: {', '.join(missing)}")
        fam_members = [self.rvs[n] for n in members]
        others = [rv for name, rv in self.rvs.items() if name not in set(members)]
        levels = None if self.levels is None else [[self.rvs[n] for n in lvl] for lvl in self.levels]
        return Family(self.space, fam_members, levels=levels, constants=others,
                      quantify=self.quantify, autoclose=self.autoclose)

    @property
    def constants(self) -> list[str]:
        return list(self.rvs)

    def formula(self, name: str) -> Formula:
        try:
            text = self.formulas[name]
        except KeyError:
            raise ScenarioError(f"no formula named {name!r}") from None
        return parse_formula(text, self.constants)

    def parse(self, text: str) -> Formula:
        """Parse formula text with this scenario's random variables as constants."""
        return parse_formula(text, self.constants)


_FORMULA = re.compile(r'formula\s+([A-Za-z_]\w*)\s*:=\s*"(.*)"\s*$')
_FAMILY = re.compile(r"family(?:\s+level\s+(\d+))?\s*:\s*(.*)")
_NAME = re.compile(r"[A-Za-z_]\w*$")


def _strip_comment(line: str) -> str:
    # a '#' inside a quoted formula is kept
    out, quoted = [], False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out).strip()


def _parse_space(rest: str, lineno: int) -> SampleSpace:
    head, sep, pts = rest.partition("points:")
    opts: dict[str, str] = {}
    flags = set()
    for tok in head.split():
        k, eq, v = tok.partition("=")
        if eq:
            opts[k] = v
        else:
            flags.add(tok)
    try:
        n = int(opts.pop("n_bits"))
    except KeyError:
        raise ScenarioError("space needs n_bits=<n>", lineno) from None
    except ValueError:
        raise ScenarioError("n_bits must be an integer", lineno) from None
    size = opts.pop("size", None)
    try:
        if sep:
            points = [int(tok, 16) for tok in pts.replace(",", " ").split()]
            sp = SampleSpace(n, points)
        elif "exhaustive" in flags:
            sp = SampleSpace.exhaustive(n)
        elif "samples" in opts and "seed" in opts:
            sp = SampleSpace.sampled(n, int(opts.pop("samples")), int(opts.pop("seed")))
        else:
            raise ScenarioError("space must be exhaustive, samples=<M> seed=<s>, or points: <hex ...>",
                                lineno)
    except ScenarioError:
        raise
    except ValueError as e:
        raise ScenarioError(str(e), lineno) from None
    if size is not None and int(size) != len(sp):
        raise ScenarioError(f"size={size} but the space has {len(sp)} points", lineno)
    return sp


def _parse_rv(rest: str, sp: SampleSpace, base: Path, lineno: int, paths: dict):
    toks = rest.split()
    if len(toks) < 2:
        raise ScenarioError("rv needs a name and a backing", lineno)
    name, kind, args = toks[0], toks[1], toks[2:]
    if not _NAME.match(name):
        raise ScenarioError(f"bad random variable name {name!r}", lineno)
    try:
        if kind == "builtin":
            if args != ["identity"]:
                raise ScenarioError("only 'builtin identity' is available", lineno)
            return RandomVariable.identity(sp, name)
        if kind == "table":
            return RandomVariable.from_table(sp, name, [int(a) for a in args])
        if kind == "const":
            if len(args) != 1:
                raise ScenarioError("const takes one value", lineno)
            return RandomVariable.constant(sp, name, int(args[0]))
        if kind == "circuit":
            if len(args) != 1:
                raise ScenarioError("circuit takes one path", lineno)
            paths[name] = args[0]
            rv = RandomVariable.from_circuit(sp, name, load_circuit(base / args[0]))
            rv.table  # surface simulation errors at load time
            return rv
    except ScenarioError:
        raise
    except (CircuitError, OSError) as e:
        raise ScenarioError(f"{name}: {e}", lineno) from None
    except ValueError as e:
        raise ScenarioError(str(e), lineno) from None
    raise ScenarioError(f"unknown backing {kind!r}", lineno)


def parse_scenario(text: str, base: str | Path = ".") -> Scenario:
    base = Path(base)
    sp = None
    rvs: dict[str, RandomVariable] = {}
    paths: dict[str, str] = {}
    flat: list[str] | None = None
    levels: dict[int, list[str]] = {}
    formulas: dict[str, str] = {}
    formula_lines: dict[str, int] = {}
    eps, quantify, autoclose = Fraction(0), "core", False
    family_line = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        word = line.split()[0]
        rest = line[len(word):].strip()
        if word == "space":
            if sp is not None:
                raise ScenarioError("space declared twice", lineno)
            sp = _parse_space(rest, lineno)
        elif word == "eps":
            try:
                eps = Fraction(rest)
            except (ValueError, ZeroDivisionError):
                raise ScenarioError(f"bad eps {rest!r}", lineno) from None
            if eps < 0:
                raise ScenarioError("eps must be non-negative", lineno)
        elif word == "rv":
            if sp is None:
                raise ScenarioError("rv before space", lineno)
            rv = _parse_rv(rest, sp, base, lineno, paths)
            if rv.name in rvs:
                raise ScenarioError(f"duplicate random variable {rv.name!r}", lineno)
            rvs[rv.name] = rv
        elif word.startswith("family"):
            m = _FAMILY.match(line)
            if not m:
                raise ScenarioError("expected 'family: <names>' or 'family level <k>: <names>'", lineno)
            names = m.group(2).replace(",", " ").split()
            family_line = family_line or lineno
            if m.group(1) is None:
                if flat is not None or levels:
                    raise ScenarioError("family declared twice", lineno)
                flat = names
            else:
                k = int(m.group(1))
                if flat is not None or k in levels:
                    raise ScenarioError(f"family level {k} declared twice", lineno)
                levels[k] = names
        elif word == "quantify":
            if rest not in ("core", "all"):
                raise ScenarioError("quantify must be 'core' or 'all'", lineno)
            quantify = rest
        elif word == "autoclose":
            if rest not in ("on", "off"):
                raise ScenarioError("autoclose must be 'on' or 'off'", lineno)
            autoclose = rest == "on"
        elif word == "formula":
            m = _FORMULA.match(line)
            if not m:
                raise ScenarioError('expected formula <name> := "<text>"', lineno)
            if m.group(1) in formulas:
                raise ScenarioError(f"duplicate formula {m.group(1)!r}", lineno)
            formulas[m.group(1)] = m.group(2)
            formula_lines[m.group(1)] = lineno
        else:
            raise ScenarioError(f"unknown directive {word!r}", lineno)
    if sp is None:
        raise ScenarioError("missing space declaration")
    level_list = None
    if levels:
        if sorted(levels) != list(range(1, len(levels) + 1)):
            raise ScenarioError("family levels must be numbered 1..L", family_line)
        level_list = [levels[k] for k in sorted(levels)]
    try:
        scen = Scenario(sp, rvs, family_names=list(flat or []), levels=level_list, eps=eps,
                        quantify=quantify, autoclose=autoclose, formulas=formulas,
                        circuit_paths=paths)
    except FiltrationError as e:
        raise ScenarioError(f"filtration: {e}", family_line) from None
    for name, body in formulas.items():
        try:
            parse_formula(body, list(rvs))
        except RVForceError as e:
            raise ScenarioError(f"formula {name}: {e}", formula_lines[name]) from None
    return scen


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e.strerror}") from None
    return parse_scenario(text, path.parent)


def dump_scenario(scen: Scenario) -> str:
    """Self-contained text: points and circuit-backed tables are written out explicitly."""
    sp = scen.space
    width = max(1, (sp.n_bits + 3) // 4)
    lines = []
    if sp.mode == "exhaustive":
        lines.append(f"space n_bits={sp.n_bits} exhaustive")
    else:
        pts = " ".join(f"0x{p:0{width}x}" for p in sp.points)
        lines.append(f"space n_bits={sp.n_bits} points: {pts}")
    if scen.eps:
        lines.append(f"eps {scen.eps}")
    for name, rv in scen.rvs.items():
        if rv.kind == "identity":
            lines.append(f"rv {name} builtin identity")
        elif rv.kind == "const":
            lines.append(f"rv {name} const {rv.source}")
        else:
            lines.append(f"rv {name} table " + " ".join(map(str, rv.table)))
    if scen.levels is None:
        lines.append("family: " + " ".join(scen.family_names))
    else:
        for k, lvl in enumerate(scen.levels, 1):
            lines.append(f"family level {k}: " + " ".join(lvl))
    lines.append(f"quantify {scen.quantify}")
    lines.append(f"autoclose {'on' if scen.autoclose else 'off'}")
    for name, body in scen.formulas.items():
        lines.append(f'formula {name} := "{body}"')
    return "\n".join(lines) + "\n"


def load_type_file(path, constants=(), var: str = "x"):
    from .saturation import TypeSpec

    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e.strerror}") from None
    try:
        return TypeSpec.parse(text, constants, var)
    except ValueError as e:
        if isinstance(e, RVForceError):
            raise
        raise ScenarioError(f"{path.name}: {e}") from None


__all__ = ["Scenario", "dump_scenario", "load_scenario", "load_type_file", "parse_scenario"]
