"""Strict JSON configs describing a homogeneous bundle and a task list.

A document has exactly seven sections: ring, lie_algebra, splitting,
representation, letters, contractions, tasks.  Validation is eager and
unknown keys are rejected with the offending path, so a typo cannot
silently change what gets computed.  Numeric entries (structure constants,
representation matrices, contraction tensors) are written as exact value
strings over the declared square roots, for example "-1/2" or "2*sqrt3";
radical squares are scalar strings such as "k+aa".

parse_config only checks structure and literals.  realize_config actually
builds the validated setup, the letters and the contractions, and is the
step that can reject a config on mathematical grounds (Jacobi failure,
non-equivariant letter, and so on).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from equiform.dictionary import DictionaryOptions, generate_dictionary
from equiform.expressions import (
    ExpressionContext,
    ExpressionError,
    build_context,
    parse_form_expression,
    tokenize,
)
from equiform.homogeneous import (
    HomogeneousSetup,
    Splitting,
    make_algebra,
    make_representation,
    validate_setup,
)
from equiform.letters import (
    Contraction,
    Letter,
    LetterError,
    det_contraction,
    dot_contraction,
    letter_a,
    letter_b,
    make_contraction,
    make_letter,
)
from equiform.numberfield import FieldElement, NumberField
from equiform.scalars import RadicalSpec, Ring, RingSpec


class ConfigError(ValueError):
    pass


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TASK_NAME = re.compile(r"[A-Za-z0-9_\-]+\Z")
_SQRT_NAME = re.compile(r"sqrt([0-9]+)\Z")

TASK_KINDS = (
    "generate",
    "dim_table",
    "d_table",
    "verify_closed",
    "verify_equation",
    "express",
)

_TASK_FIELDS: dict[str, tuple[frozenset, frozenset]] = {
    "generate": (frozenset(), frozenset({"max_length"})),
    "dim_table": (frozenset(), frozenset()),
    "d_table": (
        frozenset({"max_degree"}),
        frozenset({"laurent_bounds", "allow_triples"}),
    ),
    "verify_closed": (frozenset({"forms"}), frozenset({"on_sphere"})),
    "verify_equation": (
        frozenset({"lhs", "rhs"}),
        frozenset({"on_sphere"}),
    ),
    "express": (
        frozenset({"expression"}),
        frozenset({"laurent_bounds", "allow_triples"}),
    ),
}


# -- section records ---------------------------------------------------------


@dataclass(frozen=True)
class RadicalSection:
    name: str
    square: str


@dataclass(frozen=True)
class RingSection:
    sqrt_constants: tuple[int, ...] = ()
    params: tuple[str, ...] = ()
    radicals: tuple[RadicalSection, ...] = ()


@dataclass(frozen=True)
class ContractionSection:
    symmetry: str
    entries: tuple[tuple[tuple[int, ...], str], ...]


@dataclass(frozen=True)
class TaskSpec:
    kind: str
    name: str
    max_length: int | None = None
    max_degree: int | None = None
    laurent_bounds: tuple[int, int] | None = None
    on_sphere: bool = False
    forms: tuple[str, ...] = ()
    lhs: str | None = None
    rhs: str | None = None
    expression: str | None = None
    allow_triples: bool = False


@dataclass(frozen=True)
class ConfigDocument:
    ring: RingSection
    dimension: int
    constants: tuple[tuple[int, int, int, str], ...]
    horizontal: tuple[int, ...]
    gauge: tuple[int, ...]
    representation: tuple[tuple[int, tuple[tuple[str, ...], ...]], ...]
    letters: tuple[tuple[str, object], ...] = field(repr=False, default=())
    contractions: tuple[tuple[str, object], ...] = field(repr=False, default=())
    tasks: tuple[TaskSpec, ...] = ()
    fiber_dim: int = 0


# -- low-level checks --------------------------------------------------------


def _check_keys(obj, where: str, required, optional=frozenset()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    for key in obj:
        if key not in required and key not in optional:
            raise ConfigError(f"{where}: unknown key {key!r}")
    for key in sorted(required):
        if key not in obj:
            raise ConfigError(f"{where}: missing required key {key!r}")


def _as_int(x, where: str, low: int | None = None, high: int | None = None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{where}: expected an integer, got {x!r}")
    if low is not None and x < low:
        raise ConfigError(f"{where}: value {x} is below {low}")
    if high is not None and x > high:
        raise ConfigError(f"{where}: value {x} is above {high}")
    return x


def _as_str(x, where: str) -> str:
    if not isinstance(x, str) or not x:
        raise ConfigError(f"{where}: expected a nonempty string, got {x!r}")
    return x


def _as_bool(x, where: str) -> bool:
    if not isinstance(x, bool):
        raise ConfigError(f"{where}: expected true or false, got {x!r}")
    return x


def _as_ident(x, where: str) -> str:
    s = _as_str(x, where)
    if not _IDENT.match(s):
        raise ConfigError(f"{where}: {s!r} is not a valid identifier")
    return s


def _index_list(x, where: str, dimension: int) -> tuple[int, ...]:
    if not isinstance(x, list) or not x:
        raise ConfigError(f"{where}: expected a nonempty list of indices")
    out = tuple(
        _as_int(v, f"{where}[{i}]", low=1, high=dimension) for i, v in enumerate(x)
    )
    if len(set(out)) != len(out):
        raise ConfigError(f"{where}: repeated index")
    return out


def _digit_indices(s: str, where: str, top: int) -> tuple[int, ...]:
    if not s or not s.isdigit():
        raise ConfigError(f"{where}: expected a digit string, got {s!r}")
    idx = tuple(int(ch) for ch in s)
    for i in idx:
        if not 1 <= i <= top:
            raise ConfigError(f"{where}: index {i} out of range 1..{top}")
    return idx


# -- exact literal parsing ---------------------------------------------------


class _ValueParser:
    """Sums, differences and products of atoms, with parentheses.

    The atom callback turns a number or name token into a value; the value
    type only needs +, - and *.  Used for field constants (values are field
    elements) and for radical squares (values are ring scalars).
    """

    def __init__(self, text: str, where: str, atom: Callable):
        self.where = where
        try:
            self.toks = tokenize(text)
        except ExpressionError as e:
            raise ConfigError(f"{where}: {e}") from None
        self.k = 0
        self.atom = atom

    def peek(self):
        return self.toks[self.k]

    def take(self):
        tok = self.toks[self.k]
        if tok.kind != "end":
            self.k += 1
        return tok

    def parse(self):
        val = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ConfigError(
                f"{self.where}: unexpected trailing input {tok.text!r}"
            )
        return val

    def expr(self):
        tok = self.peek()
        negate = False
        if tok.kind in ("+", "-"):
            self.take()
            negate = tok.kind == "-"
        left = self.term()
        if negate:
            left = -left
        while self.peek().kind in ("+", "-"):
            op = self.take()
            right = self.term()
            left = left - right if op.kind == "-" else left + right
        return left

    def term(self):
        left = self.factor()
        while self.peek().kind == "*":
            self.take()
            left = left * self.factor()
        return left

    def factor(self):
        tok = self.peek()
        if tok.kind == "(":
            self.take()
            inner = self.expr()
            if self.peek().kind != ")":
                raise ConfigError(f"{self.where}: missing ')'")
            self.take()
            return inner
        if tok.kind in ("number", "name"):
            self.take()
            try:
                return self.atom(tok)
            except ZeroDivisionError:
                raise ConfigError(
                    f"{self.where}: zero denominator in {tok.text!r}"
                ) from None
            except ValueError as e:
                raise ConfigError(f"{self.where}: {e}") from None
        raise ConfigError(
            f"{self.where}: expected a value, found {tok.text!r}"
        )


def _field_atom(field: NumberField) -> Callable:
    def atom(tok):
        if tok.kind == "number":
            return field.rational(Fraction(tok.text))
        m = _SQRT_NAME.match(tok.text)
        if m:
            d = int(m.group(1))
            if d not in field.radicands:
                raise ValueError(
                    f"sqrt{d} is not declared in ring.sqrt_constants"
                )
            return field.sqrt_radicand(d)
        raise ValueError(f"cannot use {tok.text!r} in an exact constant")

    return atom


def parse_field_constant(field: NumberField, text: str, where: str) -> FieldElement:
    return _ValueParser(text, where, _field_atom(field)).parse()


def _square_atom(ring: Ring) -> Callable:
    names = set(ring.fiber) | set(ring.params)

    def atom(tok):
        if tok.kind == "number":
            return ring.constant(Fraction(tok.text))
        if tok.text == "aa":
            out = ring.zero
            for n in ring.fiber:
                v = ring.var(n)
                out = out + v * v
            return out
        if tok.text in names:
            return ring.var(tok.text)
        m = _SQRT_NAME.match(tok.text)
        if m:
            d = int(m.group(1))
            if d not in ring.field.radicands:
                raise ValueError(
                    f"sqrt{d} is not declared in ring.sqrt_constants"
                )
            return ring.sqrt_constant(d)
        raise ValueError(f"cannot use {tok.text!r} in a radical square")

    return atom


def parse_radical_square(base_ring: Ring, text: str, where: str):
    """Square of a radical over the radical-free ring, as RadicalSpec rows."""
    scalar = _ValueParser(text, where, _square_atom(base_ring)).parse()
    if scalar.is_zero:
        raise ConfigError(f"{where}: a radical square must be nonzero")
    return tuple(sorted(scalar.coeffs.items()))


# -- section parsers ---------------------------------------------------------


def _parse_ring_section(raw) -> RingSection:
    _check_keys(raw, "ring", frozenset(), {"sqrt_constants", "params", "radicals"})
    sqrt_constants = tuple(
        _as_int(d, f"ring.sqrt_constants[{i}]", low=2)
        for i, d in enumerate(raw.get("sqrt_constants", []))
    )
    params = tuple(
        _as_ident(p, f"ring.params[{i}]")
        for i, p in enumerate(raw.get("params", []))
    )
    if len(set(params)) != len(params):
        raise ConfigError("ring.params: repeated name")
    radicals = []
    for i, entry in enumerate(raw.get("radicals", [])):
        where = f"ring.radicals[{i}]"
        _check_keys(entry, where, {"name", "square"})
        radicals.append(
            RadicalSection(
                name=_as_ident(entry["name"], f"{where}.name"),
                square=_as_str(entry["square"], f"{where}.square"),
            )
        )
    names = [r.name for r in radicals]
    if len(set(names)) != len(names):
        raise ConfigError("ring.radicals: repeated name")
    return RingSection(
        sqrt_constants=sqrt_constants, params=params, radicals=tuple(radicals)
    )


def _parse_constants(raw, where: str, dimension: int, field: NumberField):
    if not isinstance(raw, list):
        raise ConfigError(f"{where}: expected a list of [i, \"jk\", value] triples")
    out = []
    seen = set()
    for t, triple in enumerate(raw):
        at = f"{where}[{t}]"
        if not isinstance(triple, list) or len(triple) != 3:
            raise ConfigError(f"{at}: expected [i, \"jk\", value]")
        i = _as_int(triple[0], f"{at}[0]", low=1, high=dimension)
        pair = _as_str(triple[1], f"{at}[1]")
        idx = _digit_indices(pair, f"{at}[1]", dimension)
        if len(idx) != 2:
            raise ConfigError(f"{at}[1]: expected exactly two indices")
        j, k = idx
        if not j < k:
            raise ConfigError(
                f"{at}[1]: indices must be increasing, got {pair!r}"
            )
        value = _as_str(triple[2], f"{at}[2]")
        parse_field_constant(field, value, f"{at}[2]")
        if (i, j, k) in seen:
            raise ConfigError(f"{at}: duplicate constant for ({i}, {j}{k})")
        seen.add((i, j, k))
        out.append((i, j, k, value))
    return tuple(out)


def _parse_representation(raw, gauge: tuple[int, ...], field: NumberField):
    if not isinstance(raw, dict) or not raw:
        raise ConfigError(
            "representation: expected an object keyed by gauge index"
        )
    entries: dict[int, tuple[tuple[str, ...], ...]] = {}
    for key, matrix in raw.items():
        where = f"representation.{key}"
        if not isinstance(key, str) or not key.isdigit():
            raise ConfigError(f"{where}: keys must be gauge indices")
        idx = int(key)
        if idx not in gauge:
            raise ConfigError(f"{where}: {idx} is not a gauge index")
        if not isinstance(matrix, list) or not matrix:
            raise ConfigError(f"{where}: expected a square matrix")
        k = len(matrix)
        rows = []
        for r, row in enumerate(matrix):
            if not isinstance(row, list) or len(row) != k:
                raise ConfigError(f"{where}[{r}]: expected {k} entries")
            cells = tuple(
                _as_str(cell, f"{where}[{r}][{c}]") for c, cell in enumerate(row)
            )
            for c, cell in enumerate(cells):
                parse_field_constant(field, cell, f"{where}[{r}][{c}]")
            rows.append(cells)
        entries[idx] = tuple(rows)
    missing = [a for a in gauge if a not in entries]
    if missing:
        raise ConfigError(
            f"representation: missing matrix for gauge index {missing[0]}"
        )
    sizes = {len(rows) for rows in entries.values()}
    if len(sizes) != 1:
        raise ConfigError("representation: matrices of different sizes")
    ordered = tuple(sorted(entries.items()))
    return ordered, sizes.pop()


def _parse_letters(raw, fiber_dim: int):
    if not isinstance(raw, dict) or not raw:
        raise ConfigError("letters: expected a nonempty object")
    out = []
    for name, spec in raw.items():
        where = f"letters.{name}"
        _as_ident(name, "letters: key")
        if spec == "builtin":
            if name not in ("a", "b"):
                raise ConfigError(
                    f"{where}: only letters a and b are builtin"
                )
            out.append((name, "builtin"))
            continue
        if not isinstance(spec, list) or len(spec) != fiber_dim:
            raise ConfigError(
                f"{where}: expected \"builtin\" or a list of {fiber_dim} "
                "component expressions"
            )
        comps = tuple(_as_str(s, f"{where}[{i}]") for i, s in enumerate(spec))
        out.append((name, comps))
    return tuple(out)


def _parse_contractions(raw, fiber_dim: int, field: NumberField):
    if not isinstance(raw, dict) or not raw:
        raise ConfigError("contractions: expected a nonempty object")
    out = []
    for name, spec in raw.items():
        where = f"contractions.{name}"
        _as_ident(name, "contractions: key")
        if spec == "builtin":
            if name not in ("dot", "det"):
                raise ConfigError(
                    f"{where}: only contractions dot and det are builtin"
                )
            out.append((name, "builtin"))
            continue
        _check_keys(spec, where, {"entries"}, {"symmetry"})
        symmetry = spec.get("symmetry", "none")
        if symmetry not in ("none", "symmetric", "antisymmetric"):
            raise ConfigError(f"{where}.symmetry: unknown value {symmetry!r}")
        raw_entries = spec["entries"]
        if not isinstance(raw_entries, list) or not raw_entries:
            raise ConfigError(f"{where}.entries: expected a nonempty list")
        entries = []
        arity = None
        seen = set()
        for i, pair in enumerate(raw_entries):
            at = f"{where}.entries[{i}]"
            if not isinstance(pair, list) or len(pair) != 2:
                raise ConfigError(f"{at}: expected [indices, value]")
            idx = _digit_indices(_as_str(pair[0], at), at, fiber_dim)
            if arity is None:
                arity = len(idx)
            elif len(idx) != arity:
                raise ConfigError(f"{at}: mixed arity")
            if idx in seen:
                raise ConfigError(f"{at}: duplicate index {pair[0]!r}")
            seen.add(idx)
            value = _as_str(pair[1], f"{at}[1]")
            parse_field_constant(field, value, f"{at}[1]")
            entries.append((idx, value))
        out.append((name, ContractionSection(symmetry, tuple(entries))))
    return tuple(out)


def _parse_laurent_bounds(x, where: str) -> tuple[int, int]:
    if not isinstance(x, list) or len(x) != 2:
        raise ConfigError(f"{where}: expected [lo, hi]")
    lo = _as_int(x[0], f"{where}[0]")
    hi = _as_int(x[1], f"{where}[1]")
    if lo > hi:
        raise ConfigError(f"{where}: lo {lo} exceeds hi {hi}")
    return lo, hi


def _parse_tasks(raw) -> tuple[TaskSpec, ...]:
    if not isinstance(raw, list):
        raise ConfigError("tasks: expected a list")
    out = []
    for i, entry in enumerate(raw):
        where = f"tasks[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{where}: expected an object")
        kind = entry.get("kind")
        if kind not in TASK_KINDS:
            raise ConfigError(
                f"{where}.kind: expected one of {', '.join(TASK_KINDS)}, "
                f"got {kind!r}"
            )
        required, optional = _TASK_FIELDS[kind]
        _check_keys(
            entry, where, required | {"kind"}, optional | {"name"}
        )
        name = entry.get("name", kind)
        if not isinstance(name, str) or not _TASK_NAME.match(name):
            raise ConfigError(f"{where}.name: invalid task name {name!r}")
        spec = TaskSpec(
            kind=kind,
            name=name,
            max_length=(
                _as_int(entry["max_length"], f"{where}.max_length", low=1)
                if "max_length" in entry
                else None
            ),
            max_degree=(
                _as_int(entry["max_degree"], f"{where}.max_degree", low=1)
                if "max_degree" in entry
                else None
            ),
            laurent_bounds=(
                _parse_laurent_bounds(
                    entry["laurent_bounds"], f"{where}.laurent_bounds"
                )
                if "laurent_bounds" in entry
                else None
            ),
            on_sphere=_as_bool(
                entry.get("on_sphere", False), f"{where}.on_sphere"
            ),
            forms=tuple(
                _as_str(s, f"{where}.forms[{j}]")
                for j, s in enumerate(entry.get("forms", []))
            ),
            lhs=_as_str(entry["lhs"], f"{where}.lhs") if "lhs" in entry else None,
            rhs=_as_str(entry["rhs"], f"{where}.rhs") if "rhs" in entry else None,
            expression=(
                _as_str(entry["expression"], f"{where}.expression")
                if "expression" in entry
                else None
            ),
            allow_triples=_as_bool(
                entry.get("allow_triples", False), f"{where}.allow_triples"
            ),
        )
        if kind == "verify_closed" and not spec.forms:
            raise ConfigError(f"{where}.forms: expected at least one expression")
        out.append(spec)
    names = [t.name for t in out]
    for name in names:
        if names.count(name) > 1:
            raise ConfigError(
                f"tasks: two tasks named {name!r}; give them distinct names"
            )
    return tuple(out)


def _base_ring(section: RingSection, fiber_dim: int) -> Ring:
    return Ring(
        RingSpec(
            field_radicands=section.sqrt_constants,
            fiber=tuple(f"a{i + 1}" for i in range(fiber_dim)),
            params=section.params,
        )
    )


def parse_config(text: str) -> ConfigDocument:
    """Validate structure and literals; raises ConfigError with a path."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"syntax error at line {e.lineno} column {e.colno}: {e.msg}"
        ) from None
    _check_keys(
        raw,
        "top level",
        {
            "ring",
            "lie_algebra",
            "splitting",
            "representation",
            "letters",
            "contractions",
            "tasks",
        },
    )
    ring = _parse_ring_section(raw["ring"])
    try:
        field = NumberField(ring.sqrt_constants)
    except ValueError as e:
        raise ConfigError(f"ring.sqrt_constants: {e}") from None

    la = raw["lie_algebra"]
    _check_keys(la, "lie_algebra", {"dimension", "constants"})
    dimension = _as_int(la["dimension"], "lie_algebra.dimension", low=1, high=9)
    constants = _parse_constants(
        la["constants"], "lie_algebra.constants", dimension, field
    )

    sp = raw["splitting"]
    _check_keys(sp, "splitting", {"horizontal", "gauge"})
    horizontal = _index_list(sp["horizontal"], "splitting.horizontal", dimension)
    gauge = _index_list(sp["gauge"], "splitting.gauge", dimension)
    both = set(horizontal) | set(gauge)
    if set(horizontal) & set(gauge):
        raise ConfigError("splitting: horizontal and gauge overlap")
    if both != set(range(1, dimension + 1)):
        raise ConfigError(
            "splitting: horizontal and gauge must partition 1.."
            f"{dimension}, got {sorted(both)}"
        )

    representation, fiber_dim = _parse_representation(
        raw["representation"], gauge, field
    )

    base = _base_ring(ring, fiber_dim)
    for i, rad in enumerate(ring.radicals):
        parse_radical_square(base, rad.square, f"ring.radicals[{i}].square")

    letters = _parse_letters(raw["letters"], fiber_dim)
    contractions = _parse_contractions(raw["contractions"], fiber_dim, field)
    tasks = _parse_tasks(raw["tasks"])

    return ConfigDocument(
        ring=ring,
        dimension=dimension,
        constants=constants,
        horizontal=horizontal,
        gauge=gauge,
        representation=representation,
        letters=letters,
        contractions=contractions,
        tasks=tasks,
        fiber_dim=fiber_dim,
    )


def load_config(path: str) -> ConfigDocument:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    return parse_config(text)


# -- realization -------------------------------------------------------------


class RealizedConfig:
    """A parsed document turned into live objects, with a dictionary cache."""

    def __init__(
        self,
        document: ConfigDocument,
        setup: HomogeneousSetup,
        letters: Mapping[str, Letter],
        contractions: Mapping[str, Contraction],
        context: ExpressionContext,
    ):
        self.document = document
        self.setup = setup
        self.letters = dict(letters)
        self.contractions = dict(contractions)
        self.context = context
        self._dictionaries: dict[int, object] = {}

    def dictionary(self, max_length: int | None = None):
        key = (
            max_length if max_length is not None else DictionaryOptions().max_length
        )
        if key not in self._dictionaries:
            self._dictionaries[key] = generate_dictionary(
                self.setup,
                list(self.letters.values()),
                list(self.contractions.values()),
                DictionaryOptions(max_length=key),
            )
        return self._dictionaries[key]


def realize_config(document: ConfigDocument) -> RealizedConfig:
    """Build the setup, letters and contractions; errors name their section.

    Raises ConfigError for anything wrong with letters, contractions or
    ring literals; lets SetupError through untouched so callers can show
    the full issue list from the structural validator.
    """
    ring = document.ring
    field = NumberField(ring.sqrt_constants)
    algebra = make_algebra(
        field,
        document.dimension,
        [
            (i, j, k, parse_field_constant(field, v, "lie_algebra.constants"))
            for i, j, k, v in document.constants
        ],
    )
    splitting = Splitting(horizontal=document.horizontal, gauge=document.gauge)
    representation = make_representation(
        field,
        {
            idx: [
                [
                    parse_field_constant(field, cell, f"representation.{idx}")
                    for cell in row
                ]
                for row in rows
            ]
            for idx, rows in document.representation
        },
    )
    base = _base_ring(ring, document.fiber_dim)
    radicals = tuple(
        RadicalSpec(
            name=rad.name,
            square=parse_radical_square(
                base, rad.square, f"ring.radicals[{i}].square"
            ),
        )
        for i, rad in enumerate(ring.radicals)
    )
    ring_spec = RingSpec(
        field_radicands=ring.sqrt_constants,
        fiber=tuple(f"a{i + 1}" for i in range(document.fiber_dim)),
        params=ring.params,
        radicals=radicals,
    )
    setup = validate_setup(algebra, splitting, representation, ring_spec)

    bare = build_context(setup)
    letters: dict[str, Letter] = {}
    for name, spec in document.letters:
        where = f"letters.{name}"
        try:
            if spec == "builtin":
                letters[name] = (
                    letter_a(setup) if name == "a" else letter_b(setup)
                )
            else:
                comps = [parse_form_expression(s, bare) for s in spec]
                letters[name] = make_letter(setup, name, comps)
        except (ExpressionError, LetterError) as e:
            raise ConfigError(f"{where}: {e}") from None

    contractions: dict[str, Contraction] = {}
    for name, spec in document.contractions:
        where = f"contractions.{name}"
        try:
            if spec == "builtin":
                contractions[name] = (
                    dot_contraction(setup)
                    if name == "dot"
                    else det_contraction(setup)
                )
            else:
                entries = {
                    tuple(i - 1 for i in idx): parse_field_constant(
                        field, value, where
                    )
                    for idx, value in spec.entries
                }
                contractions[name] = make_contraction(
                    setup, name, entries, symmetry=spec.symmetry
                )
        except LetterError as e:
            raise ConfigError(f"{where}: {e}") from None

    try:
        context = build_context(
            setup, list(letters.values()), list(contractions.values())
        )
    except ExpressionError as e:
        raise ConfigError(f"letters/contractions: {e}") from None
    return RealizedConfig(
        document=document,
        setup=setup,
        letters=letters,
        contractions=contractions,
        context=context,
    )
