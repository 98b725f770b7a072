"""Two-phase elimination producing a minimal dictionary of invariant forms.

Words are nondecreasing sequences of syllables; a syllable applies an
invariant contraction to a tuple of letters.  Phase one keeps the words
whose pointwise images at the origin are independent, phase two extends
that set at a generic point of the fiber.  Under the two-orbit-type
hypothesis (the gauge group acts transitively on fiber spheres) the two
points decide everything, and the per-bidegree cardinalities must match
the stabilizer-invariant dimension counts.

The (0,0) cell is special: beyond the empty word every rotation-invariant
function evaluates to a constant at a single point, so the first nonzero
word of bidegree (0,0) is recorded as the distinguished radial invariant
instead of joining the partition.  Coefficients in expressed combinations
are Laurent polynomials in the radial square root.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

from equiform.forms import Form, bidegree_split, evaluate_to_vector, wedge
from equiform.homogeneous import (
    HomogeneousSetup,
    exterior_derivative,
    is_invariant,
    stabilizer_of_vector,
    invariant_dimension,
)
from equiform.letters import Contraction, Letter, contract_syllable
from equiform.linalg import VectorSpan
from equiform.numberfield import FieldElement
from equiform.scalars import Point, Scalar


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class Syllable:
    """One contraction applied to a tuple of letters, with its bidegree."""

    contraction: str
    letters: tuple[str, ...]
    bidegree: tuple[int, int]

    @property
    def degree(self) -> int:
        return self.bidegree[0] + self.bidegree[1]

    def key(self):
        return (self.degree, self.contraction, self.letters)

    def render(self) -> str:
        return f"{self.contraction}({','.join(self.letters)})"


@dataclass(frozen=True)
class Word:
    """A formal product of syllables; the empty word translates to 1."""

    syllables: tuple[Syllable, ...]

    @property
    def length(self) -> int:
        return len(self.syllables)

    @property
    def bidegree(self) -> tuple[int, int]:
        p = sum(s.bidegree[0] for s in self.syllables)
        q = sum(s.bidegree[1] for s in self.syllables)
        return (p, q)

    @property
    def degree(self) -> int:
        return sum(s.degree for s in self.syllables)

    def key(self):
        return (len(self.syllables), tuple(s.key() for s in self.syllables))

    def render(self) -> str:
        if not self.syllables:
            return "1"
        return "*".join(s.render() for s in self.syllables)


class Alphabet:
    """Letters plus contractions, with the derived syllable universe."""

    def __init__(
        self,
        setup: HomogeneousSetup,
        letters: Sequence[Letter],
        contractions: Sequence[Contraction],
    ):
        self.setup = setup
        self.letters: dict[str, Letter] = {}
        for let in letters:
            if let.name in self.letters:
                raise EngineError(f"duplicate letter name {let.name}")
            self.letters[let.name] = let
        self.contractions: dict[str, Contraction] = {}
        for m in contractions:
            if m.name in self.contractions:
                raise EngineError(f"duplicate contraction name {m.name}")
            self.contractions[m.name] = m
        self._syllables: list[Syllable] | None = None
        self._syllable_forms: dict[Syllable, Form] = {}

    def syllables(self) -> list[Syllable]:
        """All syllables with nonzero translation, in the fixed total order:
        (total degree, contraction name, letter-name tuple)."""
        if self._syllables is None:
            out = []
            names = sorted(self.letters)
            for cname in sorted(self.contractions):
                m = self.contractions[cname]
                for tup in combinations_with_replacement(names, m.arity):
                    lets = tuple(self.letters[n] for n in tup)
                    form = contract_syllable(m, lets)
                    if form.is_zero:
                        continue
                    p = sum(l.bidegree[0] for l in lets)
                    q = sum(l.bidegree[1] for l in lets)
                    syll = Syllable(cname, tup, (p, q))
                    self._syllable_forms[syll] = form
                    out.append(syll)
            out.sort(key=Syllable.key)
            self._syllables = out
        return self._syllables

    def syllable_form(self, syll: Syllable) -> Form:
        if syll not in self._syllable_forms:
            m = self.contractions[syll.contraction]
            lets = tuple(self.letters[n] for n in syll.letters)
            self._syllable_forms[syll] = contract_syllable(m, lets)
        return self._syllable_forms[syll]

    def translate(self, word: Word) -> Form:
        out = self.setup.frame.one
        for s in word.syllables:
            out = wedge(out, self.syllable_form(s))
            if out.is_zero:
                return out
        return out


def translate_word(alphabet: Alphabet, word: Word) -> Form:
    """Wedge of the syllable translations, in sequence order."""
    return alphabet.translate(word)


@dataclass
class DictionaryEntry:
    word: Word
    phase: str  # "origin" or "generic"
    bidegree: tuple[int, int]
    translation: Form


@dataclass(frozen=True)
class DictionaryOptions:
    max_length: int = 8


@dataclass
class Dictionary:
    setup: HomogeneousSetup
    alphabet: Alphabet
    entries: list[DictionaryEntry]
    radial: DictionaryEntry | None
    transcript: list[tuple[str, str, str]]
    generic_point: list[FieldElement]

    def per_bidegree(self) -> dict[tuple[int, int], list[DictionaryEntry]]:
        out: dict[tuple[int, int], list[DictionaryEntry]] = {}
        for e in self.entries:
            out.setdefault(e.bidegree, []).append(e)
        return dict(sorted(out.items()))

    def counts(self) -> dict[tuple[int, int], int]:
        return {cell: len(v) for cell, v in self.per_bidegree().items()}

    def origin_entries(self) -> list[DictionaryEntry]:
        return [e for e in self.entries if e.phase == "origin"]


def _spot_points(setup: HomogeneousSetup) -> list[list[FieldElement]]:
    field = setup.field
    k = setup.fiber_dim
    z, one = field.zero, field.one
    pts = []
    for i in range(k):
        pts.append([one if j == i else z for j in range(k)])
    for i in range(k):
        for j in range(i + 1, k):
            pts.append([one if t in (i, j) else z for t in range(k)])
    pts.append([one] * k)
    pts.append([field.rational(i + 1) for i in range(k)])
    return pts


def _check_transitive_sphere(setup: HomogeneousSetup) -> int:
    """Exactly two stabilizer dimensions: at 0 and on the punctured fiber."""
    field = setup.field
    k = setup.fiber_dim
    dim0 = len(stabilizer_of_vector(setup, [field.zero] * k))
    dimv = len(stabilizer_of_vector(setup, setup.generic_point_vector()))
    if dimv >= dim0:
        raise EngineError(
            "transitive-sphere hypothesis violated: the generic stabilizer "
            "is not smaller than the full gauge algebra"
        )
    for vec in _spot_points(setup):
        d = len(stabilizer_of_vector(setup, vec))
        if d != dimv:
            raise EngineError(
                "transitive-sphere hypothesis violated: stabilizer dimension "
                f"{d} at a spot-check point differs from {dimv}"
            )
    return dimv


def _phase(
    alphabet: Alphabet,
    phase_name: str,
    point: Point,
    seeds: Sequence[DictionaryEntry],
    transcript: list,
    max_length: int,
    collect_radial: bool,
):
    setup = alphabet.setup
    span = VectorSpan(setup.field)
    new_entries: list[DictionaryEntry] = []
    radial: DictionaryEntry | None = None
    pool: dict[int, list[Word]] = {}
    pool_set: set[Word] = set()

    def admit(word: Word):
        pool.setdefault(word.length, []).append(word)
        pool_set.add(word)

    for e in seeds:
        vec = evaluate_to_vector(e.translation, point)
        if not span.add(vec):
            raise EngineError(
                f"independence inheritance failed for {e.word.render()}: "
                f"its image at the generic point is dependent"
            )
        admit(e.word)
    if not seeds:
        empty = Word(())
        entry = DictionaryEntry(empty, phase_name, (0, 0), setup.frame.one)
        vec = evaluate_to_vector(entry.translation, point)
        span.add(vec)
        new_entries.append(entry)
        admit(empty)
        transcript.append((phase_name, "1", "kept"))

    sylls = alphabet.syllables()
    l = 1
    while pool.get(l - 1):
        if l > max_length:
            raise EngineError(
                f"dictionary generation exceeded the word-length cap {max_length}"
            )
        seen: set[Word] = set()
        cands: list[Word] = []
        for w in pool.get(l - 1, []):
            last = w.syllables[-1].key() if w.syllables else None
            for s in sylls:
                if last is not None and s.key() < last:
                    continue
                cw = Word(w.syllables + (s,))
                if cw in pool_set or cw in seen:
                    continue
                seen.add(cw)
                ok = all(
                    Word(cw.syllables[:i] + cw.syllables[i + 1 :]) in pool_set
                    for i in range(l)
                )
                if ok:
                    cands.append(cw)
        cands.sort(key=Word.key)
        for cw in cands:
            p, q = cw.bidegree
            if p > setup.horizontal_dim or q > setup.fiber_dim:
                transcript.append(
                    (phase_name, cw.render(), "pruned: bidegree overflow")
                )
                continue
            form = alphabet.translate(cw)
            if form.is_zero:
                transcript.append(
                    (phase_name, cw.render(), "pruned: zero translation")
                )
                continue
            if (p, q) == (0, 0):
                if collect_radial and radial is None:
                    radial = DictionaryEntry(cw, phase_name, (0, 0), form)
                    transcript.append(
                        (phase_name, cw.render(), "radial invariant")
                    )
                else:
                    transcript.append(
                        (phase_name, cw.render(), "dependent: constant on orbits")
                    )
                continue
            vec = evaluate_to_vector(form, point)
            if not vec:
                transcript.append(
                    (phase_name, cw.render(), "dependent: evaluates to zero")
                )
                continue
            if span.add(vec):
                new_entries.append(DictionaryEntry(cw, phase_name, (p, q), form))
                admit(cw)
                transcript.append((phase_name, cw.render(), "kept"))
            else:
                transcript.append((phase_name, cw.render(), "dependent"))
        l += 1
    return new_entries, radial


def generate_dictionary(
    setup: HomogeneousSetup,
    letters: Sequence[Letter],
    contractions: Sequence[Contraction],
    options: DictionaryOptions | None = None,
) -> Dictionary:
    options = options or DictionaryOptions()
    alphabet = Alphabet(setup, letters, contractions)
    _check_transitive_sphere(setup)
    field = setup.field
    k = setup.fiber_dim
    origin_pt = setup.point([field.zero] * k)
    v = setup.generic_point_vector()
    v_pt = setup.point(v)
    transcript: list[tuple[str, str, str]] = []
    c0, _ = _phase(
        alphabet, "origin", origin_pt, [], transcript, options.max_length, False
    )
    new, radial = _phase(
        alphabet, "generic", v_pt, c0, transcript, options.max_length, True
    )
    return Dictionary(
        setup=setup,
        alphabet=alphabet,
        entries=c0 + new,
        radial=radial,
        transcript=transcript,
        generic_point=v,
    )


# -- completeness -------------------------------------------------------------


@dataclass(frozen=True)
class CompletenessCell:
    bidegree: tuple[int, int]
    span_origin: int
    target_origin: int
    span_generic: int
    target_generic: int

    @property
    def passed(self) -> bool:
        return (
            self.span_origin == self.target_origin
            and self.span_generic == self.target_generic
        )


@dataclass(frozen=True)
class CompletenessReport:
    cells: tuple[CompletenessCell, ...]
    stabilizer_dim_origin: int
    stabilizer_dim_generic: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    def cell(self, bidegree) -> CompletenessCell:
        for c in self.cells:
            if c.bidegree == tuple(bidegree):
                return c
        raise KeyError(bidegree)


def completeness_check(
    setup: HomogeneousSetup,
    dictionary: Dictionary,
    extra_group_elements: Sequence[tuple] = (),
) -> CompletenessReport:
    """Direct span of the dictionary images against the invariant dimensions
    at both stabilizers, cell by cell."""
    field = setup.field
    k = setup.fiber_dim
    stab0 = stabilizer_of_vector(setup, [field.zero] * k)
    stabv = stabilizer_of_vector(setup, dictionary.generic_point)
    origin_pt = setup.point([field.zero] * k)
    v_pt = setup.point(dictionary.generic_point)
    spans: dict[tuple[int, int], tuple[VectorSpan, VectorSpan]] = {}
    for e in dictionary.entries:
        cell = e.bidegree
        if cell not in spans:
            spans[cell] = (VectorSpan(field), VectorSpan(field))
        spans[cell][0].add(evaluate_to_vector(e.translation, origin_pt))
        spans[cell][1].add(evaluate_to_vector(e.translation, v_pt))
    cells = []
    for p in range(setup.horizontal_dim + 1):
        for q in range(k + 1):
            cell = (p, q)
            s0 = spans[cell][0].rank if cell in spans else 0
            sv = spans[cell][1].rank if cell in spans else 0
            t0 = invariant_dimension(setup, cell, stab0, extra_group_elements)
            tv = invariant_dimension(setup, cell, stabv, extra_group_elements)
            cells.append(
                CompletenessCell(
                    bidegree=cell,
                    span_origin=s0,
                    target_origin=t0,
                    span_generic=sv,
                    target_generic=tv,
                )
            )
    return CompletenessReport(
        cells=tuple(cells),
        stabilizer_dim_origin=len(stab0),
        stabilizer_dim_generic=len(stabv),
    )


# -- expressing forms over the dictionary --------------------------------------


@dataclass(frozen=True)
class CombinationTerm:
    coefficient: Scalar
    factors: tuple[Word, ...]

    def render(self) -> str:
        prod = "*".join(w.render() for w in self.factors)
        c = str(self.coefficient)
        if c == "1":
            return prod
        if c == "-1":
            return f"-{prod}"
        if "+" in c or ("-" in c and not c.startswith("-")) or "-" in c[1:]:
            return f"({c})*{prod}"
        return f"{c}*{prod}"


@dataclass(frozen=True)
class GeneratorCombination:
    terms: tuple[CombinationTerm, ...]
    residual: bool
    failed_cells: tuple[tuple[int, int], ...] = ()

    def render(self) -> str:
        if self.residual:
            inside = ", ".join(str(c) for c in self.failed_cells)
            return f"<no expression within bounds; failing cells {inside}>"
        if not self.terms:
            return "0"
        parts = []
        for t in self.terms:
            r = t.render()
            if parts and not r.startswith("-"):
                parts.append("+" + r)
            else:
                parts.append(r)
        return "".join(parts)

    def as_form(self, dictionary: Dictionary) -> Form:
        """Re-assemble the combination into a Form (for cross-checking)."""
        out = dictionary.setup.frame.zero
        for t in self.terms:
            prod = dictionary.setup.frame.one
            for w in t.factors:
                prod = wedge(prod, dictionary.alphabet.translate(w))
            out = out + t.coefficient * prod
        return out


def _form_to_vector(x: Form) -> dict:
    vec = {}
    for mask, sc in x.terms.items():
        for mono, c in sc.coeffs.items():
            vec[(mask, mono)] = c
    return vec


def _radial_powers(setup: HomogeneousSetup, lo: int, hi: int):
    """Available powers of the radial invariant: s^e when the ring declares
    a radical with square |a|^2, else even powers of |a|^2 with e >= 0."""
    ring = setup.ring
    aa_mono = None
    radial_name = None
    # the polynomial sum a_i^2 over internal-width monomials
    aa = ring.zero
    for i in range(setup.fiber_dim):
        v = ring.var(f"a{i + 1}")
        aa = aa + v * v
    for j, name in enumerate(ring.radical_names):
        if ring.radical_squares[j] == aa.coeffs:
            radial_name = name
            break
    powers = []
    if radial_name is not None:
        s = ring.var(radial_name)
        for e in range(lo, hi + 1):
            powers.append((e, s**e))
    else:
        for e in range(max(lo, 0), hi + 1):
            if e % 2 == 0:
                powers.append((e, aa ** (e // 2)))
    return powers


def express_in_generators(
    setup: HomogeneousSetup,
    dictionary: Dictionary,
    target: Form,
    degree_bounds: tuple[int, int] = (4, -2),
    allow_triples: bool = False,
) -> GeneratorCombination:
    """Solve target = sum of Laurent-in-s coefficients times generator
    products, exactly, preferring single generators over products."""
    if not is_invariant(setup, target):
        raise EngineError("target is not an invariant basic form")
    hi, lo = degree_bounds
    if lo > hi:
        raise EngineError(f"empty Laurent window ({hi}, {lo})")
    powers = _radial_powers(setup, lo, hi)
    entries = dictionary.entries
    positive = [
        (i, e) for i, e in enumerate(entries) if e.word.length > 0
    ]
    field = setup.field
    terms: list[CombinationTerm] = []
    residual = False
    failed: list[tuple[int, int]] = []
    for cell, part in sorted(bidegree_split(target).items()):
        candidates: list[tuple[tuple[int, ...], Form]] = []
        for i, e in enumerate(entries):
            if e.bidegree == cell:
                candidates.append(((i,), e.translation))
        for ai, (i, ei) in enumerate(positive):
            for j, ej in positive[ai:]:
                bp = ei.bidegree[0] + ej.bidegree[0]
                bq = ei.bidegree[1] + ej.bidegree[1]
                if (bp, bq) != cell:
                    continue
                prod = wedge(ei.translation, ej.translation)
                if not prod.is_zero:
                    candidates.append(((i, j), prod))
        if allow_triples:
            n = len(positive)
            for ai in range(n):
                i, ei = positive[ai]
                for aj in range(ai, n):
                    j, ej = positive[aj]
                    for ak in range(aj, n):
                        t, et = positive[ak]
                        bp = ei.bidegree[0] + ej.bidegree[0] + et.bidegree[0]
                        bq = ei.bidegree[1] + ej.bidegree[1] + et.bidegree[1]
                        if (bp, bq) != cell:
                            continue
                        prod = wedge(wedge(ei.translation, ej.translation), et.translation)
                        if not prod.is_zero:
                            candidates.append(((i, j, t), prod))
        span = VectorSpan(field, track=True)
        for tag, form in candidates:
            for ex, sc in powers:
                col = sc * form
                if col.is_zero:
                    continue
                span.add(_form_to_vector(col), (tag, ex))
        combo = span.combination(_form_to_vector(part))
        if combo is None:
            residual = True
            failed.append(cell)
            continue
        grouped: dict[tuple[int, ...], Scalar] = {}
        for (tag, ex), c in combo.items():
            sc = grouped.get(tag, setup.ring.zero)
            power = next(p for e2, p in powers if e2 == ex)
            grouped[tag] = sc + c * power
        for tag in sorted(grouped, key=lambda t: (len(t), t)):
            coeff = grouped[tag]
            if coeff.is_zero:
                continue
            words = tuple(entries[i].word for i in tag)
            terms.append(CombinationTerm(coefficient=coeff, factors=words))
    return GeneratorCombination(
        terms=tuple(terms), residual=residual, failed_cells=tuple(failed)
    )


# -- the differential table -----------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    kind: str  # "radial" or "generator"
    word: Word
    differential: GeneratorCombination

    def render(self) -> str:
        return f"d({self.word.render()}) = {self.differential.render()}"


def differential_table(
    setup: HomogeneousSetup,
    dictionary: Dictionary,
    max_degree: int,
    degree_bounds: tuple[int, int] = (4, -2),
    allow_triples: bool = False,
) -> list[TableRow]:
    """d of the radial invariant and of every generator of total degree up
    to max_degree, expressed over the dictionary."""
    rows: list[TableRow] = []
    jobs: list[tuple[str, Word, Form]] = []
    if dictionary.radial is not None:
        jobs.append(("radial", dictionary.radial.word, dictionary.radial.translation))
    for e in dictionary.entries:
        if 1 <= e.word.degree <= max_degree:
            jobs.append(("generator", e.word, e.translation))
    for kind, word, translation in jobs:
        d = exterior_derivative(setup, translation)
        comb = express_in_generators(
            setup, dictionary, d, degree_bounds, allow_triples
        )
        if comb.residual:
            raise EngineError(
                f"differential of {word.render()} has no expression over the "
                f"dictionary within bounds {degree_bounds}"
            )
        rows.append(TableRow(kind=kind, word=word, differential=comb))
    return rows
