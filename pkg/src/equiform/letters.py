"""Letters and contractions: the alphabet for invariant-form words.

A letter is a V-valued form on the bundle, given by its k component forms
in the basic frame.  The components must be basic and jointly equivariant,
so that contracting r letters with an invariant r-tensor on V produces an
invariant form.  The canonical letters are the fiber coordinates (a) and
the covariant vertical frame (b); constant horizontal letters and letters
induced by equivariant bilinear maps cover the rest of the examples.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

from equiform.forms import Form, bidegree_split, wedge
from equiform.homogeneous import (
    HomogeneousSetup,
    gauge_variation,
    is_basic,
    raw_derivative,
    raw_to_vertical,
    vertical_to_raw,
)
from equiform.numberfield import FieldElement


class LetterError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Letter:
    """A named V-valued invariant form, one component per fiber index."""

    name: str
    bidegree: tuple[int, int]
    components: tuple[Form, ...]

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    @property
    def total_degree(self) -> int:
        return self.bidegree[0] + self.bidegree[1]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Letter)
            and self.name == other.name
            and self.bidegree == other.bidegree
            and self.components == other.components
        )

    def __repr__(self) -> str:
        return f"Letter({self.name}, bidegree={self.bidegree})"


@dataclass(frozen=True, eq=False)
class Contraction:
    """An invariant r-linear functional on V, stored sparsely."""

    name: str
    arity: int
    entries: tuple[tuple[tuple[int, ...], FieldElement], ...]
    symmetry: str = "none"

    def coefficient_map(self) -> dict[tuple[int, ...], FieldElement]:
        return dict(self.entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Contraction)
            and self.name == other.name
            and self.arity == other.arity
            and self.entries == other.entries
        )

    def __repr__(self) -> str:
        return f"Contraction({self.name}, arity={self.arity})"


def _component_bidegree(components: Sequence[Form]) -> tuple[int, int]:
    found: set[tuple[int, int]] = set()
    for c in components:
        if c.is_zero:
            continue
        parts = bidegree_split(c)
        found.update(parts.keys())
    if len(found) > 1:
        raise LetterError(
            f"letter components are not bidegree homogeneous: {sorted(found)}"
        )
    return found.pop() if found else (0, 0)


def make_letter(
    setup: HomogeneousSetup, name: str, components: Sequence[Form]
) -> Letter:
    """Validate basicness, homogeneity and joint equivariance, then wrap."""
    comps = tuple(components)
    if len(comps) != setup.fiber_dim:
        raise LetterError(
            f"letter {name} needs {setup.fiber_dim} components, got {len(comps)}"
        )
    for i, c in enumerate(comps):
        if c.frame is not setup.frame:
            raise LetterError(f"component {i + 1} of {name} uses a foreign frame")
        if not is_basic(setup, c):
            raise LetterError(f"component {i + 1} of {name} is not basic")
    bidegree = _component_bidegree(comps)
    for a in setup.splitting.gauge:
        rho_a = setup.rho(a)
        for i in range(setup.fiber_dim):
            resid = gauge_variation(setup, a, comps[i])
            for j in range(setup.fiber_dim):
                c = rho_a[i][j]
                if not c.is_zero:
                    resid = resid + c * comps[j]
            if not resid.is_zero:
                raise LetterError(f"letter {name} is not equivariant along e{a}")
    return Letter(name=name, bidegree=bidegree, components=comps)


def letter_a(setup: HomogeneousSetup) -> Letter:
    comps = tuple(
        setup.frame.scalar_form(setup.ring.var(f"a{i + 1}"))
        for i in range(setup.fiber_dim)
    )
    return make_letter(setup, "a", comps)


def letter_b(setup: HomogeneousSetup) -> Letter:
    comps = tuple(
        setup.frame.generator(f"b{i + 1}") for i in range(setup.fiber_dim)
    )
    return make_letter(setup, "b", comps)


def _check_constant_horizontal(name: str, setup: HomogeneousSetup, form: Form):
    hor = setup.frame.horizontal_mask
    for mask, c in form.terms.items():
        if mask & ~hor:
            raise LetterError(
                f"letter {name}: components must be purely horizontal"
            )
        if not c.is_constant:
            raise LetterError(
                f"letter {name}: components must have constant coefficients"
            )


def letter_from_T_valued_map(
    setup: HomogeneousSetup, name: str, components: Sequence[Form]
) -> Letter:
    """A letter whose components are constant horizontal forms."""
    for c in components:
        _check_constant_horizontal(name, setup, c)
    return make_letter(setup, name, components)


def letter_from_bilinear_map(
    setup: HomogeneousSetup, name: str, psi: Sequence[Sequence[Form]]
) -> Letter:
    """The letter with components sum_j a_j psi[j][i], for an equivariant
    map psi from V x V to horizontal forms given entrywise."""
    k = setup.fiber_dim
    if len(psi) != k or any(len(row) != k for row in psi):
        raise LetterError(f"letter {name}: psi must be a {k} by {k} form array")
    for row in psi:
        for f in row:
            _check_constant_horizontal(name, setup, f)
    comps = []
    for i in range(k):
        acc = setup.frame.zero
        for j in range(k):
            acc = acc + setup.ring.var(f"a{j + 1}") * psi[j][i]
        comps.append(acc)
    return make_letter(setup, name, comps)


def make_contraction(
    setup: HomogeneousSetup,
    name: str,
    entries: Mapping[tuple[int, ...], object],
    symmetry: str = "none",
) -> Contraction:
    """Validate invariance of the coefficient tensor and wrap it."""
    field = setup.field
    k = setup.fiber_dim
    clean: dict[tuple[int, ...], FieldElement] = {}
    arity = None
    for idx, c in entries.items():
        idx = tuple(idx)
        if arity is None:
            arity = len(idx)
        elif len(idx) != arity:
            raise LetterError(f"contraction {name}: mixed index arity")
        if any(not 0 <= i < k for i in idx):
            raise LetterError(f"contraction {name}: index {idx} out of range")
        ce = c if isinstance(c, FieldElement) else field.rational(Fraction(c))
        if not ce.is_zero:
            clean[idx] = ce
    if arity is None or not clean:
        raise LetterError(f"contraction {name} is identically zero")
    # infinitesimal invariance: sum over slots of the rho-twisted tensor
    for a in setup.splitting.gauge:
        rho_a = setup.rho(a)
        resid: dict[tuple[int, ...], FieldElement] = {}
        for idx, c in clean.items():
            for slot in range(arity):
                # entry contributes c * rho[idx[slot]][t] to index with t in slot
                for t in range(k):
                    r = rho_a[idx[slot]][t]
                    if r.is_zero:
                        continue
                    tgt = idx[:slot] + (t,) + idx[slot + 1 :]
                    s = resid.get(tgt, field.zero) + c * r
                    if s.is_zero:
                        resid.pop(tgt, None)
                    else:
                        resid[tgt] = s
        if resid:
            raise LetterError(f"contraction {name} is not invariant along e{a}")
    ordered = tuple(sorted(clean.items(), key=lambda kv: kv[0]))
    return Contraction(name=name, arity=arity, entries=ordered, symmetry=symmetry)


def dot_contraction(setup: HomogeneousSetup) -> Contraction:
    """The euclidean pairing on V."""
    one = setup.field.one
    entries = {(i, i): one for i in range(setup.fiber_dim)}
    return make_contraction(setup, "dot", entries, symmetry="symmetric")


def det_contraction(setup: HomogeneousSetup) -> Contraction:
    """The volume form on V as a fully antisymmetric arity-k tensor."""
    field = setup.field
    k = setup.fiber_dim
    entries: dict[tuple[int, ...], FieldElement] = {}
    for perm in permutations(range(k)):
        inv = sum(
            1
            for i in range(k)
            for j in range(i + 1, k)
            if perm[i] > perm[j]
        )
        entries[perm] = -field.one if inv % 2 else field.one
    return make_contraction(setup, "det", entries, symmetry="antisymmetric")


def contract_syllable(m: Contraction, letters: Sequence[Letter]) -> Form:
    """Wedge the letter components against the coefficient tensor."""
    if len(letters) != m.arity:
        raise LetterError(
            f"contraction {m.name} has arity {m.arity}, got {len(letters)} letters"
        )
    frame = letters[0].components[0].frame
    out = frame.zero
    for idx, c in m.entries:
        term = None
        for slot, i in enumerate(idx):
            comp = letters[slot].components[i]
            if comp.is_zero:
                term = None
                break
            term = comp if term is None else wedge(term, comp)
        if term is not None:
            out = out + c * term
    return out


def covariant_derivative_DX(setup: HomogeneousSetup, letter: Letter) -> Letter:
    """Componentwise exterior derivative plus the representation twist.

    Computed over the raw frame: pull each component back, differentiate,
    add rho(connection) wedge the components, push back to the basic frame.
    """
    k = setup.fiber_dim
    raws = [vertical_to_raw(setup, c) for c in letter.components]
    out = []
    for i in range(k):
        total = raw_derivative(setup, raws[i])
        for a in setup.splitting.gauge:
            rho_a = setup.rho(a)
            ea = setup.frame.generator(f"e{a}")
            for j in range(k):
                c = rho_a[i][j]
                if not c.is_zero:
                    total = total + c * wedge(ea, raws[j])
        basic = raw_to_vertical(setup, total)
        if any(mask & setup.frame.gauge_mask for mask in basic.terms):
            raise LetterError(
                f"covariant derivative of {letter.name} is not basic; "
                f"component {i + 1} kept gauge terms"
            )
        out.append(basic)
    return make_letter(setup, f"DX({letter.name})", out)
