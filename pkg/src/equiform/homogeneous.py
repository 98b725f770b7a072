"""Homogeneous-space setup: validation, vertical frame, exterior derivative.

The input data is a Lie algebra with structure constants in Maurer-Cartan
form (d e^i = sum_{j<k} c^i_jk e^j e^k, equivalently [e_j, e_k] =
-sum_i c^i_jk e_i), a reductive splitting of the index set into a horizontal
part T and a gauge subalgebra, and a skew representation of the gauge part
on the fiber V.

All forms live on one extended frame per setup: horizontal e^i, covariant
vertical b_i, gauge e^A and raw fiber differentials da_i, in that order.
Basic forms use only the first two kinds.  The exterior derivative pulls a
basic form back to the raw frame, differentiates there (structure constants
on e^i, nothing on da_i, scalar derivatives on coefficients), and rewrites
the fiber differentials back through b_i = da_i + (rho_A)_ij a_j e^A.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from equiform.forms import Form, Frame, FrameSpec, bits, wedge
from equiform.linalg import matrix_rank, nullspace_basis
from equiform.numberfield import FieldElement, NumberField
from equiform.scalars import Point, Ring, RingSpec, Scalar


class SetupError(ValueError):
    """Raised when the homogeneous data violates a structural axiom."""

    def __init__(self, issues: Sequence[str]):
        self.issues = list(issues)
        super().__init__("; ".join(self.issues))


@dataclass(frozen=True)
class LieAlgebraData:
    """Structure constants c^i_jk (j < k) of d e^i, entries in the field."""

    dimension: int
    constants: tuple[tuple[int, int, int, FieldElement], ...]

    def table(self) -> dict[int, dict[tuple[int, int], FieldElement]]:
        out: dict[int, dict[tuple[int, int], FieldElement]] = {}
        for i, j, k, c in self.constants:
            out.setdefault(i, {})[(j, k)] = c
        return out


@dataclass(frozen=True)
class Splitting:
    """1-based algebra indices of the horizontal part T and the gauge part."""

    horizontal: tuple[int, ...]
    gauge: tuple[int, ...]


@dataclass(frozen=True)
class Representation:
    """Fiber matrices rho(E_A) for each gauge index A, column convention:
    entry [i][j] is the v_i coefficient of rho(E_A) v_j."""

    matrices: tuple[tuple[int, tuple[tuple[FieldElement, ...], ...]], ...]

    def matrix(self, a: int):
        for idx, m in self.matrices:
            if idx == a:
                return m
        raise KeyError(f"no representation matrix for gauge index {a}")

    @property
    def fiber_dimension(self) -> int:
        return len(self.matrices[0][1])


def make_algebra(
    field: NumberField, dimension: int, triples: Iterable[tuple]
) -> LieAlgebraData:
    """Convenience constructor from (i, j, k, coefficient) with j < k."""
    consts = []
    seen = set()
    for i, j, k, c in triples:
        if not (1 <= i <= dimension and 1 <= j < k <= dimension):
            raise SetupError([f"structure constant index ({i},{j},{k}) out of range"])
        if (i, j, k) in seen:
            raise SetupError([f"duplicate structure constant for ({i},{j},{k})"])
        seen.add((i, j, k))
        ce = c if isinstance(c, FieldElement) else field.rational(Fraction(c))
        if ce.field != field:
            raise SetupError(["structure constant from a different field"])
        if not ce.is_zero:
            consts.append((i, j, k, ce))
    return LieAlgebraData(dimension=dimension, constants=tuple(consts))


def make_representation(
    field: NumberField, entries: Mapping[int, Sequence[Sequence]]
) -> Representation:
    mats = []
    for a in sorted(entries):
        rows = []
        for row in entries[a]:
            rows.append(
                tuple(
                    c if isinstance(c, FieldElement) else field.rational(Fraction(c))
                    for c in row
                )
            )
        mats.append((a, tuple(rows)))
    return Representation(matrices=tuple(mats))


# -- small exact matrix helpers ----------------------------------------------


def _mat_mul(field, m1, m2):
    n = len(m1)
    p = len(m2[0])
    return tuple(
        tuple(
            sum((m1[i][t] * m2[t][j] for t in range(len(m2))), field.zero)
            for j in range(p)
        )
        for i in range(n)
    )


def _mat_sub(m1, m2):
    return tuple(
        tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(m1, m2)
    )


def _mat_scale(c, m):
    return tuple(tuple(c * x for x in row) for row in m)


def _mat_add(m1, m2):
    return tuple(
        tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(m1, m2)
    )


def _mat_transpose(m):
    return tuple(tuple(row[i] for row in m) for i in range(len(m[0])))


def _mat_is_zero(m) -> bool:
    return all(x.is_zero for row in m for x in row)


def _identity(field, n):
    return tuple(
        tuple(field.one if i == j else field.zero for j in range(n))
        for i in range(n)
    )


def _minor_det(field, m, rows, cols):
    """Determinant of the submatrix m[rows][cols] (index tuples)."""
    if not rows:
        return field.one
    total = field.zero
    r0 = rows[0]
    sign = 1
    for pos, c in enumerate(cols):
        entry = m[r0][c]
        if not entry.is_zero:
            sub = _minor_det(field, m, rows[1:], cols[:pos] + cols[pos + 1 :])
            term = entry * sub
            total = total + (term if sign > 0 else -term)
        sign = -sign
    return total


class HomogeneousSetup:
    """Validated bundle data with its ring, frame and derived structures.

    Immutable after construction; create via validate_setup.
    """

    def __init__(
        self,
        algebra: LieAlgebraData,
        splitting: Splitting,
        representation: Representation,
        ring: Ring,
        frame: Frame,
        *,
        ad_matrices: dict,
        b_convention: str,
        warnings: list[str],
    ):
        self.algebra = algebra
        self.splitting = splitting
        self.representation = representation
        self.ring = ring
        self.frame = frame
        self.field = ring.field
        self.fiber_dim = representation.fiber_dimension
        self.horizontal_dim = len(splitting.horizontal)
        self.ad_matrices = ad_matrices  # gauge index -> full n x n ad matrix
        self.b_convention = b_convention
        self.warnings = list(warnings)
        self._ctable = algebra.table()
        # frame positions
        self._pos_e = {}  # algebra index -> frame position
        for i in splitting.horizontal + splitting.gauge:
            self._pos_e[i] = frame.index[f"e{i}"]
        self._pos_b = [frame.index[f"b{i}"] for i in range(1, self.fiber_dim + 1)]
        self._pos_da = [frame.index[f"da{i}"] for i in range(1, self.fiber_dim + 1)]
        self._avars = [ring.var(f"a{i}") for i in range(1, self.fiber_dim + 1)]
        self._structure_2form: dict[int, Form] = {}
        self._b_forms: list[Form] | None = None

    # -- coefficients and matrices ---------------------------------------

    def c_signed(self, i: int, j: int, k: int) -> FieldElement:
        """c^i_jk extended antisymmetrically in (j, k)."""
        if j == k:
            return self.field.zero
        if j < k:
            return self._ctable.get(i, {}).get((j, k), self.field.zero)
        return -self._ctable.get(i, {}).get((k, j), self.field.zero)

    def rho(self, a: int):
        return self.representation.matrix(a)

    def rho_apply(self, a: int, vec: Sequence) -> list:
        """rho(E_a) applied to a fiber vector (entries Scalar or field)."""
        m = self.rho(a)
        out = []
        for i in range(self.fiber_dim):
            acc = None
            for j in range(self.fiber_dim):
                c = m[i][j]
                if c.is_zero:
                    continue
                term = c * vec[j]
                acc = term if acc is None else acc + term
            if acc is None:
                acc = (
                    self.ring.zero
                    if isinstance(vec[0], Scalar)
                    else self.field.zero
                )
            out.append(acc)
        return out

    def ad_on_horizontal(self, a: int):
        """ad(E_a) restricted to T, entries over horizontal index order."""
        hor = self.splitting.horizontal
        full = self.ad_matrices[a]
        return tuple(
            tuple(full[self._alg_order(i)][self._alg_order(k)] for k in hor)
            for i in hor
        )

    def _alg_order(self, i: int) -> int:
        return i - 1

    # -- structure forms ---------------------------------------------------

    def structure_derivative(self, algebra_index: int) -> Form:
        """d e^i as a 2-form over the extended frame."""
        if algebra_index not in self._structure_2form:
            terms: dict[int, Scalar] = {}
            for (j, k), c in self._ctable.get(algebra_index, {}).items():
                mask = (1 << self._pos_e[j]) | (1 << self._pos_e[k])
                sign = 1 if self._pos_e[j] < self._pos_e[k] else -1
                s = self.ring.constant(c if sign > 0 else -c)
                prev = terms.get(mask)
                s = s if prev is None else prev + s
                if s.is_zero:
                    terms.pop(mask, None)
                else:
                    terms[mask] = s
            self._structure_2form[algebra_index] = Form(self.frame, terms)
        return self._structure_2form[algebra_index]

    def b_forms(self) -> list[Form]:
        """The covariant vertical frame in the raw extended frame."""
        if self._b_forms is None:
            out = []
            for i in range(self.fiber_dim):
                f = self.frame.generator(f"da{i + 1}")
                for a in self.splitting.gauge:
                    m = self.rho(a)
                    coeff = self.ring.zero
                    for j in range(self.fiber_dim):
                        if not m[i][j].is_zero:
                            coeff = coeff + m[i][j] * self._avars[j]
                    if not coeff.is_zero:
                        f = f + coeff * self.frame.generator(f"e{a}")
                out.append(f)
            self._b_forms = out
        return self._b_forms

    def generic_point_vector(self) -> list[FieldElement]:
        v = [self.field.zero] * self.fiber_dim
        v[0] = self.field.one
        return v

    def point(self, fiber_values: Sequence, params: Mapping[str, object] | None = None):
        values = {
            f"a{i + 1}": v for i, v in enumerate(fiber_values)
        }
        if params:
            values.update(params)
        for p in self.ring.params:
            values.setdefault(p, 1)
        return Point(self.ring, values)

    def __repr__(self) -> str:
        return (
            f"HomogeneousSetup(n={self.algebra.dimension}, "
            f"T={self.splitting.horizontal}, gauge={self.splitting.gauge}, "
            f"fiber={self.fiber_dim})"
        )


def validate_setup(
    algebra: LieAlgebraData,
    splitting: Splitting,
    representation: Representation,
    ring_spec: RingSpec | None = None,
) -> HomogeneousSetup:
    """Check every structural axiom and assemble the setup.

    The ring spec, when given, must either leave the fiber empty (it is
    filled with a1..ak) or declare exactly the fiber the representation acts
    on.  Raises SetupError listing all violated axioms.
    """
    issues: list[str] = []
    warnings: list[str] = []
    n = algebra.dimension
    # splitting partitions 1..n
    declared = sorted(splitting.horizontal + splitting.gauge)
    if declared != list(range(1, n + 1)):
        issues.append(
            f"splitting must partition 1..{n}, got T={splitting.horizontal} "
            f"and gauge={splitting.gauge}"
        )
        raise SetupError(issues)
    k = representation.fiber_dimension
    rep_indices = tuple(idx for idx, _ in representation.matrices)
    if sorted(rep_indices) != sorted(splitting.gauge):
        issues.append(
            f"representation matrices must cover the gauge indices "
            f"{splitting.gauge}, got {rep_indices}"
        )
        raise SetupError(issues)

    # coefficient ring
    fiber = tuple(f"a{i}" for i in range(1, k + 1))
    if ring_spec is None:
        # reuse the field the constants live in
        field0 = algebra.constants[0][3].field if algebra.constants else NumberField()
        ring_spec = RingSpec(field_radicands=field0.radicands, fiber=fiber)
    elif not ring_spec.fiber:
        ring_spec = RingSpec(
            field_radicands=ring_spec.field_radicands,
            fiber=fiber,
            params=ring_spec.params,
            radicals=ring_spec.radicals,
            radical_depth=ring_spec.radical_depth,
        )
    elif tuple(ring_spec.fiber) != fiber:
        issues.append(
            f"ring fiber variables must be {fiber} to match the representation"
        )
        raise SetupError(issues)
    ring = Ring(ring_spec)
    field = ring.field

    # coerce/validate constant entries against the ring's field
    for i, j, kk, c in algebra.constants:
        if c.field != field:
            issues.append("structure constants must live in the declared field")
            raise SetupError(issues)

    # frame: horizontal, vertical, gauge, raw
    gens = [(f"e{i}", "horizontal") for i in splitting.horizontal]
    gens += [(f"b{i}", "vertical") for i in range(1, k + 1)]
    gens += [(f"e{i}", "gauge") for i in splitting.gauge]
    gens += [(f"da{i}", "raw_vertical") for i in range(1, k + 1)]
    frame = Frame(ring, FrameSpec(generators=tuple(gens)))

    ctable = algebra.table()

    def c_signed(i, j, kk):
        if j == kk:
            return field.zero
        if j < kk:
            return ctable.get(i, {}).get((j, kk), field.zero)
        return -ctable.get(i, {}).get((kk, j), field.zero)

    # Jacobi: d(d e^i) = 0 with d e^i from the constants
    pos = {i: frame.index[f"e{i}"] for i in range(1, n + 1)}
    struct = {}
    for i in range(1, n + 1):
        terms: dict[int, Scalar] = {}
        for (j, kk), c in ctable.get(i, {}).items():
            mask = (1 << pos[j]) | (1 << pos[kk])
            sign = 1 if pos[j] < pos[kk] else -1
            val = ring.constant(c if sign > 0 else -c)
            prev = terms.get(mask)
            val = val if prev is None else prev + val
            if val.is_zero:
                terms.pop(mask, None)
            else:
                terms[mask] = val
        struct[i] = Form(frame, terms)

    for i in range(1, n + 1):
        dd = frame.zero
        for mask, c in struct[i].terms.items():
            gen_positions = list(bits(mask))
            for posn, g in enumerate(gen_positions):
                alg_idx = next(
                    idx for idx, p in pos.items() if p == g
                )
                rest = mask ^ (1 << g)
                contrib = c * wedge(struct[alg_idx], Form(frame, {rest: ring.one}))
                if posn % 2:
                    contrib = -contrib
                dd = dd + contrib
        if not dd.is_zero:
            issues.append(f"Jacobi identity fails: d(d e^{i}) != 0")

    # gauge part closed under bracket; reductivity
    for a in splitting.gauge:
        for b in splitting.gauge:
            if a >= b:
                continue
            for t in splitting.horizontal:
                if not c_signed(t, a, b).is_zero:
                    issues.append(
                        f"gauge indices are not a subalgebra: "
                        f"[e{a}, e{b}] has a horizontal component e{t}"
                    )
    for a in splitting.gauge:
        for t in splitting.horizontal:
            for g in splitting.gauge:
                if not c_signed(g, a, t).is_zero:
                    issues.append(
                        f"splitting is not reductive: [e{a}, e{t}] has a "
                        f"gauge component e{g}"
                    )

    # representation checks
    for a in splitting.gauge:
        m = representation.matrix(a)
        if len(m) != k or any(len(row) != k for row in m):
            issues.append(f"representation matrix for e{a} is not {k}x{k}")
            raise SetupError(issues)
        if not _mat_is_zero(_mat_add(m, _mat_transpose(m))):
            issues.append(f"representation not orthogonal: rho(e{a}) is not skew")
    for a in splitting.gauge:
        for b in splitting.gauge:
            if a >= b:
                continue
            ma, mb = representation.matrix(a), representation.matrix(b)
            comm = _mat_sub(_mat_mul(field, ma, mb), _mat_mul(field, mb, ma))
            # [e_a, e_b] = -sum_g c^g_ab e_g
            expect = _mat_scale(field.zero, ma)
            for g in splitting.gauge:
                c = c_signed(g, a, b)
                if not c.is_zero:
                    expect = _mat_add(expect, _mat_scale(-c, representation.matrix(g)))
            if not _mat_is_zero(_mat_sub(comm, expect)):
                issues.append(
                    f"representation not a homomorphism on [e{a}, e{b}]"
                )

    # derived adjoint matrices: ad(E_a)[i][k] = -c^i_ak (0-based storage)
    ad_matrices = {}
    for a in splitting.gauge:
        ad_matrices[a] = tuple(
            tuple(-c_signed(i, a, kk) for kk in range(1, n + 1))
            for i in range(1, n + 1)
        )
    # the T-restriction should be skew for an orthonormal horizontal basis
    for a in splitting.gauge:
        hor = splitting.horizontal
        sub = tuple(
            tuple(ad_matrices[a][i - 1][j - 1] for j in hor) for i in hor
        )
        if not _mat_is_zero(_mat_add(sub, _mat_transpose(sub))):
            warnings.append(
                f"ad(e{a})|T is not skew; the declared horizontal basis is "
                f"not orthonormal for an invariant metric"
            )

    if issues:
        raise SetupError(issues)

    # fix the b-index convention operationally: the contraction test below
    # must produce zero for every fundamental field
    convention = None
    for name, pick in (("row", lambda m: m), ("column", _mat_transpose)):
        ok = True
        for a in splitting.gauge:
            rho_a = representation.matrix(a)
            for i in range(k):
                # iota_Y(da_i) + iota_Y(twist) = -(rho_a v)_i + (M_a v)_i
                for j in range(k):
                    if not (pick(rho_a)[i][j] - rho_a[i][j]).is_zero:
                        ok = False
        if ok:
            convention = name if convention is None else "both"
    if convention is None:
        raise SetupError(
            ["no index convention for b_i satisfies the basicness condition"]
        )
    if convention == "both":
        convention = "row"

    setup = HomogeneousSetup(
        algebra,
        splitting,
        representation,
        ring,
        frame,
        ad_matrices=ad_matrices,
        b_convention=convention,
        warnings=warnings,
    )
    # condition (2), verified honestly on the assembled frame
    for a in splitting.gauge:
        for i, b in enumerate(setup.b_forms()):
            if not fundamental_contraction(setup, a, b).is_zero:
                raise SetupError(
                    [f"fundamental contraction of b{i + 1} along e{a} is nonzero"]
                )
    return setup


def build_vertical_frame(setup: HomogeneousSetup) -> list[Form]:
    """The forms b_1..b_k over the raw extended frame."""
    return list(setup.b_forms())


# -- derivations over the extended frame ---------------------------------


def _substitute_generator(x: Form, gen_pos: int, replacement: Form) -> Form:
    bit = 1 << gen_pos
    out = x.frame.zero
    untouched: dict[int, Scalar] = {}
    for mask, c in x.terms.items():
        if not mask & bit:
            untouched[mask] = c
            continue
        below = mask & (bit - 1)
        sign = -1 if below.bit_count() & 1 else 1
        rest = Form(x.frame, {mask ^ bit: c if sign > 0 else -c})
        out = out + wedge(replacement, rest)
    return out + Form(x.frame, untouched)


def _antiderivation(x: Form, coeff_rule, gen_images: dict[int, Form]) -> Form:
    """Apply an odd derivation: coeff_rule(c) is a Form, gen_images maps
    frame positions to the image form of that generator."""
    out = x.frame.zero
    for mask, c in x.terms.items():
        word = Form(x.frame, {mask: x.ring.one})
        dc = coeff_rule(c)
        if dc is not None and not dc.is_zero:
            out = out + wedge(dc, word)
        for posn, g in enumerate(bits(mask)):
            img = gen_images.get(g)
            if img is None or img.is_zero:
                continue
            rest = Form(x.frame, {mask ^ (1 << g): c})
            contrib = wedge(img, rest)
            if posn % 2:
                contrib = -contrib
            out = out + contrib
    return out


def _derivation(x: Form, coeff_rule, gen_images: dict[int, Form]) -> Form:
    """Apply an even derivation (degree 0): no position signs."""
    out = x.frame.zero
    for mask, c in x.terms.items():
        word = Form(x.frame, {mask: x.ring.one})
        dc = coeff_rule(c)
        if dc is not None and not dc.is_zero:
            out = out + wedge(dc, word)
        for g in bits(mask):
            img = gen_images.get(g)
            if img is None or img.is_zero:
                continue
            below = mask & ((1 << g) - 1)
            sign = -1 if below.bit_count() & 1 else 1
            rest = Form(x.frame, {mask ^ (1 << g): c if sign > 0 else -c})
            out = out + wedge(img, rest)
    return out


def vertical_to_raw(setup: HomogeneousSetup, x: Form) -> Form:
    """Rewrite every b_i through da_i plus the connection twist."""
    for i, b in enumerate(setup.b_forms()):
        pos = setup._pos_b[i]
        if any(mask >> pos & 1 for mask in x.terms):
            x = _substitute_generator(x, pos, b)
    return x


def raw_to_vertical(setup: HomogeneousSetup, x: Form) -> Form:
    """Rewrite every da_i back through b_i minus the twist."""
    for i in range(setup.fiber_dim):
        pos = setup._pos_da[i]
        if not any(mask >> pos & 1 for mask in x.terms):
            continue
        # da_i = b_i - sum_A (rho_A a)_i e^A
        repl = setup.frame.generator(f"b{i + 1}")
        for a in setup.splitting.gauge:
            coeff = setup.rho_apply(a, setup._avars)[i]
            if not coeff.is_zero:
                repl = repl - coeff * setup.frame.generator(f"e{a}")
        x = _substitute_generator(x, pos, repl)
    return x


def raw_derivative(setup: HomogeneousSetup, x: Form) -> Form:
    """d over the raw frame: structure 2-forms on e generators, zero on
    da generators, coefficient derivatives contributing da terms.  The
    input must not contain b generators."""
    if any(mask & setup.frame.vertical_mask for mask in x.terms):
        raise SetupError(["raw derivative input still contains b generators"])
    gen_images: dict[int, Form] = {}
    for i in setup.splitting.horizontal + setup.splitting.gauge:
        gen_images[setup._pos_e[i]] = setup.structure_derivative(i)

    def dcoeff(c: Scalar) -> Form:
        out = setup.frame.zero
        for i in range(setup.fiber_dim):
            dci = c.differentiate(f"a{i + 1}")
            if not dci.is_zero:
                out = out + dci * setup.frame.generator(f"da{i + 1}")
        return out

    return _antiderivation(x, dcoeff, gen_images)


def exterior_derivative(setup: HomogeneousSetup, x: Form) -> Form:
    """d on basic forms, computed through the raw frame.

    Raises if the input uses gauge or raw generators, or if the result
    fails to be basic (which signals a non-invariant input).
    """
    if x.frame != setup.frame:
        raise SetupError(["form does not belong to this setup's frame"])
    bad = setup.frame.gauge_mask | setup.frame.raw_mask
    if any(mask & bad for mask in x.terms):
        raise SetupError(["input not basic: uses gauge or raw generators"])
    raw = vertical_to_raw(setup, x)
    differentiated = raw_derivative(setup, raw)
    result = raw_to_vertical(setup, differentiated)
    if any(mask & setup.frame.gauge_mask for mask in result.terms):
        raise SetupError(["result not basic"])
    return result


def fundamental_contraction(setup: HomogeneousSetup, a: int, x: Form) -> Form:
    """Interior product with the fundamental vertical field of gauge index a.

    Values on generators: matching gauge e^a gives 1, other e give 0, da_i
    gives -(rho_a applied to the fiber coordinates)_i, b_i gives 0 by the
    construction that validate_setup verifies.
    """
    if a not in setup.splitting.gauge:
        raise SetupError([f"{a} is not a gauge index"])
    rho_a_on_coords = setup.rho_apply(a, setup._avars)
    values: dict[int, Scalar] = {setup._pos_e[a]: setup.ring.one}
    for i in range(setup.fiber_dim):
        values[setup._pos_da[i]] = -rho_a_on_coords[i]
    out = x.frame.zero
    for mask, c in x.terms.items():
        for posn, g in enumerate(bits(mask)):
            val = values.get(g)
            if val is None or val.is_zero:
                continue
            coeff = c * val
            if posn % 2:
                coeff = -coeff
            out = out + Form(x.frame, {mask ^ (1 << g): coeff})
    return out


def gauge_variation(setup: HomogeneousSetup, a: int, x: Form) -> Form:
    """Infinitesimal gauge action (Lie derivative along the fundamental
    field of e_a) on a form over the extended frame."""
    if a not in setup.splitting.gauge:
        raise SetupError([f"{a} is not a gauge index"])
    rho_a = setup.rho(a)
    rho_a_on_coords = setup.rho_apply(a, setup._avars)

    gen_images: dict[int, Form] = {}
    ad = setup.ad_matrices[a]
    for i in setup.splitting.horizontal + setup.splitting.gauge:
        img = setup.frame.zero
        for kk in setup.splitting.horizontal + setup.splitting.gauge:
            c = ad[i - 1][kk - 1]
            if not c.is_zero:
                img = img - c * setup.frame.generator(f"e{kk}")
        gen_images[setup._pos_e[i]] = img
    for i in range(setup.fiber_dim):
        img_b = setup.frame.zero
        img_da = setup.frame.zero
        for j in range(setup.fiber_dim):
            c = rho_a[i][j]
            if not c.is_zero:
                img_b = img_b - c * setup.frame.generator(f"b{j + 1}")
                img_da = img_da - c * setup.frame.generator(f"da{j + 1}")
        gen_images[setup._pos_b[i]] = img_b
        gen_images[setup._pos_da[i]] = img_da

    def dcoeff(c: Scalar) -> Form:
        out = setup.ring.zero
        for i in range(setup.fiber_dim):
            dci = c.differentiate(f"a{i + 1}")
            if not dci.is_zero:
                out = out - rho_a_on_coords[i] * dci
        return setup.frame.scalar_form(out)

    return _derivation(x, dcoeff, gen_images)


def is_basic(setup: HomogeneousSetup, x: Form) -> bool:
    if any(mask & setup.frame.gauge_mask for mask in x.terms):
        return False
    return all(
        fundamental_contraction(setup, a, x).is_zero for a in setup.splitting.gauge
    )


def is_invariant(setup: HomogeneousSetup, x: Form) -> bool:
    if not is_basic(setup, x):
        return False
    return all(
        gauge_variation(setup, a, x).is_zero for a in setup.splitting.gauge
    )


def radial_square(setup: HomogeneousSetup) -> Scalar:
    """The squared fiber radius as a ring element."""
    out = setup.ring.zero
    for v in setup._avars:
        out = out + v * v
    return out


# -- stabilizers and invariant dimensions ---------------------------------


def stabilizer_algebra(setup: HomogeneousSetup, pt: Point) -> list[list[FieldElement]]:
    """Basis of the gauge subalgebra annihilating the fiber point."""
    return stabilizer_of_vector(setup, pt.fiber_vector())


def stabilizer_of_vector(
    setup: HomogeneousSetup, vec: Sequence[FieldElement]
) -> list[list[FieldElement]]:
    rows = []
    for i in range(setup.fiber_dim):
        row = []
        for a in setup.splitting.gauge:
            m = setup.rho(a)
            acc = setup.field.zero
            for j in range(setup.fiber_dim):
                if not m[i][j].is_zero:
                    acc = acc + m[i][j] * vec[j]
            row.append(acc)
        rows.append(row)
    return nullspace_basis(setup.field, rows)


def _wedge_power_basis(n: int, p: int) -> list[int]:
    """Bitmasks of the p-element subsets of range(n), ascending."""
    out = [m for m in range(1 << n) if m.bit_count() == p]
    out.sort()
    return out


def _derivation_equations(field, m_t, m_v, p: int, q: int):
    """Equation rows of the induced derivation on Lambda^p T x Lambda^q V.

    Row index runs over target basis elements, column over source, so
    stacking the rows of several generators yields the joint kernel system.
    """
    nt = len(m_t) if m_t else 0
    nv = len(m_v) if m_v else 0
    basis_t = _wedge_power_basis(nt, p)
    basis_v = _wedge_power_basis(nv, q)
    basis = [(mt, mv) for mt in basis_t for mv in basis_v]
    index = {bm: i for i, bm in enumerate(basis)}
    mat = [[field.zero] * len(basis) for _ in basis]
    for src, (mt, mv) in enumerate(basis):

        def act(mask, m, which):
            for i in bits(mask):
                for knew in range(len(m)):
                    c = m[knew][i]
                    if c.is_zero:
                        continue
                    if knew == i:
                        tgt = mask
                        sign = 1
                    elif mask >> knew & 1:
                        continue
                    else:
                        tgt = (mask ^ (1 << i)) | (1 << knew)
                        below_i = (mask & ((1 << i) - 1)).bit_count()
                        below_k = ((mask ^ (1 << i)) & ((1 << knew) - 1)).bit_count()
                        sign = -1 if (below_i + below_k) % 2 else 1
                    if which == "t":
                        j = index[(tgt, mv)]
                    else:
                        j = index[(mt, tgt)]
                    mat[j][src] = mat[j][src] + (c if sign > 0 else -c)

        if m_t:
            act(mt, m_t, "t")
        if m_v:
            act(mv, m_v, "v")
    return basis, mat


def _wedge_matrix(field, g, masks):
    """Action of a matrix on a wedge power, entry [tgt][src] a minor det."""
    return tuple(
        tuple(
            _minor_det(field, g, tuple(bits(m_tgt)), tuple(bits(m_src)))
            for m_src in masks
        )
        for m_tgt in masks
    )


def invariant_dimension(
    setup: HomogeneousSetup,
    bidegree: tuple[int, int],
    stab_basis: Sequence[Sequence[FieldElement]],
    extra_group_elements: Sequence[tuple] = (),
) -> int:
    """Dimension of the stabilizer-invariant subspace of Lambda^p T x Lambda^q V.

    stab_basis holds coefficient vectors over the gauge basis; extra group
    elements are (matrix on T, matrix on V) pairs for components not seen by
    the Lie algebra.
    """
    p, q = bidegree
    field = setup.field
    nt = setup.horizontal_dim
    nv = setup.fiber_dim
    if p < 0 or q < 0 or p > nt or q > nv:
        return 0
    basis_t = _wedge_power_basis(nt, p)
    basis_v = _wedge_power_basis(nv, q)
    nbasis = len(basis_t) * len(basis_v)
    if nbasis == 0:
        return 0
    stacked: list[list[FieldElement]] = []
    for lam in stab_basis:
        m_t = None
        m_v = None
        for c, a in zip(lam, setup.splitting.gauge):
            if c.is_zero:
                continue
            ad_t = setup.ad_on_horizontal(a)
            rho_a = setup.rho(a)
            m_t = _mat_scale(c, ad_t) if m_t is None else _mat_add(m_t, _mat_scale(c, ad_t))
            m_v = _mat_scale(c, rho_a) if m_v is None else _mat_add(m_v, _mat_scale(c, rho_a))
        if m_t is None:
            continue
        _, eqs = _derivation_equations(field, m_t, m_v, p, q)
        stacked.extend(eqs)
    for g_t, g_v in extra_group_elements:
        for g, sz, label in ((g_t, nt, "T"), (g_v, nv, "V")):
            gt = _mat_transpose(g)
            if not _mat_is_zero(_mat_sub(_mat_mul(field, gt, g), _identity(field, sz))):
                raise SetupError(
                    [f"extra group element matrix on {label} is not orthogonal"]
                )
        w_t = _wedge_matrix(field, g_t, basis_t)
        w_v = _wedge_matrix(field, g_v, basis_v)
        # fixed-point equations (W - I) x = 0 for the Kronecker action
        for it in range(len(basis_t)):
            for iv in range(len(basis_v)):
                row = [
                    w_t[it][jt] * w_v[iv][jv]
                    for jt in range(len(basis_t))
                    for jv in range(len(basis_v))
                ]
                row[it * len(basis_v) + iv] = row[it * len(basis_v) + iv] - field.one
                stacked.append(row)
    if not stacked:
        return nbasis
    return nbasis - matrix_rank(field, stacked)
