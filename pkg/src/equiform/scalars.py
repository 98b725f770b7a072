"""Coefficient ring for invariant-form computations.

Scalars are finite sums  c * a^alpha * t^gamma * u^delta  where

* c lives in a real multi-quadratic number field,
* the a_i are fiber coordinates (exponents >= 0),
* the t_i are formal parameters (exponents in Z, so Laurent),
* the u_j are declared radicals with a defining relation u_j^2 = p_j(a, t),
  p_j a polynomial with no radicals.  Negative powers of u_j act as
  denominators: u^-2 is exactly 1/p.

Internally a monomial keeps the exponent of u_j in {0, 1} plus a separate
nonnegative denominator exponent k_j (the power of 1/p_j); the visible
exponent of u_j is their combination r - 2k.  Sums are canonicalized by
p-adic digit expansion (unique remainders under multivariate division by
p_j), which is what makes the zero test sound: a scalar is zero iff its
coefficient map is empty.  Example: s*s*s^-1 normalizes back to s even
though the middle product expands to the defining polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Mapping

from equiform.numberfield import FieldElement, NumberField

Monomial = tuple  # internal width: n_fiber + n_params + n_radicals * 2


class RingError(ValueError):
    pass


class PointError(ValueError):
    pass


@dataclass(frozen=True)
class RadicalSpec:
    """A radical generator u with u^2 = square (polynomial in fiber/params)."""

    name: str
    square: tuple  # tuple[tuple[exponents over fiber+params, coefficient], ...]


@dataclass(frozen=True)
class RingSpec:
    field_radicands: tuple[int, ...]
    fiber: tuple[str, ...]
    params: tuple[str, ...] = ()
    radicals: tuple[RadicalSpec, ...] = ()
    radical_depth: int = 4


class Ring:
    """The scalar ring described by a RingSpec."""

    def __init__(self, spec: RingSpec):
        self.spec = spec
        self.field = NumberField(spec.field_radicands)
        self.fiber = tuple(spec.fiber)
        self.params = tuple(spec.params)
        self.radical_names = tuple(r.name for r in spec.radicals)
        names = self.fiber + self.params + self.radical_names
        if len(set(names)) != len(names):
            raise RingError("variable names must be distinct")
        self.nf = len(self.fiber)
        self.np = len(self.params)
        self.nr = len(self.radical_names)
        self.nvars = self.nf + self.np + self.nr  # external monomial width
        self.width = self.nvars + self.nr  # internal: plus denominator slots
        self.index = {n: i for i, n in enumerate(names)}
        self.depth = spec.radical_depth
        # radical squares, normalized to internal-width monomials
        self.radical_squares: list[dict[Monomial, FieldElement]] = []
        for rad in spec.radicals:
            sq: dict[Monomial, FieldElement] = {}
            for mono, c in rad.square:
                mono = tuple(mono)
                if len(mono) != self.nf + self.np:
                    raise RingError(
                        f"square of radical {rad.name}: monomials must list "
                        f"exponents for the {self.nf + self.np} fiber/param "
                        f"variables"
                    )
                if any(e < 0 for e in mono):
                    raise RingError(
                        f"square of radical {rad.name} has a negative exponent"
                    )
                ce = self._coerce_field(c)
                full = mono + (0,) * (2 * self.nr)
                s = sq.get(full, self.field.zero) + ce
                if s.is_zero:
                    sq.pop(full, None)
                else:
                    sq[full] = s
            if not sq:
                raise RingError(f"square of radical {rad.name} is zero")
            if all(not any(m) for m in sq):
                raise RingError(
                    f"square of radical {rad.name} is constant; adjoin such "
                    f"roots to the coefficient field instead"
                )
            self.radical_squares.append(sq)

    def _coerce_field(self, c) -> FieldElement:
        if isinstance(c, FieldElement):
            if c.field != self.field:
                raise RingError("field element from a different field")
            return c
        return self.field.rational(Fraction(c))

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and self.spec == other.spec

    def __hash__(self) -> int:
        return hash(self.spec)

    def __repr__(self) -> str:
        return (
            f"Ring(fiber={self.fiber}, params={self.params}, "
            f"radicals={self.radical_names})"
        )

    # -- constructors ------------------------------------------------------

    @property
    def zero(self) -> "Scalar":
        return Scalar(self, {})

    @property
    def one(self) -> "Scalar":
        return Scalar(self, {(0,) * self.width: self.field.one})

    def constant(self, c) -> "Scalar":
        ce = self._coerce_field(c)
        if ce.is_zero:
            return self.zero
        return Scalar(self, {(0,) * self.width: ce})

    def var(self, name: str) -> "Scalar":
        if name not in self.index:
            raise RingError(f"unknown ring variable {name!r}")
        mono = [0] * self.width
        mono[self.index[name]] = 1
        return Scalar(self, {tuple(mono): self.field.one})

    def sqrt_constant(self, d: int) -> "Scalar":
        return Scalar(self, {(0,) * self.width: self.field.sqrt_radicand(d)})

    def normalize(self, raw) -> "Scalar":
        """Coerce a raw expression into normal form.

        Accepts a Scalar of this ring, a number or field element, or a map
        from exponent tuples (one exponent per fiber variable, parameter and
        radical; radical exponents may be any integer) to coefficients.
        """
        if isinstance(raw, Scalar):
            if raw.ring != self:
                raise RingError("scalar from a different ring")
            return raw
        if isinstance(raw, (int, Fraction, FieldElement)):
            return self.constant(raw)
        if isinstance(raw, Mapping):
            out: dict[Monomial, FieldElement] = {}
            for mono, c in raw.items():
                mono = tuple(mono)
                if len(mono) != self.nvars:
                    raise RingError(
                        f"monomial must list {self.nvars} exponents, got {mono}"
                    )
                internal = list(mono) + [0] * self.nr
                for j in range(self.nr):
                    r = internal[self.nvars - self.nr + j]
                    internal[self.nvars - self.nr + j] = r % 2
                    internal[self.nvars + j] = -((r - r % 2) // 2)
                _accumulate(self, out, tuple(internal), self._coerce_field(c))
            return _finish(self, out)
        raise RingError(f"cannot normalize {raw!r} into the ring")

    def point(self, values: Mapping[str, object]) -> "Point":
        return Point(self, values)

    # index helpers
    def is_fiber_index(self, i: int) -> bool:
        return i < self.nf

    def radical_slot(self, j: int) -> int:
        return self.nf + self.np + j

    def denominator_slot(self, j: int) -> int:
        return self.nvars + j

    def visible_radical_exponent(self, mono: Monomial, j: int) -> int:
        return mono[self.radical_slot(j)] - 2 * mono[self.denominator_slot(j)]


def _accumulate(ring: Ring, out: dict, mono: Monomial, c: FieldElement) -> None:
    """Add c * mono to out, normalizing radical exponent slots.

    Rewrites u^2 -> p, folds negative u exponents into denominator slots and
    expands negative denominator slots (positive powers of p) back into
    polynomials.  Does not run the p-adic reduction; callers do that once per
    result via _finish.
    """
    if c.is_zero:
        return
    base = ring.nf + ring.np
    for j in range(ring.nr):
        r = mono[ring.radical_slot(j)]
        k = mono[ring.denominator_slot(j)]
        if r >= 2:
            lowered = list(mono)
            lowered[ring.radical_slot(j)] = r - 2
            lowered = tuple(lowered)
            for pm, pc in ring.radical_squares[j].items():
                _accumulate(
                    ring, out, tuple(x + y for x, y in zip(lowered, pm)), c * pc
                )
            return
        if r < 0:
            shifted = list(mono)
            shift = (1 - r) // 2  # smallest shift making the exponent 0 or 1
            shifted[ring.radical_slot(j)] = r + 2 * shift
            shifted[ring.denominator_slot(j)] = k + shift
            _accumulate(ring, out, tuple(shifted), c)
            return
        if k < 0:
            # a positive power of the defining polynomial: expand it
            raised = list(mono)
            raised[ring.denominator_slot(j)] = k + 1
            raised = tuple(raised)
            for pm, pc in ring.radical_squares[j].items():
                _accumulate(
                    ring, out, tuple(x + y for x, y in zip(raised, pm)), c * pc
                )
            return
    s = out.get(mono)
    s = c if s is None else s + c
    if s.is_zero:
        out.pop(mono, None)
    else:
        out[mono] = s


def _exact_divide(
    ring: Ring, num: dict, den: dict
) -> tuple[dict, dict]:
    """Multivariate division num = q * den + r by a single denominator.

    Works on internal monomials whose denominator slots are all zero.  The
    divisor has no radical slots.  Laurent parameter exponents are shifted
    to a nonnegative window first so lex division terminates.  Returns
    (quotient, remainder); the remainder is the canonical p-adic digit.
    """
    if not num:
        return {}, {}
    lo = ring.nf
    hi = ring.nf + ring.np
    shift = [0] * ring.width
    for p in range(lo, hi):
        m = min(mono[p] for mono in num)
        if m < 0:
            shift[p] = -m
    if any(shift):
        num = {
            tuple(e + s for e, s in zip(mono, shift)): c for mono, c in num.items()
        }
    lt = max(den)
    lc = den[lt]
    work = dict(num)
    q: dict = {}
    r: dict = {}
    while work:
        t = max(work)
        c = work.pop(t)
        qm = tuple(a - b for a, b in zip(t, lt))
        if all(e >= 0 for e in qm):
            qc = c * lc.inverse()
            q[qm] = qc
            for dm, dc in den.items():
                if dm == lt:
                    continue
                key = tuple(a + b for a, b in zip(qm, dm))
                s = work.get(key)
                s = -qc * dc if s is None else s - qc * dc
                if s.is_zero:
                    work.pop(key, None)
                else:
                    work[key] = s
        else:
            r[t] = c
    if any(shift):
        q = {tuple(e - s for e, s in zip(m, shift)): c for m, c in q.items()}
        r = {tuple(e - s for e, s in zip(m, shift)): c for m, c in r.items()}
    return q, r


def _reduce_denominators(ring: Ring, terms: dict) -> dict:
    """Canonicalize denominator content by nested p-adic expansion."""
    for j in range(ring.nr):
        dslot = ring.denominator_slot(j)
        if not any(mono[dslot] for mono in terms):
            continue
        kmax = max(mono[dslot] for mono in terms)
        # lift everything to the common denominator p^kmax
        lifted: dict = {}
        for mono, c in terms.items():
            k = mono[dslot]
            flat = list(mono)
            flat[dslot] = 0
            _mono_mul_ppow(ring, j, lifted, tuple(flat), c, kmax - k)
        # peel canonical digits: lifted = sum digit_i * p^i
        digits: list[dict] = []
        work = lifted
        while work:
            work, rem = _exact_divide(ring, work, ring.radical_squares[j])
            digits.append(rem)
        out: dict = {}
        for i, digit in enumerate(digits):
            k = kmax - i
            if k <= 0:
                # nonnegative power of p: expand back to a polynomial
                for mono, c in digit.items():
                    _mono_mul_ppow(ring, j, out, mono, c, -k)
            else:
                for mono, c in digit.items():
                    restored = list(mono)
                    restored[dslot] = k
                    key = tuple(restored)
                    s = out.get(key)
                    s = c if s is None else s + c
                    if s.is_zero:
                        out.pop(key, None)
                    else:
                        out[key] = s
        terms = out
    return terms


def _mono_mul_ppow(
    ring: Ring, j: int, out: dict, mono: Monomial, c: FieldElement, power: int
) -> None:
    """out += c * mono * p_j^power for power >= 0 (expanded)."""
    if power == 0:
        s = out.get(mono)
        s = c if s is None else s + c
        if s.is_zero:
            out.pop(mono, None)
        else:
            out[mono] = s
        return
    for pm, pc in ring.radical_squares[j].items():
        _mono_mul_ppow(
            ring, j, out, tuple(x + y for x, y in zip(mono, pm)), c * pc, power - 1
        )


def _check_bounds(ring: Ring, coeffs: dict) -> None:
    for mono in coeffs:
        for i in range(ring.nf):
            if mono[i] < 0:
                raise RingError("negative exponent on a fiber variable")
        for j in range(ring.nr):
            vis = ring.visible_radical_exponent(mono, j)
            if vis < -ring.depth:
                raise RingError(
                    f"radical exponent {vis} below depth bound -{ring.depth} "
                    f"for {ring.radical_names[j]}"
                )


def _finish(ring: Ring, out: dict) -> "Scalar":
    if ring.nr and any(
        mono[ring.denominator_slot(j)] for mono in out for j in range(ring.nr)
    ):
        out = _reduce_denominators(ring, out)
    _check_bounds(ring, out)
    return Scalar(ring, out)


class Scalar:
    """An element of a Ring in normal form."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: Ring, coeffs: dict[Monomial, FieldElement]):
        self.ring = ring
        self.coeffs = coeffs

    # -- basics ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, FieldElement)):
            other = self.ring.constant(other)
        return (
            isinstance(other, Scalar)
            and self.ring == other.ring
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.coeffs.items())))

    def _coerce(self, other) -> "Scalar | None":
        if isinstance(other, Scalar):
            if other.ring != self.ring:
                raise RingError("scalars from different rings")
            return other
        if isinstance(other, (int, Fraction, FieldElement)):
            return self.ring.constant(other)
        return None

    def __add__(self, other) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.coeffs)
        for m, c in o.coeffs.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s.is_zero:
                out.pop(m, None)
            else:
                out[m] = s
        return _finish(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> "Scalar":
        return Scalar(self.ring, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: dict[Monomial, FieldElement] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in o.coeffs.items():
                _accumulate(
                    self.ring, out, tuple(x + y for x, y in zip(m1, m2)), c1 * c2
                )
        return _finish(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Scalar":
        if n < 0:
            return self.inverse_monomial() ** (-n)
        out = self.ring.one
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def inverse_monomial(self) -> "Scalar":
        """Inverse of a single-term scalar with no fiber part.

        This is the only inversion the ring supports directly; general
        denominators must be declared as radicals (1/p = u^-2).
        """
        if len(self.coeffs) != 1:
            raise RingError("can only invert single-term scalars")
        ((mono, c),) = self.coeffs.items()
        if any(mono[i] for i in range(self.ring.nf)):
            raise RingError("cannot invert a fiber variable")
        inv_mono = tuple(-e for e in mono)
        out: dict[Monomial, FieldElement] = {}
        _accumulate(self.ring, out, inv_mono, c.inverse())
        return _finish(self.ring, out)

    def __truediv__(self, other) -> "Scalar":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse_monomial()

    # -- calculus ----------------------------------------------------------

    def differentiate(self, var: str) -> "Scalar":
        return differentiate(self, var)

    def evaluate(self, pt: "Point") -> FieldElement:
        return evaluate(self, pt)

    # -- substitutions -----------------------------------------------------

    def substitute_square(self, var: str, replacement: "Scalar") -> "Scalar":
        """Rewrite var^2 -> replacement until the exponent of var is <= 1.

        The replacement must not contain var, so this terminates and computes
        the normal form modulo the principal ideal (var^2 - replacement).
        Radical generators whose defining square involves var must be
        substituted away first.
        """
        ring = self.ring
        i = ring.index[var]
        if not ring.is_fiber_index(i):
            raise RingError("substitute_square expects a fiber variable")
        if any(m[i] for m in replacement.coeffs):
            raise RingError("replacement may not involve the substituted variable")
        for j in range(ring.nr):
            if any(pm[i] for pm in ring.radical_squares[j]):
                rslot, dslot = ring.radical_slot(j), ring.denominator_slot(j)
                if any(m[rslot] or m[dslot] for m in self.coeffs):
                    raise RingError(
                        f"substitute the radical {ring.radical_names[j]} "
                        f"before reducing powers of {var}"
                    )
        out = ring.zero
        for mono, c in self.coeffs.items():
            e = mono[i]
            rest = list(mono)
            rest[i] = e % 2
            term = Scalar(ring, {tuple(rest): c})
            out = out + term * replacement ** (e // 2)
        return out

    def substitute_radical_value(self, name: str, value: "Scalar") -> "Scalar":
        """Replace a radical generator by an explicit scalar value."""
        ring = self.ring
        if name not in ring.radical_names:
            raise RingError(f"{name!r} is not a radical of the ring")
        j = ring.radical_names.index(name)
        rslot, dslot = ring.radical_slot(j), ring.denominator_slot(j)
        out = ring.zero
        for mono, c in self.coeffs.items():
            e = ring.visible_radical_exponent(mono, j)
            rest = list(mono)
            rest[rslot] = 0
            rest[dslot] = 0
            term = Scalar(ring, {tuple(rest): c})
            out = out + term * value**e
        return out

    # -- inspection ----------------------------------------------------------

    def degree_in(self, var: str) -> int:
        i = self.ring.index[var]
        if i >= self.ring.nf + self.ring.np:
            raise RingError("degree_in expects a fiber variable or parameter")
        return max((m[i] for m in self.coeffs), default=0)

    def uses_params(self) -> bool:
        lo = self.ring.nf
        hi = self.ring.nf + self.ring.np
        return any(any(m[lo:hi]) for m in self.coeffs)

    def uses_radicals(self) -> bool:
        return any(
            m[self.ring.radical_slot(j)] or m[self.ring.denominator_slot(j)]
            for m in self.coeffs
            for j in range(self.ring.nr)
        )

    def constant_term(self) -> FieldElement:
        return self.coeffs.get((0,) * self.ring.width, self.ring.field.zero)

    @property
    def is_constant(self) -> bool:
        return all(not any(m) for m in self.coeffs)

    # -- rendering -----------------------------------------------------------

    def __repr__(self) -> str:
        return f"Scalar({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        ring = self.ring
        names = ring.fiber + ring.params
        parts: list[str] = []
        for mono in sorted(self.coeffs):
            c = self.coeffs[mono]
            factors = []
            for name, e in zip(names, mono):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            for j, name in enumerate(ring.radical_names):
                e = ring.visible_radical_exponent(mono, j)
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors)
            cs = str(c)
            neg = cs.startswith("-") and "+" not in cs and cs.count("-") == 1
            if neg:
                cs = cs[1:]
            if body:
                if cs == "1":
                    piece = body
                elif "+" in cs or "-" in cs:
                    piece = f"({cs})*{body}"
                else:
                    piece = f"{cs}*{body}"
            else:
                piece = cs if ("+" not in cs and "-" not in cs) else f"({cs})"
            if not parts:
                parts.append(("-" if neg else "") + piece)
            else:
                parts.append(("-" if neg else "+") + piece)
        return "".join(parts)


def differentiate(x: Scalar, var: str) -> Scalar:
    """Partial derivative with respect to a fiber variable.

    Radicals differentiate through their defining relation,
    d(u^r)/da = (r/2) (dp/da) u^(r-2), and denominator slots through the
    power rule for p^-k.
    """
    ring = x.ring
    if var not in ring.index or not ring.is_fiber_index(ring.index[var]):
        raise RingError(f"{var!r} is not a fiber variable")
    i = ring.index[var]
    out: dict[Monomial, FieldElement] = {}
    for mono, c in x.coeffs.items():
        if mono[i]:
            lowered = list(mono)
            lowered[i] -= 1
            _accumulate(ring, out, tuple(lowered), c * mono[i])
        for j in range(ring.nr):
            dp: dict[Monomial, FieldElement] = {}
            for pm, pc in ring.radical_squares[j].items():
                if pm[i]:
                    pl = list(pm)
                    pl[i] -= 1
                    dp[tuple(pl)] = pc * pm[i]
            if not dp:
                continue
            r = mono[ring.radical_slot(j)]
            k = mono[ring.denominator_slot(j)]
            if r:
                lowered = list(mono)
                lowered[ring.radical_slot(j)] = r - 2
                for pm, pc in dp.items():
                    _accumulate(
                        ring,
                        out,
                        tuple(a + b for a, b in zip(lowered, pm)),
                        c * pc * Fraction(r, 2),
                    )
            if k:
                raised = list(mono)
                raised[ring.denominator_slot(j)] = k + 1
                for pm, pc in dp.items():
                    _accumulate(
                        ring,
                        out,
                        tuple(a + b for a, b in zip(raised, pm)),
                        c * pc * (-k),
                    )
    return _finish(ring, out)


@dataclass
class Point:
    """Exact values for the fiber variables and parameters.

    Radical values are derived from the defining squares, always taking the
    nonnegative branch; evaluation fails if the square root does not exist in
    the coefficient field.
    """

    ring: Ring
    values: dict = dc_field(default_factory=dict)

    def __init__(self, ring: Ring, values: Mapping[str, object]):
        self.ring = ring
        clean: dict[str, FieldElement] = {}
        for name, v in values.items():
            if name not in ring.index or ring.index[name] >= ring.nf + ring.np:
                raise PointError(f"{name!r} is not a fiber variable or parameter")
            clean[name] = ring._coerce_field(v)
        missing = [n for n in ring.fiber + ring.params if n not in clean]
        if missing:
            raise PointError(f"point is missing values for {missing}")
        self.values = clean
        self._radical_values: dict[int, FieldElement] = {}

    def fiber_vector(self) -> list[FieldElement]:
        return [self.values[n] for n in self.ring.fiber]

    def radical_value(self, j: int) -> FieldElement:
        """Value of one radical generator, computed on first use so that
        scalars not involving a radical never force its evaluation."""
        if j not in self._radical_values:
            name = self.ring.radical_names[j]
            base_vals = [self.values[n] for n in self.ring.fiber + self.ring.params]
            nbase = self.ring.nf + self.ring.np
            sq = self.ring.field.zero
            for mono, c in self.ring.radical_squares[j].items():
                term = c
                for v, e in zip(base_vals, mono[:nbase]):
                    if e:
                        term = term * _field_pow(v, e, name)
                sq = sq + term
            root = sq.sqrt()
            if root is None:
                raise PointError(
                    f"radical {name} has no exact value at this point "
                    f"(square evaluates to {sq})"
                )
            self._radical_values[j] = root
        return self._radical_values[j]

    def radical_values(self) -> list[FieldElement]:
        return [self.radical_value(j) for j in range(self.ring.nr)]


def _field_pow(v: FieldElement, e: int, name: str) -> FieldElement:
    if e < 0 and v.is_zero:
        raise PointError(f"negative power of zero while evaluating {name}")
    return v**e


def evaluate(x: Scalar, pt: Point) -> FieldElement:
    if pt.ring != x.ring:
        raise PointError("point belongs to a different ring")
    ring = x.ring
    base_vals = [pt.values[n] for n in ring.fiber + ring.params]
    names = ring.fiber + ring.params
    total = ring.field.zero
    for mono, c in x.coeffs.items():
        term = c
        for v, e, name in zip(base_vals, mono, names):
            if e:
                term = term * _field_pow(v, e, name)
        for j, name in enumerate(ring.radical_names):
            e = ring.visible_radical_exponent(mono, j)
            if e:
                term = term * _field_pow(pt.radical_value(j), e, name)
        total = total + term
    return total
