"""Shared fixtures: the two bundled homogeneous setups, built in code.

The eight-dimensional setup is su(3) acting on the twistor bundle data over
the complex projective plane: horizontal indices 2..5, gauge indices
1, 6, 7, 8, quaternionic fiber of dimension four.  The small setup is so(3)
over the two-sphere with the rotation action on the plane.
"""

from fractions import Fraction

import pytest

from equiform.homogeneous import (
    Splitting,
    make_algebra,
    make_representation,
    validate_setup,
)
from equiform.numberfield import NumberField
from equiform.scalars import RadicalSpec, RingSpec


def su3_raw():
    """Structure constants, splitting and fiber representation for su(3)."""
    field = NumberField((3,))
    s3 = field.sqrt_radicand(3)
    one = field.one
    triples = [
        (1, 2, 3, -one), (1, 4, 5, -one), (1, 6, 7, 2 * one),
        (2, 1, 3, one), (2, 4, 6, one), (2, 5, 7, -one), (2, 5, 8, -s3),
        (3, 1, 2, -one), (3, 4, 7, -one), (3, 4, 8, s3), (3, 5, 6, -one),
        (4, 1, 5, one), (4, 2, 6, -one), (4, 3, 7, one), (4, 3, 8, -s3),
        (5, 1, 4, -one), (5, 2, 7, one), (5, 2, 8, s3), (5, 3, 6, one),
        (6, 1, 7, -2 * one), (6, 2, 4, one), (6, 3, 5, -one),
        (7, 1, 6, 2 * one), (7, 2, 5, -one), (7, 3, 4, -one),
        (8, 2, 5, -s3), (8, 3, 4, s3),
    ]
    algebra = make_algebra(field, 8, triples)
    splitting = Splitting(horizontal=(2, 3, 4, 5), gauge=(1, 6, 7, 8))
    z = field.zero
    rho = {
        1: [[z, -one, z, z], [one, z, z, z], [z, z, z, -one], [z, z, one, z]],
        6: [[z, z, one, z], [z, z, z, -one], [-one, z, z, z], [z, one, z, z]],
        7: [[z, z, z, -one], [z, z, -one, z], [z, one, z, z], [one, z, z, z]],
        8: [[z, z, z, -s3], [z, z, s3, z], [z, -s3, z, z], [s3, z, z, z]],
    }
    representation = make_representation(field, rho)
    return field, algebra, splitting, representation


def su3_ring_spec():
    """Coefficient ring with the radial radical s, s^2 = |a|^2."""
    sq = tuple(
        (tuple(2 if j == i else 0 for j in range(4)), Fraction(1))
        for i in range(4)
    )
    return RingSpec(
        field_radicands=(3,),
        fiber=("a1", "a2", "a3", "a4"),
        radicals=(RadicalSpec(name="s", square=sq),),
    )


def su2_raw():
    field = NumberField(())
    one = field.one
    triples = [(1, 2, 3, -one), (2, 1, 3, one), (3, 1, 2, -one)]
    algebra = make_algebra(field, 3, triples)
    splitting = Splitting(horizontal=(1, 2), gauge=(3,))
    z = field.zero
    representation = make_representation(field, {3: [[z, -one], [one, z]]})
    return field, algebra, splitting, representation


def su2_ring_spec():
    """Ring with a shift parameter and u, u^2 = k + |a|^2."""
    sq = (((0, 0, 1), Fraction(1)), ((2, 0, 0), Fraction(1)), ((0, 2, 0), Fraction(1)))
    return RingSpec(
        field_radicands=(),
        fiber=("a1", "a2"),
        params=("k",),
        radicals=(RadicalSpec(name="u", square=sq),),
    )


@pytest.fixture(scope="session")
def su3_setup():
    _, algebra, splitting, representation = su3_raw()
    return validate_setup(algebra, splitting, representation, su3_ring_spec())


@pytest.fixture(scope="session")
def su2_setup():
    _, algebra, splitting, representation = su2_raw()
    return validate_setup(algebra, splitting, representation, su2_ring_spec())


def build_su3_alphabet(setup):
    """Letters a, b, beta, tbeta, eps and contractions dot, sigma."""
    from equiform.letters import (
        dot_contraction,
        letter_a,
        letter_b,
        letter_from_bilinear_map,
        letter_from_T_valued_map,
        make_contraction,
    )

    frame = setup.frame
    g = frame.generator
    w = lambda *names: _wedge_all([g(n) for n in names])
    beta = letter_from_T_valued_map(
        setup, "beta", (g("e2"), g("e3"), g("e4"), g("e5"))
    )
    tbeta = letter_from_T_valued_map(
        setup,
        "tbeta",
        (
            w("e3", "e4", "e5"),
            -w("e2", "e4", "e5"),
            w("e2", "e3", "e5"),
            -w("e2", "e3", "e4"),
        ),
    )
    psi = [
        [_wedge_all([beta.components[j], beta.components[i]]) for i in range(4)]
        for j in range(4)
    ]
    eps = letter_from_bilinear_map(setup, "eps", psi)
    one = setup.field.one
    sigma = make_contraction(
        setup,
        "sigma",
        {(0, 3): one, (3, 0): -one, (1, 2): -one, (2, 1): one},
        symmetry="antisymmetric",
    )
    letters = {
        "a": letter_a(setup),
        "b": letter_b(setup),
        "beta": beta,
        "tbeta": tbeta,
        "eps": eps,
    }
    contractions = {"dot": dot_contraction(setup), "sigma": sigma}
    return letters, contractions


def build_su2_alphabet(setup):
    from equiform.letters import (
        det_contraction,
        dot_contraction,
        letter_a,
        letter_b,
        letter_from_T_valued_map,
    )

    g = setup.frame.generator
    beta = letter_from_T_valued_map(setup, "beta", (g("e1"), g("e2")))
    letters = {"a": letter_a(setup), "b": letter_b(setup), "beta": beta}
    contractions = {
        "dot": dot_contraction(setup),
        "det": det_contraction(setup),
    }
    return letters, contractions


def _wedge_all(forms):
    from equiform.forms import wedge

    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


@pytest.fixture(scope="session")
def su3_alphabet(su3_setup):
    return build_su3_alphabet(su3_setup)


@pytest.fixture(scope="session")
def su2_alphabet(su2_setup):
    return build_su2_alphabet(su2_setup)


@pytest.fixture(scope="session")
def su3_context(su3_setup, su3_alphabet):
    from equiform.expressions import build_context

    letters, contractions = su3_alphabet
    return build_context(
        su3_setup, list(letters.values()), list(contractions.values())
    )


@pytest.fixture(scope="session")
def su2_context(su2_setup, su2_alphabet):
    from equiform.expressions import build_context

    letters, contractions = su2_alphabet
    return build_context(
        su2_setup, list(letters.values()), list(contractions.values())
    )


@pytest.fixture(scope="session")
def su3_dictionary(su3_setup, su3_alphabet):
    from equiform.dictionary import generate_dictionary

    letters, contractions = su3_alphabet
    return generate_dictionary(
        su3_setup, list(letters.values()), list(contractions.values())
    )


@pytest.fixture(scope="session")
def su2_dictionary(su2_setup, su2_alphabet):
    from equiform.dictionary import generate_dictionary

    letters, contractions = su2_alphabet
    return generate_dictionary(
        su2_setup, list(letters.values()), list(contractions.values())
    )


@pytest.fixture(scope="session")
def su3_table(su3_setup, su3_dictionary):
    """The degree <= 3 differential table; shared because it is slow to build."""
    from equiform.dictionary import differential_table

    return differential_table(su3_setup, su3_dictionary, 3)
