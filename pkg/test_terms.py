from fractions import Fraction

import mpmath
import pytest

from conftest import random_raw_term
from errors import ArityError, NonOscillatoryError
from formulas import Leaf, LinEq, LinNeq, OscLess, And, Or, conjunction, disjunction, to_dnf
from frontend import parse_term
from terms import (
    Scale,
    Sine,
    Sum,
    Var,
    add,
    constant_term,
    evaluate,
    evaluate_raw,
    is_oscillatory,
    negate,
    normalize,
    radius,
    sine_depth,
    sine_of,
    substitute_term,
    to_raw,
    variable_term,
    zero_term,
)


def test_normalize_merges_duplicate_arguments():
    term = normalize(Sine(Sum((Var(0), Var(0)))), 1)
    assert term.linear == (0, 0)
    assert len(term.summands) == 1
    assert term.summands[0].coefficient == 1
    assert term.summands[0].vector == (2, 0)


def test_normalize_cancels_opposite_summands():
    term = normalize(Sum((Sine(Var(0)), Scale(Fraction(-1), Sine(Var(0))))), 1)
    assert term == zero_term(1)


def test_normalize_folds_odd_symmetry():
    term = normalize(Sum((Sine(Var(0)), Sine(Scale(Fraction(-1), Var(0))))), 1)
    assert term == zero_term(1)
    single = normalize(Sine(Scale(Fraction(-2), Var(0))), 1)
    assert single.summands[0].coefficient == -1
    assert single.summands[0].vector == (2, 0)


def test_normalize_builds_shared_atoms():
    raw = Sum((Scale(Fraction(1, 2), Var(0)), Sine(Sine(Var(1)))))
    term = normalize(raw, 2)
    assert term.linear == (Fraction(1, 2), 0, 0)
    assert len(term.atoms) == 1
    assert term.atoms[0].coeffs == (0, 1, 0)
    assert term.summands[0].vector == (0, 0, 0, 1)


def test_normalize_rejects_out_of_range_variable():
    with pytest.raises(ArityError):
        normalize(Var(2), 2)


def test_normalize_is_pointwise_sound(rng):
    for _ in range(200):
        arity = rng.randint(1, 3)
        raw = random_raw_term(rng, arity, 3)
        term = normalize(raw, arity)
        point = [Fraction(rng.randint(-50, 50), rng.randint(1, 7)) for _ in range(arity)]
        difference = evaluate_raw(raw, point, 40) - evaluate(term, point, 40)
        assert abs(difference) < mpmath.mpf(10) ** -9


def test_normalize_is_idempotent(rng):
    for _ in range(100):
        arity = rng.randint(1, 3)
        term = normalize(random_raw_term(rng, arity, 3), arity)
        assert normalize(to_raw(term), arity) == term


def test_normal_forms_have_no_equal_or_opposite_summands(rng):
    for _ in range(100):
        arity = rng.randint(1, 2)
        term = normalize(random_raw_term(rng, arity, 3), arity)
        vectors = [summand.vector for summand in term.summands]
        for i, a in enumerate(vectors):
            for b in vectors[i + 1 :]:
                assert a != b
                assert a != tuple(-value for value in b)


@pytest.mark.parametrize(
    "text, depth",
    [("3/2", 0), ("sin(x)", 1), ("sin(x + sin(y))", 2), ("x + y", 0), ("sin(sin(sin(x))) + sin(y)", 3)],
)
def test_sine_depth(text, depth):
    assert sine_depth(parse_term(text, ["x", "y"])) == depth


@pytest.mark.parametrize(
    "text, expected",
    [("2*sin(x) + sin(3*x)", Fraction(3)), ("0", Fraction(0)), ("-1/2*sin(x) + 1/3*sin(y)", Fraction(5, 6))],
)
def test_radius(text, expected):
    assert radius(parse_term(text, ["x", "y"])) == expected


def test_radius_rejects_linear_part():
    with pytest.raises(NonOscillatoryError):
        radius(parse_term("x + sin(x)", ["x"]))


def test_radius_bounds_values(rng):
    for _ in range(50):
        first = sine_of(normalize(random_raw_term(rng, 2, 2), 2))
        second = sine_of(normalize(random_raw_term(rng, 2, 2), 2))
        wave = add(first, negate(add(second, second)))
        bound = radius(wave)
        point = [rng.randint(-100, 100), rng.randint(-100, 100)]
        value = abs(evaluate(wave, point))
        assert value <= mpmath.mpf(bound.numerator) / bound.denominator
        if bound:
            assert value < mpmath.mpf(bound.numerator) / bound.denominator


def test_sum_with_its_negation_is_zero(rng):
    for _ in range(20):
        term = normalize(random_raw_term(rng, 2, 3), 2)
        assert add(term, negate(term)) == zero_term(2)


def test_is_oscillatory():
    assert is_oscillatory(parse_term("sin(x)", ["x"]))
    assert not is_oscillatory(parse_term("x + sin(x)", ["x"]))
    assert is_oscillatory(zero_term(1))
    assert not is_oscillatory(constant_term(1, 2))


def test_substitute_replaces_inside_sines():
    names = ["x", "y"]
    term = parse_term("sin(x + sin(x))", names)
    result = substitute_term(term, 0, (0, 2, 0))
    assert result == parse_term("sin(2*y + sin(2*y))", names)


def test_substitute_ground_value():
    term = parse_term("sin(x)", ["x"])
    assert substitute_term(term, 0, (0, 2)) == parse_term("sin(2)", ["x"])


def test_substitute_keeps_arity_and_checks_index():
    term = variable_term(2, 1)
    assert substitute_term(term, 1, (1, 0, 1)).arity == 2
    with pytest.raises(ArityError):
        substitute_term(term, 2, (0, 0, 0))


def test_to_dnf_distributes_and_dedups():
    a = Leaf(LinEq((Fraction(1), Fraction(0))))
    b = Leaf(LinNeq((Fraction(1), Fraction(0))))
    c = Leaf(OscLess(Fraction(0), parse_term("sin(x)", ["x"])))
    assert to_dnf(a).clauses == ((a.literal,),)
    assert to_dnf(And((Or((a, b)), c))).clauses == ((a.literal, c.literal), (b.literal, c.literal))
    assert to_dnf(Or((And((a, b)), And((a, b))))).clauses == ((a.literal, b.literal),)


def test_conjunction_and_disjunction_collapse():
    a = Leaf(LinEq((Fraction(1), Fraction(0))))
    assert conjunction(a) == a
    assert conjunction() == And(())
    assert disjunction() == Or(())
    assert conjunction(a, a) == a
