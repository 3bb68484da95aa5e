from fractions import Fraction

import pytest

from conftest import brute_force_witness, grid, oracle_formula, random_integer_affine, signed_sum
from formulas import Div, Leaf, LinSineLess, OscLess, canonical_false, conjunction, literals, to_dnf
from frontend import parse_formula
from linear_reduction import (
    AffineForm,
    Substitution,
    branches_formula,
    count_linear_variables,
    eliminate_divisibility,
    eliminate_equalities,
    eliminate_linear,
    level_set,
    rational_gcd,
    rational_lcm,
)
from numerics import formula_holds


def clause_of(text: str, names):
    (clause,) = to_dnf(parse_formula(text, names)).clauses
    return clause


@pytest.mark.parametrize(
    "values, expected",
    [
        ((Fraction(2, 3), Fraction(1, 2)), Fraction(1, 6)),
        ((4, 6), Fraction(2)),
        ((0, Fraction(5, 7)), Fraction(5, 7)),
        ((0, 0), Fraction(0)),
        ((Fraction(-3, 2), Fraction(9, 4)), Fraction(3, 4)),
    ],
)
def test_rational_gcd(values, expected):
    assert rational_gcd(values) == expected


def test_rational_lcm():
    assert rational_lcm([]) == 1
    assert rational_lcm([Fraction(2, 3), Fraction(1, 2)]) == 2
    assert rational_lcm([4, 6]) == 12


@pytest.mark.parametrize(
    "coeffs, lo, hi, expected",
    [
        ((Fraction(2, 3), Fraction(1, 2)), 0, 2, [Fraction(1, 2), Fraction(7, 6), Fraction(11, 6)]),
        ((0, 3), 0, 1, []),
        ((1, 2, 0), -1, 1, [-1, 0]),
        ((0, 3), 3, 4, [3]),
    ],
)
def test_level_set(coeffs, lo, hi, expected):
    form = AffineForm(tuple(Fraction(c) for c in coeffs))
    assert list(level_set(form, Fraction(lo), Fraction(hi)).values) == expected


def test_level_set_matches_brute_force():
    form = AffineForm((Fraction(3, 2), Fraction(-5, 3), Fraction(1, 4)))
    lo, hi = Fraction(-7), Fraction(5)
    reached = {form.value(point) for point in grid(2, 40)}
    assert set(level_set(form, lo, hi).values) == {v for v in reached if lo <= v < hi}


def test_substitution_composes():
    substitution = Substitution.identity(2).then(0, (0, 2, 1)).then(1, (0, 3, 0))
    assert substitution.apply((5, 4)) == (Fraction(25), Fraction(12))
    assert Substitution.identity(2).apply((5, 4)) == (5, 4)


def test_equality_with_unit_pivot():
    names = ["x", "y"]
    (branch,) = eliminate_equalities(clause_of("x - 2*y = 0 and 0 < sin(x)", names), 2)
    assert branch.formula == parse_formula("0 < sin(2*y)", names)
    assert branch.substitution.apply((0, 3)) == (6, 3)


def test_equality_with_larger_pivot_adds_divisibility():
    names = ["x", "y"]
    (branch,) = eliminate_equalities(clause_of("2*x - 3*y = 0 and 0 < sin(x)", names), 2)
    assert branch.formula == conjunction(parse_formula("0 < sin(3/2*y)", names), Leaf(Div(2, (0, 3, 0))))
    original = parse_formula("2*x - 3*y = 0 and 0 < sin(x)", names)
    for point in grid(2, 20):
        if formula_holds(branch.formula, point):
            assert formula_holds(original, branch.substitution.apply(point))
    for point in grid(2, 20):
        if formula_holds(original, point):
            assert formula_holds(branch.formula, (0, point[1]))


def test_false_ground_equality():
    names = ["x"]
    clause = (parse_formula("0*x + 1 = 0", names).literal, parse_formula("0 < sin(x)", names).literal)
    (branch,) = eliminate_equalities(clause, 1)
    assert branch.formula == Leaf(canonical_false(1))


def test_disequality_becomes_two_inequalities():
    names = ["x"]
    (branch,) = eliminate_equalities(clause_of("x != 3", names), 1)
    assert branch.formula == parse_formula("x < 3 or 3 < x", names)


def test_eliminate_linear_single_variable():
    names = ["x"]
    clause = clause_of("x < sin(x)", names)
    branches = eliminate_linear(clause, 1)
    pinned = [branch.substitution.apply((0,))[0] for branch in branches]
    assert pinned == [-2, -1]
    for branch in branches:
        (literal,) = literals(branch.formula)
        assert isinstance(literal, OscLess)
        assert formula_holds(branch.formula, (0,))


def test_eliminate_linear_leaves_oscillatory_clause():
    names = ["x"]
    clause = clause_of("0 < sin(x) and div(2, x)", names)
    (branch,) = eliminate_linear(clause, 1)
    assert branch.formula == conjunction(*(Leaf(literal) for literal in clause))


def test_eliminate_linear_reaches_no_linear_variables():
    names = ["x", "y"]
    text = (
        "-3*x + y - 2 < 2*sin(3*x + sin(y - 1)) + sin(1/2)"
        " and 2*x + 4/3*y - 1 < sin(-3*x + 2*y - 1) + 2*sin(-2*x)"
        " and 1/2*x - 3/2*y - 19/2 < -sin(1/2*x + 1/3*y + 2)"
    )
    clause = clause_of(text, names)
    assert count_linear_variables(clause) == 2
    branches = eliminate_linear(clause, 2)
    assert branches
    original = parse_formula(text, names)
    for branch in branches:
        for reduced in to_dnf(branch.formula).clauses:
            assert count_linear_variables(reduced) == 0
            assert not any(isinstance(literal, LinSineLess) for literal in reduced)
    # every integer solution of the original is covered by some branch
    solution = (0, 0)
    assert oracle_formula(original, solution)
    assert any(
        branch.substitution.apply(point) == solution and formula_holds(branch.formula, point)
        for branch in branches
        for point in grid(2, 3)
    )


@pytest.mark.parametrize(
    "text, expected",
    [
        ("div(2, x) and 0 < sin(x)", "0 < sin(2*x)"),
        ("div(2, x) and div(3, x) and 0 < sin(x)", "0 < sin(6*x)"),
    ],
)
def test_eliminate_divisibility(text, expected):
    names = ["x"]
    branches = eliminate_divisibility(clause_of(text, names), 1)
    assert branches_formula(branches) == parse_formula(expected, names)


def test_ground_divisibility_is_folded():
    names = ["x"]
    clause = (Div(2, (0, 4)), parse_formula("0 < sin(1)", names).literal)
    (branch,) = eliminate_divisibility(clause, 1)
    assert branch.formula == parse_formula("0 < sin(1)", names)
    assert eliminate_divisibility((Div(2, (0, 3)),), 1) == []


def test_divisibility_branches_map_back(rng):
    names = ["x", "y"]
    text = "div(3, x + 2*y + 1) and div(2, y) and 0 < sin(x) + sin(y)"
    original = parse_formula(text, names)
    branches = eliminate_divisibility(clause_of(text, names), 2)
    assert all(not isinstance(lit, Div) for b in branches for lit in literals(b.formula))
    for branch in branches:
        for _ in range(20):
            point = (rng.randint(-5, 5), rng.randint(-5, 5))
            mapped = branch.substitution.apply(point)
            assert formula_holds(branch.formula, point) == formula_holds(original, mapped)


def test_count_linear_variables():
    assert count_linear_variables(clause_of("x + y < sin(x) and 0 < sin(y)", ["x", "y"])) == 2
    assert count_linear_variables(clause_of("0 < sin(x)", ["x"])) == 0


def test_level_values_use_radius():
    branches = eliminate_linear(clause_of("x < 2*sin(x)", ["x"]), 1)
    assert [b.substitution.apply((0,))[0] for b in branches] == [-3, -2, -1, 1]


def test_random_gcd_and_level_sets(rng):
    lo, hi = Fraction(-3), Fraction(3)
    for _ in range(50):
        arity = rng.randint(1, 2)
        coeffs = tuple(Fraction(rng.randint(-4, 4), rng.choice((1, 2))) for _ in range(arity))
        form = AffineForm(coeffs + (Fraction(rng.randint(-4, 4), rng.choice((1, 2))),))
        g = rational_gcd(coeffs)
        assert g >= 0
        assert all((c / g).denominator == 1 for c in coeffs) if g else not any(coeffs)
        reached = {form.value(point) for point in grid(arity, 20)}
        assert set(level_set(form, lo, hi).values) == {v for v in reached if lo <= v < hi}, form


def _sine_inequality(rng, names) -> str:
    wave = signed_sum([(Fraction(rng.choice([-2, -1, 1, 2])), f"sin({random_integer_affine(rng, names)})")])
    return f"{random_integer_affine(rng, names)} < {wave}"


def _mapped_integer_point(branch, point):
    mapped = branch.substitution.apply(point)
    assert all(value.denominator == 1 for value in mapped)
    return tuple(int(value) for value in mapped)


def test_random_equalities_keep_solutions(rng):
    names = ["x", "y"]
    for _ in range(30):
        parts = [f"{random_integer_affine(rng, names)} = 0", _sine_inequality(rng, names)]
        if rng.random() < 0.3:
            parts.append(f"{random_integer_affine(rng, names)} = 0")
        if rng.random() < 0.5:
            parts.append(f"{random_integer_affine(rng, names)} != 0")
        text = " and ".join(parts)
        original = parse_formula(text, names)
        branches = eliminate_equalities(clause_of(text, names), 2)
        for point in grid(2, 6):
            covered = any(
                branch.substitution.apply(point) == point and formula_holds(branch.formula, point)
                for branch in branches
            )
            assert covered == oracle_formula(original, point), (text, point)
            for branch in branches:
                if formula_holds(branch.formula, point):
                    assert oracle_formula(original, _mapped_integer_point(branch, point)), (text, point)


def test_random_single_variable_pinning_is_equisatisfiable(rng):
    names = ["x"]
    for _ in range(30):
        parts = [_sine_inequality(rng, names) for _ in range(rng.randint(1, 2))]
        if rng.random() < 0.3:
            parts.append(f"{Fraction(rng.randint(-3, 3), 4)} < sin({random_integer_affine(rng, names)})")
        text = " and ".join(parts)
        original = parse_formula(text, names)
        branches = eliminate_linear(clause_of(text, names), 1)
        holding = [branch for branch in branches if formula_holds(branch.formula, (0,))]
        for branch in holding:
            assert oracle_formula(original, _mapped_integer_point(branch, (0,))), text
        assert bool(holding) == (brute_force_witness(original, 1, 60) is not None), text


def test_random_linear_elimination_is_sound(rng):
    names = ["x", "y"]
    for _ in range(30):
        text = " and ".join(_sine_inequality(rng, names) for _ in range(rng.randint(1, 2)))
        original = parse_formula(text, names)
        branches = eliminate_linear(clause_of(text, names), 2)
        for branch in branches:
            for reduced in to_dnf(branch.formula).clauses:
                assert count_linear_variables(reduced) == 0
            for point in grid(2, 1):
                if formula_holds(branch.formula, point):
                    assert oracle_formula(original, _mapped_integer_point(branch, point)), (text, point)


def test_random_divisibility_splits_cover_solutions(rng):
    names = ["x", "y"]
    window = 3
    for _ in range(30):
        parts = [f"div({rng.randint(2, 3)}, {random_integer_affine(rng, names)})" for _ in range(rng.randint(1, 2))]
        parts.append(f"{Fraction(rng.randint(-3, 3), 4)} < sin({random_integer_affine(rng, names)})")
        text = " and ".join(parts)
        original = parse_formula(text, names)
        branches = eliminate_divisibility(clause_of(text, names), 2)
        covered = {}
        for branch in branches:
            assert not any(isinstance(literal, Div) for literal in literals(branch.formula))
            for point in grid(2, 2 * window):
                mapped = _mapped_integer_point(branch, point)
                if max(abs(value) for value in mapped) > window:
                    continue
                assert mapped not in covered, text
                covered[mapped] = formula_holds(branch.formula, point)
        for point in grid(2, window):
            assert covered.get(point, False) == oracle_formula(original, point), (text, point)
