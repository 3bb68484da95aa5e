"""Linear-sine terms.

A raw term is the syntax tree the parser builds. A normal term is the
canonical shape every other module works with: an affine part ``p0 . (x, 1)``
plus ``K`` weighted sine summands whose arguments are affine in the variables,
the constant 1 and a shared list of nested sine atoms ``t_1 .. t_m``.

Internally both shapes go through an expansion tree (affine part plus a sorted
tuple of ``(argument, coefficient)`` sine items). Every expansion is built by
``_build`` which merges equal arguments, folds ``sin(-a) = -sin(a)``, drops
``sin(0)`` and zero coefficients, so two terms denote the same canonical form
exactly when their expansions are equal.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import mpmath

from errors import ArityError, NonOscillatoryError

logger = logging.getLogger(__name__)

Rational = Fraction
Vector = Tuple[Fraction, ...]
Number = Union[int, Fraction]


def as_fraction(value: Union[int, str, Fraction]) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


def as_vector(values: Iterable[Union[int, str, Fraction]]) -> Vector:
    return tuple(as_fraction(value) for value in values)


def zero_vector(length: int) -> Vector:
    return (Fraction(0),) * length


def unit_vector(length: int, index: int, value: Number = 1) -> Vector:
    entries = [Fraction(0)] * length
    entries[index] = as_fraction(value)
    return tuple(entries)


def constant_vector(arity: int, value: Number) -> Vector:
    return unit_vector(arity + 1, arity, value)


def vector_add(a: Sequence[Fraction], b: Sequence[Fraction]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vector_scale(factor: Number, a: Sequence[Fraction]) -> Vector:
    return tuple(factor * x for x in a)


def is_zero_vector(a: Sequence[Fraction]) -> bool:
    return not any(a)


def substitute_affine(form: Sequence[Fraction], k: int, replacement: Sequence[Fraction]) -> Vector:
    """Replace x_k in ``form . (x, 1)`` by ``replacement . (x, 1)``."""
    coefficient = form[k]
    if not coefficient:
        return tuple(form)
    entries = list(form)
    entries[k] = Fraction(0)
    return vector_add(entries, vector_scale(coefficient, replacement))


# ============= RAW TERMS =============


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Sum:
    terms: Tuple["RawTerm", ...]


@dataclass(frozen=True)
class Scale:
    factor: Fraction
    term: "RawTerm"


@dataclass(frozen=True)
class Sine:
    argument: "RawTerm"


RawTerm = Union[Const, Var, Sum, Scale, Sine]


# ============= EXPANSION TREES =============


@dataclass(frozen=True)
class _Expansion:
    linear: Vector
    sines: Tuple[Tuple["_Expansion", Fraction], ...]

    @functools.cached_property
    def depth(self) -> int:
        if not self.sines:
            return 0
        return 1 + max(argument.depth for argument, _ in self.sines)


def _sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


def _compare_vectors(a: _Expansion, b: _Expansion) -> int:
    """Lexicographic order of the coefficient vectors over (x, 1, atoms in atom order)."""
    if a.linear != b.linear:
        return -1 if a.linear < b.linear else 1
    i = j = 0
    left, right = a.sines, b.sines
    while i < len(left) or j < len(right):
        if j >= len(right):
            return _sign(left[i][1])
        if i >= len(left):
            return -_sign(right[j][1])
        order = _compare_atoms(left[i][0], right[j][0])
        if order == 0:
            if left[i][1] != right[j][1]:
                return -1 if left[i][1] < right[j][1] else 1
            i += 1
            j += 1
        elif order < 0:
            return _sign(left[i][1])
        else:
            return -_sign(right[j][1])
    return 0


def _compare_atoms(u: _Expansion, v: _Expansion) -> int:
    """Atom order: sine depth first, then coefficient vectors."""
    if u.depth != v.depth:
        return -1 if u.depth < v.depth else 1
    return _compare_vectors(u, v)


_ATOM_KEY = functools.cmp_to_key(_compare_atoms)
_ITEM_KEY = functools.cmp_to_key(lambda x, y: _compare_atoms(x[0], y[0]))


def _leading_entry(expansion: _Expansion) -> Optional[Fraction]:
    for value in expansion.linear:
        if value:
            return value
    if expansion.sines:
        return expansion.sines[0][1]
    return None


def _negate(expansion: _Expansion) -> _Expansion:
    return _Expansion(
        tuple(-value for value in expansion.linear),
        tuple((argument, -coefficient) for argument, coefficient in expansion.sines),
    )


def _scale(factor: Fraction, expansion: _Expansion) -> _Expansion:
    if not factor:
        return _Expansion(zero_vector(len(expansion.linear)), ())
    return _Expansion(
        vector_scale(factor, expansion.linear),
        tuple((argument, factor * coefficient) for argument, coefficient in expansion.sines),
    )


def _build(linear: Sequence[Fraction], items: Iterable[Tuple[_Expansion, Fraction]]) -> _Expansion:
    merged: Dict[_Expansion, Fraction] = {}
    for argument, coefficient in items:
        if not coefficient:
            continue
        lead = _leading_entry(argument)
        if lead is None:
            continue
        if lead < 0:
            argument, coefficient = _negate(argument), -coefficient
        merged[argument] = merged.get(argument, Fraction(0)) + coefficient
    sines = tuple(sorted(((a, c) for a, c in merged.items() if c), key=_ITEM_KEY))
    return _Expansion(tuple(linear), sines)


def _add(a: _Expansion, b: _Expansion) -> _Expansion:
    return _build(vector_add(a.linear, b.linear), a.sines + b.sines)


@functools.lru_cache(maxsize=65536)
def _substitute(expansion: _Expansion, k: int, replacement: Vector) -> _Expansion:
    linear = substitute_affine(expansion.linear, k, replacement)
    items = [(_substitute(argument, k, replacement), c) for argument, c in expansion.sines]
    return _build(linear, items)


def _raw_to_expansion(raw: RawTerm, arity: int) -> _Expansion:
    if isinstance(raw, Const):
        return _Expansion(constant_vector(arity, raw.value), ())
    if isinstance(raw, Var):
        if not 0 <= raw.index < arity:
            raise ArityError(f"variable index {raw.index} outside arity {arity}")
        return _Expansion(unit_vector(arity + 1, raw.index), ())
    if isinstance(raw, Sum):
        total = _Expansion(zero_vector(arity + 1), ())
        for part in raw.terms:
            total = _add(total, _raw_to_expansion(part, arity))
        return total
    if isinstance(raw, Scale):
        return _scale(as_fraction(raw.factor), _raw_to_expansion(raw.term, arity))
    if isinstance(raw, Sine):
        return _build(zero_vector(arity + 1), [(_raw_to_expansion(raw.argument, arity), Fraction(1))])
    raise TypeError(f"not a raw term: {raw!r}")


# ============= NORMAL TERMS =============


@dataclass(frozen=True)
class SineAtom:
    """t_i = sin(coeffs . (x, 1, t_1, ..., t_{i-1}))."""

    coeffs: Vector


@dataclass(frozen=True)
class Summand:
    """r * sin(vector . (x, 1, t_1, ..., t_m))."""

    coefficient: Fraction
    vector: Vector


@dataclass(frozen=True)
class NormalTerm:
    arity: int
    linear: Vector
    atoms: Tuple[SineAtom, ...] = ()
    summands: Tuple[Summand, ...] = ()

    def __post_init__(self) -> None:
        n = self.arity
        if len(self.linear) != n + 1:
            raise ArityError(f"linear part has length {len(self.linear)}, expected {n + 1}")
        for index, atom in enumerate(self.atoms):
            if len(atom.coeffs) != n + 1 + index:
                raise ArityError(f"atom {index} has {len(atom.coeffs)} coefficients, expected {n + 1 + index}")
        for summand in self.summands:
            if len(summand.vector) != n + 1 + len(self.atoms):
                raise ArityError("summand vector length does not match arity and atom count")
            if not summand.coefficient:
                raise ValueError("sine summands need nonzero coefficients")

    @functools.cached_property
    def expansion(self) -> _Expansion:
        n = self.arity
        arguments: List[_Expansion] = []
        for atom in self.atoms:
            arguments.append(_combine(atom.coeffs, arguments, n))
        items = [(_combine(s.vector, arguments, n), s.coefficient) for s in self.summands]
        return _build(self.linear, items)

    def __str__(self) -> str:
        from frontend import format_term

        return format_term(self, [f"x{i}" for i in range(self.arity)])


def _combine(vector: Vector, arguments: Sequence[_Expansion], arity: int) -> _Expansion:
    head = vector[: arity + 1]
    return _build(head, [(arguments[j], c) for j, c in enumerate(vector[arity + 1 :]) if c])


def _vector_over(argument: _Expansion, index: Dict[_Expansion, int], width: int) -> Vector:
    entries = list(argument.linear) + [Fraction(0)] * width
    offset = len(argument.linear)
    for inner, coefficient in argument.sines:
        entries[offset + index[inner]] = coefficient
    return tuple(entries)


def _flatten(expansion: _Expansion, arity: int) -> NormalTerm:
    seen: Set[_Expansion] = set()

    def collect(argument: _Expansion) -> None:
        for inner, _ in argument.sines:
            if inner not in seen:
                seen.add(inner)
                collect(inner)

    for argument, _ in expansion.sines:
        collect(argument)
    ordered = sorted(seen, key=_ATOM_KEY)
    index = {argument: i for i, argument in enumerate(ordered)}
    atoms = tuple(SineAtom(_vector_over(argument, index, i)) for i, argument in enumerate(ordered))
    summands = tuple(
        Summand(coefficient, _vector_over(argument, index, len(ordered)))
        for argument, coefficient in expansion.sines
    )
    term = NormalTerm(arity, tuple(expansion.linear), atoms, summands)
    term.__dict__["expansion"] = expansion
    return term


def normalize(raw: RawTerm, arity: int) -> NormalTerm:
    """Bring a raw term into canonical form over ``arity`` variables."""
    return _flatten(_raw_to_expansion(raw, arity), arity)


def to_raw(term: NormalTerm) -> RawTerm:
    """Print a normal term back as a raw term (normalize(to_raw(t)) == t)."""
    n = term.arity
    atom_raws: List[RawTerm] = []
    for atom in term.atoms:
        atom_raws.append(Sine(_vector_raw(atom.coeffs, atom_raws, n)))
    parts = [_vector_raw(term.linear, atom_raws, n)]
    for summand in term.summands:
        parts.append(Scale(summand.coefficient, Sine(_vector_raw(summand.vector, atom_raws, n))))
    return Sum(tuple(parts))


def _vector_raw(vector: Vector, atom_raws: Sequence[RawTerm], arity: int) -> RawTerm:
    parts: List[RawTerm] = []
    for j, coefficient in enumerate(vector):
        if not coefficient:
            continue
        if j < arity:
            parts.append(Scale(coefficient, Var(j)))
        elif j == arity:
            parts.append(Const(coefficient))
        else:
            parts.append(Scale(coefficient, atom_raws[j - arity - 1]))
    return Sum(tuple(parts))


# ============= CONSTRUCTION AND ALGEBRA =============


def zero_term(arity: int) -> NormalTerm:
    return NormalTerm(arity, zero_vector(arity + 1))


def constant_term(arity: int, value: Number) -> NormalTerm:
    return NormalTerm(arity, constant_vector(arity, value))


def variable_term(arity: int, index: int) -> NormalTerm:
    if not 0 <= index < arity:
        raise ArityError(f"variable index {index} outside arity {arity}")
    return NormalTerm(arity, unit_vector(arity + 1, index))


def affine_term(q: Sequence[Number]) -> NormalTerm:
    return NormalTerm(len(q) - 1, as_vector(q))


def sine_of(term: NormalTerm) -> NormalTerm:
    return _flatten(_build(zero_vector(term.arity + 1), [(term.expansion, Fraction(1))]), term.arity)


def _check_same_arity(a: NormalTerm, b: NormalTerm) -> None:
    if a.arity != b.arity:
        raise ArityError(f"cannot combine terms of arity {a.arity} and {b.arity}")


def add(a: NormalTerm, b: NormalTerm) -> NormalTerm:
    _check_same_arity(a, b)
    return _flatten(_add(a.expansion, b.expansion), a.arity)


def scale(factor: Number, term: NormalTerm) -> NormalTerm:
    return _flatten(_scale(as_fraction(factor), term.expansion), term.arity)


def negate(term: NormalTerm) -> NormalTerm:
    return _flatten(_negate(term.expansion), term.arity)


def sub(a: NormalTerm, b: NormalTerm) -> NormalTerm:
    return add(a, negate(b))


def linear_part(term: NormalTerm) -> Vector:
    return term.linear


def oscillatory_part(term: NormalTerm) -> NormalTerm:
    expansion = term.expansion
    return _flatten(_Expansion(zero_vector(term.arity + 1), expansion.sines), term.arity)


def argument_term(term: NormalTerm, i: int) -> NormalTerm:
    """The sine argument P_i of summand i as a term of its own."""
    return _flatten(term.expansion.sines[i][0], term.arity)


def canonical_sign(term: NormalTerm) -> int:
    """Sign of the first nonzero entry; equalities and disequalities are stored with +1."""
    lead = _leading_entry(term.expansion)
    return 0 if lead is None else _sign(lead)


def substitute_term(term: NormalTerm, k: int, replacement: Sequence[Number]) -> NormalTerm:
    """Replace x_k everywhere (inside sine atoms too) by ``replacement . (x, 1)``."""
    n = term.arity
    if not 0 <= k < n:
        raise ArityError(f"variable index {k} outside arity {n}")
    if len(replacement) != n + 1:
        raise ArityError(f"replacement has length {len(replacement)}, expected {n + 1}")
    return _flatten(_substitute(term.expansion, k, as_vector(replacement)), n)


# ============= MEASURES =============


def sine_depth(term: NormalTerm) -> int:
    return term.expansion.depth


def is_oscillatory(term: NormalTerm) -> bool:
    return is_zero_vector(term.linear)


def radius(term: NormalTerm) -> Fraction:
    if not is_oscillatory(term):
        raise NonOscillatoryError("radius is defined for oscillatory terms only")
    return sum((abs(s.coefficient) for s in term.summands), Fraction(0))


def occurring_variables(term: NormalTerm) -> Set[int]:
    n = term.arity
    vectors = [term.linear] + [atom.coeffs for atom in term.atoms] + [s.vector for s in term.summands]
    return {j for vector in vectors for j in range(n) if vector[j]}


def is_ground(term: NormalTerm) -> bool:
    return not occurring_variables(term)


def sine_variable_denominators(term: NormalTerm) -> Set[int]:
    """Reduced denominators of variable coefficients inside any sine subterm."""
    n = term.arity
    vectors = [atom.coeffs for atom in term.atoms] + [s.vector for s in term.summands]
    return {vector[j].denominator for vector in vectors for j in range(n) if vector[j]}


# ============= HIGH-PRECISION EVALUATION =============


def _mp_value(value: Union[Number, mpmath.mpf]) -> mpmath.mpf:
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


def _mp_dot(vector: Vector, values: Sequence[mpmath.mpf]) -> mpmath.mpf:
    total = mpmath.mpf(0)
    for coefficient, value in zip(vector, values):
        if coefficient:
            total += _mp_value(coefficient) * value
    return total


def evaluate(term: NormalTerm, point: Sequence[Union[Number, mpmath.mpf]], dps: int = 50) -> mpmath.mpf:
    """Evaluate a normal term at a real point with ``dps`` decimal digits."""
    if len(point) != term.arity:
        raise ArityError(f"point has {len(point)} coordinates, expected {term.arity}")
    with mpmath.workdps(dps):
        base = [_mp_value(v) for v in point] + [mpmath.mpf(1)]
        atoms: List[mpmath.mpf] = []
        for atom in term.atoms:
            atoms.append(mpmath.sin(_mp_dot(atom.coeffs, base + atoms)))
        total = _mp_dot(term.linear, base)
        for summand in term.summands:
            total += _mp_value(summand.coefficient) * mpmath.sin(_mp_dot(summand.vector, base + atoms))
        return +total


def evaluate_raw(raw: RawTerm, point: Sequence[Union[Number, mpmath.mpf]], dps: int = 50) -> mpmath.mpf:
    """Direct recursive evaluation of a raw term (reference for normalization)."""
    with mpmath.workdps(dps):
        return +_evaluate_raw(raw, [_mp_value(v) for v in point])


def _evaluate_raw(raw: RawTerm, point: Sequence[mpmath.mpf]) -> mpmath.mpf:
    if isinstance(raw, Const):
        return _mp_value(as_fraction(raw.value))
    if isinstance(raw, Var):
        return point[raw.index]
    if isinstance(raw, Sum):
        return mpmath.fsum(_evaluate_raw(part, point) for part in raw.terms)
    if isinstance(raw, Scale):
        return _mp_value(as_fraction(raw.factor)) * _evaluate_raw(raw.term, point)
    if isinstance(raw, Sine):
        return mpmath.sin(_evaluate_raw(raw.argument, point))
    raise TypeError(f"not a raw term: {raw!r}")
