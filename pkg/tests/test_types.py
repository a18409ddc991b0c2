import random

import pytest

from morphgp.types import (
    BOOL,
    CHAR,
    FLOAT,
    INT,
    STRING,
    FunT,
    ListT,
    MapT,
    PairT,
    Signature,
    VarT,
    apply_subst,
    format_type,
    parse_type,
    unify,
)

A, B = VarT("a"), VarT("b")


def test_unify_single_binding():
    subst = unify(ListT(A), ListT(INT))
    assert subst == {"a": INT}


def test_unify_constructor_clash():
    assert unify(INT, FLOAT) is None


def test_unify_independent_bindings():
    subst = unify(PairT(A, B), PairT(INT, ListT(CHAR)))
    assert subst == {"a": INT, "b": ListT(CHAR)}


def test_unify_applies_to_both_sides():
    t1 = FunT(A, ListT(B))
    t2 = FunT(INT, ListT(FLOAT))
    subst = unify(t1, t2)
    assert apply_subst(subst, t1) == apply_subst(subst, t2) == t2


def test_occurs_check():
    assert unify(A, ListT(A)) is None


def test_unify_chained_variables():
    subst = unify(PairT(A, A), PairT(B, INT))
    assert apply_subst(subst, A) == INT
    assert apply_subst(subst, B) == INT


def _random_type(rng, depth=3):
    if depth == 0 or rng.random() < 0.4:
        return rng.choice([INT, FLOAT, BOOL, CHAR, VarT(rng.choice("abc"))])
    ctor = rng.randrange(4)
    if ctor == 0:
        return ListT(_random_type(rng, depth - 1))
    if ctor == 1:
        return PairT(_random_type(rng, depth - 1), _random_type(rng, depth - 1))
    if ctor == 2:
        return MapT(_random_type(rng, depth - 1), _random_type(rng, depth - 1))
    return FunT(_random_type(rng, depth - 1), _random_type(rng, depth - 1))


def test_unify_symmetric():
    rng = random.Random(7)
    for _ in range(500):
        t1, t2 = _random_type(rng), _random_type(rng)
        assert (unify(t1, t2) is None) == (unify(t2, t1) is None)


def test_format_parse_roundtrip():
    rng = random.Random(8)
    for _ in range(300):
        t = _random_type(rng)
        assert parse_type(format_type(t)) == t


def test_parse_type_concrete_forms():
    assert parse_type("[Char]") == STRING
    assert parse_type("(Float, Int)") == PairT(FLOAT, INT)
    assert parse_type("Map Int Bool") == MapT(INT, BOOL)
    assert parse_type("Int -> Int -> Bool") == FunT(INT, FunT(INT, BOOL))


def test_signature_rejects_type_variables():
    with pytest.raises(ValueError):
        Signature((ListT(A),), INT)
