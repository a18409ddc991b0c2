import random

import pytest

from conftest import make_context, random_individuals
from morphgp.expr import (
    App,
    Const,
    PartialApp,
    TypecheckError,
    Var,
    iter_nodes,
    node_at,
    replace_at,
    typecheck,
    typechecks,
)
from morphgp.schemes import PatternKind
from morphgp.syntax import (
    ExprSyntaxError,
    format_champion,
    format_expr,
    format_scaffold,
    parse_champion_header,
    parse_expr,
    parse_scaffold,
)
from morphgp.types import BOOL, CHAR, FLOAT, INT, STRING, FunT, ListT, PairT

X = Var("x", INT)
ACC = Var("acc", INT)
SCOPE = {"x": INT, "acc": INT}


def test_depth_and_size():
    assert Const(0, INT).depth == 1 and Const(0, INT).size == 1
    e = App("addInt", (X, Const(1, INT)), INT)
    assert e.depth == 2 and e.size == 3
    nested = App("addInt", (App("multInt", (X, X), INT), Const(1, INT)), INT)
    assert nested.depth == 3 and nested.size == 5


def test_typecheck_var_lookup():
    assert typecheck(Var("acc", INT), {"acc": INT}) == INT
    with pytest.raises(TypecheckError):
        typecheck(Var("ghost", INT), SCOPE)


def test_typecheck_argument_mismatch():
    bad = App("addInt", (Const(1, INT), Const(True, BOOL)), INT)
    with pytest.raises(TypecheckError):
        typecheck(bad, {})


def test_typecheck_instantiates_polymorphic_signature():
    e = App("length", (Var("arg0", STRING),), INT)
    assert typecheck(e, {"arg0": STRING}) == INT


def test_typecheck_partial_app():
    pa = PartialApp("addInt", (Const(10, INT),), FunT(INT, INT))
    assert typecheck(pa, {}) == FunT(INT, INT)
    bad = PartialApp("addInt", (Const(10, INT),), FunT(BOOL, INT))
    assert not typechecks(bad, {})


def test_node_paths():
    e = App("addInt", (App("multInt", (X, ACC), INT), Const(1, INT)), INT)
    paths = [p for p, _ in iter_nodes(e)]
    assert paths == [(), (0,), (0, 0), (0, 1), (1,)]
    assert node_at(e, (0, 1)) == ACC
    swapped = replace_at(e, (1,), X)
    assert swapped.args[1] == X and e.args[1] == Const(1, INT)


@pytest.mark.parametrize("text,t", [
    ("addInt (length arg0) 1", INT),
    ("if (ltInt x 0) 0 x", INT),
    ("cons 'a' \"bc\"", STRING),
    ("eq arg0 (reverse arg1)", BOOL),
    ("mkPair 1 0.5", PairT(INT, FLOAT)),
    ("head [1, 2, 3]", INT),
    ("subInt 3 (-1)", INT),
    ("apply (delete 'a') \"abc\"", STRING),
])
def test_parse_well_typed(text, t):
    scope = {"x": INT, "arg0": STRING if "length" in text or "delete" not in text else STRING}
    scope = {"x": INT, "arg0": ListT(INT), "arg1": ListT(INT)}
    if "length" in text:
        scope["arg0"] = STRING
    e = parse_expr(text, scope)
    assert e.type == t
    assert typechecks(e, scope, t)


def test_parse_rejects_unbound_and_untypeable():
    with pytest.raises(ExprSyntaxError):
        parse_expr("nothere", {})
    with pytest.raises(ExprSyntaxError):
        parse_expr("addInt 1 'a'", {})
    assert parse_expr("[]", {}, ListT(CHAR)).type == ListT(CHAR)
    # a wholly unconstrained empty list defaults its (inert) element type
    assert parse_expr("[]", {}).type == ListT(INT)


def test_print_parse_fixed_point_on_random_trees():
    seen = 0
    for name, kind in [
        ("count-odds", PatternKind.CATA),
        ("grade", PatternKind.CURRIED_CATA),
        ("for-loop-index", PatternKind.ANA),
        ("vector-average", PatternKind.ACCU),
        ("replace-space-with-newline", PatternKind.NO_SCHEME),
        ("sum-of-squares", PatternKind.HYLO),
    ]:
        _, inst, _, pop = random_individuals(name, kind, 40, seed=3)
        for ind in pop:
            for spec, e in zip(inst.slots, ind.slots):
                text = format_expr(e)
                back = parse_expr(text, spec.scope_types(), spec.out_type)
                assert format_expr(back) == text  # print . parse is a fixed point
                assert typechecks(back, spec.scope_types(), spec.out_type)
                seen += 1
    assert seen > 400


def test_generated_trees_typecheck_in_bulk():
    import random as _r

    from morphgp.evolve import GenContext, full_tree, grow_tree

    for name, kind in [("count-odds", PatternKind.CATA), ("smallest", PatternKind.NO_SCHEME)]:
        _, inst, ctx = make_context(name, kind)
        rng = _r.Random(99)
        for i in range(10_000):
            spec = inst.slots[i % len(inst.slots)]
            gen = grow_tree if i % 2 else full_tree
            e = gen(spec.out_type, spec.scope, 1 + i % 5, rng, ctx)
            assert typechecks(e, spec.scope_types(), spec.out_type)
            assert e.depth <= 5


def test_scaffold_roundtrip_all_patterns():
    cases = [
        ("smallest", PatternKind.NO_SCHEME),
        ("count-odds", PatternKind.CATA),
        ("super-anagrams", PatternKind.CURRIED_CATA),
        ("even-squares", PatternKind.ANA),
        ("vector-average", PatternKind.ACCU),
        ("collatz-numbers", PatternKind.HYLO),
    ]
    for name, kind in cases:
        _, inst, _, pop = random_individuals(name, kind, 10, seed=5)
        for ind in pop:
            text = format_scaffold(inst, ind.slots)
            back = parse_scaffold(text, inst)
            assert format_scaffold(inst, back) == text
            for spec, e in zip(inst.slots, back):
                assert typechecks(e, spec.scope_types(), spec.out_type)


def test_champion_header_roundtrip():
    _, inst, _, pop = random_individuals("sum-of-squares", PatternKind.HYLO, 1, seed=2)
    text = format_champion("sum-of-squares", inst, pop[0].slots, seed=17)
    meta, body = parse_champion_header(text)
    assert meta["problem"] == "sum-of-squares"
    assert meta["pattern"] == PatternKind.HYLO
    assert meta["unbound"] == INT
    assert meta["seed"] == 17
    assert tuple(parse_scaffold(body, inst)) == pop[0].slots


def test_string_and_char_escapes_roundtrip():
    for value in ("a\nb", "say \"hi\"", "tab\tend", "back\\slash"):
        e = Const(tuple(value), STRING)
        assert parse_expr(format_expr(e), {}, STRING) == e
    for ch in ("\n", "'", "\\", '"'):
        e = Const(ch, CHAR)
        assert parse_expr(format_expr(e), {}, CHAR) == e
