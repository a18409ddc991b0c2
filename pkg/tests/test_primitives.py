import pytest

from morphgp.primitives import (
    DIV_BY_ZERO,
    EMPTY_STRUCTURE,
    PrimError,
    TypeEnv,
    candidates_returning,
    eval_primitive,
    partial_candidates,
    register_all,
)
from morphgp.types import (
    BOOL,
    CHAR,
    FLOAT,
    INT,
    STRING,
    FunT,
    ListT,
    PairT,
    free_vars,
    contains_fun,
)

REG = register_all()


def run(name, *args):
    return eval_primitive(REG[name], args)


def test_registry_contents():
    assert REG["divInt"].params == (INT, INT) and REG["divInt"].ret == INT
    assert "map" not in REG
    assert "filter" not in REG
    assert "sum" not in REG
    assert "product" not in REG
    assert "foldr" not in REG
    if_prim = REG["if"]
    assert [str(t) for t in if_prim.params] == ["Bool", "a", "a"]
    list_ops = {
        "length", "cons", "snoc", "mappend", "elem", "delete", "null", "head",
        "last", "tail", "init", "zip", "replicate", "enumFromThenTo", "reverse",
        "splitAt", "intercalate",
    }
    assert list_ops <= set(REG.by_id)
    assert len(list_ops) == 17


def test_signature_closure():
    # instantiation from a target type plus argument synthesis is always
    # possible: unifying the return grounds a variable or the env enumeration
    # completes it, so offered candidates always have fully ground parameters
    env = TypeEnv.closing_over([INT, BOOL, CHAR, ListT(INT), STRING])
    for target in (INT, BOOL, CHAR, ListT(INT), STRING):
        for prim, subst in candidates_returning(target, env):
            for p in prim.params:
                from morphgp.types import apply_subst
                assert not free_vars(apply_subst(subst, p)), (prim.id, target)


@pytest.mark.parametrize("name,args,expected", [
    ("addInt", (2, 3), 5),
    ("modInt", (7, 3), 1),
    ("modInt", (-3, 2), 1),           # floor modulus
    ("remInt", (-3, 2), -1),          # truncating remainder
    ("divInt", (-7, 2), -4),          # floor division
    ("quotInt", (-7, 2), -3),         # truncation toward zero
    ("minInt", (3, -2), -2),
    ("absInt", (-5,), 5),
    ("succInt", (41,), 42),
    ("fromIntegral", (3,), 3.0),
    ("floor", (2.7,), 2),
    ("ceiling", (2.1,), 3),
    ("round", (2.5,), 2),             # ties to even
    ("round", (3.5,), 4),
    ("ltInt", (1, 2), True),
    ("and", (True, False), False),
    ("not", (False,), True),
    ("eq", ((1, 2), (1, 2)), True),
    ("neq", (1.0, 2.0), True),
    ("showInt", (-5,), tuple("-5")),
    ("showFloat", (1.0,), tuple("1.0")),
    ("showBool", (True,), tuple("True")),
    ("showChar", ("c",), ("c",)),
    ("charToInt", ("A",), 65),
    ("intToChar", (97,), "a"),
    ("isLetter", ("x",), True),
    ("isSpace", (" ",), True),
    ("isDigit", ("7",), True),
    ("length", ((4, 5, 6),), 3),
    ("cons", (1, (2, 3)), (1, 2, 3)),
    ("snoc", (1, (2, 3)), (2, 3, 1)),
    ("mappend", ((1,), (2,)), (1, 2)),
    ("elem", (2, (1, 2)), True),
    ("delete", (2, (1, 2, 2)), (1, 2)),
    ("null", ((),), True),
    ("head", ((7, 8),), 7),
    ("last", ((7, 8),), 8),
    ("tail", ((7, 8),), (8,)),
    ("init", ((7, 8),), (7,)),
    ("zip", ((1, 2, 3), ("a", "b")), ((1, "a"), (2, "b"))),
    ("replicate", (3, 9), (9, 9, 9)),
    ("replicate", (-1, 9), ()),
    ("enumFromThenTo", (1, 3, 6), (1, 3, 5)),
    ("enumFromThenTo", (5, 4, 1), (5, 4, 3, 2, 1)),
    ("enumFromThenTo", (5, 4, 9), ()),        # step moves away from the bound
    ("enumFromThenTo", (1, 1, 5), ()),        # zero step stays finite
    ("reverse", ((1, 2, 3),), (3, 2, 1)),
    ("splitAt", (1, (1, 2, 3)), ((1,), (2, 3))),
    ("splitAt", (-2, (1, 2)), ((), (1, 2))),
    ("splitAt", (9, (1, 2)), ((1, 2), ())),
    ("fst", ((1, "a"),), 1),
    ("snd", ((1, "a"),), "a"),
    ("mkPair", (1, "a"), (1, "a")),
    ("singleton", (1, "a"), ((1, "a"),)),
    ("insert", (2, "b", ((1, "a"),)), ((1, "a"), (2, "b"))),
    ("insert", (1, "b", ((1, "a"),)), ((1, "b"),)),
    ("fromList", (((2, "b"), (1, "a"), (2, "c")),), ((1, "a"), (2, "c"))),
])
def test_primitive_semantics(name, args, expected):
    assert run(name, *args) == expected


def test_intercalate_standard_semantics():
    # joins a list of lists with a separator, per the stdlib meaning
    sep = tuple(", ")
    parts = (tuple("ab"), tuple("cd"))
    assert run("intercalate", sep, parts) == tuple("ab, cd")


@pytest.mark.parametrize("name,args,kind", [
    ("divInt", (1, 0), DIV_BY_ZERO),
    ("quotInt", (1, 0), DIV_BY_ZERO),
    ("modInt", (1, 0), DIV_BY_ZERO),
    ("remInt", (1, 0), DIV_BY_ZERO),
    ("divFloat", (1.0, 0.0), DIV_BY_ZERO),
    ("head", ((),), EMPTY_STRUCTURE),
    ("last", ((),), EMPTY_STRUCTURE),
    ("tail", ((),), EMPTY_STRUCTURE),
    ("init", ((),), EMPTY_STRUCTURE),
])
def test_runtime_errors(name, args, kind):
    with pytest.raises(PrimError) as err:
        run(name, *args)
    assert err.value.kind == kind


def test_int_overflow_is_an_error():
    big = 2**62
    with pytest.raises(PrimError):
        run("addInt", big, big)
    with pytest.raises(PrimError):
        run("multInt", big, 4)
    with pytest.raises(PrimError):
        run("absInt", -(2**63))
    with pytest.raises(PrimError):
        run("intToChar", -1)
    with pytest.raises(PrimError):
        run("intToChar", 0x110000)


def test_purity():
    args = (tuple("hello"), (tuple("ab"), tuple("cd")))
    first = run("intercalate", *args)
    assert run("intercalate", *args) == first


def test_insert_with_direct_callable():
    add = lambda pair: pair[0] + pair[1]
    m = ((1, 10),)
    assert run("insertWith", add, 1, 5, m) == ((1, 15),)
    assert run("insertWith", add, 2, 5, m) == ((1, 10), (2, 5))


ENV_IB = TypeEnv.closing_over([INT, BOOL])
ENV_IL = TypeEnv.closing_over([INT, ListT(INT), BOOL])


def _ids(cands):
    return {p.id for p, _ in cands}


def test_candidates_bool_target():
    ids = _ids(candidates_returning(BOOL, ENV_IB))
    assert {"ltInt", "eq", "not", "and"} <= ids
    assert "ltFloat" not in ids


def test_candidates_int_list_target():
    ids = _ids(candidates_returning(ListT(INT), ENV_IL))
    assert {"cons", "tail", "reverse", "replicate", "enumFromThenTo"} <= ids


def test_candidates_fun_target_empty():
    assert candidates_returning(FunT(INT, INT), ENV_IL) == []
    assert candidates_returning(FunT(INT, INT), TypeEnv.closing_over([FunT(INT, INT)])) == []


def test_candidates_filtered_by_env():
    # the filter is on instantiated parameter types
    env = TypeEnv.closing_over([INT, ListT(INT)])
    assert "zip" in _ids(candidates_returning(ListT(PairT(INT, INT)), env))
    env_no_lists = TypeEnv.closing_over([INT, BOOL])
    assert "zip" not in _ids(candidates_returning(ListT(PairT(INT, INT)), env_no_lists))
    assert "head" not in _ids(candidates_returning(INT, env_no_lists))
    assert "head" in _ids(candidates_returning(INT, env))


def test_candidates_eq_instantiations_exclude_functions():
    env = TypeEnv.closing_over([INT, BOOL, FunT(INT, INT)])
    for prim, subst in candidates_returning(BOOL, env):
        for bound in subst.values():
            assert not contains_fun(bound), (prim.id, subst)


def test_candidates_deterministic_registry_order():
    c1 = candidates_returning(BOOL, ENV_IL)
    c2 = candidates_returning(BOOL, ENV_IL)
    assert [(p.id, s) for p, s in c1] == [(p.id, s) for p, s in c2]
    order = [REG.index[p.id] for p, _ in c1]
    assert order == sorted(order)


def test_partial_candidates_for_super_anagram_scope():
    target = FunT(STRING, STRING)  # e.g. (delete c) :: [Char] -> [Char]
    env = TypeEnv.closing_over([INT, CHAR, BOOL, STRING])
    cands = partial_candidates(target, env)
    assert any(p.id == "delete" and n == 1 for p, n, _ in cands)
    bare = [p.id for p, n, _ in cands if n == 0]
    assert "tail" in bare and "reverse" in bare


def test_partial_candidates_pair_function():
    # insertWith-style operand: a function over a pair
    target = FunT(PairT(INT, INT), INT)
    env = TypeEnv.closing_over([INT, PairT(INT, INT)])
    cands = partial_candidates(target, env)
    assert any(p.id == "fst" and n == 0 for p, n, _ in cands)
    assert any(p.id == "snd" and n == 0 for p, n, _ in cands)
