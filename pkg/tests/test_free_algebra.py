import pytest
from hypothesis import given, settings, strategies as st

from forcebench.errors import ChainEscapeViolation, ChainNotDescending
from forcebench.free_algebra import (
    FREE_ONE,
    FREE_ZERO,
    FreeAlgebra,
    GAnd,
    GConst,
    GNot,
    GOr,
    GVar,
    GeneratorChain,
    all_meet,
    chain_vanishing,
    format_free,
    free_normalize,
    free_project,
    generator,
    parse_free_expression,
)

from .oracles import element_truth_table, expr_vars, truth_table


GENS = ("x0", "x1", "x2", "y")


def exprs(depth=4):
    leaf = st.one_of(
        st.sampled_from([GVar(g) for g in GENS]),
        st.sampled_from([GConst(True), GConst(False)]),
    )
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.builds(GNot, sub),
            st.builds(GAnd, sub, sub),
            st.builds(GOr, sub, sub),
        ),
        max_leaves=depth * 4,
    )


def test_normalize_contradiction_and_tautology():
    x0 = GVar("x0")
    assert free_normalize(GAnd(x0, GNot(x0))) == FREE_ZERO
    assert free_normalize(GOr(x0, GNot(x0))) == FREE_ONE


def test_normalize_absorbs():
    e = parse_free_expression("(x0 ∨ x1) ∧ ¬x1")
    f = parse_free_expression("x0 ∧ ¬x1")
    lhs, rhs = free_normalize(e), free_normalize(f)
    assert lhs == rhs
    # truth-table oracle over {x0, x1}
    assert truth_table(e, ("x0", "x1")) == truth_table(f, ("x0", "x1"))


def test_normalize_idempotent_on_elements():
    e = free_normalize(parse_free_expression("x0 ∧ (x1 ∨ ¬x2)"))
    assert free_normalize(e) == e


@settings(max_examples=200)
@given(exprs())
def test_normalize_matches_truth_table(expr):
    e = free_normalize(expr)
    assert element_truth_table(e, GENS) == truth_table(expr, GENS)


@settings(max_examples=200)
@given(exprs(), exprs())
def test_leq_iff_meet_with_negation_vanishes(a, b):
    ea, eb = free_normalize(a), free_normalize(b)
    assert ea.leq(eb) == (ea & ~eb).is_zero
    ta, tb = truth_table(a, GENS), truth_table(b, GENS)
    assert ea.leq(eb) == all(not x or y for x, y in zip(ta, tb))


@settings(max_examples=150)
@given(exprs())
def test_support_is_essential(expr):
    e = free_normalize(expr)
    for g in e.support:
        # flipping an essential generator changes the function somewhere
        names = tuple(sorted(e.support))
        table = element_truth_table(e, names)
        idx = names.index(g)
        changed = False
        for row in range(len(table)):
            if table[row] != table[row ^ (1 << (len(names) - 1 - idx))]:
                changed = True
                break
        assert changed
    assert e.support <= expr_vars(expr)


def test_parse_ascii_and_unicode_agree():
    a = free_normalize(parse_free_expression("x0 & !(x1 | 0)"))
    b = free_normalize(parse_free_expression("x0 ∧ ¬(x1 ∨ 0)"))
    assert a == b


def test_format_roundtrip():
    for text in ("0", "1", "x0", "¬x0", "x0 ∧ x1", "x0 ∨ (x1 ∧ ¬x2)"):
        e = free_normalize(parse_free_expression(text))
        assert free_normalize(parse_free_expression(format_free(e))) == e


def test_project_examples():
    x0, y = generator("x0"), generator("y")
    assert free_project(x0 & y, {"y"}) == x0
    assert free_project(y, {"y"}) == FREE_ONE
    assert free_project(x0, {"y"}) == x0


@settings(max_examples=150)
@given(exprs(), st.sets(st.sampled_from(GENS)))
def test_project_is_least_independent_upper_bound(expr, gens):
    e = free_normalize(expr)
    p = free_project(e, gens)
    assert e.leq(p)
    assert p.support.isdisjoint(gens)
    assert free_project(p, gens) == p  # idempotent
    # least: oracle by scanning all functions over the remaining generators
    rest = tuple(g for g in GENS if g not in gens)
    if len(rest) <= 2:
        t_e = element_truth_table(e, GENS)
        best = None
        for bits in range(1 << (1 << len(rest))):
            tbl = [(bits >> k) & 1 for k in range(1 << len(rest))]
            # expand over all of GENS and compare against e
            ok = True
            for row in range(1 << len(GENS)):
                sub_row = 0
                for j, g in enumerate(rest):
                    gi = GENS.index(g)
                    bit = row >> (len(GENS) - 1 - gi) & 1
                    sub_row = (sub_row << 1) | bit
                if t_e[row] and not tbl[sub_row]:
                    ok = False
                    break
            if ok and (best is None or sum(tbl) < sum(best)):
                best = tbl
        t_p = element_truth_table(p, rest) if rest else ((not p.is_zero),)
        assert list(t_p) == [bool(v) for v in best]


@settings(max_examples=100)
@given(exprs(), exprs(), st.sets(st.sampled_from(GENS)))
def test_project_monotone(a, b, gens):
    ea, eb = free_normalize(a), free_normalize(b)
    if ea.leq(eb):
        assert free_project(ea, gens).leq(free_project(eb, gens))
    assert free_project(ea | eb, gens) == free_project(ea, gens) | free_project(eb, gens)


def cylinder_chain():
    return GeneratorChain(
        element_at=lambda n: all_meet(generator(f"x{k}") for k in range(n)),
        generator_at=lambda j: f"x{j}",
    )


def test_chain_vanishing_zero():
    v = chain_vanishing(FREE_ZERO, cylinder_chain())
    assert v.is_zero


def test_chain_vanishing_fails_at_expected_index():
    x0, x1 = generator("x0"), generator("x1")
    v = chain_vanishing(x0 & x1, cylinder_chain())
    assert v.kind == "fails_at" and v.index == 3
    v = chain_vanishing(x0, cylinder_chain())
    assert v.kind == "fails_at" and v.index == 2


def test_chain_vanishing_foreign_support_fails_immediately():
    v = chain_vanishing(generator("z5"), cylinder_chain())
    assert v.kind == "fails_at" and v.index == 1


def test_chain_not_descending_detected():
    chain = GeneratorChain(
        element_at=lambda n: generator(f"x{n-1}"),  # x0, x1, x2, ... not descending
        generator_at=lambda j: f"x{j}",
    )
    with pytest.raises(ChainNotDescending):
        chain_vanishing(generator("x0") & generator("x1"), chain)


def test_chain_escape_violation_detected():
    constant = GeneratorChain(
        element_at=lambda n: generator("x0"),
        generator_at=lambda j: f"x{j}",
    )
    with pytest.raises(ChainEscapeViolation):
        chain_vanishing(generator("x0"), constant)


def test_free_algebra_membership():
    alg = FreeAlgebra(frozenset({"x0", "x1"}))
    assert alg.contains(free_normalize(parse_free_expression("x0 ∧ x1")))
    assert not alg.contains(generator("y0"))
    with pytest.raises(ValueError):
        alg.var("y0")
