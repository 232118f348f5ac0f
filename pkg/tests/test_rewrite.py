import itertools
import random
from collections import Counter

import pytest

from leanevol.engine import enumerate_closure
from leanevol.rewrite import (
    RewriteRule, RuleId, Scope, all_rules, applicable, apply, can_reorder, catalog,
    get_rule, legal_orders, reorder_hypotheses,
)
from leanevol.rewrite.reorder import dependencies, is_legal
from leanevol.syntax import (
    BinaryOp, Binder, Ident, NumLit, Relation, Statement, UnaryOp, parse_expr,
    parse_statement, print_expr,
)

import oracles

P, Q = Ident("P"), Ident("Q")
REAL = {"a": Ident("ℝ"), "b": Ident("ℝ"), "c": Ident("ℝ"), "x": Ident("ℝ"), "y": Ident("ℝ")}
PROPS = {"P": Ident("Prop"), "Q": Ident("Prop"), "R": Ident("Prop")}
NODE_RULES = [r.value for r in RuleId if r is not RuleId.HYPOTHESIS_REORDERING]

SEED_E = ("theorem evolved_thm (x y : ℝ) (h₀ : x * y = 4) (h₁ : x > y) "
          "(h₂ : x^3 - y^3 = 3555) : x^2 + y^2 = 233 := by sorry")


def test_registry_is_the_seven_rules():
    rules = all_rules()
    assert [r.index for r in rules] == list(range(1, 8))
    assert {r.id for r in rules} == set(RuleId)
    assert rules[0].scope is Scope.STATEMENT
    assert all(r.scope is Scope.NODE for r in rules[1:])
    assert [c["id"] for c in catalog()] == [r.id.value for r in rules]
    assert all(c["description"] and c["side_conditions"] for c in catalog())


def test_rule_id_parse_is_lenient():
    assert RuleId.parse("commutativity") is RuleId.COMMUTATIVITY
    assert RuleId.parse("DualRelationConversion") is RuleId.DUAL_RELATION_CONVERSION
    with pytest.raises(ValueError):
        RuleId.parse("Idempotence")


def test_applicability_examples():
    a, b = Ident("a"), Ident("b")
    assert not applicable("Commutativity", BinaryOp("-", a, b), REAL)
    assert applicable("DualRelationConversion", Relation(">", Ident("x"), Ident("y")), REAL)
    assert applicable("DeMorgan", UnaryOp("¬", BinaryOp("∧", P, Q)), PROPS)
    assert applicable("DeMorgan", BinaryOp("∨", UnaryOp("¬", P), UnaryOp("¬", Q)), PROPS)
    assert not applicable("DeMorgan", BinaryOp("∧", P, Q), PROPS)
    assert not applicable("SymmetricOperandSwap", Relation("<", a, b), REAL)
    assert not applicable("SymmetricOperandSwap", Relation("∈", a, b), REAL)
    assert not applicable("Associativity", BinaryOp("+", a, b), REAL)
    assert applicable("Associativity", BinaryOp("+", BinaryOp("+", a, b), Ident("c")), REAL)


def test_arithmetic_rules_need_a_known_carrier():
    e = BinaryOp("+", Ident("u"), Ident("v"))
    assert not applicable("Commutativity", e, {"u": Ident("Foo"), "v": Ident("Foo")})
    assert not applicable("Commutativity", e, {})
    assert applicable("Commutativity", e, {"u": Ident("ℕ"), "v": Ident("ℕ")})
    assert not applicable("Commutativity", e, {"u": Ident("ℝ"), "v": Ident("ℕ")})
    # literals take the carrier of the other side
    assert applicable("Commutativity", BinaryOp("*", NumLit("2"), Ident("u")), {"u": Ident("ℤ")})


def test_nat_subtraction_and_division_inert():
    env = {"n": Ident("ℕ"), "m": Ident("ℕ")}
    for op in ("-", "/"):
        e = BinaryOp(op, Ident("n"), Ident("m"))
        assert not any(applicable(r, e, env) for r in NODE_RULES)


def test_statement_level_applicability():
    s = parse_statement(SEED_E)
    assert applicable("HypothesisReordering", s)
    assert not applicable("Commutativity", s)
    one = parse_statement("theorem t (x : ℝ) (h : 0 < x) : 0 < x := by sorry")
    assert not applicable("HypothesisReordering", one)
    assert not applicable("HypothesisReordering", Relation("=", Ident("a"), Ident("a")))


def test_reorder_example_swap_then_commute():
    h0 = parse_statement(SEED_E).hypotheses[0].prop
    swapped = apply("SymmetricOperandSwap", h0, REAL)
    both = Relation("=", swapped.lhs, apply("Commutativity", swapped.rhs, REAL))
    assert both == Relation("=", NumLit("4"), BinaryOp("*", Ident("y"), Ident("x")))
    assert print_expr(both) == "4 = y * x"


def test_apply_examples():
    assert apply("DeMorgan", UnaryOp("¬", BinaryOp("∧", P, Q)), PROPS) == \
        BinaryOp("∨", UnaryOp("¬", P), UnaryOp("¬", Q))
    assert print_expr(apply("DualRelationConversion", parse_expr("a < b"), REAL)) == "b > a"
    assert print_expr(apply("DualRelationConversion", parse_expr("a ≥ b"), REAL)) == "b ≤ a"
    assert print_expr(apply("SymmetricOperandSwap", parse_expr("a ≠ b"), REAL)) == "b ≠ a"
    assert print_expr(apply("Associativity", parse_expr("a + b + c"), REAL)) == "a + (b + c)"
    assert print_expr(apply("Associativity", parse_expr("a * (b * c)"), REAL)) == "a * b * c"


def test_distributivity_both_directions():
    rule = get_rule("Distributivity")
    expand = parse_expr("a * (b + c)")
    out = apply(rule, expand, REAL)
    assert out == BinaryOp("+", BinaryOp("*", Ident("a"), Ident("b")), BinaryOp("*", Ident("a"), Ident("c")))
    assert expand in rule.candidates(out, REAL)
    assert print_expr(apply(rule, parse_expr("(a + b) * c"), REAL)) == "a * c + b * c"
    assert print_expr(apply(rule, parse_expr("P ∧ (Q ∨ R)"), PROPS)) == "P ∧ Q ∨ P ∧ R"
    assert print_expr(apply(rule, parse_expr("P ∨ Q ∧ R"), PROPS)) == "(P ∨ Q) ∧ (P ∨ R)"

    rng = random.Random(50)
    for _ in range(50):
        env = {v: oracles.rational(rng) for v in "abc"}
        assert oracles.evaluate(expand, env) == oracles.evaluate(out, env)


def test_apply_when_not_applicable_is_a_contract_violation():
    with pytest.raises(ValueError):
        apply("Commutativity", parse_expr("a - b"), REAL)


@pytest.mark.parametrize("rule_id", NODE_RULES)
def test_rule_semantic_equivalence(rule_id):
    assert oracles.rule_failures(rule_id, n=100) == 0


def test_oracle_catches_an_unsound_rule():
    def bogus(e, env):
        if isinstance(e, BinaryOp) and e.op == "-":
            return [BinaryOp("-", e.rhs, e.lhs)]
        if isinstance(e, Relation) and e.rel == "<":
            return [Relation("<", e.rhs, e.lhs)]
        return []

    rule = RewriteRule(RuleId.COMMUTATIVITY, Scope.NODE, 2, "bad", "none", bogus)
    rng = random.Random(3)
    e = parse_expr("a - b")
    assert not oracles.equivalent(e, rule.candidates(e, REAL)[0], "arith", rng)
    e = parse_expr("a < b")
    assert not oracles.equivalent(e, rule.candidates(e, REAL)[0], "relation", rng)


@pytest.mark.parametrize("rule_id", NODE_RULES)
def test_rule_applications_are_invertible(rule_id):
    pairs, kind = oracles.rule_instances(rule_id, n=25, seed=11, max_depth=3)
    carrier = "Prop" if kind == "logic" else "ℚ"
    names = ("p", "q", "r") if kind == "logic" else ("a", "b", "c")
    binders = (Binder(names, Ident(carrier)),)
    for before, after in pairs:
        start = Statement("t", binders, (), after)
        target = Statement("t", binders, (), before)
        assert target in enumerate_closure(start, NODE_RULES, 3), (print_expr(before), print_expr(after))


# ---------------------------------------------------------------------------
# hypothesis reordering


def test_reorder_recorded_seed_matches_reference_order():
    s = parse_statement(SEED_E)
    out = reorder_hypotheses(s, random.Random(1))
    assert [h.label for h in out.hypotheses] == ["h₁", "h₂", "h₀"]
    assert out.goal == s.goal and out.binders == s.binders


def test_reorder_single_hypothesis_unchanged():
    s = parse_statement("theorem t (x : ℝ) (h : 0 < x) : 0 < x := by sorry")
    assert reorder_hypotheses(s, random.Random(0)) == s


def test_reorder_preserves_multiset_and_goal():
    s = parse_statement(SEED_E)
    rng = random.Random(9)
    for _ in range(200):
        out = reorder_hypotheses(s, rng)
        assert Counter(out.hypotheses) == Counter(s.hypotheses)
        assert out.goal == s.goal


def _mentions(h, label):
    return any(tok == label for tok in print_expr(h.prop).replace("(", " ").replace(")", " ").split())


def test_legal_orders_brute_force():
    free = parse_statement(SEED_E)
    assert len(legal_orders(free)) == 6
    assert all(is_legal(p, dependencies(free)) for p in itertools.permutations(range(3)))

    dep = parse_statement("theorem t (x : ℝ) (h₀ : 0 < x) (h₁ : 1 < x) (h₂ : foo h₀ = 1) "
                          "(h₃ : bar h₂ h₁ = 0) : x = x := by sorry")
    hyps = dep.hypotheses
    expected = []
    for perm in itertools.permutations(range(4)):
        ok = all(not _mentions(hyps[j], hyps[i].label)
                 for a, j in enumerate(perm) for i in perm[a + 1:])
        if ok:
            expected.append(perm)
    assert legal_orders(dep) == expected
    rng = random.Random(0)
    for _ in range(100):
        out = reorder_hypotheses(dep, rng)
        order = tuple(hyps.index(h) for h in out.hypotheses)
        assert order in expected


def test_reorder_only_identity_legal():
    chain = parse_statement("theorem t (x : ℝ) (h₀ : 0 < x) (h₁ : foo h₀ = 1) : x = x := by sorry")
    assert not can_reorder(chain)
    assert reorder_hypotheses(chain, random.Random(4)) == chain


def test_reorder_distribution():
    """Uniform over legal orders, with the identity re-drawn once."""
    s = parse_statement(SEED_E)
    rng = random.Random(2024)
    n = 12000
    counts = Counter(tuple(h.label for h in reorder_hypotheses(s, rng).hypotheses) for _ in range(n))
    ident = ("h₀", "h₁", "h₂")
    assert counts[ident] / n == pytest.approx(1 / 36, abs=0.01)
    for order, c in counts.items():
        if order != ident:
            assert c / n == pytest.approx((1 + 1 / 6) / 6, abs=0.02)


def test_printed_rewrites_reparse():
    for rule_id in NODE_RULES:
        pairs, _ = oracles.rule_instances(rule_id, n=30, seed=5)
        for _, after in pairs:
            assert parse_expr(print_expr(after)) == after
