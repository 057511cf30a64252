"""Finite-model oracle: interpretation, judgment checks, axiom instances."""

from __future__ import annotations

import itertools

import pytest

from ogkernel.semantics import (
    FAILS,
    HOLDS,
    NOT_FINITELY_CHECKABLE,
    Carrier,
    InterpretationError,
    Model,
    default_model,
    interpret,
    interpret_fn,
    models_for_judgment,
    soundness_sweep,
    tag_members,
    verify_axiom_instances,
    verify_judgment,
)
from ogkernel.terms import (
    NAT,
    TWO,
    BuiltinRule,
    Ident,
    IsBinFn,
    IsDomain,
    IsGen,
    IsMor,
    IsObj,
    IsSet,
    Named,
    ObjLit,
    Powerset,
    Product,
    SupportsQuant,
    Table,
)


def _named(name: str, *tags: str) -> tuple[Named, Model]:
    expr = Named(Ident(name))
    model = Model.make({name: Carrier(name, tags)}, nat_bound=3)
    return expr, model


def test_interpret_powerset_and_product_counts():
    model = default_model()
    assert len(interpret(Powerset(TWO), model)) == 4
    assert len(interpret(Product(TWO, TWO), model)) == 4
    # oracle: all maps from a 4-element set to {0, 1}, enumerated directly
    base = interpret(Powerset(TWO), model)
    expected = sum(1 for _ in itertools.product((0, 1), repeat=len(base)))
    assert len(interpret(Powerset(Powerset(TWO)), model)) == expected == 16


def test_powerset_cardinality_law_up_to_8():
    for n in range(0, 9):
        expr, model = _named("A", *(f"x{i}" for i in range(n)))
        carrier = interpret(Powerset(expr), model)
        assert len(carrier) == 2**n
        # index 0 is the empty (always-no) table
        assert carrier.objects[0] == "{}"
        assert len(set(carrier.objects)) == 2**n


def test_detector_flags_exactly_the_empty_table_up_to_8():
    for n in range(0, 9):
        expr, model = _named("A", *(f"x{i}" for i in range(n)))
        detector = interpret_fn(BuiltinRule("empty_detector_of", (expr,)), model)
        flagged = [tag for tag, value in detector.items() if value == "yes"]
        assert flagged == ["{}"]


def test_interpret_errors():
    with pytest.raises(InterpretationError):
        interpret(Named(Ident("Mystery")), default_model())
    verdict = verify_judgment(IsGen(NAT), Model.make({}, nat_bound=None))
    assert verdict.status == NOT_FINITELY_CHECKABLE


def test_nat_truncation_flag():
    verdict = verify_judgment(IsGen(NAT), default_model(nat_bound=2))
    assert verdict.status == HOLDS and verdict.truncated


def test_verify_domain_examples():
    diagonal = BuiltinRule("eq_of", (TWO,))
    assert verify_judgment(IsDomain(TWO, diagonal), default_model()).holds

    constant_yes = Table(
        Product(TWO, TWO),
        TWO,
        tuple(
            (ObjLit(f"({x},{y})", Product(TWO, TWO)), ObjLit("yes", TWO))
            for x in ("yes", "no")
            for y in ("yes", "no")
        ),
    )
    verdict = verify_judgment(IsDomain(TWO, constant_yes), default_model())
    assert verdict.status == FAILS
    witness = dict(verdict.witness)
    assert witness["x"] != witness["y"] and witness["got"] == "yes"


def test_supports_quant_search_on_three_objects():
    expr, model = _named("A", "x", "y", "z")
    verdict = verify_judgment(SupportsQuant(expr), model)
    assert verdict.holds
    # oracle: among all 8 tables over a 3-object carrier exactly one is
    # empty, and the detector flags exactly that one
    detector = interpret_fn(BuiltinRule("empty_detector_of", (expr,)), model)
    assert len(detector) == 8
    assert sum(1 for v in detector.values() if v == "yes") == 1


def test_supports_quant_constructive_path():
    # beyond the search bound of 4 objects the canonical detector is used
    expr, model = _named("A", *(f"x{i}" for i in range(6)))
    verdict = verify_judgment(SupportsQuant(expr), model)
    assert verdict.holds and "canonical" in verdict.detail


def test_supports_quant_blows_up_gracefully():
    verdict = verify_judgment(
        SupportsQuant(Powerset(Powerset(NAT))), default_model(nat_bound=2)
    )
    assert verdict.status == NOT_FINITELY_CHECKABLE


def test_extensional_equality_on_powerset_up_to_5():
    for n in range(0, 6):
        expr, model = _named("A", *(f"x{i}" for i in range(n)))
        eq = interpret_fn(BuiltinRule("eq_of", (Powerset(expr),)), model)
        carrier = interpret(Powerset(expr), model)
        for f in carrier.objects:
            for g in carrier.objects:
                # oracle: pointwise agreement of the member sets
                agree = set(tag_members(f)) == set(tag_members(g))
                assert eq[f"({f},{g})"] == ("yes" if agree else "no")


def test_mor_verification():
    expr, model = _named("A", "x", "y")
    good = Table(
        expr, TWO, ((ObjLit("x", expr), ObjLit("yes", TWO)), (ObjLit("y", expr), ObjLit("no", TWO)))
    )
    assert verify_judgment(IsMor(good, expr, TWO), model).holds
    assert verify_judgment(IsBinFn(good, expr), model).holds
    bad_value = Table(
        expr, TWO, ((ObjLit("x", expr), ObjLit("zap", TWO)), (ObjLit("y", expr), ObjLit("no", TWO)))
    )
    assert verify_judgment(IsMor(bad_value, expr, TWO), model).status == FAILS
    # a table whose objects differ from the model carrier is not
    # interpretable there, rather than false
    bigger = Model.make({"A": Carrier("A", ("x", "y", "z"))}, nat_bound=3)
    assert (
        verify_judgment(IsMor(good, expr, TWO), bigger).status
        == NOT_FINITELY_CHECKABLE
    )


def test_is_obj_examples():
    model = default_model(nat_bound=3)
    assert verify_judgment(IsObj(ObjLit("yes", TWO), TWO), model).holds
    assert verify_judgment(IsObj(ObjLit("7", NAT), NAT), model).holds
    verdict = verify_judgment(IsObj(ObjLit("maybe", TWO), TWO), model)
    assert verdict.status == FAILS
    limit = ObjLit("limit(restrictions(squares))", Powerset(NAT))
    assert verify_judgment(IsObj(limit, Powerset(NAT)), model).holds
    broken = ObjLit("limit(corrupt(squares,3,1))", Powerset(NAT))
    assert verify_judgment(IsObj(broken, Powerset(NAT)), model).status == FAILS


def test_is_set_reduces_to_quantification_support():
    model = default_model()
    assert verify_judgment(IsSet(TWO), model).holds
    assert verify_judgment(IsSet(Powerset(NAT)), default_model(nat_bound=2)).holds


def test_axiom_instances_default_model():
    checks = {c.axiom: c for c in verify_axiom_instances(default_model())}
    assert checks["H1"].status == HOLDS
    assert checks["H2"].status == HOLDS
    assert checks["H3"].status == "assumed"
    assert "truncated" in checks["H3"].detail
    assert checks["H4"].status == HOLDS


def test_axiom_instances_ignore_unrelated_two_sized_carriers():
    model = Model.make({"TwoPrime": Carrier("TwoPrime", ("only",))}, nat_bound=2)
    checks = {c.axiom: c for c in verify_axiom_instances(model)}
    assert checks["H1"].status == HOLDS  # Two itself is fixed


def test_axiom_instances_detect_corruption():
    # test hook: an interpretation that drops one table from every powerset
    def corrupted(expr, model):
        carrier = interpret(expr, model)
        if isinstance(expr, Powerset):
            return Carrier(carrier.name, carrier.objects[:-1])
        return carrier

    checks = {
        c.axiom: c
        for c in verify_axiom_instances(default_model(), _interpret=corrupted)
    }
    assert checks["H4"].status == FAILS
    assert checks["H4"].witness is not None


class _FakeTheorem:
    def __init__(self, judgment):
        self.judgment = judgment


def test_soundness_sweep_flags_corrupt_judgments():
    constant_yes = Table(
        Product(TWO, TWO),
        TWO,
        tuple(
            (ObjLit(f"({x},{y})", Product(TWO, TWO)), ObjLit("yes", TWO))
            for x in ("yes", "no")
            for y in ("yes", "no")
        ),
    )
    report = soundness_sweep([_FakeTheorem(IsDomain(TWO, constant_yes))], max_size=3)
    assert report.fails > 0
    assert report.failures[0].witness is not None


def test_soundness_sweep_empty():
    report = soundness_sweep([], max_size=3)
    assert report.checked == 0 and report.items == ()


def test_models_for_judgment_canonical_order():
    judgment = IsGen(Product(Named(Ident("A")), NAT))
    models = models_for_judgment(judgment, 2)
    descriptions = [m.describe() for m in models]
    assert descriptions == [
        "model(A:1, nat<=:0)",
        "model(A:1, nat<=:1)",
        "model(A:2, nat<=:0)",
        "model(A:2, nat<=:1)",
    ]
    # no names, no Nat: a single trivial model
    assert len(models_for_judgment(IsGen(TWO), 3)) == 1
