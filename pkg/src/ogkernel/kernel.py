"""The trusted core: Theorem values exist only as outputs of this module.

Five axioms (H1 the two-element set, H2 choice-as-sections, H3 the naturals
support quantification, H4 powerset closure exposed as a unary rule, and the
coherent-limit axiom exposed through `coherent_limit`) plus a small fixed set
of inference rules.  Every theorem carries a replayable trace; `verify_trace`
re-derives the judgment from the trace and reports per-node pass/fail.
"""

from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from . import streams
from .semantics import (
    Model,
    NotFinitelyCheckable,
    _fn_value,
    fn_signature,
    interpret,
)
from .terms import (
    NAT,
    TWO,
    BuiltinRule,
    FamilySpec,
    FnExpr,
    GenExpr,
    Ident,
    IsBinFn,
    IsCoherentFamily,
    IsDomain,
    IsGen,
    IsMor,
    IsObj,
    IsSet,
    Judgment,
    Named,
    Nat,
    ObjLit,
    Powerset,
    Product,
    SupportsQuant,
    Table,
    Two,
    render,
)

__all__ = [
    "AxiomId",
    "RuleId",
    "AXIOM_STATEMENTS",
    "Theorem",
    "TraceNode",
    "Kernel",
    "EqQuery",
    "KernelError",
    "SchemaError",
    "NameClashError",
    "PremiseError",
    "TotalityError",
    "CodomainError",
    "CatalogError",
    "EqualityLawError",
    "CrossDomainEqualityError",
    "CounterexampleError",
    "verify_trace",
    "TraceReport",
    "TraceEntry",
    "axioms_used",
    "trace_nodes",
    "leaf_kinds",
]


class KernelError(Exception):
    """Base class for kernel-side refusals."""


class SchemaError(KernelError):
    """An axiom or rule was invoked with the wrong shape of arguments."""


class NameClashError(KernelError):
    """A generator name was declared twice."""


class PremiseError(KernelError):
    """A rule's premises do not have the required judgment forms."""


class TotalityError(KernelError):
    """A table morphism is not total over its domain carrier."""


class CodomainError(KernelError):
    """A table row mentions an object outside the declared carriers."""


class CatalogError(KernelError):
    """A builtin rule was requested outside its catalog entry."""


class EqualityLawError(KernelError):
    """A claimed equality pairing does not flag exactly the diagonal."""


class CrossDomainEqualityError(KernelError):
    """Equality queried between objects of different generators.

    This refusal is the point: '=' exists only within a single set.
    """


class CounterexampleError(KernelError):
    """A choice instance failed: the map is not surjective in the model."""

    def __init__(self, message: str, model: Model, uncovered: str):
        super().__init__(message)
        self.model = model
        self.uncovered = uncovered


class AxiomId(Enum):
    H1_TWO_IS_SET = "H1"
    H2_CHOICE = "H2"
    H3_NAT_SUPPORTS_QUANT = "H3"
    H4_POWERSET_QUANT = "H4"
    CLA_COHERENT_LIMIT = "CLA"

    @classmethod
    def from_name(cls, name: str) -> "AxiomId":
        for member in cls:
            if member.value == name:
                return member
        raise SchemaError(f"unknown axiom: {name!r}")


AXIOM_STATEMENTS: dict[AxiomId, str] = {
    AxiomId.H1_TWO_IS_SET: "there is a 2-element set",
    AxiomId.H2_CHOICE: (
        "the axiom of Choice: every surjection between sets admits a section"
    ),
    AxiomId.H3_NAT_SUPPORTS_QUANT: "the natural numbers support quantification",
    AxiomId.H4_POWERSET_QUANT: (
        "if a logical domain supports quantification then so does its powerset"
    ),
    AxiomId.CLA_COHERENT_LIMIT: (
        "a coherent family of finite-stage binary functions on the naturals "
        "has its union as a genuine binary function"
    ),
}


class RuleId(Enum):
    GEN_INTRO = "gen_intro"
    MOR_INTRO = "mor_intro"
    BIN_FN_FROM_MOR = "bin_fn_from_mor"
    DOMAIN_INTRO = "domain_intro"
    SET_INTRO = "set_intro"
    SQUANT_FROM_POWERSET = "squant_from_powerset"
    COHERENT_LIMIT = "coherent_limit"
    EQ_WITHIN_DOMAIN = "eq_within_domain"


# Rules that *are* axioms in closure form: applications count as axiom uses.
_RULE_AXIOMS = {
    RuleId.SQUANT_FROM_POWERSET: AxiomId.H4_POWERSET_QUANT,
    RuleId.COHERENT_LIMIT: AxiomId.CLA_COHERENT_LIMIT,
}


@dataclass(frozen=True, eq=False)
class TraceNode:
    """One derivation step.  Nodes compare by identity so that shared
    premises (the same Theorem used twice) are counted once in a trace."""

    kind: str  # "axiom" | "decl" | "rule"
    label: str
    judgment: Judgment
    children: tuple["TraceNode", ...] = ()
    payload: tuple = ()


_SEAL = object()


class Theorem:
    """A sealed witness of a kernel-derived judgment plus its rule trace."""

    __slots__ = ("_judgment", "_node", "_parts")

    def __init__(self, judgment, node, parts=(), *, _token=None):
        if _token is not _SEAL:
            raise TypeError("Theorem values are created only by kernel operations")
        self._judgment = judgment
        self._node = node
        self._parts = tuple(parts)

    @property
    def judgment(self) -> Judgment:
        return self._judgment

    @property
    def node(self) -> TraceNode:
        return self._node

    @property
    def parts(self) -> tuple["Theorem", ...]:
        """Constituent theorems (an IsSet carries its IsDomain and
        SupportsQuant facts about the same expression)."""
        return self._parts

    def __repr__(self) -> str:
        return f"|- {render(self._judgment)}"


def _theorem(judgment, node, parts=()) -> Theorem:
    return Theorem(judgment, node, parts, _token=_SEAL)


@dataclass(frozen=True)
class EqQuery:
    """A well-formed within-domain equality question, evaluable in models."""

    domain: Theorem
    left: ObjLit
    right: ObjLit

    def evaluate(self, model: Model) -> str:
        dom_judgment = self.domain.judgment
        assert isinstance(dom_judgment, IsDomain)
        carrier = interpret(dom_judgment.expr, model)
        for lit in (self.left, self.right):
            if lit.tag not in carrier.objects and not (
                isinstance(dom_judgment.expr, Nat) and lit.tag.isdigit()
            ):
                raise KernelError(
                    f"{lit.tag!r} is not an object of {carrier.name} in this model"
                )
        value = _fn_value(dom_judgment.eq, model, f"({self.left.tag},{self.right.tag})")
        if value is None:
            raise KernelError("equality pairing has no value at this pair")
        return value


# ---------------------------------------------------------------------------
# Rule checkers (used both at construction time and during trace replay)


def _axiom_judgment(axiom: AxiomId, payload: tuple) -> Judgment:
    if axiom is AxiomId.H1_TWO_IS_SET:
        (part,) = payload
        if part == "domain":
            return IsDomain(TWO, BuiltinRule("eq_of", (TWO,)))
        if part == "squant":
            return SupportsQuant(TWO)
        raise SchemaError(f"unknown H1 part {part!r}")
    if axiom is AxiomId.H3_NAT_SUPPORTS_QUANT:
        return SupportsQuant(NAT)
    if axiom is AxiomId.H2_CHOICE:
        surj, dom, cod, model = payload
        return _choice_judgment(surj, dom, cod, model)
    raise SchemaError(f"{axiom.value} has no leaf judgment")


def _choice_judgment(surj: FnExpr, dom: GenExpr, cod: GenExpr, model: Model) -> Judgment:
    _check_mor(surj, dom, cod, model, ())
    dom_carrier = interpret(dom, model)
    cod_carrier = interpret(cod, model)
    table = {tag: _fn_value(surj, model, tag) for tag in dom_carrier.objects}
    section_rows = []
    for target in cod_carrier.objects:
        preimages = [x for x in dom_carrier.objects if table[x] == target]
        if not preimages:
            raise CounterexampleError(
                f"not surjective in {model.describe()}: {target!r} is uncovered",
                model=model,
                uncovered=target,
            )
        section_rows.append((ObjLit(target, cod), ObjLit(preimages[0], dom)))
    section = Table(cod, dom, tuple(section_rows))
    return IsMor(section, cod, dom)


def _required_squants(expr: GenExpr) -> tuple[GenExpr, ...]:
    """Which SupportsQuant premises the builtin equality on `expr` needs."""
    if isinstance(expr, (Two, Nat)):
        return ()
    if isinstance(expr, Product):
        return _required_squants(expr.left) + _required_squants(expr.right)
    if isinstance(expr, Powerset):
        # Extensional equality on P[B] is the detector applied to the
        # symmetric difference, so it needs exactly the detector on B.
        return (expr.arg,)
    raise CatalogError(
        f"no builtin equality for {render(expr)}: primitive generators "
        "provide no identity on their objects"
    )


def _builtin_premises(fn: BuiltinRule) -> tuple[GenExpr, ...]:
    if fn.rule == "eq_of":
        (arg,) = fn.args
        if not isinstance(arg, GenExpr):
            raise CatalogError("eq_of takes one generator expression")
        return _required_squants(arg)
    if fn.rule == "empty_detector_of":
        (arg,) = fn.args
        if not isinstance(arg, GenExpr):
            raise CatalogError("empty_detector_of takes one generator expression")
        return (arg,)
    if fn.rule in ("indicator_stream", "restrict", "union_of_family"):
        return ()
    raise CatalogError(f"unknown builtin rule {fn.rule!r}")


def _check_mor(
    fn: FnExpr,
    dom: GenExpr,
    cod: GenExpr,
    model: Model | None,
    premises: tuple[Judgment, ...],
) -> Judgment:
    if isinstance(fn, Table):
        if fn.domain != dom or fn.codomain != cod:
            raise PremiseError(
                f"table is declared {render(fn.domain)} -> {render(fn.codomain)}, "
                f"not {render(dom)} -> {render(cod)}"
            )
        if model is None:
            raise TotalityError(
                "a finite model is required to check totality of a table"
            )
        try:
            dom_carrier = interpret(dom, model)
            cod_carrier = interpret(cod, model)
        except NotFinitelyCheckable as exc:
            raise TotalityError(f"cannot check totality: {exc}") from exc
        rows = {key.tag: val.tag for key, val in fn.rows}
        for tag in rows:
            if tag not in dom_carrier.objects:
                raise CodomainError(f"row key {tag!r} is not an object of the domain")
        for tag in dom_carrier.objects:
            if tag not in rows:
                raise TotalityError(f"table has no row for {tag!r}")
            if rows[tag] not in cod_carrier.objects:
                raise CodomainError(
                    f"row value {rows[tag]!r} is not an object of the codomain"
                )
    elif isinstance(fn, BuiltinRule):
        if fn.rule == "restrict":
            raise CatalogError(
                "restrictions are partial on the naturals; they are family "
                "stages, not total morphisms"
            )
        declared_dom, declared_cod = fn_signature(fn)
        if declared_dom != dom or declared_cod != cod:
            raise CatalogError(
                f"builtin {fn.rule} has signature {render(declared_dom)} -> "
                f"{render(declared_cod)}, not {render(dom)} -> {render(cod)}"
            )
        if fn.rule in ("indicator_stream", "restrict", "union_of_family"):
            # Totality is a catalog guarantee; validate the spec resolves.
            spec = fn.args[0]
            if fn.rule == "union_of_family":
                streams.resolve_family(str(spec))
            else:
                streams.parse_stream_spec(str(spec))
        required = tuple(SupportsQuant(b) for b in _builtin_premises(fn))
        if premises != required:
            raise PremiseError(
                f"builtin {fn.rule} on {render(dom)} requires premises "
                f"[{', '.join(render(r) for r in required)}], got "
                f"[{', '.join(render(p) for p in premises)}]"
            )
    else:
        raise SchemaError(f"not a function expression: {fn!r}")
    return IsMor(fn, dom, cod)


def _check_rule(rule: RuleId, payload: tuple, premises: tuple[Judgment, ...]) -> Judgment:
    if rule is RuleId.GEN_INTRO:
        (expr,) = payload
        return _check_gen_formation(expr, premises)
    if rule is RuleId.MOR_INTRO:
        fn, dom, cod, model = payload
        return _check_mor(fn, dom, cod, model, premises)
    if rule is RuleId.BIN_FN_FROM_MOR:
        (premise,) = premises
        if not isinstance(premise, IsMor) or premise.cod != TWO:
            raise PremiseError(
                f"bin_fn_from_mor needs a morphism into Two, got {render(premise)}"
            )
        return IsBinFn(premise.fn, premise.dom)
    if rule is RuleId.DOMAIN_INTRO:
        gen_j, eq_j = premises
        (models,) = payload
        return _check_domain(gen_j, eq_j, models)
    if rule is RuleId.SET_INTRO:
        dom_j, sq_j = premises
        if not isinstance(dom_j, IsDomain):
            raise PremiseError(f"set_intro needs a domain premise, got {render(dom_j)}")
        if not isinstance(sq_j, SupportsQuant):
            raise PremiseError(
                f"set_intro needs a supports-quantification premise, got {render(sq_j)}"
            )
        if dom_j.expr != sq_j.expr:
            raise PremiseError(
                f"premises concern different expressions: {render(dom_j.expr)} "
                f"vs {render(sq_j.expr)}"
            )
        return IsSet(dom_j.expr)
    if rule is RuleId.SQUANT_FROM_POWERSET:
        (premise,) = premises
        if not isinstance(premise, SupportsQuant):
            raise PremiseError(
                f"squant_from_powerset needs SupportsQuant(A), got {render(premise)}"
            )
        return SupportsQuant(Powerset(premise.expr))
    if rule is RuleId.COHERENT_LIMIT:
        (premise,) = premises
        if not isinstance(premise, IsCoherentFamily):
            raise PremiseError(
                f"coherent_limit needs a coherence premise, got {render(premise)}"
            )
        limit = ObjLit(f"limit({premise.family.descriptor})", Powerset(NAT))
        return IsObj(limit, Powerset(NAT))
    raise SchemaError(f"rule {rule.value} is not derivable this way")


def _check_gen_formation(expr: GenExpr, premises: tuple[Judgment, ...]) -> Judgment:
    if isinstance(expr, (Two, Nat)):
        if premises:
            raise PremiseError("formation of a builtin generator takes no premises")
        return IsGen(expr)
    if isinstance(expr, Powerset):
        if premises != (IsGen(expr.arg),):
            raise PremiseError(f"powerset formation needs Gen({render(expr.arg)})")
        return IsGen(expr)
    if isinstance(expr, Product):
        if premises != (IsGen(expr.left), IsGen(expr.right)):
            raise PremiseError("product formation needs both component generators")
        return IsGen(expr)
    raise PremiseError(f"cannot form {render(expr)} by formation rules")


def _check_domain(
    gen_j: Judgment, eq_j: Judgment, models: tuple[Model, ...]
) -> Judgment:
    if not isinstance(gen_j, IsGen):
        raise PremiseError(f"domain_intro needs Gen(A), got {render(gen_j)}")
    if not isinstance(eq_j, IsBinFn):
        raise PremiseError(
            f"domain_intro needs a binary function premise, got {render(eq_j)}"
        )
    expr = gen_j.expr
    if eq_j.dom != Product(expr, expr):
        raise PremiseError(
            f"equality pairing is on {render(eq_j.dom)}, expected "
            f"{render(Product(expr, expr))}"
        )
    if not models:
        raise PremiseError("domain_intro needs at least one evidence model")
    for model in models:
        try:
            carrier = interpret(expr, model)
        except NotFinitelyCheckable as exc:
            raise PremiseError(f"evidence model cannot interpret {render(expr)}: {exc}")
        for x in carrier.objects:
            for y in carrier.objects:
                got = _fn_value(eq_j.fn, model, f"({x},{y})")
                expected = "yes" if x == y else "no"
                if got != expected:
                    raise EqualityLawError(
                        f"equality pairing on {render(expr)} returns {got!r} at "
                        f"({x!r}, {y!r}) in {model.describe()}, expected {expected!r}"
                    )
    return IsDomain(expr, eq_j.fn)


# ---------------------------------------------------------------------------
# The kernel proper


class Kernel:
    """Holds the declared-name table; all mutation is behind one lock.

    Theorems, once created, are immutable and freely shareable.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._declared: dict[str, Theorem] = {}
        self._formations: dict[GenExpr, Theorem] = {}

    # -- axioms

    def axiom(self, axiom: AxiomId, params: Sequence = (), model: Model | None = None) -> Theorem:
        params = tuple(params)
        if axiom is AxiomId.H1_TWO_IS_SET:
            if params:
                raise SchemaError("H1 takes no parameters")
            dom_node = TraceNode(
                "axiom", "H1", _axiom_judgment(axiom, ("domain",)), payload=("domain",)
            )
            sq_node = TraceNode(
                "axiom", "H1", _axiom_judgment(axiom, ("squant",)), payload=("squant",)
            )
            dom_thm = _theorem(dom_node.judgment, dom_node)
            sq_thm = _theorem(sq_node.judgment, sq_node)
            judgment = _check_rule(RuleId.SET_INTRO, (), (dom_node.judgment, sq_node.judgment))
            node = TraceNode("rule", "set_intro", judgment, (dom_node, sq_node), payload=())
            return _theorem(judgment, node, parts=(dom_thm, sq_thm))
        if axiom is AxiomId.H3_NAT_SUPPORTS_QUANT:
            if params:
                raise SchemaError("H3 takes no parameters")
            judgment = _axiom_judgment(axiom, ())
            return _theorem(judgment, TraceNode("axiom", "H3", judgment))
        if axiom is AxiomId.H2_CHOICE:
            if len(params) != 3:
                raise SchemaError("H2 takes a surjection description: (fn, dom, cod)")
            if model is None:
                raise SchemaError("H2 needs a finite model to check surjectivity")
            payload = (*params, model)
            judgment = _axiom_judgment(axiom, payload)
            return _theorem(judgment, TraceNode("axiom", "H2", judgment, payload=payload))
        if axiom is AxiomId.H4_POWERSET_QUANT:
            raise SchemaError(
                "H4 is a closure rule: apply squant_from_powerset to a "
                "SupportsQuant theorem"
            )
        if axiom is AxiomId.CLA_COHERENT_LIMIT:
            raise SchemaError(
                "the coherent-limit axiom applies through coherent_limit on a "
                "verified coherent family"
            )
        raise SchemaError(f"unknown axiom {axiom!r}")

    # -- generators

    def gen_intro(self, decl: Ident | GenExpr) -> Theorem:
        """Declare a fresh primitive generator, or form a composite one."""
        if isinstance(decl, Ident):
            with self._lock:
                if decl.text in self._declared:
                    raise NameClashError(f"generator {decl.text!r} is already declared")
                judgment = IsGen(Named(Ident(decl.text)))
                node = TraceNode("decl", "generator", judgment, payload=(decl.text,))
                thm = _theorem(judgment, node)
                self._declared[decl.text] = thm
                return thm
        if isinstance(decl, Named):
            with self._lock:
                thm = self._declared.get(decl.name.text)
            if thm is None:
                raise PremiseError(f"generator {decl.name.text!r} is not declared")
            return thm
        if isinstance(decl, GenExpr):
            return self._formation(decl)
        raise SchemaError(f"cannot introduce a generator from {decl!r}")

    def _formation(self, expr: GenExpr) -> Theorem:
        with self._lock:
            cached = self._formations.get(expr)
        if cached is not None:
            return cached
        if isinstance(expr, Named):
            return self.gen_intro(expr)
        if isinstance(expr, (Two, Nat)):
            children: tuple[Theorem, ...] = ()
        elif isinstance(expr, Powerset):
            children = (self._formation(expr.arg),)
        elif isinstance(expr, Product):
            children = (self._formation(expr.left), self._formation(expr.right))
        else:
            raise SchemaError(f"cannot form {expr!r}")
        judgment = _check_rule(
            RuleId.GEN_INTRO, (expr,), tuple(c.judgment for c in children)
        )
        node = TraceNode(
            "rule", "gen_intro", judgment, tuple(c.node for c in children), payload=(expr,)
        )
        thm = _theorem(judgment, node)
        with self._lock:
            self._formations.setdefault(expr, thm)
        return thm

    # -- morphisms

    def mor_intro(
        self,
        fn: FnExpr,
        dom: GenExpr,
        cod: GenExpr,
        *,
        model: Model | None = None,
        premises: Sequence[Theorem] = (),
    ) -> Theorem:
        premises = tuple(premises)
        judgment = _check_mor(fn, dom, cod, model, tuple(p.judgment for p in premises))
        node = TraceNode(
            "rule",
            "mor_intro",
            judgment,
            tuple(p.node for p in premises),
            payload=(fn, dom, cod, model),
        )
        return _theorem(judgment, node)

    def bin_fn_from_mor(self, mor: Theorem) -> Theorem:
        judgment = _check_rule(RuleId.BIN_FN_FROM_MOR, (), (mor.judgment,))
        node = TraceNode("rule", "bin_fn_from_mor", judgment, (mor.node,))
        return _theorem(judgment, node)

    # -- domains and sets

    def domain_intro(
        self, gen: Theorem, eq: Theorem, models: Sequence[Model]
    ) -> Theorem:
        models = tuple(models)
        judgment = _check_rule(
            RuleId.DOMAIN_INTRO, (models,), (gen.judgment, eq.judgment)
        )
        node = TraceNode(
            "rule", "domain_intro", judgment, (gen.node, eq.node), payload=(models,)
        )
        return _theorem(judgment, node)

    def set_intro(self, domain: Theorem, squant: Theorem) -> Theorem:
        judgment = _check_rule(
            RuleId.SET_INTRO, (), (domain.judgment, squant.judgment)
        )
        node = TraceNode("rule", "set_intro", judgment, (domain.node, squant.node))
        return _theorem(judgment, node, parts=(domain, squant))

    def squant_from_powerset(self, squant: Theorem) -> Theorem:
        judgment = _check_rule(RuleId.SQUANT_FROM_POWERSET, (), (squant.judgment,))
        node = TraceNode("rule", "squant_from_powerset", judgment, (squant.node,))
        return _theorem(judgment, node)

    # -- coherent limits

    def coherent_family(self, family: FamilySpec, depth: int = 64) -> Theorem:
        """Verify coherence of the family on stages 0..depth and certify it."""
        member_at = streams.resolve_family(family.descriptor)
        stages = [member_at(n) for n in range(depth + 1)]
        result = streams.is_coherent(stages)
        if not result.ok:
            stage = result.violation
            raise streams.CoherenceError(stage=stage, index=stage - 1)
        judgment = IsCoherentFamily(family)
        node = TraceNode("decl", "coherent_family", judgment, payload=(family, depth))
        return _theorem(judgment, node)

    def coherent_limit(self, family: Theorem) -> Theorem:
        judgment = _check_rule(RuleId.COHERENT_LIMIT, (), (family.judgment,))
        node = TraceNode("rule", "coherent_limit", judgment, (family.node,))
        return _theorem(judgment, node)

    # -- equality queries

    def eq_within_domain(self, domain: Theorem, x: ObjLit, y: ObjLit) -> EqQuery:
        dom_j = domain.judgment
        if not isinstance(dom_j, IsDomain):
            raise PremiseError(
                f"eq_within_domain needs a domain theorem, got {domain!r}"
            )
        for lit in (x, y):
            if lit.of != dom_j.expr:
                raise CrossDomainEqualityError(
                    f"'=' is only defined within a single set: "
                    f"{render(x.of)} object vs {render(y.of)} object"
                )
        return EqQuery(domain, x, y)


# ---------------------------------------------------------------------------
# Trace replay and inspection


def trace_nodes(thm: Theorem) -> list[TraceNode]:
    """All trace nodes in postorder, shared subtrees visited once."""
    seen: set[int] = set()
    out: list[TraceNode] = []

    def walk(node: TraceNode) -> None:
        if id(node) in seen:
            return
        seen.add(id(node))
        for child in node.children:
            walk(child)
        out.append(node)

    walk(thm.node)
    return out


def axioms_used(thm: Theorem) -> Counter:
    """Multiset of axiom uses: axiom leaves plus closure-rule applications."""
    uses: Counter = Counter()
    for node in trace_nodes(thm):
        if node.kind == "axiom":
            uses[AxiomId.from_name(node.label)] += 1
        elif node.kind == "rule":
            rule = RuleId(node.label)
            if rule in _RULE_AXIOMS:
                uses[_RULE_AXIOMS[rule]] += 1
    return uses


def leaf_kinds(thm: Theorem) -> set[str]:
    """Leaf classification: axiom names, plus 'declaration' for the rest."""
    kinds = set()
    for node in trace_nodes(thm):
        if node.children:
            continue
        kinds.add(node.label if node.kind == "axiom" else "declaration")
    return kinds


@dataclass(frozen=True)
class TraceEntry:
    label: str
    judgment: str
    ok: bool
    note: str = ""


@dataclass(frozen=True)
class TraceReport:
    entries: tuple[TraceEntry, ...]
    passed: bool

    @property
    def node_count(self) -> int:
        return len(self.entries)


def _replay_node(node: TraceNode, child_judgments: tuple[Judgment, ...]) -> Judgment:
    if node.kind == "axiom":
        return _axiom_judgment(AxiomId.from_name(node.label), node.payload)
    if node.kind == "decl":
        if node.label == "generator":
            judgment = node.judgment
            if not (isinstance(judgment, IsGen) and isinstance(judgment.expr, Named)):
                raise SchemaError("generator declaration must introduce a name")
            return judgment
        if node.label == "coherent_family":
            family, depth = node.payload
            member_at = streams.resolve_family(family.descriptor)
            stages = [member_at(n) for n in range(depth + 1)]
            result = streams.is_coherent(stages)
            if not result.ok:
                raise streams.CoherenceError(stage=result.violation, index=0)
            return IsCoherentFamily(family)
        raise SchemaError(f"unknown declaration kind {node.label!r}")
    if node.kind == "rule":
        return _check_rule(RuleId(node.label), node.payload, child_judgments)
    raise SchemaError(f"unknown trace node kind {node.kind!r}")


def verify_trace(thm: Theorem) -> TraceReport:
    """Replay every rule application in the trace.

    Passes iff every node's judgment is re-derived exactly and the root
    judgment equals the theorem's.  Failures are report entries, not raises.
    """
    entries: list[TraceEntry] = []
    recomputed: dict[int, Judgment | None] = {}
    ordered = trace_nodes(thm)
    all_ok = True
    for node in ordered:
        children = tuple(recomputed.get(id(c)) for c in node.children)
        if any(c is None for c in children):
            entries.append(
                TraceEntry(node.label, render(node.judgment), False, "premise failed")
            )
            recomputed[id(node)] = None
            all_ok = False
            continue
        try:
            derived = _replay_node(node, children)  # type: ignore[arg-type]
        except (KernelError, streams.CoherenceError, streams.StreamSpecError) as exc:
            entries.append(TraceEntry(node.label, render(node.judgment), False, str(exc)))
            recomputed[id(node)] = None
            all_ok = False
            continue
        ok = derived == node.judgment
        note = "" if ok else f"replay derived {render(derived)}"
        entries.append(TraceEntry(node.label, render(node.judgment), ok, note))
        recomputed[id(node)] = derived if ok else None
        all_ok = all_ok and ok
    root_ok = recomputed.get(id(thm.node)) == thm.judgment
    if not root_ok and all_ok:
        entries.append(
            TraceEntry("root", render(thm.judgment), False, "root judgment mismatch")
        )
    return TraceReport(tuple(entries), passed=all_ok and root_ok)
