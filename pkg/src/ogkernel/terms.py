"""Immutable syntax trees: generator expressions, function expressions, judgments.

No logic lives here.  Everything is a frozen dataclass with structural
equality (source spans are ignored), and `render` produces the surface
syntax that `ogkernel.surface.parse_gen_expr` and friends read back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

__all__ = [
    "Span",
    "Ident",
    "GenExpr",
    "Two",
    "Nat",
    "Named",
    "Product",
    "Powerset",
    "TWO",
    "NAT",
    "ObjLit",
    "FnExpr",
    "Table",
    "BuiltinRule",
    "BUILTIN_RULE_IDS",
    "Judgment",
    "IsGen",
    "IsObj",
    "IsMor",
    "IsBinFn",
    "IsDomain",
    "SupportsQuant",
    "IsSet",
    "IsCoherentFamily",
    "FamilySpec",
    "structurally_equal",
    "render",
    "free_names",
    "split_pair_tag",
]


@dataclass(frozen=True)
class Span:
    """Source location: 1-based line/column plus byte offsets."""

    line: int
    col: int
    start: int
    end: int


_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Ident:
    """A name.  Two idents are the same name iff their text is equal."""

    text: str
    span: Span | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.text):
            raise ValueError(f"invalid identifier: {self.text!r}")

    def __str__(self) -> str:
        return self.text


# ---------------------------------------------------------------------------
# Generator expressions


class GenExpr:
    """Base class for generator expressions."""

    __slots__ = ()


@dataclass(frozen=True)
class Two(GenExpr):
    """The fixed two-object generator (objects `yes` and `no`)."""


@dataclass(frozen=True)
class Nat(GenExpr):
    """The natural numbers, with numeral objects."""


@dataclass(frozen=True)
class Named(GenExpr):
    name: Ident


@dataclass(frozen=True)
class Product(GenExpr):
    left: GenExpr
    right: GenExpr


@dataclass(frozen=True)
class Powerset(GenExpr):
    arg: GenExpr


TWO = Two()
NAT = Nat()


# ---------------------------------------------------------------------------
# Object literals and function expressions

_NUMERAL_RE = re.compile(r"(0|[1-9][0-9]*)\Z")


@dataclass(frozen=True)
class ObjLit:
    """A tagged constant naming one object of a carrier.

    Tags for the builtin carriers: ``yes``/``no`` for Two, decimal numerals
    for Nat, ``(a,b)`` pair tags for products, ``{...}`` member-list tags
    for powersets, and ``limit(<family descriptor>)`` for coherent limits.
    """

    tag: str
    of: GenExpr

    def __post_init__(self) -> None:
        if not self.tag:
            raise ValueError("object literal tag must be nonempty")


class FnExpr:
    """Base class for function expressions (finite tables or builtin rules)."""

    __slots__ = ()


@dataclass(frozen=True)
class Table(FnExpr):
    domain: GenExpr
    codomain: GenExpr
    rows: tuple[tuple[ObjLit, ObjLit], ...]

    def __post_init__(self) -> None:
        seen = set()
        for key, _ in self.rows:
            if key.tag in seen:
                raise ValueError(f"duplicate table row for {key.tag!r}")
            seen.add(key.tag)


BUILTIN_RULE_IDS = frozenset(
    {"eq_of", "empty_detector_of", "restrict", "union_of_family", "indicator_stream"}
)

BuiltinArg = Union[GenExpr, "FnExpr", str, int]


@dataclass(frozen=True)
class BuiltinRule(FnExpr):
    """A catalogued function former.  String args are stream or family specs."""

    rule: str
    args: tuple[BuiltinArg, ...] = ()

    def __post_init__(self) -> None:
        if self.rule not in BUILTIN_RULE_IDS:
            raise ValueError(f"unknown builtin rule: {self.rule!r}")


# ---------------------------------------------------------------------------
# Families (index n |-> partial bit map on [0, n]) for the coherent-limit lab


@dataclass(frozen=True)
class FamilySpec:
    """A coherent-family description drawn from the stream catalog.

    The descriptor grammar is owned by `ogkernel.streams.resolve_family`:
    ``restrictions(<stream spec>)`` or ``corrupt(<stream spec>,<stage>,<index>)``.
    """

    name: Ident
    descriptor: str


# ---------------------------------------------------------------------------
# Judgments


class Judgment:
    """Base class for the judgment forms the kernel can assert."""

    __slots__ = ()


@dataclass(frozen=True)
class IsGen(Judgment):
    expr: GenExpr


@dataclass(frozen=True)
class IsObj(Judgment):
    obj: ObjLit
    expr: GenExpr


@dataclass(frozen=True)
class IsMor(Judgment):
    fn: FnExpr
    dom: GenExpr
    cod: GenExpr


@dataclass(frozen=True)
class IsBinFn(Judgment):
    """Definitionally IsMor(fn, dom, Two); see kernel rule bin_fn_from_mor."""

    fn: FnExpr
    dom: GenExpr


@dataclass(frozen=True)
class IsDomain(Judgment):
    expr: GenExpr
    eq: FnExpr


@dataclass(frozen=True)
class SupportsQuant(Judgment):
    expr: GenExpr


@dataclass(frozen=True)
class IsSet(Judgment):
    expr: GenExpr


@dataclass(frozen=True)
class IsCoherentFamily(Judgment):
    family: FamilySpec


# ---------------------------------------------------------------------------
# Operations

_TermLike = Union[GenExpr, FnExpr, Judgment, ObjLit]

_KINDS = ((GenExpr,), (FnExpr,), (Judgment,), (ObjLit,))


def _kind_of(x: _TermLike) -> type:
    for (k,) in _KINDS:
        if isinstance(x, k):
            return k
    raise TypeError(f"not a term: {x!r}")


def structurally_equal(a: _TermLike, b: _TermLike) -> bool:
    """Node-for-node tree identity, ignoring spans.

    Raises TypeError when `a` and `b` are not the same syntactic kind.
    """
    if _kind_of(a) is not _kind_of(b):
        raise TypeError(
            f"cannot compare {type(a).__name__} with {type(b).__name__}"
        )
    return a == b


def free_names(x: GenExpr | FnExpr) -> set[Ident]:
    """The set of Named idents occurring anywhere in `x`."""
    out: set[Ident] = set()
    _collect_names(x, out)
    return out


def _collect_names(x: object, out: set[Ident]) -> None:
    if isinstance(x, Named):
        out.add(x.name)
    elif isinstance(x, Product):
        _collect_names(x.left, out)
        _collect_names(x.right, out)
    elif isinstance(x, Powerset):
        _collect_names(x.arg, out)
    elif isinstance(x, Table):
        _collect_names(x.domain, out)
        _collect_names(x.codomain, out)
        for key, val in x.rows:
            _collect_names(key.of, out)
            _collect_names(val.of, out)
    elif isinstance(x, BuiltinRule):
        for arg in x.args:
            if isinstance(arg, (GenExpr, FnExpr)):
                _collect_names(arg, out)
    # Two, Nat, str/int builtin args: nothing to collect


# ---------------------------------------------------------------------------
# Rendering (targets the surface grammar; parse(render(x)) == x up to spans)


def render(x: _TermLike) -> str:
    if isinstance(x, GenExpr):
        return _render_gen(x)
    if isinstance(x, FnExpr):
        return _render_fn(x)
    if isinstance(x, ObjLit):
        return _render_obj(x)
    if isinstance(x, Judgment):
        return _render_judgment(x)
    raise TypeError(f"cannot render {type(x).__name__}")


def _render_gen(e: GenExpr) -> str:
    if isinstance(e, Two):
        return "Two"
    if isinstance(e, Nat):
        return "Nat"
    if isinstance(e, Named):
        return e.name.text
    if isinstance(e, Powerset):
        return f"P[{_render_gen(e.arg)}]"
    if isinstance(e, Product):
        # `*` is left-associative: parenthesize a product in right position.
        left = _render_gen(e.left)
        right = _render_gen(e.right)
        if isinstance(e.right, Product):
            right = f"({right})"
        return f"{left} * {right}"
    raise TypeError(f"unknown GenExpr: {e!r}")


def _render_gen_atom(e: GenExpr) -> str:
    text = _render_gen(e)
    return f"({text})" if isinstance(e, Product) else text


def _render_obj(o: ObjLit) -> str:
    if isinstance(o.of, Product):
        try:
            left_tag, right_tag = split_pair_tag(o.tag)
        except ValueError:
            pass  # a non-pair tag on a product carrier: dotted form below
        else:
            left = _render_obj(ObjLit(left_tag, o.of.left))
            right = _render_obj(ObjLit(right_tag, o.of.right))
            return f"({left}, {right})"
    if _IDENT_RE.match(o.tag) or _NUMERAL_RE.match(o.tag):
        return f"{_render_gen_atom(o.of)}.{o.tag}"
    return f'{_render_gen_atom(o.of)}."{o.tag}"'


def split_pair_tag(tag: str) -> tuple[str, str]:
    """Split a product tag ``(a,b)`` at its top-level comma.

    Components may themselves contain parenthesized or braced tags.
    """
    if not (tag.startswith("(") and tag.endswith(")")):
        raise ValueError(f"not a pair tag: {tag!r}")
    depth = 0
    body = tag[1:-1]
    for i, ch in enumerate(body):
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        elif ch == "," and depth == 0:
            return body[:i], body[i + 1 :]
    raise ValueError(f"malformed pair tag: {tag!r}")


def _render_builtin_arg(a: BuiltinArg) -> str:
    if isinstance(a, GenExpr):
        return _render_gen(a)
    if isinstance(a, FnExpr):
        return _render_fn(a)
    if isinstance(a, str):
        return f'"{a}"'
    if isinstance(a, int):
        return str(a)
    raise TypeError(f"cannot render builtin arg {a!r}")


def _render_fn(f: FnExpr) -> str:
    if isinstance(f, BuiltinRule):
        if not f.args:
            return f.rule
        args = ", ".join(_render_builtin_arg(a) for a in f.args)
        return f"{f.rule}[{args}]"
    if isinstance(f, Table):
        rows = ", ".join(f"{_render_obj(k)} -> {_render_obj(v)}" for k, v in f.rows)
        body = f"{{ {rows} }}" if rows else "{ }"
        return f"table {body}"
    raise TypeError(f"unknown FnExpr: {f!r}")


def _render_judgment(j: Judgment) -> str:
    if isinstance(j, IsGen):
        return f"Gen({_render_gen(j.expr)})"
    if isinstance(j, IsObj):
        return f"Obj({_render_obj(j.obj)}, {_render_gen(j.expr)})"
    if isinstance(j, IsMor):
        return f"Mor({_render_fn(j.fn)}, {_render_gen(j.dom)}, {_render_gen(j.cod)})"
    if isinstance(j, IsBinFn):
        return f"BinFn({_render_fn(j.fn)}, {_render_gen(j.dom)})"
    if isinstance(j, IsDomain):
        return f"Domain({_render_gen(j.expr)}, {_render_fn(j.eq)})"
    if isinstance(j, SupportsQuant):
        return f"SupportsQuant({_render_gen(j.expr)})"
    if isinstance(j, IsSet):
        return f"Set({_render_gen(j.expr)})"
    if isinstance(j, IsCoherentFamily):
        return f'Coherent({j.family.name.text}, "{j.family.descriptor}")'
    raise TypeError(f"unknown Judgment: {j!r}")
