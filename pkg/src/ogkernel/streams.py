"""Binary streams on the naturals: restrictions, coherence, unions, periodicity.

This is the desk-scale coherent-limit laboratory.  A "small model" of
subcollections of the naturals is the class of eventually periodic bit
streams; it is closed under finite-support embedding, xor, shift, and
single-bit flips, yet the squares indicator — the union of its own finite
restrictions, all of which lie in the class — does not belong to it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "BitStream",
    "Periodic",
    "SquaresIndicator",
    "PowersOfTwoIndicator",
    "FiniteSupport",
    "XorOf",
    "ShiftOf",
    "FlipAt",
    "PartialBitMap",
    "StreamSpecError",
    "ShapeError",
    "CoherenceError",
    "BoundError",
    "parse_stream_spec",
    "stream_spec",
    "resolve_family",
    "restrict",
    "is_coherent",
    "CoherenceResult",
    "union_limit",
    "UnionStream",
    "ep_decide",
    "EpVerdict",
    "is_ep_witness",
    "xor_witness",
    "shift_witness",
    "flip_witness",
    "demonstrate_gap",
    "GapReport",
]


class StreamSpecError(ValueError):
    """Malformed stream or family spec string."""


class ShapeError(ValueError):
    """A family member's domain is not the expected interval [0, n]."""


class CoherenceError(ValueError):
    """A later family stage disagrees with an earlier one."""

    def __init__(self, stage: int, index: int):
        super().__init__(f"family stage {stage} disagrees at index {index}")
        self.stage = stage
        self.index = index


class BoundError(ValueError):
    """A search bound precondition was violated."""


# ---------------------------------------------------------------------------
# Stream catalog


class BitStream:
    """A total, deterministic assignment of a bit to every natural number."""

    __slots__ = ()

    def value_at(self, n: int) -> int:
        raise NotImplementedError

    def prefix(self, n: int) -> np.ndarray:
        """Values at 0..n inclusive, as a uint8 array of length n + 1."""
        return np.fromiter((self.value_at(i) for i in range(n + 1)), np.uint8, n + 1)


def _check_bits(bits: Sequence[int], what: str) -> None:
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"{what} must consist of 0/1 bits")


@dataclass(frozen=True)
class Periodic(BitStream):
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.period:
            raise ValueError("period must be nonempty")
        _check_bits(self.preperiod, "preperiod")
        _check_bits(self.period, "period")

    def value_at(self, n: int) -> int:
        if n < len(self.preperiod):
            return self.preperiod[n]
        return self.period[(n - len(self.preperiod)) % len(self.period)]

    def prefix(self, n: int) -> np.ndarray:
        out = np.empty(n + 1, np.uint8)
        k = min(len(self.preperiod), n + 1)
        out[:k] = self.preperiod[:k]
        if k <= n:
            reps = (n + 1 - k) // len(self.period) + 1
            out[k:] = np.tile(np.array(self.period, np.uint8), reps)[: n + 1 - k]
        return out


@dataclass(frozen=True)
class SquaresIndicator(BitStream):
    def value_at(self, n: int) -> int:
        return 1 if math.isqrt(n) ** 2 == n else 0

    def prefix(self, n: int) -> np.ndarray:
        out = np.zeros(n + 1, np.uint8)
        out[[k * k for k in range(math.isqrt(n) + 1)]] = 1
        return out


@dataclass(frozen=True)
class PowersOfTwoIndicator(BitStream):
    def value_at(self, n: int) -> int:
        return 1 if n > 0 and n & (n - 1) == 0 else 0

    def prefix(self, n: int) -> np.ndarray:
        out = np.zeros(n + 1, np.uint8)
        k = 1
        while k <= n:
            out[k] = 1
            k *= 2
        return out


@dataclass(frozen=True)
class FiniteSupport(BitStream):
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_bits(self.bits, "bits")

    def value_at(self, n: int) -> int:
        return self.bits[n] if n < len(self.bits) else 0

    def prefix(self, n: int) -> np.ndarray:
        out = np.zeros(n + 1, np.uint8)
        k = min(len(self.bits), n + 1)
        out[:k] = self.bits[:k]
        return out


@dataclass(frozen=True)
class XorOf(BitStream):
    left: BitStream
    right: BitStream

    def value_at(self, n: int) -> int:
        return self.left.value_at(n) ^ self.right.value_at(n)

    def prefix(self, n: int) -> np.ndarray:
        return self.left.prefix(n) ^ self.right.prefix(n)


@dataclass(frozen=True)
class ShiftOf(BitStream):
    """Left shift: value_at(n) = base.value_at(n + offset)."""

    base: BitStream
    offset: int

    def __post_init__(self) -> None:
        if self.offset < 0:
            raise ValueError("offset must be nonnegative")

    def value_at(self, n: int) -> int:
        return self.base.value_at(n + self.offset)

    def prefix(self, n: int) -> np.ndarray:
        return self.base.prefix(n + self.offset)[self.offset :]


@dataclass(frozen=True)
class FlipAt(BitStream):
    base: BitStream
    index: int

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("index must be nonnegative")

    def value_at(self, n: int) -> int:
        v = self.base.value_at(n)
        return v ^ 1 if n == self.index else v

    def prefix(self, n: int) -> np.ndarray:
        out = self.base.prefix(n)
        if self.index <= n:
            out[self.index] ^= 1
        return out


# ---------------------------------------------------------------------------
# CLI-addressable spec strings


def parse_stream_spec(spec: str) -> BitStream:
    """Parse a catalog name: ``periodic:<pre>/<per>``, ``squares``, ``pow2``,
    ``finite:<bits>``, ``xor(a,b)``, ``shift(a,k)``, ``flip(a,i)``."""
    s = spec.strip()
    if s == "squares":
        return SquaresIndicator()
    if s == "pow2":
        return PowersOfTwoIndicator()
    if s.startswith("periodic:"):
        body = s[len("periodic:") :]
        if "/" not in body:
            raise StreamSpecError(f"periodic spec needs <pre>/<per>: {spec!r}")
        pre, per = body.split("/", 1)
        try:
            return Periodic(_parse_bits(pre), _parse_bits(per))
        except ValueError as exc:
            raise StreamSpecError(f"bad periodic spec {spec!r}: {exc}") from exc
    if s.startswith("finite:"):
        try:
            return FiniteSupport(_parse_bits(s[len("finite:") :]))
        except ValueError as exc:
            raise StreamSpecError(f"bad finite spec {spec!r}: {exc}") from exc
    for head, maker in (
        ("xor", lambda args: XorOf(parse_stream_spec(args[0]), parse_stream_spec(args[1]))),
        ("shift", lambda args: ShiftOf(parse_stream_spec(args[0]), _parse_int(args[1]))),
        ("flip", lambda args: FlipAt(parse_stream_spec(args[0]), _parse_int(args[1]))),
    ):
        if s.startswith(head + "(") and s.endswith(")"):
            args = _split_args(s[len(head) + 1 : -1], spec)
            if len(args) != 2:
                raise StreamSpecError(f"{head}(...) takes two arguments: {spec!r}")
            try:
                return maker(args)
            except (ValueError, IndexError) as exc:
                if isinstance(exc, StreamSpecError):
                    raise
                raise StreamSpecError(f"bad spec {spec!r}: {exc}") from exc
    raise StreamSpecError(f"unknown stream spec: {spec!r}")


def _parse_bits(text: str) -> tuple[int, ...]:
    if not all(c in "01" for c in text):
        raise ValueError(f"expected a 0/1 string, got {text!r}")
    return tuple(int(c) for c in text)


def _parse_int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError as exc:
        raise StreamSpecError(f"expected an integer, got {text!r}") from exc


def _split_args(body: str, spec: str) -> list[str]:
    args, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise StreamSpecError(f"unbalanced parentheses in {spec!r}")
        elif ch == "," and depth == 0:
            args.append(body[start:i].strip())
            start = i + 1
    args.append(body[start:].strip())
    return args


def stream_spec(s: BitStream) -> str:
    """The canonical spec string for a catalog stream (inverse of parse)."""
    if isinstance(s, SquaresIndicator):
        return "squares"
    if isinstance(s, PowersOfTwoIndicator):
        return "pow2"
    if isinstance(s, Periodic):
        pre = "".join(map(str, s.preperiod))
        per = "".join(map(str, s.period))
        return f"periodic:{pre}/{per}"
    if isinstance(s, FiniteSupport):
        return "finite:" + "".join(map(str, s.bits))
    if isinstance(s, XorOf):
        return f"xor({stream_spec(s.left)},{stream_spec(s.right)})"
    if isinstance(s, ShiftOf):
        return f"shift({stream_spec(s.base)},{s.offset})"
    if isinstance(s, FlipAt):
        return f"flip({stream_spec(s.base)},{s.index})"
    raise StreamSpecError(f"stream has no catalog spec: {s!r}")


# ---------------------------------------------------------------------------
# Restrictions, coherence, unions


@dataclass(frozen=True)
class PartialBitMap:
    """A bit assignment whose domain is exactly the interval [0, upper]."""

    upper: int
    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.upper < 0:
            raise ValueError("upper must be nonnegative")
        if len(self.bits) != self.upper + 1:
            raise ValueError(
                f"expected {self.upper + 1} bits for domain [0,{self.upper}], "
                f"got {len(self.bits)}"
            )
        _check_bits(self.bits, "bits")


def restrict(s: BitStream, n: int) -> PartialBitMap:
    """The restriction of `s` to the finite interval [0, n]."""
    return PartialBitMap(n, tuple(int(b) for b in s.prefix(n)))


@dataclass(frozen=True)
class CoherenceResult:
    ok: bool
    violation: int | None = None
    """Index of the first stage that disagrees with its predecessor."""

    def __bool__(self) -> bool:
        return self.ok


def is_coherent(family: Sequence[PartialBitMap]) -> CoherenceResult:
    """Whether each stage restricts to the previous one.

    `family[n]` must have domain [0, n]; raises ShapeError otherwise.
    """
    for n, member in enumerate(family):
        if member.upper != n:
            raise ShapeError(f"family[{n}] has upper {member.upper}, expected {n}")
    for n in range(len(family) - 1):
        if family[n + 1].bits[: n + 1] != family[n].bits:
            return CoherenceResult(False, violation=n + 1)
    return CoherenceResult(True)


FamilyRule = Callable[[int], PartialBitMap]


class UnionStream(BitStream):
    """The union (pointwise limit) of a coherent family of finite stages.

    Stages are fetched geometrically as larger indices are demanded; each
    newly fetched stage is checked against the verified prefix, and any
    disagreement raises CoherenceError with the offending index.
    """

    __slots__ = ("_member_at", "_bits")

    def __init__(self, member_at: FamilyRule):
        self._member_at = member_at
        self._bits = np.zeros(0, np.uint8)

    def _ensure(self, n: int) -> None:
        have = len(self._bits)
        if n < have:
            return
        target = max(n, 2 * have)
        stage = self._member_at(target)
        if stage.upper != target:
            raise ShapeError(f"family[{target}] has upper {stage.upper}")
        new = np.array(stage.bits, np.uint8)
        if have and not np.array_equal(new[:have], self._bits):
            index = int(np.nonzero(new[:have] != self._bits)[0][0])
            raise CoherenceError(stage=target, index=index)
        self._bits = new

    def value_at(self, n: int) -> int:
        self._ensure(n)
        return int(self._bits[n])

    def prefix(self, n: int) -> np.ndarray:
        self._ensure(n)
        return self._bits[: n + 1].copy()


def union_limit(member_at: FamilyRule) -> UnionStream:
    """The stream agreeing with `member_at(n)` on [0, n] for every n."""
    return UnionStream(member_at)


# ---------------------------------------------------------------------------
# Family descriptors (shared with the kernel's coherent-limit rule)


def resolve_family(descriptor: str) -> FamilyRule:
    """Resolve a family descriptor to its stage rule.

    ``restrictions(<spec>)``: stage n is restrict(stream, n).
    ``corrupt(<spec>,<stage>,<index>)``: like restrictions, but stages at or
    beyond <stage> have the bit at <index> flipped (an incoherent family,
    used as a negative control).
    """
    d = descriptor.strip()
    if d.startswith("restrictions(") and d.endswith(")"):
        stream = parse_stream_spec(d[len("restrictions(") : -1])
        return lambda n: restrict(stream, n)
    if d.startswith("corrupt(") and d.endswith(")"):
        args = _split_args(d[len("corrupt(") : -1], descriptor)
        if len(args) != 3:
            raise StreamSpecError(f"corrupt(...) takes three arguments: {descriptor!r}")
        stream = parse_stream_spec(args[0])
        stage, index = _parse_int(args[1]), _parse_int(args[2])

        def member(n: int) -> PartialBitMap:
            if n >= stage and index <= n:
                return restrict(FlipAt(stream, index), n)
            return restrict(stream, n)

        return member
    raise StreamSpecError(f"unknown family descriptor: {descriptor!r}")


# ---------------------------------------------------------------------------
# Eventually-periodic membership


@dataclass(frozen=True)
class EpVerdict:
    member: bool
    witness: tuple[int, int] | None
    preperiod_bound: int
    period_bound: int
    horizon: int

    def describe(self) -> str:
        if self.member:
            p, q = self.witness  # type: ignore[misc]
            return f"member, witness (p={p}, q={q})"
        return (
            f"non-member up to bounds ({self.preperiod_bound}, "
            f"{self.period_bound}, {self.horizon})"
        )


def ep_decide(
    s: BitStream, preperiod_bound: int, period_bound: int, horizon: int
) -> EpVerdict:
    """Search all (p <= preperiod_bound, 1 <= q <= period_bound) witnesses.

    A witness (p, q) requires value_at(i) == value_at(i+q) for all
    p <= i <= horizon - q.  The first witness in lexicographic (p, q) order
    is returned.  The horizon must be at least preperiod_bound +
    2 * period_bound so a claimed witness is cross-checked over at least one
    full extra period.
    """
    if period_bound < 1:
        raise BoundError("period bound must be at least 1")
    if horizon < preperiod_bound + 2 * period_bound:
        raise BoundError(
            f"horizon {horizon} below preperiod_bound + 2*period_bound = "
            f"{preperiod_bound + 2 * period_bound}"
        )
    arr = s.prefix(horizon)
    # valid_from[q]: least p such that no mismatch at i >= p for lag q.
    valid_from = {}
    for q in range(1, period_bound + 1):
        mismatch = np.nonzero(arr[: horizon + 1 - q] != arr[q:])[0]
        valid_from[q] = int(mismatch[-1]) + 1 if len(mismatch) else 0
    for p in range(preperiod_bound + 1):
        for q in range(1, period_bound + 1):
            if valid_from[q] <= p:
                return EpVerdict(True, (p, q), preperiod_bound, period_bound, horizon)
    return EpVerdict(False, None, preperiod_bound, period_bound, horizon)


def is_ep_witness(s: BitStream, p: int, q: int, horizon: int) -> bool:
    """Direct scan: does (p, q) witness eventual periodicity up to `horizon`?"""
    if q < 1 or p < 0 or horizon - q < p:
        return False
    arr = s.prefix(horizon)
    return bool(np.array_equal(arr[p : horizon + 1 - q], arr[p + q :]))


def xor_witness(w1: tuple[int, int], w2: tuple[int, int]) -> tuple[int, int]:
    return max(w1[0], w2[0]), math.lcm(w1[1], w2[1])


def shift_witness(w: tuple[int, int], offset: int) -> tuple[int, int]:
    return max(w[0] - offset, 0), w[1]


def flip_witness(w: tuple[int, int], index: int) -> tuple[int, int]:
    return max(w[0], index + 1), w[1]


# ---------------------------------------------------------------------------
# The gap demonstration

_CLOSURE_SEED = 0x06E551  # fixed: reports must be reproducible byte-for-byte


@dataclass(frozen=True)
class GapReport:
    """Machine-checked sub-results of the missing-limit demonstration.

    (a) every finite restriction, extended by zeros, is in the small model;
    (b) the small model is closed under xor/shift/flip (spot checks);
    (c) the union of the restriction family reproduces the base stream;
    (d) the base stream itself is not in the small model (up to bounds).
    """

    base_spec: str
    restriction_passes: int
    restriction_total: int
    closure_passes: int
    closure_total: int
    union_matches: bool
    union_horizon: int
    base_verdict: EpVerdict
    conclusion: str
    passed: bool

    def sub_results(self) -> list[tuple[str, bool, str]]:
        return [
            (
                "finite-restrictions-in-model",
                self.restriction_passes == self.restriction_total,
                f"{self.restriction_passes}/{self.restriction_total} restrictions "
                "extended by zeros are eventually periodic",
            ),
            (
                "closure-spot-checks",
                self.closure_passes == self.closure_total,
                f"{self.closure_passes}/{self.closure_total} xor/shift/flip "
                "closure cases passed with recomputed witnesses",
            ),
            (
                "union-round-trip",
                self.union_matches,
                f"union of restrictions matches {self.base_spec} up to "
                f"horizon {self.union_horizon}",
            ),
            (
                "limit-outside-model",
                not self.base_verdict.member,
                f"{self.base_spec}: {self.base_verdict.describe()}",
            ),
        ]


def _random_member(rng: random.Random) -> tuple[BitStream, tuple[int, int]]:
    """A random eventually periodic stream with a constructed witness."""
    if rng.random() < 0.5:
        pre = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 4)))
        per = tuple(rng.randint(0, 1) for _ in range(rng.randint(1, 4)))
        return Periodic(pre, per), (len(pre), len(per))
    bits = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 6)))
    return FiniteSupport(bits), (len(bits), 1)


def demonstrate_gap(
    base: BitStream | None = None,
    *,
    restriction_stages: int = 256,
    closure_cases: int = 100,
    union_horizon: int = 4096,
    preperiod_bound: int = 64,
    period_bound: int = 64,
    horizon: int = 4096,
) -> GapReport:
    """Run the four sub-checks and draw (or withdraw) the conclusion.

    With the default squares indicator the small model contains every finite
    stage of the restriction family but not its coherent limit.  Substituting
    an eventually periodic base stream flips sub-result (d) and the
    conclusion is withdrawn — the control experiment.
    """
    if base is None:
        base = SquaresIndicator()
    spec = stream_spec(base)

    # (a) restrictions, extended by zeros, are eventually periodic members.
    restriction_passes = 0
    for n in range(restriction_stages + 1):
        extended = FiniteSupport(restrict(base, n).bits)
        if ep_decide(extended, n + 1, 1, n + 3).member:
            restriction_passes += 1

    # (b) closure of the class under xor / shift / flip, witnesses recomputed.
    rng = random.Random(_CLOSURE_SEED)
    closure_passes = 0
    for case in range(closure_cases):
        op = case % 3
        s1, w1 = _random_member(rng)
        if op == 0:
            s2, w2 = _random_member(rng)
            combined, predicted = XorOf(s1, s2), xor_witness(w1, w2)
        elif op == 1:
            k = rng.randint(0, 8)
            combined, predicted = ShiftOf(s1, k), shift_witness(w1, k)
        else:
            i = rng.randint(0, 16)
            combined, predicted = FlipAt(s1, i), flip_witness(w1, i)
        scan_ok = is_ep_witness(combined, *predicted, horizon=256)
        decide_ok = ep_decide(combined, 32, 16, 256).member
        if scan_ok and decide_ok:
            closure_passes += 1

    # (c) union of the restriction family round-trips to the base stream.
    union = union_limit(lambda n: restrict(base, n))
    union_matches = bool(
        np.array_equal(union.prefix(union_horizon), base.prefix(union_horizon))
    )

    # (d) the base stream itself is outside the class, up to bounds.
    base_verdict = ep_decide(base, preperiod_bound, period_bound, horizon)

    passed = (
        restriction_passes == restriction_stages + 1
        and closure_passes == closure_cases
        and union_matches
        and not base_verdict.member
    )
    if passed:
        conclusion = (
            f"the small model contains every finite stage of {spec} "
            "but not the coherent limit"
        )
    elif base_verdict.member:
        conclusion = (
            f"withdrawn: {spec} is itself eventually periodic "
            f"({base_verdict.describe()}); no gap demonstrated"
        )
    else:
        conclusion = "withdrawn: a sub-check failed; no gap demonstrated"
    return GapReport(
        base_spec=spec,
        restriction_passes=restriction_passes,
        restriction_total=restriction_stages + 1,
        closure_passes=closure_passes,
        closure_total=closure_cases,
        union_matches=union_matches,
        union_horizon=union_horizon,
        base_verdict=base_verdict,
        conclusion=conclusion,
        passed=passed,
    )
