"""O2D language: signature, ground atoms, states, parsing and serialization."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

BINARY_PREDICATES: tuple[str, ...] = ("left", "below", "overlap", "smaller", "shape")
DEFAULT_SHAPES: tuple[str, ...] = ("rectangle", "circle", "heart", "sokoshape", "triangle", "diamond")


class O2DError(ValueError):
    """Raised on malformed O2D input."""


class GroundAtom(NamedTuple):
    predicate: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(self.args)})"


@dataclass(frozen=True)
class O2DSignature:
    """Signature (C, U, R). ``shapes`` is the subset of constants naming shapes."""

    constants: tuple[str, ...] = ()
    unary_predicates: tuple[str, ...] = ()
    binary_predicates: tuple[str, ...] = BINARY_PREDICATES
    shapes: tuple[str, ...] = DEFAULT_SHAPES

    def __post_init__(self):
        if tuple(sorted(self.binary_predicates)) != tuple(sorted(BINARY_PREDICATES)):
            raise O2DError(f"binary predicates must be exactly {BINARY_PREDICATES}")
        c, u, b = set(self.constants), set(self.unary_predicates), set(self.binary_predicates)
        if c & u or c & b or u & b:
            raise O2DError("constants, unary and binary predicate names must be disjoint")

    def arity(self, pred: str) -> int:
        if pred in self.unary_predicates:
            return 1
        if pred in self.binary_predicates:
            return 2
        raise O2DError(f"unknown predicate {pred!r}")

    def is_shape(self, name: str) -> bool:
        return name in self.shapes

    def merge(self, other: "O2DSignature") -> "O2DSignature":
        cons = tuple(dict.fromkeys(self.constants + other.constants))
        un = tuple(dict.fromkeys(self.unary_predicates + other.unary_predicates))
        sh = tuple(dict.fromkeys(self.shapes + other.shapes))
        return O2DSignature(cons, un, BINARY_PREDICATES, sh)


@dataclass(frozen=True, eq=False)
class O2DState:
    """Immutable O2D state; equality is equality of atoms and objects."""

    atoms: frozenset[GroundAtom]
    objects: frozenset[str]
    instance_id: str = ""
    state_id: str = ""
    signature: O2DSignature | None = field(default=None, repr=False)

    def __post_init__(self):
        shapes = set(self.signature.shapes) if self.signature else set(DEFAULT_SHAPES)
        for a in self.atoms:
            for o in a.args:
                if o not in self.objects and o not in shapes:
                    raise O2DError(f"object {o!r} of {a} missing from objects")

    def __eq__(self, other):
        if not isinstance(other, O2DState):
            return NotImplemented
        return self.atoms == other.atoms and self.objects == other.objects

    def __hash__(self):
        return hash((self.atoms, self.objects))

    def with_ids(self, instance_id: str, state_id: str) -> "O2DState":
        return O2DState(self.atoms, self.objects, instance_id, state_id, self.signature)


_STMT = re.compile(r"^\s*([A-Za-z_][\w\-]*)\s*\(\s*([^()]*)\)\s*$")


def _strip_comments(text: str) -> list[tuple[int, str]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        i = line.find("#")
        if i >= 0:
            line = line[:i]
        out.append((lineno, line))
    return out


def parse_state(text: str, signature: O2DSignature | None = None,
                instance_id: str = "", state_id: str = "") -> O2DState:
    """Parse ``pred(a,b).`` statements into a state.

    Without a signature the arity of the five binary relations is enforced and any
    other predicate must be unary.
    """
    shapes = set(signature.shapes) if signature else set(DEFAULT_SHAPES)
    atoms: set[GroundAtom] = set()
    buf, start = "", None
    for lineno, line in _strip_comments(text):
        for ch in line:
            if ch == ".":
                stmt = buf.strip()
                if stmt:
                    atoms.add(_parse_atom(stmt, start or lineno, signature))
                buf, start = "", None
            else:
                if start is None and not ch.isspace():
                    start = lineno
                buf += ch
        buf += " "
    if buf.strip():
        raise O2DError(f"line {start}: statement not terminated by '.'")
    objects = {o for a in atoms for o in a.args if o not in shapes}
    return O2DState(frozenset(atoms), frozenset(objects), instance_id, state_id, signature)


def _parse_atom(stmt: str, lineno: int, signature: O2DSignature | None) -> GroundAtom:
    m = _STMT.match(stmt)
    if not m:
        raise O2DError(f"line {lineno}: syntax error in {stmt!r}")
    pred = m.group(1)
    args = tuple(a.strip() for a in m.group(2).split(",")) if m.group(2).strip() else ()
    if any(not re.fullmatch(r"[\w\-]+", a) for a in args):
        raise O2DError(f"line {lineno}: bad argument list in {stmt!r}")
    if signature is not None:
        try:
            ar = signature.arity(pred)
        except O2DError:
            raise O2DError(f"line {lineno}: unknown predicate {pred!r}") from None
    else:
        ar = 2 if pred in BINARY_PREDICATES else 1
    if len(args) != ar:
        raise O2DError(f"line {lineno}: arity mismatch for {pred!r}: expected {ar}, got {len(args)}")
    return GroundAtom(pred, args)


def serialize_state(state: O2DState) -> str:
    """Canonical text: atoms sorted by (predicate, args), one per line."""
    return "".join(f"{a}.\n" for a in sorted(state.atoms))


def eval_base(state: O2DState, pred: str, args: tuple[str, ...]) -> bool:
    """Closed-world membership test for a primitive O2D atom."""
    sig = state.signature
    ar = sig.arity(pred) if sig is not None else (2 if pred in BINARY_PREDICATES else 1)
    if len(args) != ar:
        raise O2DError(f"arity mismatch for {pred!r}")
    return GroundAtom(pred, tuple(args)) in state.atoms


def make_state(atoms: Iterable[GroundAtom | tuple], objects: Iterable[str] | None = None,
               signature: O2DSignature | None = None, instance_id: str = "",
               state_id: str = "") -> O2DState:
    atoms = frozenset(GroundAtom(a[0], tuple(a[1])) for a in atoms)
    shapes = set(signature.shapes) if signature else set(DEFAULT_SHAPES)
    objs = set(objects) if objects is not None else set()
    objs |= {o for a in atoms for o in a.args if o not in shapes}
    return O2DState(atoms, frozenset(objs), instance_id, state_id, signature)


def parse_signature(text: str) -> O2DSignature:
    """Parse a signature file with ``constants:``, ``unary:``, ``binary:`` sections.

    An optional ``shapes:`` section overrides the default shape constants.
    """
    sections: dict[str, list[str]] = {}
    current = None
    for lineno, line in _strip_comments(text):
        line = line.strip()
        if not line:
            continue
        m = re.match(r"^(constants|unary|binary|shapes)\s*:(.*)$", line)
        if m:
            current = m.group(1)
            if current in sections:
                raise O2DError(f"line {lineno}: duplicate section {current!r}")
            sections[current] = []
            line = m.group(2)
        elif current is None:
            raise O2DError(f"line {lineno}: content outside a section")
        sections[current] += [t.strip() for t in line.split(",") if t.strip()]
    binary = tuple(sections.get("binary", BINARY_PREDICATES))
    shapes = tuple(sections.get("shapes", DEFAULT_SHAPES))
    constants = tuple(sections.get("constants", ()))
    return O2DSignature(constants, tuple(sections.get("unary", ())), binary,
                        tuple(dict.fromkeys(shapes + tuple(c for c in constants if c in DEFAULT_SHAPES))))


def serialize_signature(sig: O2DSignature) -> str:
    return (f"constants: {', '.join(sig.constants)}\n"
            f"unary: {', '.join(sig.unary_predicates)}\n"
            f"binary: {', '.join(sig.binary_predicates)}\n"
            f"shapes: {', '.join(sig.shapes)}\n")


def infer_signature(states: Iterable[O2DState], constants: Iterable[str] = ()) -> O2DSignature:
    unary: dict[str, None] = {}
    for s in states:
        for a in sorted(s.atoms):
            if a.predicate not in BINARY_PREDICATES:
                unary[a.predicate] = None
    return O2DSignature(tuple(constants), tuple(sorted(unary)))
