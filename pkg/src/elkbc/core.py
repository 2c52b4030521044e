"""Identifier interning, the normalized-axiom data model, and the `.nf` file format.

A theory is a signature (concept / role / individual names, each interned to a
dense integer id) together with an ordered, duplicate-free list of normalized
axioms.  Nine axiom shapes exist:

    GCI0      A [= B
    GCI1      A n B [= E
    GCI2      A [= Er.B
    GCI3      Er.A [= B
    GCI0_BOT  A [= Bot
    GCI1_BOT  A n B [= Bot
    GCI3_BOT  Er.A [= Bot
    RI0       r [= s
    RI1       r1 o r2 [= s

`owl:Thing` (Top) and `owl:Nothing` (Bot) are ordinary interned concepts with
the reserved ids 0 and 1, so downstream rule engines can quantify over "all
concepts including Top" uniformly.  BOT variants never carry Bot in a slot;
the Bot target is implied by the tag.

`.nf` format: one axiom per line, whitespace-separated tokens, first token the
variant tag, remaining tokens names in slot order (``GCI0 A B``, ``GCI1 A B E``,
``GCI2 A r B``, ``GCI3 r A B``, ``GCI0_BOT A``, ``GCI1_BOT A B``,
``GCI3_BOT r A``, ``RI0 r s``, ``RI1 r1 r2 s``).  Lines starting with ``#`` are
comments, except the signature directives ``#concept N``, ``#role N`` and
``#individual N`` which declare names (so a signature survives a round trip
even when a name appears in no axiom).  Names are opaque strings; IRIs are not
resolved or validated.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Union

TOP = "owl:Thing"
BOT = "owl:Nothing"
TOP_ID = 0
BOT_ID = 1


class ParseError(ValueError):
    """Malformed theory input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class Interner:
    """Bijective name <-> dense non-negative id mapping."""

    def __init__(self, reserved: Iterable[str] = ()):
        self._ids: dict[str, int] = {}
        self._names: list[str] = []
        for name in reserved:
            self.intern(name)

    def intern(self, name: str) -> int:
        ident = self._ids.get(name)
        if ident is None:
            ident = len(self._names)
            self._ids[name] = ident
            self._names.append(name)
        return ident

    def id_of(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise KeyError(f"unknown name: {name!r}") from None

    def name_of(self, ident: int) -> str:
        return self._names[ident]

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def __len__(self) -> int:
        return len(self._names)

    def names(self) -> tuple[str, ...]:
        return tuple(self._names)


@dataclass(frozen=True, slots=True)
class GCI0:
    sub: int
    sup: int


@dataclass(frozen=True, slots=True)
class GCI1:
    left: int
    right: int
    sup: int


@dataclass(frozen=True, slots=True)
class GCI2:
    sub: int
    role: int
    filler: int


@dataclass(frozen=True, slots=True)
class GCI3:
    role: int
    filler: int
    sup: int


@dataclass(frozen=True, slots=True)
class GCI0Bot:
    sub: int


@dataclass(frozen=True, slots=True)
class GCI1Bot:
    left: int
    right: int


@dataclass(frozen=True, slots=True)
class GCI3Bot:
    role: int
    filler: int


@dataclass(frozen=True, slots=True)
class RI0:
    sub: int
    sup: int


@dataclass(frozen=True, slots=True)
class RI1:
    first: int
    second: int
    sup: int


NormalizedAxiom = Union[GCI0, GCI1, GCI2, GCI3, GCI0Bot, GCI1Bot, GCI3Bot, RI0, RI1]

#: tag string <-> axiom class, in Table-order
AXIOM_TAGS: dict[str, type] = {
    "GCI0": GCI0,
    "GCI1": GCI1,
    "GCI2": GCI2,
    "GCI3": GCI3,
    "GCI0_BOT": GCI0Bot,
    "GCI1_BOT": GCI1Bot,
    "GCI3_BOT": GCI3Bot,
    "RI0": RI0,
    "RI1": RI1,
}
TAG_OF = {cls: tag for tag, cls in AXIOM_TAGS.items()}

#: which slots hold concept ids / role ids, in line token order
_SLOT_KINDS: dict[str, tuple[str, ...]] = {
    "GCI0": ("c", "c"),
    "GCI1": ("c", "c", "c"),
    "GCI2": ("c", "r", "c"),
    "GCI3": ("r", "c", "c"),
    "GCI0_BOT": ("c",),
    "GCI1_BOT": ("c", "c"),
    "GCI3_BOT": ("r", "c"),
    "RI0": ("r", "r"),
    "RI1": ("r", "r", "r"),
}


def axiom_tag(ax: NormalizedAxiom) -> str:
    return TAG_OF[type(ax)]


def axiom_slots(ax: NormalizedAxiom) -> tuple[int, ...]:
    """Slot ids in the `.nf` token order."""
    if isinstance(ax, GCI0):
        return (ax.sub, ax.sup)
    if isinstance(ax, GCI1):
        return (ax.left, ax.right, ax.sup)
    if isinstance(ax, GCI2):
        return (ax.sub, ax.role, ax.filler)
    if isinstance(ax, GCI3):
        return (ax.role, ax.filler, ax.sup)
    if isinstance(ax, GCI0Bot):
        return (ax.sub,)
    if isinstance(ax, GCI1Bot):
        return (ax.left, ax.right)
    if isinstance(ax, GCI3Bot):
        return (ax.role, ax.filler)
    if isinstance(ax, RI0):
        return (ax.sub, ax.sup)
    if isinstance(ax, RI1):
        return (ax.first, ax.second, ax.sup)
    raise TypeError(f"not a normalized axiom: {ax!r}")


class Signature:
    """Concept, role and individual interners for one theory."""

    def __init__(self):
        self.concepts = Interner(reserved=(TOP, BOT))
        self.roles = Interner()
        self.individuals = Interner()

    def copy(self) -> "Signature":
        sig = Signature()
        for name in self.concepts.names()[2:]:
            sig.concepts.intern(name)
        for name in self.roles.names():
            sig.roles.intern(name)
        for name in self.individuals.names():
            sig.individuals.intern(name)
        return sig


class Theory:
    """An immutable normalized theory: signature plus deduplicated axioms.

    Axioms keep their input order; duplicates are removed at construction
    (rule engines and samplers downstream operate on sets).  Values are safe
    to share across threads once constructed.
    """

    def __init__(self, signature: Signature, axioms: Iterable[NormalizedAxiom]):
        self.signature = signature
        seen: set[NormalizedAxiom] = set()
        ordered: list[NormalizedAxiom] = []
        for ax in axioms:
            if ax not in seen:
                seen.add(ax)
                ordered.append(ax)
        self.axioms: tuple[NormalizedAxiom, ...] = tuple(ordered)
        self._validate()

    def _validate(self) -> None:
        n_c, n_r = len(self.signature.concepts), len(self.signature.roles)
        for ax in self.axioms:
            for kind, ident in zip(_SLOT_KINDS[axiom_tag(ax)], axiom_slots(ax)):
                bound = n_c if kind == "c" else n_r
                if not 0 <= ident < bound:
                    raise ValueError(f"axiom {ax!r} references id outside the signature")

    @property
    def n_concepts(self) -> int:
        return len(self.signature.concepts)

    @property
    def n_roles(self) -> int:
        return len(self.signature.roles)

    def axioms_of(self, cls: type) -> list:
        return [ax for ax in self.axioms if isinstance(ax, cls)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Theory):
            return NotImplemented
        return (
            self.signature.concepts.names() == other.signature.concepts.names()
            and self.signature.roles.names() == other.signature.roles.names()
            and self.signature.individuals.names() == other.signature.individuals.names()
            and self.axioms == other.axioms
        )

    def __repr__(self) -> str:
        return f"Theory(|C|={self.n_concepts}, |R|={self.n_roles}, axioms={len(self.axioms)})"


def parse_theory(text: str) -> Theory:
    """Parse `.nf` text into a Theory.

    Raises ParseError with the offending line number for unknown tags, arity
    mismatches, Bot in a BOT-variant slot, or malformed directives.
    """
    sig = Signature()
    axioms: list[NormalizedAxiom] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            tokens = line.split()
            directive = tokens[0][1:]
            if directive in ("concept", "role", "individual"):
                if len(tokens) != 2:
                    raise ParseError(line_no, f"directive #{directive} expects exactly one name")
                interner = {
                    "concept": sig.concepts,
                    "role": sig.roles,
                    "individual": sig.individuals,
                }[directive]
                interner.intern(tokens[1])
            continue
        tokens = line.split()
        tag = tokens[0]
        if tag not in AXIOM_TAGS:
            raise ParseError(line_no, f"unknown axiom tag {tag!r}")
        kinds = _SLOT_KINDS[tag]
        if len(tokens) - 1 != len(kinds):
            raise ParseError(
                line_no,
                f"{tag} expects {len(kinds)} names, got {len(tokens) - 1} ({line!r})",
            )
        ids = []
        for kind, name in zip(kinds, tokens[1:]):
            interner = sig.concepts if kind == "c" else sig.roles
            ids.append(interner.intern(name))
        if tag in ("GCI0_BOT", "GCI1_BOT", "GCI3_BOT") and BOT_ID in [
            i for k, i in zip(kinds, ids) if k == "c"
        ]:
            raise ParseError(line_no, f"{tag} must not name {BOT} explicitly")
        axioms.append(AXIOM_TAGS[tag](*ids))
    return Theory(sig, axioms)


def format_axiom(sig: Signature, ax: NormalizedAxiom) -> str:
    """One `.nf` line for the axiom, names resolved against the signature."""
    tag = axiom_tag(ax)
    names = [
        (sig.concepts if kind == "c" else sig.roles).name_of(ident)
        for kind, ident in zip(_SLOT_KINDS[tag], axiom_slots(ax))
    ]
    return " ".join([tag] + names)


def serialize_theory(theory: Theory) -> str:
    """Deterministic `.nf` text: signature directives, then axioms in order.

    Top and Bot are implied and never emitted.  ``parse_theory`` on the result
    reproduces an equal Theory.
    """
    sig = theory.signature
    lines = []
    for name in sig.concepts.names()[2:]:
        lines.append(f"#concept {name}")
    for name in sig.roles.names():
        lines.append(f"#role {name}")
    for name in sig.individuals.names():
        lines.append(f"#individual {name}")
    for ax in theory.axioms:
        lines.append(format_axiom(sig, ax))
    return "\n".join(lines) + ("\n" if lines else "")


def load_theory(path) -> Theory:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_theory(fh.read())


def save_theory(theory: Theory, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_theory(theory))


def signature_stats(theory: Theory) -> dict[str, int]:
    """Axiom counts per variant plus signature sizes (duplicates already removed)."""
    counts = Counter(axiom_tag(ax) for ax in theory.axioms)
    stats = {tag: counts.get(tag, 0) for tag in AXIOM_TAGS}
    stats["concepts"] = theory.n_concepts
    stats["roles"] = theory.n_roles
    stats["individuals"] = len(theory.signature.individuals)
    return stats
