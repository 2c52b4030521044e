"""Saturation-based EL++ classification.

``classify`` computes the least fixpoint of the standard completion rules over
a normalized theory, producing every entailed atomic subsumption (the
subsumption index S), the reflexive-transitive role hierarchy, and the role
link relation R accumulated during saturation:

    CR0  A in S(A); Top in S(A); every X in S(Bot)
    CR1  A' in S(A), (A' [= B) asserted            =>  B in S(A)
    CR2  A1, A2 in S(A), (A1 n A2 [= B) asserted   =>  B in S(A)
    CR3  A' in S(A), (A' [= Er.B) asserted         =>  (A, B) in R(r)
    CR4  (A, B) in R(r), B' in S(B), (Er.B' [= E)  =>  E in S(A)
    CR5  (A, B) in R(r), Bot in S(B)               =>  Bot in S(A)
    CR6  (A, B) in R(r), r [= s                    =>  (A, B) in R(s)
    CR7  (A, B) in R(r1), (B, E) in R(r2), (r1 o r2 [= s)  =>  (A, E) in R(s)

BOT variants participate as their Bot-target counterparts.  Unsatisfiable
concepts are recorded as ``Bot in S(A)`` only; ``is_subclass`` consults
Bot-membership first instead of eagerly inflating S(A).

The engine is worklist-driven with per-slot premise indexes so that large
biomedical-ontology signatures classify in seconds; a deliberately naive
re-scan-everything fixpoint lives in the test suite as the independent oracle.
``classify`` is sequential and deterministic; the returned indexes are
immutable and safe for concurrent readers.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass

from .core import (
    BOT_ID,
    GCI0,
    GCI0Bot,
    GCI1,
    GCI1Bot,
    GCI2,
    GCI3,
    GCI3Bot,
    RI0,
    RI1,
    TOP_ID,
    Theory,
)


@dataclass(frozen=True)
class SubsumptionIndex:
    """All entailed superclasses per concept (reflexive, transitively closed)."""

    sup: tuple[frozenset[int], ...]
    sub: tuple[frozenset[int], ...]

    def superclasses(self, a: int) -> frozenset[int]:
        self._check(a)
        return self.sup[a]

    def subclasses(self, b: int) -> frozenset[int]:
        self._check(b)
        return self.sub[b]

    def is_subclass(self, a: int, b: int) -> bool:
        """True when a [= b is entailed; unsatisfiable a is below everything."""
        self._check(a)
        self._check(b)
        return BOT_ID in self.sup[a] or b in self.sup[a]

    def _check(self, ident: int) -> None:
        if not 0 <= ident < len(self.sup):
            raise KeyError(f"unknown concept id {ident}")


@dataclass(frozen=True)
class RoleHierarchy:
    """Reflexive-transitive closure of simple role inclusions, plus chains."""

    rsup: tuple[frozenset[int], ...]
    chains: tuple[RI1, ...]

    def super_roles(self, r: int) -> frozenset[int]:
        if not 0 <= r < len(self.rsup):
            raise KeyError(f"unknown role id {r}")
        return self.rsup[r]

    def sub_roles(self, r: int) -> frozenset[int]:
        if not 0 <= r < len(self.rsup):
            raise KeyError(f"unknown role id {r}")
        return frozenset(q for q in range(len(self.rsup)) if r in self.rsup[q])


@dataclass(frozen=True)
class RoleLinkIndex:
    """Concept pairs linked per role during saturation (completion state)."""

    links: tuple[frozenset[tuple[int, int]], ...]

    def pairs(self, r: int) -> frozenset[tuple[int, int]]:
        if not 0 <= r < len(self.links):
            raise KeyError(f"unknown role id {r}")
        return self.links[r]


def _role_closure(n_roles: int, ri0: list[RI0]) -> list[set[int]]:
    direct = defaultdict(set)
    for ax in ri0:
        direct[ax.sub].add(ax.sup)
    rsup = []
    for r in range(n_roles):
        seen = {r}
        stack = [r]
        while stack:
            q = stack.pop()
            for s in direct.get(q, ()):
                if s not in seen:
                    seen.add(s)
                    stack.append(s)
        rsup.append(seen)
    return rsup


def classify(theory: Theory) -> tuple[SubsumptionIndex, RoleHierarchy, RoleLinkIndex]:
    n_c = theory.n_concepts
    n_r = theory.n_roles

    # premise indexes over asserted axioms (BOT variants folded in)
    gci0_by_sub: dict[int, list[int]] = defaultdict(list)
    gci1_by_conjunct: dict[int, list[tuple[int, int]]] = defaultdict(list)
    gci2_by_sub: dict[int, list[tuple[int, int]]] = defaultdict(list)
    gci3_by_role_filler: dict[tuple[int, int], list[int]] = defaultdict(list)
    ri0: list[RI0] = []
    chains: list[RI1] = []
    for ax in theory.axioms:
        if isinstance(ax, GCI0):
            gci0_by_sub[ax.sub].append(ax.sup)
        elif isinstance(ax, GCI0Bot):
            gci0_by_sub[ax.sub].append(BOT_ID)
        elif isinstance(ax, GCI1):
            gci1_by_conjunct[ax.left].append((ax.right, ax.sup))
            gci1_by_conjunct[ax.right].append((ax.left, ax.sup))
        elif isinstance(ax, GCI1Bot):
            gci1_by_conjunct[ax.left].append((ax.right, BOT_ID))
            gci1_by_conjunct[ax.right].append((ax.left, BOT_ID))
        elif isinstance(ax, GCI2):
            gci2_by_sub[ax.sub].append((ax.role, ax.filler))
        elif isinstance(ax, GCI3):
            gci3_by_role_filler[(ax.role, ax.filler)].append(ax.sup)
        elif isinstance(ax, GCI3Bot):
            gci3_by_role_filler[(ax.role, ax.filler)].append(BOT_ID)
        elif isinstance(ax, RI0):
            ri0.append(ax)
        elif isinstance(ax, RI1):
            chains.append(ax)

    rsup = _role_closure(n_r, ri0)
    chain_by_first: dict[int, list[tuple[int, int]]] = defaultdict(list)
    chain_by_second: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for ch in chains:
        chain_by_first[ch.first].append((ch.second, ch.sup))
        chain_by_second[ch.second].append((ch.first, ch.sup))

    sup: list[set[int]] = [set() for _ in range(n_c)]
    links: list[set[tuple[int, int]]] = [set() for _ in range(n_r)]
    out_by_role: list[dict[int, set[int]]] = [defaultdict(set) for _ in range(n_c)]
    in_by_role: list[dict[int, set[int]]] = [defaultdict(set) for _ in range(n_c)]

    work: deque = deque()
    for a in range(n_c):
        work.append((a, a))
        work.append((a, TOP_ID))
    for x in range(n_c):
        work.append((BOT_ID, x))
    edge_work: deque = deque()

    def push_s(a: int, x: int) -> None:
        if x not in sup[a]:
            work.append((a, x))

    def push_e(a: int, r: int, b: int) -> None:
        if (a, b) not in links[r]:
            edge_work.append((a, r, b))

    def process_s(a: int, x: int) -> None:
        if x in sup[a]:
            return
        sup[a].add(x)
        for b in gci0_by_sub.get(x, ()):
            push_s(a, b)
        for other, b in gci1_by_conjunct.get(x, ()):
            if other in sup[a]:
                push_s(a, b)
        for r, b in gci2_by_sub.get(x, ()):
            push_e(a, r, b)
        # x newly subsumes a: re-examine edges into a as CR4/CR5 premises
        for r, preds in in_by_role[a].items():
            for e in gci3_by_role_filler.get((r, x), ()):
                for p in preds:
                    push_s(p, e)
        if x == BOT_ID:
            for preds in in_by_role[a].values():
                for p in preds:
                    push_s(p, BOT_ID)

    def process_e(a: int, r: int, b: int) -> None:
        if (a, b) in links[r]:
            return
        links[r].add((a, b))
        out_by_role[a][r].add(b)
        in_by_role[b][r].add(a)
        for x in sup[b]:
            for e in gci3_by_role_filler.get((r, x), ()):
                push_s(a, e)
        if BOT_ID in sup[b]:
            push_s(a, BOT_ID)
        for s in rsup[r]:
            if s != r:
                push_e(a, s, b)
        for r2, s in chain_by_first.get(r, ()):
            for e in out_by_role[b].get(r2, ()):
                push_e(a, s, e)
        for r1, s in chain_by_second.get(r, ()):
            for p in in_by_role[a].get(r1, ()):
                push_e(p, s, b)

    while work or edge_work:
        while work:
            a, x = work.popleft()
            process_s(a, x)
        while edge_work:
            a, r, b = edge_work.popleft()
            process_e(a, r, b)

    sub: list[set[int]] = [set() for _ in range(n_c)]
    for a in range(n_c):
        for b in sup[a]:
            sub[b].add(a)

    index = SubsumptionIndex(
        sup=tuple(frozenset(s) for s in sup),
        sub=tuple(frozenset(s) for s in sub),
    )
    hierarchy = RoleHierarchy(
        rsup=tuple(frozenset(s) for s in rsup),
        chains=tuple(chains),
    )
    link_index = RoleLinkIndex(links=tuple(frozenset(s) for s in links))
    return index, hierarchy, link_index


def is_subclass(index: SubsumptionIndex, a: int, b: int) -> bool:
    return index.is_subclass(a, b)


def dump_subsumptions(theory: Theory, index: SubsumptionIndex) -> str:
    """One ``A <tab> B`` line per entailed atomic subsumption, id-sorted."""
    names = theory.signature.concepts
    lines = []
    for a in range(theory.n_concepts):
        for b in sorted(index.sup[a]):
            lines.append(f"{names.name_of(a)}\t{names.name_of(b)}")
    return "\n".join(lines) + ("\n" if lines else "")
