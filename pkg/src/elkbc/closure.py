"""Approximate deductive closure of a normalized theory, per normal form.

Two cooperating rule groups extend a classified theory:

* a one-shot expansion of every asserted GCI1/GCI2/GCI3/GCI1_BOT/GCI3_BOT
  axiom, instantiating its subclass/superclass premises from the subsumption
  index and its role premises from the role hierarchy (GCI0 and GCI0_BOT come
  verbatim from the reasoner);
* signature-level rules that hold for arbitrary concepts: anything conjoined
  with Bot (or an unsatisfiable concept) is below everything, ``A n E [= E'``
  whenever ``E [= E'``, every provably-disjoint pair is below everything,
  ``Bot [= Er.B`` and ``A [= Er.B`` for unsatisfiable ``A``, and
  ``Er.A [= Top``.

The existential composition rule (``A [= Er.B``, ``B [= Er'.E``,
``r o r' [= s`` gives ``A [= Es.E``) can feed itself, so it alone is iterated
to a fixpoint; one application of every other rule is already exhaustive
because the subsumption index is transitively closed.

The rule set is sound but deliberately incomplete.  Conjunctions are treated
as unordered: ``A n B`` and ``B n A`` name the same axiom, and pair slots are
canonicalized to (lower id, higher id).

Closures come in two modes.  ``materialized`` holds explicit per-variant sets
(refused above a configurable |C|^3 cap, and signature-quantified rules are
kept analytic above an ``analytic_threshold`` so huge signatures stay
tractable); ``oracle`` answers ``entails`` by scanning the asserted axioms of
the relevant variant through the same premise patterns.  The two modes agree
exactly.  ``entails`` is read-only and safe for concurrent callers.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .core import (
    BOT_ID,
    GCI0,
    GCI0Bot,
    GCI1,
    GCI1Bot,
    GCI2,
    GCI3,
    GCI3Bot,
    NormalizedAxiom,
    TOP_ID,
    Theory,
)
from .reasoner import RoleHierarchy, SubsumptionIndex


class ClosureCapError(RuntimeError):
    """Materialization refused: the GCI1 bound |C|^3 exceeds the cap."""


def _canon(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


@dataclass(eq=False)
class DeductiveClosure:
    theory: Theory
    index: SubsumptionIndex
    hierarchy: RoleHierarchy
    materialized: bool
    analytic_quantified: bool = False
    # materialized per-variant sets (empty in oracle mode)
    gci1: dict[tuple[int, int], set[int]] = field(default_factory=dict)
    gci1_bot: set[tuple[int, int]] = field(default_factory=set)
    gci2: dict[tuple[int, int], set[int]] = field(default_factory=dict)
    gci3: dict[tuple[int, int], set[int]] = field(default_factory=dict)
    gci3_bot: set[tuple[int, int]] = field(default_factory=set)

    def __post_init__(self):
        th = self.theory
        self._asserted_gci1 = th.axioms_of(GCI1)
        self._asserted_gci1_bot = th.axioms_of(GCI1Bot)
        self._asserted_gci2 = th.axioms_of(GCI2)
        self._asserted_gci3 = th.axioms_of(GCI3)
        self._asserted_gci3_bot = th.axioms_of(GCI3Bot)
        self._chain_edges_cache: dict[int, dict[int, set[int]]] | None = None

    # -- shared analytic pieces ---------------------------------------------

    def _unsat(self, a: int) -> bool:
        return BOT_ID in self.index.sup[a]

    def _check_concept(self, a: int) -> None:
        if not 0 <= a < self.theory.n_concepts:
            raise KeyError(f"unknown concept id {a}")

    def _check_role(self, r: int) -> None:
        if not 0 <= r < self.theory.n_roles:
            raise KeyError(f"unknown role id {r}")

    # -- entailment ----------------------------------------------------------

    def entails(self, ax: NormalizedAxiom) -> bool:
        if isinstance(ax, GCI0):
            return self.index.is_subclass(ax.sub, ax.sup)
        if isinstance(ax, GCI0Bot):
            self._check_concept(ax.sub)
            return self._unsat(ax.sub)
        if isinstance(ax, GCI1):
            if ax.sup == BOT_ID:
                return self.entails(GCI1Bot(ax.left, ax.right))
            return self._entails_gci1(ax.left, ax.right, ax.sup)
        if isinstance(ax, GCI1Bot):
            return self._entails_gci1_bot(ax.left, ax.right)
        if isinstance(ax, GCI2):
            return self._entails_gci2(ax.sub, ax.role, ax.filler)
        if isinstance(ax, GCI3):
            if ax.sup == BOT_ID:
                return self.entails(GCI3Bot(ax.role, ax.filler))
            return self._entails_gci3(ax.role, ax.filler, ax.sup)
        if isinstance(ax, GCI3Bot):
            return self._entails_gci3_bot(ax.role, ax.filler)
        raise ValueError(f"role-inclusion axioms are outside the closure's scope: {ax!r}")

    def _entails_gci1(self, a: int, b: int, e: int) -> bool:
        for x in (a, b, e):
            self._check_concept(x)
        if self.materialized and not self.analytic_quantified:
            return e in self.gci1.get(_canon(a, b), ())
        if self.materialized and e in self.gci1.get(_canon(a, b), ()):
            return True
        return self._a2_gci1(a, b, e) or self._alg1_gci1(a, b, e)

    def _entails_gci1_bot(self, a: int, b: int) -> bool:
        self._check_concept(a)
        self._check_concept(b)
        if self.materialized and not self.analytic_quantified:
            return _canon(a, b) in self.gci1_bot
        if self.materialized and _canon(a, b) in self.gci1_bot:
            return True
        return self._a2_gci1_bot(a, b) or self._alg1_gci1_bot(a, b)

    def _entails_gci2(self, a: int, r: int, b: int) -> bool:
        self._check_concept(a)
        self._check_concept(b)
        self._check_role(r)
        if self.materialized and not self.analytic_quantified:
            return b in self.gci2.get((a, r), ())
        if self.materialized and b in self.gci2.get((a, r), ()):
            return True
        if self._a2_gci2(a, r, b) or self._alg1_gci2(a, r, b):
            return True
        if self.hierarchy.chains:
            return b in self._chain_edges(a).get(r, ())
        return False

    def _entails_gci3(self, r: int, a: int, b: int) -> bool:
        self._check_concept(a)
        self._check_concept(b)
        self._check_role(r)
        if self.materialized and not self.analytic_quantified:
            return b in self.gci3.get((r, a), ())
        if self.materialized and b in self.gci3.get((r, a), ()):
            return True
        return self._a2_gci3(r, a, b) or self._alg1_gci3(r, a, b)

    def _entails_gci3_bot(self, r: int, a: int) -> bool:
        self._check_concept(a)
        self._check_role(r)
        if self.materialized and not self.analytic_quantified:
            return (r, a) in self.gci3_bot
        if self.materialized and (r, a) in self.gci3_bot:
            return True
        return self._alg1_gci3_bot(r, a)

    # -- signature-level rules, answered by pattern --------------------------

    def _a2_gci1(self, a: int, b: int, e: int) -> bool:
        sup = self.index.sup
        if BOT_ID in (a, b) or self._unsat(a) or self._unsat(b):
            return True
        if e in sup[a] or e in sup[b]:
            return True
        return self._entails_gci1_bot(a, b)

    def _a2_gci1_bot(self, a: int, b: int) -> bool:
        return BOT_ID in (a, b) or self._unsat(a) or self._unsat(b)

    def _a2_gci2(self, a: int, r: int, b: int) -> bool:
        return b != BOT_ID and (a == BOT_ID or self._unsat(a))

    def _a2_gci3(self, r: int, a: int, b: int) -> bool:
        return b == TOP_ID and a != BOT_ID

    # -- one-shot premise scans over asserted axioms --------------------------

    def _alg1_gci1(self, a: int, b: int, e: int) -> bool:
        sup = self.index.sup
        for ax in self._asserted_gci1:
            if e in sup[ax.sup]:
                if (ax.left in sup[a] and ax.right in sup[b]) or (
                    ax.left in sup[b] and ax.right in sup[a]
                ):
                    return True
        return False

    def _alg1_gci1_bot(self, a: int, b: int) -> bool:
        sup = self.index.sup
        for ax in self._asserted_gci1_bot:
            if (ax.left in sup[a] and ax.right in sup[b]) or (
                ax.left in sup[b] and ax.right in sup[a]
            ):
                return True
        for ax in self._asserted_gci1:
            if self._unsat(ax.sup):
                if (ax.left in sup[a] and ax.right in sup[b]) or (
                    ax.left in sup[b] and ax.right in sup[a]
                ):
                    return True
        return False

    def _alg1_gci2(self, a: int, r: int, b: int) -> bool:
        sup = self.index.sup
        rsup = self.hierarchy.rsup
        for ax in self._asserted_gci2:
            if ax.sub in sup[a] and b in sup[ax.filler] and r in rsup[ax.role]:
                return True
        return False

    def _alg1_gci3(self, r: int, a: int, b: int) -> bool:
        sup = self.index.sup
        rsup = self.hierarchy.rsup
        for ax in self._asserted_gci3:
            if ax.filler in sup[a] and b in sup[ax.sup] and ax.role in rsup[r]:
                return True
        return False

    def _alg1_gci3_bot(self, r: int, a: int) -> bool:
        sup = self.index.sup
        rsup = self.hierarchy.rsup
        for ax in self._asserted_gci3_bot:
            if ax.filler in sup[a] and ax.role in rsup[r]:
                return True
        for ax in self._asserted_gci3:
            if self._unsat(ax.sup) and ax.filler in sup[a] and ax.role in rsup[r]:
                return True
        return False

    # -- existential composition, query-driven --------------------------------

    def _base_gci2_edges(self, a: int) -> dict[int, set[int]]:
        """Non-chain entailed (r -> fillers) for subject ``a``."""
        sup = self.index.sup
        rsup = self.hierarchy.rsup
        edges: dict[int, set[int]] = defaultdict(set)
        for ax in self._asserted_gci2:
            if ax.sub in sup[a]:
                fillers = sup[ax.filler]
                for r in rsup[ax.role]:
                    edges[r].update(fillers)
        if a == BOT_ID or self._unsat(a):
            non_bot = set(range(self.theory.n_concepts)) - {BOT_ID}
            for r in range(self.theory.n_roles):
                edges[r].update(non_bot)
        return edges

    def _chain_edges(self, a: int) -> dict[int, set[int]]:
        """Chain-saturated GCI2 edges from ``a``, expanded over every subject
        the saturation can reach (fillers become composable subjects)."""
        if self._chain_edges_cache is None:
            self._chain_edges_cache = {}
        cache = self._chain_edges_cache
        if a in cache:
            return cache[a]

        universe: dict[int, dict[int, set[int]]] = {}

        def expand(start: int) -> None:
            frontier = [start]
            while frontier:
                x = frontier.pop()
                if x in universe:
                    continue
                universe[x] = self._base_gci2_edges(x)
                frontier.extend(
                    m for fillers in universe[x].values() for m in fillers if m not in universe
                )

        expand(a)
        changed = True
        while changed:
            changed = False
            for ch in self.hierarchy.chains:
                for x in list(universe):
                    edges = universe[x]
                    for m in list(edges.get(ch.first, ())):
                        if m not in universe:
                            expand(m)
                        targets = universe[m].get(ch.second, ())
                        if not targets:
                            continue
                        dest = edges.setdefault(ch.sup, set())
                        before = len(dest)
                        dest.update(targets)
                        if len(dest) != before:
                            changed = True
            for x in list(universe):
                for fillers in universe[x].values():
                    for m in list(fillers):
                        if m not in universe:
                            expand(m)
                            changed = True
        for x, edges in universe.items():
            cache[x] = edges
        return cache[a]

    # -- enumeration helpers ---------------------------------------------------

    def entailed_fillers(self, ax: NormalizedAxiom) -> frozenset[int]:
        """Values of the rightmost concept slot (E for GCI1) whose substitution
        is entailed; used by biased negative sampling."""
        n_c = self.theory.n_concepts
        if isinstance(ax, GCI1):
            return frozenset(e for e in range(n_c) if self.entails(GCI1(ax.left, ax.right, e)))
        if isinstance(ax, GCI0):
            return frozenset(b for b in range(n_c) if self.index.is_subclass(ax.sub, b))
        if isinstance(ax, GCI2):
            return frozenset(b for b in range(n_c) if self._entails_gci2(ax.sub, ax.role, b))
        if isinstance(ax, GCI3):
            return frozenset(b for b in range(n_c) if self.entails(GCI3(ax.role, ax.filler, b)))
        if isinstance(ax, GCI1Bot):
            return frozenset(b for b in range(n_c) if self._entails_gci1_bot(ax.left, b))
        if isinstance(ax, GCI0Bot):
            return frozenset(a for a in range(n_c) if self._unsat(a))
        if isinstance(ax, GCI3Bot):
            return frozenset(a for a in range(n_c) if self._entails_gci3_bot(ax.role, a))
        raise ValueError(f"no corruptible concept slot on {ax!r}")

    def counts(self) -> dict[str, int]:
        """Materialized axiom count per variant (GCI0 family from the index)."""
        if not self.materialized:
            raise ValueError("counts require a materialized closure")
        return {
            "GCI0": sum(len(s) for s in self.index.sup),
            "GCI1": sum(len(s) for s in self.gci1.values()),
            "GCI2": sum(len(s) for s in self.gci2.values()),
            "GCI3": sum(len(s) for s in self.gci3.values()),
            "GCI0_BOT": sum(1 for a in range(self.theory.n_concepts) if self._unsat(a)),
            "GCI1_BOT": len(self.gci1_bot),
            "GCI3_BOT": len(self.gci3_bot),
        }

    def iter_variant(self, tag: str):
        """Materialized axioms of one variant, id-sorted, pairs canonical."""
        if not self.materialized:
            raise ValueError("iteration requires a materialized closure")
        if tag == "GCI0":
            for a in range(self.theory.n_concepts):
                for b in sorted(self.index.sup[a]):
                    yield GCI0(a, b)
        elif tag == "GCI0_BOT":
            for a in range(self.theory.n_concepts):
                if self._unsat(a):
                    yield GCI0Bot(a)
        elif tag == "GCI1":
            for (a, b) in sorted(self.gci1):
                for e in sorted(self.gci1[(a, b)]):
                    yield GCI1(a, b, e)
        elif tag == "GCI1_BOT":
            for (a, b) in sorted(self.gci1_bot):
                yield GCI1Bot(a, b)
        elif tag == "GCI2":
            for (a, r) in sorted(self.gci2):
                for b in sorted(self.gci2[(a, r)]):
                    yield GCI2(a, r, b)
        elif tag == "GCI3":
            for (r, a) in sorted(self.gci3):
                for b in sorted(self.gci3[(r, a)]):
                    yield GCI3(r, a, b)
        elif tag == "GCI3_BOT":
            for (r, a) in sorted(self.gci3_bot):
                yield GCI3Bot(r, a)
        else:
            raise ValueError(f"unknown variant {tag!r}")


def compute_closure(
    theory: Theory,
    index: SubsumptionIndex,
    hierarchy: RoleHierarchy,
    mode: str = "materialized",
    materialize_cap: int = 10**8,
    analytic_threshold: int = 2000,
) -> DeductiveClosure:
    """Build the per-variant closure.

    ``mode`` is ``"materialized"`` or ``"oracle"``.  Materialization raises
    ClosureCapError when |C|^3 exceeds ``materialize_cap``; above
    ``analytic_threshold`` concepts the signature-quantified rules stay
    analytic (``entails`` still answers them, the sets just omit them).
    """
    if mode not in ("materialized", "oracle"):
        raise ValueError(f"unknown closure mode {mode!r}")
    if mode == "oracle":
        return DeductiveClosure(theory, index, hierarchy, materialized=False)

    n_c = theory.n_concepts
    if n_c**3 > materialize_cap:
        raise ClosureCapError(
            f"|C|^3 = {n_c**3} exceeds the materialization cap {materialize_cap}; "
            "use oracle mode"
        )
    analytic_quantified = n_c > analytic_threshold

    dc = DeductiveClosure(
        theory, index, hierarchy, materialized=True, analytic_quantified=analytic_quantified
    )
    sup = index.sup
    sub = index.sub
    rsup = hierarchy.rsup
    n_r = theory.n_roles

    def add_gci1(a: int, b: int, e: int) -> None:
        if e == BOT_ID:
            dc.gci1_bot.add(_canon(a, b))
        else:
            dc.gci1.setdefault(_canon(a, b), set()).add(e)

    def add_gci3(r: int, a: int, b: int) -> None:
        if b == BOT_ID:
            dc.gci3_bot.add((r, a))
        else:
            dc.gci3.setdefault((r, a), set()).add(b)

    # one-shot expansion of asserted axioms
    for ax in theory.axioms_of(GCI1):
        for a in sub[ax.left]:
            for b in sub[ax.right]:
                for e in sup[ax.sup]:
                    add_gci1(a, b, e)
    for ax in theory.axioms_of(GCI1Bot):
        for a in sub[ax.left]:
            for b in sub[ax.right]:
                dc.gci1_bot.add(_canon(a, b))
    for ax in theory.axioms_of(GCI2):
        for a in sub[ax.sub]:
            for r in rsup[ax.role]:
                dest = dc.gci2.setdefault((a, r), set())
                dest.update(sup[ax.filler])
    for ax in theory.axioms_of(GCI3):
        for r in range(n_r):
            if ax.role not in rsup[r]:
                continue
            for a in sub[ax.filler]:
                for b in sup[ax.sup]:
                    add_gci3(r, a, b)
    for ax in theory.axioms_of(GCI3Bot):
        for r in range(n_r):
            if ax.role not in rsup[r]:
                continue
            for a in sub[ax.filler]:
                dc.gci3_bot.add((r, a))

    if not analytic_quantified:
        unsat = [a for a in range(n_c) if BOT_ID in sup[a]]
        all_non_bot = [e for e in range(n_c) if e != BOT_ID]
        # anything conjoined with Bot or an unsatisfiable concept is below
        # everything (also yields the GCI1_BOT pair)
        for b in unsat:
            for a in range(n_c):
                pair = _canon(a, b)
                dc.gci1_bot.add(pair)
        # A n E [= E' whenever E [= E' (subsumes the common-superclass and
        # conjunction-with-Top rules)
        for e in range(n_c):
            sups_e = sup[e]
            for a in range(n_c):
                pair = _canon(a, e)
                dest = dc.gci1.setdefault(pair, set())
                dest.update(sups_e - {BOT_ID})
                if BOT_ID in sups_e:
                    dc.gci1_bot.add(pair)
        # every provably-disjoint pair is below everything
        for pair in dc.gci1_bot:
            dc.gci1.setdefault(pair, set()).update(all_non_bot)
        # Bot (or anything unsatisfiable) has every existential superclass
        for a in unsat:
            for r in range(n_r):
                dc.gci2.setdefault((a, r), set()).update(all_non_bot)
        # Er.A [= Top for satisfiable A
        for r in range(n_r):
            for a in all_non_bot:
                dc.gci3.setdefault((r, a), set()).add(TOP_ID)

    # existential composition iterated to fixpoint (it feeds itself)
    if hierarchy.chains:
        by_subject: dict[int, dict[int, set[int]]] = defaultdict(dict)
        for (a, r), fillers in dc.gci2.items():
            by_subject[a][r] = fillers
        changed = True
        while changed:
            changed = False
            for ch in hierarchy.chains:
                for a in list(by_subject):
                    firsts = by_subject[a].get(ch.first)
                    if not firsts:
                        continue
                    for m in list(firsts):
                        seconds = by_subject.get(m, {}).get(ch.second)
                        if not seconds:
                            continue
                        dest = dc.gci2.setdefault((a, ch.sup), set())
                        before = len(dest)
                        dest.update(seconds)
                        if len(dest) != before:
                            by_subject[a][ch.sup] = dest
                            changed = True
    return dc
