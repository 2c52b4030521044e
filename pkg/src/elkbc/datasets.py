"""Synthetic theory generators.

``layered_dag_benchmark`` builds a small ontology-completion benchmark: a
random layered subsumption DAG whose transitive closure is split 90/5/5 into
train/validation/test (so most held-out subsumptions stay derivable from the
retained ones), plus a sprinkle of existential axioms.

``synthesize_shape`` reproduces the *shape* of the published benchmark
ontologies (yeast interaction and function prediction, food, and medical
terminologies): random distinct axioms matching the published per-variant
counts, class count, and role count exactly.  The content is meaningless; the
point is exercising parsers, statistics, and the training loop at realistic
scale without shipping the datasets themselves.
"""

from __future__ import annotations

import numpy as np

from .core import (
    GCI0,
    GCI1,
    GCI1Bot,
    GCI2,
    GCI3,
    NormalizedAxiom,
    Signature,
    Theory,
)

#: published train-part statistics: axiom counts per variant, signature
#: sizes, test-set size and test variant
BENCHMARK_SHAPES = {
    "yeast-iw": {
        "GCI0": 81_068, "GCI1": 11_825, "GCI2": 269_567, "GCI3": 11_823,
        "GCI0_BOT": 0, "GCI1_BOT": 31, "GCI3_BOT": 0,
        "classes": 61_846, "roles": 16, "test": 12_040, "test_variant": "GCI2",
    },
    "yeast-hf": {
        "GCI0": 81_068, "GCI1": 11_825, "GCI2": 290_433, "GCI3": 11_823,
        "GCI0_BOT": 0, "GCI1_BOT": 31, "GCI3_BOT": 0,
        "classes": 61_850, "roles": 16, "test": 1_530, "test_variant": "GCI2",
    },
    "foodon": {
        "GCI0": 21_795, "GCI1": 1_267, "GCI2": 10_719, "GCI3": 897,
        "GCI0_BOT": 0, "GCI1_BOT": 495, "GCI3_BOT": 0,
        "classes": 24_969, "roles": 43, "test": 5_752, "test_variant": "GCI0",
    },
    "galen": {
        "GCI0": 27_339, "GCI1": 15_613, "GCI2": 29_618, "GCI3": 15_615,
        "GCI0_BOT": 0, "GCI1_BOT": 0, "GCI3_BOT": 0,
        "classes": 49_223, "roles": 888, "test": 667, "test_variant": "GCI0",
    },
}


def _distinct_rows(rng, count, columns, exclude=None, keep=None):
    """``count`` distinct tuples; each column is (low, high) for a uniform
    draw.  ``exclude`` skips known tuples, ``keep`` is a per-row predicate."""
    exclude = exclude or set()
    rows: set[tuple] = set()
    while len(rows) < count:
        need = count - len(rows)
        block = np.stack(
            [rng.integers(lo, hi, size=need + max(16, need // 4)) for lo, hi in columns],
            axis=1,
        )
        for row in map(tuple, block.tolist()):
            if row not in exclude and (keep is None or keep(row)):
                rows.add(row)
                if len(rows) == count:
                    break
    return sorted(rows)


def synthesize_shape(name: str, seed: int = 0) -> tuple[Theory, list[NormalizedAxiom]]:
    """A theory and test-axiom list with exactly the named benchmark's shape."""
    shape = BENCHMARK_SHAPES[name]
    rng = np.random.default_rng(seed)
    n_c, n_r = shape["classes"], shape["roles"]
    sig = Signature()
    for i in range(n_c - 2):
        sig.concepts.intern(f"C{i}")
    for i in range(n_r):
        sig.roles.intern(f"R{i}")
    c = (2, n_c)  # named concepts only; Top/Bot never occur in these datasets
    r = (0, n_r)

    no_loop = lambda row: row[0] != row[1]  # noqa: E731
    axioms: list[NormalizedAxiom] = []
    gci0_rows = _distinct_rows(rng, shape["GCI0"], [c, c], keep=no_loop)
    axioms += [GCI0(a, b) for a, b in gci0_rows]
    axioms += [GCI1(a, b, e) for a, b, e in _distinct_rows(rng, shape["GCI1"], [c, c, c])]
    axioms += [GCI2(a, q, b) for a, q, b in _distinct_rows(rng, shape["GCI2"], [c, r, c])]
    axioms += [GCI3(q, a, b) for q, a, b in _distinct_rows(rng, shape["GCI3"], [r, c, c])]
    axioms += [GCI1Bot(a, b) for a, b in _distinct_rows(rng, shape["GCI1_BOT"], [c, c])]

    if shape["test_variant"] == "GCI2":
        test = [GCI2(a, q, b) for a, q, b in _distinct_rows(rng, shape["test"], [c, r, c])]
    else:
        rows = _distinct_rows(
            rng, shape["test"], [c, c], exclude=set(gci0_rows), keep=no_loop
        )
        test = [GCI0(a, b) for a, b in rows]
    theory = Theory(sig, axioms)
    return theory, test


def layered_dag_benchmark(
    seed: int = 0,
    n_concepts: int = 200,
    n_roles: int = 2,
    window: int = 60,
    n_gci2: int = 60,
    n_gci3: int = 30,
) -> tuple[Theory, list[NormalizedAxiom], list[NormalizedAxiom]]:
    """Random layered DAG; returns (train theory, validation, test).

    The axiom pool is the DAG's full transitive closure, shuffled and split
    90/5/5, so a held-out subsumption usually remains derivable from the
    retained pairs; existential axioms go to the train part.
    """
    rng = np.random.default_rng(seed)
    sig = Signature()
    for i in range(n_concepts - 2):
        sig.concepts.intern(f"n{i}")
    for i in range(n_roles):
        sig.roles.intern(f"r{i}")

    ancestors: dict[int, set[int]] = {2: set()}
    for i in range(3, n_concepts):
        k = 1 + (rng.random() < 0.5) + (rng.random() < 0.3)
        lo = max(2, i - window)
        parents = {int(x) for x in rng.integers(lo, i, size=k)}
        anc = set()
        for p in parents:
            anc.add(p)
            anc |= ancestors[p]
        ancestors[i] = anc

    pairs = [(i, b) for i in range(2, n_concepts) for b in ancestors[i]]
    order = rng.permutation(len(pairs))
    gci0 = [GCI0(*pairs[i]) for i in order]

    extra: list[NormalizedAxiom] = []
    for _ in range(n_gci2):
        a, b = (int(x) for x in rng.integers(2, n_concepts, 2))
        extra.append(GCI2(a, int(rng.integers(0, n_roles)), b))
    for _ in range(n_gci3):
        a, b = (int(x) for x in rng.integers(2, n_concepts, 2))
        extra.append(GCI3(int(rng.integers(0, n_roles)), a, b))

    n_test = max(1, len(gci0) // 20)
    test, val, train_part = gci0[:n_test], gci0[n_test : 2 * n_test], gci0[2 * n_test :]
    return Theory(sig, train_part + extra), val, test
