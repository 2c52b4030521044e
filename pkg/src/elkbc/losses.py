"""Positive and negative loss evaluators for the three geometric model
families, over every normal form that carries a loss (role inclusions carry
none).

Families:

* ``elem``    -- concepts are open n-balls (center, radius), roles are
                 translation vectors; every loss adds ``| ||center|| - 1 |``
                 unit-sphere regularizers for the class centers it touches.
* ``elbe``    -- concepts are axis-aligned boxes (center, offset), roles are
                 translation vectors; conjunction losses go through the box
                 intersection (signed offsets signal emptiness).
* ``box2el``  -- concepts are boxes with an additional per-concept bump
                 vector; each role has a head box and a tail box.  ``delta``
                 is the target containment violation of the existential
                 negative losses; ``reg_lambda`` weights the mean bump norm
                 added by ``total_loss``.

Positive losses are hinge containment conditions: with margin 0 a zero loss
certifies the axiom's geometric truth condition (ball/box containment, with
role translation for existentials).  Negative losses penalize the same
condition's satisfaction: separation hinges for balls/boxes, minimum
radius/offset floors (``epsilon``) for the Bot forms, and squared
``(delta - mu)`` targets for the box2el existential forms.

One batch-equals-scalar code path evaluates each formula and (optionally)
accumulates its hand-derived gradient; at hinge kinks the inactive branch
(derivative zero) is chosen.  Evaluation is pure given (model, request);
parameter mutation happens only in the trainer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .core import (
    GCI0,
    GCI0Bot,
    GCI1,
    GCI1Bot,
    GCI2,
    GCI3,
    GCI3Bot,
    NormalizedAxiom,
    axiom_tag,
)

MODEL_TAGS = ("elem", "elbe", "box2el")

#: parameter block name -> ("concept"|"role", per-entry shape suffix)
PARAM_LAYOUT = {
    "elem": {
        "class_center": ("concept", "dim"),
        "class_radius": ("concept", None),
        "role_vector": ("role", "dim"),
    },
    "elbe": {
        "class_center": ("concept", "dim"),
        "class_offset": ("concept", "dim"),
        "role_vector": ("role", "dim"),
    },
    "box2el": {
        "class_center": ("concept", "dim"),
        "class_offset": ("concept", "dim"),
        "class_bump": ("concept", "dim"),
        "role_head_center": ("role", "dim"),
        "role_head_offset": ("role", "dim"),
        "role_tail_center": ("role", "dim"),
        "role_tail_offset": ("role", "dim"),
    },
}

LOSS_VARIANTS = ("GCI0", "GCI1", "GCI2", "GCI3", "GCI0_BOT", "GCI1_BOT", "GCI3_BOT")


@dataclass
class GeometricModel:
    """Learnable parameters plus hyperparameters for one model family."""

    tag: str
    dim: int
    n_concepts: int
    n_roles: int
    params: dict[str, np.ndarray]
    margin: float = 0.0
    epsilon: float = 0.01
    delta: float = 1.0
    reg_lambda: float = 0.0

    def __post_init__(self):
        if self.tag not in MODEL_TAGS:
            raise ValueError(f"unknown model tag {self.tag!r}")
        expected = set(PARAM_LAYOUT[self.tag])
        if set(self.params) != expected:
            raise ValueError(f"parameter blocks {sorted(self.params)} != {sorted(expected)}")

    def copy(self) -> "GeometricModel":
        return GeometricModel(
            tag=self.tag,
            dim=self.dim,
            n_concepts=self.n_concepts,
            n_roles=self.n_roles,
            params={k: v.copy() for k, v in self.params.items()},
            margin=self.margin,
            epsilon=self.epsilon,
            delta=self.delta,
            reg_lambda=self.reg_lambda,
        )

    def n_parameters(self) -> int:
        return sum(v.size for v in self.params.values())


@dataclass(frozen=True)
class LossRequest:
    axiom: NormalizedAxiom
    polarity: str  # "positive" | "negative"

    def __post_init__(self):
        if self.polarity not in ("positive", "negative"):
            raise ValueError(f"unknown polarity {self.polarity!r}")
        if axiom_tag(self.axiom) not in LOSS_VARIANTS:
            raise ValueError(f"no loss for axiom variant {axiom_tag(self.axiom)}")


Gradient = dict[str, np.ndarray]


def zero_gradient(model: GeometricModel) -> Gradient:
    return {k: np.zeros_like(v) for k, v in model.params.items()}


def param_shapes(tag: str, n_concepts: int, n_roles: int, dim: int) -> dict[str, tuple]:
    shapes = {}
    for name, (kind, suffix) in PARAM_LAYOUT[tag].items():
        count = n_concepts if kind == "concept" else n_roles
        shapes[name] = (count, dim) if suffix == "dim" else (count,)
    return shapes


# ---------------------------------------------------------------------------
# vectorized pieces
# ---------------------------------------------------------------------------


def _norm(v: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(v * v, axis=-1))


def _unit(v: np.ndarray, nrm: np.ndarray) -> np.ndarray:
    out = np.zeros_like(v)
    nz = nrm > 0
    out[nz] = v[nz] / nrm[nz, None]
    return out


class _Acc:
    """Scatter-add gradient accumulator; ``weight`` scales every contribution."""

    def __init__(self, model: GeometricModel, grad: Gradient | None, weight: float):
        self.params = model.params
        self.grad = grad
        self.weight = weight

    def __bool__(self) -> bool:
        return self.grad is not None

    def add(self, name: str, idx: np.ndarray, values: np.ndarray) -> None:
        if self.grad is not None:
            np.add.at(self.grad[name], idx, self.weight * values)


def _reg(acc: _Acc, centers: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """Unit-sphere regularizer | ||c|| - 1 | with its gradient."""
    nrm = _norm(centers)
    if acc:
        g = np.sign(nrm - 1.0)[:, None] * _unit(centers, nrm)
        acc.add("class_center", idx, g)
    return np.abs(nrm - 1.0)


def _hinge_norm_diff(
    acc: _Acc,
    diff: np.ndarray,
    radius_term: np.ndarray,
    diff_sign: float,
    grads: list[tuple[str, np.ndarray, float, str]],
) -> np.ndarray:
    """h = max(0, diff_sign * ||diff|| + radius_term); scatter per-entry grads.

    ``grads`` rows are (param block, index array, coefficient, kind) where
    kind "vec" receives coeff * d||diff|| and kind "scal" receives coeff
    directly (radius-style slots).
    """
    nrm = _norm(diff)
    arg = diff_sign * nrm + radius_term
    act = arg > 0
    if acc and act.any():
        u = _unit(diff, nrm) * diff_sign
        for name, idx, coeff, kind in grads:
            if kind == "vec":
                acc.add(name, idx[act], coeff * u[act])
            else:
                acc.add(name, idx[act], np.full(act.sum(), coeff))
    return np.maximum(0.0, arg)


def _norm_of_relu(
    acc: _Acc,
    t: np.ndarray,
    sign_parts: list[tuple[str, np.ndarray, np.ndarray | float]],
    outer_coeff: np.ndarray | float = 1.0,
) -> np.ndarray:
    """v = ||max(0, t)|| with chain rule into each listed parameter block.

    ``sign_parts`` rows are (param block, index array, per-axis jacobian sign
    array broadcastable to t's shape).  ``outer_coeff`` scales dL/dv (used for
    squared-target losses).
    """
    m = np.maximum(0.0, t)
    val = _norm(m)
    if acc:
        dvdt = _unit(m, val) * (t > 0)
        if np.ndim(outer_coeff):
            dvdt = dvdt * np.asarray(outer_coeff)[:, None]
        else:
            dvdt = dvdt * outer_coeff
        for name, idx, jac in sign_parts:
            acc.add(name, idx, dvdt * jac)
    return val


def _intersection(ca, oa, cb, ob):
    """Signed box intersection with branch masks for the gradient."""
    lower_a, lower_b = ca - oa, cb - ob
    upper_a, upper_b = ca + oa, cb + ob
    a_wins_lower = lower_a >= lower_b  # ties take the first box's branch
    a_wins_upper = upper_a <= upper_b
    lower = np.where(a_wins_lower, lower_a, lower_b)
    upper = np.where(a_wins_upper, upper_a, upper_b)
    center = (lower + upper) / 2.0
    offset = (upper - lower) / 2.0
    return center, offset, a_wins_lower, a_wins_upper


class _InterGrad:
    """Backprop through the signed intersection onto the two parent boxes."""

    def __init__(self, a_wins_lower, a_wins_upper):
        self.al = a_wins_lower.astype(np.float64)
        self.au = a_wins_upper.astype(np.float64)

    def to_parents(self, d_center, d_offset):
        # lower = c - o, upper = c + o per winning parent
        d_lower = d_center / 2.0 - d_offset / 2.0
        d_upper = d_center / 2.0 + d_offset / 2.0
        d_ca = d_lower * self.al + d_upper * self.au
        d_oa = -d_lower * self.al + d_upper * self.au
        d_cb = d_lower * (1 - self.al) + d_upper * (1 - self.au)
        d_ob = -d_lower * (1 - self.al) + d_upper * (1 - self.au)
        return d_ca, d_oa, d_cb, d_ob


# ---------------------------------------------------------------------------
# per-family evaluation
# ---------------------------------------------------------------------------


def _slots(tag: str, axioms: list[NormalizedAxiom]):
    """Slot id arrays per variant: concept arrays first, role array where used."""
    if tag == "GCI0":
        return (
            np.fromiter((a.sub for a in axioms), dtype=np.int64),
            np.fromiter((a.sup for a in axioms), dtype=np.int64),
            None,
        )
    if tag == "GCI1":
        return (
            np.fromiter((a.left for a in axioms), dtype=np.int64),
            np.fromiter((a.right for a in axioms), dtype=np.int64),
            np.fromiter((a.sup for a in axioms), dtype=np.int64),
            None,
        )
    if tag == "GCI2":
        return (
            np.fromiter((a.sub for a in axioms), dtype=np.int64),
            np.fromiter((a.filler for a in axioms), dtype=np.int64),
            np.fromiter((a.role for a in axioms), dtype=np.int64),
        )
    if tag == "GCI3":
        return (
            np.fromiter((a.filler for a in axioms), dtype=np.int64),
            np.fromiter((a.sup for a in axioms), dtype=np.int64),
            np.fromiter((a.role for a in axioms), dtype=np.int64),
        )
    if tag == "GCI0_BOT":
        return (np.fromiter((a.sub for a in axioms), dtype=np.int64), None)
    if tag == "GCI1_BOT":
        return (
            np.fromiter((a.left for a in axioms), dtype=np.int64),
            np.fromiter((a.right for a in axioms), dtype=np.int64),
            None,
        )
    if tag == "GCI3_BOT":
        return (
            np.fromiter((a.filler for a in axioms), dtype=np.int64),
            np.fromiter((a.role for a in axioms), dtype=np.int64),
        )
    raise ValueError(f"no loss for variant {tag}")


def _eval_elem(m, tag, polarity, slots, acc: _Acc) -> np.ndarray:
    P = m.params
    gamma, eps = m.margin, m.epsilon
    c, r, v = P["class_center"], P["class_radius"], P["role_vector"]
    pos = polarity == "positive"

    if tag == "GCI0":
        A, B, _ = slots
        diff = c[A] - c[B]
        if pos:
            # ||cA - cB|| + rA - rB <= gamma
            loss = _hinge_norm_diff(
                acc,
                diff,
                r[A] - r[B] - gamma,
                1.0,
                [
                    ("class_center", A, 1.0, "vec"),
                    ("class_center", B, -1.0, "vec"),
                    ("class_radius", A, 1.0, "scal"),
                    ("class_radius", B, -1.0, "scal"),
                ],
            )
        else:
            # separation: rA + rB - ||cA - cB|| <= -gamma
            loss = _hinge_norm_diff(
                acc,
                diff,
                r[A] + r[B] + gamma,
                -1.0,
                [
                    ("class_center", A, 1.0, "vec"),
                    ("class_center", B, -1.0, "vec"),
                    ("class_radius", A, 1.0, "scal"),
                    ("class_radius", B, 1.0, "scal"),
                ],
            )
        return loss + _reg(acc, c[A], A) + _reg(acc, c[B], B)

    if tag == "GCI1":
        A, B, E, _ = slots
        dab = c[A] - c[B]
        dae = c[A] - c[E]
        dbe = c[B] - c[E]
        if pos:
            loss = _hinge_norm_diff(
                acc, dab, -r[A] - r[B] - gamma, 1.0,
                [("class_center", A, 1.0, "vec"), ("class_center", B, -1.0, "vec"),
                 ("class_radius", A, -1.0, "scal"), ("class_radius", B, -1.0, "scal")],
            )
            loss = loss + _hinge_norm_diff(
                acc, dae, -r[A] - gamma, 1.0,
                [("class_center", A, 1.0, "vec"), ("class_center", E, -1.0, "vec"),
                 ("class_radius", A, -1.0, "scal")],
            )
            loss = loss + _hinge_norm_diff(
                acc, dbe, -r[B] - gamma, 1.0,
                [("class_center", B, 1.0, "vec"), ("class_center", E, -1.0, "vec"),
                 ("class_radius", B, -1.0, "scal")],
            )
        else:
            # overlap demanded between A and B, with E's center pushed out
            loss = _hinge_norm_diff(
                acc, dab, -r[A] - r[B] - gamma, 1.0,
                [("class_center", A, 1.0, "vec"), ("class_center", B, -1.0, "vec"),
                 ("class_radius", A, -1.0, "scal"), ("class_radius", B, -1.0, "scal")],
            )
            loss = loss + _hinge_norm_diff(
                acc, dae, r[A] + gamma, -1.0,
                [("class_center", A, 1.0, "vec"), ("class_center", E, -1.0, "vec"),
                 ("class_radius", A, 1.0, "scal")],
            )
            loss = loss + _hinge_norm_diff(
                acc, dbe, r[B] + gamma, -1.0,
                [("class_center", B, 1.0, "vec"), ("class_center", E, -1.0, "vec"),
                 ("class_radius", B, 1.0, "scal")],
            )
        return loss + _reg(acc, c[A], A) + _reg(acc, c[B], B) + _reg(acc, c[E], E)

    if tag == "GCI2":
        A, B, R = slots
        diff = c[A] + v[R] - c[B]
        if pos:
            loss = _hinge_norm_diff(
                acc, diff, r[A] - r[B] - gamma, 1.0,
                [("class_center", A, 1.0, "vec"), ("class_center", B, -1.0, "vec"),
                 ("role_vector", R, 1.0, "vec"),
                 ("class_radius", A, 1.0, "scal"), ("class_radius", B, -1.0, "scal")],
            )
        else:
            loss = _hinge_norm_diff(
                acc, diff, r[A] + r[B] + gamma, -1.0,
                [("class_center", A, 1.0, "vec"), ("class_center", B, -1.0, "vec"),
                 ("role_vector", R, 1.0, "vec"),
                 ("class_radius", A, 1.0, "scal"), ("class_radius", B, 1.0, "scal")],
            )
        return loss + _reg(acc, c[A], A) + _reg(acc, c[B], B)

    if tag == "GCI3":
        A, B, R = slots  # filler, sup
        diff = c[A] - v[R] - c[B]
        if pos:
            loss = _hinge_norm_diff(
                acc, diff, -r[A] - r[B] - gamma, 1.0,
                [("class_center", A, 1.0, "vec"), ("class_center", B, -1.0, "vec"),
                 ("role_vector", R, -1.0, "vec"),
                 ("class_radius", A, -1.0, "scal"), ("class_radius", B, -1.0, "scal")],
            )
        else:
            loss = _hinge_norm_diff(
                acc, diff, r[A] + r[B] + gamma, -1.0,
                [("class_center", A, 1.0, "vec"), ("class_center", B, -1.0, "vec"),
                 ("role_vector", R, -1.0, "vec"),
                 ("class_radius", A, 1.0, "scal"), ("class_radius", B, 1.0, "scal")],
            )
        return loss + _reg(acc, c[A], A) + _reg(acc, c[B], B)

    if tag in ("GCI0_BOT", "GCI3_BOT"):
        A = slots[0]
        if pos:
            # unsatisfiable: radius to zero
            if acc:
                acc.add("class_radius", A, np.ones(len(A)))
            return r[A] + _reg(acc, c[A], A)
        # satisfiable: radius at least epsilon (no regularizer, as printed)
        arg = eps - r[A]
        act = arg > 0
        if acc and act.any():
            acc.add("class_radius", A[act], np.full(act.sum(), -1.0))
        return np.maximum(0.0, arg)

    if tag == "GCI1_BOT":
        A, B, _ = slots
        diff = c[A] - c[B]
        if pos:
            loss = _hinge_norm_diff(
                acc, diff, r[A] + r[B] + gamma, -1.0,
                [("class_center", A, 1.0, "vec"), ("class_center", B, -1.0, "vec"),
                 ("class_radius", A, 1.0, "scal"), ("class_radius", B, 1.0, "scal")],
            )
        else:
            loss = _hinge_norm_diff(
                acc, diff, -r[A] - r[B] - gamma, 1.0,
                [("class_center", A, 1.0, "vec"), ("class_center", B, -1.0, "vec"),
                 ("class_radius", A, -1.0, "scal"), ("class_radius", B, -1.0, "scal")],
            )
        return loss + _reg(acc, c[A], A) + _reg(acc, c[B], B)

    raise ValueError(f"no loss for variant {tag}")


def _eval_elbe(m, tag, polarity, slots, acc: _Acc) -> np.ndarray:
    P = m.params
    gamma, eps = m.margin, m.epsilon
    c, o, v = P["class_center"], P["class_offset"], P["role_vector"]
    pos = polarity == "positive"

    if tag in ("GCI0", "GCI2", "GCI3"):
        if tag == "GCI0":
            A, B, _ = slots
            dc = c[A] - c[B]
            vec_rows = [("class_center", A, 1.0), ("class_center", B, -1.0)]
        elif tag == "GCI2":
            A, B, R = slots
            dc = c[A] + v[R] - c[B]
            vec_rows = [("class_center", A, 1.0), ("class_center", B, -1.0),
                        ("role_vector", R, 1.0)]
        else:
            A, B, R = slots  # filler, sup
            dc = c[A] - v[R] - c[B]
            vec_rows = [("class_center", A, 1.0), ("class_center", B, -1.0),
                        ("role_vector", R, -1.0)]
        sgn = np.sign(dc)
        if pos:
            t = np.abs(dc) + o[A] - o[B] + gamma
            parts = [(name, idx, coeff * sgn) for name, idx, coeff in vec_rows]
            parts.append(("class_offset", A, np.ones_like(dc)))
            parts.append(("class_offset", B, -np.ones_like(dc)))
        else:
            t = -np.abs(dc) + o[A] + o[B] + gamma
            parts = [(name, idx, -coeff * sgn) for name, idx, coeff in vec_rows]
            parts.append(("class_offset", A, np.ones_like(dc)))
            parts.append(("class_offset", B, np.ones_like(dc)))
        return _norm_of_relu(acc, t, parts)

    if tag == "GCI1":
        A, B, E, _ = slots
        ci, oi, awl, awu = _intersection(c[A], o[A], c[B], o[B])
        ig = _InterGrad(awl, awu)
        dc = ci - c[E]
        sgn = np.sign(dc)
        if pos:
            t = np.abs(dc) + oi - o[E] + gamma
            d_ci, d_oi = sgn, np.ones_like(dc)
            d_ce, d_oe = -sgn, -np.ones_like(dc)
        else:
            t = -np.abs(dc) + oi + o[E] + gamma
            d_ci, d_oi = -sgn, np.ones_like(dc)
            d_ce, d_oe = sgn, np.ones_like(dc)
        m_ = np.maximum(0.0, t)
        val = _norm(m_)
        if acc:
            dvdt = _unit(m_, val) * (t > 0)
            d_ca, d_oa, d_cb, d_ob = ig.to_parents(dvdt * d_ci, dvdt * d_oi)
            acc.add("class_center", A, d_ca)
            acc.add("class_offset", A, d_oa)
            acc.add("class_center", B, d_cb)
            acc.add("class_offset", B, d_ob)
            acc.add("class_center", E, dvdt * d_ce)
            acc.add("class_offset", E, dvdt * d_oe)
        return val

    if tag in ("GCI0_BOT", "GCI3_BOT"):
        A = slots[0]
        nrm = _norm(o[A])
        if pos:
            if acc:
                acc.add("class_offset", A, _unit(o[A], nrm))
            return nrm
        arg = eps - nrm
        act = arg > 0
        if acc and act.any():
            acc.add("class_offset", A[act], -_unit(o[A][act], nrm[act]))
        return np.maximum(0.0, arg)

    if tag == "GCI1_BOT":
        A, B, _ = slots
        if pos:
            dc = c[A] - c[B]
            sgn = np.sign(dc)
            t = -np.abs(dc) + o[A] + o[B] + gamma
            parts = [
                ("class_center", A, -sgn),
                ("class_center", B, sgn),
                ("class_offset", A, np.ones_like(dc)),
                ("class_offset", B, np.ones_like(dc)),
            ]
            return _norm_of_relu(acc, t, parts)
        # negative: demand a genuinely non-empty intersection box
        ci, oi, awl, awu = _intersection(c[A], o[A], c[B], o[B])
        ig = _InterGrad(awl, awu)
        clamped = np.maximum(0.0, oi)
        nrm = _norm(clamped)
        arg = eps - nrm
        act = arg > 0
        if acc and act.any():
            d_oi = -(_unit(clamped, nrm) * (oi > 0)) * act[:, None]
            d_ca, d_oa, d_cb, d_ob = ig.to_parents(np.zeros_like(d_oi), d_oi)
            acc.add("class_center", A, d_ca)
            acc.add("class_offset", A, d_oa)
            acc.add("class_center", B, d_cb)
            acc.add("class_offset", B, d_ob)
        return np.maximum(0.0, arg)

    raise ValueError(f"no loss for variant {tag}")


def _eval_box2el(m, tag, polarity, slots, acc: _Acc) -> np.ndarray:
    P = m.params
    gamma, eps, delta = m.margin, m.epsilon, m.delta
    c, o, bump = P["class_center"], P["class_offset"], P["class_bump"]
    hc, ho = P["role_head_center"], P["role_head_offset"]
    tc, to = P["role_tail_center"], P["role_tail_offset"]
    pos = polarity == "positive"

    def mu_term(dc, oin, oout, rows, margin, outer=1.0):
        """||max(0, |dc| + oin - oout + margin)|| with grads; a row's kind is
        "dc" (flows through |dc| with the given sign) or "const" (offset)."""
        t = np.abs(dc) + oin - oout + margin
        sgn = np.sign(dc)
        parts = []
        for name, idx, coeff, kind in rows:
            if kind == "dc":
                parts.append((name, idx, coeff * sgn))
            else:
                parts.append((name, idx, np.broadcast_to(float(coeff), dc.shape)))
        return _norm_of_relu(acc, t, parts, outer_coeff=outer)

    if tag == "GCI0":
        A, B, _ = slots
        if pos:
            return mu_term(
                c[A] - c[B], o[A], o[B],
                [("class_center", A, 1.0, "dc"), ("class_center", B, -1.0, "dc"),
                 ("class_offset", A, 1.0, "oin"), ("class_offset", B, -1.0, "oout")],
                gamma,
            )
        # -(d + gamma) elementwise, d the signed box gap
        dc = c[A] - c[B]
        t = -(np.abs(dc) - (o[A] + o[B]) + gamma)
        sgn = np.sign(dc)
        parts = [
            ("class_center", A, -sgn),
            ("class_center", B, sgn),
            ("class_offset", A, np.ones_like(dc)),
            ("class_offset", B, np.ones_like(dc)),
        ]
        return _norm_of_relu(acc, t, parts)

    if tag == "GCI1":
        A, B, E, _ = slots
        ci, oi, awl, awu = _intersection(c[A], o[A], c[B], o[B])
        ig = _InterGrad(awl, awu)
        dc = ci - c[E]
        sgn = np.sign(dc)
        if pos:
            t = np.abs(dc) + oi - o[E] + gamma
            d_ci, d_oi, d_ce, d_oe = sgn, 1.0, -sgn, -1.0
        else:
            t = -(np.abs(dc) - (oi + o[E]) + gamma)
            d_ci, d_oi, d_ce, d_oe = -sgn, 1.0, sgn, 1.0
        m_ = np.maximum(0.0, t)
        val = _norm(m_)
        if acc:
            dvdt = _unit(m_, val) * (t > 0)
            d_ca, d_oa, d_cb, d_ob = ig.to_parents(dvdt * d_ci, dvdt * d_oi)
            acc.add("class_center", A, d_ca)
            acc.add("class_offset", A, d_oa)
            acc.add("class_center", B, d_cb)
            acc.add("class_offset", B, d_ob)
            acc.add("class_center", E, dvdt * d_ce)
            acc.add("class_offset", E, dvdt * d_oe)
        return val

    if tag == "GCI2":
        A, B, R = slots
        if pos:
            head = mu_term(
                c[A] + bump[B] - hc[R], o[A], ho[R],
                [("class_center", A, 1.0, "dc"), ("class_bump", B, 1.0, "dc"),
                 ("role_head_center", R, -1.0, "dc"),
                 ("class_offset", A, 1.0, "oin"), ("role_head_offset", R, -1.0, "oout")],
                gamma,
            )
            tail = mu_term(
                c[B] + bump[A] - tc[R], o[B], to[R],
                [("class_center", B, 1.0, "dc"), ("class_bump", A, 1.0, "dc"),
                 ("role_tail_center", R, -1.0, "dc"),
                 ("class_offset", B, 1.0, "oin"), ("role_tail_offset", R, -1.0, "oout")],
                gamma,
            )
            return head + tail
        # squared target on the containment violation of each role box
        t_h = np.abs(c[A] + bump[B] - hc[R]) + o[A] - ho[R]
        t_t = np.abs(c[B] + bump[A] - tc[R]) + o[B] - to[R]
        mu_h = _norm(np.maximum(0.0, t_h))
        mu_t = _norm(np.maximum(0.0, t_t))
        loss = (delta - mu_h) ** 2 + (delta - mu_t) ** 2
        if acc:
            outer_h = -2.0 * (delta - mu_h)
            outer_t = -2.0 * (delta - mu_t)
            sgn_h = np.sign(c[A] + bump[B] - hc[R])
            sgn_t = np.sign(c[B] + bump[A] - tc[R])
            _norm_of_relu(
                acc, t_h,
                [("class_center", A, sgn_h), ("class_bump", B, sgn_h),
                 ("role_head_center", R, -sgn_h),
                 ("class_offset", A, np.ones_like(sgn_h)),
                 ("role_head_offset", R, -np.ones_like(sgn_h))],
                outer_coeff=outer_h,
            )
            _norm_of_relu(
                acc, t_t,
                [("class_center", B, sgn_t), ("class_bump", A, sgn_t),
                 ("role_tail_center", R, -sgn_t),
                 ("class_offset", B, np.ones_like(sgn_t)),
                 ("role_tail_offset", R, -np.ones_like(sgn_t))],
                outer_coeff=outer_t,
            )
        return loss

    if tag == "GCI3":
        A, B, R = slots  # filler, sup
        dc = hc[R] - bump[A] - c[B]
        if pos:
            return mu_term(
                dc, ho[R], o[B],
                [("role_head_center", R, 1.0, "dc"), ("class_bump", A, -1.0, "dc"),
                 ("class_center", B, -1.0, "dc"),
                 ("role_head_offset", R, 1.0, "oin"), ("class_offset", B, -1.0, "oout")],
                gamma,
            )
        t = np.abs(dc) + ho[R] - o[B]
        mu = _norm(np.maximum(0.0, t))
        loss = (delta - mu) ** 2
        if acc:
            outer = -2.0 * (delta - mu)
            sgn = np.sign(dc)
            _norm_of_relu(
                acc, t,
                [("role_head_center", R, sgn), ("class_bump", A, -sgn),
                 ("class_center", B, -sgn),
                 ("role_head_offset", R, np.ones_like(sgn)),
                 ("class_offset", B, -np.ones_like(sgn))],
                outer_coeff=outer,
            )
        return loss

    if tag in ("GCI0_BOT", "GCI3_BOT"):
        A = slots[0]
        nrm = _norm(o[A])
        if pos:
            if acc:
                acc.add("class_offset", A, _unit(o[A], nrm))
            return nrm
        arg = eps - nrm
        act = arg > 0
        if acc and act.any():
            acc.add("class_offset", A[act], -_unit(o[A][act], nrm[act]))
        return np.maximum(0.0, arg)

    if tag == "GCI1_BOT":
        A, B, _ = slots
        ci, oi, awl, awu = _intersection(c[A], o[A], c[B], o[B])
        ig = _InterGrad(awl, awu)
        if pos:
            # drive the intersection's extent to zero
            t = oi + gamma
            m_ = np.maximum(0.0, t)
            val = _norm(m_)
            if acc:
                dvdt = _unit(m_, val) * (t > 0)
                d_ca, d_oa, d_cb, d_ob = ig.to_parents(np.zeros_like(dvdt), dvdt)
                acc.add("class_center", A, d_ca)
                acc.add("class_offset", A, d_oa)
                acc.add("class_center", B, d_cb)
                acc.add("class_offset", B, d_ob)
            return val
        clamped = np.maximum(0.0, oi)
        nrm = _norm(clamped)
        arg = eps - nrm
        act = arg > 0
        if acc and act.any():
            d_oi = -(_unit(clamped, nrm) * (oi > 0)) * act[:, None]
            d_ca, d_oa, d_cb, d_ob = ig.to_parents(np.zeros_like(d_oi), d_oi)
            acc.add("class_center", A, d_ca)
            acc.add("class_offset", A, d_oa)
            acc.add("class_center", B, d_cb)
            acc.add("class_offset", B, d_ob)
        return np.maximum(0.0, arg)

    raise ValueError(f"no loss for variant {tag}")


_FAMILY = {"elem": _eval_elem, "elbe": _eval_elbe, "box2el": _eval_box2el}


def batch_losses(
    model: GeometricModel,
    tag: str,
    polarity: str,
    axioms: list[NormalizedAxiom],
    grad: Gradient | None = None,
    weight: float = 1.0,
) -> np.ndarray:
    """Per-axiom losses for one (variant, polarity) group; optionally
    accumulates ``weight`` times the gradient of their sum into ``grad``."""
    if not axioms:
        return np.zeros(0)
    for ax in axioms:
        if axiom_tag(ax) != tag:
            raise ValueError(f"expected {tag} axioms, got {axiom_tag(ax)}")
    arrays = _slots(tag, axioms)
    _check_ids(model, arrays)
    acc = _Acc(model, grad, weight)
    return _FAMILY[model.tag](model, tag, polarity, arrays, acc)


def _check_ids(model: GeometricModel, arrays) -> None:
    concept_arrays = arrays[:-1]
    role_array = arrays[-1]
    for arr in concept_arrays:
        if arr is not None and len(arr) and (arr.min() < 0 or arr.max() >= model.n_concepts):
            raise KeyError("axiom references a concept id outside the model")
    if role_array is not None and len(role_array) and (
        role_array.min() < 0 or role_array.max() >= model.n_roles
    ):
        raise KeyError("axiom references a role id outside the model")


def axiom_loss(model: GeometricModel, request: LossRequest) -> float:
    """Scalar loss of one request."""
    tag = axiom_tag(request.axiom)
    return float(batch_losses(model, tag, request.polarity, [request.axiom])[0])


def elem_loss(model: GeometricModel, request: LossRequest) -> float:
    if model.tag != "elem":
        raise ValueError(f"model tag is {model.tag!r}, expected 'elem'")
    return axiom_loss(model, request)


def elbe_loss(model: GeometricModel, request: LossRequest) -> float:
    if model.tag != "elbe":
        raise ValueError(f"model tag is {model.tag!r}, expected 'elbe'")
    return axiom_loss(model, request)


def box2el_loss(model: GeometricModel, request: LossRequest) -> float:
    if model.tag != "box2el":
        raise ValueError(f"model tag is {model.tag!r}, expected 'box2el'")
    return axiom_loss(model, request)


def bump_regularizer(model: GeometricModel, grad: Gradient | None = None) -> float:
    """reg_lambda times the mean bump norm (box2el only, else 0)."""
    if model.tag != "box2el" or model.reg_lambda == 0.0:
        return 0.0
    bumps = model.params["class_bump"]
    nrm = _norm(bumps)
    if grad is not None:
        grad["class_bump"] += (model.reg_lambda / len(bumps)) * _unit(bumps, nrm)
    return float(model.reg_lambda * nrm.mean())


def total_loss(
    model: GeometricModel,
    requests: Iterable[LossRequest],
    grad: Gradient | None = None,
) -> float:
    """Sum over (variant, polarity) groups of the within-group mean loss, plus
    the bump regularizer for box2el."""
    groups: dict[tuple[str, str], list[NormalizedAxiom]] = {}
    for req in requests:
        groups.setdefault((axiom_tag(req.axiom), req.polarity), []).append(req.axiom)
    total = 0.0
    for (tag, polarity), axioms in groups.items():
        losses = batch_losses(
            model, tag, polarity, axioms, grad=grad, weight=1.0 / len(axioms)
        )
        total += float(losses.mean())
    total += bump_regularizer(model, grad)
    return total
