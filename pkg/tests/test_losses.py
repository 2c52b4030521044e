"""Loss evaluators: pinned numeric values for every formula, zero-loss
faithfulness, positive/negative antagonism, non-negativity, aggregation."""

import math

import numpy as np
import pytest

from elkbc.core import GCI0, GCI0Bot, GCI1, GCI1Bot, GCI2, GCI3, GCI3Bot, RI0
from elkbc.losses import (
    GeometricModel,
    LossRequest,
    axiom_loss,
    box2el_loss,
    elbe_loss,
    elem_loss,
    param_shapes,
    total_loss,
)

SQ2 = math.sqrt(2.0)


def make_model(tag, n_concepts=6, n_roles=2, dim=2, **hyper):
    params = {
        name: np.zeros(shape) for name, shape in param_shapes(tag, n_concepts, n_roles, dim).items()
    }
    return GeometricModel(
        tag=tag, dim=dim, n_concepts=n_concepts, n_roles=n_roles, params=params, **hyper
    )


def elem(centers, radii, roles=None, **hyper):
    m = make_model("elem", n_concepts=len(centers), n_roles=max(1, len(roles or [])), **hyper)
    m.params["class_center"] = np.asarray(centers, float)
    m.params["class_radius"] = np.asarray(radii, float)
    if roles:
        m.params["role_vector"] = np.asarray(roles, float)
    return m


def elbe(centers, offsets, roles=None, **hyper):
    m = make_model("elbe", n_concepts=len(centers), n_roles=max(1, len(roles or [])), **hyper)
    m.params["class_center"] = np.asarray(centers, float)
    m.params["class_offset"] = np.asarray(offsets, float)
    if roles:
        m.params["role_vector"] = np.asarray(roles, float)
    return m


def box2el(centers, offsets, bumps, heads, tails, **hyper):
    m = make_model("box2el", n_concepts=len(centers), n_roles=len(heads[0]), **hyper)
    m.params["class_center"] = np.asarray(centers, float)
    m.params["class_offset"] = np.asarray(offsets, float)
    m.params["class_bump"] = np.asarray(bumps, float)
    m.params["role_head_center"] = np.asarray(heads[0], float)
    m.params["role_head_offset"] = np.asarray(heads[1], float)
    m.params["role_tail_center"] = np.asarray(tails[0], float)
    m.params["role_tail_offset"] = np.asarray(tails[1], float)
    return m


def pos(ax):
    return LossRequest(ax, "positive")


def neg(ax):
    return LossRequest(ax, "negative")


# ---------------------------------------------------------------------------
# ball model, pinned values
# ---------------------------------------------------------------------------


class TestBallModel:
    def test_gci0_negative_overlapping(self):
        m = elem([[1, 0], [1, 0], [1, 0]], [0.1, 0.1, 0.1])
        assert elem_loss(m, neg(GCI0(0, 1))) == pytest.approx(0.2)

    def test_gci0_negative_separated(self):
        m = elem([[1, 0], [-1, 0], [1, 0]], [0.1, 0.1, 0.1])
        assert elem_loss(m, neg(GCI0(0, 1))) == pytest.approx(0.0)

    def test_gci0_positive(self):
        m = elem([[1, 0], [0, 1], [1, 0]], [0.2, 0.3, 0.1])
        assert elem_loss(m, pos(GCI0(0, 1))) == pytest.approx(SQ2 - 0.1)

    def test_gci1_negative(self):
        # coincident A, B overlapping; E center 0.2 away: two hinge terms fire
        m = elem([[1, 0], [1, 0], [1, 0.2]], [0.3, 0.3, 0.1])
        expected = 0.1 + 0.1 + (math.sqrt(1.04) - 1.0)
        assert elem_loss(m, neg(GCI1(0, 1, 2))) == pytest.approx(expected)

    def test_gci1_positive(self):
        m = elem([[1, 0], [0, 1], [0, -1]], [0.2, 0.3, 0.1])
        expected = (SQ2 - 0.5) + (SQ2 - 0.2) + (2.0 - 0.3)
        assert elem_loss(m, pos(GCI1(0, 1, 2))) == pytest.approx(expected)

    def test_gci2_positive(self):
        m = elem([[1, 0], [0, 1], [1, 0]], [0.2, 0.3, 0.1], roles=[[-0.5, 0.5]])
        assert elem_loss(m, pos(GCI2(0, 0, 1))) == pytest.approx(math.sqrt(0.5) - 0.1)

    def test_gci2_negative(self):
        m = elem([[1, 0], [0, 1], [1, 0]], [0.2, 0.3, 0.1], roles=[[-1.0, 1.0]])
        assert elem_loss(m, neg(GCI2(0, 0, 1))) == pytest.approx(0.5)

    def test_gci3_positive(self):
        # filler ball translated back must meet the superclass ball
        m = elem([[1, 0], [0, 1], [1, 0]], [0.2, 0.1, 0.1], roles=[[0.5, 0.0]])
        assert elem_loss(m, pos(GCI3(0, 0, 1))) == pytest.approx(math.sqrt(1.25) - 0.3)

    def test_gci3_negative(self):
        m = elem([[0, 1], [1, 0], [1, 0]], [0.6, 0.6, 0.1], roles=[[0.0, 1.0]])
        assert elem_loss(m, neg(GCI3(0, 0, 1))) == pytest.approx(0.2)

    def test_gci0_bot_positive_is_radius(self):
        m = elem([[0.6, 0.8], [1, 0], [1, 0]], [0.25, 0.1, 0.1])
        assert elem_loss(m, pos(GCI0Bot(0))) == pytest.approx(0.25)

    def test_gci0_bot_negative_radius_floor(self):
        m = elem([[1, 0], [1, 0], [1, 0]], [0.0, 0.1, 0.1], epsilon=0.01)
        assert elem_loss(m, neg(GCI0Bot(0))) == pytest.approx(0.01)

    def test_gci1_bot_positive(self):
        m = elem([[1, 0], [1, 0.1], [1, 0]], [0.2, 0.3, 0.1])
        expected = 0.4 + (math.sqrt(1.01) - 1.0)
        assert elem_loss(m, pos(GCI1Bot(0, 1))) == pytest.approx(expected)

    def test_gci1_bot_negative(self):
        m = elem([[1, 0], [-1, 0], [1, 0]], [0.2, 0.3, 0.1])
        assert elem_loss(m, neg(GCI1Bot(0, 1))) == pytest.approx(1.5)

    def test_gci3_bot_pair(self):
        m = elem([[1, 0], [1, 0], [1, 0]], [0.25, 0.005, 0.1], epsilon=0.01)
        assert elem_loss(m, pos(GCI3Bot(0, 0))) == pytest.approx(0.25)
        assert elem_loss(m, neg(GCI3Bot(0, 1))) == pytest.approx(0.005)

    def test_margin_shifts_hinge(self):
        m = elem([[1, 0], [1, 0], [1, 0]], [0.1, 0.1, 0.1], margin=-0.1)
        assert elem_loss(m, neg(GCI0(0, 1))) == pytest.approx(0.1)


# ---------------------------------------------------------------------------
# plain box model, pinned values
# ---------------------------------------------------------------------------


class TestPlainBoxModel:
    def test_gci0_negative_coincident(self):
        m = elbe([[0, 0], [0, 0], [0, 0]], [[0.1, 0.1]] * 3)
        assert elbe_loss(m, neg(GCI0(0, 1))) == pytest.approx(0.2 * SQ2)

    def test_gci0_negative_separated(self):
        m = elbe([[0, 0], [5, 5], [0, 0]], [[0.1, 0.1]] * 3)
        assert elbe_loss(m, neg(GCI0(0, 1))) == pytest.approx(0.0)

    def test_gci0_positive(self):
        m = elbe([[0, 0], [0.1, 0], [0, 0]], [[0.2, 0.2], [0.25, 0.35], [0.1, 0.1]])
        assert elbe_loss(m, pos(GCI0(0, 1))) == pytest.approx(0.05)

    def test_gci1_positive_uses_intersection(self):
        m = elbe(
            [[0, 0], [1, 0], [0.5, 0]],
            [[1, 1], [1, 1], [0.4, 0.9]],
        )
        assert elbe_loss(m, pos(GCI1(0, 1, 2))) == pytest.approx(0.1 * SQ2)

    def test_gci1_negative(self):
        m = elbe(
            [[0, 0], [1, 0], [0.5, 0]],
            [[1, 1], [1, 1], [0.1, 0.1]],
        )
        assert elbe_loss(m, neg(GCI1(0, 1, 2))) == pytest.approx(math.sqrt(0.36 + 1.21))

    def test_gci2_pair(self):
        m = elbe(
            [[0, 0], [1, 0], [0, 0]],
            [[0.1, 0.1], [0.05, 0.2], [0.1, 0.1]],
            roles=[[1.0, 0.0]],
        )
        assert elbe_loss(m, pos(GCI2(0, 0, 1))) == pytest.approx(0.05)
        assert elbe_loss(m, neg(GCI2(0, 0, 1))) == pytest.approx(math.sqrt(0.1125))

    def test_gci3_pair(self):
        m = elbe(
            [[1, 1], [0, 1], [0, 0]],
            [[0.1, 0.1], [0.05, 0.1], [0.1, 0.1]],
            roles=[[1.0, 0.0]],
        )
        assert elbe_loss(m, pos(GCI3(0, 0, 1))) == pytest.approx(0.05)
        assert elbe_loss(m, neg(GCI3(0, 0, 1))) == pytest.approx(0.25)

    def test_bot_forms(self):
        m = elbe([[0, 0], [0, 0], [0, 0]], [[0.3, 0.4], [0.06, 0.08], [0.1, 0.1]], epsilon=0.15)
        assert elbe_loss(m, pos(GCI0Bot(0))) == pytest.approx(0.5)
        assert elbe_loss(m, neg(GCI0Bot(1))) == pytest.approx(0.05)
        assert elbe_loss(m, pos(GCI3Bot(0, 0))) == pytest.approx(0.5)
        assert elbe_loss(m, neg(GCI3Bot(0, 1))) == pytest.approx(0.05)

    def test_gci1_bot_positive(self):
        m = elbe([[0, 0], [0.1, 0], [0, 0]], [[0.2, 0.2]] * 3)
        assert elbe_loss(m, pos(GCI1Bot(0, 1))) == pytest.approx(0.5)

    def test_gci1_bot_negative_overlapping(self):
        # intersection offsets (0.5, 0.5): well above the floor
        m = elbe([[0, 0], [1, 0], [0, 0]], [[1, 0.5], [1, 0.5], [1, 1]], epsilon=0.1)
        assert elbe_loss(m, neg(GCI1Bot(0, 1))) == pytest.approx(0.0)

    def test_gci1_bot_negative_empty_intersection_pays_full_floor(self):
        # far-apart boxes: the intersection box has no positive extent, so
        # the non-emptiness demand is maximally violated
        m = elbe([[0, 0], [5, 5], [0, 0]], [[0.1, 0.1]] * 3, epsilon=0.15)
        assert elbe_loss(m, neg(GCI1Bot(0, 1))) == pytest.approx(0.15)


# ---------------------------------------------------------------------------
# bumped box model, pinned values
# ---------------------------------------------------------------------------


def _toy_box2el(delta=1.0, epsilon=0.1):
    centers = [[0, 0], [1, 0], [0.5, 0], [0, 0]]
    offsets = [[0.1, 0.1], [0.1, 0.1], [0.2, 0.2], [0.1, 0.1]]
    bumps = [[-1, 0], [0.2, 0], [0, 0], [0, 0]]
    heads = ([[0.2, 0]], [[0.15, 0.15]])
    tails = ([[0, 0]], [[0.05, 0.2]])
    return box2el(centers, offsets, bumps, heads, tails, delta=delta, epsilon=epsilon)


class TestBumpedBoxModel:
    def test_gci0_negative_coincident(self):
        m = box2el(
            [[0, 0], [0, 0]], [[0.1, 0.1]] * 2, [[0, 0]] * 2,
            ([[0, 0]], [[0.1, 0.1]]), ([[0, 0]], [[0.1, 0.1]]),
        )
        assert box2el_loss(m, neg(GCI0(0, 1))) == pytest.approx(0.2 * SQ2)

    def test_gci2_positive_head_and_tail(self):
        # head side satisfied exactly; tail side violates by 0.05 on one axis
        m = _toy_box2el()
        assert box2el_loss(m, pos(GCI2(0, 0, 1))) == pytest.approx(0.05)

    def test_gci2_negative_squared_targets(self):
        m = _toy_box2el(delta=1.0)
        assert box2el_loss(m, neg(GCI2(0, 0, 1))) == pytest.approx(1.0 + 0.95**2)

    def test_gci3_negative_contained_head(self):
        # translated head box inside the filler's box: mu = 0, loss = delta^2
        centers = [[0, 0], [0, 0]]
        offsets = [[0.2, 0.2], [0.2, 0.2]]
        bumps = [[0.5, 0.5], [0, 0]]
        m = box2el(centers, offsets, bumps, ([[0.5, 0.5]], [[0.1, 0.1]]),
                   ([[0, 0]], [[0.1, 0.1]]), delta=1.0)
        assert box2el_loss(m, neg(GCI3(0, 0, 1))) == pytest.approx(1.0)

    def test_gci3_negative_at_target_distance(self):
        centers = [[0, 0], [0, 0]]
        offsets = [[0.1, 0.1], [0.1, 0.1]]
        bumps = [[-0.3, 0], [0, 0]]
        m = box2el(centers, offsets, bumps, ([[0, 0]], [[0.1, 0.1]]),
                   ([[0, 0]], [[0.1, 0.1]]), delta=0.3)
        assert box2el_loss(m, neg(GCI3(0, 0, 1))) == pytest.approx(0.0)
        assert box2el_loss(m, pos(GCI3(0, 0, 1))) == pytest.approx(0.3)

    def test_gci1_pair(self):
        m = box2el(
            [[0, 0], [1, 0], [0.5, 0]],
            [[1, 1], [1, 1], [0.4, 0.9]],
            [[0, 0]] * 3,
            ([[0, 0]], [[0.1, 0.1]]), ([[0, 0]], [[0.1, 0.1]]),
        )
        assert box2el_loss(m, pos(GCI1(0, 1, 2))) == pytest.approx(0.1 * SQ2)
        m.params["class_offset"][2] = [0.1, 0.1]
        assert box2el_loss(m, neg(GCI1(0, 1, 2))) == pytest.approx(math.sqrt(0.36 + 1.21))

    def test_bot_forms(self):
        m = box2el(
            [[0, 0], [0, 0]], [[0.06, 0.08], [0.3, 0.4]], [[0, 0]] * 2,
            ([[0, 0]], [[0.1, 0.1]]), ([[0, 0]], [[0.1, 0.1]]), epsilon=0.15,
        )
        assert box2el_loss(m, pos(GCI0Bot(0))) == pytest.approx(0.1)
        assert box2el_loss(m, neg(GCI0Bot(0))) == pytest.approx(0.05)
        assert box2el_loss(m, neg(GCI3Bot(0, 1))) == pytest.approx(0.0)

    def test_gci1_bot_pair(self):
        m = box2el(
            [[0, 0], [0.1, 0], [0, 0]],
            [[0.2, 0.2]] * 3, [[0, 0]] * 3,
            ([[0, 0]], [[0.1, 0.1]]), ([[0, 0]], [[0.1, 0.1]]), epsilon=0.1,
        )
        # intersection offsets (0.15, 0.2): positive extent both axes
        assert box2el_loss(m, pos(GCI1Bot(0, 1))) == pytest.approx(math.hypot(0.15, 0.2))
        assert box2el_loss(m, neg(GCI1Bot(0, 1))) == pytest.approx(0.0)
        m.params["class_center"][1] = [5, 5]
        assert box2el_loss(m, neg(GCI1Bot(0, 1))) == pytest.approx(0.1)


# ---------------------------------------------------------------------------
# shared contracts
# ---------------------------------------------------------------------------


def _random_model(tag, rng, n_concepts=5, n_roles=2, dim=3, unit_centers=False, **hyper):
    m = make_model(tag, n_concepts=n_concepts, n_roles=n_roles, dim=dim, **hyper)
    for name, arr in m.params.items():
        if name.endswith("_radius") or name.endswith("_offset"):
            m.params[name] = rng.uniform(hyper.get("epsilon", 0.01), 0.5, arr.shape)
        else:
            m.params[name] = rng.uniform(-1, 1, arr.shape)
    if unit_centers and tag == "elem":
        c = m.params["class_center"]
        m.params["class_center"] = c / np.linalg.norm(c, axis=1, keepdims=True)
    return m


ALL_REQUESTS = [
    GCI0(0, 1),
    GCI1(0, 1, 2),
    GCI2(0, 0, 1),
    GCI3(0, 0, 1),
    GCI0Bot(0),
    GCI1Bot(0, 1),
    GCI3Bot(0, 0),
]


def test_every_loss_is_non_negative():
    rng = np.random.default_rng(9)
    for tag in ("elem", "elbe", "box2el"):
        for _ in range(200):
            m = _random_model(tag, rng, epsilon=0.05, delta=float(rng.uniform(0.2, 2.0)))
            m.margin = float(rng.uniform(-0.1, 0.1))
            for ax in ALL_REQUESTS:
                for polarity in ("positive", "negative"):
                    assert axiom_loss(m, LossRequest(ax, polarity)) >= 0.0


def test_ri_axioms_carry_no_loss():
    m = _random_model("elem", np.random.default_rng(0))
    with pytest.raises(ValueError):
        LossRequest(RI0(0, 0), "positive")


def test_unknown_ids_rejected():
    m = _random_model("elem", np.random.default_rng(0))
    with pytest.raises(KeyError):
        axiom_loss(m, pos(GCI0(0, 77)))


def _check_faithful(loss: float, violation: float) -> None:
    """violation = condition left side minus right side (positive: violated).
    Unit-normalized centers still leave ~1e-16 regularizer residue, hence the
    guard bands."""
    if violation > 1e-9:
        assert loss > 1e-12
    if loss <= 1e-12:
        assert violation <= 1e-9


class TestZeroLossFaithfulness:
    """With margin 0 a vanished positive loss certifies the truth condition.
    Checked through the contrapositive on random configurations: a violated
    condition forces a strictly positive loss (and constructed satisfying
    configurations reach exactly zero, regularizers aside)."""

    def test_ball_gci0(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            m = _random_model("elem", rng, unit_centers=True)
            c, r = m.params["class_center"], m.params["class_radius"]
            violation = np.linalg.norm(c[0] - c[1]) + r[0] - r[1]
            _check_faithful(axiom_loss(m, pos(GCI0(0, 1))), violation)

    def test_ball_gci2(self):
        rng = np.random.default_rng(2)
        for _ in range(300):
            m = _random_model("elem", rng, unit_centers=True)
            c, r = m.params["class_center"], m.params["class_radius"]
            v = m.params["role_vector"][0]
            violation = np.linalg.norm(c[0] + v - c[1]) + r[0] - r[1]
            _check_faithful(axiom_loss(m, pos(GCI2(0, 0, 1))), violation)

    def test_ball_gci3(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            m = _random_model("elem", rng, unit_centers=True)
            c, r = m.params["class_center"], m.params["class_radius"]
            v = m.params["role_vector"][0]
            violation = np.linalg.norm(c[0] - v - c[1]) - (r[0] + r[1])
            _check_faithful(axiom_loss(m, pos(GCI3(0, 0, 1))), violation)

    @pytest.mark.parametrize("tag", ["elbe", "box2el"])
    def test_box_gci0(self, tag):
        rng = np.random.default_rng(4)
        for _ in range(300):
            m = _random_model(tag, rng)
            c, o = m.params["class_center"], m.params["class_offset"]
            violation = float(np.max(np.abs(c[0] - c[1]) + o[0] - o[1]))
            _check_faithful(axiom_loss(m, pos(GCI0(0, 1))), violation)


class TestAntagonism:
    """No configuration with margin 0 and radii/offsets at least epsilon has
    both polarities of one axiom at zero: random search plus analytic cases."""

    def test_random_search_finds_no_double_zero(self):
        # Conjunction negatives only ever vary the superclass of an asserted
        # axiom, so their loss presumes a non-empty A n B; the search honors
        # that by skipping empty-intersection configurations for GCI1.
        rng = np.random.default_rng(5)
        for tag in ("elem", "elbe", "box2el"):
            for _ in range(400):
                m = _random_model(tag, rng, unit_centers=True, epsilon=0.05)
                m.epsilon = 0.05
                m.delta = 1.0
                for ax in ALL_REQUESTS:
                    if isinstance(ax, GCI1) and tag in ("elbe", "box2el"):
                        c, o = m.params["class_center"], m.params["class_offset"]
                        if np.any(np.abs(c[0] - c[1]) >= o[0] + o[1]):
                            continue
                    p = axiom_loss(m, pos(ax))
                    n = axiom_loss(m, neg(ax))
                    assert not (p <= 1e-12 and n <= 1e-12), (tag, ax)

    def test_ball_containment_forces_negative_loss(self):
        m = elem([[1, 0], [1, 0], [1, 0]], [0.1, 0.5, 0.1], epsilon=0.05)
        assert elem_loss(m, pos(GCI0(0, 1))) == 0.0
        assert elem_loss(m, neg(GCI0(0, 1))) > 0.0

    def test_ball_separation_forces_positive_loss(self):
        m = elem([[1, 0], [-1, 0], [1, 0]], [0.1, 0.5, 0.1], epsilon=0.05)
        assert elem_loss(m, neg(GCI0(0, 1))) == 0.0
        assert elem_loss(m, pos(GCI0(0, 1))) > 0.0

    def test_bot_floor_vs_collapse(self):
        m = elem([[1, 0], [1, 0], [1, 0]], [0.0, 0.1, 0.1], epsilon=0.05)
        assert elem_loss(m, pos(GCI0Bot(0))) == 0.0
        assert elem_loss(m, neg(GCI0Bot(0))) == pytest.approx(0.05)
        m2 = elem([[1, 0], [1, 0], [1, 0]], [0.2, 0.1, 0.1], epsilon=0.05)
        assert elem_loss(m2, neg(GCI0Bot(0))) == 0.0
        assert elem_loss(m2, pos(GCI0Bot(0))) > 0.0

    def test_box_disjointness_two_sided(self):
        apart = elbe([[0, 0], [9, 9], [0, 0]], [[0.2, 0.2]] * 3, epsilon=0.05)
        assert elbe_loss(apart, pos(GCI1Bot(0, 1))) == 0.0
        assert elbe_loss(apart, neg(GCI1Bot(0, 1))) == pytest.approx(0.05)
        together = elbe([[0, 0], [0, 0], [0, 0]], [[0.2, 0.2]] * 3, epsilon=0.05)
        assert elbe_loss(together, neg(GCI1Bot(0, 1))) == 0.0
        assert elbe_loss(together, pos(GCI1Bot(0, 1))) > 0.0

    def test_bumped_existential_two_sided(self):
        centers = [[0, 0], [0, 0]]
        offsets = [[0.1, 0.1], [0.2, 0.2]]
        bumps = [[0.5, 0.5], [0, 0]]
        m = box2el(centers, offsets, bumps, ([[0.5, 0.5]], [[0.1, 0.1]]),
                   ([[0, 0]], [[0.1, 0.1]]), delta=1.0, epsilon=0.05)
        assert box2el_loss(m, pos(GCI3(0, 0, 1))) == 0.0
        assert box2el_loss(m, neg(GCI3(0, 0, 1))) == pytest.approx(1.0)


class TestTotalLoss:
    def test_single_request_equals_axiom_loss(self):
        m = _random_model("elem", np.random.default_rng(6), unit_centers=True)
        req = pos(GCI0(0, 1))
        assert total_loss(m, [req]) == pytest.approx(axiom_loss(m, req))

    def test_group_means_then_sum(self):
        m = _random_model("elem", np.random.default_rng(7), unit_centers=True)
        reqs = [pos(GCI0(0, 1)), pos(GCI0(1, 2)), neg(GCI2(0, 0, 1))]
        expected = (
            (axiom_loss(m, reqs[0]) + axiom_loss(m, reqs[1])) / 2.0
            + axiom_loss(m, reqs[2])
        )
        assert total_loss(m, reqs) == pytest.approx(expected)

    def test_zero_loss_model_scores_zero(self):
        # nested balls on the unit sphere: containment holds, regs vanish
        m = elem([[1, 0], [1, 0], [1, 0]], [0.1, 0.2, 0.3])
        reqs = [pos(GCI0(0, 1)), pos(GCI0(1, 2))]
        assert total_loss(m, reqs) == pytest.approx(0.0)

    def test_bump_regularizer_added(self):
        m = _random_model("box2el", np.random.default_rng(8), reg_lambda=0.5)
        base = total_loss(m, [pos(GCI0(0, 1))])
        bump_norms = np.linalg.norm(m.params["class_bump"], axis=1).mean()
        m2 = m.copy()
        m2.reg_lambda = 0.0
        assert base == pytest.approx(total_loss(m2, [pos(GCI0(0, 1))]) + 0.5 * bump_norms)
