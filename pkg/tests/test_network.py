"""Topology parsing, forward passes, gradients, collapse, model files."""

import json
import random

import pytest

from xorlab.errors import (ArityError, ModelFormatError, NotLinearError,
                           ShapeError, SpecSyntaxError)
from xorlab.linalg import Matrix
from xorlab.network import (ACTIVATIONS, Network, Topology, collapse_linear,
                            count_weights, forward, gradient, load_model,
                            parse_sizes, parse_spec, save_model)


def _net(spec, *layers):
    topo = parse_spec(spec)
    return Network(topo, tuple(Matrix.from_rows(ws) for ws in layers))


# -- parsing ---------------------------------------------------------------

def test_parse_sizes():
    assert parse_sizes("2-9-1") == (2, 9, 1)
    for bad in ("2", "2--1", "2-0-1", "2-a-1", ""):
        with pytest.raises(SpecSyntaxError):
            parse_sizes(bad)


def test_parse_spec():
    topo = parse_spec("2-2-1/inp-tanh-id")
    assert topo.layer_sizes == (2, 2, 1)
    assert tuple(a.tag for a in topo.activations) == ("Tanh", "Id")
    assert topo.render() == "2-2-1/inp-tanh-id"


def test_parse_spec_errors():
    with pytest.raises(SpecSyntaxError):
        parse_spec("2-2-1")                      # activations required here
    with pytest.raises(SpecSyntaxError):
        parse_spec("2-2-1/tanh-tanh")            # must start with inp
    with pytest.raises(SpecSyntaxError):
        parse_spec("2-2-1/inp-tanh-warp")
    with pytest.raises(ArityError):
        parse_spec("2-2-1/inp-tanh")


def test_activation_registry():
    assert set(ACTIVATIONS) == {"id", "tanh", "sigmoid", "relu"}
    assert ACTIVATIONS["relu"].apply(-2.0) == 0.0
    assert ACTIVATIONS["relu"].apply(2.0) == 2.0
    assert ACTIVATIONS["sigmoid"].apply(0.0) == 0.5


def test_count_weights_spec_values():
    assert count_weights("2-9-1") == 37
    assert count_weights("2-4-4-1") == 37
    assert count_weights((2, 2, 1)) == 9
    assert count_weights(parse_spec("2-2-1/inp-tanh-tanh")) == 9


def test_count_weights_closed_forms():
    for n in range(1, 11):
        assert count_weights((2, n, 1)) == 4 * n + 1
    for p in range(1, 11):
        for q in range(1, 11):
            assert count_weights((2, p, q, 1)) == p * q + 3 * p + 2 * q + 1


# -- forward ---------------------------------------------------------------

# the worked linear example: 2-2-1, all id
_LIN_W1 = [[0.1, -0.1, 0.2], [-0.2, 0.3, 0.1]]
_LIN_W2 = [[-0.4, -0.2, 0.3]]


def test_forward_linear_hand_value():
    net = _net("2-2-1/inp-id-id", _LIN_W1, _LIN_W2)
    trace = forward(net, (0.0, 1.0))
    assert trace.post[0] == (0.1, 0.4)
    assert abs(trace.output - 0.18) < 1e-15
    assert net.output((0.0, 1.0)) == trace.output


def test_forward_trace_shapes():
    net = _net("2-2-1/inp-tanh-tanh",
               [[1.0, 1.0, 0.0], [1.0, 1.0, -1.0]], [[1.0, -2.0, 0.0]])
    trace = forward(net, (0.5, 0.5))
    assert len(trace.pre) == 2 and len(trace.post) == 2
    assert trace.outputs == trace.post[-1]
    with pytest.raises(ShapeError):
        forward(net, (0.5,))


def test_network_weight_shape_validation():
    topo = parse_spec("2-2-1/inp-id-id")
    with pytest.raises(ShapeError):
        Network(topo, (Matrix.from_rows(_LIN_W1),
                       Matrix.from_rows([[1.0, 2.0]])))


def test_predictor_closure():
    net = _net("2-2-1/inp-id-id", _LIN_W1, _LIN_W2)
    f = net.predictor()
    assert f(0.0, 1.0) == net.output((0.0, 1.0))


# -- gradient --------------------------------------------------------------

def test_gradient_single_linear_unit_closed_form():
    """For one id unit, dE/dw_j = 2 (out - t) x_j with bias x = 1."""
    net = _net("2-1/inp-id", [[0.3, -0.4, 0.25]])
    x1, x2, t = 0.7, 0.2, 1.0
    out = net.output((x1, x2))
    g = gradient(net, (x1, x2), t)[0]
    assert g.at(0, 0) == pytest.approx(2 * (out - t) * x1, abs=1e-15)
    assert g.at(0, 1) == pytest.approx(2 * (out - t) * x2, abs=1e-15)
    assert g.at(0, 2) == pytest.approx(2 * (out - t), abs=1e-15)


def _numeric_gradient(net, inputs, target, h=1e-6):
    grads = []
    for l, w in enumerate(net.weights):
        rows = []
        for i in range(w.rows):
            row = []
            for j in range(w.cols):
                def bumped(eps):
                    mats = [m.to_rows() for m in net.weights]
                    mats[l][i][j] += eps
                    pert = Network(net.topology,
                                   tuple(Matrix.from_rows(m) for m in mats))
                    d = pert.output(inputs) - target
                    return d * d
                row.append((bumped(h) - bumped(-h)) / (2 * h))
            rows.append(row)
        grads.append(rows)
    return grads


def test_gradient_matches_finite_differences_tanh():
    rng = random.Random(11)
    for _ in range(5):
        net = _net("2-2-1/inp-tanh-sigmoid",
                   [[rng.uniform(-1, 1) for _ in range(3)] for _ in range(2)],
                   [[rng.uniform(-1, 1) for _ in range(3)]])
        inputs = (rng.random(), rng.random())
        target = rng.random()
        analytic = gradient(net, inputs, target)
        numeric = _numeric_gradient(net, inputs, target)
        for ga, gn in zip(analytic, numeric):
            for i in range(ga.rows):
                for j in range(ga.cols):
                    assert ga.at(i, j) == pytest.approx(gn[i][j], abs=1e-7)


def test_gradient_requires_single_output():
    net = _net("2-2/inp-id", [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    with pytest.raises(ShapeError):
        gradient(net, (0.1, 0.2), 0.5)


# -- collapse --------------------------------------------------------------

def test_collapse_hand_value():
    net = _net("2-2-1/inp-id-id", _LIN_W1, _LIN_W2)
    single = collapse_linear(net)
    assert single.topology.layer_sizes == (2, 1)
    # w = (A2 A1, A2 b1 + b2)
    w = single.weights[0]
    assert w.at(0, 0) == pytest.approx(-0.4 * 0.1 + -0.2 * -0.2, abs=1e-15)
    assert w.at(0, 1) == pytest.approx(-0.4 * -0.1 + -0.2 * 0.3, abs=1e-15)
    assert w.at(0, 2) == pytest.approx(
        -0.4 * 0.2 + -0.2 * 0.1 + 0.3, abs=1e-15)


def test_collapse_preserves_outputs():
    rng = random.Random(3)
    topo = parse_spec("2-3-2-1/inp-id-id-id")
    mats = tuple(Matrix.from_rows(
        [[rng.uniform(-1, 1) for _ in range(c)] for _ in range(r)])
        for r, c in topo.weight_shapes())
    net = Network(topo, mats)
    single = collapse_linear(net)
    for _ in range(20):
        ins = (rng.random(), rng.random())
        assert single.output(ins) == pytest.approx(net.output(ins),
                                                   abs=1e-12)


def test_collapse_rejects_nonlinear():
    net = _net("2-2-1/inp-tanh-id",
               [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [[1.0, 1.0, 0.0]])
    with pytest.raises(NotLinearError):
        collapse_linear(net)


# -- model documents -------------------------------------------------------

def test_save_load_round_trip(tmp_path):
    net = _net("2-2-1/inp-tanh-tanh",
               [[2.32, 2.331, -0.85], [1.743, 1.747, -2.653]],
               [[2.68, -2.704, -0.826]])
    path = tmp_path / "model.json"
    save_model(net, path, seed=42)
    back = load_model(path)
    assert back.topology.render() == net.topology.render()
    assert all(a.entries == b.entries
               for a, b in zip(back.weights, net.weights))
    doc = json.loads(path.read_text())
    assert doc["seed"] == 42


def test_save_is_deterministic(tmp_path):
    net = _net("2-2-1/inp-id-id", _LIN_W1, _LIN_W2)
    p1, p2 = tmp_path / "m1.json", tmp_path / "m2.json"
    save_model(net, p1)
    save_model(net, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_load_model_rejects_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ModelFormatError):
        load_model(bad)
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"spec": "2-2-1/inp-id-id",
                                 "weights": [[[1.0]]]}))
    with pytest.raises(ModelFormatError):
        load_model(wrong)
