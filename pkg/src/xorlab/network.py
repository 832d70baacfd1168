"""Feedforward networks with bias-augmented weight matrices.

The weight matrix of layer l has shape n_{l+1} x (n_l + 1): the last
column is the bias, so the layer computes f(W . [prev; 1]).  Published
weight tables in that convention paste in directly.

The forward pass accumulates each pre-activation in a pinned order
(ascending input index, bias last); the compiled training kernel repeats
the same order so both backends produce bit-identical floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import (ArityError, ModelFormatError, NotLinearError,
                     ShapeError, SpecSyntaxError)
from .linalg import Matrix, mat_mul

__all__ = [
    "Activation", "ID", "TANH", "SIGMOID", "RELU", "ACTIVATIONS",
    "Topology", "Network", "ForwardTrace",
    "parse_spec", "parse_sizes", "count_weights",
    "forward", "gradient", "collapse_linear",
    "save_model", "load_model",
]


def _sigmoid(z: float) -> float:
    # sign branch keeps exp() from overflowing for large |z|
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


class Activation:
    """A scalar activation and its derivative.

    slope() takes both the pre-activation z and the activation value a so
    each tag can use whichever is cheaper (tanh and sigmoid differentiate
    through a, relu through z).
    """

    __slots__ = ("tag", "code", "_fn", "_slope")

    def __init__(self, tag, code, fn, slope):
        self.tag = tag
        self.code = code      # stable integer id shared with the kernels
        self._fn = fn
        self._slope = slope

    def apply(self, z: float) -> float:
        return self._fn(z)

    def slope(self, z: float, a: float) -> float:
        return self._slope(z, a)

    def __repr__(self):
        return f"Activation({self.tag})"

    def __eq__(self, other):
        return isinstance(other, Activation) and other.tag == self.tag

    def __hash__(self):
        return hash(self.tag)


ID = Activation("Id", 0, lambda z: z, lambda z, a: 1.0)
TANH = Activation("Tanh", 1, math.tanh, lambda z, a: 1.0 - a * a)
SIGMOID = Activation("Sigmoid", 2, _sigmoid, lambda z, a: a * (1.0 - a))
# slope at the fold z = 0 is 0, matching u(t) = 0 for t <= 0
RELU = Activation("Relu", 3,
                  lambda z: z if z > 0.0 else 0.0,
                  lambda z, a: 1.0 if z > 0.0 else 0.0)

ACTIVATIONS = {"id": ID, "tanh": TANH, "sigmoid": SIGMOID, "relu": RELU}


@dataclass(frozen=True)
class Topology:
    """Layer sizes plus one activation per non-input layer."""

    layer_sizes: tuple[int, ...]
    activations: tuple[Activation, ...]

    def __post_init__(self):
        sizes = self.layer_sizes
        if len(sizes) < 2:
            raise SpecSyntaxError(
                f"need at least input and output layers, got {sizes}")
        if any((not isinstance(n, int)) or n < 1 for n in sizes):
            raise SpecSyntaxError(f"layer sizes must be positive: {sizes}")
        if len(self.activations) != len(sizes) - 1:
            raise ArityError(
                f"{len(sizes)} layers need {len(sizes) - 1} activations, "
                f"got {len(self.activations)}")

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    def weight_shapes(self) -> tuple[tuple[int, int], ...]:
        s = self.layer_sizes
        return tuple((s[l + 1], s[l] + 1) for l in range(len(s) - 1))

    def render(self) -> str:
        sizes = "-".join(str(n) for n in self.layer_sizes)
        acts = "-".join(a.tag.lower() for a in self.activations)
        return f"{sizes}/inp-{acts}"


def parse_sizes(text: str) -> tuple[int, ...]:
    parts = text.strip().split("-")
    sizes = []
    for p in parts:
        if not p.isdigit() or int(p) < 1:
            raise SpecSyntaxError(
                f"bad layer size {p!r} in {text!r}; expected positive "
                f"integers joined by '-'")
        sizes.append(int(p))
    if len(sizes) < 2:
        raise SpecSyntaxError(
            f"topology {text!r} needs at least two layers")
    return tuple(sizes)


def parse_spec(text: str) -> Topology:
    """Parse "2-2-1/inp-tanh-tanh" style topology strings.

    Activation names are case-insensitive; the list length must match the
    number of non-input layers.
    """
    head, sep, tail = text.strip().partition("/")
    if not sep:
        raise SpecSyntaxError(
            f"missing '/' in topology spec {text!r}; expected e.g. "
            f"2-2-1/inp-tanh-tanh")
    sizes = parse_sizes(head)
    act_parts = tail.split("-")
    if not act_parts or act_parts[0].lower() != "inp":
        raise SpecSyntaxError(
            f"activation list in {text!r} must start with 'inp'")
    acts = []
    for tag in act_parts[1:]:
        try:
            acts.append(ACTIVATIONS[tag.lower()])
        except KeyError:
            known = ", ".join(ACTIVATIONS)
            raise SpecSyntaxError(
                f"unknown activation {tag!r} in {text!r}; "
                f"known: {known}") from None
    if len(acts) != len(sizes) - 1:
        raise ArityError(
            f"{len(sizes)} layers need {len(sizes) - 1} activations, "
            f"got {len(acts)} in {text!r}")
    return Topology(sizes, tuple(acts))


def count_weights(topo: "Topology | tuple[int, ...] | str") -> int:
    """Total weight count including biases: sum of n_{l+1} * (n_l + 1)."""
    if isinstance(topo, str):
        sizes = parse_sizes(topo.partition("/")[0])
    elif isinstance(topo, Topology):
        sizes = topo.layer_sizes
    else:
        sizes = tuple(topo)
    return sum(sizes[l + 1] * (sizes[l] + 1) for l in range(len(sizes) - 1))


@dataclass(frozen=True)
class Network:
    """Immutable weights bound to a topology."""

    topology: Topology
    weights: tuple[Matrix, ...]

    def __post_init__(self):
        expected = self.topology.weight_shapes()
        got = tuple(w.shape for w in self.weights)
        if got != expected:
            raise ShapeError(
                f"weight shapes {got} do not match topology "
                f"{self.topology.render()} (expected {expected})")

    def output(self, inputs) -> float:
        return forward(self, inputs).output

    def predictor(self):
        """(x1, ..., xn) -> scalar output, for SSE and classification."""
        return lambda *xs: forward(self, xs).output


@dataclass(frozen=True)
class ForwardTrace:
    """Inputs plus per-layer pre- and post-activation vectors."""

    inputs: tuple[float, ...]
    pre: tuple[tuple[float, ...], ...]
    post: tuple[tuple[float, ...], ...]

    @property
    def outputs(self) -> tuple[float, ...]:
        return self.post[-1]

    @property
    def output(self) -> float:
        if len(self.post[-1]) != 1:
            raise ShapeError(
                f"scalar output requested from a {len(self.post[-1])}-wide "
                f"final layer")
        return self.post[-1][0]


def forward(net: Network, inputs) -> ForwardTrace:
    """Evaluate the network, keeping intermediates for gradient reuse."""
    xs = tuple(float(v) for v in inputs)
    if len(xs) != net.topology.n_inputs:
        raise ShapeError(
            f"expected {net.topology.n_inputs} inputs, got {len(xs)}")
    a = list(xs)
    pre = []
    post = []
    for w, act in zip(net.weights, net.topology.activations):
        n_prev = len(a)
        zs = []
        avs = []
        for i in range(w.rows):
            # pinned accumulation order: inputs ascending, bias last
            z = 0.0
            for j in range(n_prev):
                z += w.at(i, j) * a[j]
            z += w.at(i, n_prev)
            zs.append(z)
            avs.append(act.apply(z))
        pre.append(tuple(zs))
        post.append(tuple(avs))
        a = avs
    return ForwardTrace(xs, tuple(pre), tuple(post))


def gradient(net: Network, inputs, target: float) -> tuple[Matrix, ...]:
    """Partials of the squared error (out - target)^2 for every weight.

    Reverse accumulation through the stored intermediates; returns one
    matrix per layer, shaped like the corresponding weight matrix.
    """
    if net.topology.n_outputs != 1:
        raise ShapeError("gradient requires a single-output network")
    trace = forward(net, inputs)
    acts = net.topology.activations
    out = trace.output
    # delta[i] = dE/dz_i for the current layer, starting at the output
    last = len(net.weights) - 1
    delta = [2.0 * (out - float(target))
             * acts[last].slope(trace.pre[last][0], trace.post[last][0])]
    grads: list[Matrix] = [None] * len(net.weights)
    for l in range(last, -1, -1):
        below = trace.post[l - 1] if l > 0 else trace.inputs
        w = net.weights[l]
        rows = []
        for i in range(w.rows):
            rows.append([delta[i] * below[j] for j in range(len(below))]
                        + [delta[i]])
        grads[l] = Matrix.from_rows(rows)
        if l > 0:
            nxt = []
            for j in range(len(below)):
                acc = 0.0
                for i in range(w.rows):
                    acc += delta[i] * w.at(i, j)
                nxt.append(acc * acts[l - 1].slope(trace.pre[l - 1][j],
                                                   trace.post[l - 1][j]))
            delta = nxt
    return tuple(grads)


def collapse_linear(net: Network) -> Network:
    """Fold an all-Id network into the equivalent single layer.

    Pairwise rule w = (A2.A1, A2.b1 + b2), applied left to right across
    the stack; the augmented-matrix form appends the row (0, ..., 0, 1) to
    the lower matrix and multiplies.
    """
    for a in net.topology.activations:
        if a is not ID:
            raise NotLinearError(
                f"collapse needs all-Id activations, found {a.tag} in "
                f"{net.topology.render()}")
    combined = net.weights[0]
    for w in net.weights[1:]:
        aug_rows = list(combined.to_rows())
        aug_rows.append([0.0] * (combined.cols - 1) + [1.0])
        combined = mat_mul(w, Matrix.from_rows(aug_rows))
    topo = Topology((net.topology.n_inputs, net.topology.n_outputs), (ID,))
    return Network(topo, (combined,))


# ---------------------------------------------------------------------------
# model documents

def save_model(net: Network, path: "str | Path",
               seed: "int | None" = None) -> None:
    """Write the JSON model document (spec, optional seed, weights)."""
    doc = {
        "spec": net.topology.render(),
        "weights": [
            {"rows": w.rows, "cols": w.cols, "data": list(w.entries)}
            for w in net.weights
        ],
    }
    if seed is not None:
        doc["seed"] = int(seed)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path: "str | Path") -> Network:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "spec" not in doc or "weights" not in doc:
        raise ModelFormatError(
            f"{path}: model document needs 'spec' and 'weights' fields")
    topo = parse_spec(doc["spec"])
    mats = []
    for k, entry in enumerate(doc["weights"]):
        try:
            rows, cols = int(entry["rows"]), int(entry["cols"])
            data = [float(v) for v in entry["data"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(
                f"{path}: weights[{k}] malformed: {exc}") from None
        if len(data) != rows * cols:
            raise ModelFormatError(
                f"{path}: weights[{k}] says {rows}x{cols} but carries "
                f"{len(data)} values")
        mats.append(Matrix(rows, cols, tuple(data)))
    return Network(topo, tuple(mats))
