"""Error-surface projections: full-dataset SSE as a function of two chosen
weights with every other weight frozen at a base network's values.

Grids are a-major: values[i][j] is the SSE with coord_a set to axis_a[i]
and coord_b set to axis_b[j].  Axis values are computed once here and
handed to the kernel, so both kernel backends see identical lattices.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

from . import kernels
from .datasets import Dataset
from .errors import DomainError, InvalidCoordError, ShapeError
from .linalg import Matrix
from .network import Network, Topology, parse_spec

__all__ = [
    "WeightCoord", "SurfaceGrid", "LandscapeStats",
    "parse_coord", "enumerate_pairs", "flat_index", "replace_weights",
    "project", "landscape_stats", "emit_grid_csv",
]


@dataclass(frozen=True, order=True)
class WeightCoord:
    """0-based (layer, row, col) into the weight stack.

    Renders 1-based in the spreadsheet style w1_11; any index past 9 gets
    explicit underscores (w1_2_10) to stay unambiguous.
    """

    layer: int
    row: int
    col: int

    def __post_init__(self):
        if self.layer < 0 or self.row < 0 or self.col < 0:
            raise InvalidCoordError(f"negative weight coordinate {self!r}")

    def render(self) -> str:
        r, c = self.row + 1, self.col + 1
        if r <= 9 and c <= 9:
            return f"w{self.layer + 1}_{r}{c}"
        return f"w{self.layer + 1}_{r}_{c}"


_COORD_COMPACT = re.compile(r"w(\d+)_(\d)(\d)\Z")
_COORD_LONG = re.compile(r"w(\d+)_(\d+)_(\d+)\Z")


def parse_coord(text: str) -> WeightCoord:
    """Inverse of WeightCoord.render; accepts w1_11 and w1_1_1 forms."""
    t = text.strip()
    m = _COORD_COMPACT.match(t) or _COORD_LONG.match(t)
    if not m:
        raise InvalidCoordError(
            f"cannot parse weight coordinate {text!r}; expected w1_11 or "
            f"w1_1_1 style")
    layer, row, col = (int(g) for g in m.groups())
    if layer < 1 or row < 1 or col < 1:
        raise InvalidCoordError(f"coordinate indices are 1-based: {text!r}")
    return WeightCoord(layer - 1, row - 1, col - 1)


def _check_coord(coord: WeightCoord, topo: Topology) -> None:
    shapes = topo.weight_shapes()
    if coord.layer >= len(shapes):
        raise InvalidCoordError(
            f"{coord.render()}: no layer {coord.layer + 1} in "
            f"{topo.render()}")
    rows, cols = shapes[coord.layer]
    if coord.row >= rows or coord.col >= cols:
        raise InvalidCoordError(
            f"{coord.render()}: layer {coord.layer + 1} of {topo.render()} "
            f"is {rows}x{cols}")


def flat_index(coord: WeightCoord, topo: Topology) -> int:
    """Index into the concatenated row-major weight vector."""
    _check_coord(coord, topo)
    shapes = topo.weight_shapes()
    base = sum(r * c for r, c in shapes[:coord.layer])
    return base + coord.row * shapes[coord.layer][1] + coord.col


def enumerate_pairs(topology) -> "list[tuple[WeightCoord, WeightCoord]]":
    """All unordered weight pairs, lexicographic by (layer, row, col)."""
    topo = parse_spec(topology) if isinstance(topology, str) else topology
    coords = [WeightCoord(l, i, j)
              for l, (rows, cols) in enumerate(topo.weight_shapes())
              for i in range(rows)
              for j in range(cols)]
    return list(itertools.combinations(coords, 2))


def replace_weights(net: Network, updates) -> Network:
    """New network with (coord, value) updates applied."""
    rows = [w.to_rows() for w in net.weights]
    for coord, value in updates:
        _check_coord(coord, net.topology)
        rows[coord.layer][coord.row][coord.col] = float(value)
    return Network(net.topology, tuple(Matrix.from_rows(r) for r in rows))


@dataclass(frozen=True)
class SurfaceGrid:
    coord_a: WeightCoord
    coord_b: WeightCoord
    range_a: tuple
    range_b: tuple
    steps: int
    axis_a: tuple
    axis_b: tuple
    values: tuple            # values[i][j], coord_a major
    base_net: Network
    dataset_name: str


def _axis(lo: float, hi: float, steps: int) -> tuple:
    return tuple(lo + i * (hi - lo) / (steps - 1) for i in range(steps))


def project(net: Network, data: Dataset, a: WeightCoord, b: WeightCoord,
            range_a: tuple = (-5.0, 5.0), range_b: tuple = (-5.0, 5.0),
            steps: int = 101) -> SurfaceGrid:
    """SSE grid over the (a, b) weight plane at the net's base point."""
    if a == b:
        raise DomainError(f"projection needs two distinct weights, got "
                          f"{a.render()} twice")
    if steps < 2:
        raise DomainError(f"steps must be at least 2, got {steps}")
    topo = net.topology
    pairs = data.single()
    if data.n_inputs != topo.n_inputs:
        raise ShapeError(
            f"dataset {data.name!r} has {data.n_inputs} inputs but "
            f"{topo.render()} expects {topo.n_inputs}")
    if topo.n_outputs != 1:
        raise ShapeError("projection needs a single-output network")
    ia = flat_index(a, topo)
    ib = flat_index(b, topo)
    lo_a, hi_a = (float(range_a[0]), float(range_a[1]))
    lo_b, hi_b = (float(range_b[0]), float(range_b[1]))
    if not (lo_a < hi_a and lo_b < hi_b):
        raise DomainError("ranges must satisfy lo < hi")
    axis_a = _axis(lo_a, hi_a, steps)
    axis_b = _axis(lo_b, hi_b, steps)
    flat_w = [v for w in net.weights for v in w.entries]
    xs = [v for ins, _ in pairs for v in ins]
    ts = [t for _, t in pairs]
    acts = [act.code for act in topo.activations]
    flat = kernels.project_grid(list(topo.layer_sizes), acts, flat_w, xs, ts,
                                ia, ib, list(axis_a), list(axis_b))
    values = tuple(tuple(flat[i * steps:(i + 1) * steps])
                   for i in range(steps))
    return SurfaceGrid(a, b, (lo_a, hi_a), (lo_b, hi_b), steps,
                       axis_a, axis_b, values, net, data.name)


@dataclass(frozen=True)
class LandscapeStats:
    min_value: float
    min_index: tuple
    min_point: tuple
    max_value: float
    strict_minima: int
    plateau_fraction: float


_PLATEAU_TOL = 1e-12


def landscape_stats(grid: SurfaceGrid) -> LandscapeStats:
    """Brute-force 4-neighborhood scan.

    A strict local minimum beats every existing neighbor with raw <; ties
    count toward the plateau fraction instead (cells equal to at least one
    neighbor within 1e-12).
    """
    n = grid.steps
    if n < 3:
        raise DomainError(f"landscape_stats needs steps >= 3, got {n}")
    v = grid.values
    min_val = math.inf
    max_val = -math.inf
    min_idx = (0, 0)
    strict = 0
    plateau = 0
    for i in range(n):
        for j in range(n):
            x = v[i][j]
            if x < min_val:
                min_val = x
                min_idx = (i, j)
            if x > max_val:
                max_val = x
            neigh = []
            if i > 0:
                neigh.append(v[i - 1][j])
            if i < n - 1:
                neigh.append(v[i + 1][j])
            if j > 0:
                neigh.append(v[i][j - 1])
            if j < n - 1:
                neigh.append(v[i][j + 1])
            if all(x < y for y in neigh):
                strict += 1
            if any(abs(x - y) <= _PLATEAU_TOL for y in neigh):
                plateau += 1
    point = (grid.axis_a[min_idx[0]], grid.axis_b[min_idx[1]])
    return LandscapeStats(min_val, min_idx, point, max_val, strict,
                          plateau / (n * n))


def emit_grid_csv(grid: SurfaceGrid, path: "str | Path",
                  model_ref: "str | None" = None) -> None:
    """CSV (wa,wb,err; wa-major; 17 significant digits) plus a companion
    metadata document at <path>.meta.json."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write("wa,wb,err\n")
        for i in range(grid.steps):
            wa = format(grid.axis_a[i], ".17g")
            for j in range(grid.steps):
                fh.write(f"{wa},{format(grid.axis_b[j], '.17g')},"
                         f"{format(grid.values[i][j], '.17g')}\n")
    meta = {
        "coord_a": grid.coord_a.render(),
        "coord_b": grid.coord_b.render(),
        "range_a": list(grid.range_a),
        "range_b": list(grid.range_b),
        "steps": grid.steps,
        "dataset": grid.dataset_name,
        "model": model_ref if model_ref is not None else "inline",
    }
    with open(str(path) + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
