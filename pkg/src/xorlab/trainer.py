"""Gradient-descent training, restart sweeps, and classification of
trained networks against the limit functions F_0, F_1, F_inf, the step
surface, and the constant 1/2.

Training runs through the kernels backend (compiled when available); the
trainer owns validation, Network packing, and divergence reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import kernels
from .copula import CopulaParam, xor_f
from .datasets import Dataset
from .errors import DivergenceError, DomainError, ShapeError
from .linalg import Matrix
from .network import Network, Topology, forward, parse_spec

__all__ = [
    "TrainConfig", "TrainResult", "FunctionLabel", "SweepEntry",
    "sse", "train", "classify", "sweep", "label_histogram",
    "envelope_check", "run_metadata",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters; the seed is mandatory, everything else defaulted."""

    seed: int
    learning_rate: float = 0.1
    max_iters: int = 10000
    tol: float = 1e-3
    mode: str = "per_sample"
    init_range: float = 1.0
    record_trajectory: bool = False

    def __post_init__(self):
        if self.learning_rate <= 0.0:
            raise DomainError(
                f"learning_rate must be positive, got {self.learning_rate!r}")
        if self.tol <= 0.0:
            raise DomainError(f"tol must be positive, got {self.tol!r}")
        if self.max_iters < 1:
            raise DomainError(
                f"max_iters must be at least 1, got {self.max_iters!r}")
        if self.mode not in ("per_sample", "full_batch"):
            raise DomainError(
                f"mode must be per_sample or full_batch, got {self.mode!r}")
        if self.init_range <= 0.0:
            raise DomainError(
                f"init_range must be positive, got {self.init_range!r}")


@dataclass(frozen=True)
class TrainResult:
    final_net: Network
    iterations: int
    final_sse: float
    converged: bool
    trajectory: "tuple[float, ...] | None" = None
    diverged: bool = False


@dataclass(frozen=True)
class FunctionLabel:
    """Classification verdict with its worst grid deviation."""

    kind: str                    # F0 F1 Finf Fs StepAbs ConstHalf Unclassified
    max_deviation: float
    s: "float | None" = None     # set only for Fs

    def render(self) -> str:
        if self.kind == "Fs":
            return f"Fs(s={self.s:.6g})"
        return self.kind


@dataclass(frozen=True)
class SweepEntry:
    seed: int
    result: TrainResult
    label: FunctionLabel
    envelope_ok: "bool | None"   # None when the run did not converge


def sse(predict, data: Dataset) -> float:
    """Sum of squared errors of a callable over a single-target dataset."""
    total = 0.0
    for ins, target in data.single():
        d = float(predict(*ins)) - target
        total += d * d
    return total


def _net_from_flat(topo: Topology, flat) -> Network:
    mats = []
    pos = 0
    for rows, cols in topo.weight_shapes():
        n = rows * cols
        mats.append(Matrix(rows, cols, tuple(flat[pos:pos + n])))
        pos += n
    return Network(topo, tuple(mats))


def _as_topology(topology) -> Topology:
    if isinstance(topology, str):
        return parse_spec(topology)
    return topology


def train(topology, data: Dataset, cfg: TrainConfig) -> TrainResult:
    """One seeded run; deterministic given (topology, data, cfg).

    Raises DivergenceError (carrying iteration, SSE, and the state) when
    the loss exceeds the blowup bound or goes non-finite.
    """
    topo = _as_topology(topology)
    pairs = data.single()
    if data.n_inputs != topo.n_inputs:
        raise ShapeError(
            f"dataset {data.name!r} has {data.n_inputs} inputs but "
            f"{topo.render()} expects {topo.n_inputs}")
    if topo.n_outputs != 1:
        raise ShapeError(
            f"training needs a single-output topology, got {topo.render()}")
    xs = [v for ins, _ in pairs for v in ins]
    ts = [t for _, t in pairs]
    acts = [a.code for a in topo.activations]
    w, iters, final_sse, status, traj = kernels.train_run(
        list(topo.layer_sizes), acts, xs, ts, cfg.learning_rate,
        cfg.max_iters, cfg.tol, 1 if cfg.mode == "per_sample" else 0,
        cfg.seed & _MASK64, cfg.init_range,
        1 if cfg.record_trajectory else 0)
    net = _net_from_flat(topo, w)
    if status >= 2:
        reason = "SSE blowup" if status == 2 else "non-finite state"
        raise DivergenceError(
            f"training diverged ({reason}) at iteration {iters}, "
            f"sse={final_sse!r}", iters, final_sse, net)
    trajectory = tuple(traj) if cfg.record_trajectory else None
    return TrainResult(net, iters, final_sse, status == 0, trajectory)


# ---------------------------------------------------------------------------
# classification against the limit functions

def _f0(x, y):
    return abs(x - y)


def _f1(x, y):
    return x + y - 2.0 * x * y


def _finf(x, y):
    return min(x + y, 1.0) - max(x + y - 1.0, 0.0)


def _const_half(x, y):
    return 0.5


_FIXED_CANDIDATES = (("F0", _f0), ("F1", _f1), ("Finf", _finf),
                     ("ConstHalf", _const_half))


def _as_fn(net):
    if isinstance(net, Network):
        if net.topology.n_inputs != 2 or net.topology.n_outputs != 1:
            raise ShapeError(
                f"classification needs a 2-in 1-out network, got "
                f"{net.topology.render()}")
        return lambda x, y: forward(net, (x, y)).output
    return net


def _fs_deviation(pts, outs, t: float) -> float:
    param = CopulaParam.finite(t / (1.0 - t))
    worst = 0.0
    for (x, y), o in zip(pts, outs):
        d = abs(o - float(xor_f(param, x, y)))
        if d > worst:
            worst = d
    return worst


def _golden_min(f, lo: float, hi: float, iters: int = 40):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - g * (hi - lo)
    d = lo + g * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - g * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + g * (hi - lo)
            fd = f(d)
    mid = 0.5 * (lo + hi)
    return mid, f(mid)


def classify(net, tol: float = 0.05, grid: int = 21) -> FunctionLabel:
    """Label a 2-in 1-out function by its closest limit function.

    Fixed candidates F0, F1, Finf and the constant 1/2 are compared over
    the whole grid x grid lattice on [0,1]^2.  The step surface (1
    everywhere except 0 at the corners (0,0) and (1,1)) is discontinuous
    exactly at those corners, so it is compared on the open interior only,
    more than one lattice step (Chebyshev) away from either zero corner.
    When no fixed candidate fits within tol, a finite s is fitted by 1-D
    search and Fs(s) is returned if it fits; otherwise Unclassified,
    carrying the best deviation seen.
    """
    if grid < 2:
        raise DomainError(f"grid must be at least 2, got {grid}")
    fn = _as_fn(net)
    step = grid - 1
    pts = [(i / step, j / step) for i in range(grid) for j in range(grid)]
    outs = [float(fn(x, y)) for x, y in pts]

    scored = []
    for kind, cand in _FIXED_CANDIDATES:
        worst = 0.0
        for (x, y), o in zip(pts, outs):
            d = abs(o - cand(x, y))
            if d > worst:
                worst = d
        scored.append((worst, kind))

    # index-space Chebyshev keeps the corner exclusion exact on the lattice
    interior = [abs(outs[i * grid + j] - 1.0)
                for i in range(1, grid - 1) for j in range(1, grid - 1)
                if max(i, j) > 1 and max(step - i, step - j) > 1]
    scored.append((max(interior) if interior else math.inf, "StepAbs"))

    best_dev, best_kind = min(scored, key=lambda sc: sc[0])
    if best_dev <= tol:
        return FunctionLabel(best_kind, best_dev)

    # fall back to fitting a finite parameter on t = s/(1+s)
    ts = [k / 50.0 for k in range(1, 50)]
    devs = [_fs_deviation(pts, outs, t) for t in ts]
    k = devs.index(min(devs))
    lo = ts[k - 1] if k > 0 else 0.02 / 2.0
    hi = ts[k + 1] if k < len(ts) - 1 else (0.98 + 1.0) / 2.0
    t_star, fit_dev = _golden_min(lambda t: _fs_deviation(pts, outs, t),
                                  lo, hi)
    if fit_dev <= tol:
        return FunctionLabel("Fs", fit_dev, s=t_star / (1.0 - t_star))
    return FunctionLabel("Unclassified", min(best_dev, fit_dev))


def envelope_check(net, tol: float = 0.05, grid: int = 21) -> bool:
    """F_0 - tol <= out <= F_inf + tol over the whole lattice."""
    fn = _as_fn(net)
    step = grid - 1
    for i in range(grid):
        for j in range(grid):
            x, y = i / step, j / step
            o = float(fn(x, y))
            if o < _f0(x, y) - tol or o > _finf(x, y) + tol:
                return False
    return True


def sweep(topology, data: Dataset, cfg: TrainConfig, restarts: int,
          classify_tol: float = 0.05,
          classify_grid: int = 21) -> "list[SweepEntry]":
    """Restart train at seeds seed, seed+1, ... and label every run.

    Diverged runs are recorded (Unclassified, not converged), never fatal.
    Order is by seed.
    """
    if restarts < 1:
        raise DomainError(f"restarts must be at least 1, got {restarts}")
    topo = _as_topology(topology)
    entries = []
    for r in range(restarts):
        run_cfg = replace(cfg, seed=cfg.seed + r)
        try:
            result = train(topo, data, run_cfg)
        except DivergenceError as err:
            result = TrainResult(err.net, err.iteration, err.sse,
                                 converged=False, trajectory=None,
                                 diverged=True)
            entries.append(SweepEntry(run_cfg.seed, result,
                                      FunctionLabel("Unclassified", math.inf),
                                      None))
            continue
        label = classify(result.final_net, tol=classify_tol,
                         grid=classify_grid)
        env = (envelope_check(result.final_net, tol=classify_tol,
                              grid=classify_grid)
               if result.converged else None)
        entries.append(SweepEntry(run_cfg.seed, result, label, env))
    return entries


def label_histogram(entries, converged_only: bool = True) -> dict:
    """Label kind -> count, most frequent first."""
    counts: dict[str, int] = {}
    for e in entries:
        if converged_only and not e.result.converged:
            continue
        key = e.label.render()
        counts[key] = counts.get(key, 0) + 1
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


def run_metadata(topology, cfg: TrainConfig, result: TrainResult,
                 label: "FunctionLabel | None" = None) -> dict:
    """Config echo plus run outcome, ready for JSON serialization."""
    topo = _as_topology(topology)
    doc = {
        "spec": topo.render(),
        "seed": cfg.seed,
        "learning_rate": cfg.learning_rate,
        "max_iters": cfg.max_iters,
        "tol": cfg.tol,
        "mode": cfg.mode,
        "init_range": cfg.init_range,
        "iterations": result.iterations,
        "final_sse": result.final_sse,
        "converged": result.converged,
        "diverged": result.diverged,
    }
    if label is not None:
        doc["label"] = label.render()
        doc["max_deviation"] = label.max_deviation
    return doc
