"""Operator-population analytics.

Quantifies how diverse an operator population is and how its selection
rates move: ordered-tree edit distance between operator trees (Zhang-Shasha,
unit costs, labels are atomic op ids), pairwise distance matrices with
optional size-sum normalization, 2D stress-majorization embeddings of those
matrices, and rate-trajectory extraction from run traces.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RandomStream
from .engine import RunTrace
from .optree import OperatorTree, OpNode, tree_size

VALID_NORMALIZATIONS = ("none", "size_sum")


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric nonnegative matrix with zero diagonal."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"distance matrix must be square, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class Embedding2D:
    """Planar embedding of a distance matrix with its final raw stress."""

    points: np.ndarray
    stress: float
    stress_history: tuple[float, ...]
    iterations: int

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


class _Annotated:
    """Postorder annotation of a tree for the edit-distance recurrence.

    Nodes are numbered 1..n in postorder. ``lml[i]`` is the postorder index
    of node i's leftmost leaf descendant; keyroots are the nodes that are
    not on the leftmost path from any higher-numbered node.
    """

    __slots__ = ("labels", "lml", "keyroots", "n")

    def __init__(self, root: OpNode):
        labels: list = [None]  # 1-based
        lml: list = [0]

        def visit(node: OpNode) -> int:
            children = [c for c in (node.left, node.right) if c is not None]
            first_child_idx = None
            for c in children:
                idx = visit(c)
                if first_child_idx is None:
                    first_child_idx = idx
            my_idx = len(labels)
            labels.append(node.atomic.op_id)
            lml.append(my_idx if first_child_idx is None else lml[first_child_idx])
            return my_idx

        visit(root)
        self.labels = labels
        self.lml = lml
        self.n = len(labels) - 1
        last_for_lml: dict = {}
        for i in range(1, self.n + 1):
            last_for_lml[lml[i]] = i
        self.keyroots = sorted(last_for_lml.values())


def _tree_dist(a: _Annotated, b: _Annotated) -> int:
    n, m = a.n, b.n
    td = [[0] * (m + 1) for _ in range(n + 1)]
    for i in a.keyroots:
        for j in b.keyroots:
            li, lj = a.lml[i], b.lml[j]
            rows = i - li + 2
            cols = j - lj + 2
            fd = [[0] * cols for _ in range(rows)]
            for x in range(1, rows):
                fd[x][0] = fd[x - 1][0] + 1
            for y in range(1, cols):
                fd[0][y] = fd[0][y - 1] + 1
            for x in range(1, rows):
                node_i = x + li - 1
                for y in range(1, cols):
                    node_j = y + lj - 1
                    if a.lml[node_i] == li and b.lml[node_j] == lj:
                        # Both prefixes end in whole subtrees rooted here.
                        relabel = 0 if a.labels[node_i] == b.labels[node_j] else 1
                        fd[x][y] = min(
                            fd[x - 1][y] + 1,
                            fd[x][y - 1] + 1,
                            fd[x - 1][y - 1] + relabel,
                        )
                        td[node_i][node_j] = fd[x][y]
                    else:
                        p = a.lml[node_i] - li
                        q = b.lml[node_j] - lj
                        fd[x][y] = min(
                            fd[x - 1][y] + 1,
                            fd[x][y - 1] + 1,
                            fd[p][q] + td[node_i][node_j],
                        )
    return td[n][m]


def tree_edit_distance(t1: OperatorTree, t2: OperatorTree) -> int:
    """Ordered-tree edit distance with unit insert/delete/relabel costs.

    Labels are atomic op ids, so the two null operators count as different
    labels. Satisfies the metric axioms.
    """
    return _tree_dist(_Annotated(t1.root), _Annotated(t2.root))


def pairwise_distances(trees, normalization: str = "none") -> DistanceMatrix:
    """All-pairs edit distances for a sequence of at least two trees.

    ``size_sum`` normalization divides d(i, j) by size(i) + size(j), which
    bounds every entry to [0, 1] since the distance never exceeds deleting
    one tree entirely and inserting the other.
    """
    trees = list(trees)
    if len(trees) < 2:
        raise ValueError(f"need at least 2 trees, got {len(trees)}")
    if normalization not in VALID_NORMALIZATIONS:
        raise ValueError(
            f"normalization must be one of {VALID_NORMALIZATIONS}, got {normalization!r}"
        )
    annotated = [_Annotated(t.root) for t in trees]
    sizes = [tree_size(t) for t in trees]
    n = len(trees)
    values = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            d = float(_tree_dist(annotated[i], annotated[j]))
            if normalization == "size_sum":
                d /= sizes[i] + sizes[j]
            values[i, j] = values[j, i] = d
    return DistanceMatrix(values)


def _raw_stress(delta: np.ndarray, dis: np.ndarray) -> float:
    diff = delta - dis
    return float(np.sum(np.triu(diff * diff, k=1)))


def _euclidean(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def smacof_embed(
    matrix,
    rng: RandomStream,
    max_iters: int = 300,
    tol: float = 1e-6,
) -> Embedding2D:
    """Embed a distance matrix in the plane by iterative stress majorization.

    Starts from points uniform in [-1, 1]^2 (drawn row-major from ``rng``)
    and repeats the Guttman transform, which never increases the raw stress
    sum((delta_ij - dist_ij)^2 over i<j). Stops when the relative stress
    decrease falls below ``tol``, stress hits zero, or ``max_iters`` passes.

    An all-zero matrix embeds as all points at the origin with stress 0.
    """
    delta = matrix.values if isinstance(matrix, DistanceMatrix) else np.asarray(matrix, dtype=np.float64)
    n = delta.shape[0]
    if delta.ndim != 2 or delta.shape != (n, n):
        raise ValueError(f"need a square matrix, got shape {delta.shape}")
    if not np.allclose(delta, delta.T):
        raise ValueError("distance matrix must be symmetric")

    if not np.any(delta > 0):
        points = np.zeros((n, 2))
        return Embedding2D(points=points, stress=0.0, stress_history=(0.0,), iterations=0)

    points = rng.uniforms(n * 2).reshape(n, 2) * 2.0 - 1.0
    dis = _euclidean(points)
    stress = _raw_stress(delta, dis)
    history = [stress]
    iterations = 0
    for _ in range(max_iters):
        # Guttman transform: X <- (1/n) B(X) X with B built from the ratio
        # of target to current distances (zero where current distance is 0).
        safe = np.where(dis == 0.0, 1e-5, dis)
        ratio = delta / safe
        bmat = -ratio
        np.fill_diagonal(bmat, 0.0)
        np.fill_diagonal(bmat, -bmat.sum(axis=1))
        points = bmat.dot(points) / n
        dis = _euclidean(points)
        new_stress = _raw_stress(delta, dis)
        iterations += 1
        history.append(new_stress)
        if new_stress == 0.0:
            stress = new_stress
            break
        if stress - new_stress < tol * stress:
            stress = new_stress
            break
        stress = new_stress
    return Embedding2D(
        points=points,
        stress=stress,
        stress_history=tuple(history),
        iterations=iterations,
    )


@dataclass(frozen=True, eq=False)
class RateTrajectories:
    """Per-generation operator rates extracted from a run trace."""

    max_rates: np.ndarray  # shape (generations + 1,)
    rates: np.ndarray  # shape (generations + 1, pool size)

    def __post_init__(self):
        for field in ("max_rates", "rates"):
            arr = np.array(getattr(self, field), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, field, arr)


def rate_trajectories(trace: RunTrace) -> RateTrajectories:
    """Max-rate series and full per-slot rate matrix from a trace.

    Raises if the trace carries no rate records (GA traces do not).
    """
    if any(rec.rates is None or rec.max_rate is None for rec in trace.records):
        raise ValueError(
            f"trace of algorithm {trace.config.algorithm.value!r} has no rate records"
        )
    max_rates = np.array([rec.max_rate for rec in trace.records], dtype=np.float64)
    rates = np.array([rec.rates for rec in trace.records], dtype=np.float64)
    return RateTrajectories(max_rates=max_rates, rates=rates)
