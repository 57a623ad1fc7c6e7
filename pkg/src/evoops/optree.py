"""Evolvable operators represented as binary trees of atomic operators.

A tree's leaves always hold one of the two null operators; its internal
nodes hold the six non-null atomics (unary nodes keep their single child in
the right slot). Applying a tree to a pair of genomes (a, b) evaluates it
recursively: children are evaluated left-then-right on the root's original
arguments, then the node's atomic combines the results. A leaf therefore
returns a or b itself, and the whole tree is a composition of atomics that
is closed over the problem box.

Trees are immutable; mutation and recombination return new trees.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator

from .atomic_ops import (
    BINARY_OPS,
    KERNELS,
    NON_NULL_OPS,
    NULL_OPS,
    UNARY_OPS,
    AtomicOpDescriptor,
    atomic_by_id,
)
from .core import Problem, RandomStream, RealGenome

DEFAULT_MAX_DEPTH = 4
DEFAULT_MAX_NODES = 256
# Subtree-swap retry budget before giving up and returning the parents.
RECOMBINE_ATTEMPTS = 16

# Node path: steps from the root, 0 = left child, 1 = right child.
NodePath = tuple[int, ...]


@dataclass(frozen=True)
class OpNode:
    atomic: AtomicOpDescriptor
    left: "OpNode | None" = None
    right: "OpNode | None" = None


@dataclass(frozen=True)
class OperatorTree:
    root: OpNode


def _iter_nodes(node: OpNode, path: NodePath = ()) -> Iterator[tuple[NodePath, OpNode]]:
    """Preorder traversal yielding (path, node) pairs."""
    yield path, node
    if node.left is not None:
        yield from _iter_nodes(node.left, path + (0,))
    if node.right is not None:
        yield from _iter_nodes(node.right, path + (1,))


def iter_nodes(tree: OperatorTree) -> Iterator[tuple[NodePath, OpNode]]:
    return _iter_nodes(tree.root)


def _node_size(node: OpNode) -> int:
    n = 1
    if node.left is not None:
        n += _node_size(node.left)
    if node.right is not None:
        n += _node_size(node.right)
    return n


def _node_depth(node: OpNode) -> int:
    d = 0
    if node.left is not None:
        d = _node_depth(node.left)
    if node.right is not None:
        d = max(d, _node_depth(node.right))
    return d + 1


def tree_size(tree: OperatorTree) -> int:
    """Node count."""
    return _node_size(tree.root)


def tree_depth(tree: OperatorTree) -> int:
    """Height in nodes: a single leaf has depth 1."""
    return _node_depth(tree.root)


def _validate_node(node: OpNode) -> None:
    left, right = node.left, node.right
    if left is None and right is None:
        if not node.atomic.is_null:
            raise ValueError(f"leaf holds non-null atomic {node.atomic.name}")
        return
    if node.atomic.is_null:
        raise ValueError("null atomic on an internal node")
    if node.atomic.arity == 1:
        if left is not None or right is None:
            raise ValueError(f"unary node {node.atomic.name} must keep its child on the right")
        _validate_node(right)
        return
    if left is None or right is None:
        raise ValueError(f"binary node {node.atomic.name} needs two children")
    _validate_node(left)
    _validate_node(right)


def validate_tree(tree: OperatorTree, max_nodes: int | None = None) -> None:
    """Raise ValueError if the tree violates any structural invariant."""
    _validate_node(tree.root)
    if max_nodes is not None and tree_size(tree) > max_nodes:
        raise ValueError(f"tree has {tree_size(tree)} nodes, cap is {max_nodes}")


def _eval(node: OpNode, a: RealGenome, b: RealGenome, problem: Problem, rng: RandomStream) -> RealGenome:
    # Structural invariants are enforced at construction, so evaluation
    # dispatches straight into the atomic kernels.
    left, right = node.left, node.right
    if left is None and right is None:
        # Every leaf sees the root's original arguments.
        op_id = node.atomic.op_id
        if op_id == 0:
            return a
        if op_id == 1:
            return b
        raise ValueError(f"leaf holds non-null atomic {node.atomic.name}")
    if left is None:
        inner = _eval(right, a, b, problem, rng)
        return KERNELS[node.atomic.op_id](inner, None, problem, rng)
    ra = _eval(left, a, b, problem, rng)
    rb = _eval(right, a, b, problem, rng)
    return KERNELS[node.atomic.op_id](ra, rb, problem, rng)


def evaluate_tree(
    tree: OperatorTree,
    a: RealGenome,
    b: RealGenome,
    problem: Problem,
    rng: RandomStream,
) -> RealGenome:
    """Apply the tree-encoded operator to genomes (a, b).

    Stochastic atomics draw fresh randomness at every node application, so
    two evaluations of the same tree generally differ; determinism holds at
    whole-run replay level through the shared stream.
    """
    if a.shape != b.shape:
        raise ValueError(f"genome shapes differ: {a.shape} vs {b.shape}")
    return _eval(tree.root, a, b, problem, rng)


def _random_leaf(rng: RandomStream) -> OpNode:
    return OpNode(NULL_OPS[rng.integers(0, 2)])


GROW_LEAF_ODDS = 8  # below the root a node stops early with probability 1/8


def _grow(rng: RandomStream, budget: int, depth: int = 1) -> OpNode:
    # Shape-first growth. The root is always internal when the budget allows
    # (a lone null leaf is the identity operator and contributes nothing),
    # deeper nodes stop early with probability 1/8, and the depth budget
    # forces leaves. Internal atomics are uniform over the six non-nulls,
    # leaves a fair coin over the two nulls.
    if budget <= 1:
        return _random_leaf(rng)
    if depth > 1 and rng.integers(0, GROW_LEAF_ODDS) == 0:
        return _random_leaf(rng)
    atomic = NON_NULL_OPS[rng.integers(0, len(NON_NULL_OPS))]
    if atomic.arity == 1:
        return OpNode(atomic, right=_grow(rng, budget - 1, depth + 1))
    left = _grow(rng, budget - 1, depth + 1)
    right = _grow(rng, budget - 1, depth + 1)
    return OpNode(atomic, left=left, right=right)


def random_tree(rng: RandomStream, max_depth: int = DEFAULT_MAX_DEPTH) -> OperatorTree:
    """A random structurally valid tree of depth <= max_depth (>= 1)."""
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    return OperatorTree(_grow(rng, max_depth))


def random_node(tree: OperatorTree, rng: RandomStream) -> tuple[NodePath, OpNode]:
    """One uniformly chosen node, by reservoir replacement in one traversal.

    The i-th node visited (preorder) replaces the current choice with
    probability 1/i, so every node ends up selected with probability 1/n
    without counting nodes first.
    """
    chosen: tuple[NodePath, OpNode] | None = None
    i = 0
    for path, node in iter_nodes(tree):
        i += 1
        if rng.uniform() < 1.0 / i:
            chosen = (path, node)
    assert chosen is not None
    return chosen


def _replace_at(node: OpNode, path: NodePath, subtree: OpNode) -> OpNode:
    if not path:
        return subtree
    step, rest = path[0], path[1:]
    if step == 0:
        assert node.left is not None
        return replace(node, left=_replace_at(node.left, rest, subtree))
    assert node.right is not None
    return replace(node, right=_replace_at(node.right, rest, subtree))


def mutate_tree(tree: OperatorTree, rng: RandomStream) -> OperatorTree:
    """Relabel one uniformly chosen node within its structural class.

    Leaves toggle among the null pair, unary nodes among the two unary
    atomics, binary internal nodes among the four crossovers. Shape, node
    count and depth never change (the new label may equal the old one).
    """
    path, node = random_node(tree, rng)
    if node.left is None and node.right is None:
        candidates = NULL_OPS
    elif node.atomic.arity == 1:
        candidates = UNARY_OPS
    else:
        candidates = BINARY_OPS
    new_atomic = candidates[rng.integers(0, len(candidates))]
    new_node = replace(node, atomic=new_atomic)
    return OperatorTree(_replace_at(tree.root, path, new_node))


def recombine_trees(
    p1: OperatorTree,
    p2: OperatorTree,
    rng: RandomStream,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> tuple[OperatorTree, OperatorTree]:
    """Swap one uniformly chosen subtree between the parents.

    Any subtree is itself a valid operator, so the children always satisfy
    the structural invariants. A draw whose children would exceed
    ``max_nodes`` is rejected and redrawn; after ``RECOMBINE_ATTEMPTS``
    failures the parents are returned unchanged.
    """
    for _ in range(RECOMBINE_ATTEMPTS):
        path1, node1 = random_node(p1, rng)
        path2, node2 = random_node(p2, rng)
        c1 = OperatorTree(_replace_at(p1.root, path1, node2))
        c2 = OperatorTree(_replace_at(p2.root, path2, node1))
        if tree_size(c1) <= max_nodes and tree_size(c2) <= max_nodes:
            return c1, c2
    return p1, p2


def _serialize_node(node: OpNode, out: list) -> None:
    out.append("(")
    out.append(str(node.atomic.op_id))
    if node.left is not None:
        out.append(" ")
        _serialize_node(node.left, out)
    if node.right is not None:
        out.append(" ")
        _serialize_node(node.right, out)
    out.append(")")


def serialize_tree(tree: OperatorTree) -> str:
    """Canonical preorder text form: ``(op_id child child)``, leaves ``(0)``/``(1)``."""
    parts: list = []
    _serialize_node(tree.root, parts)
    return "".join(parts)


def _tokenize(text: str) -> list:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_tree(text: str) -> OperatorTree:
    """Inverse of :func:`serialize_tree`. Validates structure; round-trips exactly."""
    tokens = _tokenize(text)
    pos = 0

    def parse_node() -> OpNode:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != "(":
            raise ValueError(f"expected '(' at token {pos} of {text!r}")
        pos += 1
        if pos >= len(tokens) or not tokens[pos].isdigit():
            raise ValueError(f"expected op id at token {pos} of {text!r}")
        atomic = atomic_by_id(int(tokens[pos]))
        pos += 1
        children = []
        while pos < len(tokens) and tokens[pos] == "(":
            children.append(parse_node())
        if pos >= len(tokens) or tokens[pos] != ")":
            raise ValueError(f"expected ')' at token {pos} of {text!r}")
        pos += 1
        if len(children) == 0:
            return OpNode(atomic)
        if len(children) == 1:
            return OpNode(atomic, right=children[0])
        if len(children) == 2:
            return OpNode(atomic, left=children[0], right=children[1])
        raise ValueError(f"node with {len(children)} children in {text!r}")

    root = parse_node()
    if pos != len(tokens):
        raise ValueError(f"trailing content in {text!r}")
    tree = OperatorTree(root)
    validate_tree(tree)
    return tree
