"""Exhaustive alignment solver for small trees, used to audit the DP.

Branch and bound over candidate node pairs sorted by weight, with the
sum of remaining weights as the (admissible) bound. Intended for trees
up to roughly 20x20 nodes; a hard guard rejects anything bigger.

Two constraint variants are supported: the ancestry-consistency rules
alone, or those rules plus the non-crossing requirement the dynamic
program enforces. The second is what the shipped metric computes; the
first exists to measure whether crossing matchings could ever score
higher.
"""

from __future__ import annotations

import enum

import numpy as np

from .align import Alignment, MatchMode, TreeIndex
from .errors import CapacityError
from .intervals import OpenInterval
from .treebank import ParseTree, TreeNode

__all__ = ["OracleVariant", "oracle_alignment", "random_timed_tree"]

MAX_PAIR_PRODUCT = 400


class OracleVariant(enum.Enum):
    ORDER_CONSISTENT = "order_consistent"
    ANCESTRY_ONLY = "ancestry_only"


def oracle_alignment(
    t1: ParseTree,
    t2: ParseTree,
    mode: MatchMode | str = MatchMode.LABELED,
    variant: OracleVariant = OracleVariant.ORDER_CONSISTENT,
) -> Alignment:
    mode = MatchMode.coerce(mode)
    if t1.node_count * t2.node_count > MAX_PAIR_PRODUCT:
        raise CapacityError(
            f"{t1.node_count} x {t2.node_count} nodes exceeds the "
            f"{MAX_PAIR_PRODUCT}-pair oracle guard"
        )
    idx1, idx2 = TreeIndex(t1), TreeIndex(t2)
    n1, n2 = len(idx1.nodes), len(idx2.nodes)

    inter = np.minimum(idx1.ends[:, None], idx2.ends[None, :]) - np.maximum(
        idx1.starts[:, None], idx2.starts[None, :]
    )
    np.clip(inter, 0.0, None, out=inter)
    lens1 = (idx1.ends - idx1.starts)[:, None]
    lens2 = (idx2.ends - idx2.starts)[None, :]
    weights = inter / (lens1 + lens2 - inter)
    if mode is MatchMode.LABELED:
        labels1 = [m.label for m in idx1.nodes]
        labels2 = [m.label for m in idx2.nodes]
        for i in range(n1):
            for j in range(n2):
                if labels1[i] != labels2[j]:
                    weights[i, j] = 0.0

    cand = [(i, j) for i in range(n1) for j in range(n2) if weights[i, j] > 0.0]
    cand.sort(key=lambda ij: (-weights[ij[0], ij[1]], ij[0], ij[1]))
    m = len(cand)
    if m == 0:
        return Alignment(pairs=(), objective=0.0)

    anc1 = idx1.ancestor_matrix()
    anc2 = idx2.ancestor_matrix()
    check_crossing = variant is OracleVariant.ORDER_CONSISTENT

    compat = np.zeros((m, m), dtype=bool)
    for a, (i, j) in enumerate(cand):
        for b in range(a + 1, m):
            k, l = cand[b]
            if i == k or j == l:
                continue
            if anc1[i, k] != anc2[j, l] or anc1[k, i] != anc2[l, j]:
                continue
            if check_crossing and not anc1[i, k] and not anc1[k, i]:
                if (idx1.starts[i] < idx1.starts[k]) != (
                    idx2.starts[j] < idx2.starts[l]
                ):
                    continue
            compat[a, b] = compat[b, a] = True

    w = np.array([weights[i, j] for i, j in cand])
    suffix = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])

    best_val = 0.0
    best_set: list[int] = []
    chosen: list[int] = []

    def recurse(pos: int, value: float):
        nonlocal best_val, best_set
        if value > best_val:
            best_val = value
            best_set = list(chosen)
        if pos == m or value + suffix[pos] <= best_val:
            return
        a = pos
        if all(compat[a, b] for b in chosen):
            chosen.append(a)
            recurse(pos + 1, value + w[a])
            chosen.pop()
        recurse(pos + 1, value)

    recurse(0, 0.0)
    pairs = tuple(
        (idx1.nodes[cand[a][0]], idx2.nodes[cand[a][1]])
        for a in sorted(best_set, key=lambda a: cand[a])
    )
    return Alignment(pairs=pairs, objective=float(best_val))


def random_timed_tree(
    rng: np.random.Generator,
    max_nodes: int,
    alphabet: tuple[str, ...] = ("A", "B", "C"),
    allow_gaps: bool = True,
) -> ParseTree:
    """A random valid timed tree with at most max_nodes labeled nodes.

    Random shape over a random number of leaves, occasional unary
    wrappers, and leaf intervals drawn from sorted random time points
    (with or without silence between leaves).
    """
    for _ in range(64):
        tree = _random_tree_attempt(rng, max_nodes, alphabet, allow_gaps)
        if tree.node_count <= max_nodes:
            return tree
    # Fall back to the smallest possible tree.
    word = "w"
    return ParseTree(
        TreeNode(alphabet[0], OpenInterval(0.0, 1.0), word=word)
    )


def _spaced_points(rng, count: int, min_gap: float = 1e-3) -> np.ndarray:
    pts = np.sort(rng.uniform(0.0, 10.0, size=count))
    for i in range(1, count):
        if pts[i] - pts[i - 1] < min_gap:
            pts[i] = pts[i - 1] + min_gap
    return pts


def _random_tree_attempt(rng, max_nodes, alphabet, allow_gaps):
    n_leaves = int(rng.integers(1, max(2, max_nodes // 2 + 1)))
    if allow_gaps and rng.random() < 0.5:
        pts = _spaced_points(rng, 2 * n_leaves)
        spans = [(pts[2 * i], pts[2 * i + 1]) for i in range(n_leaves)]
    else:
        pts = _spaced_points(rng, n_leaves + 1)
        spans = [(pts[i], pts[i + 1]) for i in range(n_leaves)]

    def build(lo: int, hi: int) -> TreeNode:
        label = str(rng.choice(alphabet))
        width = hi - lo
        if width == 1:
            a, b = spans[lo]
            node = TreeNode(label, OpenInterval(a, b), word=f"w{lo}")
        else:
            parts = 3 if width >= 3 and rng.random() < 0.25 else 2
            cuts = sorted(rng.choice(range(lo + 1, hi), size=parts - 1,
                                     replace=False))
            bounds = [lo, *map(int, cuts), hi]
            kids = tuple(build(a, b) for a, b in zip(bounds, bounds[1:]))
            hull = OpenInterval(kids[0].start, kids[-1].end)
            node = TreeNode(label, hull, children=kids)
        while rng.random() < 0.2:
            node = TreeNode(str(rng.choice(alphabet)), node.interval, (node,))
        return node

    return ParseTree(build(0, n_leaves))
