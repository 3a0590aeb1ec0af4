"""Exact maximum-weight structured alignment between two timed parse trees.

Node pairs are weighted by interval IoU and the chosen matching must
respect ancestry on both sides: whenever two matchings are selected, the
ancestor/descendant relations of the two left-hand nodes must mirror
those of the two right-hand nodes, and siblings must not cross left to
right. Under those constraints the optimum decomposes recursively: the
value of aligning two subtrees with their roots matched is the root pair
IoU plus the best pairing of two equal-length, left-to-right ordered
sequences of pairwise-disjoint descendants.

That inner maximization is solved per subtree pair with a prefix-maximum
dynamic program over descendants sorted by right endpoint: appending a
descendant pair is legal exactly when every previously chosen descendant
ends at or before the new one's start on both sides, which makes the set
of legal predecessors a prefix of the sorted order. The whole table is
evaluated bottom-up over subtree pairs, vectorized over the second tree's
nodes. Total cost is O(n^2 m^2) for trees of n and m nodes.

Matched pairs are recovered afterwards by re-walking small scalar tables
only along the optimal path.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .intervals import OpenInterval
from .treebank import DUMMY_LABEL, ParseTree, TreeNode, iter_nodes

__all__ = [
    "MatchMode",
    "Alignment",
    "TreeIndex",
    "conflicted",
    "attach_dummy_roots",
    "PairSolver",
    "max_weight_alignment",
]

NEG = -1e18  # sentinel for pairs excluded from matching


class MatchMode(enum.Enum):
    LABELED = "labeled"
    UNLABELED = "unlabeled"

    @classmethod
    def coerce(cls, value: "MatchMode | str") -> "MatchMode":
        if isinstance(value, MatchMode):
            return value
        return cls(value)


@dataclass(frozen=True)
class Alignment:
    """Matched node pairs plus the total IoU weight they realize."""

    pairs: tuple[tuple[TreeNode, TreeNode], ...]
    objective: float


class TreeIndex:
    """Preorder indexing of a tree with O(1) ancestry queries."""

    def __init__(self, tree: ParseTree):
        self.tree = tree
        self.nodes: list[TreeNode] = list(iter_nodes(tree.root))
        self.index = {id(n): i for i, n in enumerate(self.nodes)}
        n = len(self.nodes)
        # subtree_end[i]: one past the last preorder index inside i's subtree
        self.subtree_end = np.empty(n, dtype=np.int64)

        def walk(node: TreeNode) -> int:
            i = self.index[id(node)]
            end = i + 1
            for c in node.children:
                end = walk(c)
            self.subtree_end[i] = end
            return end

        walk(tree.root)
        self.starts = np.array([m.start for m in self.nodes], dtype=float)
        self.ends = np.array([m.end for m in self.nodes], dtype=float)

    def preorder(self, node: TreeNode) -> int:
        return self.index[id(node)]

    def is_ancestor(self, p: TreeNode, q: TreeNode) -> bool:
        """True iff p is a strict ancestor of q."""
        i, j = self.index[id(p)], self.index[id(q)]
        return i < j < self.subtree_end[i]

    def ancestor_matrix(self) -> np.ndarray:
        """anc[i, j] is True iff node i is a strict ancestor of node j."""
        n = len(self.nodes)
        idx = np.arange(n)
        return (idx[:, None] < idx[None, :]) & (
            idx[None, :] < self.subtree_end[:, None]
        )


def conflicted(
    pair1: tuple[TreeNode, TreeNode],
    pair2: tuple[TreeNode, TreeNode],
    index1: TreeIndex,
    index2: TreeIndex,
) -> bool:
    """Whether two matchings disagree on an ancestor/descendant relation.

    Given matchings (p1, q1) and (p2, q2) over the same two trees, the
    pair is conflicted when p1's ancestor (or descendant) relation to p2
    differs from q1's relation to q2.
    """
    p1, q1 = pair1
    p2, q2 = pair2
    if index1.is_ancestor(p1, p2) != index2.is_ancestor(q1, q2):
        return True
    if index1.is_ancestor(p2, p1) != index2.is_ancestor(q2, q1):
        return True
    return False


def attach_dummy_roots(t1: ParseTree, t2: ParseTree) -> tuple[ParseTree, ParseTree]:
    """Wrap both trees under fresh roots spanning the two trees' joint hull.

    The two added roots carry the reserved label so they match each other
    in labeled mode, and their shared interval makes their IoU exactly 1.
    """
    lo = min(t1.root.start, t2.root.start)
    hi = max(t1.root.end, t2.root.end)
    hull = OpenInterval(lo, hi)
    return (
        ParseTree(TreeNode(DUMMY_LABEL, hull, children=(t1.root,))),
        ParseTree(TreeNode(DUMMY_LABEL, hull, children=(t2.root,))),
    )


class _TreeData:
    """Per-tree tables shared by every solve involving the tree."""

    def __init__(self, tree: ParseTree):
        self.index = TreeIndex(tree)
        nodes = self.index.nodes
        n = len(nodes)
        self.n = n
        self.starts = self.index.starts
        self.ends = self.index.ends
        self.labels = [m.label for m in nodes]
        sub_end = self.index.subtree_end

        # Postorder: every strict descendant precedes its ancestors.
        order = sorted(range(n), key=lambda i: (sub_end[i], -i))
        self.postorder = order

        # Per node: strict descendants sorted by (end, start), plus the
        # prefix count of descendants whose end does not exceed each
        # element's start (the legal predecessors in a disjoint sequence).
        self.desc: list[np.ndarray] = []
        self.pred: list[np.ndarray] = []
        for i in range(n):
            ids, preds = self._sort_and_pred(np.arange(i + 1, sub_end[i]))
            self.desc.append(ids)
            self.pred.append(preds)
        # Top level: all nodes are candidates under a virtual root.
        self.all_sorted, self.all_pred = self._sort_and_pred(np.arange(n))
        self.max_desc = max((d.size for d in self.desc), default=0)

    def _sort_and_pred(self, ids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if ids.size == 0:
            return ids, np.empty(0, dtype=np.int64)
        ends = self.ends[ids]
        starts = self.starts[ids]
        order = np.lexsort((ids, starts, ends))
        ids = ids[order]
        preds = np.searchsorted(ends[order], starts[order], side="right")
        return ids, preds


def _tree_data(tree: ParseTree) -> _TreeData:
    data = getattr(tree, "_align_data", None)
    if data is None:
        data = _TreeData(tree)
        tree._align_data = data
    return data


class PairSolver:
    """One alignment problem over a fixed tree pair and match mode.

    Subtree values are computed once, bottom-up, on construction; the
    objective, the realizing pairs, and per-subtree-pair optima are then
    cheap lookups.
    """

    def __init__(self, t1: ParseTree, t2: ParseTree, mode: MatchMode | str):
        self.mode = MatchMode.coerce(mode)
        self.d1 = _tree_data(t1)
        self.d2 = _tree_data(t2)
        self._solve()

    # -- forward pass -------------------------------------------------

    def _solve(self):
        d1, d2 = self.d1, self.d2
        n1, n2 = d1.n, d2.n

        inter = np.minimum(d1.ends[:, None], d2.ends[None, :]) - np.maximum(
            d1.starts[:, None], d2.starts[None, :]
        )
        np.clip(inter, 0.0, None, out=inter)
        len1 = (d1.ends - d1.starts)[:, None]
        len2 = (d2.ends - d2.starts)[None, :]
        self.weights = inter / (len1 + len2 - inter)

        if self.mode is MatchMode.LABELED:
            lab2 = {}
            ids2 = np.array([lab2.setdefault(l, len(lab2)) for l in d2.labels])
            ids1 = np.array([lab2.get(l, -1) for l in d1.labels])
            allowed = ids1[:, None] == ids2[None, :]
        else:
            allowed = np.ones((n1, n2), dtype=bool)

        # Padded descendant tables for the second tree.
        maxd2 = max(d2.max_desc, 1)
        desc2_pad = np.zeros((n2, maxd2), dtype=np.int64)
        pred2_pad = np.zeros((n2, maxd2), dtype=np.int64)
        len2s = np.empty(n2, dtype=np.int64)
        for q in range(n2):
            k = d2.desc[q].size
            len2s[q] = k
            if k:
                desc2_pad[q, :k] = d2.desc[q]
                pred2_pad[q, :k] = d2.pred[q]

        F = np.full((n1, n2), NEG)
        qrange = np.arange(n2)
        max_rows = max(d1.max_desc, 1)
        buf = np.empty((max_rows + 1, n2, maxd2 + 1))

        for p in d1.postorder:
            ids = d1.desc[p]
            L1 = ids.size
            if L1 == 0:
                seq_best = np.zeros(n2)
            else:
                G = buf[: L1 + 1]
                G[0] = 0.0
                preds = d1.pred[p]
                for i in range(1, L1 + 1):
                    u = ids[i - 1]
                    cand = F[u][desc2_pad] + np.take_along_axis(
                        G[preds[i - 1]], pred2_pad, axis=1
                    )
                    row = np.maximum(G[i - 1][:, 1:], cand)
                    np.maximum.accumulate(row, axis=1, out=row)
                    G[i, :, 1:] = row
                    G[i, :, 0] = 0.0
                seq_best = G[L1][qrange, len2s]
            F[p] = np.where(allowed[p], self.weights[p] + seq_best, NEG)

        self.F = F
        # Top level: a virtual root pair over all real nodes of each tree.
        self._top = self._scalar_table(d1.all_sorted, d1.all_pred,
                                       d2.all_sorted, d2.all_pred)
        self.objective = float(self._top[-1, -1])

    def _scalar_table(self, ids1, pred1, ids2, pred2) -> np.ndarray:
        """The sequence DP for one explicit pair of candidate lists."""
        L1, L2 = ids1.size, ids2.size
        G = np.zeros((L1 + 1, L2 + 1))
        F = self.F
        for i in range(1, L1 + 1):
            cand = F[ids1[i - 1]][ids2] + G[pred1[i - 1]][pred2]
            row = np.maximum(G[i - 1][1:], cand)
            np.maximum.accumulate(row, out=row)
            G[i][1:] = row
        return G

    # -- public queries -----------------------------------------------

    def subtree_objective(self, p: TreeNode, q: TreeNode) -> float:
        """Best alignment weight for the two subtrees with p matched to q.

        Returns -inf in labeled mode when the labels differ (the two
        roots cannot be matched at all).
        """
        i = self.d1.index.preorder(p)
        j = self.d2.index.preorder(q)
        value = self.F[i, j]
        return float("-inf") if value <= NEG / 2 else float(value)

    def alignment(self) -> Alignment:
        pairs: list[tuple[int, int]] = []
        d1, d2 = self.d1, self.d2

        def unwind(G, ids1, pred1, ids2, pred2):
            i, j = G.shape[0] - 1, G.shape[1] - 1
            chosen = []
            while i > 0 and j > 0:
                v = G[i, j]
                if v == G[i - 1, j]:
                    i -= 1
                elif v == G[i, j - 1]:
                    j -= 1
                else:
                    u, w = ids1[i - 1], ids2[j - 1]
                    chosen.append((u, w))
                    i, j = pred1[i - 1], pred2[j - 1]
            # Recorded right-to-left; recurse left-to-right for stable output.
            for u, w in reversed(chosen):
                descend(u, w)

        def descend(u: int, w: int):
            pairs.append((u, w))
            ids1, pred1 = d1.desc[u], d1.pred[u]
            ids2, pred2 = d2.desc[w], d2.pred[w]
            if ids1.size and ids2.size:
                G = self._scalar_table(ids1, pred1, ids2, pred2)
                unwind(G, ids1, pred1, ids2, pred2)

        unwind(self._top, d1.all_sorted, d1.all_pred,
               d2.all_sorted, d2.all_pred)
        node_pairs = tuple(
            (d1.index.nodes[i], d2.index.nodes[j]) for i, j in sorted(pairs)
        )
        return Alignment(pairs=node_pairs, objective=self.objective)


def max_weight_alignment(
    t1: ParseTree, t2: ParseTree, mode: MatchMode | str = MatchMode.LABELED
) -> Alignment:
    """Solve the structured alignment problem for one tree pair."""
    return PairSolver(t1, t2, mode).alignment()
