"""Integer digraphs backed by scipy's compressed sparse graph routines."""
from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components


class Digraph:
    """Directed multigraph on nodes ``0..n-1`` with one boolean flag per edge.

    The flag marks "interesting" edges (observable, bifurcation, ...).
    """

    def __init__(self, n: int, src, dst, flag=None):
        self.n = n
        self.src = np.asarray(src, dtype=np.int64)
        self.dst = np.asarray(dst, dtype=np.int64)
        if flag is None:
            flag = np.zeros(len(self.src), dtype=bool)
        self.flag = np.asarray(flag, dtype=bool)
        self._labels = None

    def _matrix(self, edge_mask=None, reverse=False, extra_sources=()):
        s, d = self.src, self.dst
        if edge_mask is not None:
            s, d = s[edge_mask], d[edge_mask]
        if reverse:
            s, d = d, s
        size = self.n
        if len(extra_sources):
            # a virtual root pointing at every source
            root = np.full(len(extra_sources), self.n, dtype=np.int64)
            s = np.concatenate([s, root])
            d = np.concatenate([d, np.asarray(extra_sources, dtype=np.int64)])
            size += 1
        data = np.ones(len(s), dtype=np.int8)
        return csr_matrix((data, (s, d)), shape=(size, size))

    def scc_labels(self) -> np.ndarray:
        if self._labels is None:
            if self.n == 0:
                self._labels = np.zeros(0, dtype=np.int64)
            else:
                _, self._labels = connected_components(self._matrix(), directed=True,
                                                       connection="strong")
        return self._labels

    def cyclic_nodes(self, edge_mask=None) -> np.ndarray:
        """Nodes whose SCC contains an internal edge selected by ``edge_mask``
        (default: any edge).  Self-loops count."""
        lab = self.scc_labels()
        inner = lab[self.src] == lab[self.dst]
        if edge_mask is not None:
            inner &= edge_mask
        good = np.unique(lab[self.src[inner]])
        return np.isin(lab, good)

    def reach(self, sources, reverse=False, edge_mask=None) -> np.ndarray:
        if _is_mask(sources):
            sources = np.flatnonzero(sources)
        else:
            sources = np.asarray(sorted(sources), dtype=np.int64)
        out = np.zeros(self.n, dtype=bool)
        if len(sources) == 0:
            return out
        mat = self._matrix(edge_mask, reverse, sources)
        order = breadth_first_order(mat, self.n, directed=True, return_predecessors=False)
        order = order[order < self.n]
        out[order] = True
        return out

    def shortest_path(self, sources, targets, edge_mask=None):
        """Node list of a shortest path from some source to some target, or None.

        A source that is itself a target yields a one-node path.
        """
        sources = np.asarray(sorted(sources), dtype=np.int64)
        tmask = _as_mask(targets, self.n)
        if len(sources) == 0:
            return None
        hit = sources[tmask[sources]]
        if len(hit):
            return [int(hit[0])]
        mat = self._matrix(edge_mask, False, sources)
        order, pred = breadth_first_order(mat, self.n, directed=True, return_predecessors=True)
        for v in order:
            if v < self.n and tmask[v]:
                path = [int(v)]
                while pred[path[-1]] != self.n:
                    path.append(int(pred[path[-1]]))
                return path[::-1]
        return None

    def edges_between(self, u: int, v: int):
        """Indices of edges u -> v."""
        return np.flatnonzero((self.src == u) & (self.dst == v)).tolist()

    def path_edges(self, nodes, prefer_flag=False):
        """Edge indices along a node path, choosing a flagged edge when asked."""
        out = []
        for u, v in zip(nodes, nodes[1:]):
            cand = self.edges_between(u, v)
            if prefer_flag:
                flagged = [k for k in cand if self.flag[k]]
                cand = flagged or cand
            out.append(cand[0])
        return out

    def lasso_to(self, sources, cyc_mask_edges, node_ok=None):
        """Stem and loop edge lists: reach a flagged in-SCC edge from ``sources``
        and close a cycle through it inside its SCC.  ``None`` if impossible."""
        lab = self.scc_labels()
        inner = (lab[self.src] == lab[self.dst]) & cyc_mask_edges
        if node_ok is not None:
            inner &= node_ok[self.src] & node_ok[self.dst]
        cand_edges = np.flatnonzero(inner)
        if len(cand_edges) == 0:
            return None
        targets = np.zeros(self.n, dtype=bool)
        targets[self.src[cand_edges]] = True
        emask = None
        if node_ok is not None:
            emask = node_ok[self.src] & node_ok[self.dst]
        stem_nodes = self.shortest_path(sources, targets, emask)
        if stem_nodes is None:
            return None
        u = stem_nodes[-1]
        k = int(next(e for e in cand_edges if self.src[e] == u))
        v = int(self.dst[k])
        comp = lab == lab[u]
        loop_rest = self.shortest_path([v], _one_hot(u, self.n), comp[self.src] & comp[self.dst])
        return self.path_edges(stem_nodes), [k] + self.path_edges(loop_rest)


def _is_mask(x) -> bool:
    return isinstance(x, np.ndarray) and x.dtype == bool


def _as_mask(x, n: int) -> np.ndarray:
    if _is_mask(x):
        return x
    m = np.zeros(n, dtype=bool)
    idx = list(x)
    if idx:
        m[np.asarray(idx, dtype=np.int64)] = True
    return m


def _one_hot(i: int, n: int) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[i] = True
    return m
