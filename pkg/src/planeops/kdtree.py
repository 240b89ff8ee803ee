"""Static k-d tree over a point cloud for k-NN and radius queries.

Built once over an immutable (N, 3) array, then queried many times. Median
split along the widest-spread axis, leaves of at most 16 points. Distances
are compared squared internally; returned distances are true meters. Ties in
k-NN results are broken by the lower point index so seeded runs reproduce
bit-for-bit.
"""

import heapq

import numpy as np

from .geometry import as_points

__all__ = ["EmptyCloud", "KdTree"]

LEAF_SIZE = 16


class EmptyCloud(ValueError):
    """Raised when building an index over zero points."""


class KdTree:
    """Balanced binary space partition over point indices.

    The tree never copies or reorders the source array; queries return indices
    valid for the cloud passed to the constructor. Queries do not mutate, so a
    built tree is safe to share across threads.
    """

    def __init__(self, points):
        pts = as_points(points)
        if pts.shape[0] == 0:
            raise EmptyCloud("cannot index an empty cloud")
        self.points = pts
        self._perm = np.arange(pts.shape[0], dtype=np.int64)
        # Node storage, appended during build: axis == -1 marks a leaf whose
        # points are _perm[start:end]; internal nodes carry the split plane.
        self._axis: list[int] = []
        self._split: list[float] = []
        self._left: list[int] = []
        self._right: list[int] = []
        self._start: list[int] = []
        self._end: list[int] = []
        self._root = self._build(0, pts.shape[0])

    # -- construction ------------------------------------------------------

    def _new_node(self) -> int:
        self._axis.append(-1)
        self._split.append(0.0)
        self._left.append(-1)
        self._right.append(-1)
        self._start.append(0)
        self._end.append(0)
        return len(self._axis) - 1

    def _build(self, start: int, end: int) -> int:
        node = self._new_node()
        if end - start <= LEAF_SIZE:
            self._start[node] = start
            self._end[node] = end
            return node
        seg = self._perm[start:end]
        block = self.points[seg]
        spread = block.max(axis=0) - block.min(axis=0)
        axis = int(np.argmax(spread))
        mid = (end - start) // 2
        order = np.argpartition(block[:, axis], mid)
        self._perm[start:end] = seg[order]
        self._axis[node] = axis
        self._split[node] = float(self.points[self._perm[start + mid], axis])
        self._left[node] = self._build(start, start + mid)
        self._right[node] = self._build(start + mid, end)
        return node

    # -- queries -----------------------------------------------------------

    def knn(self, query, k: int, exclude_index: int | None = None):
        """The k nearest points to ``query`` by Euclidean distance.

        Returns ``(distances, indices)`` sorted ascending; ties are resolved
        toward the lower index. If fewer than k points are available (after
        excluding ``exclude_index``), all of them are returned.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        q = np.asarray(query, dtype=np.float64).reshape(3)
        # Max-heap of the current best k, keyed (-d2, -index): the root is the
        # worst candidate under the (distance, index) order.
        heap: list[tuple[float, int]] = []
        self._knn_visit(self._root, q, k, exclude_index, heap)
        best = sorted((-d2, -i) for d2, i in heap)
        dists = np.sqrt(np.array([d2 for d2, _ in best]))
        idx = np.array([i for _, i in best], dtype=np.int64)
        return dists, idx

    def _knn_visit(self, node: int, q: np.ndarray, k: int, exclude, heap) -> None:
        axis = self._axis[node]
        if axis == -1:
            cand = self._perm[self._start[node]:self._end[node]]
            d2s = ((self.points[cand] - q) ** 2).sum(axis=1)
            for i, d2 in zip(cand.tolist(), d2s.tolist()):
                if i == exclude:
                    continue
                key = (-d2, -i)
                if len(heap) < k:
                    heapq.heappush(heap, key)
                elif key > heap[0]:
                    heapq.heapreplace(heap, key)
            return
        delta = q[axis] - self._split[node]
        near, far = (self._left[node], self._right[node]) if delta < 0.0 else (self._right[node], self._left[node])
        self._knn_visit(near, q, k, exclude, heap)
        # Visit the far side on exact ties too: a tied point with a lower
        # index must win over the current worst candidate.
        if len(heap) < k or delta * delta <= -heap[0][0]:
            self._knn_visit(far, q, k, exclude, heap)

    def radius_search(self, center, radius: float) -> np.ndarray:
        """Indices of all points with distance <= radius, ascending."""
        if radius <= 0.0:
            raise ValueError(f"radius must be positive, got {radius}")
        c = np.asarray(center, dtype=np.float64).reshape(3)
        out: list[np.ndarray] = []
        self._radius_visit(self._root, c, radius * radius, out)
        if not out:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate(out))

    def _radius_visit(self, node: int, c: np.ndarray, r2: float, out) -> None:
        axis = self._axis[node]
        if axis == -1:
            cand = self._perm[self._start[node]:self._end[node]]
            d2s = ((self.points[cand] - c) ** 2).sum(axis=1)
            hit = cand[d2s <= r2]
            if hit.size:
                out.append(hit)
            return
        delta = c[axis] - self._split[node]
        near, far = (self._left[node], self._right[node]) if delta < 0.0 else (self._right[node], self._left[node])
        self._radius_visit(near, c, r2, out)
        if delta * delta <= r2:
            self._radius_visit(far, c, r2, out)

    def __len__(self) -> int:
        return self.points.shape[0]
