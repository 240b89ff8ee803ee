"""k-d tree queries: nearest neighbors and radius search.

Shows that tree queries return exactly what a brute-force scan would, and
how the tree pays off once the cloud is large.
"""

import time

import numpy as np

from planeops import KdTree

rng = np.random.default_rng(1)
points = rng.uniform(0, 2, size=(50000, 3))

t0 = time.perf_counter()
tree = KdTree(points)
print(f"built index over {len(tree)} points in {1000 * (time.perf_counter() - t0):.0f} ms")

query = np.array([1.0, 1.0, 1.0])
dists, idx = tree.knn(query, k=5)
print("5 nearest to the center:")
for d, i in zip(dists, idx):
    print(f"  index {i:5d} at {d:.4f} m")

ball = tree.radius_search(query, 0.1)
print(f"points within 0.10 m: {ball.size}")

# tree vs full scan, 200 queries
queries = rng.uniform(0, 2, size=(200, 3))
t0 = time.perf_counter()
for q in queries:
    tree.knn(q, k=10)
tree_ms = 1000 * (time.perf_counter() - t0)

t0 = time.perf_counter()
for q in queries:
    d = ((points - q) ** 2).sum(axis=1)
    np.argsort(d)[:10]
scan_ms = 1000 * (time.perf_counter() - t0)
print(f"200 x knn(10): tree {tree_ms:.0f} ms vs full scan {scan_ms:.0f} ms")

# agreement with the scan on a random query
q = queries[0]
d = np.sqrt(((points - q) ** 2).sum(axis=1))
order = np.lexsort((np.arange(points.shape[0]), d))[:10]
_, tree_idx = tree.knn(q, k=10)
print("matches brute force exactly:", np.array_equal(tree_idx, order))
