"""Executable scalability predicates on sparsity patterns.

Support (structural nonsingularity) is a perfect matching in the bipartite
row-column graph; total support additionally puts every nonzero on some
perfect matching, and is exactly the pattern condition under which a square
nonnegative matrix can be scaled to doubly stochastic form. Irreducibility
is strong connectivity of the directed pattern graph.
"""

from collections import deque
from dataclasses import dataclass

from equilibrate.errors import DimensionMismatch


@dataclass(frozen=True)
class StructureReport:
    has_support: bool
    has_total_support: bool
    is_irreducible: bool


def _adjacency(m):
    return [m.indices[m.indptr[i] : m.indptr[i + 1]].tolist() for i in range(m.nrows)]


def _hopcroft_karp(adj, n_left, n_right):
    """Maximum bipartite matching; returns (size, match_left, match_right)."""
    inf = n_left + n_right + 1
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [inf] * n_left
    size = 0
    while True:
        queue = deque()
        for u in range(n_left):
            if match_l[u] < 0:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        free_dist = inf
        while queue:
            u = queue.popleft()
            if dist[u] >= free_dist:
                continue
            for v in adj[u]:
                w = match_r[v]
                if w < 0:
                    if free_dist == inf:
                        free_dist = dist[u] + 1
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if free_dist == inf:
            return size, match_l, match_r
        for u in range(n_left):
            if match_l[u] < 0 and _augment_layered(u, adj, match_l, match_r, dist, inf):
                size += 1


def _augment_layered(root, adj, match_l, match_r, dist, inf):
    # Iterative DFS along the BFS layering; cols[k] is the edge into path[k + 1].
    path = [root]
    iters = [iter(adj[root])]
    cols = []
    while path:
        u = path[-1]
        advanced = False
        for v in iters[-1]:
            w = match_r[v]
            if w < 0:
                cols.append(v)
                for pu, pv in zip(path, cols):
                    match_l[pu] = pv
                    match_r[pv] = pu
                return True
            if dist[w] == dist[u] + 1:
                cols.append(v)
                path.append(w)
                iters.append(iter(adj[w]))
                advanced = True
                break
        if not advanced:
            dist[u] = inf  # dead end for this phase
            path.pop()
            iters.pop()
            if cols:
                cols.pop()
    return False


def _require_square(m):
    if m.nrows != m.ncols:
        raise DimensionMismatch("structure predicates require a square matrix")


def has_support(m):
    """True iff the pattern admits a positive diagonal under a column permutation."""
    _require_square(m)
    size, _, _ = _hopcroft_karp(_adjacency(m), m.nrows, m.ncols)
    return size == m.nrows


def has_total_support(m):
    """True iff every nonzero lies on some positive diagonal.

    Tests, per nonzero (i, j) off the initial matching, matchability of the
    pattern with row i and column j removed; deleting the pair frees exactly
    column match(i), so the reduced pattern is matchable iff an alternating
    path reaches that column, which is a single O(nnz) search.
    """
    _require_square(m)
    n = m.nrows
    adj = _adjacency(m)
    size, match_l, match_r = _hopcroft_karp(adj, n, n)
    if size < n:
        return False
    for i in range(n):
        for j in adj[i]:
            if match_l[i] == j:
                continue
            if not _reaches_freed_column(adj, match_r, start=match_r[j], banned=j, target=match_l[i]):
                return False
    return True


def _reaches_freed_column(adj, match_r, start, banned, target):
    visited = bytearray(len(match_r))
    visited[banned] = 1
    path = [start]
    iters = [iter(adj[start])]
    while path:
        advanced = False
        for v in iters[-1]:
            if visited[v]:
                continue
            visited[v] = 1
            if v == target:
                return True
            path.append(match_r[v])
            iters.append(iter(adj[match_r[v]]))
            advanced = True
            break
        if not advanced:
            path.pop()
            iters.pop()
    return False


def is_irreducible(m):
    """True iff the directed graph of the pattern is strongly connected."""
    _require_square(m)
    n = m.nrows
    forward = _adjacency(m)
    backward = [[] for _ in range(n)]
    for i in range(n):
        for j in forward[i]:
            backward[j].append(i)
    return _reaches_all(forward, n) and _reaches_all(backward, n)


def _reaches_all(adj, n):
    seen = bytearray(n)
    seen[0] = 1
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = 1
                count += 1
                queue.append(v)
    return count == n


def structure_report(m):
    """All three predicates at once."""
    _require_square(m)
    support = has_support(m)
    return StructureReport(
        has_support=support,
        has_total_support=has_total_support(m) if support else False,
        is_irreducible=is_irreducible(m),
    )
