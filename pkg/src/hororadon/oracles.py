"""Brute-force reference computations on explicit finite graphs.

These deliberately avoid the word arithmetic used by :mod:`hororadon.tree`
(longest common prefixes) and work from adjacency alone.
"""

from __future__ import annotations

from collections import deque

from .tree import ROOT, Tree, Vertex


def adjacency(tree: Tree, radius: int) -> dict[Vertex, list[Vertex]]:
    """Explicit adjacency lists of ball(o, radius), edges inside the ball only."""
    verts = set(tree.ball(ROOT, radius))
    return {x: [y for y in tree.neighbors(x) if y in verts] for x in verts}


def bfs_parents(adj: dict[Vertex, list[Vertex]], source: Vertex):
    dist = {source: 0}
    parent = {source: None}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                parent[y] = x
                queue.append(y)
    return dist, parent


def bfs_distances(adj, source: Vertex) -> dict[Vertex, int]:
    return bfs_parents(adj, source)[0]


def path_to(parent, x: Vertex) -> list[Vertex]:
    """Path from x back to the BFS source."""
    out = [x]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    return out


def kappa_by_paths(adj, v: Vertex, x: Vertex, u: Vertex) -> int:
    """kappa_w(v, x) for w in Omega(u) from the confluence point of [v,u] and [x,u].

    Both rays towards w pass through u when ``|u| >= max(|v|, |x|)``; c is the
    first vertex of [v, u] lying on [x, u], and kappa = d(v, c) - d(x, c).
    """
    _, parent = bfs_parents(adj, u)
    return confluence_kappa(path_to(parent, v), path_to(parent, x))


def confluence_kappa(pv: list[Vertex], px: list[Vertex]) -> int:
    """d(v, c) - d(x, c) for paths ``pv``, ``px`` ending at the same vertex."""
    on_px = {y: i for i, y in enumerate(px)}
    for i, y in enumerate(pv):
        if y in on_px:
            return i - on_px[y]
    raise AssertionError("paths to a common vertex must meet")
