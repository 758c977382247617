"""Network graph, incidence vectors, Laplacians and their spectra.

Graphs are small (tens of nodes) so everything is dense.  Node indices are
0-based here; the edge-list text format is 1-based.
"""

from __future__ import annotations

import functools
import math
import os
from collections import deque
from dataclasses import dataclass
from enum import Enum

import numpy as np

from risconn.channel import ue_uav_snr_db, uav_uav_snr_db
from risconn.errors import ConfigurationError, DimensionError
from risconn.scenario import Scenario

CONNECTIVITY_EPS = 1e-9
SYMMETRY_TOL = 1e-12


class EdgeTag(str, Enum):
    DIRECT = "ue-uav"
    BACKHAUL = "uav-uav"
    RIS = "ris"


@dataclass(frozen=True)
class Graph:
    num_nodes: int
    edges: tuple[tuple[int, int], ...] = ()
    tags: tuple[EdgeTag, ...] = ()

    def __post_init__(self):
        if len(self.tags) != len(self.edges):
            raise DimensionError("one tag per edge required")
        seen = set()
        for n, m in self.edges:
            if not (0 <= n < m < self.num_nodes):
                raise ConfigurationError(f"edge ({n}, {m}) must satisfy 0 <= n < m < {self.num_nodes}")
            if (n, m) in seen:
                raise ConfigurationError(f"duplicate edge ({n}, {m})")
            seen.add((n, m))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, n: int, m: int) -> bool:
        return (min(n, m), max(n, m)) in set(self.edges)

    def with_edge(self, n: int, m: int, tag: EdgeTag = EdgeTag.RIS) -> "Graph":
        n, m = min(n, m), max(n, m)
        return Graph(self.num_nodes, self.edges + ((n, m),), self.tags + (EdgeTag(tag),))

    def neighbors(self) -> list[set[int]]:
        adj = [set() for _ in range(self.num_nodes)]
        for n, m in self.edges:
            adj[n].add(m)
            adj[m].add(n)
        return adj


def incidence_vector(n: int, m: int, num_nodes: int) -> np.ndarray:
    """``+1`` at node ``n``, ``-1`` at node ``m``."""
    if n == m:
        raise ConfigurationError("incidence vector of a self-loop")
    a = np.zeros(num_nodes)
    a[n] = 1.0
    a[m] = -1.0
    return a


def incidence_matrix(g: Graph) -> np.ndarray:
    A = np.zeros((g.num_nodes, g.num_edges))
    for k, (n, m) in enumerate(g.edges):
        A[n, k] = 1.0
        A[m, k] = -1.0
    return A


def build_graph(sc: Scenario) -> Graph:
    """Connect UE-UAV and UAV-UAV pairs whose SNR clears the threshold.

    UEs are never linked to each other and the RIS is not a node.
    """
    radio = sc.radio
    edges, tags = [], []
    for u, ue in enumerate(sc.ue_positions):
        for a, uav in enumerate(sc.uav_positions):
            if ue_uav_snr_db(ue, uav, radio) >= radio.gamma0_ue:
                edges.append((u, sc.uav_node(a)))
                tags.append(EdgeTag.DIRECT)
    for a in range(sc.num_uav):
        for b in range(a + 1, sc.num_uav):
            if uav_uav_snr_db(sc.uav_positions[a], sc.uav_positions[b], radio) >= radio.gamma0_uav:
                edges.append((sc.uav_node(a), sc.uav_node(b)))
                tags.append(EdgeTag.BACKHAUL)
    return Graph(sc.num_nodes, tuple(edges), tuple(tags))


def laplacian(g: Graph) -> np.ndarray:
    L = np.zeros((g.num_nodes, g.num_nodes))
    for n, m in g.edges:
        L[n, n] += 1.0
        L[m, m] += 1.0
        L[n, m] -= 1.0
        L[m, n] -= 1.0
    return L


@dataclass(frozen=True, eq=False)
class SpectralResult:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns aligned with eigenvalues

    @property
    def lambda2(self) -> float:
        return float(self.eigenvalues[1])

    @property
    def fiedler_vector(self) -> np.ndarray:
        return self.eigenvectors[:, 1]


def _fix_sign(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-12)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def _check_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if m.size and np.max(np.abs(m - m.T)) > SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric")
    return m


def jacobi_eigh(m: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Cyclic Jacobi eigendecomposition of a dense symmetric matrix.

    Sweeps until the off-diagonal Frobenius norm drops below
    ``tol * ||m||_F``.  Returns ``(eigenvalues, eigenvectors)`` ascending.
    """
    a = np.array(_check_symmetric(m), dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0:
        w = np.diag(a).copy()
        order = np.argsort(w, kind="stable")
        return w[order], v[:, order]

    def off_norm():
        return np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))

    for _ in range(max_sweeps):
        if off_norm() <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + math.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot_p = a[:, p].copy()
                rot_q = a[:, q].copy()
                a[:, p] = c * rot_p - s * rot_q
                a[:, q] = s * rot_p + c * rot_q
                rot_p = a[p, :].copy()
                rot_q = a[q, :].copy()
                a[p, :] = c * rot_p - s * rot_q
                a[q, :] = s * rot_p + c * rot_q
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def eig_sym(m: np.ndarray, method: str = "lapack") -> SpectralResult:
    """Full eigendecomposition of a symmetric matrix, eigenvalues ascending.

    ``method="lapack"`` uses ``numpy.linalg.eigh``; ``method="jacobi"`` the
    pure-numpy cyclic Jacobi solver.  Eigenvector signs are normalised so
    the first nonzero component is positive.
    """
    m = _check_symmetric(m)
    if method == "lapack":
        w, v = np.linalg.eigh(m)
    elif method == "jacobi":
        w, v = jacobi_eigh(m)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    v = np.column_stack([_fix_sign(v[:, i]) for i in range(v.shape[1])]) if v.size else v
    return SpectralResult(eigenvalues=w, eigenvectors=v)


@functools.lru_cache(maxsize=64)
def ones_complement_basis(n: int) -> np.ndarray:
    """Orthonormal ``n x (n-1)`` basis of the subspace orthogonal to ``1``."""
    q, _ = np.linalg.qr(np.column_stack([np.ones(n), np.eye(n)[:, : n - 1]]))
    basis = q[:, 1:]
    basis.setflags(write=False)
    return basis


def fiedler_pair(L: np.ndarray) -> tuple[float, np.ndarray]:
    """Algebraic connectivity and a unit Fiedler vector of a Laplacian-like matrix.

    The eigenproblem is solved on the complement of ``1``, so the returned
    vector is orthogonal to ``1`` even when ``lambda_2`` is repeated (e.g.
    disconnected graphs).  Values below ``CONNECTIVITY_EPS`` are clamped to 0.
    """
    n = L.shape[0]
    if n < 2:
        raise ConfigurationError("algebraic connectivity needs at least two nodes")
    q = ones_complement_basis(n)
    w, y = np.linalg.eigh(q.T @ L @ q)
    value = float(w[0])
    if value < CONNECTIVITY_EPS:
        value = 0.0
    return value, _fix_sign(q @ y[:, 0])


def lambda2(g: Graph) -> tuple[float, np.ndarray]:
    """Algebraic connectivity of ``g`` and its Fiedler vector."""
    if g.num_nodes < 2:
        raise ConfigurationError("algebraic connectivity needs at least two nodes")
    return fiedler_pair(laplacian(g))


def lambda2_value(L: np.ndarray) -> float:
    """Clamped algebraic connectivity of a Laplacian-like matrix (value only)."""
    q = ones_complement_basis(L.shape[0])
    value = float(np.linalg.eigvalsh(q.T @ L @ q)[0])
    return 0.0 if value < CONNECTIVITY_EPS else value


def is_connected(g: Graph) -> bool:
    """Breadth-first search connectivity test."""
    if g.num_nodes == 0:
        return True
    adj = g.neighbors()
    seen = {0}
    queue = deque([0])
    while queue:
        for nb in adj[queue.popleft()]:
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return len(seen) == g.num_nodes


def write_edgelist(g: Graph, path) -> None:
    """Write ``V E`` then one ``n m tag`` line per edge (1-based nodes)."""
    lines = [f"{g.num_nodes} {g.num_edges}"]
    lines += [f"{n + 1} {m + 1} {t.value}" for (n, m), t in zip(g.edges, g.tags)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_edgelist(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        rows = [ln.split() for ln in fh if ln.strip()]
    name = os.fspath(path)
    if not rows or len(rows[0]) != 2:
        raise ConfigurationError(f"{name}: first line must be 'V E'")
    try:
        num_nodes, num_edges = int(rows[0][0]), int(rows[0][1])
        edges, tags = [], []
        for row in rows[1:]:
            if len(row) != 3:
                raise ConfigurationError(f"{name}: malformed edge line {' '.join(row)!r}")
            n, m = int(row[0]) - 1, int(row[1]) - 1
            if n > m:
                n, m = m, n
            edges.append((n, m))
            tags.append(EdgeTag(row[2]))
    except ValueError as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"{name}: {exc}") from exc
    if len(edges) != num_edges:
        raise ConfigurationError(f"{name}: header declares {num_edges} edges, found {len(edges)}")
    return Graph(num_nodes, tuple(edges), tuple(tags))
