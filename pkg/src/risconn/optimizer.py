"""Selection of the RIS-reflected UE-UAV link that maximises lambda_2.

Single UE: linear search over the reachable UAVs.  Several UEs: the
relaxed problem

    maximise  lambda_2(L + sum_l z_l a_l a_l^T)
    s.t.      sum(z) = 1,  0 <= z <= 1

is concave in ``z`` and is solved by projected supergradient ascent, then
rounded to its largest entry.  The equivalent LMI form
``q (I - 11^T/V) <= L'(z)`` is exposed through :func:`lmi_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from risconn.channel import PairwiseRisLinks, PhaseConfig, PhaseMode, pairwise_ris_links
from risconn.errors import ConfigurationError, DimensionError
from risconn.graph import (
    CONNECTIVITY_EPS,
    Graph,
    fiedler_pair,
    incidence_vector,
    lambda2_value,
    laplacian,
    ones_complement_basis,
)
from risconn.scenario import Scenario


class Scheme(str, Enum):
    ORIGINAL = "original"
    RANDOM = "random"
    LINEAR = "linear"
    SDP = "sdp"
    EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class SolverSettings:
    eta0: float = 1.0
    max_iter: int = 1000
    plateau_window: int = 100
    plateau_tol: float = 1e-7

    def violations(self) -> list[str]:
        out = []
        if not self.eta0 > 0:
            out.append(f"solver.eta0: must be > 0 (got {self.eta0!r})")
        if self.max_iter < 1:
            out.append(f"solver.max_iter: must be >= 1 (got {self.max_iter!r})")
        if self.plateau_window < 1:
            out.append(f"solver.plateau_window: must be >= 1 (got {self.plateau_window!r})")
        if not self.plateau_tol >= 0:
            out.append(f"solver.plateau_tol: must be >= 0 (got {self.plateau_tol!r})")
        return out


@dataclass(frozen=True, eq=False)
class CandidateEdge:
    """A UE-RIS-UAV link not present in the base graph (0-based ``ue``/``uav``)."""

    ue: int
    uav: int
    nodes: tuple[int, int]
    num_nodes: int
    ris_snr_db: float
    phases: PhaseConfig

    @property
    def incidence(self) -> np.ndarray:
        return incidence_vector(*self.nodes, self.num_nodes)


@dataclass(frozen=True, eq=False)
class AssociationVector:
    z: np.ndarray
    value: float


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    scheme: Scheme
    lambda2_before: float
    lambda2_after: float
    chosen: CandidateEdge | None = None
    relaxation_value: float | None = None
    iterations: int = 0
    association: AssociationVector | None = None

    def to_json(self) -> dict:
        """1-based ``chosen_ue`` / ``chosen_uav``; ``None`` when nothing was added."""
        return {
            "scheme": self.scheme.value,
            "chosen_ue": None if self.chosen is None else self.chosen.ue + 1,
            "chosen_uav": None if self.chosen is None else self.chosen.uav + 1,
            "lambda2_before": self.lambda2_before,
            "lambda2_after": self.lambda2_after,
            "relaxation_value": self.relaxation_value,
            "iterations": self.iterations,
        }


def enumerate_candidates(
    sc: Scenario,
    g: Graph,
    ue_filter: int | None = None,
    phase_mode: PhaseMode | str = PhaseMode.PAPER,
    links: PairwiseRisLinks | None = None,
) -> list[CandidateEdge]:
    """Reflected links meeting the RIS SNR (and optional UE-RIS distance) limits.

    Pairs already joined by a direct edge are skipped.  Output is ordered by
    ``(ue, uav)``.  ``links`` may be passed to reuse a precomputed
    :func:`pairwise_ris_links` result.
    """
    if links is None:
        links = pairwise_ris_links(sc, phase_mode)
    radio = sc.radio
    existing = set(g.edges)
    ues = range(sc.num_ue) if ue_filter is None else [ue_filter]
    out = []
    for u in ues:
        if radio.D0 is not None and links.d_ur[u] > radio.D0:
            continue
        for a in range(sc.num_uav):
            node_a = sc.uav_node(a)
            if (u, node_a) in existing:
                continue
            snr = float(links.snr_db[u, a])
            if not snr >= radio.gamma0_ris:
                continue
            out.append(
                CandidateEdge(
                    ue=u,
                    uav=a,
                    nodes=(u, node_a),
                    num_nodes=g.num_nodes,
                    ris_snr_db=snr,
                    phases=PhaseConfig(links.thetas[u, a]),
                )
            )
    return out


def _endpoints(candidates) -> tuple[np.ndarray, np.ndarray]:
    n = np.fromiter((c.nodes[0] for c in candidates), dtype=int, count=len(candidates))
    m = np.fromiter((c.nodes[1] for c in candidates), dtype=int, count=len(candidates))
    return n, m


def _with_edge(L: np.ndarray, nodes: tuple[int, int]) -> np.ndarray:
    n, m = nodes
    out = L.copy()
    out[n, n] += 1.0
    out[m, m] += 1.0
    out[n, m] -= 1.0
    out[m, n] -= 1.0
    return out


def _noop(scheme: Scheme, before: float) -> OptimizationResult:
    return OptimizationResult(scheme=scheme, lambda2_before=before, lambda2_after=before)


def case1_linear_search(sc: Scenario, g: Graph, candidates: list[CandidateEdge]) -> OptimizationResult:
    """Optimal single-UE link: try each reachable UAV in turn.

    All candidates must belong to one UE.  Ties go to the lowest UAV index.
    """
    ues = {c.ue for c in candidates}
    if len(ues) > 1:
        raise ConfigurationError(f"linear search expects one UE's candidates, got UEs {sorted(ues)}")
    L = laplacian(g)
    before = lambda2_value(L)
    if not candidates:
        return _noop(Scheme.LINEAR, before)
    best, best_value = None, -math.inf
    for cand in sorted(candidates, key=lambda c: c.uav):
        value = lambda2_value(_with_edge(L, cand.nodes))
        if value > best_value:
            best, best_value = cand, value
    return OptimizationResult(
        scheme=Scheme.LINEAR,
        lambda2_before=before,
        lambda2_after=best_value,
        chosen=best,
        iterations=len(candidates),
    )


def laplacian_of_z(L: np.ndarray, candidates, z) -> np.ndarray:
    """``L + sum_l z_l a_l a_l^T``."""
    z = np.asarray(z, dtype=float)
    if z.shape != (len(candidates),):
        raise DimensionError(f"z has shape {z.shape}, expected ({len(candidates)},)")
    out = np.array(L, dtype=float, copy=True)
    if not len(candidates):
        return out
    n, m = _endpoints(candidates)
    np.add.at(out, (n, n), z)
    np.add.at(out, (m, m), z)
    np.add.at(out, (n, m), -z)
    np.add.at(out, (m, n), -z)
    return out


def supergradient(L_of_z: np.ndarray, candidates) -> np.ndarray:
    """``(v_n - v_m)^2`` per candidate, with ``v`` the unit Fiedler vector of ``L_of_z``."""
    if not len(candidates):
        return np.zeros(0)
    _, v = fiedler_pair(L_of_z)
    n, m = _endpoints(candidates)
    return (v[n] - v[m]) ** 2


def project_simplex(y) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-and-threshold)."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise DimensionError("project_simplex expects a non-empty 1-D vector")
    return _project(y)


def _project(y: np.ndarray) -> np.ndarray:
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, y.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    tau = css[rho] / (rho + 1.0)
    return np.maximum(y - tau, 0.0)


class _DeflatedObjective:
    """lambda_2(L'(z)) and its supergradient on the complement of ``1``.

    ``L'(z)`` restricted to ``1-perp`` is ``Q^T L Q + B diag(z) B^T`` with
    ``B = Q^T [a_1 ... a_k]``, which avoids rebuilding the full matrix.
    """

    def __init__(self, L: np.ndarray, candidates):
        q = ones_complement_basis(L.shape[0])
        self.q = q
        self.base = q.T @ L @ q
        n, m = _endpoints(candidates)
        self.b = q[n].T - q[m].T  # (V-1, k)

    def __call__(self, z: np.ndarray) -> tuple[float, np.ndarray]:
        w, y = np.linalg.eigh(self.base + (self.b * z) @ self.b.T)
        value = float(w[0])
        grad = (self.b.T @ y[:, 0]) ** 2
        return (0.0 if value < CONNECTIVITY_EPS else value), grad


def solve_relaxation(
    L: np.ndarray,
    candidates,
    settings: SolverSettings = SolverSettings(),
    trace: list | None = None,
) -> tuple[AssociationVector, int]:
    """Projected supergradient ascent on the relaxed association problem.

    Starts from the uniform vector, steps with ``eta0 / sqrt(t + 1)`` and
    returns the best iterate seen together with the number of iterations
    run.  Stops after ``max_iter`` steps or once the best value has gained
    less than ``plateau_tol`` over ``plateau_window`` iterations.  When
    ``trace`` is a list, every iterate ``(z, value)`` is appended to it.
    """
    k = len(candidates)
    if k == 0:
        raise ConfigurationError("relaxation needs at least one candidate")
    objective = _DeflatedObjective(L, candidates)
    z = np.full(k, 1.0 / k)
    best_z, best_value = z, -math.inf
    history = []
    t = 0
    while t < settings.max_iter:
        value, grad = objective(z)
        if trace is not None:
            trace.append((z, value))
        if value > best_value:
            best_z, best_value = z, value
        history.append(best_value)
        t += 1
        if k == 1:
            break
        w = settings.plateau_window
        if len(history) > w and history[-1] - history[-1 - w] < settings.plateau_tol:
            break
        step = grad - grad.sum() / k
        norm = math.sqrt(float(step @ step))
        if norm == 0.0:
            break
        z = _project(z + (settings.eta0 / (math.sqrt(t) * norm)) * step)
    return AssociationVector(z=best_z, value=best_value), t


def lmi_check(q: float, L_of_z: np.ndarray) -> bool:
    """Whether ``q (I - 11^T/V) <= L_of_z`` in the semidefinite order."""
    n = L_of_z.shape[0]
    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    return bool(np.linalg.eigvalsh(L_of_z - q * centering)[0] >= -CONNECTIVITY_EPS)


def round_z(z) -> int:
    """Index of the largest entry (first one on ties)."""
    z = z.z if isinstance(z, AssociationVector) else np.asarray(z)
    return int(np.argmax(z))


def sdp_relaxation_scheme(
    L: np.ndarray, candidates, settings: SolverSettings = SolverSettings()
) -> OptimizationResult:
    """Relax, solve, round to one link and report the rounded graph's lambda_2."""
    before = lambda2_value(L)
    if not candidates:
        return _noop(Scheme.SDP, before)
    assoc, iters = solve_relaxation(L, candidates, settings)
    chosen = candidates[round_z(assoc)]
    return OptimizationResult(
        scheme=Scheme.SDP,
        lambda2_before=before,
        lambda2_after=lambda2_value(_with_edge(L, chosen.nodes)),
        chosen=chosen,
        relaxation_value=assoc.value,
        iterations=iters,
        association=assoc,
    )


def exhaustive_oracle(L: np.ndarray, candidates) -> OptimizationResult:
    """Evaluate every candidate; keep the best (lowest index on ties)."""
    before = lambda2_value(L)
    if not candidates:
        return _noop(Scheme.EXHAUSTIVE, before)
    values = [lambda2_value(_with_edge(L, c.nodes)) for c in candidates]
    best = int(np.argmax(values))
    return OptimizationResult(
        scheme=Scheme.EXHAUSTIVE,
        lambda2_before=before,
        lambda2_after=values[best],
        chosen=candidates[best],
        iterations=len(candidates),
    )


def random_scheme(L: np.ndarray, candidates, seed: int) -> OptimizationResult:
    """Uniformly random candidate drawn with a seeded PCG64 generator."""
    before = lambda2_value(L)
    if not candidates:
        return _noop(Scheme.RANDOM, before)
    idx = int(np.random.Generator(np.random.PCG64(seed)).integers(len(candidates)))
    chosen = candidates[idx]
    return OptimizationResult(
        scheme=Scheme.RANDOM,
        lambda2_before=before,
        lambda2_after=lambda2_value(_with_edge(L, chosen.nodes)),
        chosen=chosen,
        iterations=1,
    )


def original_scheme(L: np.ndarray) -> OptimizationResult:
    return _noop(Scheme.ORIGINAL, lambda2_value(L))
