"""Directed lead-lag networks, PageRank, and cross-month persistence.

Edges run from the lagger to the leader it follows, weighted by the
absolute statistic (the sign only encodes direction of change, not
strength).  Causality networks are unweighted.  Rankings come from the
PageRank stationary distribution of the row-stochastic transition matrix
with damped uniform teleportation; dangling mass is spread uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assets import AssetId
from .corr import PairStatus, SigMatrix
from .errors import DataError, NonConvergenceError

DEFAULT_DAMPING = 0.85
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 200


@dataclass(frozen=True)
class Edge:
    src: AssetId          # lagger
    dst: AssetId          # leader
    weight: float
    sign: float


@dataclass(frozen=True)
class LeadLagNetwork:
    nodes: tuple[AssetId, ...]
    edges: tuple[Edge, ...]
    weighted: bool
    grid_label: str
    estimator: str = ""

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def weight_matrix(self) -> np.ndarray:
        """Dense (src, dst) weights; rows are laggers."""
        index = {a: i for i, a in enumerate(self.nodes)}
        w = np.zeros((self.n_nodes, self.n_nodes))
        for e in self.edges:
            w[index[e.src], index[e.dst]] = e.weight
        return w


@dataclass(frozen=True)
class Transition:
    """Row-stochastic form of a network; dangling rows marked, not filled."""

    nodes: tuple[AssetId, ...]
    matrix: np.ndarray
    dangling: np.ndarray


@dataclass(frozen=True)
class RankVector:
    nodes: tuple[AssetId, ...]
    scores: np.ndarray
    damping: float
    iterations: int
    residual: float
    grid_label: str = ""

    def by_score(self) -> list[tuple[AssetId, float]]:
        """Descending by score; ties broken by asset code."""
        order = sorted(range(len(self.nodes)),
                       key=lambda i: (-self.scores[i], self.nodes[i].code))
        return [(self.nodes[i], float(self.scores[i])) for i in order]


def build_network(sig: SigMatrix, weighted: bool = True) -> LeadLagNetwork:
    """One edge lagger -> leader per Bonferroni-passing ordered pair."""
    passing = sig.pass_bonferroni
    edges = []
    for i, j in zip(*np.nonzero(passing)):     # i leader, j lagger
        stat = float(sig.statistic[i, j])
        edges.append(Edge(
            src=sig.assets[j], dst=sig.assets[i],
            weight=abs(stat) if weighted else 1.0,
            sign=float(sig.sign[i, j]),
        ))
    return LeadLagNetwork(nodes=tuple(sig.assets), edges=tuple(edges),
                          weighted=weighted, grid_label=sig.grid_label,
                          estimator=sig.estimator)


def row_stochastic(net: LeadLagNetwork) -> Transition:
    """Normalize each node's outgoing weights to sum to one."""
    w = net.weight_matrix()
    out = w.sum(axis=1)
    dangling = out == 0.0
    matrix = np.zeros_like(w)
    rows = ~dangling
    matrix[rows] = w[rows] / out[rows, None]
    return Transition(nodes=net.nodes, matrix=matrix, dangling=dangling)


def pagerank(net: LeadLagNetwork, damping: float = DEFAULT_DAMPING,
             tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> RankVector:
    """Stationary distribution of the damped walk on the network.

    Each step follows an out-edge with probability ``damping`` and
    teleports uniformly otherwise; mass on dangling nodes is spread
    uniformly.  Converges when the L1 change drops below ``tol``.
    """
    if net.n_nodes == 0:
        raise DataError("pagerank needs a nonempty node set")
    if not 0.0 <= damping < 1.0:
        raise DataError(f"damping must be in [0, 1), got {damping}")
    trans = row_stochastic(net)
    n = net.n_nodes
    p = trans.matrix
    dangling = trans.dangling
    scores = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for iteration in range(1, max_iter + 1):
        dangling_mass = scores[dangling].sum()
        nxt = teleport + damping * (scores @ p + dangling_mass / n)
        residual = float(np.abs(nxt - scores).sum())
        scores = nxt
        if residual < tol:
            return RankVector(nodes=net.nodes, scores=scores, damping=damping,
                              iterations=iteration, residual=residual,
                              grid_label=net.grid_label)
    raise NonConvergenceError("pagerank power iteration", max_iter, residual)


@dataclass(frozen=True)
class RankingTable:
    """Cross-month aggregate of rank vectors."""

    nodes: tuple[AssetId, ...]
    mean_scores: np.ndarray
    n_months: int
    aggregate: str

    def top(self, k: int | None = None) -> list[tuple[AssetId, float]]:
        reverse = self.aggregate == "score"
        order = sorted(range(len(self.nodes)),
                       key=lambda i: (-self.mean_scores[i] if reverse
                                      else self.mean_scores[i],
                                      self.nodes[i].code))
        rows = [(self.nodes[i], float(self.mean_scores[i])) for i in order]
        return rows if k is None else rows[:k]


def aggregate_months(ranks: list[RankVector], aggregate: str = "score") -> RankingTable:
    """Average monthly rankings into one table.

    ``score`` averages PageRank scores (a node absent from a month
    contributes zero for it); ``position`` averages 1-based rank positions
    (absent months contribute the worst position, one past the field).
    """
    if not ranks:
        raise DataError("nothing to aggregate")
    if aggregate not in ("score", "position"):
        raise DataError(f"aggregate must be 'score' or 'position', got {aggregate!r}")
    all_nodes = sorted({node for rv in ranks for node in rv.nodes},
                       key=lambda a: a.code)
    index = {a: i for i, a in enumerate(all_nodes)}
    acc = np.zeros(len(all_nodes))
    for rv in ranks:
        if aggregate == "score":
            for node, score in zip(rv.nodes, rv.scores):
                acc[index[node]] += score
        else:
            worst = len(all_nodes) + 1
            month_pos = np.full(len(all_nodes), float(worst))
            for pos, (node, _) in enumerate(rv.by_score(), start=1):
                month_pos[index[node]] = pos
            acc += month_pos
    return RankingTable(nodes=tuple(all_nodes), mean_scores=acc / len(ranks),
                        n_months=len(ranks), aggregate=aggregate)


@dataclass(frozen=True)
class PersistentPair:
    leader: AssetId
    lagger: AssetId
    sign: float
    mean_statistic: float


@dataclass(frozen=True)
class PersistenceReport:
    level: float
    n_months: int
    pairs: tuple[PersistentPair, ...]
    sign_flips: tuple[tuple[AssetId, AssetId], ...] = field(default=())


def persistence(sigs: list[SigMatrix], level: float = 0.01,
                correction: str = "none") -> PersistenceReport:
    """Pairs significant in every month with a constant sign.

    ``correction="bonferroni"`` divides the level by each month's divisor;
    the default keeps the nominal level.  Pairs that clear the threshold
    everywhere but flip sign are reported separately as anomalies.
    """
    if not sigs:
        raise DataError("persistence needs at least one month")
    if correction not in ("none", "bonferroni"):
        raise DataError(f"unknown correction {correction!r}")
    assets = sigs[0].assets
    for s in sigs[1:]:
        if s.assets != assets:
            raise DataError("persistence requires the same pair universe each month")

    n = len(assets)
    all_pass = np.ones((n, n), dtype=bool)
    stat_sum = np.zeros((n, n))
    for s in sigs:
        threshold = level / s.bonferroni_divisor if correction == "bonferroni" else level
        ok = np.asarray(s.status) == PairStatus.OK
        off_diag = ~np.eye(n, dtype=bool)
        with np.errstate(invalid="ignore"):
            all_pass &= ok & off_diag & (s.p_value < threshold)
        stat_sum = stat_sum + np.where(np.isfinite(s.statistic), s.statistic, 0.0)

    signs = np.stack([s.sign for s in sigs])
    constant_sign = (signs == signs[0]).all(axis=0) & (signs[0] != 0.0)

    pairs = []
    flips = []
    for i, j in zip(*np.nonzero(all_pass)):
        if constant_sign[i, j]:
            pairs.append(PersistentPair(
                leader=assets[i], lagger=assets[j],
                sign=float(signs[0][i, j]),
                mean_statistic=float(stat_sum[i, j] / len(sigs)),
            ))
        else:
            flips.append((assets[i], assets[j]))
    pairs.sort(key=lambda pr: (pr.leader.code, pr.lagger.code))
    flips.sort(key=lambda t: (t[0].code, t[1].code))
    return PersistenceReport(level=level, n_months=len(sigs),
                             pairs=tuple(pairs), sign_flips=tuple(flips))
