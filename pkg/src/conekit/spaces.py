"""Finite metric-space samples of the warped cone and its collapse.

Spaces are sampled as (radius, unit quaternion) pairs, connected by a
proximity graph, weighted with first-order Riemannian edge lengths, and
completed to metric spaces by all-pairs shortest paths.  Distances are
graph geodesics, so symmetry and the triangle inequality hold by
construction; the quaternion-group quotient is realized by minimizing
edge lengths over the 8 lifts of each endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .profiles import ProfilePair, cone_profile
from .quaternions import BASIS, Q8, canonical_q8, qconj, qlog_vec, qmul, random_unit

__all__ = [
    "QuotientPoint",
    "SampledSpace",
    "Correspondence",
    "quotient_dist_round",
    "edge_length",
    "sample_annulus",
    "sample_sphere",
    "space_from_points",
    "from_distance_matrix",
    "diameter",
    "gh_upper_bound",
    "CollapseRow",
    "CollapseResult",
    "collapse_experiment",
]

_MIN_SAMPLE = 50


@dataclass(frozen=True)
class QuotientPoint:
    """A point of the cone over the quotient sphere, as (radius, orbit rep).

    The quaternion is stored as the canonical (lexicographically maximal)
    element of its group orbit, making equality of quotient points
    decidable by component comparison.
    """

    r: float
    q: tuple[float, float, float, float]

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError("radius must be positive")
        qa = np.asarray(self.q, dtype=float)
        if abs(np.linalg.norm(qa) - 1.0) > 1e-12:
            raise ValueError("quaternion must be unit length")
        object.__setattr__(self, "q", tuple(canonical_q8(qa)))


def quotient_dist_round(q1, q2) -> float:
    """Round distance on the quotient sphere: min over lifts of the angle.

    Computes ``min_g arccos(<g*q1, q2>)`` over the 8 group elements; this
    is the geodesic distance on the unit round quotient, and the exact
    limit metric of the fiber spheres up to the global scale factor.
    """
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    dots = np.einsum("gk,k->g", qmul(Q8, q1), q2)
    return float(np.arccos(np.clip(np.max(dots), -1.0, 1.0)))


@dataclass
class SampledSpace:
    """A finite metric space with its sampling provenance.

    ``dist`` is a full symmetric matrix of graph-geodesic distances.
    ``quats`` is None for spaces built from a bare distance matrix (the
    points are then opaque labels).
    """

    radii: np.ndarray | None
    quats: np.ndarray | None
    dist: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @property
    def points(self) -> list:
        if self.quats is None:
            return list(range(self.n))
        if self.provenance.get("group") == "trivial":
            return [(float(r), tuple(q)) for r, q in zip(self.radii, self.quats)]
        return [QuotientPoint(float(r), tuple(q))
                for r, q in zip(self.radii, self.quats)]

    def diameter(self) -> float:
        return diameter(self)

    def metric_axioms_report(self, n_pivots: int = 128) -> dict:
        """Symmetry / identity / triangle diagnostics.

        Triangle inequality is checked through every pivot when the space
        is small and through a deterministic pivot subset otherwise; the
        reported violation is the worst ``d(i,j) - d(i,k) - d(k,j)`` seen.
        """
        d = self.dist
        n = self.n
        sym = bool(np.array_equal(d, d.T))
        diag = bool(np.all(np.diag(d) == 0.0))
        pivots = range(n) if n <= 800 else np.unique(
            np.linspace(0, n - 1, n_pivots).astype(int))
        worst = 0.0
        for k in pivots:
            slack = d - (d[:, k][:, None] + d[k, :][None, :])
            worst = max(worst, float(slack.max()))
        return {"symmetric": sym, "diag_zero": diag,
                "triangle_violation": worst,
                "ok": sym and diag and worst <= 1e-12 * max(1.0, float(d.max()))}

    def save_npz(self, path: str) -> None:
        """Compact binary cache (condensed upper-triangle distances)."""
        iu = np.triu_indices(self.n, k=1)
        np.savez_compressed(
            path, n=self.n, condensed=self.dist[iu],
            radii=self.radii if self.radii is not None else np.array([]),
            quats=self.quats if self.quats is not None else np.array([]),
            provenance=np.array(repr(self.provenance)))

    @classmethod
    def load_npz(cls, path: str) -> "SampledSpace":
        data = np.load(path, allow_pickle=False)
        n = int(data["n"])
        dist = np.zeros((n, n))
        iu = np.triu_indices(n, k=1)
        dist[iu] = data["condensed"]
        dist += dist.T
        radii = data["radii"] if data["radii"].size else None
        quats = data["quats"] if data["quats"].size else None
        return cls(radii=radii, quats=quats, dist=dist,
                   provenance={"loaded_from": path})

    def to_csv(self, points_path: str, dist_path: str) -> None:
        """Point table plus condensed distance matrix as two CSV files."""
        with open(points_path, "w") as fh:
            fh.write("index,r,qw,qx,qy,qz\n")
            for i in range(self.n):
                if self.quats is None:
                    fh.write(f"{i},,,,,\n")
                else:
                    fields = [float(self.radii[i])] + [float(c) for c in self.quats[i]]
                    fh.write(",".join([str(i)] + [repr(v) for v in fields]) + "\n")
        iu = np.triu_indices(self.n, k=1)
        with open(dist_path, "w") as fh:
            fh.write("i,j,dist\n")
            for i, j, v in zip(iu[0], iu[1], self.dist[iu]):
                fh.write(f"{i},{j},{float(v)!r}\n")


def from_distance_matrix(dist, provenance=None) -> SampledSpace:
    """Wrap an explicit symmetric distance matrix (points become labels)."""
    d = np.asarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distance matrix must be square")
    if not np.array_equal(d, d.T) or np.any(np.diag(d) != 0.0):
        raise ValueError("distance matrix must be symmetric with zero diagonal")
    return SampledSpace(radii=None, quats=None, dist=d,
                        provenance=provenance or {"kind": "explicit"})


# ---------------------------------------------------------------------------
# sampling and graph construction
# ---------------------------------------------------------------------------

def _orbit_cos_block(qa: np.ndarray, qb: np.ndarray, group: str) -> np.ndarray:
    """max over lifts of <g*qa_i, qb_j>, shape (len(qa), len(qb))."""
    if group == "trivial":
        return qa @ qb.T
    best = np.abs(qmul(BASIS[0], qa) @ qb.T)
    for g in BASIS[1:]:
        np.maximum(best, np.abs(qmul(g, qa) @ qb.T), out=best)
    return best


def _proximity(radii, quats, group, block=512) -> np.ndarray:
    """Coordinate proximity sqrt(dr^2 + (rbar * angle)^2) used to pick neighbors.

    Deliberately metric-independent: paired samples over the same point set
    get identical graphs regardless of which warped metric weights the
    edges.
    """
    n = len(radii)
    out = np.empty((n, n))
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        cosang = np.clip(_orbit_cos_block(quats[lo:hi], quats, group), -1.0, 1.0)
        ang = np.arccos(cosang)
        dr = radii[lo:hi, None] - radii[None, :]
        rbar = 0.5 * (radii[lo:hi, None] + radii[None, :])
        out[lo:hi] = np.hypot(dr, rbar * ang)
    return out


def _edge_weights(profile, radii, quats, edges, group) -> np.ndarray:
    """First-order Riemannian lengths of the given point pairs.

    The chord between endpoint fibers is read off from the quaternion
    logarithm of ``qa^-1 (g qb)``: its (i, j, k) components are the
    left-invariant coframe values.  The squared length is
    ``dr^2 + rho^2 (phi^2 a1^2 + a2^2 + a3^2)`` at midpoint profile values,
    minimized over the 8 lifts g of the far endpoint.
    """
    qa = quats[edges[:, 0]]
    qb = quats[edges[:, 1]]
    dr = radii[edges[:, 1]] - radii[edges[:, 0]]
    mid = 0.5 * (radii[edges[:, 0]] + radii[edges[:, 1]])
    rho = np.asarray(profile.rho(mid), dtype=float)
    phi = np.asarray(profile.phi(mid), dtype=float)

    lifts = Q8 if group == "q8" else BASIS[:1]
    rel = qmul(qconj(qa)[:, None, :], qmul(lifts, qb[:, None, :]))
    a = qlog_vec(rel)  # (E, lifts, 3)
    ang2 = (phi[:, None]**2 * a[..., 0]**2 + a[..., 1]**2 + a[..., 2]**2)
    best = np.min(dr[:, None]**2 + rho[:, None]**2 * ang2, axis=1)
    return np.sqrt(best)


def edge_length(profile: ProfilePair, r_a: float, q_a, r_b: float, q_b,
                group: str = "q8") -> float:
    """First-order length of the direct edge between two sample points."""
    radii = np.array([r_a, r_b], dtype=float)
    quats = np.stack([np.asarray(q_a, dtype=float), np.asarray(q_b, dtype=float)])
    w = _edge_weights(profile, radii, quats, np.array([[0, 1]]), group)
    return float(w[0])


def _default_k(n: int) -> int:
    # dense enough that graph-geodesic stretch stays in the low percents
    return max(10, int(np.ceil(3.5 * n ** 0.25)))


def space_from_points(profile: ProfilePair, radii, quats, *, group="q8",
                      k=None, radius=None, provenance=None) -> SampledSpace:
    """Build the graph-geodesic metric space on an explicit point set.

    Neighbors come from coordinate proximity: the k nearest per point
    (grown until the graph connects), or everything within ``radius`` when
    given -- radius graphs are edge-monotone under point insertion, which
    the refinement tests rely on.
    """
    radii = np.asarray(radii, dtype=float)
    quats = np.asarray(quats, dtype=float)
    n = len(radii)
    if n < 2:
        raise ValueError("need at least two points")
    prox = _proximity(radii, quats, group)
    np.fill_diagonal(prox, np.inf)

    if radius is not None:
        ii, jj = np.nonzero(prox <= radius)
        keep = ii < jj
        edges = np.stack([ii[keep], jj[keep]], axis=1)
        if edges.size == 0:
            raise ValueError("radius graph has no edges; increase radius")
    else:
        k = k or _default_k(n)
        while True:
            kk = min(k, n - 1)
            nbr = np.argpartition(prox, kk - 1, axis=1)[:, :kk]
            ii = np.repeat(np.arange(n), kk)
            jj = nbr.ravel()
            a = np.minimum(ii, jj)
            b = np.maximum(ii, jj)
            edges = np.unique(np.stack([a, b], axis=1), axis=0)
            adj = csr_matrix((np.ones(len(edges)), (edges[:, 0], edges[:, 1])),
                             shape=(n, n))
            ncomp, _ = connected_components(adj, directed=False)
            if ncomp == 1 or kk == n - 1:
                if ncomp > 1:
                    raise ValueError("proximity graph disconnected at k = n-1")
                break
            k = int(np.ceil(k * 1.5)) + 1

    w = _edge_weights(profile, radii, quats, edges, group)
    graph = csr_matrix(
        (np.concatenate([w, w]),
         (np.concatenate([edges[:, 0], edges[:, 1]]),
          np.concatenate([edges[:, 1], edges[:, 0]]))),
        shape=(n, n))
    dist = shortest_path(graph, method="D", directed=False)
    dist = np.minimum(dist, dist.T)  # exact symmetry
    np.fill_diagonal(dist, 0.0)
    if np.any(np.isinf(dist)):
        raise ValueError("graph disconnected after weighting")
    prov = dict(provenance or {})
    prov.setdefault("group", group)
    prov.setdefault("n", n)
    prov.setdefault("edges", int(len(edges)))
    return SampledSpace(radii=radii, quats=quats, dist=dist, provenance=prov)


def _draw_points(rng, n, r_in, r_out, group, include_quats=None):
    extra = 0 if include_quats is None else len(include_quats)
    m = n - extra
    # stratified radii: one draw per bin of a uniform partition
    u = (np.arange(m) + rng.uniform(size=m)) / m
    radii = r_in + (r_out - r_in) * u
    quats = random_unit(rng, m)
    if extra:
        radii = np.concatenate([np.full(extra, 0.5 * (r_in + r_out)), radii])
        quats = np.concatenate([np.asarray(include_quats, dtype=float), quats])
    if group == "q8":
        quats = canonical_q8(quats)
    return radii, quats


def sample_annulus(profile: ProfilePair, r_in: float, r_out: float, n: int,
                   seed: int, *, k=None, group="q8",
                   include_quats=None) -> SampledSpace:
    """Quasi-uniform sample of the annulus r_in < r < r_out under the profile metric.

    Radii are stratified over the annulus, fibers drawn uniformly on the
    (quotient) sphere; distances are all-pairs shortest paths over the
    proximity graph with first-order Riemannian edge lengths.
    """
    if not 0 < r_in < r_out:
        raise ValueError("need 0 < r_in < r_out")
    if n < _MIN_SAMPLE:
        raise ValueError(f"need at least {_MIN_SAMPLE} sample points, got {n}")
    rng = np.random.default_rng(seed)
    radii, quats = _draw_points(rng, n, r_in, r_out, group, include_quats)
    return space_from_points(
        profile, radii, quats, group=group, k=k,
        provenance={"kind": "annulus", "r_in": r_in, "r_out": r_out,
                    "n": n, "seed": seed, "group": group})


def sample_sphere(profile: ProfilePair, r: float, n: int, seed: int, *,
                  k=None, group="q8", include_quats=None) -> SampledSpace:
    """Fixed-radius sample: the orbit sphere at radius r with its induced metric."""
    if r <= 0:
        raise ValueError("radius must be positive")
    if n < _MIN_SAMPLE:
        raise ValueError(f"need at least {_MIN_SAMPLE} sample points, got {n}")
    rng = np.random.default_rng(seed)
    _, quats = _draw_points(rng, n, r, r, group, include_quats)
    radii = np.full(n, float(r))
    return space_from_points(
        profile, radii, quats, group=group, k=k,
        provenance={"kind": "sphere", "r": r, "n": n, "seed": seed,
                    "group": group})


def diameter(space: SampledSpace) -> float:
    """Largest pairwise distance of the sample."""
    if space.n == 0:
        raise ValueError("empty space has no diameter")
    if space.n == 1:
        return 0.0
    d = float(space.dist.max())
    if not np.isfinite(d):
        raise ValueError("space is disconnected")
    return d


# ---------------------------------------------------------------------------
# Gromov-Hausdorff upper bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Correspondence:
    """A relation between two index sets covering both sides."""

    pairs: np.ndarray

    @classmethod
    def identity(cls, n: int) -> "Correspondence":
        idx = np.arange(n)
        return cls(pairs=np.stack([idx, idx], axis=1))

    @classmethod
    def coordinate_matching(cls, s1: SampledSpace, s2: SampledSpace) -> "Correspondence":
        """Match points by (r, orbit) coordinates, nearest-neighbor completed."""
        if s1.quats is None or s2.quats is None:
            raise ValueError("coordinate matching needs coordinate samples")
        group = s1.provenance.get("group", "q8")
        prox = _proximity_cross(s1, s2, group)
        fwd = np.stack([np.arange(s1.n), prox.argmin(axis=1)], axis=1)
        bwd = np.stack([prox.argmin(axis=0), np.arange(s2.n)], axis=1)
        return cls(pairs=np.unique(np.concatenate([fwd, bwd]), axis=0))

    def covers(self, n1: int, n2: int) -> bool:
        return (len(np.unique(self.pairs[:, 0])) == n1
                and len(np.unique(self.pairs[:, 1])) == n2)


def _proximity_cross(s1, s2, group):
    cosang = np.clip(_orbit_cos_block(s1.quats, s2.quats, group), -1.0, 1.0)
    ang = np.arccos(cosang)
    dr = s1.radii[:, None] - s2.radii[None, :]
    rbar = 0.5 * (s1.radii[:, None] + s2.radii[None, :])
    return np.hypot(dr, rbar * ang)


def gh_upper_bound(s1: SampledSpace, s2: SampledSpace,
                   corr: Correspondence) -> float:
    """Half the distortion of the correspondence: a Gromov-Hausdorff upper bound.

    Raises if the correspondence fails to cover both point sets (the bound
    is only valid for covering relations).
    """
    if not corr.covers(s1.n, s2.n):
        raise ValueError("correspondence does not cover both spaces")
    p = corr.pairs
    worst = 0.0
    block = 2048
    for lo in range(0, len(p), block):
        hi = min(lo + block, len(p))
        a = s1.dist[np.ix_(p[lo:hi, 0], p[:, 0])]
        b = s2.dist[np.ix_(p[lo:hi, 1], p[:, 1])]
        worst = max(worst, float(np.abs(a - b).max()))
    return 0.5 * worst


# ---------------------------------------------------------------------------
# the collapse experiment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CollapseRow:
    eps: float
    gh_bound: float
    diameter: float


@dataclass(frozen=True)
class CollapseResult:
    rows: tuple[CollapseRow, ...]
    seed: int
    n: int
    r_inner: float
    r_outer: float
    neck_slope: float

    def gh_violations(self) -> int:
        """Number of increases along the gh_bound column."""
        gh = [row.gh_bound for row in self.rows]
        return sum(1 for a, b in zip(gh, gh[1:]) if b > a)

    def diameter_ratio(self) -> float:
        ds = [row.diameter for row in self.rows]
        return max(ds) / min(ds)


def collapse_experiment(profile: ProfilePair, eps_list=(1.0, 0.5, 0.25, 0.125),
                        n: int = 800, seed: int = 0, *, r_inner: float = 1.0,
                        r_outer: float = 8.0, k=None) -> CollapseResult:
    """Exhibit the collapse of the rescaled metrics onto the exact cone.

    For each scale eps the metric ``eps^2 g`` is realized by the rescaled
    profile on the outer annulus [eps*r_inner, r_outer] (entirely inside
    the exactly-conical tail for the default parameters) and sampled over
    a point set shared with a sample of the exact cone over the round
    quotient link at slope ``profile.neck_slope``.  The identity
    correspondence on the shared points yields the GH upper bound; because
    the two spaces also share the proximity graph, graph noise largely
    cancels and the bound tracks the genuine metric discrepancy, which
    shrinks linearly in eps.
    """
    eps_arr = [float(e) for e in eps_list]
    if not eps_arr:
        raise ValueError("eps_list must be nonempty")
    if any(not 0 < e <= 1 for e in eps_arr):
        raise ValueError("eps values must lie in (0, 1]")
    if any(b >= a for a, b in zip(eps_arr, eps_arr[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    if profile.neck_slope is None:
        raise ValueError("profile needs a neck_slope for the cone comparison")
    if n < _MIN_SAMPLE:
        raise ValueError(f"need at least {_MIN_SAMPLE} sample points, got {n}")

    cone = cone_profile(profile.neck_slope)
    rows = []
    for idx, eps in enumerate(eps_arr):
        rng = np.random.default_rng([seed, idx])
        radii, quats = _draw_points(rng, n, eps * r_inner, r_outer, "q8")
        smooth_space = space_from_points(
            profile.rescale(eps), radii, quats, group="q8", k=k,
            provenance={"kind": "collapse-smooth", "eps": eps, "seed": seed})
        cone_space = space_from_points(
            cone, radii, quats, group="q8", k=k,
            provenance={"kind": "collapse-cone", "eps": eps, "seed": seed})
        gh = gh_upper_bound(smooth_space, cone_space,
                            Correspondence.identity(n))
        rows.append(CollapseRow(eps=eps, gh_bound=gh,
                                diameter=smooth_space.diameter()))
    return CollapseResult(rows=tuple(rows), seed=seed, n=n, r_inner=r_inner,
                          r_outer=r_outer, neck_slope=profile.neck_slope)
