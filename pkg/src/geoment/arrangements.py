"""Point arrangements on the unit sphere and their optimization.

Three classic objectives are supported: minimal electrostatic energy
(Thomson), maximal minimum pairwise distance (Tammes), and minimal covering
radius.  Arrangements can also be imported from a simple text format for
sizes beyond what desk-scale optimization reaches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize
from scipy.spatial.distance import cdist, pdist

from .errors import DegenerateArrangementError, ParseError
from .states import BlochPoint, MajoranaSet, align_point_sets

KINDS = ("coulomb", "tammes", "covering", "imported")

# Default multistart budgets; global optimality is not claimed, and above
# n = 12 the landscape needs considerably more restarts.
def default_restarts(n: int) -> int:
    return 32 if n <= 12 else 128


@dataclass(frozen=True, eq=False)
class Arrangement:
    """N unit vectors on the sphere, tagged with the objective that made them."""

    vectors: np.ndarray
    kind: str = "imported"

    def __post_init__(self):
        vecs = np.array(self.vectors, dtype=float)
        if vecs.ndim != 2 or vecs.shape[1] != 3 or vecs.shape[0] < 1:
            raise ValueError("vectors must be an (N, 3) array with N >= 1")
        norms = np.linalg.norm(vecs, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-6):
            raise ValueError("vectors must have unit norm within 1e-6")
        vecs /= norms[:, None]
        vecs.setflags(write=False)
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        object.__setattr__(self, "vectors", vecs)

    @property
    def n_points(self) -> int:
        return self.vectors.shape[0]

    def to_text(self, header: bool = True) -> str:
        lines = [str(self.n_points)] if header else []
        lines += [" ".join(f"{x:.17g}" for x in row) for row in self.vectors]
        return "\n".join(lines) + "\n"


def coulomb_energy(a: Arrangement) -> float:
    """Total inverse-distance energy over all pairs."""
    if a.n_points < 2:
        return 0.0
    d = pdist(a.vectors)
    if np.min(d) <= 1e-9:
        raise DegenerateArrangementError("coincident points give infinite energy")
    return float(np.sum(1.0 / d))


def tammes_objective(a: Arrangement) -> float:
    """Minimal pairwise distance (to be maximized)."""
    if a.n_points < 2:
        return 2.0
    return float(np.min(pdist(a.vectors)))


@lru_cache(maxsize=8)
def _icosphere(level: int) -> np.ndarray:
    """Vertices of a geodesic icosphere after `level` subdivision rounds."""
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    for _ in range(level):
        midpoint: dict[tuple[int, int], int] = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                midpoint[key] = len(verts) - 1
            return midpoint[key]

        new_faces = []
        for i, j, k in faces:
            ij, jk, ki = mid(i, j), mid(j, k), mid(k, i)
            new_faces += [(i, ij, ki), (j, jk, ij), (k, ki, jk), (ij, jk, ki)]
        faces = new_faces
    out = np.array(verts)
    out.setflags(write=False)
    return out


def _triple_circumcenters(vecs: np.ndarray, triples) -> list[np.ndarray]:
    centers = []
    for i, j, k in triples:
        normal = np.cross(vecs[j] - vecs[i], vecs[k] - vecs[i])
        norm = np.linalg.norm(normal)
        if norm < 1e-12:
            continue
        normal /= norm
        centers.append(normal)
        centers.append(-normal)
    return centers


def _far_point_candidates(vecs: np.ndarray, mesh: np.ndarray) -> np.ndarray:
    """Candidate locations for the point farthest from an arrangement.

    Local maxima of the distance-to-nearest-point field sit at Voronoi
    vertices (circumcenters of point triples), on pair bisectors, or at an
    antipode, so mesh maxima are snapped onto those exact loci.
    """
    n = len(vecs)
    cands = [-v for v in vecs]
    for i, j in combinations(range(n), 2):
        s = vecs[i] + vecs[j]
        norm = np.linalg.norm(s)
        if norm > 1e-9:
            cands.append(-s / norm)
        else:
            # Antipodal pair: every point of the bisector plane ties, any
            # representative will do.
            cands.append(_unit_orthogonal(vecs[i]))

    if n >= 3:
        if n <= 14:
            triples = combinations(range(n), 3)
            cands += _triple_circumcenters(vecs, triples)
        else:
            # Seed from the mesh's far-field maxima and snap to circumcenters
            # of their nearest triples.
            d = cdist(mesh, vecs).min(axis=1)
            seeds = np.argsort(d)[::-1][: 3 * n + 16]
            near = np.argsort(cdist(mesh[seeds], vecs), axis=1)[:, :6]
            triple_set = set()
            for row in near:
                triple_set.update(combinations(sorted(map(int, row[:6])), 3))
            cands += _triple_circumcenters(vecs, triple_set)
    return np.array(cands)


def _unit_orthogonal(v: np.ndarray) -> np.ndarray:
    pick = np.eye(3)[int(np.argmin(np.abs(v)))]
    w = np.cross(v, pick)
    return w / np.linalg.norm(w)


def covering_objective(a: Arrangement, mesh_level: int = 5) -> float:
    """Greatest distance from any sphere point to its nearest arrangement point.

    A geodesic mesh locates the far region; candidates are then snapped to
    the exact Voronoi-vertex loci, so the returned value is mesh-converged.
    """
    vecs = a.vectors
    if a.n_points == 1:
        return 2.0
    mesh = _icosphere(mesh_level)
    best = float(cdist(mesh, vecs).min(axis=1).max())
    cands = _far_point_candidates(vecs, mesh)
    if len(cands):
        best = max(best, float(cdist(cands, vecs).min(axis=1).max()))
    return best


def arrangement_to_majorana(a: Arrangement) -> MajoranaSet:
    """Interpret the arrangement's points as a symmetric state's sphere points."""
    points = []
    for x, y, z in a.vectors:
        theta = math.acos(min(1.0, max(-1.0, z)))
        phi = math.atan2(y, x) % (2.0 * math.pi)
        points.append(BlochPoint(theta, phi))
    return MajoranaSet(tuple(points))


def import_arrangement(source: str, expect_header: bool = True) -> Arrangement:
    """Parse the text format: optional count line, then `x y z` per line.

    Comments start with '#'.  Vectors must be unit within 1e-6 and are
    re-normalized; malformed content raises :class:`ParseError` with the
    offending line number.
    """
    declared: int | None = None
    rows: list[np.ndarray] = []
    last_line = 0
    for lineno, raw in enumerate(source.splitlines(), start=1):
        last_line = lineno
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if declared is None and expect_header:
            if len(parts) != 1:
                raise ParseError("expected the point count on the first line", line=lineno)
            try:
                declared = int(parts[0])
            except ValueError:
                raise ParseError(f"invalid point count {parts[0]!r}", line=lineno) from None
            if declared < 1:
                raise ParseError("point count must be positive", line=lineno)
            continue
        if declared is not None and len(rows) == declared:
            raise ParseError(
                f"expected {declared} points but found more data", line=lineno
            )
        if len(parts) != 3:
            raise ParseError(f"expected three coordinates, got {raw!r}", line=lineno)
        try:
            vec = np.array([float(p) for p in parts])
        except ValueError:
            raise ParseError(f"non-numeric coordinates in {raw!r}", line=lineno) from None
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > 1e-6:
            raise ParseError(f"vector norm {norm:.8g} deviates from 1 beyond 1e-6", line=lineno)
        rows.append(vec / norm)
    if expect_header and declared is None:
        raise ParseError("missing point count header", line=max(last_line, 1))
    if declared is not None and len(rows) != declared:
        raise ParseError(
            f"expected {declared} points but found {len(rows)}", line=last_line + 1
        )
    if not rows:
        raise ParseError("no points found", line=max(last_line, 1))
    return Arrangement(np.array(rows), kind="imported")


def arrangements_match(a: Arrangement, b: Arrangement, tol: float = 1e-6,
                       allow_reflection: bool = True) -> bool:
    """Equality up to rigid rotation (and optionally reflection)."""
    if a.n_points != b.n_points:
        return False
    _, residual = align_point_sets(a.vectors, b.vectors, allow_reflection=allow_reflection)
    return residual <= tol


# ---------------------------------------------------------------------------
# Optimization


def _random_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.uniform(-1.0, 1.0, size=n)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=n)
    s = np.sqrt(1.0 - z * z)
    return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])


def _project_rows(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=1)[:, None]


def _coulomb_value_grad(flat: np.ndarray, n: int):
    x = flat.reshape(n, 3)
    norms = np.linalg.norm(x, axis=1)
    v = x / norms[:, None]
    diff = v[:, None, :] - v[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=2))
    np.fill_diagonal(d, np.inf)
    inv = 1.0 / d
    energy = 0.5 * float(np.sum(inv))
    g_v = -np.sum(inv[:, :, None] ** 3 * diff, axis=1)
    # Chain rule through the row normalization.
    g_x = (g_v - np.sum(g_v * v, axis=1)[:, None] * v) / norms[:, None]
    return energy, g_x.ravel()


def _optimize_coulomb(start: np.ndarray) -> np.ndarray:
    n = start.shape[0]
    res = minimize(
        _coulomb_value_grad,
        start.ravel(),
        args=(n,),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 1000, "ftol": 1e-16, "gtol": 1e-12},
    )
    return _project_rows(res.x.reshape(n, 3))


def _softmin_value_grad(flat: np.ndarray, n: int, tau: float):
    """Smoothed negative minimum pairwise distance (to be minimized)."""
    x = flat.reshape(n, 3)
    norms = np.linalg.norm(x, axis=1)
    v = x / norms[:, None]
    diff = v[:, None, :] - v[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=2))
    iu = np.triu_indices(n, k=1)
    dists = d[iu]
    dmin = np.min(dists)
    w = np.exp(-(dists - dmin) / tau)
    wsum = np.sum(w)
    softmin = dmin - tau * math.log(wsum)
    w /= wsum
    g_v = np.zeros_like(v)
    unit = diff / np.where(d[:, :, None] > 0, d[:, :, None], 1.0)
    for (i, j), wij in zip(zip(*iu), w):
        g_v[i] += wij * unit[i, j]
        g_v[j] -= wij * unit[i, j]
    g_x = (g_v - np.sum(g_v * v, axis=1)[:, None] * v) / norms[:, None]
    return -softmin, -g_x.ravel()


def _polish_tammes(points: np.ndarray) -> np.ndarray:
    """Exact-objective polish: maximize the smallest squared pair distance."""
    n = points.shape[0]
    pairs = list(combinations(range(n), 2))

    def pair_gaps(z):
        x = z[:-1].reshape(n, 3)
        s = z[-1]
        return np.array([np.sum((x[i] - x[j]) ** 2) - s for i, j in pairs])

    def norm_residual(z):
        x = z[:-1].reshape(n, 3)
        return np.sum(x * x, axis=1) - 1.0

    d0 = pdist(points)
    z0 = np.append(points.ravel(), np.min(d0) ** 2 * 0.999)
    res = minimize(
        lambda z: -z[-1],
        z0,
        jac=lambda z: np.append(np.zeros(z.size - 1), -1.0),
        method="SLSQP",
        constraints=[
            {"type": "ineq", "fun": pair_gaps},
            {"type": "eq", "fun": norm_residual},
        ],
        options={"ftol": 1e-14, "maxiter": 300},
    )
    if res.x[-1] > 0:
        return _project_rows(res.x[:-1].reshape(n, 3))
    return points


def _optimize_tammes(start: np.ndarray, polish: bool) -> np.ndarray:
    n = start.shape[0]
    x = start
    scale = 3.8 / math.sqrt(n)
    for tau in (0.3 * scale, 0.1 * scale, 0.03 * scale, 0.01 * scale):
        res = minimize(
            _softmin_value_grad,
            x.ravel(),
            args=(n, tau),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": 400, "ftol": 1e-14, "gtol": 1e-10},
        )
        x = _project_rows(res.x.reshape(n, 3))
    if polish:
        x = _polish_tammes(x)
    return x


def _soft_covering_value_grad(flat: np.ndarray, n: int, mesh: np.ndarray, tau: float):
    """Smoothed covering radius over a fixed probe mesh (to be minimized)."""
    x = flat.reshape(n, 3)
    norms = np.linalg.norm(x, axis=1)
    v = x / norms[:, None]
    diff = mesh[:, None, :] - v[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=2))  # (M, n)
    dmin = d.min(axis=1)
    w_in = np.exp(-(d - dmin[:, None]) / tau)
    w_in_sum = w_in.sum(axis=1)
    soft_min = dmin - tau * np.log(w_in_sum)  # softmin over points, per probe
    m_max = soft_min.max()
    w_out = np.exp((soft_min - m_max) / tau)
    w_out_sum = w_out.sum()
    value = m_max + tau * math.log(w_out_sum)
    # d soft / d v_j: outer weights times inner weights times unit vectors.
    w = (w_out / w_out_sum)[:, None] * (w_in / w_in_sum[:, None])  # (M, n)
    unit = diff / np.where(d[:, :, None] > 0, d[:, :, None], 1.0)
    g_v = -np.sum(w[:, :, None] * unit, axis=0)
    g_x = (g_v - np.sum(g_v * v, axis=1)[:, None] * v) / norms[:, None]
    return value, g_x.ravel()


def _polish_covering(points: np.ndarray) -> np.ndarray:
    """Fixed-combinatorics polish: equalize the active circumradii."""
    from scipy.spatial import ConvexHull

    n = points.shape[0]
    x = points
    for _ in range(3):
        try:
            hull = ConvexHull(x)
        except Exception:
            return x
        triples = [tuple(s) for s in hull.simplices]
        signs = []
        for i, j, k in triples:
            c = np.cross(x[j] - x[i], x[k] - x[i])
            signs.append(1.0 if np.dot(c, x[i] + x[j] + x[k]) >= 0 else -1.0)

        def gaps(z):
            pts = z[:-1].reshape(n, 3)
            s = z[-1]
            out = []
            for (i, j, k), sign in zip(triples, signs):
                c = sign * np.cross(pts[j] - pts[i], pts[k] - pts[i])
                c = c / np.linalg.norm(c)
                out.append(s - np.sum((c - pts[i]) ** 2))
            return np.array(out)

        def norm_residual(z):
            pts = z[:-1].reshape(n, 3)
            return np.sum(pts * pts, axis=1) - 1.0

        before = covering_objective(Arrangement(x, kind="imported"))
        z0 = np.append(x.ravel(), before**2 * 1.001)
        res = minimize(
            lambda z: z[-1],
            z0,
            jac=lambda z: np.append(np.zeros(z.size - 1), 1.0),
            method="SLSQP",
            constraints=[
                {"type": "ineq", "fun": gaps},
                {"type": "eq", "fun": norm_residual},
            ],
            options={"ftol": 1e-14, "maxiter": 200},
        )
        new = _project_rows(res.x[:-1].reshape(n, 3))
        after = covering_objective(Arrangement(new, kind="imported"))
        if after < before - 1e-12:
            x = new
        else:
            break
    return x


def _optimize_covering(start: np.ndarray, polish: bool) -> np.ndarray:
    n = start.shape[0]
    x = start
    mesh = _icosphere(3)
    scale = 3.8 / math.sqrt(n)
    for tau in (0.3 * scale, 0.1 * scale, 0.03 * scale):
        res = minimize(
            _soft_covering_value_grad,
            x.ravel(),
            args=(n, mesh, tau),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": 250, "ftol": 1e-14, "gtol": 1e-10},
        )
        x = _project_rows(res.x.reshape(n, 3))
    if polish:
        x = _polish_covering(x)
    return x


def _canonical_key(vecs: np.ndarray) -> tuple:
    angles = sorted(
        (math.acos(min(1.0, max(-1.0, z))), math.atan2(y, x) % (2.0 * math.pi))
        for x, y, z in vecs
    )
    return tuple(angles)


def optimize_arrangement(
    n: int, kind: str, restarts: int | None = None, seed: int = 0
) -> Arrangement:
    """Multistart local optimization of the requested objective.

    Deterministic per seed; returns the best restart outcome (ties broken by
    the lexicographically smallest canonical angle list).  Best effort only:
    no global-optimality claim.
    """
    if n < 2:
        raise ValueError("need at least two points")
    if kind not in ("coulomb", "tammes", "covering"):
        raise ValueError("kind must be coulomb, tammes, or covering")
    if restarts is None:
        restarts = default_restarts(n)
    if restarts < 1:
        raise ValueError("restarts must be positive")
    rng = np.random.default_rng(seed)

    # For the non-smooth objectives the expensive exact polish is applied to
    # the most promising smoothed outcomes only.
    anneal: list[tuple[float, np.ndarray]] = []
    for _ in range(restarts):
        start = _random_sphere(rng, n)
        if kind == "coulomb":
            x = _optimize_coulomb(start)
            value = coulomb_energy(Arrangement(x, kind="coulomb"))
        elif kind == "tammes":
            x = _optimize_tammes(start, polish=False)
            value = -tammes_objective(Arrangement(x, kind="tammes"))
        else:
            x = _optimize_covering(start, polish=False)
            value = covering_objective(Arrangement(x, kind="covering"))
        anneal.append((value, x))
    anneal.sort(key=lambda item: item[0])

    final: list[tuple[float, np.ndarray]] = []
    if kind == "coulomb":
        final = anneal
    else:
        for value, x in anneal[: min(3, len(anneal))]:
            if kind == "tammes":
                y = _polish_tammes(x)
                final.append((-tammes_objective(Arrangement(y, kind=kind)), y))
            else:
                y = _polish_covering(x)
                final.append((covering_objective(Arrangement(y, kind=kind)), y))
        final += anneal[min(3, len(anneal)):]

    best = min(value for value, _ in final)
    ties = [x for value, x in final if value <= best + 1e-10]
    ties.sort(key=_canonical_key)
    return Arrangement(ties[0], kind=kind)
