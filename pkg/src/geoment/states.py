"""Symmetric N-qubit states and their two standard encodings.

A symmetric state is held either as N+1 complex amplitudes over the
excitation basis (:class:`DickeVector`) or as an unordered set of N points
on the Bloch sphere (:class:`MajoranaSet`).  The conversions between the
two run through the characteristic polynomial whose roots encode the
sphere points; coherent (symmetric product) states are parameterized by a
single :class:`BlochPoint`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import gammaln

from .errors import ParseError

TWO_PI = 2.0 * math.pi

# math.comb stays exact below this; above, binomials go through log-gamma
# to dodge float overflow.
_EXACT_BINOMIAL_LIMIT = 60

# Relative size below which a polynomial coefficient counts as zero when
# deciding degree deficits and roots pinned at the origin.
_COEFF_ZERO_REL = 1e-12


def binomial(n: int, k: int) -> float:
    """Binomial coefficient C(n, k) as a float."""
    if k < 0 or k > n:
        return 0.0
    if n <= _EXACT_BINOMIAL_LIMIT:
        return float(math.comb(n, k))
    return float(np.exp(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)))


def sqrt_binomials(n: int) -> np.ndarray:
    """Array of sqrt(C(n, k)) for k = 0..n."""
    if n <= _EXACT_BINOMIAL_LIMIT:
        return np.sqrt(np.array([math.comb(n, k) for k in range(n + 1)], dtype=float))
    k = np.arange(n + 1)
    return np.exp(0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)))


@dataclass(frozen=True)
class BlochPoint:
    """A point on the unit sphere, i.e. a single-qubit pure state.

    Angles are canonicalized on construction: theta in [0, pi], phi in
    [0, 2*pi), and phi pinned to 0 at the poles where the azimuth is pure
    gauge.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta) % TWO_PI
        phi = float(self.phi)
        if theta > math.pi:
            theta = TWO_PI - theta
            phi += math.pi
        phi = phi % TWO_PI
        if theta == 0.0 or theta == math.pi:
            phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @property
    def amplitudes(self) -> tuple[float, complex]:
        """Qubit amplitudes (alpha, beta) with alpha real non-negative."""
        alpha = math.cos(self.theta / 2.0)
        beta = complex(math.cos(self.phi), math.sin(self.phi)) * math.sin(self.theta / 2.0)
        return alpha, beta

    @property
    def p(self) -> float:
        """Ground-component weight cos^2(theta/2)."""
        return math.cos(self.theta / 2.0) ** 2

    @property
    def xyz(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )

    @classmethod
    def from_xyz(cls, vec) -> "BlochPoint":
        v = np.asarray(vec, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("cannot map the zero vector to a sphere point")
        v = v / norm
        return cls(math.acos(min(1.0, max(-1.0, v[2]))), math.atan2(v[1], v[0]))


def angular_distance(a: BlochPoint, b: BlochPoint) -> float:
    """Great-circle angle between two sphere points, in radians."""
    dot = float(np.dot(a.xyz, b.xyz))
    return math.acos(min(1.0, max(-1.0, dot)))


def chordal_distance(a: BlochPoint, b: BlochPoint) -> float:
    """Euclidean distance between two sphere points' unit vectors."""
    return float(np.linalg.norm(a.xyz - b.xyz))


@dataclass(frozen=True, eq=False)
class MajoranaSet:
    """An unordered multiset of N Bloch-sphere points defining a symmetric state."""

    points: tuple[BlochPoint, ...]

    def __post_init__(self):
        pts = tuple(self.points)
        if len(pts) < 1:
            raise ValueError("a MajoranaSet needs at least one point")
        if not all(isinstance(p, BlochPoint) for p in pts):
            raise TypeError("points must be BlochPoint instances")
        object.__setattr__(self, "points", pts)

    @property
    def n_qubits(self) -> int:
        return len(self.points)

    def vectors(self) -> np.ndarray:
        """Point coordinates as an (N, 3) array."""
        return np.array([p.xyz for p in self.points])

    def matches(self, other: "MajoranaSet", tol: float = 1e-9) -> bool:
        """Multiset equality under optimal pairing, chordal tolerance `tol`."""
        if not isinstance(other, MajoranaSet):
            return NotImplemented
        if self.n_qubits != other.n_qubits:
            return False
        cost = _pairwise_chordal(self.vectors(), other.vectors())
        rows, cols = linear_sum_assignment(cost)
        return bool(np.max(cost[rows, cols]) <= tol)

    def __eq__(self, other):
        return self.matches(other)

    __hash__ = None

    def to_text(self) -> str:
        """N lines of `theta phi` in radians, 17 significant digits."""
        return "\n".join(f"{p.theta:.17g} {p.phi:.17g}" for p in self.points) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MajoranaSet":
        points = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"expected `theta phi`, got {raw!r}", line=lineno)
            try:
                theta, phi = float(parts[0]), float(parts[1])
            except ValueError:
                raise ParseError(f"non-numeric angles in {raw!r}", line=lineno) from None
            points.append(BlochPoint(theta, phi))
        if not points:
            raise ParseError("no points found")
        return cls(tuple(points))


def _pairwise_chordal(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


@dataclass(frozen=True, eq=False)
class DickeVector:
    """A symmetric N-qubit state as N+1 excitation-basis amplitudes.

    The constructor normalizes; the zero vector is rejected.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=complex)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("coeffs must be a 1-d sequence of at least 2 amplitudes")
        if not np.all(np.isfinite(arr.view(float))):
            raise ValueError("coeffs must be finite")
        norm = np.linalg.norm(arr)
        if norm < 1e-150:
            raise ValueError("the zero vector is not a state")
        arr = arr / norm
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def n_qubits(self) -> int:
        return self.coeffs.size - 1

    def fidelity(self, other: "DickeVector") -> float:
        """|<self|other>|, insensitive to global phase."""
        if self.n_qubits != other.n_qubits:
            raise ValueError("states have different qubit counts")
        return float(abs(np.vdot(self.coeffs, other.coeffs)))

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n_qubits,
                "re": list(self.coeffs.real),
                "im": list(self.coeffs.imag),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DickeVector":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        if not isinstance(obj, dict) or not {"n", "re", "im"} <= set(obj):
            raise ParseError('expected an object with keys "n", "re", "im"')
        n = obj["n"]
        re, im = obj["re"], obj["im"]
        if not isinstance(n, int) or n < 1:
            raise ParseError('"n" must be a positive integer')
        if len(re) != n + 1 or len(im) != n + 1:
            raise ParseError(f'"re" and "im" must each have {n + 1} entries')
        return cls(np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float))


def dicke_basis_state(n: int, k: int) -> DickeVector:
    """The basis state with exactly k excitations among n qubits."""
    if not 0 <= k <= n:
        raise ValueError("k must lie in [0, n]")
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[k] = 1.0
    return DickeVector(coeffs)


def dicke_from_majorana(m: MajoranaSet) -> DickeVector:
    """Excitation-basis amplitudes of the state with sphere points `m`.

    Accumulates the elementary symmetric polynomials of the per-point
    amplitude pairs by sequential convolution (O(N^2)), then rescales by
    1/sqrt(C(N,k)) and normalizes.
    """
    n = m.n_qubits
    poly = np.zeros(n + 1, dtype=complex)
    poly[0] = 1.0
    for idx, pt in enumerate(m.points, start=1):
        alpha, beta = pt.amplitudes
        poly[1 : idx + 1] = poly[1 : idx + 1] * alpha + poly[:idx] * beta
        poly[0] *= alpha
        peak = np.max(np.abs(poly))
        if peak > 1e100 or (0.0 < peak < 1e-100):
            poly /= peak
    return DickeVector(poly / sqrt_binomials(n))


def majorana_from_dicke(d: DickeVector) -> MajoranaSet:
    """Sphere points of a symmetric state, via its characteristic polynomial.

    The K roots z of sum_k (-1)^k sqrt(C(N,k)) d_k z^k map to points with
    theta = 2*arctan(1/|z|) and phi = -arg(z) mod 2*pi; a degree deficit
    N - K contributes that many points at theta = 0.
    """
    n = d.n_qubits
    k = np.arange(n + 1)
    coeffs = ((-1.0) ** k) * sqrt_binomials(n) * d.coeffs
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        raise ValueError("zero polynomial (cannot occur for a normalized state)")
    nonzero = np.abs(coeffs) >= _COEFF_ZERO_REL * scale
    degree = int(np.max(np.nonzero(nonzero)[0]))
    zero_roots = int(np.min(np.nonzero(nonzero)[0]))

    points = [BlochPoint(0.0)] * (n - degree)
    points += [BlochPoint(math.pi)] * zero_roots
    inner = coeffs[zero_roots : degree + 1]
    if inner.size > 1:
        roots = np.roots(inner[::-1])
        for z in roots:
            theta = 2.0 * math.atan2(1.0, abs(z))
            phi = (-np.angle(z)) % TWO_PI
            points.append(BlochPoint(theta, phi))
    return MajoranaSet(tuple(points))


def coherent_state(n: int, point: BlochPoint) -> np.ndarray:
    """Excitation-basis amplitudes of the n-fold product of one qubit state."""
    alpha, beta = point.amplitudes
    k = np.arange(n + 1)
    return sqrt_binomials(n) * alpha ** (n - k) * beta**k


def coherent_overlap(d: DickeVector, c: BlochPoint) -> complex:
    """Amplitude <psi|Phi(c)> between the state and a coherent state."""
    return complex(np.vdot(d.coeffs, coherent_state(d.n_qubits, c)))


def rotation_matrix(axis, angle: float) -> np.ndarray:
    """Proper rotation by `angle` about the unit 3-vector `axis` (Rodrigues)."""
    a = np.asarray(axis, dtype=float)
    if abs(np.linalg.norm(a) - 1.0) > 1e-9:
        raise ValueError("axis must be a unit vector (tolerance 1e-9)")
    x, y, z = a
    cross = np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
    return np.eye(3) + math.sin(angle) * cross + (1.0 - math.cos(angle)) * (cross @ cross)


def rotate_majorana(m: MajoranaSet, matrix: np.ndarray) -> MajoranaSet:
    """Apply a 3x3 rotation matrix to every point."""
    return MajoranaSet(tuple(BlochPoint.from_xyz(matrix @ p.xyz) for p in m.points))


def apply_global_rotation(m: MajoranaSet, axis, angle: float) -> MajoranaSet:
    """Rigidly rotate all points of `m` by `angle` about `axis`."""
    return rotate_majorana(m, rotation_matrix(axis, angle))


def _frame(u: np.ndarray, v: np.ndarray) -> np.ndarray | None:
    """Right-handed orthonormal frame with first axis u, second in span(u, v)."""
    w = v - np.dot(v, u) * u
    norm = np.linalg.norm(w)
    if norm < 1e-9:
        return None
    w = w / norm
    return np.column_stack([u, w, np.cross(u, w)])


def _kabsch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Proper rotation R minimizing ||R a - b|| over paired rows."""
    h = a.T @ b
    u, _, vt = np.linalg.svd(h)
    det = np.linalg.det(vt.T @ u.T)
    return vt.T @ np.diag([1.0, 1.0, det]) @ u.T


def align_point_sets(a: np.ndarray, b: np.ndarray, allow_reflection: bool = False):
    """Best proper rotation mapping point set `a` onto `b` (unordered rows).

    Candidate rotations are built from anchor-pair frames, scored by optimal
    assignment of chordal distances, and polished by a Kabsch step on the best
    correspondence.  Returns (R, max_residual) with residual in chordal
    distance; when `allow_reflection` is set, improper maps are tried too and
    R may have determinant -1.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("point sets must have the same shape")
    n = a.shape[0]
    if n == 1:
        axis = np.cross(a[0], b[0])
        norm = np.linalg.norm(axis)
        if norm < 1e-12:
            r = np.eye(3) if np.dot(a[0], b[0]) > 0 else rotation_matrix(
                _any_orthogonal(a[0]), math.pi
            )
        else:
            r = rotation_matrix(axis / norm, math.acos(np.clip(np.dot(a[0], b[0]), -1, 1)))
        return r, float(np.linalg.norm(r @ a[0] - b[0]))

    mirrors = [np.eye(3)]
    if allow_reflection:
        mirrors.append(np.diag([1.0, 1.0, -1.0]))

    best_r, best_cost = np.eye(3), math.inf
    for mirror in mirrors:
        am = a @ mirror.T
        # Anchor a0 with the partner most transverse to it.
        dots = np.abs(am @ am[0])
        j0 = int(np.argmin(dots))
        fa = _frame(am[0], am[j0])
        if fa is None:
            continue
        ref_angle = math.acos(np.clip(np.dot(am[0], am[j0]), -1, 1))
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                ang = math.acos(np.clip(np.dot(b[i], b[j]), -1, 1))
                if abs(ang - ref_angle) > 0.2:
                    continue
                fb = _frame(b[i], b[j])
                if fb is None:
                    continue
                r = fb @ fa.T
                cost = _pairwise_chordal(am @ r.T, b)
                rows, cols = linear_sum_assignment(cost)
                worst = float(np.max(cost[rows, cols]))
                if worst < best_cost:
                    # Kabsch polish on the found correspondence.
                    r2 = _kabsch(am[rows], b[cols])
                    cost2 = _pairwise_chordal(am @ r2.T, b)
                    rows2, cols2 = linear_sum_assignment(cost2)
                    worst2 = float(np.max(cost2[rows2, cols2]))
                    if worst2 < worst:
                        r, worst = r2, worst2
                    best_r, best_cost = r @ mirror, worst
    return best_r, best_cost


def _any_orthogonal(v: np.ndarray) -> np.ndarray:
    pick = np.eye(3)[int(np.argmin(np.abs(v)))]
    w = np.cross(v, pick)
    return w / np.linalg.norm(w)
