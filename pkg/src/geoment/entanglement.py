"""Geometric measure of entanglement for symmetric states.

The measure is one minus the squared overlap with the closest coherent
(symmetric product) state, so for symmetric qubit states the whole
optimization lives on two sphere angles.  The global maximum is located by
a dense angular grid followed by damped Newton ascent from every grid
plateau, which is deterministic for a fixed configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import ndimage
from scipy.optimize import minimize, minimize_scalar

from .errors import ConvergenceError
from .states import (
    TWO_PI,
    BlochPoint,
    DickeVector,
    MajoranaSet,
    coherent_state,
    dicke_from_majorana,
    sqrt_binomials,
)

__all__ = [
    "OptimizerConfig",
    "EntanglementResult",
    "geometric_entanglement",
    "dicke_entanglement_closed_form",
    "balanced_dicke_asymptotic",
    "symmetric_upper_bound",
    "average_overlap_quadrature",
    "search_max_entangled",
    "verify_extremal_certificates",
    "dicke_form_of_maximal_states",
    "bures_quantumness",
    "bures_from_entanglement",
    "CertificateReport",
]


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for the two-angle overlap maximization.

    Grid sizes default to 4*N + 8 per axis, resolved per state; the squared
    overlap is a trigonometric polynomial of degree at most 2N in each
    angle, so that density localizes every maximum.
    """

    grid_theta: int | None = None
    grid_phi: int | None = None
    refinement_tolerance: float = 1e-12
    max_refinement_steps: int = 200
    maximizer_cluster_radius: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        for name in ("grid_theta", "grid_phi"):
            value = getattr(self, name)
            if value is not None and value < 8:
                raise ValueError(f"{name} must be at least 8")
        if self.refinement_tolerance <= 0.0:
            raise ValueError("refinement_tolerance must be positive")
        if self.max_refinement_steps < 1:
            raise ValueError("max_refinement_steps must be a positive integer")
        if self.maximizer_cluster_radius <= 0.0:
            raise ValueError("maximizer_cluster_radius must be positive")

    def resolved_grid(self, n_qubits: int) -> tuple[int, int]:
        default = 4 * n_qubits + 8
        return (self.grid_theta or max(default, 8), self.grid_phi or max(default, 8))


@dataclass(frozen=True)
class EntanglementResult:
    """Outcome of a coherent-overlap maximization.

    `maximizers` lists all distinct global maximizers found, deduplicated by
    the configured cluster radius.
    """

    e_g: float
    overlap_sq: float
    maximizers: tuple[BlochPoint, ...]
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if abs(self.e_g - (1.0 - self.overlap_sq)) > 1e-14:
            raise ValueError("e_g and overlap_sq are inconsistent")
        if not 0.0 <= self.e_g < 1.0:
            raise ValueError("e_g must lie in [0, 1)")

    def to_dict(self) -> dict:
        return {
            "e_g": self.e_g,
            "overlap_sq": self.overlap_sq,
            "maximizers": [{"theta": p.theta, "phi": p.phi} for p in self.maximizers],
        }


class _OverlapLandscape:
    """Squared coherent-state overlap of one fixed state, with derivatives.

    The overlap amplitude is A(theta, phi) = sum_k c_k u_k(theta) e^{i k phi}
    with u_k = cos^{n-k}(theta/2) sin^k(theta/2) and c_k the conjugated
    state amplitudes times sqrt-binomials.  All evaluators broadcast over
    angle arrays.
    """

    def __init__(self, d: DickeVector):
        self.n = d.n_qubits
        k = np.arange(self.n + 1)
        self.k = k.astype(float)
        self.a = (self.n - k).astype(float)
        self.c = np.conj(d.coeffs) * sqrt_binomials(self.n)
        # Derivative terms carry exponents shifted by +-1, +-2 whose
        # coefficients vanish exactly where the shift would go negative, so
        # the exponents can be clamped to zero there.  Rows of the exponent
        # stacks: u, the two first-derivative terms, the two extra
        # second-derivative terms.
        self.exp_c = np.vstack(
            [
                self.a,
                self.a + 1.0,
                np.maximum(self.a - 1.0, 0.0),
                self.a + 2.0,
                np.maximum(self.a - 2.0, 0.0),
            ]
        )
        self.exp_s = np.vstack(
            [
                self.k,
                np.maximum(self.k - 1.0, 0.0),
                self.k + 1.0,
                np.maximum(self.k - 2.0, 0.0),
                self.k + 2.0,
            ]
        )
        self.cf_s1 = 0.5 * self.k                      # * c^{a+1} s^{k-1}
        self.cf_c1 = 0.5 * self.a                      # * c^{a-1} s^{k+1}
        self.cf_s2 = 0.25 * self.k * (self.k - 1.0)    # * c^{a+2} s^{k-2}
        self.cf_c2 = 0.25 * self.a * (self.a - 1.0)    # * c^{a-2} s^{k+2}
        self.cf_mid = 0.25 * (2.0 * self.a * self.k + self.n)
        # Azimuthal weights [1, i k, -k^2] fold the phi-derivatives into one
        # matrix product each.
        self.w_phi = np.vstack(
            [np.ones_like(self.k), 1j * self.k, -(self.k**2)]
        ).T.astype(complex)

    def amplitude_grid(self, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
        """Overlap amplitude on the tensor grid thetas x phis."""
        ch = np.cos(thetas / 2.0)[:, None]
        sh = np.sin(thetas / 2.0)[:, None]
        u = self.c[None, :] * ch ** self.a[None, :] * sh ** self.k[None, :]
        phases = np.exp(1j * np.outer(self.k, phis))
        return u @ phases

    def value_grid(self, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
        amp = self.amplitude_grid(thetas, phis)
        return (amp * np.conj(amp)).real

    def value(self, theta, phi) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        ch = np.cos(theta / 2.0)[..., None]
        sh = np.sin(theta / 2.0)[..., None]
        u = ch ** self.a * sh ** self.k
        amp = np.sum(self.c * u * np.exp(1j * self.k * phi[..., None]), axis=-1)
        return (amp * np.conj(amp)).real

    def value_grad_hess(self, theta: np.ndarray, phi: np.ndarray):
        """f, gradient and Hessian entries, elementwise over seed arrays."""
        ch = np.cos(theta / 2.0)[:, None, None]
        sh = np.sin(theta / 2.0)[:, None, None]
        pw = ch ** self.exp_c[None] * sh ** self.exp_s[None]  # (K, 5, N+1)
        u = pw[:, 0]
        du = self.cf_s1 * pw[:, 1] - self.cf_c1 * pw[:, 2]
        d2u = self.cf_s2 * pw[:, 3] + self.cf_c2 * pw[:, 4] - self.cf_mid * u

        phase = self.c * np.exp(1j * np.outer(phi, self.k))  # (K, N+1)
        amp, amp_p, amp_pp = ((phase * u) @ self.w_phi).T
        amp_t, amp_tp, _ = ((phase * du) @ self.w_phi).T
        amp_tt = np.sum(phase * d2u, axis=-1)

        conj_amp = np.conj(amp)
        f = (amp * conj_amp).real
        g_t = 2.0 * (conj_amp * amp_t).real
        g_p = 2.0 * (conj_amp * amp_p).real
        h_tt = 2.0 * ((amp_t * np.conj(amp_t)).real + (conj_amp * amp_tt).real)
        h_tp = 2.0 * ((np.conj(amp_p) * amp_t).real + (conj_amp * amp_tp).real)
        h_pp = 2.0 * ((amp_p * np.conj(amp_p)).real + (conj_amp * amp_pp).real)
        return f, g_t, g_p, h_tt, h_tp, h_pp


def _refine_ascent(
    land: _OverlapLandscape,
    theta0,
    phi0,
    gtol: float,
    max_steps: int,
    value_tol: float = 1e-12,
):
    """Modified-Newton ascent on the overlap surface, vectorized over seeds.

    The 2x2 Hessian is made safely negative definite through its eigenvalues,
    so ridges and near-degenerate maxima still take productive steps.  A seed
    retires once its projected remaining gain drops below `value_tol` (or its
    gradient below `gtol`); seeds leave the active set as they finish.
    Returns (theta, phi, f, steps, converged).
    """
    out_theta = np.atleast_1d(np.asarray(theta0, dtype=float)).copy()
    out_phi = np.atleast_1d(np.asarray(phi0, dtype=float)).copy()
    total = out_theta.size
    out_f = np.zeros(total)
    out_steps = np.zeros(total, dtype=int)
    out_conv = np.zeros(total, dtype=bool)

    idx = np.arange(total)
    theta, phi = out_theta.copy(), out_phi.copy()
    f, g_t, g_p, h_tt, h_tp, h_pp = land.value_grad_hess(theta, phi)
    eps = np.finfo(float).eps

    best_seen = float(np.max(f))
    for _ in range(max_steps):
        best_seen = max(best_seen, float(np.max(f)))
        # Eigen-decompose the symmetric 2x2 Hessians.
        half_tr = 0.5 * (h_tt + h_pp)
        disc = np.sqrt(np.maximum(0.25 * (h_tt - h_pp) ** 2 + h_tp**2, 0.0))
        lam1 = half_tr - disc
        lam2 = half_tr + disc
        v1t = np.where(np.abs(h_tp) > 1e-300, h_tp, np.where(h_tt <= h_pp, 1.0, 0.0))
        v1p = np.where(np.abs(h_tp) > 1e-300, lam1 - h_tt, np.where(h_tt <= h_pp, 0.0, 1.0))
        norm = np.hypot(v1t, v1p)
        v1t, v1p = v1t / norm, v1p / norm
        g1 = g_t * v1t + g_p * v1p
        g2 = -g_t * v1p + g_p * v1t
        # Curvature floor keeps steps finite along flat or upward directions.
        floor = np.maximum(1e-3 * (np.abs(lam1) + np.abs(lam2)), 1e-8)
        lam1s = np.minimum(lam1, -floor)
        lam2s = np.minimum(lam2, -floor)
        gain = 0.5 * (g1**2 / np.abs(lam1s) + g2**2 / np.abs(lam2s))

        done = np.maximum(np.abs(g_t), np.abs(g_p)) <= gtol
        done |= gain <= 0.25 * value_tol
        # Retire slow seeds too far below the running best to ever matter.
        done |= (f < best_seen - 0.01) & (gain < 1e-6)
        if done.any():
            sel = idx[done]
            out_theta[sel], out_phi[sel], out_f[sel] = theta[done], phi[done], f[done]
            out_conv[sel] = True
            keep = ~done
            idx, theta, phi = idx[keep], theta[keep], phi[keep]
            f, g_t, g_p = f[keep], g_t[keep], g_p[keep]
            v1t, v1p, g1, g2 = v1t[keep], v1p[keep], g1[keep], g2[keep]
            lam1s, lam2s = lam1s[keep], lam2s[keep]
        if idx.size == 0:
            break

        c1 = -g1 / lam1s
        c2 = -g2 / lam2s
        dt = c1 * v1t - c2 * v1p
        dp = c1 * v1p + c2 * v1t
        # Cap step length so far-from-quadratic seeds cannot jump basins.
        length = np.hypot(dt, dp)
        shrink = np.where(length > 0.5, 0.5 / np.maximum(length, 1e-300), 1.0)
        dt *= shrink
        dp *= shrink

        slope = g_t * dt + g_p * dp
        alpha = np.ones(idx.size)
        accepted = np.zeros(idx.size, dtype=bool)
        for _bt in range(30):
            trial_t = theta + alpha * dt
            trial_p = phi + alpha * dp
            trial_f = land.value(trial_t, trial_p)
            ok = ~accepted & (trial_f >= f + 1e-4 * alpha * slope)
            theta = np.where(ok, trial_t, theta)
            phi = np.where(ok, trial_p, phi)
            accepted |= ok
            if accepted.all():
                break
            alpha = np.where(accepted, alpha, alpha * 0.5)
        out_steps[idx] += 1

        # Seeds whose expected gain fell below float resolution sit at the
        # numerical top already; retire them as converged.
        stuck = ~accepted & (alpha * slope < 8.0 * eps * np.maximum(f, 1e-30))
        if stuck.any():
            sel = idx[stuck]
            out_theta[sel], out_phi[sel], out_f[sel] = theta[stuck], phi[stuck], f[stuck]
            out_conv[sel] = True
            keep = ~stuck
            idx, theta, phi = idx[keep], theta[keep], phi[keep]
            if idx.size == 0:
                break
        f, g_t, g_p, h_tt, h_tp, h_pp = land.value_grad_hess(theta, phi)

    if idx.size:
        done = np.maximum(np.abs(g_t), np.abs(g_p)) <= gtol
        out_theta[idx], out_phi[idx], out_f[idx] = theta, phi, f
        out_conv[idx] = done
    return out_theta, out_phi, out_f, out_steps, out_conv


def _grid_seeds(f: np.ndarray, thetas: np.ndarray, phis: np.ndarray):
    """Refinement seeds from a grid evaluation of the overlap surface.

    One seed per connected plateau of grid-local maxima (phi wraps), plus
    the argmax of every row and column.  The latter trace ridge-shaped
    landscapes (near-degenerate maximizer rings) whose along-ridge variation
    is smaller than the transverse sampling error, so plain cell-local
    maxima can miss the best azimuth entirely.
    """
    n_t, n_p = f.shape
    pad = np.full((1, n_p), -np.inf)
    up = np.vstack([f[1:], pad])
    down = np.vstack([pad, f[:-1]])
    left = np.roll(f, 1, axis=1)
    right = np.roll(f, -1, axis=1)
    mask = (f >= up) & (f >= down) & (f >= left) & (f >= right)

    cells: set[tuple[int, int]] = set()
    labels, count = ndimage.label(mask)
    if count:
        # Merge components split by the periodic phi seam.
        parent = list(range(count + 1))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for l_lab, r_lab in zip(labels[:, 0], labels[:, -1]):
            if l_lab > 0 and r_lab > 0 and l_lab != r_lab:
                ra, rb = find(l_lab), find(r_lab)
                if ra != rb:
                    parent[rb] = ra

        roots = np.array([find(lab) for lab in range(count + 1)], dtype=int)
        flat_f = f.ravel()
        flat_labels = roots[labels.ravel()]
        order = np.argsort(-flat_f, kind="stable")
        labs_sorted = flat_labels[order]
        hit = labs_sorted > 0
        _, first = np.unique(labs_sorted[hit], return_index=True)
        for flat_idx in order[hit][first]:
            cells.add((int(flat_idx) // n_p, int(flat_idx) % n_p))

    col_arg = np.argmax(f, axis=0)
    cells.update((int(col_arg[j]), j) for j in range(n_p))
    row_arg = np.argmax(f, axis=1)
    cells.update((i, int(row_arg[i])) for i in range(n_t))

    pairs = sorted(cells)
    ti = np.array([i for i, _ in pairs], dtype=int)
    pj = np.array([j for _, j in pairs], dtype=int)
    return thetas[ti], phis[pj]


def _canonical_angles(theta: float, phi: float) -> BlochPoint:
    return BlochPoint(theta, phi)


def _cluster_maximizers(thetas, phis, values, radius: float):
    """Greedy clustering of maximizer candidates by angular distance."""
    order = np.argsort(values)[::-1]
    reps: list[BlochPoint] = []
    rep_vecs: list[np.ndarray] = []
    for idx in order:
        point = _canonical_angles(thetas[idx], phis[idx])
        vec = point.xyz
        if all(
            math.acos(min(1.0, max(-1.0, float(np.dot(vec, rv))))) > radius
            for rv in rep_vecs
        ):
            reps.append(point)
            rep_vecs.append(vec)
    reps.sort(key=lambda p: (p.theta, p.phi))
    return tuple(reps)


def _solve_landscape(
    d: DickeVector, cfg: OptimizerConfig, strict: bool = True, fast: bool = False
):
    """Grid seeding plus refinement; returns refined candidates and diagnostics.

    `fast` trades completeness for speed inside search loops: only the
    highest-valued grid plateaus are refined, with a looser gradient stop.
    """
    n = d.n_qubits
    land = _OverlapLandscape(d)
    grid_t, grid_p = cfg.resolved_grid(n)
    thetas = np.linspace(0.0, math.pi, grid_t)
    phis = np.arange(grid_p) * (TWO_PI / grid_p)
    f_grid = land.value_grid(thetas, phis)

    if fast:
        # Row/column argmax cells trace every ridge and always contain the
        # global grid maximum; skip the costlier plateau analysis.
        cells = {(int(i), int(np.argmax(f_grid[i]))) for i in range(grid_t)}
        cells.update((int(np.argmax(f_grid[:, j])), int(j)) for j in range(grid_p))
        pairs = sorted(cells)
        seed_t = thetas[[i for i, _ in pairs]]
        seed_p = phis[[j for _, j in pairs]]
        if seed_t.size > 16:
            seed_f = f_grid[tuple(np.array(pairs).T)]
            chosen = set(np.argsort(seed_f)[::-1][:8].tolist())
            by_phi = np.argsort(seed_p)
            chosen.update(by_phi[:: max(1, by_phi.size // 8)].tolist())
            sel = np.array(sorted(chosen), dtype=int)
            seed_t, seed_p = seed_t[sel], seed_p[sel]
    else:
        seed_t, seed_p = _grid_seeds(f_grid, thetas, phis)
    gtol = max(1, n) * (1e-5 if fast else math.sqrt(cfg.refinement_tolerance))
    max_steps = min(30, cfg.max_refinement_steps) if fast else cfg.max_refinement_steps
    r_theta, r_phi, r_f, steps, ok = _refine_ascent(
        land, seed_t, seed_p, gtol, max_steps,
        value_tol=cfg.refinement_tolerance if not fast else 1e-9,
    )

    if strict and not ok.any():
        raise ConvergenceError(
            "no refinement converged within "
            f"{cfg.max_refinement_steps} steps; enlarge the grid or step budget"
        )
    best_ok = float(np.max(r_f[ok])) if ok.any() else -np.inf
    if strict and (~ok).any():
        stray = r_f[~ok]
        if np.max(stray) >= best_ok - 1e-9:
            raise ConvergenceError(
                "a near-maximal refinement did not converge within "
                f"{cfg.max_refinement_steps} steps"
            )

    diagnostics = {
        "grid_theta": grid_t,
        "grid_phi": grid_p,
        "seed_count": int(seed_t.size),
        "refine_steps_total": int(np.sum(steps)),
        "refine_steps_max": int(np.max(steps)),
        "unconverged_seeds": int(np.sum(~ok)),
    }
    return land, r_theta, r_phi, r_f, ok, float(np.max(f_grid)), diagnostics


def geometric_entanglement(d: DickeVector, cfg: OptimizerConfig | None = None) -> EntanglementResult:
    """Entanglement of `d` by global maximization of the coherent overlap.

    Deterministic for a fixed config: dense grid seeding, damped Newton
    ascent from every grid plateau, then clustering of the tied maximizers.
    Raises :class:`ConvergenceError` when a potentially maximal refinement
    fails to converge within the step budget.
    """
    cfg = cfg or OptimizerConfig()
    n = d.n_qubits
    land, r_theta, r_phi, r_f, ok, f_grid_max, diagnostics = _solve_landscape(d, cfg, strict=True)

    f_max = max(float(np.max(r_f[ok])), f_grid_max)
    if f_max > 1.0 + 1e-12:
        raise ArithmeticError(f"squared overlap {f_max} exceeds 1; state is corrupt")
    f_max = min(f_max, 1.0)

    keep = ok & (r_f >= f_max - cfg.refinement_tolerance)
    maximizers = _cluster_maximizers(
        r_theta[keep], r_phi[keep], r_f[keep], cfg.maximizer_cluster_radius
    )

    e_g = max(0.0, 1.0 - f_max)
    bound = symmetric_upper_bound(n)
    if e_g >= bound:
        raise ConvergenceError(
            f"maximum found ({f_max}) lies below the symmetric-subspace average "
            f"1/(N+1); the optimizer missed the global maximum"
        )
    return EntanglementResult(
        e_g=e_g, overlap_sq=1.0 - e_g, maximizers=maximizers, diagnostics=diagnostics
    )


def _max_overlap_sq(d: DickeVector, cfg: OptimizerConfig, fast: bool = False) -> float:
    """Best-effort maximal squared overlap (no failure policy), for search loops."""
    _, _, _, r_f, _, f_grid_max, _ = _solve_landscape(d, cfg, strict=False, fast=fast)
    return min(max(float(np.max(r_f)), f_grid_max), 1.0)


def dicke_entanglement_closed_form(n: int, k: int) -> float:
    """Exact entanglement of the n-qubit basis state with k excitations."""
    if not 0 <= k <= n:
        raise ValueError("k must lie in [0, n]")
    if k == 0 or k == n:
        return 0.0
    log_term = (
        math.lgamma(n + 1)
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        + k * math.log(k / n)
        + (n - k) * math.log((n - k) / n)
    )
    return 1.0 - math.exp(log_term)


def balanced_dicke_asymptotic(n: int) -> float:
    """Large-n entanglement of the balanced excitation state, 1 - sqrt(2/(pi n))."""
    if n < 1:
        raise ValueError("n must be positive")
    return 1.0 - math.sqrt(2.0 / (math.pi * n))


def symmetric_upper_bound(n: int) -> float:
    """Strict upper bound 1 - 1/(n+1) on symmetric-state entanglement."""
    if n < 1:
        raise ValueError("n must be positive")
    return 1.0 - 1.0 / (n + 1)


def average_overlap_quadrature(d: DickeVector, nodes: int | None = None) -> float:
    """Sphere average of the squared coherent overlap, by exact quadrature.

    Gauss-Legendre in cos(theta) times a uniform azimuthal rule, both with
    `nodes` points (default 2N+2, exact for the polynomial degree involved).
    The result equals 1/(N+1) for every normalized state, which the tests
    use as an identity check.
    """
    n = d.n_qubits
    if nodes is None:
        nodes = 2 * n + 2
    if nodes < 2:
        raise ValueError("nodes must be at least 2")
    u, w = np.polynomial.legendre.leggauss(nodes)
    thetas = np.arccos(u)
    phis = np.arange(nodes) * (TWO_PI / nodes)
    land = _OverlapLandscape(d)
    f = land.value_grid(thetas, phis)
    return float(np.sum(w @ f) / (2.0 * nodes))


# ---------------------------------------------------------------------------
# Search for maximally entangled configurations


def _points_from_vars(x: np.ndarray, n: int) -> tuple[BlochPoint, ...]:
    """Gauge-fixed angles -> sphere points (first at the pole, second at phi=0)."""
    pts = [BlochPoint(0.0), BlochPoint(float(x[0]), 0.0)]
    for i in range(n - 2):
        pts.append(BlochPoint(float(x[1 + 2 * i]), float(x[2 + 2 * i])))
    return tuple(pts)


def _state_from_vars(x: np.ndarray, n: int) -> DickeVector:
    return dicke_from_majorana(MajoranaSet(_points_from_vars(x, n)))


def _sample_start(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform-on-the-sphere start for the gauge-fixed angles."""
    x = np.empty(2 * n - 3)
    x[0] = math.acos(rng.uniform(-1.0, 1.0))
    for i in range(n - 2):
        x[1 + 2 * i] = math.acos(rng.uniform(-1.0, 1.0))
        x[2 + 2 * i] = rng.uniform(0.0, TWO_PI)
    return x


def _canonical_angle_key(points: tuple[BlochPoint, ...]) -> tuple:
    return tuple(sorted((p.theta, p.phi) for p in points))


def _angles_from_vars(x: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Raw per-point angles including the gauge-pinned entries."""
    th = np.zeros(n)
    ph = np.zeros(n)
    th[1] = x[0]
    for i in range(n - 2):
        th[2 + i] = x[1 + 2 * i]
        ph[2 + i] = x[2 + 2 * i]
    return th, ph


def _conv_pair(coeffs: np.ndarray, p0: complex, p1: complex) -> np.ndarray:
    """Multiply a polynomial by (p0 + p1 z)."""
    out = np.zeros(coeffs.size + 1, dtype=complex)
    out[:-1] = coeffs * p0
    out[1:] += coeffs * p1
    return out


def _poly_and_grads(x: np.ndarray, n: int, sqrtc: np.ndarray):
    """Unnormalized state amplitudes w(x) and dw/dx for the gauge-fixed angles.

    Built from prefix/suffix products of the per-point factors, so each
    variable's derivative is the leave-one-out product convolved with the
    differentiated factor.  Amplitudes are taken directly from the raw
    angles; any wrap only flips per-point signs, which cancel in overlaps.
    """
    th, ph = _angles_from_vars(x, n)
    alpha = np.cos(th / 2.0)
    beta = np.exp(1j * ph) * np.sin(th / 2.0)

    pref = [np.ones(1, dtype=complex)]
    for j in range(n):
        pref.append(_conv_pair(pref[-1], alpha[j], beta[j]))
    suff = [np.ones(1, dtype=complex)] * (n + 1)
    for j in range(n - 1, -1, -1):
        suff[j] = _conv_pair(suff[j + 1], alpha[j], beta[j])

    w = pref[n] / sqrtc
    var_specs = [(1, 0)] + [spec for i in range(n - 2) for spec in ((2 + i, 0), (2 + i, 1))]
    grads = np.zeros((len(var_specs), n + 1), dtype=complex)
    for row, (j, is_phi) in enumerate(var_specs):
        if is_phi:
            d_alpha, d_beta = 0.0, 1j * beta[j]
        else:
            d_alpha = -0.5 * math.sin(th[j] / 2.0)
            d_beta = 0.5 * np.exp(1j * ph[j]) * math.cos(th[j] / 2.0)
        leave = np.convolve(pref[j], suff[j + 1])
        grads[row] = _conv_pair(leave, d_alpha, d_beta)[: n + 1] / sqrtc
    return w, grads


def _branch_values_and_grads(
    x: np.ndarray, n: int, seeds: np.ndarray, cfg: OptimizerConfig, sqrtc: np.ndarray
):
    """Each branch's squared overlap and its gradient in the outer angles.

    Branches are the local overlap maximizers tracked from fixed seeds; by
    the envelope theorem their derivative needs only the state's dependence
    on the angles, with the maximizer held fixed.
    """
    w, dw = _poly_and_grads(x, n, sqrtc)
    d = DickeVector(w)
    land = _OverlapLandscape(d)
    r_t, r_p, _, _, _ = _refine_ascent(
        land, seeds[:, 0], seeds[:, 1], max(1, n) * 1e-11, 120, value_tol=1e-18
    )
    coh = np.array(
        [coherent_state(n, BlochPoint(t, p)) for t, p in zip(r_t, r_p)]
    )
    overlaps = coh.conj() @ w                      # (p,)
    d_overlaps = coh.conj() @ dw.T                 # (p, nvars)
    norm2 = float(np.vdot(w, w).real)
    d_norm2 = 2.0 * (dw @ np.conj(w)).real         # (nvars,)
    f = (overlaps * overlaps.conj()).real / norm2
    df = (
        2.0 * (np.conj(overlaps)[:, None] * d_overlaps).real * norm2
        - (overlaps * overlaps.conj()).real[:, None] * d_norm2[None, :]
    ) / norm2**2
    return f, df


def _branch_values(x: np.ndarray, n: int, seeds: np.ndarray, cfg: OptimizerConfig) -> np.ndarray:
    """Squared overlap of each tracked maximizer branch at configuration x."""
    sqrtc = sqrt_binomials(n)
    f, _ = _branch_values_and_grads(x, n, seeds, cfg, sqrtc)
    return f


def _collect_branches(d: DickeVector, cfg: OptimizerConfig, window: float = 5e-3,
                      cap: int = 12) -> np.ndarray:
    """Seeds of all overlap branches within `window` of the maximum.

    Near a minimax optimum the contending branches differ by far more than
    the maximizer tie tolerance, so the polish needs every near-tie, not
    just the exact ties.
    """
    _, r_theta, r_phi, r_f, ok, f_grid_max, _ = _solve_landscape(d, cfg, strict=False)
    f_max = max(float(np.max(r_f[ok])) if ok.any() else -np.inf, f_grid_max)
    keep = ok & (r_f >= f_max - window)
    reps = _cluster_maximizers(
        r_theta[keep], r_phi[keep], r_f[keep], cfg.maximizer_cluster_radius
    )
    return np.array([[p.theta, p.phi] for p in reps[:cap]])


def _minimax_polish(x0: np.ndarray, n: int, cfg: OptimizerConfig) -> np.ndarray:
    """Equalize the tied overlap maxima around x0 with an epigraph solve.

    The search objective is the max over several smooth overlap branches, so
    near the optimum plain descent stalls on the kinks; minimizing t subject
    to every branch staying below t restores superlinear convergence.
    """
    best_x = np.asarray(x0, dtype=float).copy()
    best_val = _max_overlap_sq(_state_from_vars(best_x, n), cfg)
    sqrtc = sqrt_binomials(n)
    seeds = np.empty((0, 2))
    radius = 0.05
    for _ in range(12):
        # Accumulate every branch ever seen near the top: a branch that rose
        # only after an equalization step must stay in the model, or the
        # next step slides along the slack direction and re-raises it.
        new_seeds = _collect_branches(_state_from_vars(best_x, n), cfg)
        for seed in new_seeds:
            if seeds.size == 0 or np.min(
                np.hypot(seeds[:, 0] - seed[0], seeds[:, 1] - seed[1])
            ) > 1e-3:
                seeds = np.vstack([seeds, seed[None, :]])
        seeds = seeds[-16:]
        if seeds.size == 0:
            break

        cache: dict[bytes, tuple[np.ndarray, np.ndarray]] = {}

        def branch_pack(xv, seeds=seeds, cache=cache):
            key = xv.tobytes()
            if key not in cache:
                cache.clear()
                cache[key] = _branch_values_and_grads(xv, n, seeds, cfg, sqrtc)
            return cache[key]

        def cons_fun(z):
            f, _ = branch_pack(np.array(z[:-1]))
            return z[-1] - f

        def cons_jac(z):
            _, df = branch_pack(np.array(z[:-1]))
            return np.hstack([-df, np.ones((df.shape[0], 1))])

        t0 = float(np.max(branch_pack(best_x)[0])) + 1e-9
        z0 = np.append(best_x, t0)
        bounds = [(xi - radius, xi + radius) for xi in best_x] + [(0.0, 1.0)]
        sol = minimize(
            lambda z: z[-1],
            z0,
            jac=lambda z: np.append(np.zeros(z.size - 1), 1.0),
            method="SLSQP",
            bounds=bounds,
            constraints=[{"type": "ineq", "fun": cons_fun, "jac": cons_jac}],
            options={"ftol": 1e-16, "maxiter": 120},
        )
        x_new = sol.x[:-1]
        val_new = _max_overlap_sq(_state_from_vars(x_new, n), cfg)
        if val_new < best_val - 1e-15:
            best_val, best_x = val_new, x_new.copy()
        else:
            radius /= 3.0
            if radius < 3e-5:
                break
    return best_x


def search_max_entangled(
    n: int, cfg: OptimizerConfig | None = None, restarts: int = 64
) -> tuple[MajoranaSet, EntanglementResult]:
    """Search for the most entangled symmetric n-qubit state.

    Multistart Nelder-Mead over the 2n-3 gauge-fixed sphere angles with the
    inner overlap maximization solved at every step, followed by a minimax
    polish of the best candidates.  Seeded and deterministic; quality is
    asserted by the acceptance tests, not by this routine.
    """
    if n < 2:
        raise ValueError("the search needs at least two qubits")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    cfg = cfg or OptimizerConfig()
    rng = np.random.default_rng(cfg.seed)
    dim = 2 * n - 3

    def objective(x):
        return _max_overlap_sq(_state_from_vars(x, n), cfg, fast=True)

    coarse: list[tuple[float, np.ndarray]] = []
    for _ in range(restarts):
        x0 = _sample_start(rng, n)
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "xatol": 1e-5,
                "fatol": 1e-8,
                "maxfev": 100 * dim,
                "adaptive": True,
            },
        )
        coarse.append((float(res.fun), res.x))
    coarse.sort(key=lambda item: item[0])

    polished: list[tuple[float, np.ndarray]] = []
    for value, x in coarse[: min(3, len(coarse))]:
        x_fine = _minimax_polish(x, n, cfg)
        polished.append((_max_overlap_sq(_state_from_vars(x_fine, n), cfg), x_fine))

    best_val = min(value for value, _ in polished)
    ties = [
        (value, x)
        for value, x in polished
        if value <= best_val + 1e-10
    ]
    ties.sort(key=lambda item: _canonical_angle_key(_points_from_vars(item[1], n)))
    best_x = ties[0][1]

    points = MajoranaSet(_points_from_vars(best_x, n))
    result = geometric_entanglement(dicke_from_majorana(points), cfg)
    return points, result


# ---------------------------------------------------------------------------
# Certified values for the small-n optima

# Certified polynomial (ascending powers) whose largest real root equals the
# base-point cos(theta0) of the five-qubit optimal square pyramid.
N5_COS_THETA0_POLY = (101.0, 362.0, 308.0, 894.0, 670.0, 894.0, 308.0, 362.0, 101.0)
# Certified polynomial whose smallest real root equals the five-qubit
# maximal entanglement.
N5_ENTANGLEMENT_POLY = (25.0, -475.0, 7630.0, -18980.0, 12824.0)


def _real_roots(ascending_coeffs) -> np.ndarray:
    roots = np.roots(np.array(ascending_coeffs, dtype=float)[::-1])
    real = roots[np.abs(roots.imag) <= 1e-9 * np.maximum(1.0, np.abs(roots.real))]
    return np.sort(real.real)


@lru_cache(maxsize=1)
def certified_n5_cos_theta0() -> float:
    """Largest real root of the certified base-angle polynomial."""
    return float(_real_roots(N5_COS_THETA0_POLY)[-1])


@lru_cache(maxsize=1)
def certified_n5_entanglement() -> float:
    """Smallest real root of the certified entanglement polynomial."""
    return float(_real_roots(N5_ENTANGLEMENT_POLY)[0])


@dataclass(frozen=True)
class CertificateCheck:
    label: str
    observed: float
    expected: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.observed - self.expected) <= self.tolerance


@dataclass(frozen=True)
class CertificateReport:
    checks: tuple[CertificateCheck, ...]

    @property
    def ok(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> tuple[CertificateCheck, ...]:
        return tuple(check for check in self.checks if not check.passed)

    def lines(self) -> list[str]:
        return [
            f"[{'PASS' if c.passed else 'FAIL'}] {c.label}: "
            f"observed {c.observed:.12g}, expected {c.expected:.12g} (tol {c.tolerance:g})"
            for c in self.checks
        ]


def _pairwise_angles(m: MajoranaSet) -> np.ndarray:
    vecs = m.vectors()
    dots = np.clip(vecs @ vecs.T, -1.0, 1.0)
    iu = np.triu_indices(len(vecs), k=1)
    return np.arccos(dots[iu])


def _apex_aligned_base_cos(m: MajoranaSet) -> tuple[float, float]:
    """cos(theta) statistics of the ring after rotating the best apex to the pole.

    Returns (mean, std) over the aligned non-apex points for the apex choice
    that makes the ring most coplanar.
    """
    vecs = m.vectors()
    best = (math.inf, 0.0)
    for i in range(len(vecs)):
        others = np.delete(vecs, i, axis=0)
        cos_t = others @ vecs[i]
        spread = float(np.std(cos_t))
        if spread < best[0]:
            best = (spread, float(np.mean(cos_t)))
    return best[1], best[0]


def verify_extremal_certificates(
    results: dict[int, tuple[MajoranaSet, EntanglementResult]] | None = None,
    cfg: OptimizerConfig | None = None,
    restarts: int = 64,
) -> CertificateReport:
    """Check searched optima for n = 4, 5, 6 against their certified values.

    `results` maps n to a (points, entanglement) pair; missing entries are
    recomputed by :func:`search_max_entangled`.  For n = 5 the certified
    values are polynomial roots; n = 4 and 6 are exact rationals with
    polyhedral angle structure.
    """
    cfg = cfg or OptimizerConfig()
    results = dict(results or {})
    for n in (4, 5, 6):
        if n not in results:
            results[n] = search_max_entangled(n, cfg, restarts)

    checks: list[CertificateCheck] = []

    m4, r4 = results[4]
    checks.append(CertificateCheck("n=4 entanglement = 2/3", r4.e_g, 2.0 / 3.0, 1e-6))
    tet_angle = math.acos(-1.0 / 3.0)
    angles4 = _pairwise_angles(m4)
    checks.append(
        CertificateCheck(
            "n=4 tetrahedral pair angle spread",
            float(np.max(np.abs(angles4 - tet_angle))),
            0.0,
            1e-5,
        )
    )

    m5, r5 = results[5]
    checks.append(
        CertificateCheck(
            "n=5 entanglement vs certified quartic root",
            r5.e_g,
            certified_n5_entanglement(),
            1e-8,
        )
    )
    cos_mean, cos_spread = _apex_aligned_base_cos(m5)
    checks.append(
        CertificateCheck(
            "n=5 base cos(theta0) vs certified octic root",
            cos_mean,
            certified_n5_cos_theta0(),
            1e-8,
        )
    )
    checks.append(
        CertificateCheck("n=5 square-ring coplanarity", cos_spread, 0.0, 1e-7)
    )
    # Printed table values carry a trailing ellipsis, so compare truncations.
    checks.append(
        CertificateCheck(
            "n=5 entanglement printed value (truncated)",
            math.floor(r5.e_g * 1e4) / 1e4,
            0.7011,
            1e-12,
        )
    )
    checks.append(
        CertificateCheck(
            "n=5 base angle printed value (truncated)",
            math.floor(math.acos(min(1.0, max(-1.0, cos_mean))) * 1e4) / 1e4,
            1.8737,
            1e-12,
        )
    )

    m6, r6 = results[6]
    checks.append(CertificateCheck("n=6 entanglement = 7/9", r6.e_g, 7.0 / 9.0, 1e-6))
    angles6 = _pairwise_angles(m6)
    octa_dev = np.minimum(np.abs(angles6 - math.pi / 2.0), np.abs(angles6 - math.pi))
    checks.append(
        CertificateCheck(
            "n=6 octahedral pair angle spread", float(np.max(octa_dev)), 0.0, 1e-5
        )
    )
    return CertificateReport(tuple(checks))


@lru_cache(maxsize=1)
def _n5_mixing_weight() -> float:
    """Weight of the four-excitation component in the five-qubit optimum.

    Recovered by maximizing the entanglement along the known one-parameter
    family, which pins the weight to the precision the certified polynomial
    roots allow.
    """
    def negative_entanglement(xi: float) -> float:
        coeffs = np.zeros(6, dtype=complex)
        coeffs[0] = math.sqrt(1.0 - xi * xi)
        coeffs[4] = -xi
        return -geometric_entanglement(DickeVector(coeffs)).e_g

    res = minimize_scalar(
        negative_entanglement, bounds=(0.5, 0.99), method="bounded",
        options={"xatol": 1e-12},
    )
    return float(res.x)


def dicke_form_of_maximal_states(n: int) -> DickeVector:
    """Excitation-basis form of the most entangled state for n in {4, 5, 6}."""
    if n == 4:
        coeffs = np.zeros(5, dtype=complex)
        coeffs[0] = math.sqrt(1.0 / 3.0)
        coeffs[3] = math.sqrt(2.0 / 3.0)
        return DickeVector(coeffs)
    if n == 5:
        xi = _n5_mixing_weight()
        coeffs = np.zeros(6, dtype=complex)
        coeffs[0] = math.sqrt(1.0 - xi * xi)
        coeffs[4] = -xi
        return DickeVector(coeffs)
    if n == 6:
        coeffs = np.zeros(7, dtype=complex)
        coeffs[1] = math.sqrt(0.5)
        coeffs[5] = math.sqrt(0.5)
        return DickeVector(coeffs)
    raise ValueError("closed forms are available for n in {4, 5, 6} only")


def bures_from_entanglement(e_g: float) -> float:
    """Bures distance to the closest coherent state, as a function of e_g."""
    if not 0.0 <= e_g < 1.0:
        raise ValueError("e_g must lie in [0, 1)")
    return math.sqrt(2.0 - 2.0 * math.sqrt(1.0 - e_g))


def bures_quantumness(d: DickeVector, cfg: OptimizerConfig | None = None) -> float:
    """Bures distance from a pure symmetric state to the coherent-state set."""
    return bures_from_entanglement(geometric_entanglement(d, cfg).e_g)
