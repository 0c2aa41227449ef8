"""Schwarz-lemma verification: pull-back ratios, their fiber suprema, the
global comparison with K1/K2 and the auxiliary maximum-principle function."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .chern import curvature_bound_estimate
from .errors import (
    ConfigurationError,
    DegenerateVariationError,
    DomainError,
    HypothesisViolationError,
    ShapeError,
)
from .kahler import KahlerModel
from .maps import HolomorphicMap, identity_map
from .metrics import MetricDescriptor, SamplePlan, metric_values, sample_ball, sample_sphere
from .wirtinger import ZERO_SECTION_EPS, JetPoint, Jet, jet_space, seed_jets

DEGENERATE_PUSH = 1e-14


# --------------------------------------------------------------------------
# ratio and fiber supremum
# --------------------------------------------------------------------------


def _image(f: HolomorphicMap, H: MetricDescriptor, Z):
    W = np.array([np.broadcast_to(np.asarray(w, dtype=complex), Z.shape[1:]) for w in f(list(Z))])
    H.check_point(W)
    return W


def ratio_batch(f: HolomorphicMap, G: MetricDescriptor, H: MetricDescriptor, Z, V) -> np.ndarray:
    """``u = (f*H)(z; v) / G(z; v)``; exact zeros of ``f_*(v)`` give ``u = 0``."""
    Z = np.asarray(Z, dtype=complex).reshape(G.dim, -1)
    V = np.asarray(V, dtype=complex).reshape(G.dim, -1)
    if f.n != G.dim or f.m != H.dim:
        raise ShapeError(f"map {f.name}: C^{f.n} → C^{f.m} does not match metrics on C^{G.dim} and C^{H.dim}")
    if np.any(np.linalg.norm(V, axis=0) < ZERO_SECTION_EPS):
        raise DomainError("ratio is undefined for the zero direction")
    G.check_point(Z)
    W = _image(f, H, Z)
    P = np.array([np.broadcast_to(np.asarray(p, dtype=complex), Z.shape[1:]) for p in f.push(list(Z), list(V))])
    zero = np.linalg.norm(P, axis=0) <= DEGENERATE_PUSH * np.linalg.norm(V, axis=0)
    P[:, zero] = 1.0
    top = metric_values(H, W, P)
    top[zero] = 0.0
    return top / metric_values(G, Z, V)


def ratio_u(f: HolomorphicMap, G: MetricDescriptor, H: MetricDescriptor, p: JetPoint) -> float:
    return float(ratio_batch(f, G, H, p.z, p.v)[0])


@dataclass(frozen=True)
class FiberPlan:
    """Multi-start ascent on the unit sphere: the coordinate directions plus
    ``restarts_per_dim * n`` seeded random directions."""

    restarts_per_dim: int = 8
    seed: int = 0
    max_iter: int = 200
    gtol: float = 1e-10


def _ratio_with_gradient(f, G, H, Z, V):
    """u and its complex v-gradient ``2 ∂u/∂v̄`` via a first-order jet in v."""
    n = G.dim
    S = jet_space(n, 1, (0, 0, 1, 1))
    z, v = seed_jets(S, Z, V)
    P = f.push(z, v)
    Pval = np.array([p.value if isinstance(p, Jet) else np.broadcast_to(p, Z.shape[1:]) for p in P])
    zero = np.linalg.norm(Pval, axis=0) <= DEGENERATE_PUSH
    u = H(f(z), P) / G(z, v)
    val = np.real(u.value)
    grad = np.stack([2 * u.diff("vb", a).value for a in range(n)])
    val[zero] = 0.0
    grad[:, zero] = 0.0
    return val, grad


def fiber_sup_batch(f: HolomorphicMap, G: MetricDescriptor, H: MetricDescriptor, Z, plan: FiberPlan = FiberPlan()):
    """``ũ(z) = max_v u(z; v)`` at each column of Z.

    Returns ``(values, directions, converged)``.
    """
    Z = np.asarray(Z, dtype=complex).reshape(G.dim, -1)
    n, B = G.dim, Z.shape[1]
    G.check_point(Z)
    _image(f, H, Z)
    if n == 1:
        V = np.ones((1, B), dtype=complex)
        return ratio_batch(f, G, H, Z, V), V, np.ones(B, dtype=bool)
    rng = np.random.default_rng(plan.seed)
    starts = np.concatenate([np.eye(n, dtype=complex), sample_sphere(rng, n, plan.restarts_per_dim * n)], axis=1)
    S = starts.shape[1]
    Zr = np.repeat(Z, S, axis=1)
    V = np.tile(starts, (1, B))
    u, g = _ratio_with_gradient(f, G, H, Zr, V)
    step = np.full(u.size, 0.25)
    alive = np.ones(u.size, dtype=bool)
    for _ in range(plan.max_iter):
        gnorm = np.linalg.norm(g, axis=0)
        alive &= gnorm > plan.gtol * (1 + np.abs(u))
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        Vt = V[:, idx] + step[idx] * g[:, idx] / gnorm[idx]
        Vt /= np.linalg.norm(Vt, axis=0)
        ut, gt = _ratio_with_gradient(f, G, H, Zr[:, idx], Vt)
        better = ut > u[idx]
        j = idx[better]
        V[:, j], u[j], g[:, j] = Vt[:, better], ut[better], gt[:, better]
        step[j] = np.minimum(step[j] * 2, 0.5)
        k = idx[~better]
        step[k] *= 0.5
        alive[k[step[k] < 1e-13]] = False
    u = u.reshape(B, S)
    best = np.argmax(u, axis=1)
    conv = ~alive.reshape(B, S)[np.arange(B), best]
    dirs = V.reshape(n, B, S)[:, np.arange(B), best]
    return u[np.arange(B), best], dirs, conv


@dataclass
class FiberResult:
    value: float
    direction: np.ndarray
    converged: bool


def fiber_sup(f: HolomorphicMap, G: MetricDescriptor, H: MetricDescriptor, z, plan: FiberPlan = FiberPlan()) -> FiberResult:
    vals, dirs, conv = fiber_sup_batch(f, G, H, np.asarray(z, dtype=complex).reshape(-1, 1), plan)
    return FiberResult(float(vals[0]), dirs[:, 0], bool(conv[0]))


# --------------------------------------------------------------------------
# Schwarz check
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SchwarzConfig:
    """Curvature constants and sampling.  With ``bounds_source="estimated"``
    missing constants are estimated on the source ball and on the target
    ball of radius ``target_radius`` and padded by 1% conservatively."""

    K1: Optional[float] = None
    K2: Optional[float] = None
    bounds_source: str = "user"
    plan: SamplePlan = SamplePlan(200, 0.99, 0)
    target_radius: Optional[float] = None
    estimate_samples: int = 100
    fiber: FiberPlan = FiberPlan()

    def __post_init__(self):
        if self.bounds_source not in ("user", "estimated"):
            raise ConfigurationError("bounds_source must be 'user' or 'estimated'")
        if self.bounds_source == "user" and (self.K1 is None or self.K2 is None):
            raise ConfigurationError("user bounds need both K1 and K2")


def _pad(x: float, toward: str) -> float:
    """Move x by 1% of its size in the given direction."""
    d = 0.01 * abs(x)
    return x - d if toward == "down" else x + d


def _target_radius(H: MetricDescriptor, cfg: SchwarzConfig) -> float:
    if cfg.target_radius is not None:
        return cfg.target_radius
    if H.domain_radius is None:
        return 1.0
    return H.domain_radius if H.domain_closed else 0.99 * H.domain_radius


@dataclass
class SchwarzReport:
    K1: float
    K2: float
    bounds_source: str
    bound: float
    tolerance: float
    max_ratio: float
    witness_z: np.ndarray
    witness_v: np.ndarray
    table: list = field(repr=False)
    verdict: bool = True
    all_converged: bool = True
    note: Optional[str] = None

    def to_dict(self) -> dict:
        cp = lambda a: [[float(x.real), float(x.imag)] for x in np.ravel(a)]
        return {
            "K1": self.K1, "K2": self.K2, "bounds_source": self.bounds_source,
            "bound": self.bound, "tolerance": self.tolerance, "max_ratio": self.max_ratio,
            "witness": {"z": cp(self.witness_z), "v": cp(self.witness_v)},
            "verdict": self.verdict, "all_converged": self.all_converged, "note": self.note,
            "samples": [{"z": cp(z), "u_tilde": u} for z, u in self.table],
        }

    def to_csv(self) -> str:
        return _grid_csv([(complex(np.ravel(z)[0]), u) for z, u in self.table])

    def to_svg(self, size: int = 400) -> str:
        pts = [complex(np.ravel(z)[0]) for z, _ in self.table]
        return heatmap_svg(pts, [u for _, u in self.table], size, midpoint=self.bound)


def schwarz_check(f: HolomorphicMap, G: MetricDescriptor, H: MetricDescriptor, config: SchwarzConfig) -> SchwarzReport:
    """Sample ``ũ`` over a ball and compare its maximum with ``K1/K2``."""
    K1, K2 = config.K1, config.K2
    if K2 is not None and K2 >= 0:
        raise HypothesisViolationError(f"target curvature bound K2 = {K2} must be negative")
    if config.bounds_source == "estimated":
        if K1 is None:
            est = curvature_bound_estimate(G, SamplePlan(config.estimate_samples, config.plan.radius, config.plan.seed))
            K1 = _pad(est.inf, "down")
        if K2 is None:
            est = curvature_bound_estimate(H, SamplePlan(config.estimate_samples, _target_radius(H, config), config.plan.seed))
            if est.sup >= 0:
                raise HypothesisViolationError(f"estimated target curvature supremum {est.sup:.6g} is not negative")
            K2 = _pad(est.sup, "up")
            if K2 >= 0:
                raise HypothesisViolationError("padded target curvature bound is not negative")
    bound = K1 / K2
    tol = 1e-6 + 1e-3 * abs(bound)
    rng = np.random.default_rng(config.plan.seed)
    Z = sample_ball(rng, G.dim, config.plan.count, config.plan.radius, config.plan.inner)
    Z[:, 0] = 0
    vals, dirs, conv = fiber_sup_batch(f, G, H, Z, config.fiber)
    k = int(np.argmax(vals))
    note = None
    if K1 >= 0 > K2:
        note = "K1 >= 0 > K2: the bound is non-positive, so every such map is constant"
    table = [(Z[:, j].copy(), float(vals[j])) for j in range(Z.shape[1])]
    return SchwarzReport(float(K1), float(K2), config.bounds_source, float(bound), float(tol),
                         float(vals[k]), Z[:, k], dirs[:, k], table,
                         bool(vals[k] <= bound + tol), bool(np.all(conv)), note)


# --------------------------------------------------------------------------
# curvature inequalities along composed disks
# --------------------------------------------------------------------------


def _conformal_batch(lam2, zeta):
    """``(λ², ∂∂̄ log λ²)`` at each ζ."""
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    S = jet_space(1, 2, (1, 1, 0, 0))
    val = lam2([S.variable("z", 0, zeta)])
    l0 = np.real(val.value)
    out = np.full(zeta.shape, np.nan)
    ok = l0 > 0
    if np.any(ok):
        dd = val.log().diff("z", 0).diff("zb", 0).value
        out[ok] = np.real(dd[ok])
    return l0, out


def _disk_factors(phi: HolomorphicMap, f: HolomorphicMap, G: MetricDescriptor, H: MetricDescriptor):
    comp = phi.then(f)

    def lam2(zeta):
        return G(phi(zeta), phi.push(zeta, [zeta[0] * 0 + 1.0]))

    def sig2(zeta):
        return H(comp(zeta), comp.push(zeta, [zeta[0] * 0 + 1.0]))

    return lam2, sig2


@dataclass
class CurvatureInequalityCheck:
    sigma_worst_slack: float
    lambda_worst_slack: float
    points: int
    skipped: int

    @property
    def passed(self) -> bool:
        return self.sigma_worst_slack >= 0 and self.lambda_worst_slack >= 0


def curvature_inequalities(f: HolomorphicMap, G: MetricDescriptor, H: MetricDescriptor, K1: float, K2: float,
                           zeta, phi: Optional[HolomorphicMap] = None) -> CurvatureInequalityCheck:
    """Along ``φ`` (default: identity of a one-dimensional source) check
    ``∂∂̄ log σ² ≥ −K2 σ²/2`` and ``∂∂̄ log λ² ≤ −K1 λ²/2``, the forms of
    "curvature of σ² ≤ K2" and "curvature of λ² ≥ K1" for ``K = −2∂∂̄log/·``.

    The λ side presumes φ realizes the holomorphic sectional curvature of G
    (automatic for one-dimensional sources).  Slack is measured against the
    tolerance ``1e-4 (1 + |value|)``; points with σ ≤ 1e-6 are skipped.
    """
    if phi is None:
        if G.dim != 1:
            raise ConfigurationError("a disk φ is required when the source has dimension > 1")
        phi = identity_map(1)
    lam2, sig2 = _disk_factors(phi, f, G, H)
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    l0, ddl = _conformal_batch(lam2, zeta)
    s0, dds = _conformal_batch(sig2, zeta)
    keep = s0 > 1e-12
    tol_s = 1e-4 * (1 + np.abs(dds))
    tol_l = 1e-4 * (1 + np.abs(ddl))
    s_slack = (dds - (-K2 * s0 / 2) + tol_s)[keep]
    l_slack = (-K1 * l0 / 2) - ddl + tol_l
    return CurvatureInequalityCheck(float(np.min(s_slack)) if s_slack.size else np.inf,
                                    float(np.min(l_slack)), int(zeta.size), int(np.sum(~keep)))


# --------------------------------------------------------------------------
# auxiliary function
# --------------------------------------------------------------------------


@dataclass
class PhiTrace:
    zeta: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    maximizer: Optional[complex]
    max_value: float
    grad_log: Optional[float]
    ddbar_log: Optional[float]
    boundary_ratio: float
    first_order_ok: bool
    second_order_ok: bool

    def to_dict(self) -> dict:
        mz = None if self.maximizer is None else [self.maximizer.real, self.maximizer.imag]
        return {"maximizer": mz, "max_value": self.max_value, "grad_log": self.grad_log,
                "ddbar_log": self.ddbar_log, "boundary_ratio": self.boundary_ratio,
                "first_order_ok": self.first_order_ok, "second_order_ok": self.second_order_ok}

    def to_csv(self) -> str:
        return _grid_csv(zip(self.zeta.ravel(), self.values.ravel()))

    def to_svg(self, size: int = 400) -> str:
        return heatmap_svg(self.zeta.ravel(), self.values.ravel(), size)


def _phi_function(phi, f, G, H, source: KahlerModel, a, b):
    lam2, sig2 = _disk_factors(phi, f, G, H)
    disk = KahlerModel.disk()

    def log_phi(zeta):
        rho2 = source.rho2(phi(zeta))
        vr2 = disk.rho2(zeta)
        return 2 * np.log(a * a - rho2) + 2 * np.log(b * b - vr2) + np.log(sig2(zeta)) - np.log(lam2(zeta))

    def value(zeta):
        rho2 = source.rho2(phi(zeta))
        vr2 = disk.rho2(zeta)
        return (a * a - rho2) ** 2 * (b * b - vr2) ** 2 * sig2(zeta) / lam2(zeta)

    return log_phi, value, lam2


def _log_derivatives(log_phi, zeta: complex):
    S = jet_space(1, 2)
    F = log_phi([S.variable("z", 0, np.array([zeta]))])
    Fz = F.diff("z", 0)
    Fzz = Fz.diff("z", 0).value[0]
    Fzb = Fz.diff("zb", 0).value[0]
    Fbb = F.diff("zb", 0).diff("zb", 0).value[0]
    fz = Fz.value[0]
    grad = np.array([2 * fz.real, -2 * fz.imag])
    hess = np.array([[np.real(Fzz + 2 * Fzb + Fbb), np.real(1j * (Fzz - Fbb))],
                     [np.real(1j * (Fzz - Fbb)), np.real(-Fzz + 2 * Fzb - Fbb)]])
    return fz, float(np.real(Fzb)), grad, hess


def phi_trace(f: HolomorphicMap, G: MetricDescriptor, H: MetricDescriptor, a: float, b: float,
              phi: Optional[HolomorphicMap] = None, source: Optional[KahlerModel] = None,
              grid: tuple = (256, 64), refine_steps: int = 30) -> PhiTrace:
    """Evaluate ``Φ = (a² − ρ²∘φ)² (b² − ϱ²)² σ²/λ²`` on a polar grid uniform in
    ϱ ≤ b, locate its maximum and refine it by Newton steps on log Φ."""
    if a <= 0 or b <= 0:
        raise ConfigurationError("radii a and b must be positive")
    if phi is None:
        phi = identity_map(1)
    if source is None:
        source = KahlerModel.disk() if G.dim == 1 and G.name == "poincare-disk" else KahlerModel.flat(G.dim)
    if source.n != G.dim or phi.m != G.dim or phi.n != 1:
        raise ShapeError("φ must map the disk into the source chart")
    nr, na = grid
    rr = b * np.arange(1, nr + 1) / nr
    th = 2 * np.pi * np.arange(na) / na
    zeta = np.tanh(rr)[:, None] * np.exp(1j * th)[None, :]
    log_phi, value, lam2 = _phi_function(phi, f, G, H, source, a, b)
    zl = [zeta.ravel()]
    img = np.array([np.broadcast_to(np.asarray(x, dtype=complex), zeta.size) for x in phi(zl)])
    if np.any(source.distance(img) > a * (1 + 1e-12)):
        raise ConfigurationError("φ leaves the radius-a ball on the grid")
    l2 = np.real(np.asarray(lam2(zl), dtype=complex))
    if np.any(l2 <= 0):
        raise DegenerateVariationError("λ² vanishes on the grid")
    vals = np.real(np.asarray(value(zl), dtype=complex)).reshape(zeta.shape)
    vals = np.where(np.isfinite(vals), vals, 0.0)
    vmax = float(np.max(vals))
    boundary = float(np.max(vals[-1]) / vmax) if vmax > 0 else 0.0
    if vmax <= 0:
        return PhiTrace(zeta, vals, None, 0.0, None, None, boundary, True, True)
    k = np.unravel_index(int(np.argmax(vals)), vals.shape)
    z = complex(zeta[k])
    fz, ddb, g, Hm = _log_derivatives(log_phi, z)
    for _ in range(refine_steps):
        step = -np.linalg.pinv(Hm, rcond=1e-8) @ g
        t = 1.0
        for _half in range(20):
            zt = z + t * complex(step[0], step[1])
            if np.arctanh(abs(zt)) < b:
                fzt, ddbt, gt, Ht = _log_derivatives(log_phi, zt)
                if np.linalg.norm(gt) < np.linalg.norm(g):
                    z, fz, ddb, g, Hm = zt, fzt, ddbt, gt, Ht
                    break
            t *= 0.5
        else:
            break
    vz = float(np.real(value([np.array([z])])[0]))
    return PhiTrace(zeta, vals, z, max(vz, vmax), float(abs(fz)), ddb, boundary,
                    bool(abs(fz) < 1e-6), bool(ddb <= 1e-6))


# --------------------------------------------------------------------------
# export
# --------------------------------------------------------------------------


def _grid_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im", "value"])
    for z, v in rows:
        w.writerow([repr(float(np.real(z))), repr(float(np.imag(z))), repr(float(v))])
    return buf.getvalue()


_RAMP = np.array([[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]], dtype=float)
_DIVERGING = np.array([[33, 102, 172], [146, 197, 222], [247, 247, 247], [244, 165, 130], [178, 24, 43]], dtype=float)


def _colour(t: float, ramp: np.ndarray = _RAMP) -> str:
    x = np.clip(t, 0, 1) * (len(ramp) - 1)
    i = min(int(x), len(ramp) - 2)
    c = ramp[i] + (x - i) * (ramp[i + 1] - ramp[i])
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


def heatmap_svg(points, values, size: int = 400, midpoint: Optional[float] = None) -> str:
    """Scatter heatmap of values at complex points of the unit disk.

    With ``midpoint`` a blue-white-red palette centres that value on white,
    so values above it read red; otherwise a sequential ramp spans the range.
    """
    points = np.asarray(points, dtype=complex)
    values = np.asarray(values, dtype=float)
    if midpoint is None:
        lo, hi = float(np.min(values)), float(np.max(values))
        t = (values - lo) / ((hi - lo) or 1.0)
        ramp = _RAMP
    else:
        span = float(np.max(np.abs(values - midpoint))) or 1.0
        t = 0.5 + 0.5 * (values - midpoint) / span
        ramp = _DIVERGING
    half = size / 2
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
           f'<rect width="{size}" height="{size}" fill="white"/>']
    for z, tv in zip(points, t):
        x, y = half + 0.95 * half * z.real, half - 0.95 * half * z.imag
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="1.6" fill="{_colour(tv, ramp)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def report_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
