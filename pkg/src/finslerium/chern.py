"""Chern-Finsler connection, curvature blocks and holomorphic sectional
curvature, plus one-dimensional Gaussian curvature and curve restrictions.

All quantities are computed on batches of jet points.  Derivatives of G come
from one Taylor jet; the connection algebra is then carried out on
first-order "dual" tensors whose leading axis holds the value followed by
the ∂/∂z̄^ν and ∂/∂v̄^γ derivatives, which is all the curvature needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize

from .errors import (
    ConfigurationError,
    DegenerateCurveError,
    DomainError,
    IllConditionedMetricError,
    ShapeError,
)
from .metrics import MetricDescriptor, SamplePlan, metric_values, sample_ball, sample_sphere
from .wirtinger import AUTO, DifferentiationPlan, JetPoint, _check_batch, jet_space, taylor_jet

COND_LIMIT = 1e12
BLOCKS = ("hh", "vh", "hv", "vv")


# --------------------------------------------------------------------------
# dual-tensor helpers
# --------------------------------------------------------------------------


def _dmul(spec: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product rule for first-order dual tensors shaped ``(1 + 2n, B, ...)``."""
    lhs, out = spec.split("->")
    sa, sb = lhs.split(",")
    v = np.einsum(f"q{sa},q{sb}->q{out}", a[0], b[0])
    d = np.einsum(f"pq{sa},q{sb}->pq{out}", a[1:], b[0]) + np.einsum(f"q{sa},pq{sb}->pq{out}", a[0], b[1:])
    return np.concatenate([v[None], d])


def _dual(jet, n: int) -> np.ndarray:
    parts = [jet.value] + [jet.diff("zb", k).value for k in range(n)] + [jet.diff("vb", k).value for k in range(n)]
    return np.stack(parts)


def _dual_tensor(jets, n: int) -> np.ndarray:
    """Nested lists of jets → dual array with tensor axes after the batch."""
    arr = np.array(jets, dtype=object)
    shape = arr.shape
    flat = [_dual(j, n) for j in arr.ravel()]
    D = np.stack(flat, axis=-1)
    return D.reshape(D.shape[:-1] + shape)


def _delta_bar(T: np.ndarray, gsemi0: np.ndarray, n: int) -> np.ndarray:
    """δ_ν̄ T = ∂_ν̄ T − conj(Γ^σ_{;ν}) ∂̇_σ̄ T, new leading axis ν."""
    return T[1:n + 1] - np.einsum("qsv,sq...->vq...", np.conj(gsemi0), T[n + 1:])


# --------------------------------------------------------------------------
# core pipeline
# --------------------------------------------------------------------------


@dataclass
class ConnectionCoeffs:
    """Chern-Finsler coefficients at one jet point.

    ``gamma_semicolon[b, a] = Γ^b_{;a}``, ``gamma_mixed[a, b, m] = Γ^a_{b;m}``,
    ``gamma_vertical[a, b, g] = Γ^a_{bg}``.
    """

    gamma_semicolon: np.ndarray
    gamma_mixed: np.ndarray
    gamma_vertical: np.ndarray
    site: JetPoint


@dataclass
class CurvatureBlock:
    """Curvature components at one jet point; unrequested blocks are None.

    Index order: ``hh[a, b, m, nu] = R^a_{b;m nū}``, ``vh[a, b, d, nu] =
    R^a_{bd;nū}``, ``hv[a, b, g, m] = R^a_{bḡ;m}``, ``vv[a, b, d, g] = R^a_{bdḡ}``.
    """

    site: JetPoint
    hh: Optional[np.ndarray] = None
    vh: Optional[np.ndarray] = None
    hv: Optional[np.ndarray] = None
    vv: Optional[np.ndarray] = None


@dataclass
class _Pipeline:
    G: np.ndarray
    levi: np.ndarray
    gsemi: np.ndarray
    gmixed: np.ndarray
    gvert: np.ndarray


def _connection_duals(m: MetricDescriptor, Z, V, plan: DifferentiationPlan) -> _Pipeline:
    Z, V = _check_batch(Z, V)
    n = m.dim
    if Z.shape[0] != n:
        raise ShapeError(f"metric {m.name!r} has dim {n}, points have {Z.shape[0]}")
    m.check_point(Z)
    g = taylor_jet(m, Z, V, jet_space(n, 4, (1, 1, 2, 2)), plan)

    gv = [g.diff("v", b) for b in range(n)]
    Lj = [[gv[b].diff("vb", t) for t in range(n)] for b in range(n)]
    L = _dual_tensor(Lj, n)                                            # [b, t]
    A = _dual_tensor([[g.diff("vb", c).diff("z", a) for a in range(n)] for c in range(n)], n)
    Lz = _dual_tensor([[[Lj[b][t].diff("z", k) for k in range(n)] for t in range(n)] for b in range(n)], n)
    Lv = _dual_tensor([[[Lj[b][t].diff("v", s) for s in range(n)] for t in range(n)] for b in range(n)], n)

    L0 = L[0]
    cond = np.linalg.cond(L0)
    if not np.all(np.isfinite(cond)) or np.any(cond > COND_LIMIT):
        k = int(np.argmax(np.where(np.isfinite(cond), cond, np.inf)))
        raise IllConditionedMetricError(
            f"Levi matrix condition number {cond[k]:.3g} exceeds {COND_LIMIT:g} at z={Z[:, k]}, v={V[:, k]}"
        )
    # M = L^{-1}: sum_t L[b, t] M[t, a] = δ_ba
    M0 = np.linalg.solve(L0, np.broadcast_to(np.eye(n), L0.shape))
    dM = -np.einsum("qij,pqjk,qkl->pqil", M0, L[1:], M0)
    M = np.concatenate([M0[None], dM])

    gsemi = _dmul("cb,ca->ba", M, A)                                   # Γ^b_{;a}
    dL = Lz - _dmul("sk,bts->btk", gsemi, Lv)                          # δ_k G_{bt̄}
    gmixed = _dmul("ta,btk->abk", M, dL)                               # Γ^a_{b;k}
    gvert = _dmul("ta,btc->abc", M, Lv)                                # Γ^a_{bc}
    return _Pipeline(np.real(g.value), L0, gsemi, gmixed, gvert)


def _blocks(P: _Pipeline, n: int, which) -> dict:
    out = {}
    gs0 = P.gsemi[0]
    gv0 = P.gvert[0]
    if "hh" in which:
        dbm = _delta_bar(P.gmixed, gs0, n)                             # [nu, q, a, b, m]
        dbs = _delta_bar(P.gsemi, gs0, n)                              # [nu, q, s, m]
        hh = -dbm - np.einsum("qabs,vqsm->vqabm", gv0, dbs)
        out["hh"] = np.moveaxis(hh, 0, -1)
    if "vh" in which:
        out["vh"] = np.moveaxis(-_delta_bar(P.gvert, gs0, n), 0, -1)
    if "hv" in which:
        hv = -P.gmixed[n + 1:] - np.einsum("qabs,gqsm->gqabm", gv0, P.gsemi[n + 1:])
        out["hv"] = np.moveaxis(hv, 0, 3)
    if "vv" in which:
        out["vv"] = np.moveaxis(-P.gvert[n + 1:], 0, -1)
    return out


def curvature_batch(m: MetricDescriptor, Z, V, blocks=("hh",), plan: DifferentiationPlan = AUTO) -> dict:
    """Requested curvature blocks for a batch, each shaped ``(B, n, n, n, n)``."""
    bad = set(blocks) - set(BLOCKS)
    if bad:
        raise ConfigurationError(f"unknown curvature blocks {sorted(bad)}; choose from {BLOCKS}")
    P = _connection_duals(m, Z, V, plan)
    return _blocks(P, m.dim, set(blocks))


def hsc_batch(m: MetricDescriptor, Z, V, plan: DifferentiationPlan = AUTO):
    """Holomorphic sectional curvature and its imaginary residue for a batch."""
    Z, V = _check_batch(Z, V)
    P = _connection_duals(m, Z, V, plan)
    hh = _blocks(P, m.dim, {"hh"})["hh"]
    Vt, Vc = V.T, np.conj(V.T)
    c = np.einsum("qag,qabmn,qb,qm,qn,qg->q", P.levi, hh, Vt, Vt, Vc, Vc)
    K = 2 * c / P.G ** 2
    return np.real(K), np.abs(np.imag(K))


def connection_coefficients(m: MetricDescriptor, p: JetPoint, plan: DifferentiationPlan = AUTO) -> ConnectionCoeffs:
    P = _connection_duals(m, p.z, p.v, plan)
    return ConnectionCoeffs(P.gsemi[0, 0], P.gmixed[0, 0], P.gvert[0, 0], p)


def hh_curvature(m: MetricDescriptor, p: JetPoint, blocks=("hh",), plan: DifferentiationPlan = AUTO) -> CurvatureBlock:
    out = curvature_batch(m, p.z, p.v, blocks, plan)
    return CurvatureBlock(p, **{k: x[0] for k, x in out.items()})


def holomorphic_sectional_curvature(m: MetricDescriptor, p: JetPoint, plan: DifferentiationPlan = AUTO):
    """``(K_G(z; v), imaginary residue)`` from the contracted hh block."""
    K, res = hsc_batch(m, p.z, p.v, plan)
    return float(K[0]), float(res[0])


def curvature_report(m: MetricDescriptor, p: JetPoint) -> dict:
    K, res = holomorphic_sectional_curvature(m, p)
    return {"metric": m.to_dict(), "site": p.to_dict(), "K": K, "imag_residue": res}


# --------------------------------------------------------------------------
# Hermitian closed form
# --------------------------------------------------------------------------


def hermitian_hsc_batch(h_tensor, Z, V) -> np.ndarray:
    """Holomorphic sectional curvature of ``h_{ab̄}(z) v^a v̄^b`` from the
    Chern curvature ``R_{ab̄cd̄} = −∂_a∂_b̄ h_{cd̄} + h^{l̄r} ∂_a h_{cl̄} ∂_b̄ h_{rd̄}``."""
    if isinstance(h_tensor, MetricDescriptor):
        if h_tensor.h_tensor is None:
            raise ConfigurationError(f"metric {h_tensor.name!r} has no Hermitian tensor")
        h_tensor = h_tensor.h_tensor
    Z, V = _check_batch(Z, V)
    n = Z.shape[0]
    S = jet_space(n, 2, (1, 1, 0, 0))
    z = [S.variable("z", a, Z[a]) for a in range(n)]
    raw = h_tensor(z)
    B = Z.shape[1]

    def as_jet(x):
        return x if hasattr(x, "diff") else S.constant(np.broadcast_to(np.asarray(x, dtype=complex), (B,)))

    h = [[as_jet(raw[c][d]) for d in range(n)] for c in range(n)]
    H = np.stack([np.stack([h[c][d].value for d in range(n)], -1) for c in range(n)], -2)      # [q, c, d]
    dH = np.stack([np.stack([np.stack([h[c][d].diff("z", a).value for d in range(n)], -1)
                             for c in range(n)], -2) for a in range(n)], 1)                      # [q, a, c, d]
    dbH = np.stack([np.stack([np.stack([h[c][d].diff("zb", b).value for d in range(n)], -1)
                              for c in range(n)], -2) for b in range(n)], 1)                     # [q, b, c, d]
    ddH = np.stack([np.stack([np.stack([np.stack([h[c][d].diff("z", a).diff("zb", b).value
                                                  for d in range(n)], -1) for c in range(n)], -2)
                              for b in range(n)], 1) for a in range(n)], 1)                      # [q, a, b, c, d]
    cond = np.linalg.cond(H)
    if not np.all(np.isfinite(cond)) or np.any(cond > COND_LIMIT):
        raise IllConditionedMetricError("Hermitian tensor is singular at the base point")
    Inv = np.linalg.inv(H)                                                                        # [q, l, r]
    R = -ddH + np.einsum("qlr,qacl,qbrd->qabcd", Inv, dH, dbH)
    Vt, Vc = V.T, np.conj(V.T)
    num = np.einsum("qabcd,qa,qb,qc,qd->q", R, Vt, Vc, Vt, Vc)
    hv = np.real(np.einsum("qcd,qc,qd->q", H, Vt, Vc))
    return np.real(2 * num / hv ** 2)


def hermitian_hsc(h_tensor, p: JetPoint) -> float:
    return float(hermitian_hsc_batch(h_tensor, p.z, p.v)[0])


# --------------------------------------------------------------------------
# one-dimensional metrics and curves
# --------------------------------------------------------------------------


def gaussian_curvature_batch(lam2: Callable, zeta) -> np.ndarray:
    """``K = −2 ∂∂̄ log λ² / λ²`` for a conformal metric ``λ²(ζ)|dζ|²``."""
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    S = jet_space(1, 2, (1, 1, 0, 0))
    x = S.variable("z", 0, zeta)
    val = lam2(x)
    if not hasattr(val, "diff"):
        val = S.constant(np.broadcast_to(np.asarray(val, dtype=complex), zeta.shape))
    l0 = np.real(val.value)
    if np.any(l0 <= 0) or np.any(~np.isfinite(l0)):
        raise DomainError("conformal factor must be positive at the evaluation point")
    ddlog = val.log().diff("z", 0).diff("zb", 0).value
    return np.real(-2 * ddlog / l0)


def gaussian_curvature(lam2: Callable, zeta: complex = 0.0) -> float:
    return float(gaussian_curvature_batch(lam2, zeta)[0])


@dataclass(frozen=True)
class CurveGerm:
    """Polynomial holomorphic disk ``φ(ζ) = Σ_k c_k ζ^k`` with ``c_0 = z`` and
    ``c_1 = v``; ``coeffs`` has shape ``(K, n)`` or ``(K, n, B)``."""

    coeffs: np.ndarray = field(repr=False)

    @classmethod
    def quadratic(cls, z, v, w=None) -> "CurveGerm":
        z, v = np.asarray(z, dtype=complex), np.asarray(v, dtype=complex)
        w = np.zeros_like(v) if w is None else np.broadcast_to(np.asarray(w, dtype=complex), np.broadcast_shapes(np.shape(w), v.shape))
        z, v = np.broadcast_to(z, w.shape), np.broadcast_to(v, w.shape)
        return cls(np.stack([z, v, w]))

    def point(self, zeta):
        out = [0] * self.coeffs.shape[1]
        for a in range(self.coeffs.shape[1]):
            acc = self.coeffs[-1, a]
            for k in range(self.coeffs.shape[0] - 2, -1, -1):
                acc = acc * zeta + self.coeffs[k, a]
            out[a] = acc
        return out

    def tangent(self, zeta):
        K = self.coeffs.shape[0]
        out = [0] * self.coeffs.shape[1]
        for a in range(self.coeffs.shape[1]):
            acc = (K - 1) * self.coeffs[-1, a]
            for k in range(K - 2, 0, -1):
                acc = acc * zeta + k * self.coeffs[k, a]
            out[a] = acc
        return out


def induced_curve_metric(m: MetricDescriptor, curve: CurveGerm) -> Callable:
    """``ζ ↦ G(φ(ζ); φ'(ζ))`` as a conformal factor for :func:`gaussian_curvature`."""
    c = np.asarray(curve.coeffs)
    if c.shape[1] != m.dim:
        raise ShapeError(f"curve lives in C^{c.shape[1]}, metric {m.name!r} in C^{m.dim}")
    if c.shape[0] < 2 or np.any(np.linalg.norm(c[1], axis=0) < 1e-12):
        raise DegenerateCurveError("curve has vanishing derivative at the origin")

    def lam2(zeta):
        return m(curve.point(zeta), curve.tangent(zeta))

    return lam2


@dataclass
class VariationalCheck:
    K_G: float
    sampled_max: float
    worst_excess: float
    supremum: Optional[float]
    count: int
    seed: int

    @property
    def one_sided_pass(self) -> bool:
        return self.worst_excess <= 1e-4


def induced_curvatures(m: MetricDescriptor, p: JetPoint, W: np.ndarray) -> np.ndarray:
    """Gaussian curvature at ζ = 0 of the quadratic curves z + ζv + ζ²w, batched over
    the columns of ``W`` (shape ``(n, B)``)."""
    W = np.asarray(W, dtype=complex).reshape(m.dim, -1)
    curve = CurveGerm.quadratic(p.z[:, None], p.v[:, None], W)
    return gaussian_curvature_batch(induced_curve_metric(m, curve), np.zeros(W.shape[1]))


def variational_check(m: MetricDescriptor, p: JetPoint, count: int = 50, seed: int = 0,
                      scale: float = 1.0, optimize: bool = False) -> VariationalCheck:
    """Compare curvatures of curves tangent to ``v`` with ``K_G(z; v)``.

    Random second-order terms give a one-sided check; ``optimize`` also
    maximizes over the second-order term from the best sample.
    """
    K, _ = holomorphic_sectional_curvature(m, p)
    rng = np.random.default_rng(seed)
    W = scale * (rng.standard_normal((m.dim, count)) + 1j * rng.standard_normal((m.dim, count)))
    W[:, 0] = 0
    ks = induced_curvatures(m, p, W)
    sup = None
    if optimize:
        n = m.dim

        def neg(x):
            return -float(induced_curvatures(m, p, x[:n] + 1j * x[n:])[0])

        best = W[:, int(np.argmax(ks))]
        res = minimize(neg, np.r_[best.real, best.imag], method="BFGS", options={"gtol": 1e-10})
        sup = max(float(-res.fun), float(np.max(ks)))
    return VariationalCheck(K, float(np.max(ks)), float(np.max(ks) - K), sup, count, seed)


# --------------------------------------------------------------------------
# curvature bounds over a region
# --------------------------------------------------------------------------


@dataclass
class CurvatureBounds:
    inf: float
    sup: float
    inf_witness: JetPoint
    sup_witness: JetPoint
    samples: int
    seed: int

    def to_dict(self) -> dict:
        return {"inf": self.inf, "sup": self.sup, "inf_witness": self.inf_witness.to_dict(),
                "sup_witness": self.sup_witness.to_dict(), "samples": self.samples, "seed": self.seed}


def _project(Z, V, radius):
    r = np.linalg.norm(Z, axis=0)
    Z = Z * np.minimum(1.0, radius / np.maximum(r, 1e-300))
    V = V / np.linalg.norm(V, axis=0)
    return Z, V


def _refine(m, Z, V, K, sign, radius, steps, gtol=1e-8, fd=1e-6, min_step=1e-9):
    """Projected gradient ascent of ``sign * K`` with per-candidate step halving.

    On the boundary sphere the outward part of the z-gradient is dropped, so
    iterates slide along the constraint instead of stalling against it.
    """
    n = m.dim
    Z, V, K = Z.copy(), V.copy(), K.copy()
    step = np.full(Z.shape[1], 0.05)
    alive = np.ones(Z.shape[1], dtype=bool)
    E = np.concatenate([np.eye(4 * n), -np.eye(4 * n)])
    dZ = (E[:, :n] + 1j * E[:, n:2 * n]).T[:, :, None] * fd
    dV = (E[:, 2 * n:3 * n] + 1j * E[:, 3 * n:]).T[:, :, None] * fd
    for _ in range(steps):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        Zs = (Z[:, None, idx] + dZ).reshape(n, -1)
        Vs = (V[:, None, idx] + dV).reshape(n, -1)
        Ks, _ = hsc_batch(m, *_project(Zs, Vs, radius))
        Ks = Ks.reshape(8 * n, idx.size)
        g = sign * (Ks[:4 * n] - Ks[4 * n:]) / (2 * fd)
        gz = g[:n] + 1j * g[n:2 * n]
        gv = g[2 * n:3 * n] + 1j * g[3 * n:]
        Zi = Z[:, idx]
        r = np.linalg.norm(Zi, axis=0)
        out = np.real(np.sum(np.conj(Zi) * gz, axis=0)) / np.maximum(r, 1e-300)
        on_edge = (r >= radius * (1 - 1e-9)) & (out > 0)
        gz[:, on_edge] -= out[on_edge] * Zi[:, on_edge] / r[on_edge]
        gnorm = np.sqrt(np.sum(np.abs(gz) ** 2 + np.abs(gv) ** 2, axis=0))
        alive[idx[gnorm <= gtol]] = False
        keep = gnorm > gtol
        idx, gz, gv, gnorm = idx[keep], gz[:, keep], gv[:, keep], gnorm[keep]
        pending = np.ones(idx.size, dtype=bool)
        while np.any(pending):
            j = idx[pending]
            h = step[j] / gnorm[pending]
            Zt, Vt = _project(Z[:, j] + h * gz[:, pending], V[:, j] + h * gv[:, pending], radius)
            Kt, _ = hsc_batch(m, Zt, Vt)
            better = sign * Kt > sign * K[j]
            Z[:, j[better]], V[:, j[better]], K[j[better]] = Zt[:, better], Vt[:, better], Kt[better]
            step[j[better]] = np.minimum(2 * step[j[better]], 0.1)
            step[j[~better]] *= 0.5
            dead = j[~better & (step[j] < min_step)]
            alive[dead] = False
            sub = np.flatnonzero(pending)
            pending[sub[better]] = False
            pending[sub[~better & (step[j] < min_step)]] = False
    return Z, V, K


def curvature_bound_estimate(m: MetricDescriptor, plan: SamplePlan = SamplePlan(),
                             refine_steps: int = 50, refine_count: int = 4) -> CurvatureBounds:
    """Inf and sup of ``K_G`` over the indicatrix bundle above a ball.

    Seeded samples are evaluated in one batch; the ``refine_count`` lowest and
    highest are then refined by projected gradient steps.
    """
    if refine_steps < 0 or refine_count < 1:
        raise ConfigurationError("refine_steps must be >= 0 and refine_count >= 1")
    if m.domain_radius is not None:
        limit = m.domain_radius if m.domain_closed else m.domain_radius * (1 - 1e-9)
        if plan.radius > limit:
            raise ConfigurationError(f"sampling radius {plan.radius} exceeds the domain of {m.name!r}")
    rng = np.random.default_rng(plan.seed)
    Z = sample_ball(rng, m.dim, plan.count, plan.radius, plan.inner)
    V = sample_sphere(rng, m.dim, plan.count)
    # the centre and the boundary are where extremes of radial metrics live
    Z[:, 0] = 0
    K, _ = hsc_batch(m, Z, V)
    out = {}
    for sign in (-1.0, 1.0):
        idx = np.argsort(sign * K)[::-1][:refine_count]
        Zr, Vr, Kr = Z[:, idx], V[:, idx], K[idx]
        if refine_steps:
            Zr, Vr, Kr = _refine(m, Zr, Vr, Kr, sign, plan.radius, refine_steps)
        k = int(np.argmax(sign * Kr))
        out[sign] = (float(Kr[k]), JetPoint.of(Zr[:, k], Vr[:, k] / np.sqrt(metric_values(m, Zr[:, k:k + 1], Vr[:, k:k + 1])[0])))
    return CurvatureBounds(out[-1.0][0], out[1.0][0], out[-1.0][1], out[1.0][1], plan.count, plan.seed)
