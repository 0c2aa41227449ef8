"""Numerical checks of Kähler identities on flat C^n and the Poincaré disk
``(1 - |ζ|^2)^{-2} |dζ|^2`` (Gaussian curvature -4)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .comparison import ball_hessian
from .errors import ConfigurationError, PoleSingularityError
from .metrics import SamplePlan, sample_ball, sample_sphere
from .wirtinger import AUTO, DifferentiationPlan, Jet, jet_space, taylor_jet

POLE_RADIUS = 1e-3
_SERIES_T = 1e-2


def _abs2(z):
    return sum(x * np.conj(x) for x in z)


def _arctanh_sqrt_sq(t):
    """``arctanh(√t)^2`` for a jet or array ``t >= 0``, smooth through t = 0."""
    # arctanh(√t)/√t = Σ t^k / (2k + 1); exact enough below _SERIES_T
    series = 1.0 / 25
    for k in range(11, -1, -1):
        series = series * t + 1.0 / (2 * k + 1)
    small = t * series * series
    t0 = np.real(t.value if isinstance(t, Jet) else np.asarray(t))
    if np.all(t0 < _SERIES_T):
        return small
    ts = t + np.where(t0 < _SERIES_T, 0.5, 0.0)
    s = np.sqrt(ts)
    big = np.arctanh(s) ** 2
    mask = t0 < _SERIES_T
    if isinstance(t, Jet):
        c = np.where(mask, small.coeffs, big.coeffs)
        return Jet(t.space, c, np.minimum(small.valid, big.valid))
    return np.where(mask, small, big)


@dataclass(frozen=True)
class DistanceField:
    """Jet-safe scalar field of z; ``pole_singular`` marks fields that are not
    smooth at the pole."""

    func: Callable
    pole_singular: bool = False

    def __call__(self, z):
        return self.func(z)


@dataclass(frozen=True)
class KahlerModel:
    kind: str = "poincare-disk"
    n: int = 1

    def __post_init__(self):
        if self.kind not in ("flat", "poincare-disk"):
            raise ConfigurationError(f"unknown Kähler model {self.kind!r}; use flat or poincare-disk")
        if self.kind == "poincare-disk" and self.n != 1:
            raise ConfigurationError("the Poincaré disk is one-dimensional")
        if self.n < 1:
            raise ConfigurationError("dimension must be positive")

    @classmethod
    def flat(cls, n: int = 1) -> "KahlerModel":
        return cls("flat", n)

    @classmethod
    def disk(cls) -> "KahlerModel":
        return cls("poincare-disk", 1)

    @property
    def K(self) -> float:
        """Constant with sectional curvature >= -K^2."""
        return 0.0 if self.kind == "flat" else 2.0

    @property
    def radius(self) -> float:
        return np.inf if self.kind == "flat" else 1.0

    def h(self, Z) -> np.ndarray:
        """Hermitian metric matrices, shape ``(B, n, n)``."""
        Z = np.asarray(Z, dtype=complex).reshape(self.n, -1)
        eye = np.broadcast_to(np.eye(self.n), (Z.shape[1], self.n, self.n))
        if self.kind == "flat":
            return eye.astype(complex)
        return eye * (1 - np.abs(Z[0]) ** 2)[:, None, None] ** -2

    def log_conformal(self, x):
        """``φ`` with real metric ``e^{2φ}|dx|^2`` on real coordinates ``(2n, B)``."""
        if self.kind == "flat":
            return np.zeros(x.shape[1:])
        return -np.log(1 - np.sum(x * x, axis=0))

    def distance(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=complex).reshape(self.n, -1)
        r = np.linalg.norm(Z, axis=0)
        return r if self.kind == "flat" else np.arctanh(r)

    @property
    def rho2(self) -> DistanceField:
        if self.kind == "flat":
            return DistanceField(_abs2)
        return DistanceField(lambda z: _arctanh_sqrt_sq(_abs2(z)))

    @property
    def rho(self) -> DistanceField:
        if self.kind == "flat":
            return DistanceField(lambda z: np.sqrt(_abs2(z)), pole_singular=True)
        return DistanceField(lambda z: np.arctanh(np.sqrt(_abs2(z))), pole_singular=True)


@dataclass
class ComplexHessianValue:
    entries: np.ndarray

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


def complex_hessian_batch(f: Callable, Z, plan: DifferentiationPlan = AUTO) -> np.ndarray:
    """``∂²f/∂z^a ∂z̄^b`` for a field of z alone, shape ``(B, n, n)``."""
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim == 1:
        Z = Z[:, None]
    n = Z.shape[0]
    if getattr(f, "pole_singular", False) and np.any(np.linalg.norm(Z, axis=0) < POLE_RADIUS):
        raise PoleSingularityError("the distance function is not smooth at the pole; use its square")
    g = taylor_jet(lambda z, v: f(z), Z, np.ones_like(Z), jet_space(n, 2, (1, 1, 0, 0)), plan)
    H = np.empty((Z.shape[1], n, n), dtype=complex)
    for a in range(n):
        ga = g.diff("z", a)
        for b in range(n):
            H[:, a, b] = ga.diff("zb", b).value
    return H


def complex_hessian(f: Callable, z, plan: DifferentiationPlan = AUTO) -> ComplexHessianValue:
    return ComplexHessianValue(complex_hessian_batch(f, np.asarray(z, dtype=complex), plan)[0])


def dbar_batch(f: Callable, Z) -> np.ndarray:
    """``∂f/∂z̄^b``, shape ``(n, B)``."""
    n = Z.shape[0]
    g = taylor_jet(lambda z, v: f(z), Z, np.ones_like(Z), jet_space(n, 1, (1, 1, 0, 0)))
    return np.stack([g.diff("zb", b).value for b in range(n)])


def real_metric(h: np.ndarray) -> np.ndarray:
    """Real ``2n x 2n`` matrix of ``h(dz ⊗ dz̄ + dz̄ ⊗ dz)`` in coordinates (x, y)."""
    A, B = h.real, h.imag
    top = np.concatenate([A, B], axis=-1)
    bottom = np.concatenate([-B, A], axis=-1)
    return 2 * np.concatenate([top, bottom], axis=-2)


def gradient_pairing(model: KahlerModel, Z) -> np.ndarray:
    """``Re h((∇ρ²)∘, T)`` with T the h-unit radial vector at each point."""
    H = model.h(Z)
    # real gradient for g(u, u) = h(v): h^T w = 2 ∂̄f
    w = np.linalg.solve(np.swapaxes(H, 1, 2), 2 * dbar_batch(model.rho2, Z).T[..., None])[..., 0].T
    T = Z / np.linalg.norm(Z, axis=0)
    T = T / np.sqrt(np.real(np.einsum("qab,aq,bq->q", H, T, T.conj())))
    return np.real(np.einsum("qab,aq,bq->q", H, w, T.conj()))


@dataclass
class IdentityResult:
    name: str
    worst_slack: float
    witness: list
    samples: int
    passed: bool

    def to_dict(self) -> dict:
        return {"worst_slack": self.worst_slack, "witness": self.witness, "samples": self.samples, "pass": self.passed}


@dataclass
class KahlerReport:
    model: KahlerModel
    results: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def to_dict(self) -> dict:
        return {"model": {"kind": self.model.kind, "n": self.model.n, "K": self.model.K},
                "pass": self.passed, "identities": {k: r.to_dict() for k, r in self.results.items()}}


def _result(name, slack, Z, ok):
    k = int(np.argmin(slack))
    wit = [[float(x.real), float(x.imag)] for x in Z[:, k]]
    return IdentityResult(name, float(slack[k]), wit, int(slack.size), bool(np.all(ok)))


def kahler_identity_checks(model: KahlerModel, plan: SamplePlan | None = None) -> KahlerReport:
    """Seeded checks of the pairing, L-operator, Hessian-bound and gradient
    identities.  Identity slacks are minus the residual; inequality slacks are
    bound minus value."""
    if plan is None:
        plan = SamplePlan(100, 0.9 if model.kind == "poincare-disk" else 2.0, 0, 0.05)
    if plan.radius >= model.radius:
        raise ConfigurationError(f"sampling radius {plan.radius} leaves the {model.kind} model")
    plan = SamplePlan(plan.count, plan.radius, plan.seed, max(plan.inner, POLE_RADIUS))
    n = model.n
    rng = np.random.default_rng(plan.seed)
    Z = sample_ball(rng, n, plan.count, plan.radius, plan.inner)
    V1, V2 = sample_sphere(rng, n, plan.count), sample_sphere(rng, n, plan.count)
    H = model.h(Z)
    rho = model.distance(Z)
    out = {}

    # (a) real pairing against twice the Hermitian product
    G = real_metric(H)
    U1 = np.concatenate([V1.real, V1.imag]).T
    U2 = np.concatenate([V2.real, V2.imag]).T
    lhs = np.einsum("qa,qab,qb->q", U1, G, U2)
    rhs = 2 * np.real(np.einsum("qab,aq,bq->q", H, V1, V2.conj()))
    res = np.abs(lhs - rhs)
    out["pairing"] = _result("pairing", -res, Z, res <= 1e-8 * (1 + np.abs(rhs)))

    # (b) 4 ∂∂̄f(v, v̄) = ∇²f(u, u) + ∇²f(Ju, Ju) for f = ρ²
    C = complex_hessian_batch(model.rho2, Z)
    Lf = 4 * np.real(np.einsum("qab,aq,bq->q", C, V1, V1.conj()))
    f_real = lambda x: np.real(model.rho2(list(x[:n] + 1j * x[n:])))
    real_sum = np.empty(plan.count)
    for k in range(plan.count):
        x = np.concatenate([Z[:, k].real, Z[:, k].imag])
        u = np.concatenate([V1[:, k].real, V1[:, k].imag])
        Ju = np.concatenate([-V1[:, k].imag, V1[:, k].real])
        step = 1e-2 * (1 - np.linalg.norm(x)) if model.kind == "poincare-disk" else 1e-2
        real_sum[k] = (ball_hessian(f_real, model.log_conformal, x, u, step)
                       + ball_hessian(f_real, model.log_conformal, x, Ju, step))
    res = np.abs(Lf - real_sum)
    out["l_operator"] = _result("l_operator", -res, Z, res <= 1e-6 * (1 + np.abs(Lf)))

    # (c) complex Hessian of ρ² on h-unit vectors
    hv = np.real(np.einsum("qab,aq,bq->q", H, V1, V1.conj()))
    val = np.real(np.einsum("qab,aq,bq->q", C, V1, V1.conj())) / hv
    slack = 2 + rho * model.K - val
    out["hessian_bound"] = _result("hessian_bound", slack, Z, slack >= 0)

    # (d) 2ρ = <(∇ρ²)∘, T>
    pair = gradient_pairing(model, Z)
    res = np.abs(pair - 2 * rho)
    out["gradient_pairing"] = _result("gradient_pairing", -res, Z, res <= 1e-7 * (1 + rho))

    # (e) disk: ∂∂̄ϱ² ≤ 2(1 + 2ϱ) in the h-unit normalization
    if model.kind == "poincare-disk":
        val = np.real(C[:, 0, 0]) / np.real(H[:, 0, 0])
        slack = 2 * (1 + 2 * rho) - val
        out["disk_bound"] = _result("disk_bound", slack, Z, slack >= 0)
    return KahlerReport(model, out)
