"""Index forms, Jacobi fields and distance-function Hessians on real
constant-curvature model spaces (flat space and hyperbolic space of
curvature -K^2)."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import bisect

from .errors import ConfigurationError, ContractViolationError, DomainError


@dataclass(frozen=True)
class ModelSpace:
    kind: str = "hyperbolic"
    K: float = 1.0
    dim: int = 2

    def __post_init__(self):
        if self.kind not in ("euclidean", "hyperbolic"):
            raise ConfigurationError(f"unknown model space {self.kind!r}")
        if self.K < 0 or (self.kind == "hyperbolic" and self.K == 0) or (self.kind == "euclidean" and self.K != 0):
            raise ConfigurationError(f"curvature parameter K={self.K} does not fit a {self.kind} model")
        if self.dim < 2:
            raise ConfigurationError("model spaces need dimension >= 2")

    @classmethod
    def of(cls, K: float, dim: int = 2) -> "ModelSpace":
        return cls("euclidean" if K == 0 else "hyperbolic", float(K), dim)


@dataclass(frozen=True)
class RadialField:
    """Profile ``(t/r)^alpha`` times a parallel unit normal."""

    alpha: float
    r: float

    def __post_init__(self):
        if self.alpha < 1 or self.r <= 0:
            raise ConfigurationError("radial fields need alpha >= 1 and r > 0")

    def closed_form(self, space: ModelSpace) -> float:
        a, r = self.alpha, self.r
        return a * a / ((2 * a - 1) * r) + space.K ** 2 * r / (2 * a + 1)


@dataclass(frozen=True)
class UserProfile:
    """Vector field along the geodesic in a parallel frame whose first vector
    is the unit tangent.  ``func(t)`` returns shape ``(dim,)`` or ``(dim, m)``;
    ``deriv`` defaults to a central difference."""

    func: Callable
    deriv: Optional[Callable] = None

    def derivative(self, t):
        if self.deriv is not None:
            return np.asarray(self.deriv(t), dtype=float)
        h = 1e-6
        return (np.asarray(self.func(t + h)) - np.asarray(self.func(t - h))) / (2 * h)


JACOBI = "jacobi"
FieldSpec = Union[RadialField, UserProfile, str]


@dataclass(frozen=True)
class QuadratureConfig:
    rule: str = "gauss-legendre"
    nodes: int = 32
    panels: int = 24
    grading: float = 0.3

    def __post_init__(self):
        if self.rule != "gauss-legendre":
            raise ConfigurationError(f"unsupported quadrature rule {self.rule!r}")
        if self.nodes < 16:
            raise ConfigurationError("quadrature needs at least 16 nodes")
        if self.panels < 1 or not 0 < self.grading < 1:
            raise ConfigurationError("panels must be >= 1 and grading in (0, 1)")


def _graded_nodes(r: float, q: QuadratureConfig):
    """Gauss-Legendre on panels [0, r g^P], ..., [r g, r]; resolves t^p endpoint behaviour."""
    x, w = np.polynomial.legendre.leggauss(q.nodes)
    edges = np.r_[0.0, r * q.grading ** np.arange(q.panels, -1, -1)]
    a, b = edges[:-1, None], edges[1:, None]
    t = 0.5 * (b - a) * x + 0.5 * (a + b)
    wt = 0.5 * (b - a) * w
    return t.ravel(), wt.ravel()


def _plain_nodes(r: float, q: QuadratureConfig):
    x, w = np.polynomial.legendre.leggauss(q.nodes)
    return 0.5 * r * (x + 1), 0.5 * r * w


def jacobi_field(space: ModelSpace, r: float):
    """Normal Jacobi field vanishing at 0 and equal to the unit normal at r,
    as ``(J, J')`` callables."""
    K = space.K
    if K == 0:
        return (lambda t: np.asarray(t) / r), (lambda t: np.full_like(np.asarray(t, dtype=float), 1 / r))
    s = math.sinh(K * r)
    return (lambda t: np.sinh(K * np.asarray(t)) / s), (lambda t: K * np.cosh(K * np.asarray(t)) / s)


def index_form(space: ModelSpace, r: float, field: FieldSpec = JACOBI,
               q: QuadratureConfig = QuadratureConfig()) -> float:
    """``I(ξ, ξ) = ∫_0^r |ξ'|^2 + K^2 |ξ_⊥|^2 dt`` by Gauss-Legendre quadrature."""
    if r <= 0:
        raise DomainError("index form needs r > 0")
    K2 = space.K ** 2
    if isinstance(field, str):
        if field != JACOBI:
            raise ConfigurationError(f"unknown field {field!r}")
        J, dJ = jacobi_field(space, r)
        t, w = _plain_nodes(r, q)
        return float(np.sum(w * (dJ(t) ** 2 + K2 * J(t) ** 2)))
    if isinstance(field, RadialField):
        a = field.alpha
        if field.r != r:
            raise ConfigurationError("radial field and geodesic length differ")
        t, w = _graded_nodes(r, q)
        curv = np.sum(w * K2 * (t / r) ** (2 * a))
        if a < 1.5:
            kinetic = a * a / ((2 * a - 1) * r)
        else:
            kinetic = np.sum(w * (a / r * (t / r) ** (a - 1)) ** 2)
        return float(kinetic + curv)
    if isinstance(field, UserProfile):
        t, w = _graded_nodes(r, q)
        xi = np.asarray(field.func(t), dtype=float).reshape(space.dim, -1)
        dxi = np.asarray(field.derivative(t), dtype=float).reshape(space.dim, -1)
        scale = 1 + np.max(np.abs(xi))
        if np.max(np.abs(xi[0])) > 1e-12 * scale:
            raise ContractViolationError("field has a component along the geodesic tangent")
        integrand = np.sum(dxi ** 2, axis=0) + K2 * np.sum(xi[1:] ** 2, axis=0)
        return float(np.sum(w * integrand))
    raise ConfigurationError(f"unsupported field {field!r}")


def optimal_alpha(K: float, r: float, xtol: float = 1e-12) -> float:
    """Root ``alpha > 1`` of ``(a-1)^2 (2a+1) = K^2 r^2 (2a-1)``."""
    if K < 0 or r <= 0 or not math.isfinite(K * r):
        raise ConfigurationError("optimal_alpha needs K >= 0, r > 0 and finite K r")
    c = (K * r) ** 2
    if c == 0:
        return 1.0

    def f(a):
        return (a - 1) ** 2 * (2 * a + 1) - c * (2 * a - 1)

    # f(1) = -c < 0, so [1, hi] brackets the root once f(hi) > 0
    lo, hi = 1.0, max(2.0, 2.0 + K * r)
    while f(hi) <= 0:
        hi *= 2
    return float(bisect(f, lo, hi, xtol=xtol, maxiter=500))


def radial_bound(K: float, r: float) -> float:
    """Index form of the optimal radial field, ``1/r + 2 K^2 r / (2a + 1)``."""
    a = optimal_alpha(K, r)
    return a * a / ((2 * a - 1) * r) + K * K * r / (2 * a + 1)


def hessian_distance_model(space: ModelSpace, rho: float, direction: str = "orthogonal",
                           q: QuadratureConfig = QuadratureConfig()) -> float:
    """``H(ρ)(u, u)`` for a unit vector u; orthogonal values come from I(J, J)."""
    if rho <= 0:
        raise DomainError("distance Hessian needs rho > 0")
    if direction == "radial":
        return 0.0
    if direction != "orthogonal":
        raise ConfigurationError(f"direction must be radial or orthogonal, not {direction!r}")
    return index_form(space, rho, JACOBI, q)


def hessian_closed_form(K: float, rho: float) -> float:
    return 1 / rho if K == 0 else K / math.tanh(K * rho)


# --------------------------------------------------------------------------
# conformal-ball realisation used as an independent check
# --------------------------------------------------------------------------


def _ball_factor(K: float):
    """Conformal factor ``e^{φ}`` of the ball model and distance to the origin."""
    if K == 0:
        return (lambda x: np.zeros(x.shape[1:])), (lambda x: np.linalg.norm(x, axis=0))
    return (lambda x: np.log(2 / (K * (1 - np.sum(x * x, axis=0))))), \
           (lambda x: 2 / K * np.arctanh(np.linalg.norm(x, axis=0)))


def _richardson(D, h):
    return (4 * D(h / 2) - D(h)) / 3


def ball_hessian(f: Callable, phi: Callable, x: np.ndarray, u: np.ndarray, h: float = 1e-4) -> float:
    """Covariant Hessian ``H(f)(u, u)`` of the conformal metric ``e^{2φ}|dx|^2``
    by Richardson-extrapolated central differences; ``u`` is in coordinates."""
    d = x.size
    c = np.linalg.norm(u)
    u = u / c
    x = x[:, None]
    E = np.eye(d)

    def grad(g):
        return np.array([_richardson(lambda s: (g(x + s * E[:, [i]]) - g(x - s * E[:, [i]]))[0] / (2 * s), h)
                         for i in range(d)])

    grad_f, grad_p = grad(f), grad(phi)
    second = _richardson(lambda s: (f(x + s * u[:, None]) - 2 * f(x) + f(x - s * u[:, None]))[0] / s ** 2, h)
    # Γ^k_{ij} u^i u^j ∂_k f = 2 (u·∇φ)(u·∇f) − |u|^2 ∇φ·∇f
    gamma = 2 * (u @ grad_p) * (u @ grad_f) - (u @ u) * (grad_p @ grad_f)
    return float(c * c * (second - gamma))


def ball_point(K: float, rho: float, dim: int = 2):
    """Coordinates of a point at distance ``rho`` from the origin, plus unit
    radial and orthogonal coordinate vectors."""
    s = rho if K == 0 else math.tanh(K * rho / 2)
    x = np.zeros(dim)
    x[0] = s
    lam = 1.0 if K == 0 else 2 / (K * (1 - s * s))
    radial = np.zeros(dim)
    radial[0] = 1 / lam
    ortho = np.zeros(dim)
    ortho[1] = 1 / lam
    return x, radial, ortho


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------


@dataclass
class ComparisonRow:
    K: float
    rho: float
    direction: str
    value: float
    bound: float
    slack: float
    relation: str = "le"
    passed: bool = True


def _row(K, rho, direction, value, bound, relation="le", tol=1e-9):
    if relation == "le":
        slack = bound - value
        ok = slack >= -tol
    else:
        slack = -abs(value - bound)
        ok = -slack <= tol
    return ComparisonRow(K, rho, direction, float(value), float(bound), float(slack), relation, bool(ok))


@dataclass
class ComparisonReport:
    space: ModelSpace
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {"space": asdict(self.space), "pass": self.passed, "rows": [asdict(r) for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["K", "rho", "direction", "value", "bound", "slack"])
        for r in self.rows:
            w.writerow([r.K, r.rho, r.direction, repr(r.value), repr(r.bound), repr(r.slack)])
        return buf.getvalue()


ALPHA_GRID = np.linspace(1.0, 4.0, 31)[1:]


def comparison_report(space: ModelSpace, radii, q: QuadratureConfig = QuadratureConfig()) -> ComparisonReport:
    """Check the distance-function Hessian bounds along each radius."""
    radii = [float(r) for r in radii]
    if not radii or min(radii) <= 0:
        raise ConfigurationError("radii must be a non-empty list of positive numbers")
    K = space.K
    phi, dist = _ball_factor(K)
    rows = []
    for rho in radii:
        bound = 1 / rho + K
        h_orth = hessian_distance_model(space, rho, "orthogonal", q)
        rows.append(_row(K, rho, "orthogonal", h_orth, bound))
        rows.append(_row(K, rho, "radial", hessian_distance_model(space, rho, "radial", q), bound))
        rows.append(_row(K, rho, "optimal-radial-field", index_form(space, rho, RadialField(optimal_alpha(K, rho), rho), q), bound))
        grid = min(index_form(space, rho, RadialField(a, rho), q) for a in ALPHA_GRID)
        rows.append(_row(K, rho, "jacobi-minimal", h_orth, grid))
        # ρ² through H(ρ²) = 2 dρ(u)^2 + 2ρ H(ρ)
        rows.append(_row(K, rho, "rho2-orthogonal", 2 * rho * h_orth, 2 * (2 + rho * K)))
        rows.append(_row(K, rho, "rho2-radial", 2.0, 2 * (2 + rho * K)))
        # independent realisation in the conformal ball model
        if K == 0 or math.tanh(K * rho / 2) < 0.999:
            x, ur, uo = ball_point(K, rho, space.dim)
            sq = lambda y: dist(y) ** 2
            h = 1e-3 * (1 - np.linalg.norm(x)) if K else 1e-3
            ho = ball_hessian(sq, phi, x, uo, h)
            hr = ball_hessian(sq, phi, x, ur, h)
            rows.append(_row(K, rho, "rho2-orthogonal-ball", ho, 2 * rho * hessian_closed_form(K, rho), "eq", 1e-5 * (1 + ho)))
            rows.append(_row(K, rho, "rho2-radial-ball", hr, 2.0, "eq", 1e-5))
            h = 1e-6
            pair = (sq(x[:, None] + h * ur[:, None])[0] - sq(x[:, None] - h * ur[:, None])[0]) / (2 * h)
            rows.append(_row(K, rho, "gradient-pairing", pair, 2 * rho, "eq", 1e-6 * (1 + rho)))
    return ComparisonReport(space, rows)
