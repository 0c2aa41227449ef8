"""Complex Finsler metrics: descriptors, the built-in zoo, Levi matrices and
numerical validation of homogeneity and strong pseudoconvexity."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, OutOfDomainError, ShapeError
from .wirtinger import (
    AUTO,
    DifferentiationPlan,
    JetPoint,
    jet_space,
    taylor_jet,
)

HermitianTensor = Callable[[list], list]


@dataclass(frozen=True, eq=False)
class MetricDescriptor:
    """A named complex Finsler metric ``G(z; v)``.

    ``func(z, v)`` takes length-``dim`` sequences of complex scalars, arrays
    or jets.  Hermitian-quadratic metrics additionally carry ``h_tensor``,
    returning the ``dim x dim`` matrix ``h[a][b] = h_{a b̄}(z)``.
    """

    name: str
    dim: int
    params: dict
    func: Callable = field(repr=False)
    h_tensor: Optional[HermitianTensor] = field(default=None, repr=False)
    domain_radius: Optional[float] = None
    domain_closed: bool = False
    expr: Optional[str] = None

    def __call__(self, z, v):
        return self.func(z, v)

    @property
    def is_hermitian(self) -> bool:
        return self.h_tensor is not None

    def to_dict(self) -> dict:
        d = {"name": self.name, "dim": self.dim, "params": {k: float(x) for k, x in self.params.items()}}
        if self.expr is not None:
            d["expr"] = self.expr
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def check_point(self, z) -> None:
        z = np.asarray(z)
        if z.shape[0] != self.dim:
            raise ShapeError(f"metric {self.name!r} has dim {self.dim}, point has {z.shape[0]}")
        if self.domain_radius is None:
            return
        r = np.linalg.norm(z, axis=0)
        R = self.domain_radius
        bad = r > R * (1 + 1e-12) if self.domain_closed else r >= R
        if np.any(bad):
            raise OutOfDomainError(
                f"|z| = {float(np.max(r)):.6g} outside the domain of {self.name!r} (radius {R:g})"
            )


def metric_from_dict(d: dict) -> MetricDescriptor:
    if "expr" in d:
        return expression_metric(d["expr"], int(d["dim"]), d.get("params", {}), name=d["name"])
    return make_metric(d["name"], dim=d.get("dim"), **d.get("params", {}))


def metric_from_json(text: str) -> MetricDescriptor:
    return metric_from_dict(json.loads(text))


# --------------------------------------------------------------------------
# zoo
# --------------------------------------------------------------------------


def _sq(x):
    return x * np.conj(x)


def _hermitian_form(h_tensor, n):
    def G(z, v):
        h = h_tensor(z)
        return sum(h[a][b] * v[a] * np.conj(v[b]) for a in range(n) for b in range(n))

    return G


def hermitian_metric(name: str, n: int, h_tensor: HermitianTensor, params=None, **kw) -> MetricDescriptor:
    return MetricDescriptor(name, n, dict(params or {}), _hermitian_form(h_tensor, n), h_tensor=h_tensor, **kw)


def euclidean(n: int = 1) -> MetricDescriptor:
    def h(z):
        return [[1.0 if a == b else 0.0 for b in range(n)] for a in range(n)]

    return hermitian_metric("euclidean", n, h)


def poincare_disk() -> MetricDescriptor:
    """``|v|^2 / (1 - |z|^2)^2`` on the unit disk (Gaussian curvature -4)."""

    def h(z):
        return [[(1 - _sq(z[0])) ** -2]]

    return hermitian_metric("poincare-disk", 1, h, domain_radius=1.0)


def fubini_study(n: int = 1) -> MetricDescriptor:
    """Fubini-Study metric in the affine chart, ``h = dd̄ log(1 + |z|^2)``."""

    def h(z):
        q = 1 + sum(_sq(x) for x in z)
        return [[((q if a == b else 0.0) - np.conj(z[a]) * z[b]) / q ** 2 for b in range(n)] for a in range(n)]

    return hermitian_metric("fubini-study", n, h)


def poincare_product() -> MetricDescriptor:
    """Poincaré disk times a flat line, on C^2."""

    def h(z):
        return [[(1 - _sq(z[0])) ** -2, 0.0], [0.0, 1.0]]

    return hermitian_metric("poincare-product", 2, h)


def hermpoly(seed: int = 0, n: int = 2, scale: float = 0.05) -> MetricDescriptor:
    """Random Hermitian metric with polynomial coefficients in z, z̄.

    ``h = (1 + |z|^2) I + P(z) + P(z)^*`` where ``P`` sums monomials of degree
    one and two times seeded complex matrices.  Positive definite on
    ``|z| <= 0.5`` for the default scale.
    """
    rng = np.random.default_rng(int(seed))
    monos = []
    for i in range(2 * n):
        monos.append((i,))
        for j in range(i, 2 * n):
            monos.append((i, j))
    mats = [scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) for _ in monos]

    def h(z):
        vars_ = list(z) + [np.conj(x) for x in z]
        P = [[0.0] * n for _ in range(n)]
        for mono, B in zip(monos, mats):
            term = vars_[mono[0]]
            for k in mono[1:]:
                term = term * vars_[k]
            for a in range(n):
                for b in range(n):
                    P[a][b] = P[a][b] + term * B[a, b]
        q = 1 + sum(_sq(x) for x in z)
        return [[(q if a == b else 0.0) + P[a][b] + np.conj(P[b][a]) for b in range(n)] for a in range(n)]

    return hermitian_metric("hermpoly", n, h, params={"seed": float(seed), "scale": float(scale)},
                            domain_radius=0.5, domain_closed=True)


def degenerate() -> MetricDescriptor:
    """``|v^1|^2`` on C^2: homogeneous but with a singular Levi matrix."""

    def h(z):
        return [[1.0, 0.0], [0.0, 0.0]]

    return hermitian_metric("degenerate", 2, h)


def exp_family(a: float = 1.0, b: float = 0.5, M0: float = 1.0, n: int = 2) -> MetricDescriptor:
    """Non-Hermitian metric ``G = r exp(a t + b s)`` on the ball ``|z| <= M0``,
    with ``r = |v|^2``, ``t = |z|^2`` and ``s = |<z, v>|^2 / r``."""
    a, b, M0 = float(a), float(b), float(M0)
    if a == 0 or not M0 > 0 or not b < 1 / M0 or not a + b > 0:
        raise ConfigurationError(
            f"exp-family needs a != 0, M0 > 0, b < 1/M0 and a + b > 0 (got a={a}, b={b}, M0={M0})"
        )

    def G(z, v):
        r = sum(_sq(x) for x in v)
        t = sum(_sq(x) for x in z)
        zv = sum(z[k] * np.conj(v[k]) for k in range(n))
        s = _sq(zv) / r
        return r * np.exp(a * t + b * s)

    return MetricDescriptor("exp-family", int(n), {"a": a, "b": b, "M0": M0}, G,
                            domain_radius=M0, domain_closed=True)


def expression_metric(expr: str, dim: int, params: dict | None = None, name: str = "expression") -> MetricDescriptor:
    """Metric from an expression in ``z1..zn, zb1..zbn, v1..vn, vb1..vbn`` and
    named parameters; ``zb``/``vb`` are bound to the conjugates at evaluation."""
    import sympy

    params = {k: float(x) for k, x in (params or {}).items()}
    names = [f"{g}{k}" for g in ("z", "zb", "v", "vb") for k in range(1, dim + 1)]
    syms = sympy.symbols(names)
    psyms = sympy.symbols(list(params)) if params else ()
    local = {s.name: s for s in list(syms) + list(np.atleast_1d(psyms))}
    try:
        parsed = sympy.sympify(expr, locals=local)
    except (sympy.SympifyError, SyntaxError) as exc:
        raise ConfigurationError(f"cannot parse metric expression {expr!r}: {exc}") from exc
    unknown = parsed.free_symbols - set(local.values())
    if unknown:
        raise ConfigurationError(f"unknown symbols in metric expression: {sorted(map(str, unknown))}")
    parsed = parsed.subs({local[k]: x for k, x in params.items()})
    lam = sympy.lambdify(syms, parsed, modules="numpy")

    def G(z, v):
        return lam(*z, *[np.conj(x) for x in z], *v, *[np.conj(x) for x in v])

    return MetricDescriptor(name, int(dim), params, G, expr=expr)


ZOO = {
    "euclidean": lambda dim=None, **p: euclidean(int(dim or 1)),
    "poincare-disk": lambda dim=None, **p: poincare_disk(),
    "fubini-study": lambda dim=None, **p: fubini_study(int(dim or 1)),
    "poincare-product": lambda dim=None, **p: poincare_product(),
    "hermpoly": lambda dim=None, **p: hermpoly(int(p.get("seed", 0)), int(dim or 2), p.get("scale", 0.05)),
    "degenerate": lambda dim=None, **p: degenerate(),
    "exp-family": lambda dim=None, **p: exp_family(p.get("a", 1.0), p.get("b", 0.5), p.get("M0", 1.0), int(dim or 2)),
}
ALIASES = {"poincare": "poincare-disk", "expfam": "exp-family", "fs": "fubini-study", "flat": "euclidean"}


def make_metric(name: str, dim: int | None = None, **params) -> MetricDescriptor:
    key = ALIASES.get(name, name)
    if key not in ZOO:
        raise ConfigurationError(f"unknown metric {name!r}; the zoo has: {', '.join(sorted(ZOO))}")
    m = ZOO[key](dim=dim, **params)
    if dim is not None and m.dim != int(dim):
        raise ShapeError(f"metric {key!r} has fixed dimension {m.dim}, not {dim}")
    return m


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------


def evaluate_metric(m: MetricDescriptor, p: JetPoint) -> float:
    """G(z; v) at an admissible jet point."""
    if p.dim != m.dim:
        raise ShapeError(f"metric {m.name!r} has dim {m.dim}, jet point has {p.dim}")
    m.check_point(p.z)
    return float(np.real(m([x for x in p.z], [x for x in p.v])))


def metric_values(m: MetricDescriptor, Z, V) -> np.ndarray:
    return np.real(np.asarray(m(list(Z), list(V)), dtype=complex))


@dataclass
class LeviMatrixValue:
    entries: np.ndarray
    site: JetPoint

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.entries + self.entries.conj().T))[0])


def levi_batch(m: MetricDescriptor, Z, V, plan: DifferentiationPlan = AUTO) -> np.ndarray:
    """Levi matrices ``G_{a b̄}`` at a batch of jets, shape ``(B, n, n)``."""
    Z = np.asarray(Z, dtype=complex).reshape(m.dim, -1)
    V = np.asarray(V, dtype=complex).reshape(m.dim, -1)
    n = m.dim
    g = taylor_jet(m, Z, V, jet_space(n, 2, (0, 0, 1, 1)), plan)
    L = np.empty((Z.shape[1], n, n), dtype=complex)
    for a in range(n):
        ga = g.diff("v", a)
        for b in range(n):
            L[:, a, b] = ga.diff("vb", b).value
    return L


def levi_matrix(m: MetricDescriptor, p: JetPoint, plan: DifferentiationPlan = AUTO) -> LeviMatrixValue:
    if p.dim != m.dim:
        raise ShapeError(f"metric {m.name!r} has dim {m.dim}, jet point has {p.dim}")
    m.check_point(p.z)
    return LeviMatrixValue(levi_batch(m, p.z, p.v, plan)[0], p)


@dataclass(frozen=True)
class SamplePlan:
    """Seeded jet sampling: base points uniform in the annulus
    ``inner <= |z| <= radius`` of C^n, directions uniform on the unit sphere."""

    count: int = 200
    radius: float = 0.9
    seed: int = 0
    inner: float = 0.0

    def __post_init__(self):
        if self.count < 1 or not self.radius > 0 or not 0 <= self.inner < self.radius:
            raise ConfigurationError(f"empty sampling region or count: {self}")


def sample_ball(rng: np.random.Generator, n: int, count: int, radius: float, inner: float = 0.0) -> np.ndarray:
    d = rng.standard_normal((2 * n, count))
    d /= np.linalg.norm(d, axis=0)
    u = rng.random(count)
    rad = (inner ** (2 * n) + u * (radius ** (2 * n) - inner ** (2 * n))) ** (1 / (2 * n))
    x = d * rad
    return x[:n] + 1j * x[n:]


def sample_sphere(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    d = rng.standard_normal((2 * n, count))
    d /= np.linalg.norm(d, axis=0)
    return d[:n] + 1j * d[n:]


def sample_jets(m: MetricDescriptor, plan: SamplePlan, indicatrix: bool = False):
    rng = np.random.default_rng(plan.seed)
    Z = sample_ball(rng, m.dim, plan.count, plan.radius, plan.inner)
    V = sample_sphere(rng, m.dim, plan.count)
    if indicatrix:
        V = V / np.sqrt(metric_values(m, Z, V))
    return Z, V


SCALINGS = (2.0, 1j, 0.5 * np.exp(1j * np.pi / 3), -1.0, 3 - 4j, 0.1, 1 + 1j, np.exp(2j))


@dataclass
class ValidationReport:
    homogeneity_pass: bool
    homogeneity_dev: float
    euler_pass: bool
    euler_dev: float
    spd_pass: bool
    min_eigenvalue: float
    witness: JetPoint
    samples: int
    seed: int

    @property
    def passed(self) -> bool:
        return self.homogeneity_pass and self.euler_pass and self.spd_pass

    def to_dict(self) -> dict:
        return {
            "homogeneity": {"pass": self.homogeneity_pass, "worst_deviation": self.homogeneity_dev},
            "euler": {"pass": self.euler_pass, "worst_deviation": self.euler_dev},
            "spd": {"pass": self.spd_pass, "min_eigenvalue": self.min_eigenvalue,
                    "witness": self.witness.to_dict()},
            "samples": self.samples,
            "seed": self.seed,
            "pass": self.passed,
        }


def validate_metric(m: MetricDescriptor, plan: SamplePlan = SamplePlan(),
                    diff_plan: DifferentiationPlan = AUTO) -> ValidationReport:
    """Seeded check of (2,0)-homogeneity, the Euler identities and
    positive-definiteness of the Levi matrix."""
    Z, V = sample_jets(m, plan)
    m.check_point(Z)
    n = m.dim
    G = metric_values(m, Z, V)

    hom = 0.0
    for zeta in SCALINGS:
        Gs = metric_values(m, Z, zeta * V)
        hom = max(hom, float(np.max(np.abs(Gs - abs(zeta) ** 2 * G) / (1 + np.abs(G)))))

    g = taylor_jet(m, Z, V, jet_space(n, 2, (0, 0, 1, 1)), diff_plan)
    first = sum(g.diff("v", a).value * V[a] for a in range(n))
    L = np.stack([np.stack([g.diff("v", a).diff("vb", b).value for b in range(n)], -1) for a in range(n)], -2)
    second = np.einsum("kab,ak,bk->k", L, V, V.conj())
    euler = float(max(np.max(np.abs(first - G) / (1 + np.abs(G))),
                      np.max(np.abs(second - G) / (1 + np.abs(G)))))

    Lh = 0.5 * (L + np.conj(np.swapaxes(L, -1, -2)))
    eig = np.linalg.eigvalsh(Lh)[:, 0]
    trace = np.real(np.trace(Lh, axis1=1, axis2=2)) / n
    ratio = eig / np.where(trace > 0, trace, 1.0)
    k = int(np.argmin(ratio))
    spd_ok = bool(np.all(eig > 1e-10 * trace) and np.all(trace > 0))
    return ValidationReport(
        homogeneity_pass=hom <= 1e-9,
        homogeneity_dev=hom,
        euler_pass=euler <= 1e-7,
        euler_dev=euler,
        spd_pass=spd_ok,
        min_eigenvalue=float(eig[k]),
        witness=JetPoint.of(Z[:, k], V[:, k]),
        samples=plan.count,
        seed=plan.seed,
    )
