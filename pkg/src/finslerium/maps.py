"""Holomorphic maps between charts and pull-backs of Finsler metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, ShapeError
from .metrics import MetricDescriptor
from .wirtinger import jet_space, taylor_jet


@dataclass(frozen=True, eq=False)
class HolomorphicMap:
    """``f: C^n → C^m`` with ``components(z)`` and ``jacobian(z)[i][a] = ∂f^i/∂z^a``.

    Both callables accept lists of complex arrays or jets.
    """

    name: str
    n: int
    m: int
    components: Callable = field(repr=False)
    jacobian: Callable = field(repr=False)
    expr: Optional[tuple] = None

    def __call__(self, z):
        return self.components(z)

    def push(self, z, v):
        """``f_*(v) = J(z) v``."""
        J = self.jacobian(z)
        return [sum(J[i][a] * v[a] for a in range(self.n)) for i in range(self.m)]

    def then(self, g: "HolomorphicMap") -> "HolomorphicMap":
        """The composition ``g ∘ self``."""
        if g.n != self.m:
            raise ShapeError(f"cannot compose {g.name} (from C^{g.n}) after {self.name} (into C^{self.m})")

        def comps(z):
            return g(self(z))

        def jac(z):
            Jg, Jf = g.jacobian(self(z)), self.jacobian(z)
            return [[sum(Jg[i][k] * Jf[k][a] for k in range(self.m)) for a in range(self.n)] for i in range(g.m)]

        return HolomorphicMap(f"{g.name}∘{self.name}", self.n, g.m, comps, jac)


def _const_like(z, c):
    base = z[0] * 0
    return base + c


def identity_map(n: int = 1) -> HolomorphicMap:
    return HolomorphicMap("identity", n, n, lambda z: list(z),
                          lambda z: [[_const_like(z, 1.0 if i == a else 0.0) for a in range(n)] for i in range(n)])


def power_map(k: int) -> HolomorphicMap:
    k = int(k)
    if k < 1:
        raise ConfigurationError("power map needs an exponent k >= 1")
    return HolomorphicMap(f"power:{k}", 1, 1, lambda z: [z[0] ** k],
                          lambda z: [[k * z[0] ** (k - 1) if k > 1 else _const_like(z, 1.0)]])


def mobius_map(a: complex, theta: float = 0.0) -> HolomorphicMap:
    """Disk automorphism ``e^{iθ} (z − a)/(1 − ā z)``."""
    a = complex(a)
    if abs(a) >= 1:
        raise ConfigurationError("Möbius parameter must lie in the unit disk")
    rot = np.exp(1j * theta)
    ac = a.conjugate()
    return HolomorphicMap(f"mobius:{a.real:g}{a.imag:+g}j", 1, 1,
                          lambda z: [rot * (z[0] - a) / (1 - ac * z[0])],
                          lambda z: [[rot * (1 - abs(a) ** 2) / (1 - ac * z[0]) ** 2]])


def linear_map(A) -> HolomorphicMap:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    m, n = A.shape
    return HolomorphicMap("linear", n, m,
                          lambda z: [sum(A[i, a] * z[a] for a in range(n)) for i in range(m)],
                          lambda z: [[_const_like(z, A[i, a]) for a in range(n)] for i in range(m)])


def embed_map(coeffs) -> HolomorphicMap:
    """Disk into C^m along a line, ``ζ ↦ (c_1 ζ, ..., c_m ζ)``."""
    c = np.asarray(coeffs, dtype=complex).ravel()
    f = linear_map(c[:, None])
    return HolomorphicMap("embed:" + ",".join(f"{x.real:g}" if x.imag == 0 else str(x) for x in c),
                          1, c.size, f.components, f.jacobian)


def constant_map(value, n: int = 1) -> HolomorphicMap:
    value = np.atleast_1d(np.asarray(value, dtype=complex))
    m = value.size
    return HolomorphicMap("constant", n, m, lambda z: [_const_like(z, value[i]) for i in range(m)],
                          lambda z: [[_const_like(z, 0.0) for _ in range(n)] for _ in range(m)])


def expression_map(exprs, n: int, name: str = "expression") -> HolomorphicMap:
    """Map from expressions in ``z1..zn``; the Jacobian is differentiated symbolically."""
    import sympy

    zs = sympy.symbols([f"z{k}" for k in range(1, n + 1)])
    local = {s.name: s for s in zs}
    try:
        parsed = [sympy.sympify(e, locals=local) for e in exprs]
    except (sympy.SympifyError, SyntaxError) as exc:
        raise ConfigurationError(f"cannot parse map expression: {exc}") from exc
    for e in parsed:
        extra = e.free_symbols - set(zs)
        if extra:
            raise ConfigurationError(f"map expressions may only use z1..z{n}, found {sorted(map(str, extra))}")
    comp = [sympy.lambdify(zs, e, modules="numpy") for e in parsed]
    jac = [[sympy.lambdify(zs, sympy.diff(e, s), modules="numpy") for s in zs] for e in parsed]

    def components(z):
        return [_const_like(z, 0.0) + c(*z) for c in comp]

    def jacobian(z):
        return [[_const_like(z, 0.0) + d(*z) for d in row] for row in jac]

    return HolomorphicMap(name, n, len(parsed), components, jacobian, expr=tuple(map(str, exprs)))


def parse_map(spec: str) -> HolomorphicMap:
    """Parse ``identity[:n]``, ``power:k``, ``mobius:a[,theta]``, ``embed:c1,c2,...``,
    ``linear:a,b;c,d``, ``constant:w1,...`` or ``expr:e1;e2`` (a file path
    holding expressions one per line is also accepted after ``expr:``)."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "identity":
            return identity_map(int(arg) if arg else 1)
        if kind == "power":
            return power_map(int(arg))
        if kind == "mobius":
            parts = arg.split(",")
            return mobius_map(complex(parts[0]), float(parts[1]) if len(parts) > 1 else 0.0)
        if kind == "embed":
            return embed_map([complex(x) for x in arg.split(",")])
        if kind == "linear":
            return linear_map([[complex(x) for x in row.split(",")] for row in arg.split(";")])
        if kind == "constant":
            return constant_map([complex(x) for x in arg.split(",")])
        if kind == "expr":
            import os

            text = open(arg).read() if os.path.exists(arg) else arg.replace(";", "\n")
            exprs = [line.strip() for line in text.splitlines() if line.strip()]
            n = 1
            while any(f"z{n + 1}" in e for e in exprs):
                n += 1
            return expression_map(exprs, n)
    except ValueError as exc:
        raise ConfigurationError(f"bad map specification {spec!r}: {exc}") from exc
    raise ConfigurationError(
        f"unknown map {spec!r}; use identity, power:k, mobius:a, embed:c1,c2, linear:rows, constant:w or expr:..."
    )


def cauchy_riemann_defect(f: HolomorphicMap, Z) -> float:
    """Largest ``|∂f^i/∂z̄^a|`` over a batch of points ``(n, B)``."""
    Z = np.asarray(Z, dtype=complex).reshape(f.n, -1)
    S = jet_space(f.n, 1, (1, 1, 0, 0))
    worst = 0.0
    for i in range(f.m):
        g = taylor_jet(lambda z, v: f(z)[i], Z, np.ones_like(Z), S)
        for a in range(f.n):
            worst = max(worst, float(np.max(np.abs(g.diff("zb", a).value))))
    return worst


def pullback_metric(f: HolomorphicMap, H: MetricDescriptor) -> MetricDescriptor:
    """``(f*H)(z; v) = H(f(z); f_*(v))``, possibly degenerate where f_* drops rank."""
    if f.m != H.dim:
        raise ShapeError(f"map {f.name} lands in C^{f.m} but metric {H.name!r} lives on C^{H.dim}")

    def G(z, v):
        return H(f(z), f.push(z, v))

    return MetricDescriptor(f"pullback({f.name},{H.name})", f.n, dict(H.params), G)
