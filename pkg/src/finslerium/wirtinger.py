"""Wirtinger derivatives of scalar fields on jet space.

A scalar field is any callable ``f(z, v)`` taking two length-``n`` sequences
of complex components and built from arithmetic and numpy ufuncs
(``np.exp``, ``np.conj``, ``np.sqrt`` ...).  Two independent routes compute
mixed derivatives in the variable groups ``z, zb, v, vb``:

* forward mode: the field is evaluated on truncated multivariate Taylor
  series (:class:`Jet`) in the increments ``dx + i dy`` and ``dx - i dy`` of
  every complex coordinate, so each coefficient is an exact Wirtinger
  derivative up to rounding;
* finite differences: product central-difference stencils on the real and
  imaginary parts, combined as ``d/dz = (d/dx - i d/dy) / 2`` and refined by
  Richardson extrapolation.  This path evaluates ``f`` on plain complex
  arrays only.

Every routine accepts a trailing batch axis so that many jet points can be
processed in one call.
"""

from __future__ import annotations

import functools
import itertools
import math
import operator
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ConfigurationError,
    DomainError,
    IllConditionedStepError,
    ShapeError,
    UnsupportedOrderError,
)

GROUPS = ("z", "zb", "v", "vb")
MAX_ORDER = 4
ZERO_SECTION_EPS = 1e-8

ScalarField = Callable[[Sequence, Sequence], object]


# --------------------------------------------------------------------------
# points, requests, plans
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChartPoint:
    coords: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coords, dtype=complex))
        if c.ndim != 1 or c.size < 1:
            raise ShapeError("chart point needs a 1-d vector of n >= 1 coordinates")
        if not np.all(np.isfinite(c)):
            raise DomainError("chart coordinates must be finite")
        object.__setattr__(self, "coords", c)

    @property
    def dim(self) -> int:
        return self.coords.size


@dataclass(frozen=True)
class JetPoint:
    """Base point plus a tangent direction off the zero section."""

    base: ChartPoint
    dir: np.ndarray

    def __post_init__(self):
        if not isinstance(self.base, ChartPoint):
            object.__setattr__(self, "base", ChartPoint(self.base))
        d = np.atleast_1d(np.asarray(self.dir, dtype=complex))
        if d.shape != self.base.coords.shape:
            raise ShapeError(f"direction has shape {d.shape}, base has {self.base.coords.shape}")
        if not np.all(np.isfinite(d)):
            raise DomainError("direction must be finite")
        if np.linalg.norm(d) < ZERO_SECTION_EPS:
            raise DomainError("jet point lies on the zero section (|v| < 1e-8)")
        object.__setattr__(self, "dir", d)

    @classmethod
    def of(cls, z, v) -> "JetPoint":
        return cls(ChartPoint(z), v)

    @property
    def z(self) -> np.ndarray:
        return self.base.coords

    @property
    def v(self) -> np.ndarray:
        return self.dir

    @property
    def dim(self) -> int:
        return self.base.dim

    def to_dict(self) -> dict:
        return {"z": [_cplx(x) for x in self.z], "v": [_cplx(x) for x in self.v]}


def _cplx(x) -> list:
    x = complex(x)
    return [x.real, x.imag]


@dataclass(frozen=True)
class DerivativeRequest:
    """Multi-index over the four variable groups; entries are 0-based indices."""

    z: tuple = ()
    zb: tuple = ()
    v: tuple = ()
    vb: tuple = ()

    def __post_init__(self):
        for g in GROUPS:
            object.__setattr__(self, g, tuple(int(i) for i in getattr(self, g)))
        if self.order > MAX_ORDER:
            raise UnsupportedOrderError(
                f"total derivative order {self.order} exceeds {MAX_ORDER}"
            )

    @classmethod
    def parse(cls, text: str) -> "DerivativeRequest":
        """Parse tokens such as ``"z1 zb1 v2 vb2"`` (1-based coordinate labels)."""
        groups = {g: [] for g in GROUPS}
        for tok in text.replace(",", " ").split():
            tok = tok.lstrip("d")
            for g in ("zb", "vb", "z", "v"):
                if tok.startswith(g) and tok[len(g):].isdigit():
                    groups[g].append(int(tok[len(g):]) - 1)
                    break
            else:
                raise ConfigurationError(f"cannot parse derivative token {tok!r}")
        return cls(**groups)

    @property
    def order(self) -> int:
        return sum(len(getattr(self, g)) for g in GROUPS)

    def slots(self) -> list:
        return [(g, i) for g in GROUPS for i in getattr(self, g)]

    def swapped(self) -> "DerivativeRequest":
        """Exchange the holomorphic and antiholomorphic roles."""
        return DerivativeRequest(z=self.zb, zb=self.z, v=self.vb, vb=self.v)

    def exponent(self, n: int) -> np.ndarray:
        e = np.zeros(4 * n, dtype=int)
        for k, g in enumerate(GROUPS):
            for i in getattr(self, g):
                if not 0 <= i < n:
                    raise ShapeError(f"coordinate index {i} out of range for n={n}")
                e[k * n + i] += 1
        return e


@dataclass(frozen=True)
class DifferentiationPlan:
    mode: str = "auto"
    fd_step: float = 1e-5
    richardson_levels: int = 2

    def __post_init__(self):
        if self.mode not in ("auto", "fd"):
            raise ConfigurationError(f"unknown differentiation mode {self.mode!r}")
        if not self.fd_step > 0:
            raise ConfigurationError("fd_step must be positive")
        if self.richardson_levels not in (1, 2, 3):
            raise ConfigurationError("richardson_levels must be 1, 2 or 3")


AUTO = DifferentiationPlan()
FD = DifferentiationPlan(mode="fd")


# --------------------------------------------------------------------------
# truncated Taylor arithmetic
# --------------------------------------------------------------------------


class JetSpace:
    """Monomials in the 4n Wirtinger increments, truncated by total degree
    and by a degree cap per variable group.  The monomial set is downward
    closed, so truncated products are exact on it."""

    def __init__(self, n: int, degree: int, caps: Sequence[int] | None = None):
        self.n = n
        self.degree = degree
        self.caps = (degree,) * 4 if caps is None else tuple(min(int(c), degree) for c in caps)
        m = 4 * n
        self.nvars = m
        exps = []
        for d in range(degree + 1):
            for combo in itertools.combinations_with_replacement(range(m), d):
                e = np.bincount(np.asarray(combo, dtype=int), minlength=m)
                if all(e[k * n:(k + 1) * n].sum() <= self.caps[k] for k in range(4)):
                    exps.append(e)
        self.exponents = np.array(exps, dtype=int).reshape(len(exps), m)
        self.size = len(exps)
        self.deg = self.exponents.sum(axis=1)
        self._base = degree + 1
        self._weights = self._base ** np.arange(m)
        codes = self.exponents @ self._weights
        self._order = np.argsort(codes)
        self._sorted_codes = codes[self._order]
        self.factorials = np.array(
            [math.prod(math.factorial(int(k)) for k in e) for e in self.exponents], dtype=float
        )
        self._build_products()
        self._build_derivatives()
        swap = np.concatenate([np.arange(n, 2 * n), np.arange(n), np.arange(3 * n, 4 * n), np.arange(2 * n, 3 * n)])
        self.conj_index = self.lookup(self.exponents[:, swap])

    def lookup(self, exps: np.ndarray) -> np.ndarray:
        codes = np.atleast_2d(exps) @ self._weights
        pos = np.searchsorted(self._sorted_codes, codes)
        pos = np.minimum(pos, self.size - 1)
        if not np.all(self._sorted_codes[pos] == codes):
            raise KeyError("monomial outside jet space")
        return self._order[pos]

    def index(self, exponent) -> int:
        e = np.asarray(exponent, dtype=int)
        if e.min() < 0 or e.sum() > self.degree:
            raise KeyError("monomial outside jet space")
        return int(self.lookup(e[None, :])[0])

    def _group_ok(self, exps):
        n = self.n
        ok = exps.sum(axis=1) <= self.degree
        for k in range(4):
            ok &= exps[:, k * n:(k + 1) * n].sum(axis=1) <= self.caps[k]
        return ok

    def _build_products(self):
        I, J, K = [], [], []
        for i in range(self.size):
            js = np.flatnonzero(self.deg <= self.degree - self.deg[i])
            s = self.exponents[js] + self.exponents[i]
            ok = self._group_ok(s)
            js, s = js[ok], s[ok]
            I.append(np.full(js.size, i))
            J.append(js)
            K.append(self.lookup(s))
        I, J, K = (np.concatenate(a) for a in (I, J, K))
        order = np.argsort(K, kind="stable")
        self._I, self._J, K = I[order], J[order], K[order]
        self._starts = np.flatnonzero(np.r_[True, K[1:] != K[:-1]])

    def _build_derivatives(self):
        self._dtables = []
        for q in range(self.nvars):
            src = np.flatnonzero(self.exponents[:, q] >= 1)
            lowered = self.exponents[src].copy()
            lowered[:, q] -= 1
            self._dtables.append((src, self.lookup(lowered), self.exponents[src, q].astype(float)))

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        prod = a[self._I] * b[self._J]
        return np.add.reduceat(prod, self._starts, axis=0)

    def embedding_into(self, big: "JetSpace") -> np.ndarray:
        if big.n != self.n:
            raise ShapeError("jet spaces of different dimension")
        return big.lookup(self.exponents)

    def var_index(self, group: str, i: int) -> int:
        return GROUPS.index(group) * self.n + i

    def variable(self, group: str, i: int, base) -> "Jet":
        base = np.asarray(base, dtype=complex)
        c = np.zeros((self.size,) + base.shape, dtype=complex)
        c[0] = base
        unit = np.zeros(self.nvars, dtype=int)
        unit[self.var_index(group, i)] = 1
        if self.degree >= 1 and self.caps[GROUPS.index(group)] >= 1:
            c[self.index(unit)] = 1.0
        return Jet(self, c)

    def constant(self, value) -> "Jet":
        value = np.asarray(value, dtype=complex)
        c = np.zeros((self.size,) + value.shape, dtype=complex)
        c[0] = value
        return Jet(self, c)


@functools.lru_cache(maxsize=64)
def jet_space(n: int, degree: int, caps: tuple | None = None) -> JetSpace:
    return JetSpace(n, degree, caps)


def _const_derivs_pow(a, p, deg):
    out, coef = [], np.ones_like(a)
    for j in range(deg + 1):
        out.append(coef * a ** (p - j))
        coef = coef * (p - j)
    return out


class Jet:
    """Truncated Taylor series with complex coefficients of shape ``(M, *batch)``.

    ``valid`` is ``(total, z, zb, v, vb)``: the coefficients are trustworthy
    only for monomials within these degree bounds (differentiation lowers
    them).
    """

    __array_priority__ = 1000

    def __init__(self, space: JetSpace, coeffs: np.ndarray, valid=None):
        self.space = space
        self.coeffs = coeffs
        self.valid = np.array((space.degree,) + space.caps if valid is None else valid, dtype=int)

    # -- helpers ----------------------------------------------------------
    @property
    def batch_shape(self):
        return self.coeffs.shape[1:]

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[0]

    def _new(self, coeffs, valid=None):
        return Jet(self.space, coeffs, self.valid if valid is None else valid)

    def _as_coeffs(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ShapeError("jets live in different spaces")
            return other.coeffs, other.valid
        return None, None

    def _nilpotent(self):
        c = self.coeffs.copy()
        c[0] = 0
        return self._new(c)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        oc, ov = self._as_coeffs(other)
        if oc is None:
            other = np.asarray(other)
            shape = (self.space.size,) + np.broadcast_shapes(self.batch_shape, other.shape)
            c = np.array(np.broadcast_to(self.coeffs, shape), dtype=complex)
            c[0] += other
            return self._new(c)
        return self._new(self.coeffs + oc, np.minimum(self.valid, ov))

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.coeffs)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        oc, ov = self._as_coeffs(other)
        if oc is None:
            other = np.asarray(other)
            return self._new(self.coeffs * other[None, ...])
        a, b = self.coeffs, oc
        if a.shape != b.shape:
            shape = (self.space.size,) + np.broadcast_shapes(a.shape[1:], b.shape[1:])
            a, b = np.broadcast_to(a, shape), np.broadcast_to(b, shape)
        return self._new(self.space.multiply(a, b), np.minimum(self.valid, ov))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return (p * self.log()).exp()
        if np.ndim(p) == 0 and float(np.real(p)) == int(np.real(p)) and np.imag(p) == 0 and 0 <= int(np.real(p)) <= 16:
            k = int(np.real(p))
            result, base = None, self
            while k:
                if k & 1:
                    result = base if result is None else result * base
                k >>= 1
                if k:
                    base = base * base
            return self.space.constant(np.ones(self.batch_shape)) if result is None else result
        return self._compose(_const_derivs_pow(self.value, p, self._deg()))

    def __rpow__(self, base):
        return (self * np.log(np.asarray(base, dtype=complex))).exp()

    # -- analytic functions via Taylor composition --------------------------
    def _deg(self):
        return int(min(self.space.degree, self.valid[0]))

    def _compose(self, derivs):
        """f(a0 + N) = sum_j f^(j)(a0) N^j / j! with N the nilpotent part."""
        N = self._nilpotent()
        deg = len(derivs) - 1
        res = self.space.constant(derivs[deg] / math.factorial(deg))
        res = res._new(res.coeffs, self.valid)
        for j in range(deg - 1, -1, -1):
            res = res * N + derivs[j] / math.factorial(j)
        return res

    def exp(self):
        e = np.exp(self.value)
        return self._compose([e] * (self._deg() + 1))

    def log(self):
        a = self.value
        d = [np.log(a)] + [(-1) ** (j - 1) * math.factorial(j - 1) / a ** j for j in range(1, self._deg() + 1)]
        return self._compose(d)

    def reciprocal(self):
        a = self.value
        return self._compose([(-1) ** j * math.factorial(j) / a ** (j + 1) for j in range(self._deg() + 1)])

    def sqrt(self):
        return self ** 0.5

    def sin(self):
        a = self.value
        return self._compose([np.sin(a + j * np.pi / 2) for j in range(self._deg() + 1)])

    def cos(self):
        a = self.value
        return self._compose([np.cos(a + j * np.pi / 2) for j in range(self._deg() + 1)])

    def sinh(self):
        return (self.exp() - (-self).exp()) * 0.5

    def cosh(self):
        return (self.exp() + (-self).exp()) * 0.5

    def tanh(self):
        e = (2 * self).exp()
        return (e - 1) / (e + 1)

    def arctanh(self):
        return ((1 + self).log() - (1 - self).log()) * 0.5

    def conj(self):
        return self._new(np.conj(self.coeffs[self.space.conj_index]), self.valid[[0, 2, 1, 4, 3]])

    conjugate = conj

    @property
    def real(self):
        return (self + self.conj()) * 0.5

    @property
    def imag(self):
        return (self - self.conj()) * (-0.5j)

    _UFUNCS = {
        "exp": "exp", "log": "log", "sqrt": "sqrt", "conjugate": "conj", "sin": "sin",
        "cos": "cos", "sinh": "sinh", "cosh": "cosh", "tanh": "tanh", "arctanh": "arctanh",
        "reciprocal": "reciprocal", "negative": "__neg__", "positive": "__pos__",
    }
    _BINARY = {"add": operator.add, "subtract": operator.sub, "multiply": operator.mul,
               "true_divide": operator.truediv, "divide": operator.truediv, "power": operator.pow}

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs:
            return NotImplemented
        name = ufunc.__name__
        if name in self._UFUNCS and len(inputs) == 1:
            return getattr(inputs[0], self._UFUNCS[name])()
        if name == "square":
            return inputs[0] * inputs[0]
        if name == "log1p":
            return (1 + inputs[0]).log()
        if name == "expm1":
            return inputs[0].exp() - 1
        if name in self._BINARY and len(inputs) == 2:
            a, b = inputs
            op = self._BINARY[name]
            if isinstance(a, Jet):
                return op(a, b)
            # reflected: a is a plain array/scalar
            if name == "add":
                return b + a
            if name == "multiply":
                return b * a
            if name == "subtract":
                return (-b) + a
            if name in ("true_divide", "divide"):
                return b.reciprocal() * a
            return b.__rpow__(a)
        raise TypeError(f"ufunc {name!r} is not supported on jets")

    # -- calculus ---------------------------------------------------------
    def diff(self, group: str, i: int) -> "Jet":
        q = self.space.var_index(group, i)
        src, dst, fac = self.space._dtables[q]
        c = np.zeros_like(self.coeffs)
        c[dst] = self.coeffs[src] * fac.reshape((-1,) + (1,) * (c.ndim - 1))
        valid = self.valid.copy()
        valid[0] -= 1
        valid[1 + GROUPS.index(group)] -= 1
        return self._new(c, valid)

    def project(self, small: JetSpace) -> "Jet":
        idx = small.embedding_into(self.space)
        valid = np.minimum(self.valid, (small.degree,) + small.caps)
        return Jet(small, self.coeffs[idx], valid)

    def with_valid_total(self, total: int) -> "Jet":
        valid = self.valid.copy()
        valid[0] = min(valid[0], total)
        return self._new(self.coeffs, valid)

    def coeff(self, exponent) -> np.ndarray:
        e = np.asarray(exponent, dtype=int)
        n = self.space.n
        if e.sum() > self.valid[0] or any(e[k * n:(k + 1) * n].sum() > self.valid[1 + k] for k in range(4)):
            raise UnsupportedOrderError("requested coefficient exceeds the jet's valid order")
        return self.coeffs[self.space.index(e)]

    def partial(self, req: DerivativeRequest) -> np.ndarray:
        e = req.exponent(self.space.n)
        return self.coeff(e) * math.prod(math.factorial(int(k)) for k in e)

    def __repr__(self):
        return f"Jet(n={self.space.n}, degree={self.space.degree}, batch={self.batch_shape})"


def seed_jets(space: JetSpace, Z: np.ndarray, V: np.ndarray):
    """Jet-valued coordinates z^a = Z^a + dz^a and v^a = V^a + dv^a."""
    z = [space.variable("z", a, Z[a]) for a in range(space.n)]
    v = [space.variable("v", a, V[a]) for a in range(space.n)]
    return z, v


# --------------------------------------------------------------------------
# finite-difference oracle
# --------------------------------------------------------------------------


def effective_step(step: float, order: int) -> float:
    """Per-order step: ``step`` for first derivatives, growing as
    ``step**(2/(order+1))`` so that rounding (~eps/h^order) and the h^4
    Richardson truncation stay balanced up to order four."""
    if order <= 1 or step >= 1:
        return step
    return step ** (2.0 / (order + 1))


def _stencil(f: ScalarField, Z, V, slots, h):
    """Product of single-slot Wirtinger central differences.  ``h`` is (B,)."""
    n = Z.shape[0]
    k = len(slots)
    combos = list(itertools.product(range(4), repeat=k))
    C = len(combos)
    B = Z.shape[1]
    dZ = np.zeros((n, C, B), dtype=complex)
    dV = np.zeros((n, C, B), dtype=complex)
    w = np.ones((C, B), dtype=complex)
    for c, combo in enumerate(combos):
        for (g, i), choice in zip(slots, combo):
            hs = h[(g, i)]
            sgn = 1.0 if choice % 2 == 0 else -1.0
            if choice < 2:
                disp, wt = sgn * hs, sgn * 0.5 / (2 * hs)
            else:
                disp = 1j * sgn * hs
                wt = sgn * (-0.5j if g in ("z", "v") else 0.5j) / (2 * hs)
            if g in ("z", "zb"):
                dZ[i, c] += disp
            else:
                dV[i, c] += disp
            w[c] *= wt
    Zs = (Z[:, None, :] + dZ).reshape(n, C * B)
    Vs = (V[:, None, :] + dV).reshape(n, C * B)
    vals = np.asarray(f(list(Zs), list(Vs)), dtype=complex).reshape(C, B)
    return (w * vals).sum(axis=0)


def fd_derivative_batch(f: ScalarField, Z, V, req: DerivativeRequest, step=1e-5, levels=2):
    """Batched central-difference Wirtinger derivative; Z, V have shape (n, B)."""
    Z = np.asarray(Z, dtype=complex)
    V = np.asarray(V, dtype=complex)
    slots = req.slots()
    if not slots:
        return np.asarray(f(list(Z), list(V)), dtype=complex) * np.ones(Z.shape[1])
    scales = {}
    for g, i in slots:
        coord = Z[i] if g in ("z", "zb") else V[i]
        scales[(g, i)] = 1.0 + np.abs(coord)
    smax = max(float(np.max(s)) for s in scales.values())
    if step < 1e-12 * smax:
        raise IllConditionedStepError(f"finite-difference step {step:g} underflows coordinate scale {smax:g}")
    h0 = effective_step(step, len(slots))
    table = []
    for j in range(levels):
        hj = {key: h0 / 2 ** j * s for key, s in scales.items()}
        row = [_stencil(f, Z, V, slots, hj)]
        for m in range(1, j + 1):
            row.append((4 ** m * row[m - 1] - table[j - 1][m - 1]) / (4 ** m - 1))
        table.append(row)
    return table[-1][-1]


def fd_oracle_derivative(f: ScalarField, p: JetPoint, req: DerivativeRequest, step: float = 1e-5, levels: int = 2) -> complex:
    """Central-difference estimate of a mixed Wirtinger derivative at ``p``.

    Shares no code with the forward mode: ``f`` only ever sees complex
    arrays.  ``step`` is the first-order step; higher orders use
    :func:`effective_step`.
    """
    if not isinstance(p, JetPoint):
        raise ShapeError("fd_oracle_derivative expects a JetPoint")
    Z, V = p.z[:, None], p.v[:, None]
    return complex(fd_derivative_batch(f, Z, V, req, step, levels)[0])


# --------------------------------------------------------------------------
# public derivative entry points
# --------------------------------------------------------------------------


def _check_batch(Z, V):
    Z = np.asarray(Z, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if Z.ndim == 1:
        Z = Z[:, None]
    if V.ndim == 1:
        V = V[:, None]
    if Z.shape != V.shape:
        raise ShapeError(f"z batch {Z.shape} and v batch {V.shape} differ")
    if np.any(np.linalg.norm(V, axis=0) < ZERO_SECTION_EPS):
        raise DomainError("evaluation on the zero section (|v| < 1e-8)")
    return Z, V


def taylor_jet(f: ScalarField, Z, V, space: JetSpace, plan: DifferentiationPlan = AUTO) -> Jet:
    """Taylor jet of ``f`` at a batch of jet points, in ``space``.

    In ``fd`` mode every coefficient is estimated by finite differences and
    the resulting jet feeds the same downstream algebra as the forward mode.
    """
    Z, V = _check_batch(Z, V)
    if plan.mode == "auto":
        z, v = seed_jets(space, Z, V)
        out = f(z, v)
        if not isinstance(out, Jet):
            out = space.constant(np.broadcast_to(np.asarray(out, dtype=complex), Z.shape[1:]))
        return out
    n = space.n
    coeffs = np.zeros((space.size, Z.shape[1]), dtype=complex)
    for idx, e in enumerate(space.exponents):
        groups = {g: [] for g in GROUPS}
        for q in np.flatnonzero(e):
            g, i = GROUPS[q // n], q % n
            groups[g].extend([i] * int(e[q]))
        req = DerivativeRequest(**groups)
        coeffs[idx] = fd_derivative_batch(f, Z, V, req, plan.fd_step, plan.richardson_levels) / space.factorials[idx]
    return Jet(space, coeffs)


def wirtinger_derivative_batch(f: ScalarField, Z, V, req: DerivativeRequest, plan: DifferentiationPlan = AUTO) -> np.ndarray:
    Z, V = _check_batch(Z, V)
    if plan.mode == "fd":
        return fd_derivative_batch(f, Z, V, req, plan.fd_step, plan.richardson_levels)
    n = Z.shape[0]
    cz = max(len(req.z), len(req.zb))
    cv = max(len(req.v), len(req.vb))
    # conjugation needs caps symmetric under z <-> zb, v <-> vb
    space = jet_space(n, req.order, (cz, cz, cv, cv))
    return taylor_jet(f, Z, V, space, plan).partial(req)


def wirtinger_derivative(f: ScalarField, p: JetPoint, req: DerivativeRequest, plan: DifferentiationPlan = AUTO) -> complex:
    """Mixed Wirtinger derivative of ``f`` at ``p``.

    >>> f = lambda z, v: v[0] * np.conj(v[0])
    >>> wirtinger_derivative(f, JetPoint.of([0.3], [1.0]), DerivativeRequest(v=(0,), vb=(0,)))
    (1+0j)
    """
    if not isinstance(req, DerivativeRequest):
        req = DerivativeRequest(**req)
    return complex(wirtinger_derivative_batch(f, p.z, p.v, req, plan)[0])
