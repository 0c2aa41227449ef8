"""Independent symbolic oracle for the reference values frozen into the tests.

Uses sympy only: z, z̄, v, v̄ are independent symbols and conjugation is the
swap z <-> z̄, v <-> v̄ (all coefficients are real).  Takes several minutes:

    python3 scripts/oracle_values.py
"""

import sympy as sp

Z = sp.symbols("z1 z2")
ZB = sp.symbols("zb1 zb2")
V = sp.symbols("v1 v2")
VB = sp.symbols("vb1 vb2")
SWAP = {**dict(zip(Z, ZB)), **dict(zip(ZB, Z)), **dict(zip(V, VB)), **dict(zip(VB, V))}


def bar(e):
    return e.xreplace(SWAP)


def at(z, v):
    sub = {}
    for k in range(len(z)):
        sub[Z[k]], sub[ZB[k]] = z[k], complex(z[k]).conjugate()
        sub[V[k]], sub[VB[k]] = v[k], complex(v[k]).conjugate()
    return sub


def exp_family(a, b, n=2):
    r = sum(V[k] * VB[k] for k in range(n))
    t = sum(Z[k] * ZB[k] for k in range(n))
    zv = sum(Z[k] * VB[k] for k in range(n))
    s = zv * bar(zv) / r
    return r * sp.exp(a * t + b * s)


def finsler_hsc(G, n, point):
    """K = -(2/G^2) G_a δ_n̄(Γ^a_{;m}) v^m v̄^n with Γ^a_{;m} = G^{a b̄} G_{b̄ m}."""
    L = sp.Matrix(n, n, lambda b, t: sp.diff(G, V[b], VB[t]))
    Minv = L.inv()  # Minv[t, a]: Σ_t L[b,t] Minv[t,a] = δ
    A = sp.Matrix(n, n, lambda c, m: sp.diff(G, VB[c], Z[m]))
    Gam = [[sum(Minv[t, a] * A[t, m] for t in range(n)) for m in range(n)] for a in range(n)]
    sub = at(*point)
    Gam0 = [[complex(sp.N(Gam[a][m].subs(sub))) for m in range(n)] for a in range(n)]
    total = 0
    for a in range(n):
        Ga = complex(sp.N(sp.diff(G, V[a]).subs(sub)))
        for m in range(n):
            for nn in range(n):
                expr = sp.diff(Gam[a][m], ZB[nn])
                val = complex(sp.N(expr.subs(sub)))
                for sig in range(n):
                    val -= Gam0[sig][nn].conjugate() * complex(sp.N(sp.diff(Gam[a][m], VB[sig]).subs(sub)))
                total += Ga * val * point[1][m] * complex(point[1][nn]).conjugate()
    G0 = complex(sp.N(G.subs(sub)))
    return -2 * total / G0 ** 2, Gam0


def hermitian_hsc(h, n, point):
    """K_h = 2 R(v, v̄, v, v̄)/h(v)^2 with R_{i j̄ k l̄} = -∂_k ∂_l̄ h_{i j̄} + h^{p q̄} ∂_k h_{i q̄} ∂_l̄ h_{p j̄}."""
    hinv = h.inv()  # hinv[q, p] pairs with h[p, q]
    sub = at(*point)
    v = point[1]
    vb = [complex(x).conjugate() for x in v]
    R = 0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    e = -sp.diff(h[i, j], Z[k], ZB[l])
                    for p in range(n):
                        for q in range(n):
                            e += hinv[q, p] * sp.diff(h[i, q], Z[k]) * sp.diff(h[p, j], ZB[l])
                    R += complex(sp.N(e.subs(sub))) * v[i] * vb[j] * v[k] * vb[l]
    hv = sum(complex(sp.N(h[i, j].subs(sub))) * v[i] * vb[j] for i in range(n) for j in range(n))
    return (2 * R / hv ** 2).real


def main():
    out = {}
    # exp-family value, Levi matrix and connection
    G = exp_family(1, sp.Rational(1, 2))
    p = ((0.5, 0), (1, 0))
    out["expfam_value"] = complex(sp.N(G.subs(at(*p)))).real
    out["expfam_levi"] = [[complex(sp.N(sp.diff(G, V[a], VB[b]).subs(at(*p)))) for b in range(2)] for a in range(2)]
    q = ((0.3 + 0.1j, -0.2), (1, 0.5j))
    K, Gam = finsler_hsc(G, 2, q)
    out["expfam_hsc_symbolic"] = K
    t = abs(q[0][0]) ** 2 + abs(q[0][1]) ** 2
    zv = q[0][0] * complex(q[1][0]).conjugate() + q[0][1] * complex(q[1][1]).conjugate()
    s = abs(zv) ** 2 / (abs(q[1][0]) ** 2 + abs(q[1][1]) ** 2)
    out["expfam_hsc_closed_form"] = -3 / sp.N(sp.exp(t + 0.5 * s))
    out["expfam_gamma_semicolon"] = Gam  # Gam[a][m] = Γ^a_{;m}

    # a Hermitian metric with polynomial coefficients
    h12 = sp.Rational(3, 10) * Z[0] * ZB[1] + sp.Rational(1, 5) * ZB[0]
    h = sp.Matrix([[1 + Z[0] * ZB[0] + Z[1] * ZB[1] / 2, h12],
                   [bar(h12), 1 + 2 * Z[1] * ZB[1] + sp.Rational(1, 10) * (Z[0] * Z[1] + ZB[0] * ZB[1])]])
    r = ((0.2 - 0.1j, 0.15 + 0.05j), (0.6 + 0.2j, -0.3 + 0.7j))
    out["hermpoly_hsc"] = hermitian_hsc(h, 2, r)
    Gh = sum(h[i, j] * V[i] * VB[j] for i in range(2) for j in range(2))
    out["hermpoly_finsler_hsc"], _ = finsler_hsc(Gh, 2, r)

    # one-dimensional quantities
    x = sp.symbols("x", positive=True)
    zz, zb = sp.symbols("zeta zetab")
    rho2 = sp.atanh(sp.sqrt(zz * zb)) ** 2
    out["disk_rho2_ddbar_at_half"] = complex(sp.N(sp.diff(rho2, zz, zb).subs({zz: 0.5, zb: 0.5}))).real
    out["disk_rho2_bound_at_half"] = float(2 * (1 + 2 * sp.atanh(0.5)))
    alpha = sp.nsolve((x - 1) ** 2 * (2 * x + 1) - (2 * x - 1), x, 1.75)
    out["optimal_alpha_K1_r1"] = float(alpha)
    out["optimal_radial_bound_K1_r1"] = float(alpha ** 2 / (2 * alpha - 1) + 1 / (2 * alpha + 1))
    out["radial_alpha2_K1_r1"] = float(sp.Rational(4, 3) + sp.Rational(1, 5))
    out["coth1"] = float(sp.coth(1))
    out["two_coth_half"] = float(2 * sp.coth(sp.Rational(1, 2)))
    out["pullback_square_into_disk_at_half"] = float(4 * sp.Rational(1, 4) / (1 - sp.Rational(1, 16)) ** 2)
    out["schwarz_expfam_bound"] = float(4 / (3 * sp.exp(-sp.Rational(3, 2))))
    out["expfam_sup_K"] = float(-3 * sp.exp(-sp.Rational(3, 2)))
    for k, v in out.items():
        print(f"{k} = {v!r}")


if __name__ == "__main__":
    main()
