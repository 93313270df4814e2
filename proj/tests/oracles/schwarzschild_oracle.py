"""Independent symbolic values for the Euclidean Schwarzschild tests.

The top eigenform is taken from the static frame (no eigen-solver):
F = (th0^th1 + th2^th3)/sqrt(2) with th0 = sqrt(f) dtau, th1 = dr/sqrt(f),
th2 = r dtheta, th3 = r sin(theta) dphi, so |F|^2 = 2 in the full-contraction
convention. On this metric lambda1 = lambda2 = -lambda3/2 and nabla F lies in
the span of the other two eigenforms, so A = |j|^2 + |nabla F|^2 / 4 and
B = div V - A.

Run: python3 schwarzschild_oracle.py
"""
import sympy as sp

tau, r, th, ph = sp.symbols("tau r theta phi", real=True)
m = sp.Integer(1)
x = [tau, r, th, ph]
f = 1 - 2 * m / r
g = sp.diag(f, 1 / f, r**2, r**2 * sp.sin(th) ** 2)
gi = g.inv()
n = 4

Gam = [[[sp.simplify(sum(gi[k, l] * (sp.diff(g[l, i], x[j]) + sp.diff(g[l, j], x[i]) - sp.diff(g[i, j], x[l]))
                         for l in range(n)) / 2) for j in range(n)] for i in range(n)] for k in range(n)]

F = sp.zeros(4, 4)
F[0, 1] = sp.sqrt(f) * (1 / sp.sqrt(f)) / sp.sqrt(2)
F[2, 3] = r * r * sp.sin(th) / sp.sqrt(2)
F = F - F.T


def nablaF(a, b, c):
    return sp.diff(F[b, c], x[a]) - sum(Gam[k][a][b] * F[k, c] + Gam[k][a][c] * F[b, k] for k in range(n))


NF = [[[sp.simplify(nablaF(a, b, c)) for c in range(n)] for b in range(n)] for a in range(n)]
j = [sp.simplify(sum(gi[b, c] * NF[b][c][a] for b in range(n) for c in range(n))) for a in range(n)]
Fup = gi * F * gi
V = [sp.simplify(sum(Fup[a, b] * j[b] for b in range(n))) for a in range(n)]
sqrtg = sp.sqrt(g.det())
divV = sp.simplify(sum(sp.diff(sqrtg * V[a], x[a]) for a in range(n)) / sqrtg)
j2 = sp.simplify(sum(gi[a, b] * j[a] * j[b] for a in range(n) for b in range(n)))
NF2 = sp.simplify(sum(gi[a, a] * gi[b, b] * gi[c, c] * NF[a][b][c] ** 2 for a in range(n) for b in range(n) for c in range(n)))
Vnorm = sp.sqrt(sp.simplify(sum(g[a, b] * V[a] * V[b] for a in range(n) for b in range(n))))
A = j2 + NF2 / 4
B = sp.simplify(divV - A)

pt = {tau: sp.Rational(3, 10), r: 5, th: sp.Rational(11, 10), ph: sp.Rational(2, 5)}
print("g at r=4:", [sp.N(g[i, i].subs({r: 4, th: sp.Rational(11, 10)}), 17) for i in range(4)])
for name, e in [("divV", divV), ("A", A), ("B", B), ("|V|", Vnorm), ("|j|^2", j2), ("|nablaF|^2", NF2)]:
    print(name, sp.simplify(e), "=", sp.N(e.subs(pt), 17))
print("lambda3 = 2m/r^3 =", sp.N((2 * m / r**3).subs(pt), 17))
