"""Reference values frozen into the unit tests (mpmath, 50 digits)."""
from mpmath import mp, mpf, sqrt, exp, quad, gamma, besselk, besseli, pi, inf

mp.dps = 50


def kj_integral(j, z):
    # integral definition on [1, inf)
    f = lambda s: exp(-z * s) * (s * s - 1) ** (j - mpf(1) / 2)
    return (z / 2) ** j * gamma(mpf(1) / 2) / gamma(j + mpf(1) / 2) * quad(f, [1, 2, 10, inf])


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


for j, z in [(2, 1), (3, 1), (2, 0.5), (3, 5), (2, 50), (0, 2), (1, 2)]:
    a = kj_integral(j, mpf(z))
    b = besselk(j, z)
    assert abs(a / b - 1) < mpf(10) ** -18, (j, z, a, b)
    show(f"K{j}({z})", a)
show("K3/K2(1)", kj_integral(3, mpf(1)) / kj_integral(2, mpf(1)))
show("I0(2)", quad(lambda t: exp(2 * mp.cos(t)), [0, 2 * pi]) / (2 * pi))
show("I0(2) besseli", besseli(0, 2))


def en(p, c):
    return sqrt(c * c + sum(x * x for x in p))


show("energy((1,2,2),10)", en([1, 2, 2], 10))

p, q, c = [mpf(1), 0, 0], [0, mpf(1), 0], mpf(2)
p0, q0 = en(p, c), en(q, c)
pq = sum(a * b for a, b in zip(p, q))
s = 2 * (p0 * q0 - pq + c * c)
g = sqrt(2 * (p0 * q0 - pq - c * c))
cr = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]]
show("inv.s", s)
show("inv.g", g)
show("inv.ell", c * (p0 + q0) / 2)
show("inv.j", c * sqrt(sum(x * x for x in cr)) / g)

p, q, c = [mpf(2), 0, 0], [mpf(-2), 0, 0], mpf(5)
p0, q0 = en(p, c), en(q, c)
pq = sum(a * b for a, b in zip(p, q))
s = 2 * (p0 * q0 - pq + c * c)
g = sqrt(2 * (p0 * q0 - pq - c * c))
show("moller", c / 4 * g * sqrt(s) / (p0 * q0))

p, q, c = [mpf(1), 0, 0], [0, mpf(-1), 0], mpf(2)
w = [1 / sqrt(3)] * 3
p0, q0 = en(p, c), en(q, c)
dot = lambda a, b: sum(x * y for x, y in zip(a, b))
pp = [a + b for a, b in zip(p, q)]
den = (p0 + q0) ** 2 - dot(w, pp) ** 2
a = 2 * p0 * q0 * (p0 + q0) * dot(w, [q[i] / q0 - p[i] / p0 for i in range(3)]) / den
N0 = 2 * dot(w, pp) * (p0 * dot(w, q) - q0 * dot(w, p)) / den
show("gs.a", a)
show("gs.N0", N0)
show("gs.pout0", p[0] + a * w[0])
B = c * (p0 + q0) ** 2 * p0 * q0 * abs(dot(w, [p[i] / p0 - q[i] / q0 for i in range(3)])) / den ** 2
show("gs.kernel", 2 * (p0 * q0 - dot(p, q) + c * c) / (p0 * q0) * B)

for c in [2, 10]:
    c = mpf(c)
    show(f"J({c},0)", exp(-c * c) / (4 * pi * c * besselk(2, c * c)))
c = mpf(10)
show("|J-mu|(10,0)", abs(exp(-c * c) / (4 * pi * c * besselk(2, c * c)) - (2 * pi) ** mpf(-1.5)))
show("nu_newton(0)", 4 * sqrt(2 * pi))
show("k1((1,0,0),0)", exp(-mpf(1) / 4) / sqrt(2 * pi))


# nu_c(p) = 4 pi int v_moller(p, q) J_c(q) dq, direct 2D quadrature (axisymmetric in q)
def nu_rel(pz, c):
    c = mpf(c)
    norm = 1 / (4 * pi * c * besselk(2, c * c))
    p0 = sqrt(c * c + pz * pz)

    def integrand(r, u):
        q0 = sqrt(c * c + r * r)
        pq = pz * r * u
        s = 2 * (p0 * q0 - pq + c * c)
        g = sqrt(max(2 * (p0 * q0 - pq - c * c), 0))
        vm = c / 4 * g * sqrt(s) / (p0 * q0)
        return vm * norm * exp(-c * q0) * 2 * pi * r * r

    if pz == 0:
        return 4 * pi * 2 * quad(lambda r: integrand(r, 0), [0, 1, 3, 8, 30])
    return 4 * pi * quad(integrand, [0, 1, 3, 8, 30], [-1, 0, 1], method="gauss-legendre")


mp.dps = 25
show("nu_rel(0,2)", nu_rel(mpf(0), 2))
show("nu_rel(1,2)", nu_rel(mpf(1), 2))
show("nu_rel(1,10)", nu_rel(mpf(1), 10))
