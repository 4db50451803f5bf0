"""Independent reference values for the unit and acceptance tests.

Everything here is computed from closed forms with mpmath at 50 digits,
without touching the C++ code. Run from the repository root:

    python3 tests/oracles/oracles.py > tests/oracle_values.hpp
"""

import mpmath as mp

mp.mp.dps = 50


def show(x, digits=17):
    return mp.nstr(mp.mpf(x), digits, min_fixed=-5, max_fixed=5)


values = []


def put(name, x, note):
    values.append((name, show(x), note))


# Spherical cap through the unit circle with H = 0.4 (sphere radius 2.5).
R, r0 = mp.mpf("2.5"), mp.mpf(1)
cap = lambda r: mp.sqrt(R**2 - r0**2) - mp.sqrt(R**2 - r**2)
put("kCapMin", cap(0), "u(0) of the cap, its most negative value")
put("kCapAtHalf", cap(mp.mpf("0.5")), "u at r = 1/2")

# Height bound on the unit disk: (exp(mu delta) - 1) / mu, mu = n h0 (1 + 1e-6).
mu = 2 * mp.mpf("0.4") * (1 + mp.mpf("1e-6"))
put("kHeightBoundDiskH04", mp.expm1(mu * 2) / mu, "unit disk, H = 0.4, n = 2, zero data")

# Boundary-gradient constants on the unit disk, H = 0.4, phi = 0, M = 0.21.
tau = mp.mpf(1)
kappa_t = 1 / (1 - tau / 2)
d_c2 = tau / 2 + 1 + kappa_t
C = 4 * 2 * (1 + d_c2 + 1 / tau)
nu = C * (1 + mp.mpf("0.4"))
M = mp.mpf("0.21")
put("kPkgC", C, "4 n (1 + ||d||_2 + 1/tau)")
put("kPkgNu", nu, "C (1 + ||H||_1)")
put("kPkgLogK", mp.log(nu) + nu * M, "log of nu exp(nu M)")
put("kPkgA", -mp.expm1(-nu * M) / nu, "(1 - exp(-nu M)) / nu")
put("kPkgPsiPrime0", mp.exp(nu * M), "exp(nu M)")


# psi_ne(t) = sqrt(2/(n-1)) int_t^delta log(r/a)^(-1/2) dr, a = exp(log_a).
def psi_ne(t, log_a, delta, n):
    t, delta = mp.mpf(t), mp.mpf(delta)
    f = lambda r: 1 / mp.sqrt(mp.log(r) - log_a)
    return mp.sqrt(mp.mpf(2) / (n - 1)) * mp.quad(f, [t, (t + delta) / 2, delta])


for name, args in [("kPsiNe1", ("0.5", mp.mpf("-3200.307087"), 2, 2)),
                   ("kPsiNe2", ("0.3", mp.mpf(-5), 1, 2)),
                   ("kPsiNe3", ("0.2", mp.mpf(-3), "1.5", 3))]:
    put(name, psi_ne(*args), "psi_ne(t=%s, log a=%s, delta=%s, n=%d)" % (args[0], mp.nstr(args[1], 12), args[2], args[3]))

# psi_ne(a) near the singular end: with r = a e^{s^2}, int_a^delta = 2a int_0^sqrt(L) e^{s^2} ds.
def psi_at_a(log_a, delta, n):
    L = mp.log(delta) - log_a
    return mp.sqrt(mp.mpf(2) / (n - 1)) * 2 * mp.exp(log_a) * mp.quad(lambda s: mp.exp(s**2), [0, mp.sqrt(L)])


# Non-existence on the unit disk, H = 0.55, kappa = 1, eps = 0.05, n = 2.
H, kappa, n, eps, delta = mp.mpf("0.55"), mp.mpf(1), 2, mp.mpf("0.05"), mp.mpf(2)
nu_ne = (n * H - (n - 1) * kappa) / 8
put("kNuNe", nu_ne, "(n H - (n-1) kappa) / 8")
put("kKappaS", kappa + nu_ne / (2 * (n - 1)), "kappa + nu / (2 (n-1))")
total = lambda log_a: psi_at_a(log_a, delta, n) + mp.sqrt(2 * mp.exp(log_a) / nu_ne)
log_a_star = mp.findroot(lambda la: total(la) - eps, mp.mpf(-3200))
put("kLogAStar", log_a_star, "log a where psi(a) + sqrt(2a/nu) = eps; certified radii lie below")
put("kTotalAtRecordedLogA", total(mp.mpf("-3200.307087")), "psi(a) + sqrt(2a/nu) at log a = -3200.307087")

# Ellipse x^2/4 + y^2 = 1.
a, b = mp.mpf(2), mp.mpf(1)
put("kEllipsePerimeter", 4 * a * mp.ellipe(1 - b**2 / a**2), "perimeter of the 2 x 1 ellipse")
put("kEllipseKappaMax", a / b**2, "curvature at (2, 0)")
put("kEllipseKappaMin", b / a**2, "curvature at (0, 1)")
put("kEllipseFocal", b**2 / a, "smallest radius of curvature")

# Scherk graph u = log(cos x / cos y) and the catenoid c acosh(r/c).
put("kScherkAt", mp.log(mp.cos(mp.mpf("0.3")) / mp.cos(mp.mpf("-0.45"))), "Scherk u(0.3, -0.45)")
put("kCatenoidAt", mp.acosh(2), "catenoid u at r = 2, c = 1")

print("#pragma once")
print()
print("// Generated by tests/oracles/oracles.py; do not edit by hand.")
print()
print("namespace oracle {")
print()
for name, v, note in values:
    print("// %s" % note)
    print("inline constexpr double %s = %s;" % (name, v))
print()
print("} // namespace oracle")
