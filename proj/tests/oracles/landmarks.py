"""High-precision reference values frozen into the C++ tests.

Evaluated with mpmath at 50 digits, independent of the C++ code paths.
Run: python3 tests/oracles/landmarks.py
"""
import mpmath as mp

mp.mp.dps = 50


def gamma(b):
    return 1 / mp.sqrt(1 - b * b)


def branches(b, w=1):
    g = gamma(b)
    return g * (1 - b) * w, g * (1 + b) * w


def lorentz(chi0, w0, kappa, om):
    return chi0 / (kappa / 2 - 1j * (om - w0))


def amps(b, w, chi):
    g = gamma(b)
    wp, wm = branches(b, w)
    return g * (1 - b) * chi(wp), g * (1 + b) * chi(wm)


def vb(gp, gm):
    s = abs(gp) ** 2 + abs(gm) ** 2
    return 2 * abs(gp) * abs(gm) / s, (abs(gp) ** 2 - abs(gm) ** 2) / s


def show(label, x):
    print(f"{label:48s} {mp.nstr(x, 20)}")


b = mp.mpf("0.025")
wp, wm = branches(b)
show("gamma(0.6)", gamma(mp.mpf("0.6")))
show("splitting(0.025)", wm - wp)
show("Omega_plus(0.025)", wp)
show("Omega_minus(0.025)", wm)

gp, gm = amps(mp.mpf("0.5"), 1, lambda o: 1)
show("g_plus broadband 0.5", gp)
show("g_minus broadband 0.5", gm)
show("rate broadband 0.5 phi=0 tau=0", abs(gp + gm) ** 2 / 2)

for bb in ("0.1",):
    V = (1 - mp.mpf(bb) ** 2) / (1 + mp.mpf(bb) ** 2)
    B = -2 * mp.mpf(bb) / (1 + mp.mpf(bb) ** 2)
    show(f"broadband V({bb})", V)
    show(f"broadband B({bb})", B)

kappa = mp.mpf("0.1")
gp, gm = amps(b, 1, lambda o: lorentz(1, wp, kappa, o))
r = abs(gm) / abs(gp)
V, B = vb(gp, gm)
show("onset r (tuned plus, direct g quotient)", r)
show("onset V", V)
show("onset B", B)
gp2, gm2 = amps(b, 1, lambda o: lorentz(1, wm, kappa, o))
show("mirror r (tuned minus)", abs(gm2) / abs(gp2))
show("V_obs onset * |sinc(1)|", V * abs(mp.sin(1)))

b6 = mp.mpf("1e-6")
Q = 1 / (4 * b6)
wp6, wm6 = branches(b6)
gp, gm = amps(b6, 1, lambda o: lorentz(1, wp6, 1 / Q, o))
r6 = abs(gm) / abs(gp)
show("nonrel r full pipeline", r6)
show("nonrel r dispersive factor only", r6 * (1 - b6) / (1 + b6))
show("1/sqrt2", 1 / mp.sqrt(2))
show("V(1/sqrt2)", 2 * (1 / mp.sqrt(2)) / (1 + mp.mpf(1) / 2))

show("sinc(0.75)", mp.sin(mp.mpf("0.75")) / mp.mpf("0.75"))
