"""High-precision reference values frozen into the unit tests.

Run: python3 tests/oracles/reference_values.py
Every integral is computed independently of the C++ code with mpmath at 30 digits.
"""
import mpmath as mp

mp.mp.dps = 30


def area(d):
    return 2 * mp.pi ** (mp.mpf(d) / 2) / mp.gamma(mp.mpf(d) / 2)


def power_exp(p, m, amp=1):
    p = mp.mpf(p)
    return lambda r: amp * r**p * mp.e ** (-(r**m))


def coth_density(g, d, beta, r):
    return area(d) * r ** (d - 1) * g(r) ** 2 / mp.tanh(beta * r / 2)


def line_density(g, d, beta, u):
    r = abs(u)
    return area(d) * r ** (d - 1) * g(r) ** 2 / abs(-mp.expm1(-beta * u))


def g_omega_inverse(g, d):
    return area(d) * mp.quad(lambda r: r ** (d - 2) * g(r) ** 2, [0, 1, 5, mp.inf])


def pv_half_line(h, pole):
    """PV int_0^inf h(u) / (u - pole) du for pole > 0."""
    w = pole
    inner = mp.quad(lambda s: (h(pole + s) - h(pole - s)) / s, [0, w])
    outer = mp.quad(lambda u: h(u) / (u - pole), [2 * pole, 2 * pole + 5, mp.inf])
    return inner + outer


def pv_coth(g, d, beta, delta):
    D = abs(delta)
    h = lambda u: coth_density(g, d, beta, u) * 2 * delta / (u + D)
    return pv_half_line(h, D)


def sokhotski_pv(g, d, beta, theta):
    """PV int_R dSigma(u) / (u + theta) du, folded onto u > 0."""
    u0 = -theta
    pos = lambda u: line_density(g, d, beta, u)
    neg = lambda u: line_density(g, d, beta, -u)
    if u0 > 0:
        # pole on the positive half-line; negative half-line is regular
        reg = mp.quad(lambda u: neg(u) / (-u - u0), [0, 1, 5, mp.inf])
        return pv_half_line(pos, u0) + reg
    reg = mp.quad(lambda u: pos(u) / (u - u0), [0, 1, 5, mp.inf])
    # int_0^inf neg(u) / (-u - u0) du = -PV int_0^inf neg(u) / (u - |u0|) du
    return reg - pv_half_line(neg, -u0)


def gamma_t(g, d, beta, t):
    f = lambda r: coth_density(g, d, beta, r) * mp.sin(r * t / 2) ** 2 / r**2
    pts = [mp.mpf(0)] + [k * mp.pi / t for k in range(1, int(12 * t / mp.pi) + 2)] + [mp.inf]
    return mp.quad(f, pts)


def s_t(g, d, t):
    f = lambda r: area(d) * r ** (d - 3) * g(r) ** 2 * (r * t - mp.sin(r * t)) / 2
    pts = [mp.mpf(0)] + [k * mp.pi / t for k in range(1, int(12 * t / mp.pi) + 2)] + [mp.inf]
    return mp.quad(f, pts)


def b1(w, D, beta):
    mu = 1 / mp.expm1(beta * w)
    ew, emw = mp.e ** (beta * w / 2), mp.e ** (-beta * w / 2)
    ed, emd = mp.e ** (beta * D / 2), mp.e ** (-beta * D / 2)
    return (mu / (w * (w + D)) * (ew * (ew - 1) - emd * (emd - 1) + ed - 1)
            + (1 + mu) / (w * (w - D)) * (emw - emd) * (emd + emw - 1)
            - (emd - 1) / (w * D) * (emd - mu - 1)
            + mu / (D * (w + D)) * (emd - 1))


def b2(w, D, beta):
    mu = 1 / mp.expm1(beta * w)
    emw = mp.e ** (-beta * w / 2)
    ed = mp.e ** (beta * D / 2)
    return ((1 + mu) / (w * (w + D)) * ((emw - ed) ** 2 + ed - 1)
            + mu / (w * (w - D)) * (mp.e ** (beta * w) - ed * (ed - 1) - 1)
            + ed * (ed - 1) / (w * D)
            + (1 + mu) / (D * (w + D)) * (ed - 1)
            - mu / (D * (w - D)) * (ed - 1))


def b_integral(g, d, D, beta, b):
    mp.mp.dps = 40  # the literal forms cancel near w = D
    v = area(d) * mp.quad(lambda r: r ** (d - 1) * g(r) ** 2 * b(r, D, beta), [0, D / 2, D, 2 * D, D + 5, mp.inf])
    mp.mp.dps = 30
    return v


def show(name, v):
    print(f"{name} = {mp.nstr(v, 20)}")


if __name__ == "__main__":
    g3 = power_exp(0.5, 1)
    g1 = power_exp(0.5, 2)
    show("K d=3 p=1/2 m=1", g_omega_inverse(g3, 3))
    show("K d=1 p=1/2 m=2", g_omega_inverse(g1, 1))
    show("K d=3 p=-1/2 m=1", g_omega_inverse(power_exp(-0.5, 1), 3))
    show("xi d=3 p=1/2 m=1 beta=1 eta=1", coth_density(g3, 3, 1, 1))
    show("pv_coth d=3 p=1/2 m=1 beta=1 Delta=1", pv_coth(g3, 3, 1, 1))
    show("pv_coth d=3 p=1/2 m=1 beta=2 Delta=-0.7", pv_coth(g3, 3, 2, mp.mpf("-0.7")))
    show("pv_coth d=1 p=1/2 m=2 beta=0.5 Delta=1.3", pv_coth(g1, 1, mp.mpf("0.5"), mp.mpf("1.3")))
    show("sokhotski pv d=3 p=1/2 m=1 beta=1 theta=0.8", sokhotski_pv(g3, 3, 1, mp.mpf("0.8")))
    show("sokhotski pv d=3 p=1/2 m=1 beta=1 theta=-1.5", sokhotski_pv(g3, 3, 1, mp.mpf("-1.5")))
    show("sokhotski pv d=1 p=1/2 m=2 beta=2 theta=0.4", sokhotski_pv(g1, 1, 2, mp.mpf("0.4")))
    show("gamma d=3 p=1/2 m=1 beta=1 t=5", gamma_t(g3, 3, 1, 5))
    show("gamma d=1 p=1/2 m=2 beta=1 t=20", gamma_t(g1, 1, 1, 20))
    show("S d=3 p=1/2 m=1 t=5", s_t(g3, 3, 5))
    show("S d=1 p=1/2 m=2 t=20", s_t(g1, 1, 20))
    show("<g,B1 g> d=3 p=1/2 m=1 Delta=1 beta=1", b_integral(g3, 3, 1, 1, b1))
    show("<g,B2 g> d=3 p=1/2 m=1 Delta=1 beta=1", b_integral(g3, 3, 1, 1, b2))
    show("<g,B1 g> d=3 p=1/2 m=2 Delta=0.6 beta=2", b_integral(power_exp(0.5, 2), 3, mp.mpf("0.6"), 2, b1))
    show("<g,B2 g> d=3 p=1/2 m=2 Delta=0.6 beta=2", b_integral(power_exp(0.5, 2), 3, mp.mpf("0.6"), 2, b2))
