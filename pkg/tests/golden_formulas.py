"""Hand-transcribed closed-form secular expressions for specific geometries.

Each function returns |expression| / (sum of term magnitudes), a scale-free
residual that vanishes at the true eigenvalues.  These were derived
independently of the matching solver and serve as cross-checks only.
"""

import cmath

import numpy as np


def n1_step(energy, p, q, h1, h0=0.0):
    """Single step: gamma tan(beta P) = beta tan(gamma (P - Q)), cleared of poles."""
    b = cmath.sqrt(complex(energy - h0))
    g = cmath.sqrt(complex(energy - h1))
    t1 = g * cmath.sin(b * p) * cmath.cos(g * (p - q))
    t2 = b * cmath.sin(g * (p - q)) * cmath.cos(b * p)
    return abs(t1 - t2) / max(abs(t1) + abs(t2), 1e-300)


def n2_double_well(energy, p, q, r, h1, h2):
    """Two discontinuities: the closed-form double-well secular combination."""
    b = cmath.sqrt(complex(energy))
    a = cmath.sqrt(complex(h1 - energy))
    g = cmath.sqrt(complex(energy - h2))
    bb = b * p
    cc = g * (q - r)
    aa = cmath.atan(a / b)
    dd = cmath.atan(a / g)
    t1 = cmath.exp(a * (q - p)) * cmath.cos(bb - aa) * cmath.cos(cc + dd)
    t2 = cmath.exp(-a * (q - p)) * cmath.cos(bb + aa) * cmath.cos(cc - dd)
    return abs(t1 - t2) / max(abs(t1) + abs(t2), 1e-300)


def n4_double_tunneling(energy, p, q, r, s, t, h):
    """Two equal barriers (heights 0, h, 0, h, 0); valid for 0 < E < h.

    Derived by composing the single-barrier phase map twice: a well phase
    theta entering a barrier of width b comes out with components
    proportional to cos(theta -/+ alpha) e^{+-delta b}, and the Dirichlet
    condition at the last wall closes the chain.  The two-discontinuity
    member of this family reduces exactly to n2_double_well.  Grouping the
    four exponential weights e^{+-(q-p) delta} e^{+-(s-r) delta} gives

        e1 e2 G(a) + (e1/e2) F(a) + (e2/e1) F(-a) + G(-a)/(e1 e2) = 0.
    """
    kap = np.sqrt(energy)
    de = np.sqrt(h - energy)
    al = np.arctan2(de, kap)

    def f_term(a):
        return (
            np.sin((r - q) * kap)
            * np.cos((t - s) * kap + a)
            * np.cos(p * kap - a)
        )

    def g_term(a):
        return (
            np.sin(2 * a - (r - q) * kap)
            * np.cos((t - s) * kap - a)
            * np.cos(p * kap - a)
        )

    e1 = np.exp((q - p) * de)
    e2 = np.exp((s - r) * de)
    terms = [
        e1 * e2 * g_term(al),
        (e1 / e2) * f_term(al),
        (e2 / e1) * f_term(-al),
        g_term(-al) / (e1 * e2),
    ]
    return abs(sum(terms)) / max(sum(abs(x) for x in terms), 1e-300)


def n6_triple_barrier(energy, p, q, r, s, t, u, w, h):
    """Three equal barriers (0,h,0,h,0,h,0 pattern); valid for 0 < E < h."""
    kap = np.sqrt(energy)
    de = np.sqrt(h - energy)
    al = np.arctan2(de, kap)

    def f1(a):
        return (
            np.cos(p * kap + a)
            * np.sin((r - q) * kap + 2 * a)
            * np.sin((t - s) * kap + 2 * a)
            * np.cos((w - u) * kap + a)
        )

    def f2(a):
        return (
            np.cos(p * kap + a)
            * np.sin((r - q) * kap + 2 * a)
            * np.sin((t - s) * kap)
            * np.cos((w - u) * kap - a)
        )

    def f3(a):
        return (
            np.cos(p * kap + a)
            * np.sin((r - q) * kap)
            * np.sin((t - s) * kap)
            * np.cos((w - u) * kap + a)
        )

    def f4(a):
        return (
            np.cos(p * kap + a)
            * np.sin((r - q) * kap)
            * np.sin((t - s) * kap - 2 * a)
            * np.cos((w - u) * kap - a)
        )

    pre = np.exp(-(p + q + r + s + t + u) * de)
    terms = [
        -f1(al) * np.exp(2 * (p + r + t) * de),
        +f2(al) * np.exp(2 * (p + r + u) * de),
        +f3(al) * np.exp(2 * (p + s + t) * de),
        -f4(al) * np.exp(2 * (p + s + u) * de),
        +f1(-al) * np.exp(2 * (q + s + u) * de),
        -f2(-al) * np.exp(2 * (q + s + t) * de),
        -f3(-al) * np.exp(2 * (q + r + u) * de),
        +f4(-al) * np.exp(2 * (q + r + t) * de),
    ]
    val = abs(sum(terms)) * pre
    scale = sum(abs(x) for x in terms) * pre
    return val / max(scale, 1e-300)
