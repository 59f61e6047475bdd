#!/usr/bin/env python3
"""Independent reference computations for the frozen expected values in the
C++ test suites. Plain textbook sums, no shared code with the library."""
import math
from scipy import stats

Z95 = stats.norm.ppf(0.975)

WU = (243, 268, 118, 135)
MIYAWAKI = (53, 63, 51, 61)


def cells(t):
    e1, n1, e2, n2 = t
    return e1, n1 - e1, e2, n2 - e2


def log_or(t):
    a, b, c, d = cells(t)
    return math.log(a * d / (b * c)), math.sqrt(1 / a + 1 / b + 1 / c + 1 / d)


def rr(t):
    e1, n1, e2, n2 = t
    return (e1 / n1) / (e2 / n2), math.sqrt(1 / e1 - 1 / n1 + 1 / e2 - 1 / n2)


def rd(t):
    e1, n1, e2, n2 = t
    p1, p2 = e1 / n1, e2 / n2
    return p1 - p2, math.sqrt(p1 * (1 - p1) / n1 + p2 * (1 - p2) / n2)


def peto(t):
    a, b, c, d = cells(t)
    n1, n2 = a + b, c + d
    n = n1 + n2
    m1, m2 = a + c, b + d
    oe = a - n1 * m1 / n
    v = n1 * n2 * m1 * m2 / (n * n * (n - 1))
    return oe, v, math.exp(oe / v)


def mh_or(tables):
    r = s = 0.0
    for t in tables:
        a, b, c, d = cells(t)
        n = a + b + c + d
        r += a * d / n
        s += b * c / n
    return r / s, r, s


def iv(pairs):
    w = [1 / se ** 2 for _, se in pairs]
    sw = sum(w)
    theta = sum(wi * y for wi, (y, _) in zip(w, pairs)) / sw
    q = sum(wi * (y - theta) ** 2 for wi, (y, _) in zip(w, pairs))
    return theta, 1 / math.sqrt(sw), q


def l0_trimfill(ys, ses, use_ceil):
    """Right-side L0 trim-and-fill, returns k0 and history."""
    k = len(ys)
    order = sorted(range(k), key=lambda i: ys[i])
    k0 = 0
    hist = []
    for _ in range(50):
        keep = order[: k - k0]
        w = [1 / ses[i] ** 2 for i in keep]
        center = sum(wi * ys[i] for wi, i in zip(w, keep)) / sum(w)
        dev = [y - center for y in ys]
        ranks = stats.rankdata([abs(x) for x in dev])
        tn = sum(r for r, x in zip(ranks, dev) if x > 0)
        l0 = (4 * tn - k * (k + 1)) / (2 * k - 1)
        new = max(0, math.ceil(l0) if use_ceil else round(l0))
        new = min(new, (k - 1) // 2)
        hist.append((center, tn, l0, new))
        if new == k0:
            return k0, center, hist
        k0 = new
    raise RuntimeError("no convergence")


if __name__ == "__main__":
    print("z975", repr(Z95))
    for name, t in (("wu", WU), ("miyawaki", MIYAWAKI)):
        y, se = log_or(t)
        print(name, "OR", math.exp(y), "lnOR", y, "se", se)
        print(name, "RR", rr(t), "RD", rd(t), "peto", peto(t))
    print("MH OR two", mh_or([WU, MIYAWAKI]))
    th, se, q = iv([log_or(WU), log_or(MIYAWAKI)])
    print("IV OR two", math.exp(th), "se", se, "Q", q, "p", stats.chi2.sf(q, 1))
    se_published = (math.log(2.73) - math.log(1.61)) / (2 * 1.96)
    print("z from the published CI", math.log(2.09) / se_published)
    print("chi2 sf 9.53 df10", stats.chi2.sf(9.53, 10))
    print("RR (0,10,5,10) corrected", (0.5 / 11) / (5.5 / 11))
    print("peto a=0,b=10,c=2,d=8", peto((0, 10, 2, 10)))
