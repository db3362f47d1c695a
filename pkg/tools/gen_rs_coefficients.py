"""Generate polynomial coefficients for the Riemann-Siegel corrections C0..C4.

Each C_j(p) is expanded in powers of u = p - 1/2 from the Taylor series of
Psi(p) = cos(2*pi*(p^2 - p - 1/16)) / cos(2*pi*p), computed with mpmath at
high precision.  Output is a Python module written to stdout.

    python tools/gen_rs_coefficients.py > src/gramlaw/_rs_coefficients.py
"""

import mpmath as mp

mp.mp.dps = 80
DEG = 110
KEEP_BELOW = mp.mpf("1e-22")


def series_cos(a, deg, power):
    # cos(a * u**power) as a power series in u
    out = [mp.mpf(0)] * (deg + 1)
    k = 0
    while power * 2 * k <= deg:
        out[power * 2 * k] = (-1) ** k * a ** (2 * k) / mp.factorial(2 * k)
        k += 1
    return out


def series_sin(a, deg, power):
    out = [mp.mpf(0)] * (deg + 1)
    k = 0
    while power * (2 * k + 1) <= deg:
        out[power * (2 * k + 1)] = (-1) ** k * a ** (2 * k + 1) / mp.factorial(2 * k + 1)
        k += 1
    return out


def divide(num, den):
    q = [mp.mpf(0)] * len(num)
    for i in range(len(num)):
        s = num[i] - sum(q[j] * den[i - j] for j in range(i))
        q[i] = s / den[0]
    return q


def derivative(c, order):
    out = list(c)
    for _ in range(order):
        out = [k * out[k] for k in range(1, len(out))]
    return out


def main():
    pi = mp.pi
    # Psi(1/2 + u) = -cos(2 pi u^2 - 5 pi / 8) / cos(2 pi u)
    c2, s2 = series_cos(2 * pi, DEG, 2), series_sin(2 * pi, DEG, 2)
    b = 5 * pi / 8
    num = [-(x * mp.cos(b) + y * mp.sin(b)) for x, y in zip(c2, s2)]
    psi = divide(num, series_cos(2 * pi, DEG, 1))

    def d(k):
        return derivative(psi, k)

    def combo(*terms):
        length = max(len(t) for _, t in terms)
        out = [mp.mpf(0)] * length
        for w, t in terms:
            for i, v in enumerate(t):
                out[i] += w * v
        return out

    cs = [
        combo((1, d(0))),
        combo((-1 / (96 * pi**2), d(3))),
        combo((1 / (64 * pi**2), d(2)), (1 / (18432 * pi**4), d(6))),
        combo(
            (-1 / (64 * pi**2), d(1)),
            (-1 / (3840 * pi**4), d(5)),
            (-1 / (5308416 * pi**6), d(9)),
        ),
        combo(
            (1 / (128 * pi**2), d(0)),
            (mp.mpf(19) / (24576 * pi**4), d(4)),
            (mp.mpf(11) / (5898240 * pi**6), d(8)),
            (1 / (2038431744 * pi**8), d(12)),
        ),
    ]
    half = mp.mpf(1) / 2
    print('"""Taylor coefficients of the Riemann-Siegel corrections in u = p - 1/2.')
    print()
    print("Generated by tools/gen_rs_coefficients.py; do not edit by hand.")
    print('"""')
    print()
    print("RS_CORRECTIONS = (")
    for c in cs:
        last = max(i for i, v in enumerate(c) if abs(v) * half**i > KEEP_BELOW)
        print("    (")
        for v in c[: last + 1]:
            print(f"        {mp.nstr(v, 20, min_fixed=-1, max_fixed=-1)},")
        print("    ),")
    print(")")


if __name__ == "__main__":
    main()
