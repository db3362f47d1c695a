"""Write arbitrary-precision reference values used by the test suite.

Run from the repository root:  python3 tools/make_oracle_fixtures.py
Requires mpmath.  Values are written with 30 significant digits.
"""

from pathlib import Path

import mpmath as mp

mp.mp.dps = 40
OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

HEIGHTS = [8, 10, 12.5, 17.8456, 30, 50, 99.5, 150, 199.9, 200, 200.1, 314.159,
           1000, 2718.28, 5000, 12345.678, 30000, 54321.5, 77777.7, 100000]
GRAM_INDICES = [0, 1, 2, 3, 10, 100, 1000, 5000, 10000, 50000, 100000]
ZERO_SAMPLES = [500, 1000, 2500, 5000, 7500, 10000, 20000, 50000, 75000, 100000]


def fmt(x):
    return mp.nstr(x, 30, min_fixed=-5, max_fixed=30)


def write(name, header, rows):
    lines = [f"# {header}"] + [f"{k}\t{fmt(v)}" for k, v in rows]
    (OUT / name).write_text("\n".join(lines) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write("theta.tsv", "t\ttheta(t)", [(h, mp.siegeltheta(h)) for h in HEIGHTS])
    write("theta_prime.tsv", "t\ttheta'(t)",
          [(h, mp.diff(mp.siegeltheta, h)) for h in HEIGHTS])
    write("z.tsv", "t\tZ(t)", [(h, mp.siegelz(h)) for h in HEIGHTS if h >= 10])
    # t_n solves theta = pi (n - 1), i.e. the classical Gram point g_{n-1}
    write("gram.tsv", "n\tt_n", [(n, mp.grampoint(n - 1)) for n in GRAM_INDICES])
    zeros = [(n, mp.zetazero(n).imag) for n in list(range(1, 101)) + ZERO_SAMPLES]
    write("zeros.tsv", "n\tgamma_n", zeros)
    g1 = zeros[0][1]
    write("s_at_first_zero.tsv", "gamma_1\tS(gamma_1 + 0) = 1 - theta(gamma_1)/pi - 1",
          [(fmt(g1), -mp.siegeltheta(g1) / mp.pi)])


if __name__ == "__main__":
    main()
