#!/usr/bin/env python3
"""Regenerate the committed golden-value fixtures for the Airy module.

Values are computed with mpmath at 40 significant digits and written with
17-digit reprs (full double precision).  Run from the repository root:

    python tools/make_airy_fixture.py
"""

import pathlib

import mpmath as mp

mp.mp.dps = 40

FIXDIR = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"

PLAIN_POINTS = [
    -30.0, -25.3, -20.0, -15.75, -12.25, -10.0, -8.0, -6.5, -6.0, -5.0,
    -4.0, -3.0, -2.338107410459767, -1.5, -1.0, -0.5, -0.25, 0.0, 0.25,
    0.5, 1.0, 1.5, 2.0, 3.0, 4.5, 6.0, 7.5, 9.0, 10.0, 11.0, 12.0, 15.0,
    20.0, 25.0, 30.0,
]

SCALED_POINTS = [0.0, 1.0, 5.0, 12.0, 20.0, 50.0, 100.0, 200.0, 1000.0]


def main() -> None:
    FIXDIR.mkdir(parents=True, exist_ok=True)
    with open(FIXDIR / "airy_golden.csv", "w") as fh:
        fh.write("t,ai,ai_prime,bi,bi_prime\n")
        for t in PLAIN_POINTS:
            x = mp.mpf(t)
            row = [mp.airyai(x), mp.airyai(x, 1), mp.airybi(x), mp.airybi(x, 1)]
            fh.write(repr(float(t)) + "," + ",".join(repr(float(v)) for v in row) + "\n")

    with open(FIXDIR / "airy_scaled_golden.csv", "w") as fh:
        fh.write("t,ai_scaled,ai_prime_scaled,bi_scaled,bi_prime_scaled,exponent\n")
        for t in SCALED_POINTS:
            x = mp.mpf(t)
            z = mp.mpf(2) / 3 * x ** mp.mpf(1.5)
            row = [
                mp.airyai(x) * mp.e**z,
                mp.airyai(x, 1) * mp.e**z,
                mp.airybi(x) * mp.e**-z,
                mp.airybi(x, 1) * mp.e**-z,
                z,
            ]
            fh.write(repr(float(t)) + "," + ",".join(repr(float(v)) for v in row) + "\n")
    print(f"wrote fixtures under {FIXDIR}")


if __name__ == "__main__":
    main()
