"""Regenerate phi_fixture.tsv: Phi(x) by 50-digit quadrature of the Gaussian density.

    python tests/data/make_phi_fixture.py
"""

from pathlib import Path

import mpmath as mp

mp.mp.dps = 50


def phi(x):
    density = lambda t: mp.exp(-t * t / 2) / mp.sqrt(2 * mp.pi)
    if x <= 0:
        return mp.quad(density, [-mp.inf, x])
    return mp.mpf(1) - mp.quad(density, [x, mp.inf])


def main():
    # abscissae are rounded to 16 digits first so the file's x is the exact point evaluated
    xs = [mp.nstr(mp.mpf(-9) + mp.mpf(18) * i / 199, 16, strip_zeros=False) for i in range(200)]
    lines = [f"{x}\t{mp.nstr(phi(mp.mpf(x)), 16, strip_zeros=False)}" for x in xs]
    Path(__file__).with_name("phi_fixture.tsv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
