#!/usr/bin/env python3
"""Characteristic-function modulus at scale-resonant frequencies.

For the middle-thirds spec the frequencies t = base**m * pi line up with the
scale sequence, so |f(t)| settles at a positive constant instead of decaying:
the classical fingerprint of a singular law whose transform does not vanish
at infinity.  Off-resonance frequencies are scanned for contrast.  Output is
plot-ready CSV on stdout.
"""

import argparse
import math
import sys

from bernconv.evaluate import char_fn
from bernconv.presets import cantor_spec, two_term_spec, uniform_spec

SPECS = {
    "cantor": cantor_spec,
    "uniform": uniform_spec,
    "two-term": lambda: two_term_spec(0.5),
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--spec", choices=sorted(SPECS), default="cantor")
    parser.add_argument("--base", type=float, default=3.0,
                        help="resonance base: frequencies base**m * pi")
    parser.add_argument("--max-power", type=int, default=10)
    parser.add_argument("--tol", type=float, default=1e-9)
    args = parser.parse_args()

    spec = SPECS[args.spec]()
    print("m,t,modulus,offres_t,offres_modulus")
    for m in range(1, args.max_power + 1):
        t = args.base ** m * math.pi
        v = char_fn(spec, t, tol=args.tol)
        t_off = (args.base ** m + 0.5) * math.pi
        v_off = char_fn(spec, t_off, tol=args.tol)
        print(f"{m},{t!r},{abs(v.value)!r},{t_off!r},{abs(v_off.value)!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
