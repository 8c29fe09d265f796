#!/usr/bin/env python3
"""Regenerate the bundled b-file fixtures in data/oeis.

The four sequences are computed from their prime-power definitions with
sympy's factorint, independently of the C++ evaluators, and written in b-file
format ("n a(n)" per line, '#' comments). SHA256SUMS pins the bytes.

Usage: tools/gen_oeis_fixtures.py [--terms N] [--out DIR]
"""

import argparse
import hashlib
import pathlib

from sympy import divisors, factorint


def tau_e(n):  # A049419: prod tau(a)
    r = 1
    for a in factorint(n).values():
        r *= len(divisors(a))
    return r


def sigma_e(n):  # A051377: prod sum_{d | a} p^d
    r = 1
    for p, a in factorint(n).items():
        r *= sum(p**d for d in divisors(a))
    return r


def tau_inf(n):  # A037445: prod 2^(binary weight of a)
    r = 1
    for a in factorint(n).values():
        r *= 2 ** bin(a).count("1")
    return r


def sigma_inf(n):  # A049417: prod over set bits 2^j of a of (1 + p^(2^j))
    r = 1
    for p, a in factorint(n).items():
        j = 0
        while a >> j:
            if (a >> j) & 1:
                r *= 1 + p ** (1 << j)
            j += 1
    return r


SEQUENCES = {
    "A049419": ("tau^(e)(n), number of exponential divisors", tau_e),
    "A051377": ("sigma^(e)(n), sum of exponential divisors", sigma_e),
    "A037445": ("tau^inf(n), number of infinitary divisors", tau_inf),
    "A049417": ("sigma^inf(n), sum of infinitary divisors", sigma_inf),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--terms", type=int, default=10000)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "oeis"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sums = []
    for seq_id, (title, fn) in sorted(SEQUENCES.items()):
        lines = [
            f"# {seq_id}: {title}",
            f"# Terms n = 1..{args.terms}, generated by tools/gen_oeis_fixtures.py (sympy factorint).",
        ]
        lines += [f"{n} {fn(n)}" for n in range(1, args.terms + 1)]
        data = ("\n".join(lines) + "\n").encode()
        name = f"b{seq_id[1:]}.txt"
        (out / name).write_bytes(data)
        sums.append(f"{hashlib.sha256(data).hexdigest()}  {name}")
    (out / "SHA256SUMS").write_text("\n".join(sums) + "\n")


if __name__ == "__main__":
    main()
