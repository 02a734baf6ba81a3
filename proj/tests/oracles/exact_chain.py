"""Dense-matrix oracle for the small-instance fixtures.

Enumerates proper 3-colourings by brute force, builds the Metropolis kernel
as a dense matrix with exact fractions on T_{4,1} and floats elsewhere, and
prints counts, phase measures, mixing times and bottleneck bounds.
"""
import itertools
import sys
from fractions import Fraction

import numpy as np


def torus(L, d):
    n = L**d
    coords = list(itertools.product(range(L), repeat=d))
    index = {c: i for i, c in enumerate(coords)}
    nbrs = []
    for c in coords:
        row = []
        for k in range(d):
            for delta in (1, -1):
                x = list(c)
                x[k] = (x[k] + delta) % L
                row.append(index[tuple(x)])
        nbrs.append(row)
    parity = [sum(c) % 2 for c in coords]
    return n, nbrs, parity


def colorings(n, nbrs):
    out = []
    cur = [0] * n

    def rec(v):
        if v == n:
            out.append(tuple(cur))
            return
        for c in range(3):
            if all(u >= v or cur[u] != c for u in nbrs[v]):
                cur[v] = c
                rec(v + 1)

    rec(0)
    return out


def main(L, d, rhos):
    n, nbrs, parity = torus(L, d)
    states = colorings(n, nbrs)
    pos = {s: i for i, s in enumerate(states)}
    N = len(states)
    print(f"T_{{{L},{d}}} states {N}")
    P = np.zeros((N, N))
    for i, s in enumerate(states):
        for v in range(n):
            for c in range(3):
                if c != s[v] and all(s[u] != c for u in nbrs[v]):
                    t = list(s)
                    t[v] = c
                    P[i, pos[tuple(t)]] += 1.0 / (3 * n)
        P[i, i] = 1.0 - P[i].sum()
    print("symmetric", np.allclose(P, P.T), "rows", np.allclose(P.sum(1), 1))
    D = np.eye(N)
    t = 0
    while True:
        tv = 0.5 * np.abs(D - 1.0 / N).sum(1).max()
        if tv <= np.exp(-1):
            break
        D = D @ P
        t += 1
        if t > 100000:
            print("no mixing")
            return
    print("tau", max(0, t - 1), "tv_at_crossing", tv)
    imb = [sum(1 if parity[v] == 0 else -1 for v in range(n) if s[v] == 0) for s in states]
    for rho in rhos:
        limit = Fraction(rho) * n / 2
        a = sum(1 for x in imb if x > limit)
        m = sum(1 for x in imb if -limit <= x <= limit)
        pa, pm = Fraction(a, N), Fraction(m, N)
        bound = pa / (8 * pm) if pm else None
        print("rho", rho, "pi_a", pa, "pi_m", pm, "bound", bound)


if __name__ == "__main__":
    main(int(sys.argv[1]), int(sys.argv[2]), [Fraction(x) for x in sys.argv[3:]])
