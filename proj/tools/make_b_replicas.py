#!/usr/bin/env python3
"""Generate seeded stand-ins for the SteinLib B class and solve them to optimality.

Each replica has the node, edge and terminal counts of the B instance it is
named after, a random connected graph and integer weights in [1, 10]. The
optimum is computed with a directed multicommodity-flow MILP (HiGHS via
scipy) and written to bestknown.csv next to the .stp files.

    python3 tools/make_b_replicas.py data/b-replica
"""

import argparse
import pathlib
import random
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

# (nodes, edges, terminals) for b01..b18
SHAPES = [
    (50, 63, 9), (50, 63, 13), (50, 63, 25),
    (50, 100, 9), (50, 100, 13), (50, 100, 25),
    (75, 94, 13), (75, 94, 19), (75, 94, 38),
    (75, 150, 13), (75, 150, 19), (75, 150, 38),
    (100, 125, 17), (100, 125, 25), (100, 125, 50),
    (100, 200, 17), (100, 200, 25), (100, 200, 50),
]


def random_graph(rng, n, m):
    order = list(range(n))
    rng.shuffle(order)
    used = set()
    edges = []
    for i in range(1, n):
        a, b = order[i], order[rng.randrange(i)]
        key = (min(a, b), max(a, b))
        used.add(key)
        edges.append((key[0], key[1], rng.randint(1, 10)))
    while len(edges) < m:
        a, b = rng.sample(range(n), 2)
        key = (min(a, b), max(a, b))
        if key in used:
            continue
        used.add(key)
        edges.append((key[0], key[1], rng.randint(1, 10)))
    edges.sort()
    return edges


def steiner_optimum(n, edges, terminals):
    """Minimum Steiner tree cost from the directed flow formulation: arborescence
    arcs y rooted at the first terminal, one unit flow per other terminal."""
    root, sinks = terminals[0], terminals[1:]
    arcs, weights = [], []
    for u, v, w in edges:
        arcs += [(u, v), (v, u)]
        weights += [w, w]
    a, k = len(arcs), len(sinks)
    nvar = a + k * a  # y_arc then f^t_arc
    cost = np.zeros(nvar)
    cost[:a] = weights
    into = [[] for _ in range(n)]
    out_of = [[] for _ in range(n)]
    for ai, (u, v) in enumerate(arcs):
        out_of[u].append(ai)
        into[v].append(ai)

    rows, cols, vals, lo, hi = [], [], [], [], []

    def row(entries, low, high):
        r = len(lo)
        for c, val in entries:
            rows.append(r)
            cols.append(c)
            vals.append(val)
        lo.append(low)
        hi.append(high)

    is_terminal = set(terminals)
    for v in range(n):
        # in-degree: 0 at the root, 1 at other terminals, at most 1 elsewhere
        entries = [(ai, 1.0) for ai in into[v]]
        if v == root:
            row(entries, 0.0, 0.0)
        elif v in is_terminal:
            row(entries, 1.0, 1.0)
        else:
            row(entries, 0.0, 1.0)
    for j, t in enumerate(sinks):
        base = a + j * a
        for v in range(n):
            rhs = 1.0 if v == t else (-1.0 if v == root else 0.0)
            entries = [(base + ai, 1.0) for ai in into[v]] + [(base + ai, -1.0) for ai in out_of[v]]
            row(entries, rhs, rhs)
        for ai in range(a):
            row([(base + ai, 1.0), (ai, -1.0)], -np.inf, 0.0)
    A = coo_matrix((vals, (rows, cols)), shape=(len(lo), nvar)).tocsr()
    integrality = np.zeros(nvar)
    integrality[:a] = 1
    res = milp(cost, constraints=LinearConstraint(A, lo, hi), integrality=integrality,
               bounds=Bounds(0, 1), options={"disp": False})
    if res.status != 0:
        raise RuntimeError(f"MILP failed: {res.message}")
    return int(round(res.fun))


def write_stp(path, name, n, edges, terminals):
    with open(path, "w") as f:
        f.write("33D32945 STP File, STP Format Version 1.0\n\n")
        f.write(f'SECTION Comment\nName "{name}"\nRemark "seeded replica with SteinLib {name[:3]} dimensions"\nEND\n\n')
        f.write(f"SECTION Graph\nNodes {n}\nEdges {len(edges)}\n")
        for u, v, w in edges:
            f.write(f"E {u + 1} {v + 1} {w}\n")
        f.write("END\n\n")
        f.write(f"SECTION Terminals\nTerminals {len(terminals)}\n")
        for t in terminals:
            f.write(f"T {t + 1}\n")
        f.write("END\n\nEOF\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir")
    ap.add_argument("--seed", type=int, default=20240501)
    args = ap.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = ["name,class,cost"]
    for i, (n, m, t) in enumerate(SHAPES, start=1):
        name = f"b{i:02d}r"
        rng = random.Random(args.seed * 100 + i)
        edges = random_graph(rng, n, m)
        terminals = sorted(rng.sample(range(n), t))
        opt = steiner_optimum(n, edges, terminals)
        write_stp(out / f"{name}.stp", name, n, edges, terminals)
        rows.append(f"{name},Ls,{opt}")
        print(f"{name}: |V|={n} |E|={m} |T|={t} opt={opt}", file=sys.stderr)
    (out / "bestknown.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
