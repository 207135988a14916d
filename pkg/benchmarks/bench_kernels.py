"""Compare the compiled kernels with the numpy fallback.

Run with ``python benchmarks/bench_kernels.py [--edges N] [--repeat R]``.
Each kernel is timed on random Euclidean and hyperboloid edge batches with
both backends; the best of ``R`` runs is reported together with the
largest absolute difference between the two outputs.
"""
from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from simpharm._kernels import EUCLID, HYPERBOLOID, backends


def _hyperboloid_points(rng, n, scale=1.0):
    y = scale * rng.standard_normal((n, 2))
    x0 = np.sqrt(1.0 + np.einsum("ij,ij->i", y, y))
    return np.column_stack([x0, y])


def _tangent(P, rng, scale=1e-3):
    # project a random vector onto the tangent space <p, v> = 0
    V = scale * rng.standard_normal(P.shape)
    mdot = -P[:, 0] * V[:, 0] + np.einsum("ij,ij->i", P[:, 1:], V[:, 1:])
    return V + mdot[:, None] * P


def make_batch(kind, n, seed=0):
    rng = np.random.default_rng(seed)
    if kind == EUCLID:
        P, Q = rng.standard_normal((n, 2)), rng.standard_normal((n, 2))
        dP, dQ = 1e-3 * rng.standard_normal((n, 2)), 1e-3 * rng.standard_normal((n, 2))
    else:
        P, Q = _hyperboloid_points(rng, n), _hyperboloid_points(rng, n)
        dP, dQ = _tangent(P, rng), _tangent(Q, rng)
    w = rng.uniform(0.1, 2.0, n)
    idx = rng.integers(0, max(1, n // 6), n)
    vals = rng.standard_normal((n, P.shape[1]))
    return P, Q, dP, dQ, w, idx, vals


def _calls(mod, kind, batch):
    P, Q, dP, dQ, w, idx, vals = batch
    out_rows = int(idx.max()) + 1

    def scatter():
        out = np.zeros((out_rows, vals.shape[1]))
        mod.scatter_add(out, idx, vals)
        return out

    return {
        "edge_lengths": lambda: mod.edge_lengths(kind, P, Q),
        "energy_grad": lambda: mod.energy_grad(kind, P, Q, w),
        "energy_delta": lambda: mod.energy_delta(kind, P, Q, dP, dQ, w),
        "scatter_add": scatter,
    }


def _max_diff(a, b) -> float:
    if isinstance(a, tuple):
        return max(_max_diff(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a, float) - np.asarray(b, float))))


def run(n_edges: int = 100_000, repeat: int = 5) -> list[dict]:
    mods = backends()
    rows = []
    for kind, kname in ((EUCLID, "euclid"), (HYPERBOLOID, "hyperboloid")):
        batch = make_batch(kind, n_edges)
        calls = {name: _calls(mod, kind, batch) for name, mod in mods.items()}
        for kernel in calls["numpy"]:
            row = {"kernel": kernel, "geometry": kname}
            for name in mods:
                fn = calls[name][kernel]
                row[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
            if "cython" in mods:
                row["max_abs_diff"] = _max_diff(calls["numpy"][kernel](), calls["cython"][kernel]())
            rows.append(row)
    return rows


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--edges", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rows = run(args.edges, args.repeat)
    have_cython = "cython" in backends()
    if not have_cython:
        print("compiled backend not built; run `python3 setup.py build_ext --inplace`", file=sys.stderr)
    header = f"{'kernel':<14}{'geometry':<13}{'numpy [ms]':>12}"
    if have_cython:
        header += f"{'cython [ms]':>13}{'speedup':>9}{'max|diff|':>11}"
    print(header)
    for r in rows:
        line = f"{r['kernel']:<14}{r['geometry']:<13}{1e3 * r['numpy']:>12.3f}"
        if have_cython:
            line += f"{1e3 * r['cython']:>13.3f}{r['numpy'] / r['cython']:>9.2f}{r['max_abs_diff']:>11.1e}"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
