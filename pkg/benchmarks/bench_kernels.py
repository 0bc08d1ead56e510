#!/usr/bin/env python
"""Time the numba kernels against the numpy fallback on realistic inputs.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel runs once untimed (JIT warm-up), then N times per backend; the
table reports the best time and checks that both backends agree.
"""
import argparse
import time

import numpy as np

from galsys import _kernels
from galsys.amalgam import pushout_instance
from galsys.groups import abelian, dihedral, direct_product, homomorphisms, symmetric


def best_of(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    s4 = symmetric(4)
    d12 = dihedral(12)
    g = direct_product(s4, abelian([2]))
    yield "associativity S4xC2", "associativity", (g.table.astype(np.int32),)

    hom = homomorphisms(d12, d12)[-1]
    yield "is_hom D12->D12", "is_hom", (d12.table.astype(np.int32), d12.table.astype(np.int32),
                                        hom.images.astype(np.int64))

    gens = np.array(d12.generators, dtype=np.int64)
    imgs = hom.images[gens].astype(np.int64)

    def extend(kernel, tg, th):
        # the kernel fills f in place, so each call starts from a fresh array
        f = np.full(d12.order, -1, dtype=np.int32)
        f[d12.identity] = d12.identity
        kernel(tg, th, f, gens, imgs, len(gens))
        return f

    yield "extend_hom D12", ("extend_hom", extend), (d12.table, d12.table)

    w = abelian([4, 4, 3])
    ks = [w.subgroup_generated([x]) for x in (1, 3, 12)]
    inst, _ = pushout_instance(w, *ks)
    maps = (inst.r1a, inst.r2a, inst.r1b, inst.r3b, inst.r2c, inst.r3c)
    yield "fiber_triples |W|=48", "fiber_triples", tuple(m.images for m in maps)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if not _kernels.NUMBA_IMPL:
        raise SystemExit("numba is not importable; only the numpy backend exists")

    print(f"{'kernel':<26}{'numpy (ms)':>12}{'numba (ms)':>12}{'speedup':>10}  agree")
    for label, kernel, kargs in cases():
        times, outs = [], []
        for impl in (_kernels.NUMPY_IMPL, _kernels.NUMBA_IMPL):
            if isinstance(kernel, tuple):
                name, wrap = kernel

                def fn(*a, k=impl[name], wrap=wrap):
                    return wrap(k, *a)
            else:
                fn = impl[kernel]
            times.append(best_of(fn, kargs, args.repeat))
            outs.append(fn(*kargs))
        agree = np.array_equal(np.asarray(outs[0]), np.asarray(outs[1]))
        print(f"{label:<26}{times[0] * 1e3:>12.3f}{times[1] * 1e3:>12.3f}"
              f"{times[0] / times[1]:>9.1f}x  {agree}")


if __name__ == "__main__":
    main()
