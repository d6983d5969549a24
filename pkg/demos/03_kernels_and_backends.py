"""Kernels and backends: direct calls, instrumentation, naive vs BLAS.

Run with:  python3 demos/03_kernels_and_backends.py
"""

import numpy as np

from lazyblas import Tensor, kernels, vector

rng = np.random.default_rng(1)


def rand(*extents):
    t = Tensor(len(extents), *extents)
    t.column_view()[...] = rng.random(extents)
    return t


# The seven kernels can be called directly, bypassing expressions.
x = vector(8, fill=1.0)
print("dot(ones, ones)  =", kernels.dot(x, x))
print("nrm2((3, 4))     =", kernels.nrm2(Tensor.from_nested([3.0, 4.0])))

y = vector(8, fill=2.0)
kernels.axpy(0.5, x, y)          # y <- 0.5*x + y
print("axpy result[0]   =", y.get(0))

a = rand(4, 4)
b = rand(4, 4)
c = Tensor(2, 4)
kernels.gemm(False, False, 1.0, a, b, 0.0, c)   # C <- A B
print("gemm diag        =", [round(c.get(i, i), 4) for i in range(4)])
print()

# Every call is recorded: kernel name, shapes, coefficients, and the
# number of destination elements written.
kernels.reset_log()
kernels.gemv(True, 2.0, a, vector(4, fill=1.0), 0.0, vector(4))
rec = kernels.log().records[0]
print("logged:", rec.kernel, rec.shapes, "alpha =", rec.alpha,
      "trans =", rec.trans)
print("element writes:", kernels.log().element_writes)
print()

# Two interchangeable backends: a loop-faithful naive one (the reference
# for exactness tests) and an optimized external BLAS binding.  Both see
# the same float64/float32 buffers.
available = sorted(kernels._backends)
print("registered backends:", available)

a2, b2, c0 = rand(64, 64), rand(64, 64), rand(64, 64)
results = {}
for name in available:
    kernels.select_backend(name)
    c2 = Tensor.wrap((64, 64), c0.to_numpy().ravel(order="F"))
    kernels.gemm(False, False, 0.5, a2, b2, 4.0, c2)
    results[name] = c2.get(0, 0)
kernels.select_backend("naive")
print("same gemm on each backend, element [0,0]:",
      {k: round(v, 12) for k, v in results.items()})
