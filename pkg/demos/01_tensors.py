"""Dense tensors: construction, column-major layout, indexing, iteration.

Run with:  python3 demos/01_tensors.py
"""

import numpy as np

from lazyblas import Tensor, format_tensor, matrix, vector

# A rank-2 tensor with explicit extents.  Storage is column-major: the
# first index varies fastest in memory.
a = Tensor(2, 3, 4)
print("3x4 zeros:")
print(format_tensor(a))
print()

# Giving fewer extents than the rank replicates the last one, so a
# square matrix needs only one number.
sq = Tensor(2, 3)
print("Tensor(2, 3) is square:", sq.extents)
print()

# fill can be a constant or a generator called with each index tuple.
eye = Tensor(2, 4, fill=lambda i, j: 1.0 if i == j else 0.0)
print("identity via a fill generator:")
print(format_tensor(eye))
print()

# Nested literals mirror the natural row-by-row spelling; storage still
# ends up column-major.
m = Tensor.from_nested([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
print("from_nested [[1,2,3],[4,5,6]]:")
print(format_tensor(m))
print("linear (memory) order:", list(m.linear_iter()))
print()

# Element access: get/set with multi-indices, or chained [] which walks
# one dimension at a time through lightweight proxies.
print("m.get(1, 2) =", m.get(1, 2))
print("m[1][2]     =", m[1][2])
m[0][0] = 9.0
print("after m[0][0] = 9:", list(m.linear_iter()))
print()

# dim_iter yields the linear offsets along one dimension; nesting the
# iterators visits the matrix row by row.
print("row-by-row traversal via dim_iter:")
for row in m.dim_iter(0):
    print("  ", [m.value_at(col) for col in m.dim_iter(1, base=row)])
print()

# wrap views external storage without copying or taking ownership.
buf = np.arange(6, dtype=np.float64)
w = Tensor.wrap((2, 3), buf)
w.set(0, 1, -1.0)
print("wrapped buffer after w.set(0,1,-1):", buf)
print()

# Rank-specific conveniences.
x = vector(4, fill=lambda i: float(i + 1))
print("vector:", format_tensor(x))
print("rows x columns of a 4x8:", matrix(4, 8).rows(), "x", matrix(4, 8).columns())
print("norm of (1,2,3,4):", x.norm())
