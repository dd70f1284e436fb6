"""
Cost per outer iteration
========================

One outer iteration does a fixed number of Sinkhorn sweeps per label, each
touching every cell once, so its cost should grow roughly with m*n*k.
"""

# %%
from pidipfp.pipeline import bench

rows = bench([(4, 4, 4), (8, 8, 8), (16, 16, 16), (24, 24, 24)], repeats=3)
base = rows[0][3]
for m, n, k, sec, sweeps in rows:
    print(f"{m:>3}x{n}x{k:<3} cells={m * n * k:>6}  {sec * 1e3:8.3f} ms/iter  x{sec / base:6.1f}  sweeps/label={sweeps:.0f}")
