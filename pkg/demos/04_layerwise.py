"""
Layer-by-layer decomposition
============================

A directory holds one x1/x2/y triple per layer, named ``layerNN_{x1,x2,y}.csv``.
In this constructed dump the target drifts from modality 1 (layer 0) to a
mix (layer 1) to modality 2 (layer 2), so C1 should fall across layers.
"""

# %%
import tempfile
from pathlib import Path

from pidipfp.cli import main
from pidipfp.embio import write_embedding
from pidipfp.synth import embedding_triple

tmp = Path(tempfile.mkdtemp())
for layer, target in enumerate(["x1", "both", "x2"]):
    for role, a in zip(("x1", "x2", "y"), embedding_triple(600, seed=layer, target=target)):
        write_embedding(tmp / f"layer{layer:02d}_{role}.csv", a)

# %%
assert main(["layers", "--dir", str(tmp), "--clusters", "6,6,6", "--out", str(tmp / "out")]) == 0
print((tmp / "out" / "layers.csv").read_text())
