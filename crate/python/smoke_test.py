#!/usr/bin/env python3
"""End-to-end smoke test for the tagrec_py extension module.

Build the module first:

    cargo build --release -p tagrec-py --features extension-module

then run this script from anywhere inside the repository.
"""

import math
import subprocess
import sys
import tempfile
from pathlib import Path


def locate_module():
    root = Path(
        subprocess.run(
            ["git", "rev-parse", "--show-toplevel"],
            capture_output=True,
            text=True,
            check=True,
        ).stdout.strip()
    )
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libtagrec_py.so"
        if lib.exists():
            shim = lib.parent / "tagrec_py.so"
            if not shim.exists():
                shim.symlink_to(lib)
            sys.path.insert(0, str(lib.parent))
            return
    sys.exit("libtagrec_py.so not found; build it with "
             "`cargo build --release -p tagrec-py --features extension-module`")


locate_module()
import tagrec_py  # noqa: E402

# Every object carries both tags and every (user, tag) pair occurs twice,
# so this dataset is a purification fixpoint.
RECORDS = "\n".join(
    [
        "u1\to1\tt1,t2",
        "u1\to2\tt1,t2",
        "u2\to2\tt1,t2",
        "u2\to3\tt1,t2",
        "u3\to1\tt1,t2",
        "u3\to3\tt1,t2",
        "u4\to1\tt1,t2",
        "u4\to2\tt1,t2",
        "u4\to3\tt1,t2",
    ]
)

ds = tagrec_py.Dataset.parse(RECORDS)
assert len(ds) == 9

stats = ds.summarize()
assert (stats["n"], stats["m"], stats["r"]) == (4, 3, 2)

pure = ds.purify()
assert len(pure) == 9, "fixture should survive purification unchanged"

# o9 gains a single collector and a single distinct tag, so purification
# must drop it.
dirty = tagrec_py.Dataset([("u1", "o9", ["t1"])] + pure.assignments())
assert len(dirty.purify()) < len(dirty)

train, test = ds.split(0.8, 42)
assert len(train) == 7 and len(test) == 2
again, _ = ds.split(0.8, 42)
assert train.serialize() == again.serialize(), "split must be deterministic"

# Small hand-checked graph (unpurified on purpose).
HAND = "u1\to1\tt1\nu1\to2\tt1,t2\nu2\to2\tt1,t2\nu2\to3\tt2\n"
g = tagrec_py.Graph(tagrec_py.Dataset.parse(HAND))
assert (g.n(), g.m(), g.r()) == (2, 3, 2)

# Hand-checked diffusion values for u1 (collects o1, o2).
scores = g.diffuse("uo", "u1")
assert all(math.isclose(a, b) for a, b in zip(scores, [0.75, 1.0, 0.25])), scores

recs = g.recommend("uto", "u1", 10)
assert [label for label, _ in recs] == ["o3"], "only the uncollected object"

# u2's only uncollected object is o1, so its rank is 1 of 1.
rs = g.ranking_score("uo", "u2", "o1")
assert rs == 1.0, rs

# u1 used t1 twice and t2 once: H = ln 3 - (2/3) ln 2.
h = g.user_entropy("u1")
assert math.isclose(h, math.log(3) - (2 / 3) * math.log(2)), h

g2 = tagrec_py.Graph.from_text(g.to_text())
assert g2.diffuse("uot", "u2") == g.diffuse("uot", "u2")

with tempfile.TemporaryDirectory() as tmp:
    data = Path(tmp) / "toy.dat"
    data.write_text(ds.serialize())
    out = Path(tmp) / "report"
    summary = tagrec_py.evaluate(
        str(data), str(out), realizations=4, ratio=0.8, seed=7, lengths=[2, 3]
    )
    assert set(summary) == {"uo", "uot", "uto"}
    for row in summary.values():
        assert row["rs"] is None or 0.0 < row["rs"] <= 1.0
    produced = sorted(p.name for p in out.iterdir())
    assert "accuracy.csv" in produced and "manifest.txt" in produced, produced

print("smoke test passed")
