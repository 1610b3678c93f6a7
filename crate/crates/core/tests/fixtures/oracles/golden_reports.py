"""Build the golden dataset, an external surprisal file and the expected reports.

The expected TSVs are computed here from first principles (numpy/scipy), not
by the Rust code under test.
"""
import json
import math
import random

import numpy as np
from scipy import stats

rng = random.Random(7)
words = ["a", "dog", "cat", "on", "the", "red", "sofa", "runs", "near", "park", "man", "with", "hat", "two", "birds"]
images = [f"im{i}" for i in range(1, 7)]
humans = ["h1", "h2", "h3"]
models = ["m1", "m2", "m3"]

captions = []
for img in images:
    for who, group in [(h, "human") for h in humans] + [(m, "model") for m in models]:
        n = rng.randint(3, 9)
        captions.append({"image_id": img, "describer_id": who, "group": group, "tokens": [rng.choice(words) for _ in range(n)]})

with open("golden/dataset.jsonl", "w") as f:
    for c in captions:
        f.write(json.dumps(c) + "\n")

scores = {}
with open("golden/scores_ext.jsonl", "w") as f:
    for c in captions:
        vals = [round(rng.uniform(0.2, 9.0), 4) for _ in c["tokens"]]
        scores[(c["image_id"], c["describer_id"])] = vals
        rec = {"image_id": c["image_id"], "describer_id": c["describer_id"], "scorer_id": "ext", "tokens": c["tokens"], "surprisal": vals, "log_base": "e"}
        f.write(json.dumps(rec) + "\n")

# caption mean surprisal in bits
means = {}
for key, vals in scores.items():
    bits = [v / math.log(2) for v in vals]
    total = 0.0
    for b in bits:
        total += b
    means[key] = total / len(bits)


def lex(caps):
    caps = sorted(caps, key=lambda c: (c["image_id"], c["describer_id"]))
    lens = np.array([len(c["tokens"]) for c in caps], dtype=float)
    uni = [t for c in caps for t in c["tokens"]]
    bi = [tuple(c["tokens"][i:i + 2]) for c in caps for i in range(len(c["tokens"]) - 1)]
    ttr = lambda s: len(set(s)) / len(s) if s else 0.0
    return [f"{lens.mean():.2f}", f"{lens.std(ddof=0):.2f}", str(len(set(uni))), f"{ttr(uni):.2f}", f"{ttr(bi):.2f}", str(len(caps)), str(len(uni))]


rows = ["# images=6 captions=36", "source\tasl\tsdsl\tn_types\tttr1\tttr2\tn_captions\tn_tokens"]
for who in sorted(humans + models):
    rows.append("\t".join([who] + lex([c for c in captions if c["describer_id"] == who])))
for g in ["human", "model"]:
    rows.append("\t".join([g] + lex([c for c in captions if c["group"] == g])))
open("golden/lexstats.tsv", "w").write("\n".join(rows) + "\n")

rows = ["scorer\tdata_tag\tsource\tn_captions\tmean_surprisal\tvariance\tsd"]
def spread(vals):
    v = np.var(vals, ddof=1)
    return [str(len(vals)), f"{np.mean(vals):.3f}", f"{v:.3f}", f"{math.sqrt(v):.3f}"]
for who in sorted(humans + models):
    rows.append("\t".join(["ext", "golden", who] + spread([means[(i, who)] for i in images])))
for g, members in [("human", humans), ("model", models)]:
    rows.append("\t".join(["ext", "golden", g] + spread([means[(i, w)] for i in images for w in members])))
open("golden/per_model_surprisal.tsv", "w").write("\n".join(rows) + "\n")

vh = np.array([np.var([means[(i, w)] for w in humans], ddof=1) for i in images])
vm = np.array([np.var([means[(i, w)] for w in models], ddof=1) for i in images])
res = stats.ttest_rel(vh, vm)
d = vh - vm
dz = abs(d.mean()) / d.std(ddof=1)
p = res.pvalue
stars = "***" if p < 0.001 else "**" if p < 0.01 else "*" if p < 0.05 else "ns"
row = ["ext", "golden", f"{vh.mean():.3f}", f"{vh.std(ddof=1):.3f}", f"{vm.mean():.3f}", f"{vm.std(ddof=1):.3f}", f"{res.statistic:.2f}", str(len(d) - 1), stars, f"{dz:.2f}"]
hdr = "scorer\tdata_tag\tmean_h\tsd_h\tmean_m\tsd_m\tt\tdf\tp_stars\tdz"
open("golden/variance_test.tsv", "w").write(hdr + "\n" + "\t".join(row) + "\n")
print(res, dz)
