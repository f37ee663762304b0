#!/usr/bin/env python3
"""Independently recompute the analyze-stage artifacts from the raw dumps.

Reads beta.tsv / theta.tsv / vocabulary.tsv / doc_metadata.tsv / model.json
from an output directory, recomputes every derived CSV with numpy, and
compares against the files the CLI wrote.  Exits non-zero on any mismatch.
"""

import argparse
import csv
import json
import math
import os
import re
import sys

import numpy as np
from scipy import stats as sps

POL = ["left", "center", "right"]
TOL = 1e-12
EFFECTS_TOL = 1e-9  # OLS solver differences are a bit above 1e-12

failures = []


def fail(msg):
    failures.append(msg)
    print("MISMATCH: " + msg)


def slug(name):
    out = []
    pending = False
    for c in name:
        if c.isalnum():
            if pending and out:
                out.append("_")
            pending = False
            out.append(c.lower())
        else:
            pending = True
    return "".join(out) or "topic"


def read_tsv_matrix(path):
    rows = []
    with open(path) as f:
        for line in f:
            if line.startswith("#"):
                continue
            rows.append([float(x) for x in line.rstrip("\n").split("\t")])
    return np.array(rows)


def load_outputs(outdir):
    with open(os.path.join(outdir, "model.json")) as f:
        model = json.load(f)
    K, L, V = model["k"], model["l"], model["v"]
    countries = model["countries"]
    topic_names = model["topic_names"]

    raw = read_tsv_matrix(os.path.join(outdir, "beta.tsv"))
    beta = np.zeros((L, K, V))
    for row in raw:
        l, k = int(row[0]), int(row[1])
        beta[l, k, :] = row[2:]

    theta = read_tsv_matrix(os.path.join(outdir, "theta.tsv"))[:, 1:]
    assert theta.shape == (len(theta), K)

    vocab = []
    with open(os.path.join(outdir, "vocabulary.tsv")) as f:
        header = f.readline().rstrip("\n").split("\t")
        assert header == ["index", "kind", "surface", "count"], header
        for line in f:
            idx, kind, surface, count = line.rstrip("\n").split("\t")
            vocab.append((kind, surface))
    assert len(vocab) == V

    docs = []
    with open(os.path.join(outdir, "doc_metadata.tsv")) as f:
        header = f.readline().rstrip("\n").split("\t")
        assert header == ["doc_index", "doc_id", "country", "pol_pos",
                          "content_level"], header
        for line in f:
            _, doc_id, country, pol, level = line.rstrip("\n").split("\t")
            docs.append((doc_id, country, pol, int(level)))

    return model, countries, topic_names, beta, theta, vocab, docs


def level_name(countries, l):
    return POL[l % 3] + ":" + countries[l // 3]


def fmt17(x):
    return "%.17g" % x


# ---------------------------------------------------------------- comparison

def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


RANKED_RE = re.compile(r"^(.*) \(([^()]*)\)$")


def cells_equal(mine, theirs, tol):
    if isinstance(mine, float):
        if math.isnan(mine):
            return theirs == "" or theirs.lower() == "nan"
        try:
            tv = float(theirs)
        except ValueError:
            return False
        return abs(mine - tv) <= tol
    if isinstance(mine, int):
        return theirs == str(mine)
    if isinstance(mine, tuple) and mine[0] == "ranked":
        parts = theirs.split("; ") if theirs else []
        if len(parts) != len(mine[1]):
            return False
        for (name, value), part in zip(mine[1], parts):
            m = RANKED_RE.match(part)
            if not m or m.group(1) != name:
                return False
            if abs(float(m.group(2)) - value) > tol:
                return False
        return True
    return mine == theirs


def compare(outdir, name, header, rows, tol=TOL):
    path = os.path.join(outdir, name)
    if not os.path.exists(path):
        fail(f"{name}: file missing")
        return
    got = read_csv(path)
    if not got or got[0] != header:
        fail(f"{name}: header {got[0] if got else '(empty)'} != {header}")
        return
    body = got[1:]
    if len(body) != len(rows):
        fail(f"{name}: {len(body)} rows, expected {len(rows)}")
        return
    for i, (mine, theirs) in enumerate(zip(rows, body)):
        if len(mine) != len(theirs):
            fail(f"{name} row {i}: {len(theirs)} fields, expected {len(mine)}")
            return
        for j, (mc, tc) in enumerate(zip(mine, theirs)):
            if not cells_equal(mc, tc, tol):
                fail(f"{name} row {i} col {j}: got {tc!r}, expected {mc!r}")
                return
    print(f"ok: {name} ({len(rows)} rows)")


# ---------------------------------------------------------------- analytics

def xlogx_sum(u):
    nz = u[u > 0.0]
    return float(np.sum(nz * np.log(nz)))


def js_divergence(p, q):
    m = 0.5 * (p + q)
    val = (0.5 * xlogx_sum(p) + 0.5 * xlogx_sum(q) - xlogx_sum(m))
    val /= 0.69314718055994530942
    return min(max(val, 0.0), 1.0)


def similarity_matrices(beta):
    L, K, _ = beta.shape
    sims = np.zeros((K, L, L))
    for k in range(K):
        for a in range(L):
            sims[k, a, a] = 1.0
            for b in range(a + 1, L):
                v = 1.0 - js_divergence(beta[a, k], beta[b, k])
                sims[k, a, b] = v
                sims[k, b, a] = v
    return sims


def top_indices(values, vocab, n):
    n = max(0, min(n, len(values)))
    order = sorted(range(len(values)),
                   key=lambda v: (-values[v], vocab[v][1]))
    return order[:n]


def check_similarities(outdir, sims, countries, topic_names):
    K, L = sims.shape[0], sims.shape[1]
    names = [level_name(countries, l) for l in range(L)]

    rows = []
    for k in range(K):
        for a in range(L):
            for b in range(L):
                rows.append([topic_names[k], names[a], names[b],
                             float(sims[k, a, b])])
    compare(outdir, "similarity_long.csv",
            ["topic", "level_a", "level_b", "similarity"], rows)

    for k in range(K):
        rows = [[names[a]] + [float(x) for x in sims[k, a]] for a in range(L)]
        compare(outdir, f"similarity_{slug(topic_names[k])}.csv",
                ["level"] + names, rows)


def check_blocks(outdir, sims, countries, topic_names):
    K, L = sims.shape[0], sims.shape[1]
    C = L // 3
    if C < 2:
        return

    def within(s, g):
        vals = [s[a * 3 + g, b * 3 + g]
                for a in range(C) for b in range(a + 1, C)]
        return float(np.mean(vals))

    def cross(s, g1, g2):
        vals = [s[a * 3 + g1, b * 3 + g2]
                for a in range(C) for b in range(C)]
        return float(np.mean(vals))

    rows = []
    for k in range(K):
        s = sims[k]
        wl, wc, wr = within(s, 0), within(s, 1), within(s, 2)
        lr, lc, cr = cross(s, 0, 2), cross(s, 0, 1), cross(s, 1, 2)
        partisan = int(lr < wl and lr < wr)
        right_splinter = int(wr < lr)
        left_splinter = int(wl < lr)
        rows.append([topic_names[k], wl, wc, wr, lr, lc, cr,
                     partisan, right_splinter, left_splinter])
    compare(outdir, "blocks.csv",
            ["topic", "within_left", "within_center", "within_right",
             "left_right", "left_center", "center_right",
             "partisan", "right_splinter", "left_splinter"], rows)


def check_salience(outdir, theta, docs, countries, topic_names):
    K = theta.shape[1]
    L = 3 * len(countries)
    sums = np.zeros((K, L))
    counts = np.zeros(L)
    for d, (_, _, _, level) in enumerate(docs):
        counts[level] += 1.0
        sums[:, level] += theta[d]
    raw = np.full((K, L), np.nan)
    for l in range(L):
        if counts[l] > 0:
            raw[:, l] = sums[:, l] / counts[l]

    rows = []
    for k in range(K):
        finite = raw[k][~np.isnan(raw[k])]
        lo = finite.min() if finite.size else math.inf
        hi = finite.max() if finite.size else -math.inf
        degenerate = not (hi > lo)
        for l in range(L):
            x = raw[k, l]
            if degenerate or math.isnan(x):
                norm = x
            else:
                norm = (x - lo) / (hi - lo)
            rows.append([topic_names[k], level_name(countries, l),
                         float(x), float(norm), int(degenerate)])
    compare(outdir, "salience.csv",
            ["topic", "group", "raw", "normalized", "degenerate_row"], rows)


def check_feature_diff(outdir, beta, vocab, countries, topic_names,
                       n_per_side=10):
    K = beta.shape[1]
    C = len(countries)
    rows = []
    for k in range(K):
        left = np.mean([beta[c * 3 + 0, k] for c in range(C)], axis=0)
        right = np.mean([beta[c * 3 + 2, k] for c in range(C)], axis=0)
        chosen = sorted(set(top_indices(left, vocab, n_per_side)) |
                        set(top_indices(right, vocab, n_per_side)))
        feats = []
        for v in chosen:
            feats.append((float(right[v] - left[v]), vocab[v][1], vocab[v][0],
                          float(left[v]), float(right[v]),
                          float(0.5 * (left[v] + right[v]))))
        feats.sort(key=lambda t: (t[0], t[1]))
        for diff, surface, kind, lm, rm, mp in feats:
            rows.append([topic_names[k], surface, kind, lm, rm, mp, diff])
    compare(outdir, "feature_diff.csv",
            ["topic", "feature", "kind", "left_mean", "right_mean",
             "mean_prob", "diff"], rows)


def check_pair_rankings(outdir, sims, countries, topic_names, n=3):
    K = sims.shape[0]
    C = len(countries)
    if C < 2:
        return
    n = max(0, min(n, K))
    for side, g in (("left", 0), ("right", 2)):
        rows = []
        for a in range(C):
            for b in range(a + 1, C):
                ranked = [(topic_names[k],
                           float(sims[k, a * 3 + g, b * 3 + g]))
                          for k in range(K)]
                desc = sorted(ranked, key=lambda t: (-t[1], t[0]))[:n]
                asc = sorted(ranked, key=lambda t: (t[1], t[0]))[:n]
                for r in range(n):
                    rows.append([side, countries[a], countries[b], r + 1,
                                 desc[r][0], desc[r][1],
                                 asc[r][0], asc[r][1]])
        compare(outdir, f"pair_rankings_{side}.csv",
                ["side", "country_a", "country_b", "rank", "top_topic",
                 "top_similarity", "bottom_topic", "bottom_similarity"], rows)


def check_within_lr(outdir, sims, countries, topic_names):
    K = sims.shape[0]
    per_country = []
    rows = []
    for c, country in enumerate(countries):
        vals = [float(sims[k, c * 3 + 0, c * 3 + 2]) for k in range(K)]
        per_country.append((country, vals))
        for k in range(K):
            rows.append([country, topic_names[k], vals[k]])
    compare(outdir, "within_lr.csv", ["country", "topic", "similarity"], rows)

    summary = []
    for country, vals in per_country:
        avg = float(np.sum(vals) / K)
        ranked = list(zip(topic_names, vals))
        desc = sorted(ranked, key=lambda t: (-t[1], t[0]))[:3]
        asc = sorted(ranked, key=lambda t: (t[1], t[0]))[:3]
        summary.append((avg, country, desc, asc))
    summary.sort(key=lambda t: (t[0], t[1]))
    rows = [[country, avg, ("ranked", desc), ("ranked", asc)]
            for avg, country, desc, asc in summary]
    compare(outdir, "within_lr_summary.csv",
            ["country", "average_similarity", "top_topics", "bottom_topics"],
            rows)


def check_networks(outdir, beta, vocab, countries, topic_names, top_n):
    K = beta.shape[1]
    for k in range(K):
        for c, country in enumerate(countries):
            ba = beta[c * 3 + 0, k]
            bb = beta[c * 3 + 2, k]
            chosen = set(top_indices(ba, vocab, top_n)) | \
                set(top_indices(bb, vocab, top_n))
            surfaces = {vocab[v][1] for v in chosen
                        if vocab[v][0] == "unigram"}
            edges = []
            for v, (kind, surface) in enumerate(vocab):
                if kind != "dep_pair":
                    continue
                head, child = surface.split("->", 1)
                if head in surfaces and child in surfaces:
                    edges.append((head, child,
                                  float(0.5 * (ba[v] + bb[v])),
                                  float(bb[v] - ba[v])))
            edges.sort(key=lambda e: (e[0], e[1]))
            name = f"network_{slug(topic_names[k])}_{country}_edges.csv"
            compare(outdir, name,
                    ["head", "child", "weight", "signed_diff"],
                    [list(e) for e in edges])


def check_effects(outdir, model, theta, docs, countries, topic_names):
    terms = model["terms"]
    C = len(countries)
    P = 3 * C
    if len(terms) != P:
        fail(f"effects: model has {len(terms)} terms, expected {P}")
        return
    D = len(docs)
    X = np.zeros((D, P))
    cindex = {c: i for i, c in enumerate(countries)}
    for d, (_, country, pol, _) in enumerate(docs):
        left = 1.0 if pol == "Left" else 0.0
        right = 1.0 if pol == "Right" else 0.0
        X[d, 0] = 1.0
        X[d, 1] = left
        X[d, 2] = right
        ci = cindex[country]
        if ci > 0:
            X[d, 2 + ci] = 1.0
            X[d, 2 + (C - 1) + 2 * (ci - 1) + 1] = left
            X[d, 2 + (C - 1) + 2 * (ci - 1) + 2] = right

    coef, _, _, _ = np.linalg.lstsq(X, theta, rcond=None)
    xtx_inv = np.linalg.inv(X.T @ X)
    dof = D - P
    rows = []
    for k in range(theta.shape[1]):
        resid = theta[:, k] - X @ coef[:, k]
        s2 = float(resid @ resid) / dof
        for p in range(P):
            est = float(coef[p, k])
            var = s2 * xtx_inv[p, p]
            se = math.sqrt(var) if var > 0 else 0.0
            if se > 0:
                t = est / se
                pval = 2.0 * float(sps.t.sf(abs(t), dof))
            else:
                t = 0.0 if est == 0 else math.copysign(math.inf, est)
                pval = 1.0 if est == 0 else 0.0
            if pval < 0.001:
                sig = "***"
            elif pval < 0.01:
                sig = "**"
            elif pval < 0.1:
                sig = "."
            else:
                sig = ""
            rows.append([topic_names[k], terms[p], est, se, t, pval, sig])
    compare(outdir, "effects.csv",
            ["topic", "term", "estimate", "std_error", "t_value", "p_value",
             "signif"], rows, tol=EFFECTS_TOL)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir")
    ap.add_argument("--top-n", type=int, default=10,
                    help="network node count per level (analytics.top_n)")
    args = ap.parse_args()

    model, countries, topic_names, beta, theta, vocab, docs = \
        load_outputs(args.outdir)

    sims = similarity_matrices(beta)
    check_similarities(args.outdir, sims, countries, topic_names)
    check_blocks(args.outdir, sims, countries, topic_names)
    check_salience(args.outdir, theta, docs, countries, topic_names)
    check_feature_diff(args.outdir, beta, vocab, countries, topic_names)
    check_pair_rankings(args.outdir, sims, countries, topic_names)
    check_within_lr(args.outdir, sims, countries, topic_names)
    check_networks(args.outdir, beta, vocab, countries, topic_names,
                   args.top_n)
    check_effects(args.outdir, model, theta, docs, countries, topic_names)

    if failures:
        print(f"FAILED: {len(failures)} mismatch(es)")
        return 1
    print("all recomputed artifacts match")
    return 0


if __name__ == "__main__":
    sys.exit(main())
