#!/usr/bin/env python3
"""Reference EDA implementation used to freeze crates/core/tests/data/eda_vectors.json.

Written against the documented operation semantics, sharing only the
generator transcription in rng_vectors.py.

    python3 scripts/eda_vectors.py > crates/core/tests/data/eda_vectors.json
"""
import json
import os
import sys

sys.path.insert(0, os.path.dirname(__file__))
from rng_vectors import M64, Pcg32, fnv1a64, splitmix64  # noqa: E402

ROOT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "resources")


def rotl(x, r):
    return ((x << r) | (x >> (64 - r))) & M64


def derive_seed(seed, tag):
    s = seed ^ rotl(tag, 32)
    s, a = splitmix64(s)
    s, b = splitmix64(s)
    return a ^ b


def tokenize(text):
    out, cur = [], []
    for ch in text.lower():
        if ch.isalnum():
            cur.append(ch)
        elif cur:
            out.append("".join(cur))
            cur = []
    if cur:
        out.append("".join(cur))
    return out


def load_stoplist():
    words = set()
    with open(os.path.join(ROOT, "stopwords_en.txt"), encoding="utf-8") as f:
        for line in f:
            w = line.split("#")[0].strip().lower()
            if w:
                words.add(w)
    return words


def load_thesaurus():
    table = {}
    with open(os.path.join(ROOT, "thesaurus.tsv"), encoding="utf-8") as f:
        for line in f:
            line = line.rstrip()
            if not line or line.startswith("#"):
                continue
            word, syns = line.split("\t", 1)
            word = word.strip().lower()
            syns = [s.lower() for s in syns.split() if s.lower() != word]
            if syns:
                table[word] = syns
    return table


def sample_indices(rng, n, k):
    k = min(k, n)
    pool = list(range(n))
    for i in range(k):
        j = i + rng.below(n - i)
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def replaceable(w, th, stop):
    return w not in stop and w in th


def sr(tokens, n, th, stop, rng):
    out = list(tokens)
    cand = [i for i, w in enumerate(out) if replaceable(w, th, stop)]
    if n == 0 or not cand:
        return out
    for pick in sample_indices(rng, len(cand), n):
        pos = cand[pick]
        syns = th[out[pos]]
        out[pos] = syns[rng.below(len(syns))]
    return out


def ri(tokens, n, th, stop, rng):
    out = list(tokens)
    for _ in range(n):
        cand = [i for i, w in enumerate(out) if replaceable(w, th, stop)]
        if not cand:
            break
        syns = th[out[cand[rng.below(len(cand))]]]
        syn = syns[rng.below(len(syns))]
        out.insert(rng.below(len(out) + 1), syn)
    return out


def rs(tokens, n, rng):
    out = list(tokens)
    if len(out) < 2:
        return out
    for _ in range(n):
        i = rng.below(len(out))
        j = rng.below(len(out) - 1)
        if j >= i:
            j += 1
        out[i], out[j] = out[j], out[i]
    return out


def rd(tokens, p, rng):
    if not tokens:
        return []
    kept = [w for w in tokens if rng.unit() >= p]
    if not kept:
        return [tokens[rng.below(len(tokens))]]
    return kept


def eda(example_id, text, alpha, seed, k, th, stop):
    tokens = tokenize(text)
    rng = Pcg32(derive_seed(seed, fnv1a64(example_id.encode())))
    n = max(1, int(round_half_away(alpha * len(tokens))))
    outs = []
    for i in range(k):
        op = i % 4
        if op == 0:
            o = sr(tokens, n, th, stop, rng)
        elif op == 1:
            o = ri(tokens, n, th, stop, rng)
        elif op == 2:
            o = rs(tokens, n, rng)
        else:
            o = rd(tokens, alpha, rng)
        outs.append(" ".join(o) if o else text)
    return outs


def round_half_away(x):
    # f64::round semantics, not Python's banker's rounding
    import math
    return math.floor(x + 0.5) if x >= 0 else math.ceil(x - 0.5)


TEXTS = [
    "a truly great and moving film",
    "the soundtrack is dreadful",
    "What a wonderful, heartfelt story about a small town!",
    "Play the latest album by Taylor Swift on my kitchen speaker",
    "who invented the telephone",
    "book a table for four at a quiet italian restaurant tonight",
    "The plot was boring, the acting was poor, and the ending made no sense at all.",
    "good",
    "!!!",
    "rain",
    "How many people died in the great fire of London in 1666?",
    "i would rate this novel five out of six stars",
]


def main():
    th = load_thesaurus()
    stop = load_stoplist()
    cases = []
    for t_idx, text in enumerate(TEXTS):
        for alpha in (0.0, 0.1, 0.3):
            for seed in (0, 42, 18446744073709551615):
                ex_id = f"ex-{t_idx}"
                cases.append({
                    "id": ex_id,
                    "text": text,
                    "alpha": alpha,
                    "seed": seed,
                    "k": 8,
                    "outputs": eda(ex_id, text, alpha, seed, 8, th, stop),
                })
    json.dump({"cases": cases}, sys.stdout, indent=1, ensure_ascii=False)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
