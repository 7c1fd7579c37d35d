#!/usr/bin/env python3
"""Derive the committed thesaurus resource from a WordNet 3.0 database directory.

usage: build_thesaurus.py <wordnet-dict-dir> <out.tsv> [max_entries]

Entries are single-word lowercase lemmas ranked by sense-tagged frequency
(cntlist.rev). Synonyms come from the three most frequent synsets of each
part of speech, restricted to single-word alphabetic lemmas.
"""
import collections
import os
import re
import sys

WORD = re.compile(r"^[a-z]{2,}$")
POS_FILES = ["noun", "verb", "adj", "adv"]
SYNSETS_PER_POS = 3
MAX_SYNONYMS = 12


def main():
    src, out = sys.argv[1], sys.argv[2]
    limit = int(sys.argv[3]) if len(sys.argv) > 3 else 10000

    freq = collections.Counter()
    pos_freq = collections.defaultdict(collections.Counter)
    ss_type = {"1": "noun", "2": "verb", "3": "adj", "4": "adv", "5": "adj"}
    with open(os.path.join(src, "cntlist.rev")) as f:
        for line in f:
            key, _, count = line.split()
            lemma, rest = key.split("%")
            if WORD.match(lemma):
                freq[lemma] += int(count)
                pos_freq[lemma][ss_type[rest[0]]] += int(count)

    synset_words = {}
    for pos in POS_FILES:
        with open(os.path.join(src, "data." + pos), encoding="latin-1") as f:
            for line in f:
                if line.startswith("  "):
                    continue
                parts = line.split()
                offset, n = parts[0], int(parts[3], 16)
                words = []
                for i in range(n):
                    w = parts[4 + 2 * i].lower()
                    w = re.sub(r"\(.*\)$", "", w)
                    words.append(w)
                synset_words[(pos, offset)] = words

    per_pos = collections.defaultdict(dict)
    for pos in POS_FILES:
        with open(os.path.join(src, "index." + pos), encoding="latin-1") as f:
            for line in f:
                if line.startswith("  "):
                    continue
                parts = line.split()
                lemma = parts[0]
                if not WORD.match(lemma):
                    continue
                synset_cnt, p_cnt = int(parts[2]), int(parts[3])
                offsets = parts[4 + p_cnt + 2:]
                assert len(offsets) == synset_cnt
                words = []
                for off in offsets[:SYNSETS_PER_POS]:
                    for w in synset_words[(pos, off)]:
                        if w != lemma and WORD.match(w) and w not in words:
                            words.append(w)
                per_pos[lemma][pos] = words

    # most frequently tagged part of speech first
    synonyms = {}
    for lemma, by_pos in per_pos.items():
        order = sorted(by_pos, key=lambda p: (-pos_freq[lemma][p], POS_FILES.index(p)))
        merged = []
        for p in order:
            for w in by_pos[p]:
                if w not in merged:
                    merged.append(w)
        synonyms[lemma] = merged

    ranked = sorted(
        (w for w in freq if synonyms.get(w)),
        key=lambda w: (-freq[w], w),
    )[:limit]

    with open(out, "w", encoding="utf-8") as f:
        f.write("# word<TAB>space-separated synonyms\n")
        f.write("# Derived from WordNet 3.0 (see THESAURUS_LICENSE); regenerate with scripts/build_thesaurus.py\n")
        for w in sorted(ranked):
            f.write(w + "\t" + " ".join(synonyms[w][:MAX_SYNONYMS]) + "\n")
    print(f"wrote {len(ranked)} entries")


if __name__ == "__main__":
    main()
