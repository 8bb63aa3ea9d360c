#!/usr/bin/env python3
"""Rebuild a WN18-style benchmark from the WordNet 3.0 database files.

Keeps the 18 synset-to-synset relation types of WN18, drops adjective
satellite synsets and every synset that takes part in fewer than --min-degree
pointer occurrences of any type (counted at both ends), and splits the
surviving triples into train/valid/test with a seeded shuffle.  With the
defaults this gives 40,361 entities and 150,747 triples against WN18's 40,943
and 151,442.  Entities are named like
``_score_NN_1`` (first lemma, part of speech, sense number).

The WordNet 3.0 dict files ship inside the ``wn==0.0.23`` source archive:

    pip download --no-deps --no-binary :all: wn==0.0.23
    tar xzf wn-0.0.23.tar.gz
    python3 tools/wn18_from_wordnet.py wn-0.0.23/wn/data/wordnet-3.0 data/wn18rc
"""

import argparse
import collections
import os
import random

POINTER_RELATIONS = {
    "@": "_hypernym",
    "~": "_hyponym",
    "@i": "_instance_hypernym",
    "~i": "_instance_hyponym",
    "#m": "_member_holonym",
    "%m": "_member_meronym",
    "#p": "_part_of",
    "%p": "_has_part",
    ";c": "_synset_domain_topic_of",
    "-c": "_member_of_domain_topic",
    ";r": "_synset_domain_region_of",
    "-r": "_member_of_domain_region",
    ";u": "_synset_domain_usage_of",
    "-u": "_member_of_domain_usage",
    "+": "_derivationally_related_form",
    "^": "_also_see",
    "$": "_verb_group",
    "&": "_similar_to",
}
POS_FILES = {"n": "noun", "v": "verb", "a": "adj", "r": "adv"}
POS_TAGS = {"n": "NN", "v": "VB", "a": "JJ", "r": "RB"}


def normalize_pos(tag):
    return "a" if tag == "s" else tag


def read_senses(root):
    """Maps (pos, offset, lemma) -> sense number from the index files."""
    senses = {}
    for pos, name in POS_FILES.items():
        with open(os.path.join(root, "index." + name), encoding="latin-1") as f:
            for line in f:
                if line.startswith("  "):
                    continue
                fields = line.split()
                lemma = fields[0]
                synset_cnt = int(fields[2])
                offsets = fields[-synset_cnt:]
                for rank, offset in enumerate(offsets, start=1):
                    senses[(pos, offset, lemma)] = rank
    return senses


def read_graph(root, keep_satellites):
    triples = set()
    degree = collections.Counter()
    first_lemma = {}
    satellites = set()
    for pos, name in POS_FILES.items():
        with open(os.path.join(root, "data." + name), encoding="latin-1") as f:
            for line in f:
                if line.startswith("  "):
                    continue
                fields = line.split("|")[0].split()
                offset = fields[0]
                src = normalize_pos(fields[2]) + offset
                if fields[2] == "s":
                    satellites.add(src)
                word_count = int(fields[3], 16)
                first_lemma[src] = fields[4].lower()
                i = 4 + 2 * word_count
                pointer_count = int(fields[i])
                i += 1
                for _ in range(pointer_count):
                    symbol, target, target_pos = fields[i], fields[i + 1], fields[i + 2]
                    i += 4
                    dst = normalize_pos(target_pos) + target
                    degree[src] += 1
                    degree[dst] += 1
                    relation = POINTER_RELATIONS.get(symbol)
                    if relation is not None:
                        triples.add((src, relation, dst))
    if not keep_satellites:
        triples = {t for t in triples if t[0] not in satellites and t[2] not in satellites}
    return triples, degree, first_lemma


def entity_name(synset, first_lemma, senses):
    pos, offset = synset[0], synset[1:]
    lemma = first_lemma[synset]
    sense = senses.get((pos, offset, lemma))
    if sense is None:
        # Adjective lemmas carry a syntactic marker such as "(a)" in data files.
        bare = lemma.split("(")[0]
        sense = senses.get((pos, offset, bare), 0)
        lemma = bare
    return "_%s_%s_%d" % (lemma, POS_TAGS[pos], sense)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("wordnet_dir")
    parser.add_argument("out_dir")
    parser.add_argument("--min-degree", type=int, default=5)
    parser.add_argument("--valid", type=int, default=5000)
    parser.add_argument("--test", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--keep-satellites", action="store_true")
    args = parser.parse_args()

    senses = read_senses(args.wordnet_dir)
    triples, degree, first_lemma = read_graph(args.wordnet_dir, args.keep_satellites)
    kept = sorted(
        t for t in triples
        if degree[t[0]] >= args.min_degree and degree[t[2]] >= args.min_degree)

    names = {}
    used = set()
    for h, _, t in kept:
        for s in (h, t):
            if s not in names:
                name = entity_name(s, first_lemma, senses)
                # Keep labels unique even if two synsets share a first lemma.
                while name in used:
                    name += "_" + s
                names[s] = name
                used.add(name)

    random.Random(args.seed).shuffle(kept)
    test = kept[:args.test]
    valid = kept[args.test:args.test + args.valid]
    train = kept[args.test + args.valid:]

    os.makedirs(args.out_dir, exist_ok=True)
    for split, rows in (("train", train), ("valid", valid), ("test", test)):
        with open(os.path.join(args.out_dir, split + ".txt"), "w") as f:
            for h, r, t in rows:
                f.write("%s\t%s\t%s\n" % (names[h], r, names[t]))
    print("entities=%d relations=%d train=%d valid=%d test=%d" % (
        len(names), len({r for _, r, _ in kept}), len(train), len(valid), len(test)))


if __name__ == "__main__":
    main()
