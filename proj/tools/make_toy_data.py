#!/usr/bin/env python3
"""Generate the bundled toy review-classification data under data/toy/.

Three classes (pos, neg, neu). Every class owns a Zipf-distributed set of
indicative words, so a small shard only sees part of them; the rest of each
document is shared filler. Negative documents sometimes negate a positive
word ("not <pos-word>"), which only a bigram feature can resolve.

The output is fully determined by --seed.
"""

import argparse
import pathlib
import random

SYLLABLES = ["ka", "lo", "mi", "ra", "tu", "ne", "so", "vi", "da", "pe",
             "zu", "fo", "gi", "ha", "ju", "be", "co", "wy", "xe", "qi"]
LABELS = ["pos", "neg", "neu"]


def make_words(rng, count, taken):
    words = []
    while len(words) < count:
        word = "".join(rng.choice(SYLLABLES) for _ in range(rng.randint(2, 4)))
        if word not in taken and word != "not":
            taken.add(word)
            words.append(word)
    return words


def zipf_weights(n, exponent):
    return [1.0 / (rank + 1) ** exponent for rank in range(n)]


def make_document(rng, label, vocab):
    filler, filler_w = vocab["filler"]
    length = rng.randint(6, 14)
    tokens = []
    while len(tokens) < length:
        u = rng.random()
        if u < 0.22:
            words, weights = vocab[label]
            tokens.append(rng.choices(words, weights)[0])
        elif u < 0.30:
            other = rng.choice([l for l in LABELS if l != label])
            words, weights = vocab[other]
            tokens.append(rng.choices(words, weights)[0])
        elif label == "neg" and u < 0.36:
            words, weights = vocab["pos"]
            tokens.extend(["not", rng.choices(words, weights)[0]])
        else:
            tokens.append(rng.choices(filler, filler_w)[0])
    return tokens


def write(path, docs):
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        for label, tokens in docs:
            out.write("__label__" + label + " " + " ".join(tokens) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/toy")
    parser.add_argument("--seed", type=int, default=2019)
    parser.add_argument("--shard-size", type=int, default=300)
    parser.add_argument("--test-size", type=int, default=3000)
    parser.add_argument("--class-words", type=int, default=150)
    parser.add_argument("--filler-words", type=int, default=400)
    parser.add_argument("--label-noise", type=float, default=0.05)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    taken = set()
    vocab = {}
    for label in LABELS:
        vocab[label] = (make_words(rng, args.class_words, taken),
                        zipf_weights(args.class_words, 0.9))
    vocab["filler"] = (make_words(rng, args.filler_words, taken),
                       zipf_weights(args.filler_words, 1.0))

    def sample(count):
        docs = []
        for _ in range(count):
            label = rng.choice(LABELS)
            tokens = make_document(rng, label, vocab)
            if rng.random() < args.label_noise:
                label = rng.choice(LABELS)
            docs.append((label, tokens))
        return docs

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write(out / "shard0.txt", sample(args.shard_size))
    write(out / "shard1.txt", sample(args.shard_size))
    write(out / "test.txt", sample(args.test_size))


if __name__ == "__main__":
    main()
