#!/usr/bin/env python3
"""Generate the bundled test corpus: ~100k tokens from a small class-based grammar.

Word classes are made of pseudo-words so that the clusterers have real
distributional structure to find. Output is deterministic for a given seed.

    python3 tools/make_fixture_corpus.py --tokens 100000 -o tests/data/fixture_corpus.txt
"""

import argparse
import random

ONSETS = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "kl", "st", "tr", "gr", "pl"]
VOWELS = ["a", "e", "i", "o", "u", "ai", "ou", "ea"]
CODAS = ["", "n", "r", "s", "l", "m", "k", "nd", "st"]

# name -> (size, suffix). Suffixes keep the classes disjoint.
CLASSES = {
    "animal": (90, "o"),
    "thing": (110, "et"),
    "place": (60, "ia"),
    "person": (70, "ar"),
    "verb_t": (80, "es"),
    "verb_i": (50, "ed"),
    "adj": (90, "y"),
    "adv": (40, "ly"),
    "num": (20, "teen"),
}
FUNCTION = {
    "det": ["the", "a", "this", "that", "every", "some", "no", "each"],
    "prep": ["in", "on", "near", "under", "behind", "with", "from", "across", "beside", "over"],
    "conj": ["and", "but", "while", "because"],
    "pron": ["he", "she", "they", "it", "we"],
}


def make_words(rng, size, suffix, taken):
    words = []
    while len(words) < size:
        w = "".join(rng.choice(ONSETS) + rng.choice(VOWELS) for _ in range(rng.randint(1, 2)))
        w += rng.choice(CODAS) + suffix
        if w not in taken:
            taken.add(w)
            words.append(w)
    return words


def zipf_weights(n, s=1.1):
    return [1.0 / (r + 1) ** s for r in range(n)]


class Grammar:
    def __init__(self, rng):
        self.rng = rng
        taken = {w for ws in FUNCTION.values() for w in ws}
        self.words = {name: make_words(rng, size, suffix, taken) for name, (size, suffix) in CLASSES.items()}
        self.words.update(FUNCTION)
        self.weights = {name: zipf_weights(len(ws)) for name, ws in self.words.items()}

    def pick(self, cls):
        return self.rng.choices(self.words[cls], weights=self.weights[cls])[0]

    def noun_phrase(self, head):
        out = [self.pick("det")]
        if self.rng.random() < 0.4:
            out.append(self.pick("adj"))
        if head == "thing" and self.rng.random() < 0.15:
            out = [self.pick("num")]
        out.append(self.pick(head))
        return out

    def subject(self):
        if self.rng.random() < 0.15:
            return [self.pick("pron")]
        return self.noun_phrase(self.rng.choice(["animal", "person", "person", "animal"]))

    def clause(self):
        out = self.subject()
        if self.rng.random() < 0.2:
            out.append(self.pick("adv"))
        if self.rng.random() < 0.6:
            out.append(self.pick("verb_t"))
            out += self.noun_phrase(self.rng.choice(["thing", "thing", "animal", "person"]))
        else:
            out.append(self.pick("verb_i"))
        if self.rng.random() < 0.45:
            out.append(self.pick("prep"))
            out += self.noun_phrase(self.rng.choice(["place", "place", "thing"]))
        return out

    def sentence(self):
        out = self.clause()
        if self.rng.random() < 0.25:
            out.append(self.pick("conj"))
            out += self.clause()
        out[0] = out[0].capitalize()
        return out + ["."]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tokens", type=int, default=100000)
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("-o", "--out", required=True)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    g = Grammar(rng)
    total = 0
    with open(args.out, "w", encoding="utf-8", newline="\n") as f:
        while total < args.tokens:
            s = g.sentence()
            total += len(s)
            f.write(" ".join(s) + "\n")


if __name__ == "__main__":
    main()
