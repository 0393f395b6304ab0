"""Writes normalization_golden.tsv: <input codepoints>\t<expected codepoints>.

Codepoints are space-separated uppercase hex; an empty field is the empty
string. Expected values come from this independent implementation built on
Python's unicodedata.
"""

import os
import random
import unicodedata

MAPPED = {0x0622: 0x0627, 0x0623: 0x0627, 0x0625: 0x0627, 0x0649: 0x064A}
DELETED = set(range(0x064B, 0x0653)) | {0x0670}


def normalize(s):
    out = []
    run = []

    def flush():
        text = "".join(run)
        while True:
            text = unicodedata.normalize("NFC", text)
            mapped = "".join(
                chr(MAPPED[ord(c)]) if ord(c) in MAPPED else c
                for c in text
                if ord(c) not in DELETED
            )
            if unicodedata.normalize("NFC", mapped) == mapped:
                out.append(mapped)
                return
            text = mapped

    for c in s:
        if 0x0600 <= ord(c) <= 0x06FF:
            run.append(c)
        else:
            if run:
                flush()
                run.clear()
            out.append(c)
    if run:
        flush()
    return "".join(out)


def hexs(s):
    return " ".join(f"{ord(c):04X}" for c in s)


def main():
    rng = random.Random(7)
    letters = "بتثجحخدذرزسشصضطظعغفقكلمنهوي"
    keep = ["ؤ", "ئ", "ء", "ة", "ـ", "a", "Z", "5", "١", " ", "،", "."]
    cases = []

    # every mapped codepoint: alone, word-initial, medial, final
    for cp in MAPPED:
        c = chr(cp)
        cases += [c, c + "خر", "س" + c + "ل", "مع" + c, c + c]
    # every deleted codepoint: alone, on a letter, stacked, on a mapped letter
    for cp in sorted(DELETED):
        d = chr(cp)
        cases += [d, "ك" + d + "تب", "ب" + d + d, "أ" + d, "ى" + d, "لا" + d + " x"]
    # decomposed hamza and madda forms
    for base in ["ا", "و", "ي"]:
        for mark in ["ٓ", "ٔ", "ٕ"]:
            cases += [base + mark, base + "َ" + mark, "ق" + base + mark + "ل"]
    # untouched codepoints
    cases += keep + ["سؤال", "مسائل", "مدرسة", "كـتـاب", "Hello, world.", "", "  ", "١٢٣ 456"]
    # random mixtures
    pool = list(letters) + [chr(c) for c in MAPPED] + [chr(c) for c in DELETED] + keep
    while len(cases) < 200:
        n = rng.randint(1, 12)
        cases.append("".join(rng.choice(pool) for _ in range(n)))

    here = os.path.dirname(os.path.abspath(__file__))
    with open(os.path.join(here, "normalization_golden.tsv"), "w", encoding="ascii") as f:
        for case in cases[:200]:
            f.write(f"{hexs(case)}\t{hexs(normalize(case))}\n")


if __name__ == "__main__":
    main()
