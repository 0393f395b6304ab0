"""Regenerates the bundled sample corpus and toy test set.

    python3 generate.py

Output is deterministic (fixed seed). Files:
    sample.ar, sample.en      1000 line-aligned pairs; a few long lines
    toy/src.txt               50 source lines
    toy/hyp.a, toy/hyp.b      two system outputs
    toy/ref.0 .. toy/ref.3    four references
"""

import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))
rng = random.Random(20060604)

# (arabic stem, english gloss); some carry diacritics or hamzated alif
NOUNS = [
    ("كِتَاب", "book"), ("مدرسة", "school"), ("بيت", "house"), ("سوق", "market"),
    ("قلم", "pen"), ("مدينة", "city"), ("حكومة", "government"), ("رئيس", "president"),
    ("أرض", "land"), ("إعلان", "announcement"), ("آثار", "effects"), ("مستشفى", "hospital"),
    ("سؤال", "question"), ("مسائل", "issues"), ("وزير", "minister"), ("شركة", "company"),
    ("اقتصاد", "economy"), ("مجلس", "council"), ("تقرير", "report"), ("طالب", "student"),
    ("مُعَلِّم", "teacher"), ("جامعة", "university"), ("أخبار", "news"), ("سيارة", "car"),
]
VERBS = [
    ("قَالَ", "said"), ("ذهب", "went"), ("كتب", "wrote"), ("أعلن", "announced"),
    ("زار", "visited"), ("درس", "studied"), ("اشترى", "bought"), ("رأى", "saw"),
]
PROCLITICS = [("", ""), ("و", "and "), ("ف", "so "), ("ب", "with "), ("ل", "for "), ("ك", "like ")]
ENCLITICS = [("", ""), ("ه", " his"), ("ها", " her"), ("هم", " their"), ("نا", " our"), ("ي", " my")]
PREPS = [("إلى", "to"), ("في", "in"), ("على", "on"), ("من", "from"), ("حتى", "until")]
PUNCT = ["،", ".", "؟", "!", ":"]


def noun_phrase():
    stem, gloss = rng.choice(NOUNS)
    pro, pro_en = rng.choice(PROCLITICS)
    if rng.random() < 0.4:
        return pro + "ال" + stem, f"{pro_en}the {gloss}"
    enc, enc_en = rng.choice(ENCLITICS)
    if enc:
        return pro + stem + enc, f"{pro_en}{enc_en.strip()} {gloss}"
    return pro + stem, f"{pro_en}a {gloss}"


def number():
    n = rng.randint(1, 2024)
    if rng.random() < 0.3:
        return "".join(chr(0x0660 + int(d)) for d in str(n)), str(n)
    return str(n), str(n)


def clause():
    verb, verb_en = rng.choice(VERBS)
    subj, subj_en = noun_phrase()
    prep, prep_en = rng.choice(PREPS)
    obj, obj_en = noun_phrase()
    ar = [verb, subj, prep, obj]
    en = [subj_en, verb_en, prep_en, obj_en]
    if rng.random() < 0.3:
        num, num_en = number()
        ar.append(num)
        en.append(num_en)
    return ar, en


def sentence(clauses):
    ar, en = [], []
    for i in range(clauses):
        a, e = clause()
        if i:
            ar.append("و" + a[0])
            ar.extend(a[1:])
            en.append("and")
        else:
            ar.extend(a)
        en.extend(e)
        if rng.random() < 0.3:
            ar[-1] += rng.choice(PUNCT[:1])
            en[-1] += ","
    ar[-1] += rng.choice(PUNCT[1:])
    en[-1] += "."
    en[0] = en[0][0].upper() + en[0][1:]
    return " ".join(ar), " ".join(en)


def write(path, lines):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for line in lines:
            f.write(line + "\n")


def main():
    long_lines = set(rng.sample(range(1000), 12))
    ar, en = [], []
    for i in range(1000):
        clauses = rng.randint(18, 24) if i in long_lines else rng.randint(1, 3)
        a, e = sentence(clauses)
        ar.append(a)
        en.append(e)
    write(os.path.join(HERE, "sample.ar"), ar)
    write(os.path.join(HERE, "sample.en"), en)

    src, hyp_a, hyp_b = [], [], []
    refs = [[], [], [], []]
    for _ in range(50):
        a, e = sentence(rng.randint(1, 2))
        src.append(a)
        words = e.lower().replace(",", " ,").replace(".", " .").split()
        for k in range(4):
            r = list(words)
            if k and len(r) > 3:
                j = rng.randrange(len(r) - 1)
                r[j], r[j + 1] = r[j + 1], r[j]
            refs[k].append(" ".join(r))
        # A: close paraphrase; B: drops words more aggressively
        ha = [w for w in words if rng.random() > 0.1]
        hb = [w for w in words if rng.random() > 0.3]
        hyp_a.append(" ".join(ha or words[:1]))
        hyp_b.append(" ".join(hb or words[:1]))
    toy = os.path.join(HERE, "toy")
    write(os.path.join(toy, "src.txt"), src)
    write(os.path.join(toy, "hyp.a"), hyp_a)
    write(os.path.join(toy, "hyp.b"), hyp_b)
    for k in range(4):
        write(os.path.join(toy, f"ref.{k}"), refs[k])


if __name__ == "__main__":
    main()
