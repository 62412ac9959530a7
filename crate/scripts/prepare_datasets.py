#!/usr/bin/env python3
"""Rebuild the multi-class Keel benchmark files used by the acceptance suite.

Sources (PyPI wheels, fetched with `pip download --no-deps <name>`):
  keel-ds                : wine.dat (3 classes, headerless rows)
  imbalanced-databases   : UCI glass.data.txt, Keel ecoli*/new-thyroid* one-vs-rest files

Ecoli's eight classes are recovered by intersecting the Keel one-vs-rest
binarizations, which all share the same 336 rows. New-thyroid is only
distributed as the hyper-vs-rest binarization, so that file is copied as-is.

usage: prepare_datasets.py <keel_ds wheel> <imbalanced_databases wheel> <out dir>
"""
import itertools
import os
import sys
import zipfile
from collections import Counter, defaultdict

ECOLI_CLASSES = ["cp", "im", "imS", "imL", "imU", "om", "omL", "pp"]
ECOLI_EXPECTED = [143, 77, 2, 2, 35, 20, 5, 52]
ECOLI_ATTRS = ["Mcg", "Gvh", "Lip", "Chg", "Aac", "Alm1", "Alm2"]

WINE_ATTRS = ["Alcohol", "MalicAcid", "Ash", "AlcalinityOfAsh", "Magnesium",
              "TotalPhenols", "Flavanoids", "NonflavanoidsPhenols",
              "Proanthocyanins", "ColorIntensity", "Hue", "OD280_OD315", "Proline"]
GLASS_ATTRS = ["RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe"]


def keel_rows(text):
    rows, in_data = [], False
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.lower().startswith("@data"):
            in_data = True
            continue
        if line.startswith("@"):
            continue
        if in_data or "@" not in text:
            rows.append([c.strip() for c in line.split(",")])
    return rows


def strip_zeros(n):
    while n and n % 10 == 0:
        n //= 10
    return n


def row_key(row, scaled=False, drop_chg=False):
    """Canonical key shared by the plain and the x100-scaled Keel variants.

    The scaled files write 0.50 as 5.0 and may omit the Chg column, so keys
    are compared on the digit string with trailing zeros removed.
    """
    vals = [float(v) for v in row[:-1]]
    digits = [strip_zeros(round(v if scaled else v * 100)) for v in vals]
    if drop_chg and len(digits) == 7:
        digits.pop(3)
    return tuple(digits)


def binarization_groups(name):
    """Map a Keel ecoli file name to (positive class set, negative class set)."""
    stem = name.rsplit("/", 1)[-1][:-4]
    single = {"ecoli1": 1, "ecoli2": 7, "ecoli3": 4, "ecoli4": 5}
    if stem in single:
        pos = {single[stem]}
        return pos, set(range(8)) - pos
    left, right = stem[len("ecoli-"):].split("_vs_")
    a = {int(v) for v in left.split("-")}
    b = {int(v) for v in right.split("-")}
    return a, b


def rebuild_ecoli(idb):
    files = sorted(n for n in idb.namelist()
                   if "/ecoli" in n and n.endswith(".dat"))
    constraints = []
    base = None
    for n in files:
        text = idb.read(n).decode()
        rows = keel_rows(text)
        scaled = "@attribute a1" in text
        drop_chg = len(rows[0]) == 7
        a, b = binarization_groups(n)
        pos = sum(r[-1] == "positive" for r in rows)
        size_a = sum(ECOLI_EXPECTED[c] for c in a)
        # Keel labels the smaller side "positive"; orient by size.
        pos_set, neg_set = (a, b) if size_a == pos else (b, a)
        assert sum(ECOLI_EXPECTED[c] for c in pos_set) == pos, n
        per_key = defaultdict(lambda: [0, 0])
        for r in rows:
            per_key[row_key(r, scaled, drop_chg)][0 if r[-1] == "positive" else 1] += 1
        constraints.append((pos_set, neg_set, drop_chg, per_key))
        if n.endswith("/ecoli1.dat"):
            base = rows
    totals = Counter(tuple(r[:-1]) for r in base)
    solution = {}
    for raw, n in totals.items():
        row = list(raw) + ["?"]
        found = []
        for combo in itertools.combinations_with_replacement(range(8), n):
            counts = Counter(combo)
            ok = True
            for pos_set, neg_set, drop_chg, per_key in constraints:
                p, q = per_key.get(row_key(row, False, drop_chg), (0, 0))
                # projected keys may merge several raw rows; require consistency only
                if sum(counts[c] for c in pos_set) > p or sum(counts[c] for c in neg_set) > q:
                    ok = False
                    break
            if ok:
                found.append(combo)
        assert len(found) == 1, (raw, found)
        solution[raw] = list(found[0])
    out = []
    for r in base:
        out.append(r[:-1] + [ECOLI_CLASSES[solution[tuple(r[:-1])].pop(0)]])
    got = Counter(r[-1] for r in out)
    assert [got[c] for c in ECOLI_CLASSES] == ECOLI_EXPECTED, got
    return out


def emit(path, relation, attrs, classes, rows):
    with open(path, "w") as f:
        f.write("@relation %s\n" % relation)
        for a in attrs:
            f.write("@attribute %s real\n" % a)
        f.write("@attribute Class {%s}\n" % ", ".join(classes))
        f.write("@inputs %s\n@outputs Class\n@data\n" % ", ".join(attrs))
        for r in rows:
            f.write(", ".join(r) + "\n")


def main():
    keel_ds, idb_path, out = sys.argv[1:4]
    os.makedirs(out, exist_ok=True)
    kd = zipfile.ZipFile(keel_ds)
    idb = zipfile.ZipFile(idb_path)

    wine = keel_rows(kd.read("keel_ds/data/balanced/raw/wine.dat").decode())
    assert len(wine) == 178
    emit(os.path.join(out, "wine.dat"), "wine", WINE_ATTRS, ["1", "2", "3"], wine)

    glass_txt = idb.read("imbalanced_databases/data/glass/glass.data.txt").decode()
    glass = [line.split(",")[1:] for line in glass_txt.split() if line.strip()]
    assert len(glass) == 214
    emit(os.path.join(out, "glass.dat"), "glass", GLASS_ATTRS,
         ["1", "2", "3", "5", "6", "7"], glass)

    emit(os.path.join(out, "ecoli.dat"), "ecoli", ECOLI_ATTRS, ECOLI_CLASSES,
         rebuild_ecoli(idb))

    thyroid = idb.read("imbalanced_databases/data/new_thyroid1/new-thyroid1.dat").decode()
    with open(os.path.join(out, "new-thyroid1.dat"), "w") as f:
        f.write(thyroid)


if __name__ == "__main__":
    main()
