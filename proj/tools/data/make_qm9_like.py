#!/usr/bin/env python3
# Copyright 2026 The CGVAE Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds the bundled QM9-like dataset from ZINC-derived MOSES molecules.

Each output molecule is a connected, kekulized fragment of a MOSES training
molecule with at most 9 heavy atoms drawn from {C, N, O, F}. Ring systems are
preferentially copied whole. Fragments are stratified by their smallest ring,
giving 3- and 4-membered rings at a QM9-like rate.

Needs RDKit and the MOSES training file (moses/dataset/data/train.csv.gz from
the `molsets` wheel). Preprocessing only: the C++ code never links RDKit.

    python3 make_qm9_like.py --moses train.csv.gz --out qm9_like_5k.smi \
        --toy-out toy_200.smi
"""

import argparse
import csv
import gzip
import random

from rdkit import Chem, RDLogger

RDLogger.DisableLog("rdApp.*")

ALLOWED = {"C", "N", "O", "F"}
SIZE_WEIGHTS = {9: 0.50, 8: 0.20, 7: 0.12, 6: 0.08, 5: 0.05, 4: 0.03, 3: 0.02}
# fraction of the dataset per smallest-ring category (0 = acyclic)
QUOTAS = {3: 0.20, 4: 0.15, 5: 0.25, 6: 0.25, 0: 0.15}


def usable(atom):
    return atom.GetSymbol() in ALLOWED and atom.GetFormalCharge() == 0


def grow_fragment(mol, rings, seed, target, rng):
    chosen = [seed]
    chosen_set = {seed}
    frontier = [seed]
    while frontier and len(chosen) < target:
        idx = frontier.pop(0)
        nbrs = [n.GetIdx() for n in mol.GetAtomWithIdx(idx).GetNeighbors()]
        rng.shuffle(nbrs)
        for n in nbrs:
            if len(chosen) >= target:
                break
            if n in chosen_set or not usable(mol.GetAtomWithIdx(n)):
                continue
            member = [r for r in rings if n in r and all(usable(mol.GetAtomWithIdx(a)) for a in r)]
            added = [n]
            if member and rng.random() < 0.85:
                ring = min(member, key=len)
                missing = [a for a in ring if a not in chosen_set]
                if len(chosen) + len(missing) <= target:
                    added = missing
            for a in added:
                if a not in chosen_set:
                    chosen.append(a)
                    chosen_set.add(a)
                    frontier.append(a)
    return chosen


def fragment_smiles(mol, atoms):
    index = {a: i for i, a in enumerate(atoms)}
    frag = Chem.RWMol()
    for a in atoms:
        frag.AddAtom(Chem.Atom(mol.GetAtomWithIdx(a).GetSymbol()))
    for bond in mol.GetBonds():
        u, v = bond.GetBeginAtomIdx(), bond.GetEndAtomIdx()
        if u in index and v in index:
            order = int(bond.GetBondTypeAsDouble())
            if order not in (1, 2, 3):
                return None
            frag.AddBond(index[u], index[v], {1: Chem.BondType.SINGLE,
                                              2: Chem.BondType.DOUBLE,
                                              3: Chem.BondType.TRIPLE}[order])
    m = frag.GetMol()
    try:
        Chem.SanitizeMol(m, Chem.SANITIZE_ALL ^ Chem.SANITIZE_SETAROMATICITY)
    except Exception:
        return None
    smi = Chem.MolToSmiles(m, kekuleSmiles=True, isomericSmiles=False)
    if any(ch.islower() for ch in smi if ch.isalpha()) or "[" in smi or "." in smi:
        return None
    return smi, m


def smallest_ring(m):
    sizes = [len(r) for r in m.GetRingInfo().AtomRings()]
    if not sizes:
        return 0
    if max(sizes) > 6:
        return None
    return min(sizes)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--moses", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--toy-out")
    ap.add_argument("--count", type=int, default=5000)
    ap.add_argument("--toy-count", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20181004)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    with gzip.open(args.moses, "rt") as fh:
        parents = [row["SMILES"] for row in csv.DictReader(fh)]
    rng.shuffle(parents)

    sizes, weights = zip(*SIZE_WEIGHTS.items())
    quota = {k: round(v * args.count) for k, v in QUOTAS.items()}
    seen, picked = set(), []
    for parent in parents:
        if all(q == 0 for q in quota.values()):
            break
        mol = Chem.MolFromSmiles(parent)
        if mol is None:
            continue
        Chem.Kekulize(mol, clearAromaticFlags=True)
        rings = [set(r) for r in mol.GetRingInfo().AtomRings()]
        seeds = [a.GetIdx() for a in mol.GetAtoms() if usable(a)]
        small = [a for r in rings if len(r) in (3, 4) and quota[len(r)] > 0 for a in r]
        for _ in range(3):
            pool = small if small and rng.random() < 0.9 else seeds
            if not pool:
                break
            target = rng.choices(sizes, weights)[0]
            atoms = grow_fragment(mol, rings, rng.choice(pool), target, rng)
            result = fragment_smiles(mol, atoms)
            if result is None:
                continue
            smi, frag = result
            category = smallest_ring(frag)
            if category is None or quota[category] == 0 or smi in seen:
                continue
            seen.add(smi)
            quota[category] -= 1
            picked.append(smi)
            break

    rng.shuffle(picked)
    with open(args.out, "w") as fh:
        fh.write("\n".join(picked) + "\n")
    if args.toy_out:
        with open(args.toy_out, "w") as fh:
            fh.write("\n".join(picked[: args.toy_count]) + "\n")
    print(f"wrote {len(picked)} molecules; unfilled quotas {quota}")


if __name__ == "__main__":
    main()
