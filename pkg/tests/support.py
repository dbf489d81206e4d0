"""Shared helpers for the acceptance suite: seeded formula generators,
exhaustive model enumerations with isomorphism pruning, and a vectorized
dual evaluator for the lift-equivalence sweep."""

from __future__ import annotations

import itertools

import numpy as np

from provmod import formulas as fm
from provmod.formulas import (
    BOX,
    FALSUM,
    Atom,
    Bot,
    Box,
    Imp,
    box,
    diamond,
    imp,
    land,
    lor,
    neg,
    rhd,
    top,
)
from provmod.kripke import KripkeModel


def random_formula(rng, lang, depth, atom_pool):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(atom_pool + [FALSUM, top()])
    kind = rng.choice(["imp", "imp", "neg", "and", "or", "modal", "modal"])
    sub = lambda: random_formula(rng, lang, depth - 1, atom_pool)
    if kind == "imp":
        return imp(sub(), sub())
    if kind == "neg":
        return neg(sub())
    if kind == "and":
        return land(sub(), sub())
    if kind == "or":
        return lor(sub(), sub())
    if lang == BOX:
        return rng.choice([box, diamond])(sub())
    return rhd(sub(), sub())


def random_purely_modal(rng, depth, atom_pool):
    """Boolean combination of boxed formulas."""
    if depth == 0 or rng.random() < 0.4:
        return box(random_formula(rng, BOX, 1, atom_pool))
    kind = rng.choice(["imp", "neg", "and", "or"])
    sub = lambda: random_purely_modal(rng, depth - 1, atom_pool)
    if kind == "imp":
        return imp(sub(), sub())
    if kind == "neg":
        return neg(sub())
    if kind == "and":
        return land(sub(), sub())
    return lor(sub(), sub())


# ---------------------------------------------------------------------------
# exhaustive pointed-model enumeration for the lift sweep (one atom)

def canonical_model_codes(n: int) -> np.ndarray:
    """Codes of all (frame, valuation) pairs on n worlds over one atom,
    one representative per isomorphism class.  Bit layout: n*n edge bits
    (row-major), then n valuation bits."""
    nbits = n * n + n
    codes = np.arange(1 << nbits, dtype=np.uint64)
    best = codes.copy()
    for pi in itertools.permutations(range(n)):
        if pi == tuple(range(n)):
            continue
        out = np.zeros_like(codes)
        for s in range(nbits):
            if s < n * n:
                i, j = divmod(s, n)
                t = pi[i] * n + pi[j]
            else:
                t = n * n + pi[s - n * n]
            out |= ((codes >> np.uint64(s)) & np.uint64(1)) << np.uint64(t)
        np.minimum(best, out, out=best)
    return codes[best == codes]


def decode_model(code: int, n: int, atom_name: str = "p") -> KripkeModel:
    worlds = [f"w{i}" for i in range(n)]
    edges = [(worlds[i], worlds[j]) for i in range(n) for j in range(n)
             if (code >> (i * n + j)) & 1]
    valuation = [(worlds[i], atom_name) for i in range(n)
                 if (code >> (n * n + i)) & 1]
    return KripkeModel(worlds, edges, valuation)


def compile_closure(formulas):
    """Index the subformula closure children-first.  Returns (ops, index)
    where ops[k] is ('atom',), ('bot',), ('imp', i, j) or ('box', i)."""
    ops = []
    index: dict = {}

    def walk(f):
        if f in index:
            return index[f]
        if isinstance(f, Atom):
            op = ("atom",)
        elif isinstance(f, Bot):
            op = ("bot",)
        elif isinstance(f, Imp):
            op = ("imp", walk(f.left), walk(f.right))
        elif isinstance(f, Box):
            op = ("box", walk(f.sub))
        else:
            raise AssertionError(f)
        index[f] = len(ops)
        ops.append(op)
        return index[f]

    for f in formulas:
        walk(f)
    return ops, index


def vector_lift_sweep(codes: np.ndarray, n: int, ops) -> np.ndarray:
    """For every coded model, compare plain Kripke truth against the two
    provability readings of the lifted theories (plain everywhere, dotted
    on the transitive frames), on every closure formula at every world.

    Returns a boolean array marking models where some comparison failed.
    """
    codes = codes.astype(np.uint64)
    full = np.uint64((1 << n) - 1)
    succmask = [((codes >> np.uint64(w * n)) & full) for w in range(n)]
    val = (codes >> np.uint64(n * n)) & full

    def eval_tables(derive_for):
        """derive_for(tables, sub_idx, box_idx) -> per-world derivability."""
        tables: list = []
        for op in ops:
            if op[0] == "atom":
                tables.append(val)
            elif op[0] == "bot":
                tables.append(np.zeros_like(codes))
            elif op[0] == "imp":
                tables.append((~tables[op[1]] | tables[op[2]]) & full)
            else:
                derives = derive_for(tables, op[1], len(tables))
                bits = np.zeros_like(codes)
                for w in range(n):
                    ok = (derives & succmask[w]) == succmask[w]
                    bits |= ok.astype(np.uint64) << np.uint64(w)
                tables.append(bits)
        return tables

    # ordinary Kripke truth: a box reads its own model's table
    kr_tables = eval_tables(lambda tables, sub, _b: tables[sub])

    def plain_derive(_tables, sub_idx, _box_idx):
        return kr_tables[sub_idx]

    def dotted_derive(_tables, sub_idx, box_idx):
        return kr_tables[sub_idx] & kr_tables[box_idx]

    plain_tables = eval_tables(plain_derive)
    dotted_tables = eval_tables(dotted_derive)

    # transitivity mask for the dotted comparison
    transitive = np.ones(len(codes), dtype=bool)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                e_ij = (codes >> np.uint64(i * n + j)) & np.uint64(1)
                e_jk = (codes >> np.uint64(j * n + k)) & np.uint64(1)
                e_ik = (codes >> np.uint64(i * n + k)) & np.uint64(1)
                transitive &= ((e_ij & e_jk) == 0) | (e_ik == 1)

    bad = np.zeros(len(codes), dtype=bool)
    for k_t, p_t, d_t in zip(kr_tables, plain_tables, dotted_tables):
        bad |= k_t != p_t
        bad |= transitive & (k_t != d_t)
    return bad


# ---------------------------------------------------------------------------
# bi-finite tree seeds with axiom labels, one per isomorphism class

def _forest_parent_vectors(n: int):
    return itertools.product(*([(-1,)] + [tuple(range(-1, i))
                                          for i in range(1, n)]))


def _canonical_forest(parents, labels) -> str:
    children: dict[int, list] = {i: [] for i in range(len(parents))}
    roots = []
    for i, par in enumerate(parents):
        if par == -1:
            roots.append(i)
        else:
            children[par].append(i)

    def encode(v):
        inner = "".join(sorted(encode(c) for c in children[v]))
        return f"({labels[v]}:{inner})"

    return "|".join(sorted(encode(r) for r in roots))


def tree_seeds(max_nodes: int, axiom_sets):
    """All labeled forests up to isomorphism: (parents, labels) where
    labels index into axiom_sets and root labels are fixed to 0."""
    seen = set()
    out = []
    for n in range(1, max_nodes + 1):
        for parents in _forest_parent_vectors(n):
            free = [i for i, par in enumerate(parents) if par != -1]
            for combo in itertools.product(range(len(axiom_sets)),
                                           repeat=len(free)):
                labels = [0] * n
                for i, lab in zip(free, combo):
                    labels[i] = lab
                code = _canonical_forest(parents, labels)
                if code in seen:
                    continue
                seen.add(code)
                out.append((parents, tuple(labels)))
    return out


def seed_premodel(parents, labels, axiom_sets, language=BOX):
    from provmod.provability import PreModel
    from provmod.theories import finite_axioms_mp

    n = len(parents)
    worlds = [f"s{i}" for i in range(n)]
    edges = [(worlds[par], worlds[i]) for i, par in enumerate(parents)
             if par != -1]
    theories = {worlds[i]: finite_axioms_mp(axiom_sets[labels[i]],
                                            language=language)
                for i, par in enumerate(parents) if par != -1}
    return PreModel(worlds, edges, [], theories, language)
