"""Decision procedures: exact tableaux for K, K4, S4 and GL, bounded
countermodel search for the interpretability logic, and representative
sets for the locally tabular fragments.

Every non-theorem verdict carries a countermodel that has been re-checked
by the matching evaluator before it is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from provmod import formulas as fm
from provmod.formulas import (
    BOX,
    FALSUM,
    RHD,
    Atom,
    Bot,
    Box,
    Formula,
    Imp,
    atom,
    box,
    boxes,
    conj,
    diamond,
    disj,
    imp,
    liff,
    neg,
)
from provmod.kripke import (
    KripkeModel,
    VeltmanModel,
    check_frame,
    forces,
    veltman_forces,
    veltman_forces_alt,
)

THEOREM = "theorem"
NON_THEOREM = "non_theorem"
NO_COUNTERMODEL_UP_TO_BOUND = "non_theorem_up_to_bound_unknown"

K_LOGIC = "k"
K4_LOGIC = "k4"
S4_LOGIC = "s4"
GL_LOGIC = "gl"
ILM_LOGIC = "ilm"


class DecisionError(ValueError):
    pass


class EnvelopeError(DecisionError):
    """Requested parameters fall outside the supported envelope."""


@dataclass(frozen=True)
class DecisionVerdict:
    status: str
    countermodel: object | None = None
    world: object | None = None
    bound: int | None = None

    @property
    def is_theorem(self) -> bool:
        return self.status == THEOREM


# ---------------------------------------------------------------------------
# tableau satisfiability for the box language
#
# Branches are saturated down to literals over atoms and boxes; each
# negative box then demands a successor world.  What the successor has to
# carry depends on the logic:
#   k   content of the positive boxes
#   k4  contents and the boxes themselves
#   s4  the boxes (contents reappear through reflexivity)
#   gl  contents, boxes, and the refuted box itself as a new positive box
# k terminates by modal depth, gl because positive boxes grow strictly,
# k4/s4 by an equal-demand loop check (a repeat is satisfiable by bending
# the edge back, which the transitive frame permits).


@dataclass
class _Node:
    demand: frozenset
    literals: dict
    children: list = field(default_factory=list)  # (_Node | frozenset loop demand)


def _saturate(demand, logic: str):
    """Open saturated branches of a signed-formula set, as literal maps."""
    out: list[dict] = []

    def expand(pending: list, literals: dict):
        while pending:
            f, sign = pending.pop()
            if isinstance(f, Bot):
                if sign:
                    return
                continue
            if isinstance(f, Imp):
                if sign:
                    expand(pending + [(f.left, False)], dict(literals))
                    expand(pending + [(f.right, True)], dict(literals))
                    return
                pending.append((f.left, True))
                pending.append((f.right, False))
                continue
            got = literals.get(f)
            if got is None:
                literals[f] = sign
                if sign and logic == S4_LOGIC and isinstance(f, Box):
                    pending.append((f.sub, True))
            elif got != sign:
                return
        out.append(literals)

    expand(list(demand), {})
    return out


def _successor_demand(logic: str, beta: Formula, pos_boxes: list) -> frozenset:
    demand = {(beta, False)}
    for b in pos_boxes:
        if logic == K_LOGIC:
            demand.add((b.sub, True))
        elif logic == S4_LOGIC:
            demand.add((b, True))
        else:  # k4, gl
            demand.add((b.sub, True))
            demand.add((b, True))
    if logic == GL_LOGIC:
        demand.add((box(beta), True))
    return frozenset(demand)


def _search(logic: str, demand: frozenset, history: tuple) -> _Node | None:
    for literals in _saturate(demand, logic):
        pos = sorted((f for f, s in literals.items()
                      if s and isinstance(f, Box)), key=fm.sort_key)
        negs = sorted((f for f, s in literals.items()
                       if not s and isinstance(f, Box)), key=fm.sort_key)
        node = _Node(demand=demand, literals=literals)
        ok = True
        for nb in negs:
            child_demand = _successor_demand(logic, nb.sub, pos)
            if logic in (K4_LOGIC, S4_LOGIC) and child_demand in history:
                node.children.append(child_demand)
                continue
            child = _search(logic, child_demand, history + (child_demand,))
            if child is None:
                ok = False
                break
            node.children.append(child)
        if ok:
            return node
    return None


def _materialize(logic: str, root: _Node):
    worlds: list[str] = []
    valuation: list[tuple[str, str]] = []
    raw_edges: list[tuple[str, str]] = []

    def build(node: _Node, ancestors: dict) -> str:
        wid = f"w{len(worlds)}"
        worlds.append(wid)
        anc = dict(ancestors)
        anc[node.demand] = wid
        for f, s in node.literals.items():
            if s and isinstance(f, Atom):
                valuation.append((wid, f.name))
        for child in node.children:
            if isinstance(child, frozenset):
                raw_edges.append((wid, anc[child]))
            else:
                raw_edges.append((wid, build(child, anc)))
        return wid

    root_id = build(root, {})
    edges = set(raw_edges)
    if logic in (K4_LOGIC, S4_LOGIC, GL_LOGIC):
        changed = True
        while changed:
            changed = False
            for (a, b) in list(edges):
                for (c, d) in list(edges):
                    if b == c and (a, d) not in edges:
                        edges.add((a, d))
                        changed = True
    if logic == S4_LOGIC:
        edges |= {(w, w) for w in worlds}
    return KripkeModel(worlds, edges, valuation), root_id


_FRAME_REQUIREMENTS = {
    K_LOGIC: (),
    K4_LOGIC: ("transitive",),
    S4_LOGIC: ("transitive", "reflexive"),
    GL_LOGIC: ("transitive", "irreflexive", "converse_well_founded"),
}


def _decide_box_logic(logic: str, f: Formula) -> DecisionVerdict:
    if f.lang not in (None, BOX):
        raise DecisionError(f"{logic} decides box-language formulas only")
    root = _search(logic, frozenset({(f, False)}), ())
    if root is None:
        return DecisionVerdict(status=THEOREM)
    model, world = _materialize(logic, root)
    report = check_frame(model)
    for prop in _FRAME_REQUIREMENTS[logic]:
        if not getattr(report, prop):
            raise DecisionError(
                f"internal error: countermodel violates {prop} for {logic}")
    if forces(model, world, f):
        raise DecisionError("internal error: countermodel failed verification")
    return DecisionVerdict(status=NON_THEOREM, countermodel=model, world=world)


def decide_k(f: Formula) -> DecisionVerdict:
    return _decide_box_logic(K_LOGIC, f)


def decide_k4(f: Formula) -> DecisionVerdict:
    return _decide_box_logic(K4_LOGIC, f)


def decide_s4(f: Formula) -> DecisionVerdict:
    return _decide_box_logic(S4_LOGIC, f)


def decide_gl(f: Formula) -> DecisionVerdict:
    return _decide_box_logic(GL_LOGIC, f)


_DECIDERS = {
    K_LOGIC: decide_k,
    K4_LOGIC: decide_k4,
    S4_LOGIC: decide_s4,
    GL_LOGIC: decide_gl,
}


def decide(logic: str, f: Formula, bound: int = 3) -> DecisionVerdict:
    if logic in _DECIDERS:
        return _DECIDERS[logic](f)
    if logic == ILM_LOGIC:
        return decide_ilm(f, bound)
    raise DecisionError(f"unknown logic {logic!r}")


def gl_consequence(gamma, f: Formula) -> bool:
    """Consequence from a finite premise set, by classical deduction."""
    premises = conj(sorted(gamma, key=fm.sort_key))
    return decide_gl(imp(premises, f)).is_theorem


@dataclass(frozen=True)
class FinfalsReport:
    """How theoremhood interacts with the bounded-falsum prefixes."""

    base: DecisionVerdict
    per_k: tuple[bool, ...]          # per_k[k-1]: box^k bot -> f is a theorem
    agrees: bool
    least_failing_k: int | None

    @property
    def ok(self) -> bool:
        if self.base.is_theorem:
            return self.agrees
        return self.least_failing_k is not None

    def __bool__(self) -> bool:
        return self.ok


def finfals_check(f: Formula, kmax: int, decider=decide_gl,
                  lang: str = BOX) -> FinfalsReport:
    if kmax < 1:
        raise DecisionError("kmax must be at least 1")
    base = decider(f)
    per_k = []
    least = None
    for k in range(1, kmax + 1):
        verdict = decider(imp(boxes(FALSUM, k, lang), f))
        per_k.append(verdict.is_theorem)
        if not verdict.is_theorem and least is None:
            least = k
    agrees = all(per_k) if base.is_theorem else True
    return FinfalsReport(base=base, per_k=tuple(per_k), agrees=agrees,
                         least_failing_k=least)


# ---------------------------------------------------------------------------
# brute-force oracle: exhaustive search over irreflexive transitive trees

def _rooted_tree_shapes(n: int):
    """Parent vectors of rooted trees on n nodes, one per isomorphism class."""
    def ahu(children, v):
        return "(" + "".join(sorted(ahu(children, c) for c in children[v])) + ")"

    seen = set()
    for parents in itertools.product(*(range(i) for i in range(1, n))):
        children = {i: [] for i in range(n)}
        for i, par in enumerate(parents, start=1):
            children[par].append(i)
        code = ahu(children, 0)
        if code in seen:
            continue
        seen.add(code)
        yield parents


def gl_tree_models(max_nodes: int, atom_names):
    """All irreflexive transitive tree models (transitively closed rooted
    trees) with every valuation over the given atoms, up to iso of shapes."""
    atom_names = sorted(atom_names)
    for n in range(1, max_nodes + 1):
        for parents in _rooted_tree_shapes(n):
            worlds = [f"t{i}" for i in range(n)]
            edges = set()
            ancestors = {0: []}
            for i, par in enumerate(parents, start=1):
                ancestors[i] = ancestors[par] + [par]
                for a in ancestors[i]:
                    edges.add((f"t{a}", f"t{i}"))
            cells = [(w, a) for w in worlds for a in atom_names]
            for bits in itertools.product((False, True), repeat=len(cells)):
                valuation = [cell for cell, b in zip(cells, bits) if b]
                yield KripkeModel(worlds, edges, valuation)


def gl_valid_brute(f: Formula, max_nodes: int = 4):
    """Exhaustive root-evaluation over small tree models.  Returns None when
    no refutation exists within the bound, else (model, world)."""
    for model in gl_tree_models(max_nodes, fm.atoms(f)):
        if not forces(model, "t0", f):
            return model, "t0"
    return None


# ---------------------------------------------------------------------------
# bounded countermodel search for the interpretability logic

def _strict_posets(n: int):
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for bits in itertools.product((False, True), repeat=len(pairs)):
        rel = {p for p, b in zip(pairs, bits) if b}
        if any((a, b) in rel and (b, a) in rel for (a, b) in rel):
            continue
        if any((a, b) in rel and (b, c) in rel and (a, c) not in rel
               for (a, b) in rel for (b2, c) in rel if b == b2):
            continue
        yield rel


def _preorder_options(rel: set, n: int, w: int):
    succ = sorted(j for j in range(n) if (w, j) in rel)
    base = {(u, u) for u in succ}
    base |= {(u, v) for u in succ for v in succ if (u, v) in rel}
    extras = [(u, v) for u in succ for v in succ
              if u != v and (u, v) not in base]
    for bits in itertools.product((False, True), repeat=len(extras)):
        cand = base | {e for e, b in zip(extras, bits) if b}
        if any((a, b) in cand and (b, c) in cand and (a, c) not in cand
               for (a, b) in cand for (b2, c) in cand if b == b2):
            continue
        # below a world, all of its successors must stay reachable
        if any((v, z) in rel and (u, z) not in rel
               for (u, v) in cand for z in range(n) if (v, z) in rel):
            continue
        yield frozenset(cand)


def _model_height(n: int, rel: set) -> int:
    depth = {}

    def d(i):
        if i not in depth:
            succ = [j for j in range(n) if (i, j) in rel]
            depth[i] = 0 if not succ else 1 + max(d(j) for j in succ)
        return depth[i]

    return max((d(i) for i in range(n)), default=0)


def enumerate_veltman_models(n: int, atom_names, max_height: int | None = None):
    """All valid Veltman models on n worlds over the given atoms, pruned to
    one representative per isomorphism class."""
    atom_names = sorted(atom_names)
    worlds = [f"v{i}" for i in range(n)]
    perms = list(itertools.permutations(range(n)))
    seen = set()
    for rel in _strict_posets(n):
        if max_height is not None and _model_height(n, rel) >= max_height:
            continue
        options = [list(_preorder_options(rel, n, w)) for w in range(n)]
        for combo in itertools.product(*options):
            cells = [(i, a) for i in range(n) for a in atom_names]
            for bits in itertools.product((False, True), repeat=len(cells)):
                val = {cell for cell, b in zip(cells, bits) if b}
                code = min(
                    (
                        tuple(sorted((pi[a], pi[b]) for (a, b) in rel)),
                        tuple(sorted(
                            (pi[w], tuple(sorted((pi[x], pi[y])
                                                 for (x, y) in combo[w])))
                            for w in range(n))),
                        tuple(sorted((pi[i], a) for (i, a) in val)),
                    )
                    for pi in perms
                )
                if code in seen:
                    continue
                seen.add(code)
                yield VeltmanModel(
                    worlds,
                    [(worlds[a], worlds[b]) for (a, b) in rel],
                    {worlds[w]: [(worlds[x], worlds[y]) for (x, y) in combo[w]]
                     for w in range(n)},
                    [(worlds[i], a) for (i, a) in val],
                )


def decide_ilm(f: Formula, size_bound: int = 3,
               max_height: int | None = None) -> DecisionVerdict:
    """Bounded countermodel search.  A found countermodel is exact; absence
    of one up to the bound is reported as such, never promoted here."""
    if f.lang not in (None, RHD):
        raise DecisionError("ilm decides rhd-language formulas only")
    if size_bound < 1:
        raise DecisionError("size bound must be at least 1")
    names = fm.atoms(f)
    for n in range(1, size_bound + 1):
        for model in enumerate_veltman_models(n, names, max_height=max_height):
            for w in sorted(model.worlds, key=str):
                if not veltman_forces(model, w, f):
                    if veltman_forces_alt(model, w, f):
                        raise DecisionError(
                            "internal error: countermodel failed verification")
                    return DecisionVerdict(status=NON_THEOREM,
                                           countermodel=model, world=w,
                                           bound=size_bound)
    return DecisionVerdict(status=NO_COUNTERMODEL_UP_TO_BOUND,
                           bound=size_bound)


# ---------------------------------------------------------------------------
# representative sets for the bounded-height fragments

@dataclass(frozen=True)
class TreeType:
    """Bounded-height world type: a valuation plus the set of types of the
    strict successors (indices into the owning set's type list)."""

    valuation: frozenset
    succs: frozenset


@dataclass(frozen=True)
class RepresentativeSet:
    logic: str
    n: int
    atoms: tuple[str, ...]
    members: tuple[Formula, ...]
    classes: tuple[frozenset, ...]
    types: tuple[TreeType, ...]
    characteristic: tuple[Formula, ...]
    models: tuple

    def equivalent_member(self, f: Formula) -> Formula:
        """The member whose class is the set of types satisfying f."""
        mask = frozenset(
            i for i, model in enumerate(self.models)
            if self._holds(i, f)
        )
        return self.members[self.classes.index(mask)]

    def _holds(self, i, f) -> bool:
        model = self.models[i]
        if self.logic == GL_LOGIC:
            return forces(model, f"t{i}", f)
        return veltman_forces(model, "v0", f)


_CLASS_CAP = 4096


def _gl_types(n: int, atom_names: tuple[str, ...]) -> list[TreeType]:
    vals = [frozenset(c) for k in range(len(atom_names) + 1)
            for c in itertools.combinations(atom_names, k)]
    types: list[TreeType] = [TreeType(v, frozenset()) for v in vals]
    heights = [0] * len(types)
    for h in range(1, n):
        prev = len(types)
        candidates = range(prev)
        for val in vals:
            for k in range(1, prev + 1):
                for combo in itertools.combinations(candidates, k):
                    s = frozenset(combo)
                    if max(heights[i] for i in combo) != h - 1:
                        continue
                    if any(not types[i].succs <= s for i in combo):
                        continue
                    types.append(TreeType(val, s))
                    heights.append(h)
    return types


def _gl_char_formulas(types, atom_names):
    chars: list[Formula] = []
    for t in types:
        lits = [atom(a) if a in t.valuation else neg(atom(a))
                for a in atom_names]
        succ = sorted(t.succs)
        parts = lits + [diamond(chars[i]) for i in succ]
        parts.append(box(disj([chars[i] for i in succ])))
        chars.append(conj(parts))
    return chars


def _gl_type_model(types, i) -> KripkeModel:
    member = sorted(types[i].succs | {i})
    worlds = [f"t{j}" for j in member]
    edges = [(f"t{j}", f"t{k}") for j in member for k in types[j].succs]
    valuation = [(f"t{j}", a) for j in member for a in types[j].valuation]
    return KripkeModel(worlds, edges, valuation)


def representatives_gl(n: int, atom_names) -> RepresentativeSet:
    """One member per equivalence class of the height-bounded fragment,
    built as disjunctions of tree-type characteristic formulas."""
    atom_names = tuple(sorted(atom_names))
    if n > 2 or len(atom_names) > 2:
        raise EnvelopeError("representatives are supported for n <= 2 and "
                            "at most 2 atoms")
    if n == 0:
        return RepresentativeSet(GL_LOGIC, 0, atom_names, (FALSUM,),
                                 (frozenset(),), (), (), ())
    types = _gl_types(n, atom_names)
    if 1 << len(types) > _CLASS_CAP:
        raise EnvelopeError(f"{len(types)} types give more than "
                            f"{_CLASS_CAP} classes")
    chars = _gl_char_formulas(types, atom_names)
    models = tuple(_gl_type_model(types, i) for i in range(len(types)))
    members = []
    classes = []
    for mask in range(1 << len(types)):
        cls = frozenset(i for i in range(len(types)) if mask >> i & 1)
        classes.append(cls)
        members.append(disj([chars[i] for i in sorted(cls)]))
    return RepresentativeSet(GL_LOGIC, n, atom_names, tuple(members),
                             tuple(classes), tuple(types), tuple(chars),
                             models)


def representatives_ilm(n: int, atom_names) -> RepresentativeSet:
    atom_names = tuple(sorted(atom_names))
    if n > 1 or len(atom_names) > 1:
        raise EnvelopeError("ilm representatives are supported for n <= 1 "
                            "and at most 1 atom")
    if n == 0:
        return RepresentativeSet(ILM_LOGIC, 0, atom_names, (FALSUM,),
                                 (frozenset(),), (), (), ())
    vals = [frozenset(c) for k in range(len(atom_names) + 1)
            for c in itertools.combinations(atom_names, k)]
    types = tuple(TreeType(v, frozenset()) for v in vals)
    chars = [conj([atom(a) if a in t.valuation else neg(atom(a))
                   for a in atom_names]) for t in types]
    models = tuple(VeltmanModel(["v0"], [], {},
                                [("v0", a) for a in t.valuation])
                   for t in types)
    members = []
    classes = []
    for mask in range(1 << len(types)):
        cls = frozenset(i for i in range(len(types)) if mask >> i & 1)
        classes.append(cls)
        members.append(disj([chars[i] for i in sorted(cls)]))
    return RepresentativeSet(ILM_LOGIC, n, atom_names, tuple(members),
                             tuple(classes), types, tuple(chars), models)


def certify_pairwise(rep: RepresentativeSet, pairs=None, bound: int = 2) -> bool:
    """Check that distinct members are non-equivalent in the target logic,
    through the decision procedure itself."""
    idx = range(len(rep.members))
    pairs = pairs if pairs is not None else itertools.combinations(idx, 2)
    for i, j in pairs:
        target = imp(boxes(FALSUM, rep.n, BOX if rep.logic == GL_LOGIC else RHD),
                     liff(rep.members[i], rep.members[j]))
        if rep.logic == GL_LOGIC:
            verdict = decide_gl(target)
            if verdict.is_theorem:
                return False
        else:
            verdict = decide_ilm(target, size_bound=max(bound, 1))
            if verdict.status != NON_THEOREM:
                return False
    return True
