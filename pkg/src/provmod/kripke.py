"""Finite Kripke and Veltman models: forcing, frame analysis, unravelling.

Worlds are arbitrary hashable ids (strings in documents).  Models are
immutable after construction and evaluation is pure, so instances can be
shared freely between threads.
"""

from __future__ import annotations

from dataclasses import dataclass

from provmod import formulas as fm
from provmod.formulas import Atom, Bot, Box, BoxN, Formula, Imp, Rhd


class ModelError(ValueError):
    """Structurally invalid model or query."""


class VeltmanFrameError(ModelError):
    """A frame clause failed; args carry the witness."""

    def __init__(self, message: str, witness: tuple):
        super().__init__(f"{message}; witness {witness!r}")
        self.witness = witness


class OrderError(ModelError):
    """Order utilities applied outside their preconditions."""


def _world_key(w) -> str:
    return str(w)


class KripkeModel:
    """Finite frame with a valuation.  ``edges`` is the accessibility
    relation; ``valuation`` is a set of (world, atom-name) pairs."""

    def __init__(self, worlds, edges, valuation):
        self.worlds = frozenset(worlds)
        if not self.worlds:
            raise ModelError("a model needs at least one world")
        self.edges = frozenset((w, u) for (w, u) in edges)
        for w, u in self.edges:
            if w not in self.worlds or u not in self.worlds:
                raise ModelError(f"edge {(w, u)!r} leaves the world set")
        self.valuation = frozenset((w, a) for (w, a) in valuation)
        for w, a in self.valuation:
            if w not in self.worlds:
                raise ModelError(f"valuation entry {(w, a)!r} leaves the world set")
        self._succ = {w: tuple(sorted((u for (x, u) in self.edges if x == w),
                                      key=_world_key))
                      for w in self.worlds}
        self._true_atoms = {w: frozenset(a for (x, a) in self.valuation if x == w)
                            for w in self.worlds}
        self._descendants = None

    def successors(self, w):
        return self._succ[w]

    def predecessors(self, w):
        return tuple(sorted((x for (x, u) in self.edges if u == w), key=_world_key))

    def true_atoms(self, w):
        return self._true_atoms[w]

    def descendants(self, w):
        """Worlds reachable in one or more steps (strict)."""
        if self._descendants is None:
            desc = {}
            for start in self.worlds:
                seen = set()
                stack = list(self._succ[start])
                while stack:
                    u = stack.pop()
                    if u in seen:
                        continue
                    seen.add(u)
                    stack.extend(self._succ[u])
                desc[start] = frozenset(seen)
            self._descendants = desc
        return self._descendants[w]

    def accessible_worlds(self):
        """Worlds with at least one predecessor."""
        return frozenset(u for (_, u) in self.edges)

    def __eq__(self, other):
        return (isinstance(other, KripkeModel)
                and self.worlds == other.worlds
                and self.edges == other.edges
                and self.valuation == other.valuation)

    def __hash__(self):
        return hash((self.worlds, self.edges, self.valuation))

    def __repr__(self):
        return (f"KripkeModel({len(self.worlds)} worlds, "
                f"{len(self.edges)} edges)")


def forces(model: KripkeModel, world, f: Formula, _memo=None) -> bool:
    """Truth at a world; boxes quantify over one-step successors."""
    if world not in model.worlds:
        raise ModelError(f"unknown world {world!r}")
    if f.lang not in (None, fm.BOX):
        raise ModelError("Kripke forcing is defined for the box language")
    memo = {} if _memo is None else _memo

    def ev(w, g) -> bool:
        key = (w, g)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(g, Atom):
            val = g.name in model._true_atoms[w]
        elif isinstance(g, Bot):
            val = False
        elif isinstance(g, Imp):
            val = (not ev(w, g.left)) or ev(w, g.right)
        elif isinstance(g, Box):
            val = all(ev(u, g.sub) for u in model._succ[w])
        else:
            raise ModelError(f"cannot evaluate {g!r} on a Kripke model")
        memo[key] = val
        return val

    return ev(world, f)


def forces_all(model: KripkeModel, formulas, worlds=None) -> dict:
    """Evaluate many formulas with one shared memo table.
    Returns {(world, formula): bool}."""
    memo: dict = {}
    out = {}
    targets = model.worlds if worlds is None else worlds
    for f in formulas:
        for w in targets:
            out[(w, f)] = forces(model, w, f, _memo=memo)
    return out


def forces_plus(model: KripkeModel, world, f: Formula) -> bool:
    """Truth at all strict descendants of some predecessor of the world.
    False whenever the world has no predecessor."""
    if world not in model.worlds:
        raise ModelError(f"unknown world {world!r}")
    memo: dict = {}
    for u in model.predecessors(world):
        if all(forces(model, v, f, _memo=memo) for v in model.descendants(u)):
            return True
    return False


# ---------------------------------------------------------------------------
# frame analysis

@dataclass(frozen=True)
class PropertyCheck:
    holds: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class FrameReport:
    reflexive: PropertyCheck
    irreflexive: PropertyCheck
    transitive: PropertyCheck
    converse_well_founded: PropertyCheck
    tree: PropertyCheck


def _find_cycle(worlds, succ):
    color = {w: 0 for w in worlds}
    stack_path: list = []

    def dfs(w):
        color[w] = 1
        stack_path.append(w)
        for u in succ[w]:
            if color[u] == 1:
                i = stack_path.index(u)
                return tuple(stack_path[i:] + [u])
            if color[u] == 0:
                got = dfs(u)
                if got:
                    return got
        color[w] = 2
        stack_path.pop()
        return None

    for w in sorted(worlds, key=_world_key):
        if color[w] == 0:
            got = dfs(w)
            if got:
                return got
    return None


def check_frame(model) -> FrameReport:
    """Frame properties with witnesses.  In the finite case converse
    well-foundedness is exactly acyclicity."""
    worlds = sorted(model.worlds, key=_world_key)
    edges = model.edges
    succ = {w: [u for u in worlds if (w, u) in edges] for w in worlds}

    refl_w = next((w for w in worlds if (w, w) not in edges), None)
    irr_w = next((w for w in worlds if (w, w) in edges), None)

    trans_w = None
    for w in worlds:
        for u in succ[w]:
            for v in succ[u]:
                if (w, v) not in edges:
                    trans_w = (w, u, v)
                    break
            if trans_w:
                break
        if trans_w:
            break

    cycle = _find_cycle(worlds, succ)

    # strict reachability, for the comparability condition below
    desc = {}
    for start in worlds:
        seen = set()
        stack = list(succ[start])
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(succ[u])
        desc[start] = seen

    tree_w = None
    for v in worlds:
        preds = [w for w in worlds if (w, v) in edges]
        for i, w in enumerate(preds):
            for u in preds[i + 1:]:
                if w is u or u in desc[w] or w in desc[u]:
                    continue
                tree_w = (w, u, v)
                break
            if tree_w:
                break
        if tree_w:
            break

    return FrameReport(
        reflexive=PropertyCheck(refl_w is None,
                                None if refl_w is None else (refl_w,)),
        irreflexive=PropertyCheck(irr_w is None,
                                  None if irr_w is None else (irr_w,)),
        transitive=PropertyCheck(trans_w is None, trans_w),
        converse_well_founded=PropertyCheck(cycle is None, cycle),
        tree=PropertyCheck(tree_w is None, tree_w),
    )


# ---------------------------------------------------------------------------
# order utilities on converse well-founded frames

def immediate_predecessors(model, w) -> frozenset:
    """Predecessors u of w with nothing strictly between them."""
    preds = set()
    for u in model.worlds:
        if (u, w) not in model.edges:
            continue
        if any(w in model.descendants(v) for v in model.descendants(u)):
            continue
        preds.add(u)
    return frozenset(preds)


def pred(model, w):
    """The unique immediate predecessor on a tree frame."""
    report = check_frame(model)
    if not report.tree or not report.converse_well_founded:
        raise OrderError("pred is only defined on converse well-founded trees")
    preds = immediate_predecessors(model, w)
    if not preds:
        raise OrderError(f"{w!r} has no predecessor")
    if len(preds) != 1:
        raise OrderError(f"{w!r} has several immediate predecessors")
    return next(iter(preds))


def sim(model, w, u) -> bool:
    """Equal, or sharing an immediate predecessor."""
    if w == u:
        return True
    return bool(immediate_predecessors(model, w) & immediate_predecessors(model, u))


def hat_less(model, w, u) -> bool:
    """w is similar to some strict ancestor of u."""
    for v in model.worlds:
        if u in model.descendants(v) and sim(model, w, v):
            return True
    return False


# ---------------------------------------------------------------------------
# Veltman models

class VeltmanModel:
    """Frame with one preorder per world, over that world's successors.

    The frame clauses are checked eagerly and violations carry a witness.
    The accessibility relation must be converse well-founded (acyclic); the
    clauses themselves force it to be transitive.
    """

    def __init__(self, worlds, edges, preorders, valuation):
        base = KripkeModel(worlds, edges, valuation)
        self.worlds = base.worlds
        self.edges = base.edges
        self.valuation = base.valuation
        self._succ = base._succ
        self._true_atoms = base._true_atoms
        self._descendants = None
        self._base = base

        pre = {}
        for w in self.worlds:
            pairs = frozenset(tuple(p) for p in preorders.get(w, ()))
            succ = set(base._succ[w])
            for (u, v) in pairs:
                if u not in succ or v not in succ:
                    raise VeltmanFrameError(
                        f"preorder at {w!r} leaves the successor set", (w, u, v))
            for u in succ:
                if (u, u) not in pairs:
                    raise VeltmanFrameError(
                        f"preorder at {w!r} is not reflexive", (w, u))
            for (a, b) in pairs:
                for (c, d) in pairs:
                    if b == c and (a, d) not in pairs:
                        raise VeltmanFrameError(
                            f"preorder at {w!r} is not transitive", (w, a, b, d))
            pre[w] = pairs
        self.preorders = pre

        cycle = _find_cycle(self.worlds,
                            {w: list(base._succ[w]) for w in self.worlds})
        if cycle is not None:
            raise VeltmanFrameError("accessibility is not converse well-founded",
                                    cycle)

        for w in self.worlds:
            for u in base._succ[w]:
                for v in base._succ[u]:
                    if (u, v) not in pre.get(w, frozenset()):
                        raise VeltmanFrameError(
                            "two accessibility steps must land preorder-above",
                            (w, u, v))
        for w in self.worlds:
            for (u, v) in pre[w]:
                for z in base._succ[v]:
                    if (u, z) not in self.edges:
                        raise VeltmanFrameError(
                            "preorder-below a world must reach its successors",
                            (w, u, v, z))

    def successors(self, w):
        return self._succ[w]

    def descendants(self, w):
        return self._base.descendants(w)

    def accessible_worlds(self):
        return self._base.accessible_worlds()

    def true_atoms(self, w):
        return self._true_atoms[w]

    def above(self, w, v):
        """Worlds z with v preorder-below z at w."""
        return tuple(sorted((z for (x, z) in self.preorders[w] if x == v),
                            key=_world_key))

    def __eq__(self, other):
        return (isinstance(other, VeltmanModel)
                and self.worlds == other.worlds
                and self.edges == other.edges
                and self.preorders == other.preorders
                and self.valuation == other.valuation)

    def __hash__(self):
        return hash((self.worlds, self.edges,
                     tuple(sorted(((w, tuple(sorted(ps, key=str)))
                                   for w, ps in self.preorders.items()),
                                  key=str)),
                     self.valuation))

    def __repr__(self):
        return (f"VeltmanModel({len(self.worlds)} worlds, "
                f"{len(self.edges)} edges)")


def veltman_forces(model: VeltmanModel, world, f: Formula, _memo=None) -> bool:
    """Truth at a world.  A rhd B holds when every successor satisfying A
    has a preorder-successor satisfying B."""
    if world not in model.worlds:
        raise ModelError(f"unknown world {world!r}")
    if f.lang not in (None, fm.RHD):
        raise ModelError("Veltman forcing is defined for the rhd language")
    memo = {} if _memo is None else _memo

    def ev(w, g) -> bool:
        key = (w, g)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(g, Atom):
            val = g.name in model._true_atoms[w]
        elif isinstance(g, Bot):
            val = False
        elif isinstance(g, Imp):
            val = (not ev(w, g.left)) or ev(w, g.right)
        elif isinstance(g, Rhd):
            val = all((not ev(v, g.left))
                      or any(ev(z, g.right) for z in model.above(w, v))
                      for v in model._succ[w])
        else:
            raise ModelError(f"cannot evaluate {g!r} on a Veltman model")
        memo[key] = val
        return val

    return ev(world, f)


def veltman_forces_alt(model: VeltmanModel, world, f: Formula) -> bool:
    """Symmetric variant of the rhd clause; agrees with ``veltman_forces``
    on valid Veltman models."""
    if world not in model.worlds:
        raise ModelError(f"unknown world {world!r}")
    memo: dict = {}

    def ev(w, g) -> bool:
        key = (w, g)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(g, Atom):
            val = g.name in model._true_atoms[w]
        elif isinstance(g, Bot):
            val = False
        elif isinstance(g, Imp):
            val = (not ev(w, g.left)) or ev(w, g.right)
        elif isinstance(g, Rhd):
            val = True
            for v in model._succ[w]:
                up = model.above(w, v)
                if any(ev(z, g.left) for z in up) and \
                        not any(ev(z, g.right) for z in up):
                    val = False
                    break
        else:
            raise ModelError(f"cannot evaluate {g!r} on a Veltman model")
        memo[key] = val
        return val

    return ev(world, f)


# ---------------------------------------------------------------------------
# unravelling

class UnravelledVeltman:
    """Tree of strictly ascending paths through a Veltman model.

    Worlds are tuples of original worlds; the per-world preorders collapse
    into a single sibling preorder.  Not itself a Veltman model, but rhd
    evaluation is defined on it and matches the source model at path ends.
    """

    def __init__(self, source: VeltmanModel):
        worlds: list[tuple] = []
        stack = [(w,) for w in sorted(source.worlds, key=_world_key)]
        while stack:
            sigma = stack.pop()
            worlds.append(sigma)
            for u in source.successors(sigma[-1]):
                stack.append(sigma + (u,))
        self.source = source
        self.worlds = frozenset(worlds)
        self.edges = frozenset((sigma, sigma + (u,))
                               for sigma in self.worlds
                               for u in source.successors(sigma[-1]))
        pre = set()
        for eta in self.worlds:
            w = eta[-1]
            for (u, v) in source.preorders[w]:
                pre.add((eta + (u,), eta + (v,)))
        self.preorder = frozenset(pre)
        self.valuation = frozenset((sigma, a)
                                   for sigma in self.worlds
                                   for a in source.true_atoms(sigma[-1]))
        self._succ = {sigma: tuple(sorted((tau for (s, tau) in self.edges
                                           if s == sigma), key=str))
                      for sigma in self.worlds}
        self._above = {}
        for (s, t) in self.preorder:
            self._above.setdefault(s, []).append(t)

    def successors(self, sigma):
        return self._succ[sigma]

    def above(self, sigma):
        """Paths preorder-above sigma (as a sibling of its parent)."""
        return tuple(sorted(self._above.get(sigma, ()), key=str))

    def accessible_worlds(self):
        return frozenset(t for (_, t) in self.edges)

    def as_kripke(self) -> KripkeModel:
        return KripkeModel(self.worlds, self.edges, self.valuation)


def unravel(model: VeltmanModel) -> UnravelledVeltman:
    """All ascending paths; finite because the source frame is converse
    well-founded (the constructor enforces that)."""
    return UnravelledVeltman(model)


def unravelled_forces(u_model: UnravelledVeltman, sigma, f: Formula,
                      _memo=None) -> bool:
    """rhd clause on the unravelling, with the preorder witness on both
    sides of the implication."""
    if sigma not in u_model.worlds:
        raise ModelError(f"unknown path {sigma!r}")
    memo = {} if _memo is None else _memo

    def ev(s, g) -> bool:
        key = (s, g)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(g, Atom):
            val = (s, g.name) in u_model.valuation
        elif isinstance(g, Bot):
            val = False
        elif isinstance(g, Imp):
            val = (not ev(s, g.left)) or ev(s, g.right)
        elif isinstance(g, Rhd):
            val = True
            for tau in u_model.successors(s):
                up = u_model.above(tau)
                if any(ev(eta, g.left) for eta in up) and \
                        not any(ev(eta, g.right) for eta in up):
                    val = False
                    break
        else:
            raise ModelError(f"cannot evaluate {g!r} on an unravelling")
        memo[key] = val
        return val

    return ev(sigma, f)
