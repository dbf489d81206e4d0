"""Poly-modal provability models: indexed accessibility relations with one
theory per accessible world and level, plus the property checker and the
axiom-soundness harness for the poly-modal provability logic.
"""

from __future__ import annotations

from dataclasses import dataclass

from provmod import formulas as fm
from provmod.formulas import (
    FALSUM,
    OMEGA,
    Atom,
    Bot,
    BoxN,
    Formula,
    Imp,
    atom,
    boxn,
    imp,
    is_purely_modal,
    neg,
    top,
)
from provmod.kripke import ModelError
from provmod.theories import TheoryOracle, classicality_violations


class PolyModelError(ModelError):
    pass


class PolyModel:
    """Finite frame with accessibility relations indexed 0..max_index.

    Theories are attached to every level-0-accessible world at every level.
    Worlds reachable on a higher level but not on level 0 would have no
    theory to consult, so such edges are rejected outright.
    """

    def __init__(self, worlds, edges, theories, valuation, max_index=None):
        self.worlds = frozenset(worlds)
        if not self.worlds:
            raise PolyModelError("a model needs at least one world")
        levels = {int(n): frozenset(tuple(e) for e in es)
                  for n, es in edges.items()}
        if max_index is None:
            max_index = max(levels, default=0)
        self.max_index = int(max_index)
        self.edges = {n: levels.get(n, frozenset())
                      for n in range(self.max_index + 1)}
        for n, es in levels.items():
            if n > self.max_index:
                raise PolyModelError(f"edge level {n} above max index "
                                     f"{self.max_index}")
        for n, es in self.edges.items():
            for (w, u) in es:
                if w not in self.worlds or u not in self.worlds:
                    raise PolyModelError(f"edge {(w, u)!r} leaves the world set")
        self.valuation = frozenset((w, a) for (w, a) in valuation)
        for w, a in self.valuation:
            if w not in self.worlds:
                raise PolyModelError(f"valuation entry {(w, a)!r} leaves "
                                     f"the world set")

        accessible = frozenset(u for (_, u) in self.edges[0])
        self.accessible0 = accessible
        for n, es in self.edges.items():
            for (w, u) in es:
                if u not in accessible:
                    raise PolyModelError(
                        f"level-{n} edge reaches {u!r}, which is not "
                        f"level-0 accessible and so carries no theory")

        flat: dict[tuple, TheoryOracle] = {}
        for w, per_level in theories.items():
            for n, oracle in per_level.items():
                flat[(w, int(n))] = oracle
        expected = {(w, n) for w in accessible
                    for n in range(self.max_index + 1)}
        if set(flat) != expected:
            raise PolyModelError(
                f"theories must cover exactly the level-0 accessible worlds "
                f"at every level up to {self.max_index}")
        for (w, n), oracle in flat.items():
            if oracle.language != OMEGA:
                raise PolyModelError(f"theory at {(w, n)!r} speaks "
                                     f"{oracle.language}")
        self._theories = flat
        self._succ = {n: {w: tuple(sorted((u for (x, u) in self.edges[n]
                                           if x == w), key=str))
                          for w in self.worlds}
                      for n in range(self.max_index + 1)}
        self._memo: dict = {}

    def successors(self, w, n=0):
        return self._succ[n][w]

    def theory(self, w, n) -> TheoryOracle:
        try:
            return self._theories[(w, n)]
        except KeyError:
            raise PolyModelError(f"no theory at {(w, n)!r}") from None

    def descendants0(self, w):
        seen = set()
        stack = list(self._succ[0][w])
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(self._succ[0][u])
        return frozenset(seen)

    def __repr__(self):
        return (f"PolyModel({len(self.worlds)} worlds, "
                f"levels 0..{self.max_index})")


def glp_forces(model: PolyModel, world, f: Formula) -> bool:
    """Truth at a world; an index-n box asks the level-n theories of the
    level-n successors."""
    if world not in model.worlds:
        raise PolyModelError(f"unknown world {world!r}")
    if f.lang not in (None, OMEGA):
        raise PolyModelError("poly evaluation takes omega-language formulas")
    memo = model._memo

    def ev(w, g) -> bool:
        key = (w, g)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(g, Atom):
            val = (w, g.name) in model.valuation
        elif isinstance(g, Bot):
            val = False
        elif isinstance(g, Imp):
            val = (not ev(w, g.left)) or ev(w, g.right)
        elif isinstance(g, BoxN):
            if g.index > model.max_index:
                raise PolyModelError(
                    f"box index {g.index} above max index {model.max_index}")
            val = all(model.theory(u, g.index).derives(g.sub)
                      for u in model.successors(w, g.index))
        else:
            raise PolyModelError(f"cannot evaluate {g!r} here")
        memo[key] = val
        return val

    return ev(world, f)


def glp_forces_plus_0(model: PolyModel, world, f: Formula) -> bool:
    """Truth at the world and all its level-0 strict descendants."""
    if world not in model.worlds:
        raise PolyModelError(f"unknown world {world!r}")
    return all(glp_forces(model, u, f)
               for u in {world} | set(model.descendants0(world)))


@dataclass(frozen=True)
class GlpReport:
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def by_clause(self, clause: str):
        return [v for v in self.violations if v[0] == clause]


def check_glp_model(model: PolyModel, family) -> GlpReport:
    """Check the poly-model clauses over a finite formula family.

    Clauses: oracle classicality, level-0 modal completeness on the purely
    modal members, per-level necessitation and diagonalized-rule closure,
    the ascending conditions on edges and theories, and completeness of the
    next level for refuted boxes.  Violations carry witnesses.
    """
    family = tuple(family)
    out = []
    levels = range(model.max_index + 1)

    for (w, n) in sorted(model._theories, key=str):
        for violation in classicality_violations(model.theory(w, n)):
            out.append(("classical", w, n) + violation)

    for w in sorted(model.accessible0, key=str):
        for f in family:
            if not is_purely_modal(f):
                continue
            if glp_forces_plus_0(model, w, f) and \
                    not model.theory(w, 0).derives(f):
                out.append(("modal_completeness", w, f))

    for (w, n) in sorted(model._theories, key=str):
        th = model.theory(w, n)
        for f in family:
            if th.derives(f) and not th.derives(boxn(n, f)):
                out.append(("poly_nec", w, n, f))
            if th.derives(imp(boxn(n, f), f)) and not th.derives(f):
                out.append(("poly_loeb", w, n, f))

    for n in levels[:-1]:
        for e in sorted(model.edges[n + 1], key=str):
            if e not in model.edges[n]:
                out.append(("ascending_edges", n + 1, e))
        for w in sorted(model.accessible0, key=str):
            low, high = model.theory(w, n), model.theory(w, n + 1)
            for f in family:
                if low.derives(f) and not high.derives(f):
                    out.append(("ascending_theories", w, n, f))

    for n in levels[:-1]:
        for (u, w) in sorted(model.edges[n + 1], key=str):
            for f in family:
                refuted = neg(boxn(n, f))
                if glp_forces(model, u, refuted) and \
                        not model.theory(w, n + 1).derives(refuted):
                    out.append(("pi_completeness", u, w, n, f))

    return GlpReport(tuple(out))


def _instance_pool(atom_names, depth: int, max_index: int):
    pool = [FALSUM, top()]
    for a in sorted(atom_names):
        pool.append(atom(a))
        pool.append(neg(atom(a)))
    if depth >= 1:
        base = [atom(a) for a in sorted(atom_names)] + [FALSUM]
        for n in range(max_index + 1):
            pool.extend(boxn(n, b) for b in base)
    return pool


def glp_axiom_instances(atom_names, depth: int, max_index: int):
    """All axiom-scheme instances over the pool, each paired with its
    scheme name; the zero-level box of every instance is included."""
    pool = _instance_pool(atom_names, depth, max_index)
    schemes = []
    for n in range(max_index + 1):
        for a in pool:
            schemes.append(("loeb", n,
                            imp(boxn(n, imp(boxn(n, a), a)), boxn(n, a))))
            schemes.append(("four", n, imp(boxn(n, a), boxn(n, boxn(n, a)))))
            for b in pool:
                schemes.append(("k", n, imp(boxn(n, imp(a, b)),
                                            imp(boxn(n, a), boxn(n, b)))))
    for n in range(max_index):
        for a in pool:
            schemes.append(("ascending", n, imp(boxn(n, a), boxn(n + 1, a))))
            schemes.append(("pi_completeness", n,
                            imp(neg(boxn(n, a)),
                                boxn(n + 1, neg(boxn(n, a))))))
    out = list(schemes)
    out.extend((name + "_boxed", n, boxn(0, f)) for (name, n, f) in schemes)
    return out


def glp_soundness_suite(model: PolyModel, atom_names, depth: int) -> GlpReport:
    """Force every axiom instance at every world; failures are reported
    with the scheme name, level, instance and world."""
    out = []
    for (name, n, f) in glp_axiom_instances(atom_names, depth,
                                            model.max_index):
        for w in sorted(model.worlds, key=str):
            if not glp_forces(model, w, f):
                out.append((name, n, f, w))
    return GlpReport(tuple(out))
