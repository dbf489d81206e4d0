"""Hand-built poly-model fixtures: compliant ones for the soundness
harness, and deliberately broken ones with a known violated clause."""

from __future__ import annotations

from provmod.formulas import FALSUM, OMEGA, Atom, Bot, Imp, atom, boxn, top
from provmod.glp import PolyModel, glp_forces
from provmod.theories import MP, TheoryOracle, finite_axioms_mp, poly_loeb, poly_nec

p = atom("p")

FAMILY = (top(), FALSUM, p, boxn(0, p))

_ALL_POLY_RULES = frozenset(
    {MP} | {poly_nec(n) for n in range(3)} | {poly_loeb(n) for n in range(3)})


def _oracle(decide, label):
    return TheoryOracle(language=OMEGA, axioms=(), rules=_ALL_POLY_RULES,
                        provenance="custom", decide=decide, label=label)


def leaf_truth_oracle(val):
    """Truth at an endpoint world: every indexed box holds vacuously."""
    def ev(f):
        if isinstance(f, Atom):
            return f.name in val
        if isinstance(f, Bot):
            return False
        if isinstance(f, Imp):
            return (not ev(f.left)) or ev(f.right)
        return True
    return _oracle(ev, f"leaf{sorted(val)}")


def inconsistent_oracle():
    """Derives everything.  Forced at higher levels above a level-0 leaf:
    the ascending clause keeps the vacuous index-0 boxes derivable while
    next-level completeness adds their negations."""
    return _oracle(lambda f: True, "inconsistent")


def model_truth_oracle(cell, world, dotted: bool):
    """Truth at a world of the finished model; with ``dotted``, truth there
    and under every level-0 box as well."""
    def ev(f):
        model = cell[0]
        if dotted:
            return glp_forces(model, world, f) and \
                glp_forces(model, world, boxn(0, f))
        return glp_forces(model, world, f)
    return _oracle(ev, f"truth[{world}{'+' if dotted else ''}]")


def fixture_empty():
    return PolyModel(["a", "b"], {0: [], 1: [], 2: []}, {},
                     [("a", "p")], max_index=2)


def fixture_single_edge():
    leaf = leaf_truth_oracle({"p"})
    return PolyModel(
        ["w", "u"],
        {0: [("w", "u")], 1: [], 2: []},
        {"u": {0: leaf, 1: leaf, 2: leaf}},
        [("u", "p")],
        max_index=2,
    )


def fixture_two_level():
    base = leaf_truth_oracle({"p"})
    up = inconsistent_oracle()
    return PolyModel(
        ["w", "u"],
        {0: [("w", "u")], 1: [("w", "u")], 2: []},
        {"u": {0: base, 1: up, 2: up}},
        [("u", "p")],
        max_index=2,
    )


def fixture_chain():
    cell = [None]
    theories = {
        "u": {0: model_truth_oracle(cell, "u", dotted=True),
              1: model_truth_oracle(cell, "u", dotted=False),
              2: model_truth_oracle(cell, "u", dotted=False)},
        "v": {0: model_truth_oracle(cell, "v", dotted=True),
              1: model_truth_oracle(cell, "v", dotted=False),
              2: model_truth_oracle(cell, "v", dotted=False)},
    }
    model = PolyModel(
        ["w", "u", "v"],
        {0: [("w", "u"), ("u", "v"), ("w", "v")], 1: [], 2: []},
        theories,
        [("u", "p"), ("v", "p")],
        max_index=2,
    )
    cell[0] = model
    return model


COMPLIANT = [fixture_empty, fixture_single_edge, fixture_two_level,
             fixture_chain]


def fixture_non_ascending_edges():
    leaf = leaf_truth_oracle(set())
    return PolyModel(
        ["w", "u", "v"],
        {0: [("w", "u"), ("w", "v")], 1: [("u", "v")], 2: []},
        {"u": {0: leaf, 1: leaf, 2: leaf},
         "v": {0: leaf, 1: leaf, 2: leaf}},
        [],
        max_index=2,
    )


def fixture_pi_incomplete():
    base = leaf_truth_oracle({"p"})
    return PolyModel(
        ["w", "u"],
        {0: [("w", "u")], 1: [("w", "u")], 2: []},
        {"u": {0: base, 1: base, 2: base}},
        [("u", "p")],
        max_index=2,
    )


def fixture_nec_broken():
    finite = finite_axioms_mp([p], language=OMEGA)
    return PolyModel(
        ["w", "u"],
        {0: [("w", "u")], 1: [], 2: []},
        {"u": {0: finite, 1: finite, 2: finite}},
        [("u", "p")],
        max_index=2,
    )


VIOLATING = [
    (fixture_non_ascending_edges, "ascending_edges", "ascending"),
    (fixture_pi_incomplete, "pi_completeness", "pi_completeness"),
    (fixture_nec_broken, "poly_nec", "four"),
]
