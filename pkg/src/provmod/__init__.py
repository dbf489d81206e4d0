"""Provability-model semantics for propositional modal logics."""

from provmod.formulas import (
    BOX,
    RHD,
    OMEGA,
    Formula,
    FormulaError,
    LanguageError,
    ParseError,
    parse,
    to_text,
    atom,
    imp,
    box,
    rhd,
    boxn,
    neg,
    top,
    lor,
    land,
    liff,
    diamond,
    rbox,
    rdiamond,
    boxdot,
    conj,
    disj,
    boxes,
    FALSUM,
    is_purely_modal,
    skeleton,
    pre_interpolant,
    substitute,
    classical_entails,
    tautology,
    phrase_cnf,
    Phrase,
)
from provmod.kripke import (
    KripkeModel,
    VeltmanModel,
    FrameReport,
    ModelError,
    forces,
    forces_plus,
    veltman_forces,
    veltman_forces_alt,
    check_frame,
    unravel,
    unravelled_forces,
)
from provmod.theories import (
    TheoryOracle,
    finite_axioms_mp,
    kripke_world_theory,
    gl_theorems,
    gl_n,
)
from provmod.decide import (
    DecisionVerdict,
    decide,
    decide_k,
    decide_k4,
    decide_s4,
    decide_gl,
    decide_ilm,
    gl_consequence,
    finfals_check,
    representatives_gl,
    representatives_ilm,
)
from provmod.provability import (
    PreModel,
    ProvabilityModel,
    pm_forces,
    pm_forces_plus,
    pm_forces_rhd,
    lift_kripke,
    project_and_check,
    generate_gl,
    generate_ilm,
    is_l_isomorphic,
    countermodel_pipeline_gl,
    countermodel_pipeline_ilm,
    soundness_suite,
)
from provmod.glp import (
    PolyModel,
    glp_forces,
    glp_forces_plus_0,
    check_glp_model,
    glp_soundness_suite,
)
from provmod.interpret import (
    phrase_truth,
    t_interpretation,
    incompleteness_witness,
    soundness_gate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
