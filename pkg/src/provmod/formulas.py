"""Modal formula ASTs with parsing, printing and propositional analysis.

Three languages share one desugared core.  Implication and falsum are the
only primitive boolean connectives; each language adds its own modal
constructor (unary box, binary rhd, or indexed boxes).  Negation,
conjunction, disjunction, equivalence, top and diamond are rewritten away
at construction time, so structural equality is canonical and the printer
re-sugars a fixed set of abbreviations.

All formulas are interned: build them through the factory functions
(``atom``, ``imp``, ``box``, ``rhd``, ``boxn`` and the derived helpers),
never by calling the node classes directly.  Interning makes equality an
identity check and lets evaluators use formulas as fast dictionary keys.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

BOX = "box"
RHD = "rhd"
OMEGA = "omega"

LANGUAGES = (BOX, RHD, OMEGA)


class FormulaError(ValueError):
    """Malformed formula or illegal operation on one."""


class LanguageError(FormulaError):
    """Operator used outside its language, or languages mixed in one tree."""


class ParseError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EntailmentTooLarge(FormulaError):
    """Exact truth-table methods refuse unreasonably large atom sets."""


def _merge_lang(a: str | None, b: str | None, what: str) -> str | None:
    if a is None:
        return b
    if b is None or a == b:
        return a
    raise LanguageError(f"cannot mix {a!r} and {b!r} operators in {what}")


class Formula:
    """Base node.  Immutable; lang is None for purely boolean trees."""

    __slots__ = ("lang", "_hash", "_text")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return self is other

    def __ne__(self, other) -> bool:
        return self is not other

    def __str__(self) -> str:
        return to_text(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {to_text(self)}>"


class Atom(Formula):
    __slots__ = ("name",)


class Bot(Formula):
    __slots__ = ()


class Imp(Formula):
    __slots__ = ("left", "right")


class Box(Formula):
    __slots__ = ("sub",)


class Rhd(Formula):
    __slots__ = ("left", "right")


class BoxN(Formula):
    __slots__ = ("index", "sub")


_ATOM_RE = re.compile(r"[a-z][a-z0-9_]*\Z")

_intern: dict[tuple, Formula] = {}


def _make(cls, key: tuple, lang: str | None, **attrs) -> Formula:
    node = _intern.get(key)
    if node is None:
        node = object.__new__(cls)
        for name, value in attrs.items():
            setattr(node, name, value)
        node.lang = lang
        node._hash = hash(key)
        node._text = None
        _intern[key] = node
    return node


def atom(name: str) -> Formula:
    if not _ATOM_RE.match(name):
        raise FormulaError(f"bad atom name {name!r}")
    if name in ("bot", "top"):
        raise FormulaError(f"{name!r} is a reserved word, not an atom")
    return _make(Atom, ("a", name), None, name=name)


FALSUM: Formula = _make(Bot, ("f",), None)


def imp(left: Formula, right: Formula) -> Formula:
    lang = _merge_lang(left.lang, right.lang, "an implication")
    return _make(Imp, ("i", id(left), id(right)), lang, left=left, right=right)


def box(sub: Formula) -> Formula:
    if sub.lang not in (None, BOX):
        raise LanguageError("box takes a box-language argument")
    return _make(Box, ("b", id(sub)), BOX, sub=sub)


def rhd(left: Formula, right: Formula) -> Formula:
    if left.lang not in (None, RHD) or right.lang not in (None, RHD):
        raise LanguageError("rhd takes rhd-language arguments")
    return _make(Rhd, ("r", id(left), id(right)), RHD, left=left, right=right)


def boxn(index: int, sub: Formula) -> Formula:
    if index < 0:
        raise FormulaError("box index must be a natural number")
    if sub.lang not in (None, OMEGA):
        raise LanguageError("indexed box takes an omega-language argument")
    return _make(BoxN, ("n", index, id(sub)), OMEGA, index=index, sub=sub)


# ---------------------------------------------------------------------------
# derived connectives (desugared immediately)

def neg(a: Formula) -> Formula:
    return imp(a, FALSUM)


def top() -> Formula:
    return imp(FALSUM, FALSUM)


def lor(a: Formula, b: Formula) -> Formula:
    return imp(neg(a), b)


def land(a: Formula, b: Formula) -> Formula:
    return neg(lor(neg(a), neg(b)))


def liff(a: Formula, b: Formula) -> Formula:
    return land(imp(a, b), imp(b, a))


def diamond(a: Formula) -> Formula:
    return neg(box(neg(a)))


def rbox(a: Formula) -> Formula:
    """Unary box inside the rhd language."""
    return rhd(neg(a), FALSUM)


def rdiamond(a: Formula) -> Formula:
    return neg(rbox(neg(a)))


def box_for(lang: str):
    if lang == BOX:
        return box
    if lang == RHD:
        return rbox
    raise LanguageError(f"no unary box for language {lang!r}")


def boxdot(a: Formula, lang: str = BOX) -> Formula:
    return land(a, box_for(lang)(a))


def conj(items: Iterable[Formula]) -> Formula:
    """Right-folded conjunction; empty conjunction is top."""
    items = list(items)
    if not items:
        return top()
    out = items[-1]
    for item in reversed(items[:-1]):
        out = land(item, out)
    return out


def disj(items: Iterable[Formula]) -> Formula:
    """Right-folded disjunction; empty disjunction is falsum."""
    items = list(items)
    if not items:
        return FALSUM
    out = items[-1]
    for item in reversed(items[:-1]):
        out = lor(item, out)
    return out


def boxes(a: Formula, n: int, lang: str = BOX) -> Formula:
    bx = box_for(lang)
    for _ in range(n):
        a = bx(a)
    return a


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"""\s*(?:
      (?P<iff><->)
    | (?P<imp>->)
    | (?P<dia><>)
    | (?P<rhdop>\|>)
    | (?P<orop>\|)
    | (?P<andop>&)
    | (?P<notop>~)
    | (?P<boxnop>\[[0-9]+\])
    | (?P<boxop>\[\])
    | (?P<lp>\()
    | (?P<rp>\))
    | (?P<name>[a-z][a-z0-9_]*)
    )""",
    re.VERBOSE,
)


class _Parser:
    def __init__(self, text: str, lang: str):
        self.text = text
        self.lang = lang
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                raise ParseError(f"unexpected character {stripped[0]!r}",
                                 len(text) - len(stripped))
            self.tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
            pos = m.end()
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        if self.i >= len(self.tokens):
            raise ParseError("unexpected end of input", len(self.text))
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def pos(self) -> int:
        return self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)

    def illegal(self, op: str):
        raise ParseError(f"operator {op} is not part of the {self.lang} language",
                         self.pos())

    # precedence: unary/modal > & > | > |> > -> > <->
    def parse_iff(self) -> Formula:
        a = self.parse_imp()
        if self.peek() == "iff":
            self.next()
            return liff(a, self.parse_iff())
        return a

    def parse_imp(self) -> Formula:
        a = self.parse_rhd()
        if self.peek() == "imp":
            self.next()
            return imp(a, self.parse_imp())
        return a

    def parse_rhd(self) -> Formula:
        a = self.parse_or()
        if self.peek() == "rhdop":
            if self.lang != RHD:
                self.illegal("|>")
            self.next()
            b = self.parse_or()
            if self.peek() == "rhdop":
                raise ParseError("chained |> needs parentheses", self.pos())
            return rhd(a, b)
        return a

    def parse_or(self) -> Formula:
        a = self.parse_and()
        if self.peek() == "orop":
            self.next()
            return lor(a, self.parse_or())
        return a

    def parse_and(self) -> Formula:
        a = self.parse_unary()
        if self.peek() == "andop":
            self.next()
            return land(a, self.parse_and())
        return a

    def parse_unary(self) -> Formula:
        kind, value, pos = self.next()
        if kind == "notop":
            return neg(self.parse_unary())
        if kind == "boxop":
            if self.lang == BOX:
                return box(self.parse_unary())
            if self.lang == RHD:
                return rbox(self.parse_unary())
            self.illegal("[]")
        if kind == "dia":
            if self.lang == BOX:
                return diamond(self.parse_unary())
            if self.lang == RHD:
                return rdiamond(self.parse_unary())
            self.illegal("<>")
        if kind == "boxnop":
            if self.lang != OMEGA:
                self.illegal(value)
            return boxn(int(value[1:-1]), self.parse_unary())
        if kind == "lp":
            a = self.parse_iff()
            k, _, p = self.next()
            if k != "rp":
                raise ParseError("expected ')'", p)
            return a
        if kind == "name":
            if value == "bot":
                return FALSUM
            if value == "top":
                return top()
            return atom(value)
        raise ParseError(f"unexpected token {value!r}", pos)


def parse(text: str, lang: str = BOX) -> Formula:
    """Parse ``text`` in the given language and return the desugared tree."""
    if lang not in LANGUAGES:
        raise LanguageError(f"unknown language {lang!r}")
    p = _Parser(text, lang)
    out = p.parse_iff()
    if p.i != len(p.tokens):
        raise ParseError("trailing input", p.pos())
    return out


# ---------------------------------------------------------------------------
# printing (canonical; re-sugars ~, &, |, top and <> for readability)

_LVL_IFF, _LVL_IMP, _LVL_RHD, _LVL_OR, _LVL_AND, _LVL_UNARY = range(6)


def _match_and(f: Formula) -> tuple[Formula, Formula] | None:
    # a & b is stored as ((~~a -> ~b) -> bot)
    if not isinstance(f, Imp) or f.right is not FALSUM:
        return None
    g = f.left
    if not isinstance(g, Imp):
        return None
    gl, gr = g.left, g.right
    if not (isinstance(gl, Imp) and gl.right is FALSUM and
            isinstance(gl.left, Imp) and gl.left.right is FALSUM):
        return None
    if not (isinstance(gr, Imp) and gr.right is FALSUM):
        return None
    return gl.left.left, gr.left


def _render(f: Formula, minlvl: int) -> str:
    text, lvl = _render_raw(f)
    if lvl < minlvl:
        return "(" + text + ")"
    return text


def _render_raw(f: Formula) -> tuple[str, int]:
    if isinstance(f, Atom):
        return f.name, _LVL_UNARY
    if isinstance(f, Bot):
        return "bot", _LVL_UNARY
    if isinstance(f, Box):
        return "[]" + _render(f.sub, _LVL_UNARY), _LVL_UNARY
    if isinstance(f, BoxN):
        return f"[{f.index}]" + _render(f.sub, _LVL_UNARY), _LVL_UNARY
    if isinstance(f, Rhd):
        left = _render(f.left, _LVL_RHD + 1)
        right = _render(f.right, _LVL_RHD + 1)
        return f"{left} |> {right}", _LVL_RHD
    # implication node
    if f.left is FALSUM and f.right is FALSUM:
        return "top", _LVL_UNARY
    if f.right is FALSUM:
        pair = _match_and(f)
        if pair is not None:
            a, b = pair
            return f"{_render(a, _LVL_AND + 1)} & {_render(b, _LVL_AND)}", _LVL_AND
        inner = f.left
        if isinstance(inner, Box) and isinstance(inner.sub, Imp) \
                and inner.sub.right is FALSUM:
            return "<>" + _render(inner.sub.left, _LVL_UNARY), _LVL_UNARY
        return "~" + _render(inner, _LVL_UNARY), _LVL_UNARY
    if isinstance(f.left, Imp) and f.left.right is FALSUM:
        a = _render(f.left.left, _LVL_OR + 1)
        b = _render(f.right, _LVL_OR)
        return f"{a} | {b}", _LVL_OR
    a = _render(f.left, _LVL_IMP + 1)
    b = _render(f.right, _LVL_IMP)
    return f"{a} -> {b}", _LVL_IMP


def to_text(f: Formula) -> str:
    """Canonical rendering; ``parse(to_text(f), lang)`` returns ``f``."""
    if f._text is None:
        f._text = _render(f, 0)
    return f._text


def sort_key(f: Formula) -> str:
    return to_text(f)


# ---------------------------------------------------------------------------
# structural analysis

def language(f: Formula) -> str | None:
    return f.lang


@lru_cache(maxsize=None)
def atoms(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, Bot):
        return frozenset()
    if isinstance(f, Imp):
        return atoms(f.left) | atoms(f.right)
    if isinstance(f, Box):
        return atoms(f.sub)
    if isinstance(f, Rhd):
        return atoms(f.left) | atoms(f.right)
    return atoms(f.sub)


@lru_cache(maxsize=None)
def free_atoms(f: Formula) -> frozenset[str]:
    """Atoms occurring outside the scope of every modal operator."""
    if isinstance(f, Atom):
        return frozenset((f.name,))
    if isinstance(f, Imp):
        return free_atoms(f.left) | free_atoms(f.right)
    return frozenset()


def is_purely_modal(f: Formula) -> bool:
    return not free_atoms(f)


@lru_cache(maxsize=None)
def modal_depth(f: Formula) -> int:
    if isinstance(f, (Atom, Bot)):
        return 0
    if isinstance(f, Imp):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, Box):
        return 1 + modal_depth(f.sub)
    if isinstance(f, Rhd):
        return 1 + max(modal_depth(f.left), modal_depth(f.right))
    return 1 + modal_depth(f.sub)


def subformulas(f: Formula) -> list[Formula]:
    """All distinct subformulas, children before parents."""
    seen: dict[Formula, None] = {}

    def walk(g: Formula):
        if g in seen:
            return
        if isinstance(g, Imp):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, Box):
            walk(g.sub)
        elif isinstance(g, Rhd):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, BoxN):
            walk(g.sub)
        seen[g] = None

    walk(f)
    return list(seen)


def outer_modal_subformulas(f: Formula) -> list[Formula]:
    """Outermost modal subformulas, in first-occurrence order."""
    out: list[Formula] = []
    seen: set[Formula] = set()

    def walk(g: Formula):
        if isinstance(g, (Box, Rhd, BoxN)):
            if g not in seen:
                seen.add(g)
                out.append(g)
        elif isinstance(g, Imp):
            walk(g.left)
            walk(g.right)

    walk(f)
    return out


def substitute(f: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Simultaneous substitution of formulas for atoms."""
    if not mapping:
        return f

    def walk(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return mapping.get(g.name, g)
        if isinstance(g, Bot):
            return g
        if isinstance(g, Imp):
            return imp(walk(g.left), walk(g.right))
        if isinstance(g, Box):
            return box(walk(g.sub))
        if isinstance(g, Rhd):
            return rhd(walk(g.left), walk(g.right))
        return boxn(g.index, walk(g.sub))

    return walk(f)


# ---------------------------------------------------------------------------
# propositional skeleton and the purely modal uniform pre-interpolant

@dataclass(frozen=True)
class Skeleton:
    """Modal-operator-free core of a formula.

    ``skeleton`` mentions the free atoms ``p_atoms`` plus fresh atoms
    ``q_atoms``; substituting each binding for its fresh atom restores the
    original formula exactly.
    """

    skeleton: Formula
    p_atoms: tuple[str, ...]
    q_atoms: tuple[str, ...]
    bindings: tuple[tuple[str, Formula], ...]

    @property
    def binding_map(self) -> dict[str, Formula]:
        return dict(self.bindings)

    def restore(self) -> Formula:
        return substitute(self.skeleton, self.binding_map)


def _fresh_names(count: int, used: frozenset[str]) -> list[str]:
    names = []
    i = 0
    while len(names) < count:
        name = f"q{i}"
        if name not in used:
            names.append(name)
        i += 1
    return names


def skeleton(f: Formula) -> Skeleton:
    mods = outer_modal_subformulas(f)
    names = _fresh_names(len(mods), atoms(f))
    replacement = {m: atom(n) for m, n in zip(mods, names)}

    def walk(g: Formula) -> Formula:
        if g in replacement:
            return replacement[g]
        if isinstance(g, Imp):
            return imp(walk(g.left), walk(g.right))
        return g

    sk = walk(f)
    return Skeleton(
        skeleton=sk,
        p_atoms=tuple(sorted(free_atoms(f))),
        q_atoms=tuple(names),
        bindings=tuple(zip(names, mods)),
    )


@lru_cache(maxsize=None)
def pre_interpolant(f: Formula) -> Formula:
    """Purely modal uniform pre-interpolant.

    Conjunction, over every true/false assignment to the free atoms, of the
    skeleton instantiated with that assignment and with the abstracted modal
    subformulas put back.  Assignments are enumerated with top first, in
    lexicographic atom order.
    """
    sk = skeleton(f)
    binding = sk.binding_map
    instances = []
    for bits in itertools.product((top(), FALSUM), repeat=len(sk.p_atoms)):
        subst = dict(binding)
        subst.update(zip(sk.p_atoms, bits))
        instances.append(substitute(sk.skeleton, subst))
    return conj(instances)


# ---------------------------------------------------------------------------
# classical entailment with opaque modal atoms

def _var_pattern(i: int, nvals: int) -> int:
    # truth table of variable i over nvals = 2**k rows, as a bit mask
    full = (1 << nvals) - 1
    block = 1 << (1 << i)
    return (full // (block + 1)) << (1 << i)


def extended_atoms(fs: Iterable[Formula]) -> list:
    """Bare atoms plus outermost modal subformulas, in the fixed order:
    atoms lexicographically, then modal formulas by canonical text."""
    names: set[str] = set()
    mods: dict[Formula, None] = {}
    for f in fs:
        names |= free_atoms(f)
        for m in outer_modal_subformulas(f):
            mods.setdefault(m)
    ordered: list = sorted(names)
    ordered.extend(sorted(mods, key=sort_key))
    return ordered


def _tables(fs: list[Formula], limit: int = 22) -> tuple[list[int], int]:
    ext = extended_atoms(fs)
    k = len(ext)
    if k > limit:
        raise EntailmentTooLarge(f"{k} extended atoms exceed the exact limit")
    nvals = 1 << k
    full = (1 << nvals) - 1
    assign: dict = {}
    for i, x in enumerate(ext):
        assign[x] = _var_pattern(i, nvals)
    memo: dict[Formula, int] = {}

    def table(g: Formula) -> int:
        got = memo.get(g)
        if got is not None:
            return got
        if isinstance(g, Atom):
            val = assign[g.name]
        elif isinstance(g, Bot):
            val = 0
        elif isinstance(g, Imp):
            val = (~table(g.left) | table(g.right)) & full
        else:
            val = assign[g]
        memo[g] = val
        return val

    return [table(f) for f in fs], full


def classical_entails(gamma: Iterable[Formula], a: Formula) -> bool:
    """Classical propositional consequence, outermost modal subformulas
    treated as opaque atoms.  Exact (exhaustive valuation)."""
    gamma = list(gamma)
    lang = None
    for g in itertools.chain(gamma, (a,)):
        lang = _merge_lang(lang, g.lang, "an entailment query")
    tables, full = _tables(gamma + [a])
    lhs = full
    for t in tables[:-1]:
        lhs &= t
    return lhs & ~tables[-1] & full == 0


def tautology(a: Formula) -> bool:
    return classical_entails((), a)


def classically_equivalent(a: Formula, b: Formula) -> bool:
    return classical_entails((a,), b) and classical_entails((b,), a)


# ---------------------------------------------------------------------------
# phrases and the canonical clause form

def _literal_key(x) -> tuple:
    if isinstance(x, str):
        return (0, x)
    return (1, to_text(x))


@dataclass(frozen=True)
class Phrase:
    """A clause: conjunction of ``antecedent`` implies disjunction of
    ``consequent``.  Members are atom names or boxed formulas, stored under
    the fixed order (atoms first, then boxes by canonical text)."""

    antecedent: tuple
    consequent: tuple

    def __post_init__(self):
        ante = tuple(sorted(set(self.antecedent), key=_literal_key))
        cons = tuple(sorted(set(self.consequent), key=_literal_key))
        if set(ante) & set(cons):
            raise FormulaError("phrase sides must be disjoint")
        for x in ante + cons:
            if isinstance(x, str):
                continue
            if not isinstance(x, Box):
                raise FormulaError("phrase members are atoms or boxed formulas")
        object.__setattr__(self, "antecedent", ante)
        object.__setattr__(self, "consequent", cons)

    def _as_formula(self, x) -> Formula:
        return atom(x) if isinstance(x, str) else x

    def formula(self) -> Formula:
        left = conj([self._as_formula(x) for x in self.antecedent])
        right = disj([self._as_formula(y) for y in self.consequent])
        return imp(left, right)

    def sort_key(self) -> tuple:
        return (tuple(map(_literal_key, self.antecedent)),
                tuple(map(_literal_key, self.consequent)))

    def __str__(self) -> str:
        return to_text(self.formula())


def phrase_cnf(f: Formula) -> tuple[Phrase, ...]:
    """The canonical clause form: all minimal non-tautologous clauses the
    formula entails, as phrases in canonical order.  Classically equivalent
    inputs produce identical phrase tuples."""
    if f.lang not in (None, BOX):
        raise LanguageError("phrase form is defined for the box language")
    ext = extended_atoms([f])
    k = len(ext)
    if k > 10:
        raise EntailmentTooLarge(f"{k} extended atoms exceed the clause-form limit")
    (ftab,), full = _tables([f])
    nvals = 1 << k
    patterns = [_var_pattern(i, nvals) for i in range(k)]

    def clause_table(members: tuple[int, ...]) -> int:
        # members: +i+1 for a positive literal on ext[i], -(i+1) for negative
        t = 0
        for m in members:
            i = abs(m) - 1
            t |= patterns[i] if m > 0 else (~patterns[i] & full)
        return t

    def is_implicate(members) -> bool:
        return ftab & ~clause_table(members) & full == 0

    implicates: list[tuple[int, ...]] = []
    for signs in itertools.product((0, 1, -1), repeat=k):
        members = tuple(s * (i + 1) for i, s in enumerate(signs) if s)
        if is_implicate(members):
            implicates.append(members)

    phrases = []
    implicate_set = set(implicates)
    for members in implicates:
        if any(tuple(m for m in members if m != drop) in implicate_set
               for drop in members):
            continue
        ante = tuple(ext[abs(m) - 1] for m in members if m < 0)
        cons = tuple(ext[m - 1] for m in members if m > 0)
        phrases.append(Phrase(antecedent=ante, consequent=cons))
    return tuple(sorted(phrases, key=Phrase.sort_key))
