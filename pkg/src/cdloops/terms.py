"""Terms over loops with involution: parsing, evaluation, degrees, derivatives."""
from __future__ import annotations

import string
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .doubling import DoublingParams, ParamError, double, validate_params
from .involution import Involution
from .loop import LoopError, LoopTable


class UnboundVariable(LoopError, KeyError):
    pass


class TermSyntaxError(SyntaxError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.pos = pos
        self.text = text


# --- syntax tree -------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class J:
    pass


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class LDiv:
    """``left \\ right``"""

    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class RDiv:
    """``left / right``"""

    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Star:
    arg: "Term"


Term = Union[Var, One, J, Mul, LDiv, RDiv, Star]
BINARY = {".": Mul, "\\": LDiv, "/": RDiv}
SYMBOL = {Mul: ".", LDiv: "\\", RDiv: "/"}


@dataclass(frozen=True)
class Identity:
    lhs: Term
    rhs: Term
    false: bool = False  # an unsatisfiable marker produced by derivative expansion

    @property
    def variables(self) -> tuple[str, ...]:
        out: list[str] = []
        for t in (self.lhs, self.rhs):
            for v in variables(t):
                if v not in out:
                    out.append(v)
        return tuple(out)

    def __str__(self):
        return "FALSE" if self.false else f"{to_text(self.lhs)} = {to_text(self.rhs)}"


FALSE = Identity(One(), One(), false=True)


def variables(t: Term) -> list[str]:
    out: list[str] = []

    def walk(u):
        if isinstance(u, Var):
            if u.name not in out:
                out.append(u.name)
        elif isinstance(u, Star):
            walk(u.arg)
        elif isinstance(u, (Mul, LDiv, RDiv)):
            walk(u.left)
            walk(u.right)

    walk(t)
    return out


def has_j(t: Term) -> bool:
    if isinstance(t, J):
        return True
    if isinstance(t, Star):
        return has_j(t.arg)
    if isinstance(t, (Mul, LDiv, RDiv)):
        return has_j(t.left) or has_j(t.right)
    return False


def size(t: Term) -> int:
    if isinstance(t, Star):
        return 1 + size(t.arg)
    if isinstance(t, (Mul, LDiv, RDiv)):
        return 1 + size(t.left) + size(t.right)
    return 1


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise TermSyntaxError(msg, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expr(self) -> Term:
        left = self.unary()
        op = self.peek()
        if op in BINARY:
            self.pos += 1
            right = self.unary()
            if self.peek() in BINARY:
                self.error("ambiguous chain of operations; add parentheses")
            return BINARY[op](left, right)
        return left

    def unary(self) -> Term:
        t = self.atom()
        while self.peek() == "*":
            self.pos += 1
            t = Star(t)
        return t

    def atom(self) -> Term:
        c = self.peek()
        if c == "(":
            self.pos += 1
            t = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return t
        if c == "[":
            end = self.text.find("]", self.pos)
            if end < 0:
                self.error("unterminated variable name")
            name = self.text[self.pos + 1 : end].strip()
            if not name:
                self.error("empty variable name")
            self.pos = end + 1
            return Var(name)
        if c == "1":
            self.pos += 1
            return One()
        if c == "j":
            self.pos += 1
            return J()
        if c and c in string.ascii_letters:
            self.pos += 1
            return Var(c)
        self.error("expected a term" if c else "unexpected end of input")

    def done(self):
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.expr()
    p.done()
    return t


def parse_identity(text: str) -> Identity:
    if text.count("=") != 1:
        pos = text.find("=", text.find("=") + 1) if "=" in text else len(text)
        raise TermSyntaxError("an identity needs exactly one '='", text, pos)
    left, right = text.split("=")
    lhs = parse_term(left)
    p = _Parser(text)
    p.pos = len(left) + 1
    rhs = p.expr()
    p.done()
    return Identity(lhs, rhs)


def parse(text: str) -> Term | Identity:
    return parse_identity(text) if "=" in text else parse_term(text)


def to_text(t: Term, top: bool = True) -> str:
    if isinstance(t, Var):
        return t.name if len(t.name) == 1 and t.name != "j" else f"[{t.name}]"
    if isinstance(t, One):
        return "1"
    if isinstance(t, J):
        return "j"
    if isinstance(t, Star):
        return to_text(t.arg, top=False) + "*"
    s = f"{to_text(t.left, False)}{SYMBOL[type(t)]}{to_text(t.right, False)}"
    return s if top else f"({s})"


# --- evaluation -----------------------------------------------------------


def _eval(L: LoopTable, perm, env: dict, t: Term, j: int | None):
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise UnboundVariable(t.name) from None
    if isinstance(t, One):
        return 0
    if isinstance(t, J):
        if j is None:
            raise LoopError("j is only meaningful when evaluating in a double")
        return j
    if isinstance(t, Star):
        if perm is None:
            raise LoopError("term uses * but no involution was given")
        return perm[_eval(L, perm, env, t.arg, j)]
    a = _eval(L, perm, env, t.left, j)
    b = _eval(L, perm, env, t.right, j)
    if isinstance(t, Mul):
        return L.table[a, b]
    if isinstance(t, LDiv):
        return L.ldiv_table[a, b]
    return L.rdiv_table[a, b]


def eval_term(L: LoopTable, inv: Involution | None, assignment: dict, t: Term | str, j: int | None = None):
    """Value of t; assignment values may be ints or broadcastable index arrays."""
    if isinstance(t, str):
        t = parse_term(t)
    perm = None if inv is None else inv.perm
    env = {k: np.asarray(v) if not isinstance(v, (int, np.integer)) else int(v) for k, v in assignment.items()}
    out = _eval(L, perm, env, t, j)
    return int(out) if np.ndim(out) == 0 else out


@dataclass
class IdentityResult:
    holds: bool
    witness: dict[str, int] | None = None

    def __bool__(self):
        return self.holds


def check_identity(L: LoopTable, inv: Involution | None, ident: Identity | str, j: int | None = None,
                   budget: int = 1 << 20) -> IdentityResult:
    """Exhaustive check; the witness is the lexicographically first failing assignment."""
    if isinstance(ident, str):
        ident = parse_identity(ident)
    vs = ident.variables
    if ident.false:
        return IdentityResult(False, {v: 0 for v in vs})
    n = L.order
    perm = None if inv is None else inv.perm
    k = len(vs)
    # split the variables into an outer loop and a vectorised inner grid
    inner = k
    while inner > 0 and n**inner > budget:
        inner -= 1
    outer = k - inner
    grid = np.indices((n,) * inner).reshape(inner, -1) if inner else np.zeros((0, 1), dtype=np.int64)
    for prefix in np.ndindex(*((n,) * outer)):
        env = {v: int(x) for v, x in zip(vs[:outer], prefix)}
        env.update({v: grid[i] for i, v in enumerate(vs[outer:])})
        a = _eval(L, perm, env, ident.lhs, j)
        b = _eval(L, perm, env, ident.rhs, j)
        bad = np.broadcast_to(np.asarray(a) != np.asarray(b), (grid.shape[1],))
        if bad.any():
            i = int(np.argmax(bad))
            w = {v: int(x) for v, x in zip(vs[:outer], prefix)}
            w.update({v: int(grid[q, i]) for q, v in enumerate(vs[outer:])})
            return IdentityResult(False, w)
    return IdentityResult(True)


# --- degrees ----------------------------------------------------------------


@dataclass(frozen=True)
class DegreeVector:
    dj: int
    dgamma: int
    deps: int

    def astuple(self):
        return (self.dj, self.dgamma, self.deps)


def degrees(t: Term | str, j_marks: Iterable[str] = ()) -> DegreeVector:
    if isinstance(t, str):
        t = parse_term(t)
    marks = frozenset(j_marks)

    def rec(u):
        if isinstance(u, Var):
            return (1 if u.name in marks else 0, 0, 0)
        if isinstance(u, One):
            return (0, 0, 0)
        if isinstance(u, J):
            return (1, 0, 0)
        if isinstance(u, Star):
            a, g, e = rec(u.arg)
            return (a, g, (e + a) % 2)
        if isinstance(u, Mul):
            a1, g1, e1 = rec(u.left)
            a2, g2, e2 = rec(u.right)
            return ((a1 + a2) % 2, g1 + g2 + a1 * a2, (e1 + e2) % 2)
        # phi1 / phi2 and phi2 \ phi1
        if isinstance(u, RDiv):
            p1, p2 = rec(u.left), rec(u.right)
        else:
            p1, p2 = rec(u.right), rec(u.left)
        a1, g1, e1 = p1
        a2, g2, e2 = p2
        return ((a1 - a2) % 2, g1 - g2 - a2 * (1 - a1), (e1 - e2) % 2)

    return DegreeVector(*rec(t))


def is_homogeneous(ident: Identity | str, marking: Iterable[str] = ()) -> bool:
    if isinstance(ident, str):
        ident = parse_identity(ident)
    a = degrees(ident.lhs, marking)
    b = degrees(ident.rhs, marking)
    return a.dgamma == b.dgamma and a.deps == b.deps


def _power(L: LoopTable, z: int, k: int) -> int:
    out = 0
    base = z if k >= 0 else int(L.inv(z))
    for _ in range(abs(k)):
        out = int(L.mul(out, base))
    return out


@dataclass
class ScalingReport:
    holds: bool
    degrees: DegreeVector
    value_11: int
    value: int
    predicted: int


def homogeneity_scaling_check(L: LoopTable, inv: Involution, gamma: int, epsilon: int, t: Term | str,
                              assignment: dict[str, int]) -> ScalingReport:
    """Compare t in D(L,*,gamma,epsilon) with t in D(L,*,1,1) scaled by gamma^dg epsilon^de."""
    if isinstance(t, str):
        t = parse_term(t)
    validate_params(L, inv, gamma, epsilon)
    for name, z in (("gamma", gamma), ("epsilon", epsilon)):
        if int(inv.perm[z]) != z:
            raise ParamError(f"{name} = {L.name(z)} is not symmetric")
    n = L.order
    D1 = double(L, inv, DoublingParams(0, 0))
    Dg = double(L, inv, DoublingParams(gamma, epsilon))
    marks = [v for v, x in assignment.items() if x >= n]
    deg = degrees(t, marks)
    v1 = eval_term(D1.M, D1.star, assignment, t, j=n)
    vg = eval_term(Dg.M, Dg.star, assignment, t, j=n)
    scale = int(L.mul(_power(L, gamma, deg.dgamma), _power(L, epsilon, deg.deps)))
    bit, part = divmod(v1, n)
    predicted = bit * n + int(L.mul(part, scale))
    return ScalingReport(vg == predicted, deg, v1, vg, predicted)


def random_term(rng: np.random.Generator, max_size: int, names: Iterable[str] = ("x", "y", "z"),
                allow_j: bool = True, allow_one: bool = True) -> Term:
    names = list(names)
    leaves = [Var(v) for v in names] + ([J()] if allow_j else []) + ([One()] if allow_one else [])

    def build(budget):
        if budget <= 1:
            return leaves[rng.integers(len(leaves))]
        r = rng.random()
        if r < 0.2:
            return Star(build(budget - 1))
        if r < 0.3:
            return leaves[rng.integers(len(leaves))]
        left = int(rng.integers(1, budget - 1)) if budget > 2 else 1
        cls = (Mul, LDiv, RDiv)[rng.integers(3)]
        return cls(build(left), build(max(1, budget - 1 - left)))

    return build(max_size)


# --- varieties --------------------------------------------------------------


@dataclass
class VarietySpec:
    name: str
    identities: list[Identity] = field(default_factory=list)

    @classmethod
    def of(cls, name: str, *texts: str) -> "VarietySpec":
        return cls(name, [parse_identity(s) for s in texts])


def _central(u: str) -> list[str]:
    c = f"({u})"
    return [
        f"{c}.y = y.{c}",
        f"({c}.y).z = {c}.(y.z)",
        f"(y.{c}).z = y.({c}.z)",
        f"(y.z).{c} = y.(z.{c})",
    ]


NAMED_VARIETIES: dict[str, VarietySpec] = {
    v.name: v
    for v in [
        VarietySpec.of("commutative", "x.y = y.x"),
        VarietySpec.of("associative", "(x.y).z = x.(y.z)"),
        VarietySpec.of("flexible", "(x.y).x = x.(y.x)"),
        VarietySpec.of("left_alternative", "x.(x.y) = (x.x).y"),
        VarietySpec.of("right_alternative", "(y.x).x = y.(x.x)"),
        VarietySpec.of("alternative", "x.(x.y) = (x.x).y", "(y.x).x = y.(x.x)"),
        VarietySpec.of("moufang", "(z.x).(y.z) = (z.(x.y)).z"),
        VarietySpec.of("iden", "x* = x"),
        VarietySpec.of("inverse_property", "(x\\1).(x.y) = y", "(y.x).(x\\1) = y"),
        VarietySpec.of("anti_automorphic", "(x.y)\\1 = (y\\1).(x\\1)"),
        VarietySpec.of("normal", *_central("x*.x")),
        VarietySpec.of("exp2", *_central("x.x")),
    ]
}


def load_variety(source: str | Path, name: str | None = None) -> VarietySpec:
    """Identities one per line; ``#`` starts a comment."""
    path = Path(source) if not isinstance(source, Path) else source
    text = path.read_text() if "\n" not in str(source) and path.exists() else str(source)
    ids = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            ids.append(parse_identity(line))
    return VarietySpec(name or (path.stem if path.exists() else "custom"), ids)


def variety_failures(L: LoopTable, inv: Involution | None, V: VarietySpec) -> list[tuple[Identity, dict]]:
    out = []
    for ident in V.identities:
        r = check_identity(L, inv, ident)
        if not r.holds:
            out.append((ident, r.witness))
    return out


def variety_membership(L: LoopTable, inv: Involution | None, V: VarietySpec) -> bool:
    return all(check_identity(L, inv, ident).holds for ident in V.identities)


def unit_double(L: LoopTable, inv: Involution):
    """D(L,*,1,1) with its involution."""
    D = double(L, inv, DoublingParams(0, 0))
    return D.M, D.star


def derivative_membership(L: LoopTable, inv: Involution, V: VarietySpec) -> bool:
    M, star = unit_double(L, inv)
    return variety_membership(M, star, V)


# --- symbolic expansion ---------------------------------------------------------


def normalize(t: Term) -> Term:
    """Push stars down to variables."""
    if isinstance(t, (Var, One, J)):
        return t
    if isinstance(t, (Mul, LDiv, RDiv)):
        return type(t)(normalize(t.left), normalize(t.right))
    a = t.arg
    if isinstance(a, Star):
        return normalize(a.arg)
    if isinstance(a, One):
        return One()
    if isinstance(a, Var):
        return t
    if isinstance(a, Mul):  # (uv)* = v*u*
        return Mul(normalize(Star(a.right)), normalize(Star(a.left)))
    if isinstance(a, RDiv):  # (x/y)* = y*\x*
        return LDiv(normalize(Star(a.right)), normalize(Star(a.left)))
    if isinstance(a, LDiv):  # (y\x)* = x*/y*
        return RDiv(normalize(Star(a.right)), normalize(Star(a.left)))
    raise LoopError("j cannot occur in a symbolic expansion")


def _st(u: Term) -> Term:
    return normalize(Star(u))


def _sym(t: Term, env: dict[str, tuple[Term, int]]) -> tuple[Term, int]:
    """Evaluate t over the unit double; values are (L-term, bit) with bit 1 meaning (.)j."""
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, One):
        return One(), 0
    if isinstance(t, J):
        return One(), 1
    if isinstance(t, Star):
        u, b = _sym(t.arg, env)
        return (u, 1) if b else (_st(u), 0)
    (u, p), (v, q) = _sym(t.left, env), _sym(t.right, env)
    if isinstance(t, Mul):
        if not p and not q:
            return Mul(u, v), 0
        if not p:  # a(bj) = (ba)j
            return Mul(v, u), 1
        if not q:  # (aj)b = (ab*)j
            return Mul(u, _st(v)), 1
        return Mul(_st(v), u), 0  # (aj)(bj) = b*a
    if isinstance(t, RDiv):
        if not p and not q:
            return RDiv(u, v), 0
        if not p:  # u / (vj) = (v* \ u) j
            return LDiv(_st(v), u), 1
        if not q:  # (uj) / v = (u / v*) j
            return RDiv(u, _st(v)), 1
        return LDiv(v, u), 0  # (uj) / (vj) = v \ u
    if not p and not q:
        return LDiv(u, v), 0
    if not p:  # u \ (vj) = (v / u) j
        return RDiv(v, u), 1
    if not q:  # (uj) \ v = (u* \ v*) j
        return LDiv(_st(u), _st(v)), 1
    return RDiv(_st(u), _st(v)), 0  # (uj) \ (vj) = u* / v*


_LETTERS = [c for c in string.ascii_lowercase if c != "j"]


def expand_marking(ident: Identity, marking: Iterable[str]) -> Identity:
    marked = set(marking)
    vs = ident.variables
    rename = {v: _LETTERS[i] if i < len(_LETTERS) else f"a{i}" for i, v in enumerate(vs)}
    env = {v: (Var(rename[v]), 1 if v in marked else 0) for v in vs}
    (u, p), (w, q) = _sym(ident.lhs, env), _sym(ident.rhs, env)
    if p != q:
        return FALSE
    return Identity(u, w)


def markings(vs) -> list[tuple[str, ...]]:
    """All subsets of vs, in lexicographic order of the bit vectors."""
    out = []
    k = len(vs)
    for m in range(1 << k):
        out.append(tuple(v for i, v in enumerate(vs) if m >> (k - 1 - i) & 1))
    return out


def expand_derivative_identities(ident: Identity | str) -> list[Identity]:
    if isinstance(ident, str):
        ident = parse_identity(ident)
    if has_j(ident.lhs) or has_j(ident.rhs):
        raise LoopError("expansion needs a j-free identity")
    out: list[Identity] = []
    seen = set()
    for m in markings(ident.variables):
        e = expand_marking(ident, m)
        key = str(e)
        if key not in seen:
            seen.add(key)
            out.append(e)
    return out


def derivative_spec(V: VarietySpec) -> VarietySpec:
    ids: list[Identity] = []
    seen = set()
    for ident in V.identities:
        for e in expand_derivative_identities(ident):
            if str(e) not in seen:
                seen.add(str(e))
                ids.append(e)
    return VarietySpec(V.name + "'", ids)
