"""Definition expansion: rewrite statements onto a target symbol profile.

Every term built from a concept outside the profile is replaced by a
fresh variable of the concept's result sort, and the concept's defining
body, instantiated at the original arguments and the fresh variable, is
conjoined into the constraint list.  The rewrite runs to a fixpoint, so
definitions may use other defined concepts.  Tuple-like concepts
(triangle, segment) are structural: their projections resolve to the
original arguments and contribute no constraints.

Fresh names follow ``_<symbol><k>`` with a per-symbol counter in
rewriting order, so two runs over the same input produce identical
variable names and constraint order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geolang import (
    App,
    Atom,
    Declaration,
    DefinitionDecl,
    Formula,
    Iff,
    Implies,
    Not,
    Sort,
    Term,
    TypedProgram,
    Var,
    flatten_conjunction,
    pretty_term,
)
from .geolang.registry import PREDICATE, PRIMITIVE, PROJECTION, TUPLE

_PROJECTION_INDEX = {
    "vertex1": 0,
    "vertex2": 1,
    "vertex3": 2,
    "end1": 0,
    "end2": 1,
}

_MAX_UNFOLD_DEPTH = 64


class ExpandError(Exception):
    pass


class NoDefinition(ExpandError):
    def __init__(self, symbol: str):
        self.symbol = symbol
        super().__init__(
            f"concept '{symbol}' is outside the profile and has no definition"
        )


class ExpansionCycle(ExpandError):
    def __init__(self, chain: list[str]):
        self.chain = chain
        super().__init__("expansion does not terminate: " + " -> ".join(chain))


class UnsupportedStatement(ExpandError):
    pass


@dataclass(frozen=True)
class Profile:
    """The set of concept symbols a target backend understands."""

    name: str
    allowed: frozenset[str]

    def __contains__(self, symbol: str) -> bool:
        return symbol in self.allowed


@dataclass
class AuxVar:
    """A named witness for a derived term.

    ``constraints`` holds the instantiated defining atoms; it is empty
    when the profile keeps the origin term unexpanded (the variable then
    simply names the term's value).
    """

    name: str
    sort: Sort
    origin: Term
    constraints: list[Atom] = field(default_factory=list)

    @property
    def origin_text(self) -> str:
        return pretty_term(self.origin)


@dataclass
class ExpandedStatement:
    free_vars: list[tuple[str, Sort]]
    aux_vars: list[AuxVar]
    constraints: list[Atom]
    conclusion: Formula | None
    biconditional: bool
    aliases: dict[str, Term] = field(default_factory=dict)
    profile: str = ""

    @property
    def defining_atom_ids(self) -> set[int]:
        out: set[int] = set()
        for aux in self.aux_vars:
            out.update(id(a) for a in aux.constraints)
        return out

    def hypothesis_atoms(self) -> list[Atom]:
        """Constraints that do not define an auxiliary variable."""
        defining = self.defining_atom_ids
        return [a for a in self.constraints if id(a) not in defining]

    def var_sort(self, name: str) -> Sort | None:
        for n, s in self.free_vars:
            if n == name:
                return s
        for aux in self.aux_vars:
            if aux.name == name:
                return aux.sort
        return None


def _substitute(t: Term, mapping: dict[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, Var(t.name, t.loc, t.sort))
    return App(t.head, [_substitute(a, mapping) for a in t.args], t.loc, t.sort)


def _substitute_formula(f: Formula, mapping: dict[str, Term]) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, [_substitute(a, mapping) for a in f.args], f.loc)
    if isinstance(f, Not):
        return Not(_substitute_formula(f.body, mapping), f.loc)
    ctor = type(f)
    return ctor(
        _substitute_formula(f.lhs, mapping),
        _substitute_formula(f.rhs, mapping),
        f.loc,
    )


def _term_key(t: Term) -> tuple:
    if isinstance(t, Var):
        return ("v", t.name)
    return ("a", t.head, tuple(_term_key(x) for x in t.args))


class _Expander:
    def __init__(self, typed: TypedProgram, profile: Profile):
        self.registry = typed.registry
        self.profile = profile
        self.counters: dict[str, int] = {}
        self.memo: dict[tuple, Var] = {}
        self.aliases: dict[str, Term] = {}
        self.free_vars: list[tuple[str, Sort]] = []
        self.aux_vars: list[AuxVar] = []
        self.constraints: list[Atom] = []

    def fresh(self, symbol: str) -> str:
        k = self.counters.get(symbol, 0) + 1
        self.counters[symbol] = k
        return f"_{symbol}{k}"

    def resolve_term(self, t: Term, depth: int = 0) -> Term:
        if depth > _MAX_UNFOLD_DEPTH:
            raise ExpansionCycle([pretty_term(t)])
        if isinstance(t, Var):
            if t.name in self.aliases:
                return self.aliases[t.name]
            return Var(t.name, t.loc, t.sort)
        args = [self.resolve_term(a, depth + 1) for a in t.args]
        sig = self.registry.signature(t.head)
        if sig.kind == PROJECTION:
            base = args[0]
            if not isinstance(base, App) or base.head not in ("triangle", "segment"):
                raise UnsupportedStatement(
                    f"cannot project '{t.head}' from non-tuple value "
                    f"'{pretty_term(base)}'"
                )
            return base.args[_PROJECTION_INDEX[t.head]]
        if sig.kind == TUPLE or t.head in self.profile:
            return App(t.head, args, t.loc, sig.result_sort)
        if sig.kind in (PRIMITIVE, PREDICATE):
            raise NoDefinition(t.head)
        defn = self.registry.definition(t.head)
        if defn is None:
            raise NoDefinition(t.head)
        key = _term_key(App(t.head, args))
        if key in self.memo:
            return self.memo[key]
        name = self.fresh(t.head)
        var = Var(name, t.loc, sig.result_sort)
        self.memo[key] = var
        self.introduce_aux(name, sig.result_sort, App(t.head, args, t.loc, sig.result_sort), defn, args, var, depth)
        return var

    def introduce_aux(
        self,
        name: str,
        sort: Sort,
        origin: Term,
        defn: DefinitionDecl,
        args: list[Term],
        var: Var,
        depth: int,
    ) -> None:
        aux = AuxVar(name, sort, origin)
        self.aux_vars.append(aux)
        mapping = {pname: arg for (pname, _), arg in zip(defn.params, args)}
        mapping[defn.result[0]] = var
        body = _substitute_formula(defn.body, mapping)
        for conjunct in flatten_conjunction(body):
            if not isinstance(conjunct, Atom):
                raise UnsupportedStatement(
                    f"definition body of '{defn.symbol}' is not a "
                    "conjunction of atoms"
                )
            atom = self.resolve_atom(conjunct, depth + 1)
            aux.constraints.append(atom)
            self.constraints.append(atom)

    def resolve_atom(self, a: Atom, depth: int = 0) -> Atom:
        if a.pred not in self.profile:
            raise NoDefinition(a.pred)
        return Atom(a.pred, [self.resolve_term(x, depth + 1) for x in a.args], a.loc)

    def rewrite_formula(self, f: Formula, depth: int = 0) -> Formula:
        if isinstance(f, Atom):
            return self.resolve_atom(f, depth)
        if isinstance(f, Not):
            return Not(self.rewrite_formula(f.body, depth), f.loc)
        ctor = type(f)
        return ctor(
            self.rewrite_formula(f.lhs, depth),
            self.rewrite_formula(f.rhs, depth),
            f.loc,
        )

    def declare(self, decl: Declaration) -> None:
        ctor = decl.ctor
        if isinstance(ctor, Var):
            self.aliases[decl.name] = self.resolve_term(ctor)
            return
        sig = self.registry.signature(ctor.head)
        if ctor.head == "point":
            self.free_vars.append((decl.name, Sort.POINT))
            return
        if sig.kind in (PRIMITIVE, TUPLE):
            self.aliases[decl.name] = self.resolve_term(ctor)
            return
        if sig.kind == PROJECTION:
            self.aliases[decl.name] = self.resolve_term(ctor)
            return
        # derived constructor: the declared name is the witness variable
        args = [self.resolve_term(a) for a in ctor.args]
        resolved = App(ctor.head, args, ctor.loc, sig.result_sort)
        if ctor.head in self.profile:
            self.aux_vars.append(AuxVar(decl.name, sig.result_sort, resolved))
            return
        defn = self.registry.definition(ctor.head)
        if defn is None:
            raise NoDefinition(ctor.head)
        var = Var(decl.name, decl.loc, sig.result_sort)
        self.introduce_aux(
            decl.name, sig.result_sort, resolved, defn, args, var, 0
        )


def expand(typed: TypedProgram, profile: Profile) -> ExpandedStatement:
    """Rewrite a typed statement so every symbol lies in the profile.

    Declarations of free points become free variables; declarations
    built from derived constructors keep their declared name as the
    witness variable.  Of the program's formulas, the last one is the
    conclusion (a top-level ``<=>`` marks a biconditional theorem and a
    top-level ``=>`` contributes its premise atoms as hypotheses); any
    earlier formulas must be conjunctions of atoms and join the
    constraint list.
    """
    ex = _Expander(typed, profile)
    for item in typed.program.items:
        if isinstance(item, Declaration):
            ex.declare(item)
        elif isinstance(item, DefinitionDecl):
            continue  # already part of the typed registry
        else:
            pass
    formulas = typed.program.formulas
    biconditional = False
    conclusion: Formula | None = None
    for f in formulas[:-1]:
        for conjunct in flatten_conjunction(f):
            if not isinstance(conjunct, Atom):
                raise UnsupportedStatement(
                    "hypothesis formulas must be conjunctions of atoms"
                )
            ex.constraints.append(ex.resolve_atom(conjunct))
    if formulas:
        last = formulas[-1]
        if isinstance(last, Iff):
            biconditional = True
            conclusion = Iff(
                ex.rewrite_formula(last.lhs), ex.rewrite_formula(last.rhs), last.loc
            )
        elif isinstance(last, Implies):
            for conjunct in flatten_conjunction(last.lhs):
                if not isinstance(conjunct, Atom):
                    raise UnsupportedStatement(
                        "theorem premise must be a conjunction of atoms"
                    )
                ex.constraints.append(ex.resolve_atom(conjunct))
            conclusion = ex.rewrite_formula(last.rhs)
        else:
            conclusion = ex.rewrite_formula(last)
    return ExpandedStatement(
        free_vars=ex.free_vars,
        aux_vars=ex.aux_vars,
        constraints=ex.constraints,
        conclusion=conclusion,
        biconditional=biconditional,
        aliases=ex.aliases,
        profile=profile.name,
    )


# --- shipped profiles ---------------------------------------------------

PROFILE_HEADER = "geobook-profile v1"


def parse_profile(text: str, path: str = "<string>") -> Profile:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != PROFILE_HEADER:
        raise ExpandError(f"{path}: not a '{PROFILE_HEADER}' file")
    name = ""
    allowed: set[str] = set()
    for ln in lines[1:]:
        if ln.startswith("#"):
            continue
        key, _, value = ln.partition("=")
        if key == "name":
            name = value
        elif key == "allow":
            allowed.add(value)
        else:
            raise ExpandError(f"{path}: bad profile line {ln!r}")
    if not name:
        raise ExpandError(f"{path}: profile has no name")
    return Profile(name, frozenset(allowed))


def load_profile(path) -> Profile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_profile(fh.read(), str(path))


def format_profile(profile: Profile) -> str:
    lines = [PROFILE_HEADER, f"name={profile.name}"]
    lines += [f"allow={s}" for s in sorted(profile.allowed)]
    return "\n".join(lines) + "\n"


def shipped_profile(name: str) -> Profile:
    from importlib import resources

    ref = resources.files("geobook").joinpath(f"data/{name}.profile")
    return parse_profile(ref.read_text(encoding="utf-8"), str(ref))


def prover_core() -> Profile:
    return shipped_profile("prover-core")


def dgs_core() -> Profile:
    return shipped_profile("dgs-core")
