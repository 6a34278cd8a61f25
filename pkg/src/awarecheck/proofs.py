"""Axiom schemas, inference rules, named Hilbert systems, proof checking and
the model-sweep soundness harness.

Schema recognition is first-order syntactic on desugared ASTs: metavariables
stand for whole formulas, agent indices or bound-variable names, and every
occurrence of a metavariable must match the same concrete material.  Prop is
recognized by abstracting maximal non-propositional subformulas to fresh
atoms and truth-tabling.
"""

from dataclasses import dataclass, field
from itertools import count

from .checker import (K_ONLY, KXA, XA, Truth, evaluate, weak_counterexample)
from .fuzz import (random_formula, random_open_formula, random_qf_sentence,
                   random_tautology)
from .syntax import (TOP, A, And, AStar, Forall, Formula, Iff, Implies, K,
                     Not, Or, Prop, Top, Var, X, free_vars,
                     is_quantifier_free, is_sentence, map_props, parse,
                     pretty, subformulas, subst_var, vocabulary)

__all__ = [
    "MetaF", "SCHEMA_NAMES", "RULE_NAMES", "match_axiom", "instantiate",
    "AxiomSystem", "SYSTEMS", "parse_system", "ProofLine", "ProofScript",
    "ProofOutcome", "check_proof", "proof_script_from_dict",
    "SweepViolation", "SweepReport", "soundness_sweep",
    "search_schema_violation", "schema_instances",
]


@dataclass(frozen=True)
class MetaF(Formula):
    """Formula metavariable inside a schema pattern."""

    name: str


def _implies(a, b):
    return Implies(a, b)


def _phi():
    return MetaF("phi")


def _psi():
    return MetaF("psi")


_I = "i"
_XV = "?x"


def _agpp_rhs(conjunct, props):
    """Canonical AGPP right-hand side: right-nested conjunction of the
    conjuncts over the sorted vocabulary; Top when the vocabulary is empty."""
    props = sorted(props)
    if not props:
        return TOP
    acc = conjunct(props[-1])
    for p in reversed(props[:-1]):
        acc = And(conjunct(p), acc)
    return acc


def _match(pat, f, b):
    if isinstance(pat, MetaF):
        got = b.get(pat.name)
        if got is None:
            b[pat.name] = f
            return True
        return got == f
    if type(pat) is not type(f):
        return False
    if isinstance(pat, Top):
        return True
    if isinstance(pat, Prop):
        return pat.name == f.name
    if isinstance(pat, Var):
        if pat.name.startswith("?"):
            got = b.get(pat.name)
            if got is None:
                b[pat.name] = f.name
                return True
            return got == f.name
        return pat.name == f.name
    if isinstance(pat, Not):
        return _match(pat.body, f.body, b)
    if isinstance(pat, And):
        return _match(pat.left, f.left, b) and _match(pat.right, f.right, b)
    if isinstance(pat, (K, A, X)):
        if isinstance(pat.agent, str):
            got = b.get(pat.agent)
            if got is None:
                b[pat.agent] = f.agent
            elif got != f.agent:
                return False
        elif pat.agent != f.agent:
            return False
        return _match(pat.body, f.body, b)
    if isinstance(pat, Forall):
        if pat.var.startswith("?"):
            got = b.get(pat.var)
            if got is None:
                b[pat.var] = f.var
            elif got != f.var:
                return False
        elif pat.var != f.var:
            return False
        return _match(pat.body, f.body, b)
    raise TypeError(f"bad pattern node: {pat!r}")


def _build(pat, b):
    if isinstance(pat, MetaF):
        return b[pat.name]
    if isinstance(pat, (Top, Prop)):
        return pat
    if isinstance(pat, Var):
        return Var(b[pat.name]) if pat.name.startswith("?") else pat
    if isinstance(pat, Not):
        return Not(_build(pat.body, b))
    if isinstance(pat, And):
        return And(_build(pat.left, b), _build(pat.right, b))
    if isinstance(pat, (K, A, X)):
        agent = b[pat.agent] if isinstance(pat.agent, str) else pat.agent
        return type(pat)(agent, _build(pat.body, b))
    if isinstance(pat, Forall):
        var = b[pat.var] if pat.var.startswith("?") else pat.var
        return Forall(var, _build(pat.body, b))
    raise TypeError(f"bad pattern node: {pat!r}")


def _extract_1forall_instance(body, x, inst):
    """Finds psi with body[x/psi] == inst, walking both trees in parallel.
    Returns (ok, psi); psi is None when x has no free occurrence."""
    found = []

    def go(b, i, shadowed):
        if isinstance(b, Var) and b.name == x and not shadowed:
            found.append(i)
            return True
        if type(b) is not type(i):
            return False
        if isinstance(b, (Top,)):
            return True
        if isinstance(b, (Prop, Var)):
            return b == i
        if isinstance(b, Not):
            return go(b.body, i.body, shadowed)
        if isinstance(b, And):
            return go(b.left, i.left, shadowed) and \
                go(b.right, i.right, shadowed)
        if isinstance(b, (K, A, X)):
            return b.agent == i.agent and go(b.body, i.body, shadowed)
        if isinstance(b, Forall):
            if b.var != i.var:
                return False
            return go(b.body, i.body, shadowed or b.var == x)
        return False

    if not go(body, inst, False):
        return False, None
    if not found:
        return True, None
    psi = found[0]
    if any(other != psi for other in found[1:]):
        return False, None
    return True, psi


# --- schema table -----------------------------------------------------------

class Schema:
    def __init__(self, name, pattern=None, side=None, build=None, metas=()):
        self.name = name
        self.pattern = pattern
        self.side = side
        self.build = build
        self.metas = metas


def _astar(agent, body):
    return AStar(agent, body)


def _prop_abstract(f, atoms):
    if isinstance(f, (K, A, X, Forall, Prop, Var)):
        idx = atoms.get(f)
        if idx is None:
            idx = len(atoms)
            atoms[f] = idx
        return ("atom", idx)
    if isinstance(f, Top):
        return ("top",)
    if isinstance(f, Not):
        return ("not", _prop_abstract(f.body, atoms))
    if isinstance(f, And):
        return ("and", _prop_abstract(f.left, atoms),
                _prop_abstract(f.right, atoms))
    raise TypeError(f"not a formula: {f!r}")


def _prop_tautology(f):
    """Truth-tables f after abstracting maximal modal/quantified subformulas
    (and atoms) to propositional letters."""
    atoms = {}
    tree = _prop_abstract(f, atoms)
    n = len(atoms)
    if n > 20:
        raise ValueError("too many distinct atoms for truth-tabling")

    def ev(t, row):
        tag = t[0]
        if tag == "atom":
            return bool((row >> t[1]) & 1)
        if tag == "top":
            return True
        if tag == "not":
            return not ev(t[1], row)
        return ev(t[1], row) and ev(t[2], row)

    return all(ev(tree, row) for row in range(1 << n))


def _match_prop(f, config):
    return {"tautology": True} if _prop_tautology(f) else None


def _side_agpp(conjunct):
    def side(b, config):
        want = _agpp_rhs(lambda p: conjunct(b[_I], Prop(p)),
                         vocabulary(b["phi"]))
        return b["rhs"] == want
    return side


def _build_agpp(conjunct, wrap):
    def build(b):
        return Iff(wrap(b[_I], b["phi"]),
                   _agpp_rhs(lambda p: conjunct(b[_I], Prop(p)),
                             vocabulary(b["phi"])))
    return build


def _side_1forall(b, config):
    ok, psi = _extract_1forall_instance(b["phi"], b[_XV], b["inst"])
    if not ok:
        return False
    if psi is None:
        return True
    if not is_quantifier_free(psi) or not is_sentence(psi):
        return False
    if not config.get("include_top", False):
        if any(isinstance(g, Top) for g in subformulas(psi)):
            return False
    b["psi"] = psi
    return True


def _build_1forall(b):
    return Implies(Forall(b[_XV], b["phi"]),
                   subst_var(b["phi"], b[_XV], b["psi"]))


def _side_nforall(b, config):
    return b[_XV] not in free_vars(b["phi"])


def _schemas():
    phi, psi = _phi(), _psi()
    xv = Var(_XV)
    table = {}

    def put(name, pattern=None, side=None, build=None, metas=()):
        table[name] = Schema(name, pattern, side, build, metas)

    put("Prop", metas=("taut",))
    put("AGPP",
        pattern=Iff(A(_I, phi), MetaF("rhs")),
        side=_side_agpp(lambda i, g: A(i, g)),
        build=_build_agpp(lambda i, g: A(i, g), lambda i, g: A(i, g)),
        metas=(_I, "phi"))
    put("KA", Implies(A(_I, phi), K(_I, A(_I, phi))), metas=(_I, "phi"))
    put("NKA", Implies(Not(A(_I, phi)), K(_I, Not(A(_I, phi)))),
        metas=(_I, "phi"))
    put("K", Implies(And(K(_I, phi), K(_I, Implies(phi, psi))), K(_I, psi)),
        metas=(_I, "phi", "psi"))
    put("T", Implies(K(_I, phi), phi), metas=(_I, "phi"))
    put("4", Implies(K(_I, phi), K(_I, K(_I, phi))), metas=(_I, "phi"))
    put("5", Implies(Not(K(_I, phi)), K(_I, Not(K(_I, phi)))),
        metas=(_I, "phi"))
    put("A0", Iff(X(_I, phi), And(K(_I, phi), A(_I, phi))),
        metas=(_I, "phi"))
    put("1_forall",
        pattern=Implies(Forall(_XV, phi), MetaF("inst")),
        side=_side_1forall, build=_build_1forall,
        metas=(_XV, "phi:open", "psi:qf"))
    put("K_forall",
        Implies(Forall(_XV, Implies(phi, psi)),
                Implies(Forall(_XV, phi), Forall(_XV, psi))),
        metas=(_XV, "phi:open", "psi:open"))
    put("N_forall", Implies(phi, Forall(_XV, phi)), side=_side_nforall,
        metas=(_XV, "phi"))
    put("Barcan", Implies(Forall(_XV, K(_I, phi)), K(_I, Forall(_XV, phi))),
        metas=(_I, _XV, "phi:open"))
    put("K_X", Implies(And(X(_I, phi), X(_I, Implies(phi, psi))), X(_I, psi)),
        metas=(_I, "phi", "psi"))
    put("T_X", Implies(X(_I, phi), phi), metas=(_I, "phi"))
    put("4_X", Implies(X(_I, phi), X(_I, X(_I, phi))), metas=(_I, "phi"))
    put("5_X", Implies(And(Not(X(_I, phi)), A(_I, phi)),
                       X(_I, Not(X(_I, phi)))), metas=(_I, "phi"))
    put("XA", Implies(A(_I, phi), X(_I, A(_I, phi))), metas=(_I, "phi"))
    put("A0_X", Implies(X(_I, phi), A(_I, phi)), metas=(_I, "phi"))
    put("FA_X",
        Implies(Not(Forall(_XV, A(_I, xv))),
                X(_I, Not(Forall(_XV, A(_I, xv))))),
        metas=(_I, _XV))
    put("Barcan_X", Implies(Forall(_XV, X(_I, phi)), X(_I, Forall(_XV, phi))),
        metas=(_I, _XV, "phi:open"))
    put("Barcan_star_X",
        Implies(And(A(_I, Forall(_XV, phi)),
                    Forall(_XV, Implies(A(_I, xv), X(_I, phi)))),
                X(_I, Implies(Forall(_XV, A(_I, xv)), Forall(_XV, phi)))),
        metas=(_I, _XV, "phi:open"))
    put("FA_star_X",
        Implies(Forall(_XV, Not(A(_I, xv))),
                X(_I, Forall(_XV, Not(A(_I, xv))))),
        metas=(_I, _XV))
    put("AGPP_star",
        pattern=Iff(_astar(_I, phi), MetaF("rhs")),
        side=_side_agpp(lambda i, g: _astar(i, g)),
        build=_build_agpp(lambda i, g: _astar(i, g),
                          lambda i, g: _astar(i, g)),
        metas=(_I, "phi"))
    put("XA_star", Implies(_astar(_I, phi), K(_I, _astar(_I, phi))),
        metas=(_I, "phi"))
    put("A0_star", Implies(K(_I, phi), _astar(_I, phi)), metas=(_I, "phi"))
    put("5_star", Implies(And(Not(K(_I, phi)), _astar(_I, phi)),
                          K(_I, Not(K(_I, phi)))), metas=(_I, "phi"))
    put("Barcan_star",
        Implies(And(_astar(_I, Forall(_XV, phi)),
                    Forall(_XV, Implies(_astar(_I, xv), K(_I, phi)))),
                K(_I, Implies(Forall(_XV, _astar(_I, xv)),
                              Forall(_XV, phi)))),
        metas=(_I, _XV, "phi:open"))
    put("FA_star",
        Implies(Forall(_XV, Not(_astar(_I, xv))),
                K(_I, Forall(_XV, Not(_astar(_I, xv))))),
        metas=(_I, _XV))
    return table


_SCHEMAS = _schemas()
SCHEMA_NAMES = tuple(_SCHEMAS)


def match_axiom(f, name, include_top=False):
    """Bindings when the sentence f instantiates the named schema, else
    None.  Never raises on a non-instance."""
    schema = _SCHEMAS.get(name)
    if schema is None:
        raise KeyError(f"unknown axiom schema {name!r}")
    config = {"include_top": include_top}
    if name == "Prop":
        return _match_prop(f, config)
    b = {}
    if not _match(schema.pattern, f, b):
        return None
    if schema.side is not None and not schema.side(b, config):
        return None
    return b


def instantiate(name, bindings):
    """Emit the schema instance determined by the metavariable bindings."""
    schema = _SCHEMAS.get(name)
    if schema is None:
        raise KeyError(f"unknown axiom schema {name!r}")
    if schema.build is not None:
        return schema.build(bindings)
    if schema.pattern is None:
        raise ValueError(f"schema {name} has no instantiator")
    return _build(schema.pattern, bindings)


# --- rules ------------------------------------------------------------------

RULE_NAMES = ("MP", "Gen_K", "Gen_X", "Gen_star", "Gen_forall")


def _check_rule(name, premises, conclusion, agent=None, q=None, x=None):
    """None when the application is correct, else a reason string."""
    if name == "MP":
        if len(premises) != 2:
            return "MP takes two premises"
        if premises[1] != Implies(premises[0], conclusion):
            return "second premise is not (first premise -> conclusion)"
        return None
    if name in ("Gen_K", "Gen_X", "Gen_star"):
        if len(premises) != 1:
            return f"{name} takes one premise"
        if agent is None:
            return f"{name} needs an agent"
        want = {
            "Gen_K": lambda: K(agent, premises[0]),
            "Gen_X": lambda: Implies(A(agent, premises[0]),
                                     X(agent, premises[0])),
            "Gen_star": lambda: Implies(AStar(agent, premises[0]),
                                        K(agent, premises[0])),
        }[name]()
        if conclusion != want:
            return f"conclusion does not match {name} of the premise"
        return None
    if name == "Gen_forall":
        if len(premises) != 1:
            return "Gen_forall takes one premise"
        if q is None or x is None:
            return "Gen_forall needs the proposition q and the variable x"
        if not isinstance(conclusion, Forall) or conclusion.var != x:
            return f"conclusion is not a universal over #{x}"
        body = conclusion.body
        if q in vocabulary(body):
            return f"{q} must be fully replaced in the conclusion body"
        if subst_var(body, x, Prop(q)) != premises[0]:
            return "premise is not conclusion-body[x/q]"
        return None
    return f"unknown rule {name!r}"


# --- systems ----------------------------------------------------------------

@dataclass(frozen=True)
class AxiomSystem:
    name: str
    schemas: frozenset
    rules: frozenset
    modal_ops: frozenset
    quantifiers: bool
    domain: object

    def allows(self, f):
        """None when f lies in the system's language, else a reason."""
        for g in subformulas(f):
            if isinstance(g, K) and "K" not in self.modal_ops:
                return "operator K not in the system language"
            if isinstance(g, A) and "A" not in self.modal_ops:
                return "operator A not in the system language"
            if isinstance(g, X) and "X" not in self.modal_ops:
                return "operator X not in the system language"
            if isinstance(g, Forall) and not self.quantifiers:
                return "quantifier not in the system language"
        return None


def _system(name, schemas, rules, modal_ops, quantifiers, domain):
    return AxiomSystem(name, frozenset(schemas), frozenset(rules),
                       frozenset(modal_ops), quantifiers, domain)


_FORALL_CORE = ("1_forall", "K_forall", "N_forall")

SYSTEMS = {
    # The two systems for structures with one global language.
    "AX_KXAforall": _system(
        "AX_KXAforall",
        ("Prop", "AGPP", "KA", "NKA", "K", "A0", *_FORALL_CORE, "Barcan"),
        ("MP", "Gen_K", "Gen_forall"), ("K", "A", "X"), True, KXA),
    "AX_XAforall": _system(
        "AX_XAforall",
        ("Prop", "AGPP", "XA", "FA_X", "K_X", "A0_X", *_FORALL_CORE,
         "Barcan_X"),
        ("MP", "Gen_X", "Gen_forall"), ("A", "X"), True, XA),
    # Extended (world-relative language) systems.
    "AXe_XAforall": _system(
        "AXe_XAforall",
        ("Prop", "AGPP", "XA", "FA_star_X", "K_X", "A0_X", *_FORALL_CORE,
         "Barcan_star_X"),
        ("MP", "Gen_X", "Gen_forall"), ("A", "X"), True, XA),
    "AXe_KXAAstarforall": _system(
        "AXe_KXAAstarforall",
        ("Prop", "AGPP", "KA", "K", "A0", *_FORALL_CORE, "Barcan_star",
         "AGPP_star", "A0_star", "FA_star"),
        ("MP", "Gen_star", "Gen_forall"), ("K", "A", "X"), True, KXA),
    "AXe_KAstarforall": _system(
        "AXe_KAstarforall",
        ("Prop", "AGPP_star", "FA_star", "K", "A0_star", *_FORALL_CORE,
         "Barcan_star"),
        ("MP", "Gen_star", "Gen_forall"), ("K",), True, K_ONLY),
    "AXe_KAstar": _system(
        "AXe_KAstar",
        ("Prop", "AGPP_star", "K", "A0_star"),
        ("MP", "Gen_star"), ("K",), False, K_ONLY),
}

_EXTENSION_BUNDLES = {
    "T45": ("T", "4", "5"),
    "TX4X5X": ("T_X", "4_X", "5_X"),
    "T45star": ("T", "4", "5_star"),
}


def parse_system(spec):
    """Resolves a system spec like 'AXe_XAforall+TX4X5X'.

    The suffix is a bundle name (T45, TX4X5X, T45star) or a comma-separated
    list of schema names.
    """
    base, _, suffix = spec.partition("+")
    if base not in SYSTEMS:
        raise KeyError(f"unknown axiom system {base!r}")
    system = SYSTEMS[base]
    if not suffix:
        return system
    extra = _EXTENSION_BUNDLES.get(suffix)
    if extra is None:
        extra = tuple(tok for tok in suffix.split(",") if tok)
        for tok in extra:
            if tok not in _SCHEMAS:
                raise KeyError(f"unknown schema {tok!r} in extension")
    return AxiomSystem(spec, system.schemas | frozenset(extra), system.rules,
                       system.modal_ops, system.quantifiers, system.domain)


# --- proof scripts -----------------------------------------------------------

@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    axiom: str = None
    rule: str = None
    premises: tuple = ()
    agent: int = None
    q: str = None
    x: str = None


@dataclass(frozen=True)
class ProofScript:
    system: str
    lines: tuple


@dataclass(frozen=True)
class ProofOutcome:
    accepted: bool
    line: int = None
    reason: str = None

    def __str__(self):
        if self.accepted:
            return "accepted"
        return f"rejected at line {self.line}: {self.reason}"


def proof_script_from_dict(d, n_agents=None):
    try:
        system = d["system"]
        raw_lines = d["lines"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed proof script: {exc}") from exc
    lines = []
    for entry in raw_lines:
        formula = parse(entry["formula"], n_agents)
        just = entry.get("just", {})
        if "axiom" in just:
            lines.append(ProofLine(formula, axiom=just["axiom"]))
        elif "rule" in just:
            lines.append(ProofLine(
                formula, rule=just["rule"],
                premises=tuple(just.get("from", ())),
                agent=just.get("agent"), q=just.get("q"), x=just.get("x")))
        else:
            lines.append(ProofLine(formula))
    return ProofScript(system, tuple(lines))


def check_proof(script, system=None, include_top=False):
    """Accepts iff every line is an axiom instance of the system or follows
    from earlier lines by a system rule with its side conditions."""
    if system is None:
        system = parse_system(script.system)
    elif isinstance(system, str):
        system = parse_system(system)
    for no, line in enumerate(script.lines, start=1):
        if not is_sentence(line.formula):
            return ProofOutcome(False, no, "line formula is not a sentence")
        bad = system.allows(line.formula)
        if bad is not None:
            return ProofOutcome(False, no, bad)
        if line.axiom is not None:
            if line.axiom not in _SCHEMAS:
                return ProofOutcome(False, no,
                                    f"unknown axiom {line.axiom!r}")
            if line.axiom not in system.schemas:
                return ProofOutcome(
                    False, no, f"axiom {line.axiom} not in {system.name}")
            if match_axiom(line.formula, line.axiom,
                           include_top=include_top) is None:
                return ProofOutcome(
                    False, no,
                    f"formula is not an instance of {line.axiom}")
        elif line.rule is not None:
            if line.rule not in RULE_NAMES:
                return ProofOutcome(False, no, f"unknown rule {line.rule!r}")
            if line.rule not in system.rules:
                return ProofOutcome(
                    False, no, f"rule {line.rule} not in {system.name}")
            for ref in line.premises:
                if not isinstance(ref, int) or not 1 <= ref < no:
                    return ProofOutcome(
                        False, no, f"premise reference {ref} must point to "
                        "an earlier line")
            prems = [script.lines[ref - 1].formula for ref in line.premises]
            reason = _check_rule(line.rule, prems, line.formula,
                                 agent=line.agent, q=line.q, x=line.x)
            if reason is not None:
                return ProofOutcome(False, no, reason)
        else:
            return ProofOutcome(False, no, "line has no justification")
    return ProofOutcome(True)


# --- soundness sweeps --------------------------------------------------------

@dataclass
class SweepViolation:
    kind: str            # "axiom" or "rule"
    name: str
    model: object
    formula: Formula
    world: str

    def describe(self):
        return (f"{self.kind} {self.name} violated at world {self.world}: "
                f"{pretty(self.formula)}")


@dataclass
class SweepReport:
    system: str
    models_checked: int = 0
    instances: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    rule_findings: list = field(default_factory=list)
    expected_rules: tuple = ()

    @property
    def unexpected(self):
        out = list(self.violations)
        out.extend(v for v in self.rule_findings
                   if v.name not in self.expected_rules)
        return out

    @property
    def expected(self):
        return [v for v in self.rule_findings if v.name in self.expected_rules]

    def ok(self):
        return not self.unexpected


def _meta_bindings(rng, schema, props, n_agents, system, depth):
    """Random metavariable bindings for one schema instance, drawn from the
    system's language."""
    ops = tuple(op for op in ("not", "and", "K", "A", "X")
                if op in ("not", "and") or op in system.modal_ops)
    qprob = 0.2 if system.quantifiers else 0.0
    b = {}
    for meta in schema.metas:
        name, _, kind = meta.partition(":")
        if name == _I:
            b[_I] = rng.randint(1, n_agents)
        elif name == _XV:
            b[_XV] = rng.choice(["x", "y"])
        elif name == "taut":
            pass
        elif kind == "open":
            var = b.get(_XV, "x")
            b[name] = random_formula(rng, props, n_agents, ops=ops,
                                     max_depth=depth, quantifier_prob=qprob,
                                     scope=(var,))
        elif kind == "qf":
            b[name] = random_qf_sentence(rng, props, n_agents, ops=ops,
                                         max_depth=max(1, depth - 1))
        else:
            f = random_formula(rng, props, n_agents, ops=ops, max_depth=depth,
                               quantifier_prob=qprob)
            if name == "phi" and schema.name == "N_forall":
                while b.get(_XV, "x") in free_vars(f):
                    f = random_formula(rng, props, n_agents, ops=ops,
                                       max_depth=depth)
            b[name] = f
    return b


def schema_instances(rng, name, props, n_agents, system, count, depth=3):
    """count fuzzed sentences instantiating the named schema."""
    schema = _SCHEMAS[name]
    out = []
    guard = 0
    while len(out) < count and guard < count * 30:
        guard += 1
        if name == "Prop":
            ops = tuple(op for op in ("not", "and", "K", "A", "X")
                        if op in ("not", "and") or op in system.modal_ops)
            inst = random_tautology(
                rng, props, n_agents, ops=ops, max_depth=max(1, depth - 1),
                quantifier_prob=0.2 if system.quantifiers else 0.0)
        else:
            b = _meta_bindings(rng, schema, props, n_agents, system, depth)
            inst = instantiate(name, b)
        if not is_sentence(inst):
            continue
        if system.allows(inst) is not None:
            continue
        out.append(inst)
    return out


def soundness_sweep(system, models, *, seed=0, rng=None,
                    instances_per_schema=6, instance_depth=3,
                    check_rules=False, rule_samples=4,
                    expected_rules=("MP", "Gen_forall")):
    """Checks weak validity of fuzzed instances of every schema of the
    system on every supplied model, and per-model validity preservation of
    the system's rules.

    Rule-preservation failures for MP and Gen_forall are expected findings
    at finite proposition sets (their general soundness needs infinitely
    many propositions); they are reported but do not make the sweep fail.
    """
    import random as _random
    if isinstance(system, str):
        system = parse_system(system)
    if rng is None:
        rng = _random.Random(seed)
    report = SweepReport(system.name, expected_rules=tuple(expected_rules))
    models = iter(models)
    first = next(models, None)
    if first is None:
        return report
    props = first.props
    n_agents = first.agents
    domain = system.domain
    corpus = {
        name: schema_instances(rng, name, props, n_agents, system,
                               instances_per_schema, instance_depth)
        for name in sorted(system.schemas)
    }
    report.instances = {name: len(insts) for name, insts in corpus.items()}
    m = first
    while m is not None:
        report.models_checked += 1
        pool = []
        for name, insts in corpus.items():
            for inst in insts:
                world = weak_counterexample(m, inst, domain)
                if world is not None:
                    report.violations.append(
                        SweepViolation("axiom", name, m, inst, world))
                else:
                    pool.append(inst)
        if check_rules:
            _check_rules_on_model(system, m, domain, rng, pool, rule_samples,
                                  report)
        m = next(models, None)
    return report


def _check_rules_on_model(system, m, domain, rng, pool, samples, report):
    pool = pool[:40]
    if not pool:
        return
    for rule in sorted(system.rules):
        for _ in range(samples):
            phi = rng.choice(pool)
            if rule == "MP":
                psi = rng.choice(pool)
                imp = Implies(phi, psi)
                if weak_counterexample(m, imp, domain) is not None:
                    continue
                world = weak_counterexample(m, psi, domain)
                if world is not None:
                    report.rule_findings.append(
                        SweepViolation("rule", "MP", m, psi, world))
            elif rule in ("Gen_K", "Gen_X", "Gen_star"):
                agent = rng.randint(1, m.agents)
                conclusion = {
                    "Gen_K": lambda: K(agent, phi),
                    "Gen_X": lambda: Implies(A(agent, phi), X(agent, phi)),
                    "Gen_star": lambda: Implies(AStar(agent, phi),
                                                K(agent, phi)),
                }[rule]()
                world = weak_counterexample(m, conclusion, domain)
                if world is not None:
                    report.rule_findings.append(
                        SweepViolation("rule", rule, m, conclusion, world))
            elif rule == "Gen_forall":
                vocab = sorted(vocabulary(phi))
                if not vocab:
                    continue
                q = rng.choice(vocab)
                x = "z" if "z" not in free_vars(phi) else "z0"
                conclusion = Forall(x, map_props(phi, {q: Var(x)}))
                world = weak_counterexample(m, conclusion, domain)
                if world is not None:
                    report.rule_findings.append(
                        SweepViolation("rule", "Gen_forall", m, conclusion,
                                       world))


def search_schema_violation(name, models, *, seed=0, rng=None, system=None,
                            instances_per_model=6, instance_depth=2,
                            extra_instances=(), domain=None):
    """Searches the models for a world falsifying some instance of the named
    schema; returns the first SweepViolation found, or None."""
    import random as _random
    if rng is None:
        rng = _random.Random(seed)
    if system is None:
        system = SYSTEMS["AXe_KXAAstarforall"]
    if domain is None:
        domain = system.domain
    schema = _SCHEMAS[name]
    for m in models:
        insts = list(extra_instances)
        insts.extend(schema_instances(rng, name, m.props, m.agents, system,
                                      instances_per_model, instance_depth))
        for inst in insts:
            if not is_sentence(inst) or system.allows(inst) is not None:
                continue
            world = weak_counterexample(m, inst, domain)
            if world is not None:
                return SweepViolation("axiom", name, m, inst, world)
    return None
