"""Three-valued truth evaluation with world-relative languages.

A sentence is Undefined at a world exactly when its vocabulary is not
contained in the world's language; otherwise the usual clauses apply, with
K_i phi counting an Undefined successor as a failure.  The propositional
quantifier ranges over an infinite set of quantifier-free sentences; it is
decided by quotienting that set to realizable truth profiles (see kernel).
"""

from dataclasses import dataclass
from enum import Enum

from .kernel import (OP_A, OP_AND, OP_K, OP_NOT, OP_PROP, OP_TOP, OP_X,
                     close_profiles, make_evaluator)
from .syntax import (TOP, A, And, Forall, K, Not, Prop, Top, Var, X,
                     free_vars, is_quantifier_free, is_sentence, vocabulary)
from .syntax import _subst_var

__all__ = [
    "Truth", "QuantifierDomain", "KXA", "XA", "K_ONLY", "Profile",
    "evaluate", "satisfying_worlds", "weak_counterexample", "weakly_valid",
    "realizable_profiles",
    "stabilization_depth", "forall_witness", "ForallProbe",
    "brute_force_forall", "qf_sentences", "evaluate_hr", "direct_evaluate",
    "OracleBudgetExceeded",
]

_ALLOWED_OPS = frozenset({"not", "and", "K", "A", "X"})


class Truth(Enum):
    TRUE = "True"
    FALSE = "False"
    UNDEFINED = "Undefined"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class QuantifierDomain:
    """Operator set generating the quantifier's sentence domain.

    The domain consists of the quantifier-free sentences built from primitive
    propositions with the listed operators; `true` joins the domain only when
    include_top is set (by default the constant is not part of the generated
    language).
    """

    ops: frozenset = _ALLOWED_OPS
    include_top: bool = False

    def __post_init__(self):
        ops = frozenset(self.ops)
        object.__setattr__(self, "ops", ops)
        if not ops:
            raise ValueError("empty quantifier-domain operator set")
        if not ops <= _ALLOWED_OPS:
            raise ValueError(f"unknown operators: {sorted(ops - _ALLOWED_OPS)}")


KXA = QuantifierDomain()
XA = QuantifierDomain(ops=frozenset({"not", "and", "A", "X"}))
K_ONLY = QuantifierDomain(ops=frozenset({"not", "and", "K"}))


@dataclass
class Profile:
    """(vocabulary, partial world-truth map) of a quantifier-free sentence,
    with one realizing witness."""

    vocab: frozenset
    truth: dict
    witness: object


class OracleBudgetExceeded(RuntimeError):
    pass


class _Context:
    """Per-(structure, domain) evaluation state: bitmask encodings, the
    profile fixpoint, and memo tables."""

    def __init__(self, m, domain):
        self.m = m
        self.domain = domain
        self.worlds = m.worlds
        self.props = m.props
        self.widx = {w: i for i, w in enumerate(m.worlds)}
        self.pidx = {p: j for j, p in enumerate(m.props)}
        self.propset = frozenset(m.props)
        nw = len(m.worlds)
        self.nw = nw
        self.full = (1 << nw) - 1
        self.lang_masks = [self._pmask(m.lang[w]) for w in m.worlds]
        self.prop_world_masks = [
            self._wmask([w for w in m.worlds if p in m.lang[w]])
            for p in m.props
        ]
        self.prop_true = [self._wmask([w for w in m.worlds if p in m.val[w]])
                          for p in m.props]
        self.succ = {}
        self.aware = {}
        for i in range(1, m.agents + 1):
            succ = [0] * nw
            for (s, t) in m.rel[i]:
                succ[self.widx[s]] |= 1 << self.widx[t]
            self.succ[i] = succ
            self.aware[i] = [self._pmask(m.aware[i][w]) for w in m.worlds]
        ops = domain.ops
        self.records, self.layers = close_profiles(
            nw, self.lang_masks, self.prop_true,
            [self.succ[i] for i in range(1, m.agents + 1)],
            [self.aware[i] for i in range(1, m.agents + 1)],
            "not" in ops, "and" in ops, "K" in ops, "A" in ops, "X" in ops,
            domain.include_top, 4_000_000)
        self.profiles = [(rec[0], rec[1]) for rec in self.records]
        self.stab_depth = max(self.layers, default=0)
        self._dom_cache = {0: self.full}
        self._memo = {}
        self._info = {}
        self._witnesses = {}
        self._fast = None
        self._programs = {}

    def _pmask(self, props):
        mask = 0
        for p in props:
            mask |= 1 << self.pidx[p]
        return mask

    def _wmask(self, worlds):
        mask = 0
        for w in worlds:
            mask |= 1 << self.widx[w]
        return mask

    def dom(self, vocab):
        d = self._dom_cache.get(vocab)
        if d is None:
            d = self.full
            v = vocab
            while v:
                j = (v & -v).bit_length() - 1
                v &= v - 1
                d &= self.prop_world_masks[j]
            self._dom_cache[vocab] = d
        return d

    def info(self, f):
        """(proposition mask, free variables) per node; also pins the node so
        id-keyed memos stay sound."""
        got = self._info.get(id(f))
        if got is not None:
            return got[1], got[2]
        if isinstance(f, Prop):
            pm, fv = 1 << self.pidx[f.name], frozenset()
        elif isinstance(f, Top):
            pm, fv = 0, frozenset()
        elif isinstance(f, Var):
            pm, fv = 0, frozenset((f.name,))
        elif isinstance(f, Not):
            pm, fv = self.info(f.body)
        elif isinstance(f, And):
            pml, fvl = self.info(f.left)
            pmr, fvr = self.info(f.right)
            pm, fv = pml | pmr, fvl | fvr
        elif isinstance(f, (K, A, X)):
            if f.agent not in self.succ:
                raise ValueError(f"unknown agent {f.agent}")
            pm, fv = self.info(f.body)
        elif isinstance(f, Forall):
            pm, fv = self.info(f.body)
            fv = fv - {f.var}
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._info[id(f)] = (f, pm, fv)
        return pm, fv

    def masks(self, f, env):
        """(vocabulary mask, truth mask) of f over all worlds under env,
        which binds free variables to profiles."""
        pm, fv = self.info(f)
        if fv:
            key = (id(f), tuple((x, env[x]) for x in fv))
        else:
            key = id(f)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Prop):
            j = self.pidx[f.name]
            res = (1 << j, self.prop_true[j])
        elif isinstance(f, Top):
            res = (0, self.full)
        elif isinstance(f, Var):
            res = env[f.name]
        elif isinstance(f, Not):
            vb, tb = self.masks(f.body, env)
            res = (vb, self.dom(vb) & ~tb)
        elif isinstance(f, And):
            vl, tl = self.masks(f.left, env)
            vr, tr = self.masks(f.right, env)
            res = (vl | vr, tl & tr)
        elif isinstance(f, K):
            vb, tb = self.masks(f.body, env)
            res = (vb, self._k_mask(f.agent, vb, tb))
        elif isinstance(f, A):
            vb, tb = self.masks(f.body, env)
            res = (vb, self._a_mask(f.agent, vb))
        elif isinstance(f, X):
            vb, tb = self.masks(f.body, env)
            res = (vb,
                   self._k_mask(f.agent, vb, tb) & self._a_mask(f.agent, vb))
        elif isinstance(f, Forall):
            veff = pm
            for x in fv:
                veff |= env[x][0]
            result = self.dom(veff)
            for prof in self.profiles:
                env2 = dict(env)
                env2[f.var] = prof
                _, tb = self.masks(f.body, env2)
                result &= ~(self.dom(prof[0]) & ~tb)
                if not result:
                    break
            res = (veff, result)
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._memo[key] = res
        return res

    def _k_mask(self, agent, vocab, truth):
        d = self.dom(vocab)
        succ = self.succ[agent]
        g = 0
        for w in range(self.nw):
            if (d >> w) & 1 and not succ[w] & ~truth:
                g |= 1 << w
        return g

    def _a_mask(self, agent, vocab):
        d = self.dom(vocab)
        aware = self.aware[agent]
        g = 0
        for w in range(self.nw):
            if (d >> w) & 1 and not vocab & ~aware[w]:
                g |= 1 << w
        return g

    def sentence_masks(self, f):
        """Whole-model (vocab, truth) masks of a sentence, through the
        compiled evaluator when available."""
        if self._fast is None:
            if make_evaluator is None:
                self._fast = False
            else:
                agents = range(1, self.m.agents + 1)
                try:
                    self._fast = make_evaluator(
                        self.nw, self.prop_world_masks, self.prop_true,
                        [self.succ[i] for i in agents],
                        [self.aware[i] for i in agents], self.profiles)
                except OverflowError:
                    self._fast = False
        if self._fast is False:
            return self.masks(f, {})
        key = (id(f), self.props)
        entry = _PROGRAMS.get(key)
        if entry is None:
            if len(_PROGRAMS) > 200_000:
                _PROGRAMS.clear()
            entry = (f,) + _compile_program(f, self.pidx)
            _PROGRAMS[key] = entry
        try:
            return self._fast.run(entry[1], entry[2])
        except OverflowError:
            return self.masks(f, {})

    def local_stab_depth(self, w):
        """Max witness layer among profiles whose vocabulary fits the
        world's language."""
        depth = 0
        for (vocab, _), layer in zip(self.profiles, self.layers):
            if (self.dom(vocab) >> w) & 1 and layer > depth:
                depth = layer
        return depth

    def witness_formula(self, idx):
        got = self._witnesses.get(idx)
        if got is None:
            vocab, truth, op, a1, a2, aux = self.records[idx]
            if op == OP_PROP:
                got = Prop(self.props[aux])
            elif op == OP_TOP:
                got = TOP
            elif op == OP_NOT:
                got = Not(self.witness_formula(a1))
            elif op == OP_AND:
                got = And(self.witness_formula(a1), self.witness_formula(a2))
            elif op == OP_K:
                got = K(aux + 1, self.witness_formula(a1))
            elif op == OP_A:
                got = A(aux + 1, self.witness_formula(a1))
            elif op == OP_X:
                got = X(aux + 1, self.witness_formula(a1))
            else:
                raise AssertionError(op)
            self._witnesses[idx] = got
        return got


def _context(m, domain):
    ctx = m._ctx_cache.get(domain)
    if ctx is None:
        ctx = _Context(m, domain)
        m._ctx_cache[domain] = ctx
    return ctx


# program opcodes for the compiled evaluator
_P_PROP, _P_TOP, _P_VAR, _P_NOT, _P_AND, _P_K, _P_A, _P_X, _P_FORALL = \
    range(9)

_PROGRAMS = {}
_FORMULA_INFO = {}


def _finfo(f):
    """(free vars, vocabulary, agent range) of a formula, cached per
    object."""
    got = _FORMULA_INFO.get(id(f))
    if got is None:
        if len(_FORMULA_INFO) > 200_000:
            _FORMULA_INFO.clear()
        agents = [g.agent for g in _walk(f) if isinstance(g, (K, A, X))]
        got = (f, free_vars(f), vocabulary(f), max(agents, default=0),
               min(agents, default=1))
        _FORMULA_INFO[id(f)] = got
    return got[1], got[2], got[3], got[4]


def _compile_program(f, pidx):
    """Flattens a formula into parallel instruction lists for the compiled
    evaluator: (ops, arg1, arg2, aux, static prop masks, used-slot masks,
    slot count) plus the root index.  Bound variables become numbered
    slots; shadowing allocates a fresh slot."""
    ops, a1, a2, aux, props, uses = [], [], [], [], [], []
    slots = {}
    nslots = 0

    def push(o, x, y, z, pm, us):
        ops.append(o)
        a1.append(x)
        a2.append(y)
        aux.append(z)
        props.append(pm)
        uses.append(us)
        return len(ops) - 1

    def go(g):
        nonlocal nslots
        if isinstance(g, Prop):
            j = pidx[g.name]
            return push(_P_PROP, -1, -1, j, 1 << j, 0)
        if isinstance(g, Top):
            return push(_P_TOP, -1, -1, -1, 0, 0)
        if isinstance(g, Var):
            s = slots[g.name]
            return push(_P_VAR, -1, -1, s, 0, 1 << s)
        if isinstance(g, Not):
            b = go(g.body)
            return push(_P_NOT, b, -1, -1, props[b], uses[b])
        if isinstance(g, And):
            left = go(g.left)
            right = go(g.right)
            return push(_P_AND, left, right, -1, props[left] | props[right],
                        uses[left] | uses[right])
        if isinstance(g, (K, A, X)):
            b = go(g.body)
            code = _P_K if isinstance(g, K) else \
                _P_A if isinstance(g, A) else _P_X
            return push(code, b, -1, g.agent - 1, props[b], uses[b])
        if isinstance(g, Forall):
            s = nslots
            nslots += 1
            old = slots.get(g.var)
            slots[g.var] = s
            b = go(g.body)
            if old is None:
                del slots[g.var]
            else:
                slots[g.var] = old
            return push(_P_FORALL, b, -1, s, props[b], uses[b] & ~(1 << s))
        raise TypeError(f"not a formula: {g!r}")

    root = go(f)
    return (ops, a1, a2, aux, props, uses, nslots), root


def _require_sentence(f):
    fv = free_vars(f)
    if fv:
        raise ValueError(f"not a sentence; free variables {sorted(fv)}")


def _check_vocab(m, f):
    missing = vocabulary(f) - set(m.props)
    if missing:
        raise ValueError(f"formula mentions unknown propositions "
                         f"{sorted(missing)}")


def _sentence_masks(m, f, domain):
    """Context plus whole-model (vocab, truth) masks for a sentence."""
    fv, vocab, max_agent, min_agent = _finfo(f)
    if fv:
        raise ValueError(f"not a sentence; free variables {sorted(fv)}")
    if max_agent > m.agents or min_agent < 1:
        raise ValueError(
            f"unknown agent {max_agent if max_agent > m.agents else min_agent}")
    ctx = _context(m, domain)
    if not vocab <= ctx.propset:
        _check_vocab(m, f)
    vmask, truth = ctx.sentence_masks(f)
    return ctx, vmask, truth


def evaluate(m, world, f, domain=KXA):
    """Three-valued truth of the sentence f at a world."""
    ctx, vocab, truth = _sentence_masks(m, f, domain)
    if world not in ctx.widx:
        raise ValueError(f"unknown world {world!r}")
    w = ctx.widx[world]
    if not (ctx.dom(vocab) >> w) & 1:
        return Truth.UNDEFINED
    return Truth.TRUE if (truth >> w) & 1 else Truth.FALSE


def satisfying_worlds(m, f, domain=KXA):
    """Worlds where the sentence f is True, in model order."""
    ctx, vocab, truth = _sentence_masks(m, f, domain)
    mask = ctx.dom(vocab) & truth
    return [w for w in ctx.worlds if (mask >> ctx.widx[w]) & 1]


def weak_counterexample(m, f, domain=KXA):
    """First world where f is False, or None when f is weakly valid in m
    (True or Undefined everywhere)."""
    ctx, vocab, truth = _sentence_masks(m, f, domain)
    bad = ctx.dom(vocab) & ~truth
    if bad:
        return ctx.worlds[(bad & -bad).bit_length() - 1]
    return None


def weakly_valid(m, f, domain=KXA):
    return weak_counterexample(m, f, domain) is None


def realizable_profiles(m, domain=KXA):
    """Every (vocabulary, truth map) realized by a sentence of the domain,
    in fixpoint discovery order, each with a minimal-depth witness."""
    ctx = _context(m, domain)
    out = []
    for idx, (vocab, truth) in enumerate(ctx.profiles):
        vset = frozenset(ctx.props[j] for j in range(len(ctx.props))
                         if (vocab >> j) & 1)
        d = ctx.dom(vocab)
        tmap = {w: bool((truth >> ctx.widx[w]) & 1)
                for w in ctx.worlds if (d >> ctx.widx[w]) & 1}
        out.append(Profile(vset, tmap, ctx.witness_formula(idx)))
    return out


def stabilization_depth(m, domain=KXA):
    """Least d such that depth-<=d sentences already realize every profile."""
    return _context(m, domain).stab_depth


def forall_witness(m, world, f, domain=KXA):
    """A concrete quantifier-free sentence explaining the verdict through a
    failed (or, under a negation, established) quantifier: for a False
    `forall x phi` the instance making phi fail, also when the quantifier is
    buried under negation, conjunction or a refuted K/X.  None when no
    quantifier is responsible."""
    ctx, _, _ = _sentence_masks(m, f, domain)
    if world not in ctx.widx:
        raise ValueError(f"unknown world {world!r}")
    return _quantifier_witness(ctx, ctx.widx[world], f)


def _truth_at(ctx, w, f):
    vocab, truth = ctx.masks(f, {})
    if not (ctx.dom(vocab) >> w) & 1:
        return Truth.UNDEFINED
    return Truth.TRUE if (truth >> w) & 1 else Truth.FALSE


def _quantifier_witness(ctx, w, f):
    value = _truth_at(ctx, w, f)
    if isinstance(f, Forall) and value is Truth.FALSE:
        for idx, prof in enumerate(ctx.profiles):
            if not (ctx.dom(prof[0]) >> w) & 1:
                continue
            _, tb = ctx.masks(f.body, {f.var: prof})
            if not (tb >> w) & 1:
                return ctx.witness_formula(idx)
        return None
    if isinstance(f, Not) and value in (Truth.TRUE, Truth.FALSE):
        return _quantifier_witness(ctx, w, f.body)
    if isinstance(f, And) and value is Truth.FALSE:
        for part in (f.left, f.right):
            if _truth_at(ctx, w, part) is Truth.FALSE:
                got = _quantifier_witness(ctx, w, part)
                if got is not None:
                    return got
        return None
    if isinstance(f, (K, X)) and value is Truth.FALSE:
        succ = ctx.succ[f.agent][w]
        for u in range(ctx.nw):
            if (succ >> u) & 1 and _truth_at(ctx, u, f.body) is Truth.FALSE:
                got = _quantifier_witness(ctx, u, f.body)
                if got is not None:
                    return got
        return None
    return None


# --- quantifier-free sentence enumeration and the brute-force oracle --------

def qf_sentences(props, n_agents, domain, depth, cap=None):
    """All quantifier-free sentences over the given propositions with AST
    depth <= depth, deduplicated, in deterministic layered order."""
    out = [Prop(p) for p in props]
    if domain.include_top:
        out.append(TOP)
    seen = set(out)

    def push(g, new):
        if g not in seen:
            if cap is not None and len(seen) >= cap:
                raise OracleBudgetExceeded(
                    f"sentence enumeration exceeded cap {cap}")
            seen.add(g)
            new.append(g)

    last = list(out)
    ops = domain.ops
    for _ in range(depth):
        new = []
        for f in last:
            if "not" in ops:
                push(Not(f), new)
            for i in range(1, n_agents + 1):
                if "K" in ops:
                    push(K(i, f), new)
                if "A" in ops:
                    push(A(i, f), new)
                if "X" in ops:
                    push(X(i, f), new)
        if "and" in ops:
            for f in last:
                for g in out:
                    push(And(f, g), new)
                    push(And(g, f), new)
                for g in last:
                    push(And(f, g), new)
        out.extend(new)
        last = new
        if not new:
            break
    return out


def direct_evaluate(m, world, f, domain=KXA, forall_depth=2, memo=None,
                    cap=200_000):
    """Straightforward per-world recursive evaluator; quantifiers are
    brute-forced by substituting every domain sentence up to forall_depth.

    Independent of the profile machinery; exact whenever the depth covers
    every realizable profile (see brute_force_forall.stabilized).
    """
    _require_sentence(f)
    _check_vocab(m, f)
    _, _, max_agent, min_agent = _finfo(f)
    if max_agent > m.agents or min_agent < 1:
        raise ValueError("unknown agent")
    state = _oracle_state(m, memo, cap)
    return _direct(m, m.worlds.index(world), f, domain, forall_depth, state)


def _oracle_state(m, memo, cap):
    succs = m._ctx_cache.get("oracle_succs")
    if succs is None:
        succs = {i: {w: [] for w in m.worlds} for i in range(1, m.agents + 1)}
        for i in range(1, m.agents + 1):
            for (s, t) in sorted(m.rel[i],
                                 key=lambda p: (m.worlds.index(p[0]),
                                                m.worlds.index(p[1]))):
                succs[i][s].append(m.worlds.index(t))
        m._ctx_cache["oracle_succs"] = succs
    state = {} if memo is None else memo
    state.setdefault("memo", {})
    state.setdefault("vocab", {})
    state["count"] = 0
    state["cap"] = cap
    return state


def _vocab_cached(f, cache):
    got = cache.get(id(f))
    if got is not None:
        return got[1]
    if isinstance(f, Prop):
        v = frozenset((f.name,))
    elif isinstance(f, (Top, Var)):
        v = frozenset()
    elif isinstance(f, And):
        v = _vocab_cached(f.left, cache) | _vocab_cached(f.right, cache)
    else:
        v = _vocab_cached(f.body, cache)
    cache[id(f)] = (f, v)
    return v


def _direct(m, widx, f, domain, depth, state):
    key = (id(f), widx)
    hit = state["memo"].get(key)
    if hit is not None:
        return hit[1]
    world = m.worlds[widx]
    lang = m.lang[world]
    if _vocab_cached(f, state["vocab"]) - lang:
        value = Truth.UNDEFINED
    elif isinstance(f, Top):
        value = Truth.TRUE
    elif isinstance(f, Prop):
        value = Truth.TRUE if f.name in m.val[world] else Truth.FALSE
    elif isinstance(f, Var):
        raise ValueError("free variable in direct evaluation")
    elif isinstance(f, Not):
        sub = _direct(m, widx, f.body, domain, depth, state)
        value = Truth.FALSE if sub is Truth.TRUE else Truth.TRUE
    elif isinstance(f, And):
        lt = _direct(m, widx, f.left, domain, depth, state)
        rt = _direct(m, widx, f.right, domain, depth, state)
        value = Truth.TRUE if (lt is Truth.TRUE and rt is Truth.TRUE) \
            else Truth.FALSE
    elif isinstance(f, K):
        value = Truth.TRUE
        for u in m._ctx_cache["oracle_succs"][f.agent][world]:
            if _direct(m, u, f.body, domain, depth, state) is not Truth.TRUE:
                value = Truth.FALSE
                break
    elif isinstance(f, A):
        value = Truth.TRUE \
            if _vocab_cached(f.body, state["vocab"]) <= m.aware[f.agent][world] \
            else Truth.FALSE
    elif isinstance(f, X):
        value = _direct(m, widx, A(f.agent, f.body), domain, depth, state)
        if value is Truth.TRUE:
            value = _direct(m, widx, K(f.agent, f.body), domain, depth, state)
    elif isinstance(f, Forall):
        value = Truth.TRUE
        for psi in _oracle_corpus(m, lang, domain, depth, state):
            state["count"] += 1
            if state["count"] > state["cap"]:
                raise OracleBudgetExceeded(
                    f"brute-force instance cap {state['cap']} exceeded")
            inst = _subst_var(f.body, f.var, psi)
            if _direct(m, widx, inst, domain, depth, state) is not Truth.TRUE:
                value = Truth.FALSE
                break
    else:
        raise TypeError(f"not a formula: {f!r}")
    state["memo"][key] = (f, value)
    return value


def _oracle_corpus(m, lang, domain, depth, state):
    key = ("oracle_corpus", frozenset(lang), domain, depth)
    corpus = m._ctx_cache.get(key)
    if corpus is None:
        local = [p for p in m.props if p in lang]
        corpus = qf_sentences(local, m.agents, domain, depth,
                              cap=state["cap"])
        m._ctx_cache[key] = corpus
    return corpus


@dataclass
class ForallProbe:
    value: Truth
    stabilized: bool
    depth: int
    instances: int
    witness: object


def brute_force_forall(m, world, body, var, depth, domain=KXA, cap=200_000,
                       memo=None):
    """Decides `forall var . body` at a world by enumerating every domain
    sentence of AST depth <= depth and checking the substitution instances.

    stabilized reports when the verdict is exact: a False verdict with a
    concrete witness certifies itself (for bodies without nested
    quantifiers), a True verdict is exact once the depth covers every
    realizable profile over the world's language, and any verdict is exact
    once the depth covers the whole fixpoint.
    """
    fv = free_vars(body)
    if fv != frozenset((var,)):
        raise ValueError(f"body must have exactly {var!r} free, has "
                         f"{sorted(fv)}")
    _check_vocab(m, body)
    ctx = _context(m, domain)
    if world not in ctx.widx:
        raise ValueError(f"unknown world {world!r}")
    lang = m.lang[world]
    widx = m.worlds.index(world)
    nested = not is_quantifier_free(body)
    global_cover = ctx.stab_depth <= depth
    local_cover = global_cover or ctx.local_stab_depth(widx) <= depth

    def stab(value):
        if value is Truth.UNDEFINED or global_cover:
            return True
        if nested:
            return False
        if value is Truth.FALSE:
            return True
        return local_cover

    state = _oracle_state(m, memo, cap)
    if vocabulary(body) - lang:
        return ForallProbe(Truth.UNDEFINED, stab(Truth.UNDEFINED), depth, 0,
                           None)
    n = 0
    for psi in _oracle_corpus(m, lang, domain, depth, state):
        n += 1
        if n > cap:
            raise OracleBudgetExceeded(f"instance cap {cap} exceeded")
        inst = _subst_var(body, var, psi)
        if _direct(m, widx, inst, domain, depth, state) is not Truth.TRUE:
            return ForallProbe(Truth.FALSE, stab(Truth.FALSE), depth, n, psi)
    return ForallProbe(Truth.TRUE, stab(Truth.TRUE), depth, n, None)


# --- constant-language (single global language) evaluator -------------------

def evaluate_hr(m, world, f, domain=KXA):
    """Two-valued evaluator for the semantics without world-relative
    languages: every sentence is defined everywhere, awareness is read off
    the awareness vocabularies, and the quantifier ranges over all domain
    sentences over the full proposition set.

    On structures with lang(s) == props everywhere this agrees with
    evaluate(); that agreement is part of the test suite.
    """
    _require_sentence(f)
    _check_vocab(m, f)
    _, _, max_agent, min_agent = _finfo(f)
    if max_agent > m.agents or min_agent < 1:
        raise ValueError("unknown agent")
    key = ("hr", domain)
    cache = m._ctx_cache.get(key)
    if cache is None:
        widx = {w: i for i, w in enumerate(m.worlds)}
        pidx = {p: j for j, p in enumerate(m.props)}
        nw = len(m.worlds)
        full = (1 << nw) - 1
        prop_true = [sum(1 << widx[w] for w in m.worlds if p in m.val[w])
                     for p in m.props]
        succ = [[0] * nw for _ in range(m.agents)]
        aware = [[0] * nw for _ in range(m.agents)]
        for i in range(1, m.agents + 1):
            for (s, t) in m.rel[i]:
                succ[i - 1][widx[s]] |= 1 << widx[t]
            for w in m.worlds:
                for p in m.aware[i][w]:
                    aware[i - 1][widx[w]] |= 1 << pidx[p]
        ops = domain.ops
        # constant full language: every profile is total
        records, _ = close_profiles(
            nw, [(1 << len(m.props)) - 1] * nw, prop_true, succ, aware,
            "not" in ops, "and" in ops, "K" in ops, "A" in ops, "X" in ops,
            domain.include_top, 4_000_000)
        cache = (widx, pidx, succ, aware, full,
                 [(r[0], r[1]) for r in records], prop_true)
        m._ctx_cache[key] = cache
    widx, pidx, succ, aware, full, profiles, prop_true = cache

    def pmask(g, env):
        mask = 0
        for node in _walk(g):
            if isinstance(node, Prop):
                mask |= 1 << pidx[node.name]
            elif isinstance(node, Var) and node.name in env:
                mask |= env[node.name][0]
        return mask

    def ev(w, g, env):
        if isinstance(g, Top):
            return True
        if isinstance(g, Prop):
            return bool((prop_true[pidx[g.name]] >> w) & 1)
        if isinstance(g, Var):
            return bool((env[g.name][1] >> w) & 1)
        if isinstance(g, Not):
            return not ev(w, g.body, env)
        if isinstance(g, And):
            return ev(w, g.left, env) and ev(w, g.right, env)
        if isinstance(g, K):
            succs = succ[g.agent - 1][w]
            return all(not (succs >> u) & 1 or ev(u, g.body, env)
                       for u in range(len(m.worlds)))
        if isinstance(g, A):
            return not pmask(g.body, env) & ~aware[g.agent - 1][w]
        if isinstance(g, X):
            return ev(w, A(g.agent, g.body), env) and \
                ev(w, K(g.agent, g.body), env)
        if isinstance(g, Forall):
            for prof in profiles:
                env2 = dict(env)
                env2[g.var] = prof
                if not ev(w, g.body, env2):
                    return False
            return True
        raise TypeError(f"not a formula: {g!r}")

    value = ev(widx[world], f, {})
    return Truth.TRUE if value else Truth.FALSE


def _walk(f):
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, Not):
            stack.append(g.body)
        elif isinstance(g, And):
            stack.extend((g.left, g.right))
        elif isinstance(g, (K, A, X, Forall)):
            stack.append(g.body)
