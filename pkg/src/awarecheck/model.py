"""Extended awareness structures: finite Kripke models in which every world
carries its own sublanguage, plus per-agent awareness vocabularies.

Includes structural validation, JSON (de)serialization, seeded random
generation, exhaustive enumeration at desk scale, and the two
truth-preserving transformations (injective renaming, label swap).
"""

import json
import random
from dataclasses import dataclass, field
from itertools import product

__all__ = [
    "AwarenessStructure", "InvalidStructure", "PropertyReport",
    "parse_model_class", "validate", "generate_random", "enumerate_models",
    "count_models", "rename_props", "swap_model", "model_to_dict",
    "model_from_dict", "load_model", "save_model",
]


class InvalidStructure(ValueError):
    pass


def parse_model_class(text):
    """Parses a class spec like 'r,t,e', 'rte' or '' into a frozenset."""
    letters = [c for c in text.replace(",", "").replace(" ", "")]
    cls = frozenset(letters)
    if not cls <= {"r", "t", "e"}:
        raise ValueError(f"unknown class properties in {text!r}")
    return cls


class AwarenessStructure:
    """A finite structure (S, L, pi, K_1..K_n, A_1..A_n) over propositions
    props.

    lang/val/aware store vocabularies as frozensets; by generation from
    primitive propositions, the awareness vocabulary A_i(s) determines the
    full sentence set the agent is aware of.
    """

    __slots__ = ("agents", "props", "worlds", "lang", "val", "rel", "aware",
                 "_ctx_cache")

    def __init__(self, agents, props, worlds, lang, val, rel, aware,
                 check=True):
        self.agents = int(agents)
        self.props = tuple(props)
        self.worlds = tuple(worlds)
        self.lang = {w: frozenset(lang[w]) for w in self.worlds}
        self.val = {w: frozenset(val[w]) for w in self.worlds}
        self.rel = {i: frozenset(tuple(p) for p in rel[i])
                    for i in range(1, self.agents + 1)}
        self.aware = {i: {w: frozenset(aware[i][w]) for w in self.worlds}
                      for i in range(1, self.agents + 1)}
        self._ctx_cache = {}
        if check:
            self._check()

    def _check(self):
        if self.agents < 1:
            raise InvalidStructure("need at least one agent")
        if len(set(self.worlds)) != len(self.worlds):
            raise InvalidStructure("duplicate world ids")
        if len(set(self.props)) != len(self.props):
            raise InvalidStructure("duplicate proposition ids")
        props = set(self.props)
        worlds = set(self.worlds)
        for w in self.worlds:
            if not self.lang[w]:
                raise InvalidStructure(f"empty language at world {w!r}")
            if not self.lang[w] <= props:
                raise InvalidStructure(f"language at {w!r} mentions unknown "
                                       "propositions")
            if not self.val[w] <= self.lang[w]:
                raise InvalidStructure(
                    f"valuation at {w!r} not contained in its language")
        for i in range(1, self.agents + 1):
            for (s, t) in sorted(self.rel[i]):
                if s not in worlds or t not in worlds:
                    raise InvalidStructure(
                        f"relation of agent {i} mentions unknown world")
            for w in self.worlds:
                if not self.aware[i][w] <= self.lang[w]:
                    raise InvalidStructure(
                        f"A_{i}({w!r}) not contained in the language of {w!r}")
            for (s, t) in sorted(self.rel[i]):
                if self.aware[i][s] != self.aware[i][t]:
                    raise InvalidStructure(
                        f"ka fails for agent {i} on edge ({s!r}, {t!r})")
                if not self.aware[i][s] <= self.lang[t]:
                    raise InvalidStructure(
                        f"A_{i}({s!r}) not contained in the language of the "
                        f"successor {t!r}")

    def successors(self, agent, world):
        return [t for (s, t) in sorted(self.rel[agent]) if s == world]

    def key(self):
        return (
            self.agents, self.props, self.worlds,
            tuple(tuple(sorted(self.lang[w])) for w in self.worlds),
            tuple(tuple(sorted(self.val[w])) for w in self.worlds),
            tuple(tuple(sorted(self.rel[i]))
                  for i in range(1, self.agents + 1)),
            tuple(tuple(tuple(sorted(self.aware[i][w])) for w in self.worlds)
                  for i in range(1, self.agents + 1)),
        )

    def __eq__(self, other):
        return (isinstance(other, AwarenessStructure)
                and self.key() == other.key())

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return (f"AwarenessStructure(agents={self.agents}, "
                f"worlds={list(self.worlds)}, props={list(self.props)})")


@dataclass
class PropertyReport:
    reflexive: bool
    transitive: bool
    euclidean: bool
    ka: bool
    containment: bool
    la: bool
    witnesses: dict = field(default_factory=dict)

    def satisfies(self, model_class):
        ok = self.ka and self.containment
        if "r" in model_class:
            ok = ok and self.reflexive
        if "t" in model_class:
            ok = ok and self.transitive
        if "e" in model_class:
            ok = ok and self.euclidean
        return ok

    def as_dict(self):
        return {
            "reflexive": self.reflexive,
            "transitive": self.transitive,
            "euclidean": self.euclidean,
            "ka": self.ka,
            "containment": self.containment,
            "la": self.la,
            "witnesses": {k: list(v) for k, v in self.witnesses.items()},
        }


def validate(m):
    """Checks r/t/e/ka/containment/LA by direct quantifier elimination.

    Witnesses are the first offenders in (agent, world, ...) enumeration
    order.
    """
    witnesses = {}

    def relation(i):
        succ = {w: set() for w in m.worlds}
        for (s, t) in m.rel[i]:
            succ[s].add(t)
        return succ

    succs = {i: relation(i) for i in range(1, m.agents + 1)}

    def first_r():
        for i in range(1, m.agents + 1):
            for w in m.worlds:
                if w not in succs[i][w]:
                    return (i, w)
        return None

    def first_t():
        for i in range(1, m.agents + 1):
            for s in m.worlds:
                for t in m.worlds:
                    if t not in succs[i][s]:
                        continue
                    for u in m.worlds:
                        if u in succs[i][t] and u not in succs[i][s]:
                            return (i, s, t, u)
        return None

    def first_e():
        for i in range(1, m.agents + 1):
            for s in m.worlds:
                for t in m.worlds:
                    if t not in succs[i][s]:
                        continue
                    for u in m.worlds:
                        if u in succs[i][s] and u not in succs[i][t]:
                            return (i, s, t, u)
        return None

    def first_ka():
        for i in range(1, m.agents + 1):
            for s in m.worlds:
                for t in m.worlds:
                    if t in succs[i][s] and m.aware[i][s] != m.aware[i][t]:
                        return (i, s, t)
        return None

    def first_containment():
        for i in range(1, m.agents + 1):
            for s in m.worlds:
                own = m.aware[i][s] - m.lang[s]
                if own:
                    return (i, s, s, min(own))
                for t in m.worlds:
                    if t not in succs[i][s]:
                        continue
                    missing = m.aware[i][s] - m.lang[t]
                    if missing:
                        return (i, s, t, min(missing))
        return None

    def first_la():
        for i in range(1, m.agents + 1):
            for s in m.worlds:
                for p in m.props:
                    if p in m.aware[i][s]:
                        continue
                    if all(p in m.lang[t] for t in succs[i][s]):
                        return (i, s, p)
        return None

    checks = {
        "reflexive": first_r, "transitive": first_t, "euclidean": first_e,
        "ka": first_ka, "containment": first_containment, "la": first_la,
    }
    flags = {}
    for name, check in checks.items():
        w = check()
        flags[name] = w is None
        if w is not None:
            witnesses[name] = w
    return PropertyReport(flags["reflexive"], flags["transitive"],
                          flags["euclidean"], flags["ka"],
                          flags["containment"], flags["la"], witnesses)


# --- transformations -------------------------------------------------------

def rename_props(m, tau):
    """Translates m along an injective proposition map tau.

    tau maps propositions in m.props to new names; omitted propositions map
    to themselves.  Languages, valuations and awareness sets are renamed
    pointwise, relations are untouched.
    """
    full = {p: tau.get(p, p) for p in m.props}
    if len(set(full.values())) != len(full):
        raise ValueError("renaming is not injective")

    def ren(s):
        return frozenset(full[p] for p in s)

    return AwarenessStructure(
        m.agents, tuple(full[p] for p in m.props), m.worlds,
        {w: ren(m.lang[w]) for w in m.worlds},
        {w: ren(m.val[w]) for w in m.worlds},
        m.rel,
        {i: {w: ren(m.aware[i][w]) for w in m.worlds}
         for i in range(1, m.agents + 1)},
        check=False)


def swap_model(m, p, p2):
    """Interchanges the roles of p and p2 in languages, valuations and
    awareness sets; everything else is untouched.  An involution."""
    if p == p2:
        raise ValueError("swap needs two distinct propositions")
    if p not in m.props or p2 not in m.props:
        raise ValueError("both propositions must belong to the structure")
    return rename_props(m, {p: p2, p2: p})


# --- random generation -----------------------------------------------------

def _close_relation(pairs, worlds, model_class):
    pairs = set(pairs)
    if "r" in model_class:
        pairs.update((w, w) for w in worlds)
    changed = True
    while changed:
        changed = False
        if "t" in model_class:
            for (s, t) in list(pairs):
                for (t2, u) in list(pairs):
                    if t2 == t and (s, u) not in pairs:
                        pairs.add((s, u))
                        changed = True
        if "e" in model_class:
            for (s, t) in list(pairs):
                for (s2, u) in list(pairs):
                    if s2 == s and (t, u) not in pairs:
                        pairs.add((t, u))
                        changed = True
    return frozenset(pairs)


def _components(pairs, worlds):
    parent = {w: w for w in worlds}

    def find(w):
        while parent[w] != w:
            parent[w] = parent[parent[w]]
            w = parent[w]
        return w

    for (s, t) in pairs:
        rs, rt = find(s), find(t)
        if rs != rt:
            parent[rs] = rt
    comps = {}
    for w in worlds:
        comps.setdefault(find(w), []).append(w)
    return [comps[r] for r in sorted(comps, key=worlds.index)]


def generate_random(agents, n_worlds, props, model_class=frozenset(),
                    seed=0, density=0.35, require_nonempty_awareness=False,
                    rng=None):
    """Draws a structure passing validate() for the requested class.

    Sampling strategy: languages and valuations first, then relations closed
    under the class properties, then one awareness vocabulary per connected
    component drawn from the intersection of the component's languages (which
    makes ka and containment hold by construction).
    """
    if not props:
        raise ValueError("need at least one proposition")
    if rng is None:
        rng = random.Random(seed)
    props = tuple(props)
    worlds = tuple(f"w{j}" for j in range(n_worlds))
    lang = {}
    val = {}
    for w in worlds:
        chosen = [p for p in props if rng.random() < 0.75]
        if not chosen:
            chosen = [rng.choice(props)]
        lang[w] = frozenset(chosen)
        val[w] = frozenset(p for p in sorted(lang[w]) if rng.random() < 0.5)
    rel = {}
    aware = {}
    for i in range(1, agents + 1):
        pairs = {(s, t) for s in worlds for t in worlds
                 if rng.random() < density}
        rel[i] = _close_relation(pairs, worlds, model_class)
        aware[i] = {}
        for comp in _components(rel[i], worlds):
            shared = sorted(frozenset.intersection(*[lang[w] for w in comp]))
            picked = frozenset(p for p in shared if rng.random() < 0.5)
            if require_nonempty_awareness and shared and not picked:
                picked = frozenset((rng.choice(shared),))
            for w in comp:
                aware[i][w] = picked
    return AwarenessStructure(agents, props, worlds, lang, val, rel, aware,
                              check=True)


# --- exhaustive enumeration ------------------------------------------------

_REL_CACHE = {}


def _relations(k, model_class):
    """All relations on k worlds with the class properties, as tuples of
    successor masks, in numeric adjacency order."""
    key = (k, model_class)
    cached = _REL_CACHE.get(key)
    if cached is not None:
        return cached
    if k * k > 20:
        raise ValueError(f"relation enumeration infeasible for {k} worlds")
    need_r = "r" in model_class
    need_t = "t" in model_class
    need_e = "e" in model_class
    out = []
    for bits in range(1 << (k * k)):
        succ = tuple((bits >> (k * w)) & ((1 << k) - 1) for w in range(k))
        if need_r and any(not (succ[w] >> w) & 1 for w in range(k)):
            continue
        ok = True
        if need_t:
            for w in range(k):
                sw = succ[w]
                for u in range(k):
                    if (sw >> u) & 1 and succ[u] & ~sw:
                        ok = False
                        break
                if not ok:
                    break
        if ok and need_e:
            for w in range(k):
                sw = succ[w]
                for t in range(k):
                    if (sw >> t) & 1 and sw & ~succ[t]:
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            out.append(succ)
    _REL_CACHE[key] = out
    return out


def _mask_components(succ, k):
    und = list(succ)
    for w in range(k):
        for u in range(k):
            if (succ[w] >> u) & 1:
                und[u] |= 1 << w
    seen = 0
    comps = []
    for w in range(k):
        if (seen >> w) & 1:
            continue
        comp = 1 << w
        frontier = 1 << w
        while frontier:
            new = 0
            f = frontier
            while f:
                u = (f & -f).bit_length() - 1
                f &= f - 1
                new |= und[u]
            frontier = new & ~comp
            comp |= new
        comps.append(comp)
        seen |= comp
    return comps


def _subsets(mask):
    """All submasks of mask in increasing numeric order."""
    subs = []
    sub = 0
    while True:
        subs.append(sub)
        if sub == mask:
            return subs
        sub = (sub - mask) & mask


def _nonempty_subsets(n_props):
    return list(range(1, 1 << n_props))


def count_models(agents, max_worlds, props, model_class=frozenset(),
                 constant_language=False, min_worlds=1):
    """Exact model count for the enumerate_models bounds.

    Per world count k:  sum over language assignments L and relation tuples
    (one per agent) of  prod_w 2^|L(w)|  *  prod_i prod_comps 2^|intersection
    of L over the component|.
    """
    total = 0
    n_props = len(props)
    full = (1 << n_props) - 1
    for k in range(min_worlds, max_worlds + 1):
        rels = _relations(k, model_class)
        comps_of = [_mask_components(succ, k) for succ in rels]
        lang_choices = [full] if constant_language else _nonempty_subsets(n_props)
        for langs in product(lang_choices, repeat=k):
            val_count = 1
            for w in range(k):
                val_count *= 1 << langs[w].bit_count()
            rel_total = 0
            for comps in comps_of:
                aware_count = 1
                for comp in comps:
                    inter = full
                    cm = comp
                    while cm:
                        w = (cm & -cm).bit_length() - 1
                        cm &= cm - 1
                        inter &= langs[w]
                    aware_count *= 1 << inter.bit_count()
                rel_total += aware_count
            per_agent = rel_total ** agents
            total += val_count * per_agent
    return total


def enumerate_models(agents, max_worlds, props, model_class=frozenset(),
                     constant_language=False, min_worlds=1,
                     max_count=20_000_000):
    """Streams every structure over the given bounds exactly once, with
    canonical world ids w0..wk.  No isomorphism reduction.

    The count explodes as documented in count_models; the generator refuses
    to start if the exact count exceeds max_count.
    """
    props = tuple(props)
    if not props:
        raise ValueError("need at least one proposition")
    if max_count is not None:
        n = count_models(agents, max_worlds, props, model_class,
                         constant_language, min_worlds)
        if n > max_count:
            raise ValueError(f"enumeration would yield {n} models "
                             f"(cap {max_count})")
    n_props = len(props)
    full = (1 << n_props) - 1

    def mask_to_set(mask):
        return frozenset(props[j] for j in range(n_props) if (mask >> j) & 1)

    agent_ids = range(1, agents + 1)
    for k in range(min_worlds, max_worlds + 1):
        worlds = tuple(f"w{j}" for j in range(k))
        rels = _relations(k, model_class)
        rel_pairs = [
            frozenset((worlds[s], worlds[t]) for s in range(k)
                      for t in range(k) if (succ[s] >> t) & 1)
            for succ in rels
        ]
        rel_comps = [_mask_components(succ, k) for succ in rels]
        lang_choices = [full] if constant_language else _nonempty_subsets(n_props)
        for langs in product(lang_choices, repeat=k):
            lang_map = {worlds[w]: mask_to_set(langs[w]) for w in range(k)}
            comp_inters = []
            for comps in rel_comps:
                inters = []
                for comp in comps:
                    inter = full
                    cm = comp
                    while cm:
                        w = (cm & -cm).bit_length() - 1
                        cm &= cm - 1
                        inter &= langs[w]
                    inters.append((comp, inter))
                comp_inters.append(inters)
            for rel_idx in product(range(len(rels)), repeat=agents):
                rel_map = {i: rel_pairs[rel_idx[j]]
                           for j, i in enumerate(agent_ids)}
                aware_spaces = []
                for j in range(agents):
                    inters = comp_inters[rel_idx[j]]
                    aware_spaces.append(
                        list(product(*[_subsets(inter)
                                       for (_, inter) in inters])))
                for aware_choice in product(*aware_spaces):
                    aware_map = {}
                    for j, i in enumerate(agent_ids):
                        inters = comp_inters[rel_idx[j]]
                        per_world = {}
                        for (comp, _), chosen in zip(inters, aware_choice[j]):
                            chosen_set = mask_to_set(chosen)
                            cm = comp
                            while cm:
                                w = (cm & -cm).bit_length() - 1
                                cm &= cm - 1
                                per_world[worlds[w]] = chosen_set
                        aware_map[i] = per_world
                    for vals in product(*[_subsets(langs[w])
                                          for w in range(k)]):
                        val_map = {worlds[w]: mask_to_set(vals[w])
                                   for w in range(k)}
                        yield AwarenessStructure(
                            agents, props, worlds, lang_map, val_map,
                            rel_map, aware_map, check=False)


# --- JSON ------------------------------------------------------------------

def model_to_dict(m):
    def ordered(s):
        return [p for p in m.props if p in s]

    widx = {w: j for j, w in enumerate(m.worlds)}
    return {
        "agents": m.agents,
        "props": list(m.props),
        "worlds": [
            {
                "id": w,
                "lang": ordered(m.lang[w]),
                "true": ordered(m.val[w]),
                "aware": {str(i): ordered(m.aware[i][w])
                          for i in range(1, m.agents + 1)},
            }
            for w in m.worlds
        ],
        "relations": {
            str(i): sorted([list(p) for p in m.rel[i]],
                           key=lambda p: (widx[p[0]], widx[p[1]]))
            for i in range(1, m.agents + 1)
        },
    }


def model_from_dict(d):
    try:
        agents = int(d["agents"])
        props = [str(p) for p in d["props"]]
        entries = d["worlds"]
        worlds = [str(e["id"]) for e in entries]
        lang = {str(e["id"]): e["lang"] for e in entries}
        val = {str(e["id"]): e["true"] for e in entries}
        aware = {i: {str(e["id"]): e.get("aware", {}).get(str(i), [])
                     for e in entries}
                 for i in range(1, agents + 1)}
        rel = {i: [tuple(p) for p in d.get("relations", {}).get(str(i), [])]
               for i in range(1, agents + 1)}
    except (KeyError, TypeError) as exc:
        raise InvalidStructure(f"malformed model JSON: {exc}") from exc
    return AwarenessStructure(agents, props, worlds, lang, val, rel, aware,
                              check=True)


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def save_model(m, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(m), fh, indent=2, sort_keys=True)
        fh.write("\n")
