# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython kernels: the profile-closure fixpoint and a compiled evaluator for
formula programs.  Contracts match _kernel_py / the pure masks() walk in
checker.py; both are restricted to at most 64 worlds and 64 propositions
(masks are uint64)."""

from libc.stdint cimport uint64_t

OP_PROP = 0
OP_TOP = 1
OP_NOT = 2
OP_AND = 3
OP_K = 4
OP_A = 5
OP_X = 6

# program opcodes for eval_program
P_PROP = 0
P_TOP = 1
P_VAR = 2
P_NOT = 3
P_AND = 4
P_K = 5
P_A = 6
P_X = 7
P_FORALL = 8

DEF MAX_NODES = 1024
DEF MAX_WORLDS = 64
DEF MAX_PROPS = 64
DEF MAX_AGENTS = 16
DEF MAX_PROFILES = 1024
DEF MAX_SLOTS = 64


cdef struct VF:
    uint64_t v
    uint64_t f


cdef class _Eval:
    cdef int n_worlds, n_props, n_agents, n_profiles
    cdef uint64_t full
    cdef uint64_t[MAX_PROPS] pwm
    cdef uint64_t[MAX_PROPS] ptrue
    cdef uint64_t[MAX_AGENTS][MAX_WORLDS] succ
    cdef uint64_t[MAX_AGENTS][MAX_WORLDS] aware
    cdef uint64_t[MAX_PROFILES] prof_v
    cdef uint64_t[MAX_PROFILES] prof_f
    cdef int[MAX_NODES] op, a1, a2, aux
    cdef uint64_t[MAX_NODES] props, uses
    cdef uint64_t[MAX_NODES] cache_v, cache_f
    cdef char[MAX_NODES] cache_ok
    cdef uint64_t[MAX_SLOTS] env_v, env_f
    cdef int n_nodes

    cdef inline uint64_t dom(self, uint64_t vocab):
        cdef uint64_t d = self.full
        cdef uint64_t v = vocab
        cdef int j = 0
        while v:
            if v & 1:
                d &= self.pwm[j]
            v >>= 1
            j += 1
        return d

    cdef VF eval(self, int i):
        cdef VF r, r2, out
        cdef uint64_t d, g, veff, result, bad
        cdef int w, ag, slot, k, j
        cdef int code = self.op[i]
        if self.uses[i] == 0 and self.cache_ok[i]:
            out.v = self.cache_v[i]
            out.f = self.cache_f[i]
            return out
        if code == P_PROP:
            out.v = <uint64_t>1 << self.aux[i]
            out.f = self.ptrue[self.aux[i]]
        elif code == P_TOP:
            out.v = 0
            out.f = self.full
        elif code == P_VAR:
            out.v = self.env_v[self.aux[i]]
            out.f = self.env_f[self.aux[i]]
        elif code == P_NOT:
            r = self.eval(self.a1[i])
            out.v = r.v
            out.f = self.dom(r.v) & ~r.f
        elif code == P_AND:
            r = self.eval(self.a1[i])
            r2 = self.eval(self.a2[i])
            out.v = r.v | r2.v
            out.f = r.f & r2.f
        elif code == P_K or code == P_A or code == P_X:
            r = self.eval(self.a1[i])
            ag = self.aux[i]
            d = self.dom(r.v)
            g = 0
            if code == P_K or code == P_X:
                for w in range(self.n_worlds):
                    if (d >> w) & 1 and not (self.succ[ag][w] & ~r.f):
                        g |= <uint64_t>1 << w
            else:
                g = d
            if code == P_A or code == P_X:
                for w in range(self.n_worlds):
                    if (g >> w) & 1 and (r.v & ~self.aware[ag][w]):
                        g &= ~(<uint64_t>1 << w)
            out.v = r.v
            out.f = g
        else:  # P_FORALL
            slot = self.aux[i]
            veff = self.props[i]
            j = 0
            g = self.uses[i]
            while g:
                if g & 1:
                    veff |= self.env_v[j]
                g >>= 1
                j += 1
            result = self.dom(veff)
            for k in range(self.n_profiles):
                if result == 0:
                    break
                self.env_v[slot] = self.prof_v[k]
                self.env_f[slot] = self.prof_f[k]
                r = self.eval(self.a1[i])
                bad = self.dom(self.prof_v[k]) & ~r.f
                result &= ~bad
            out.v = veff
            out.f = result
        if self.uses[i] == 0:
            self.cache_v[i] = out.v
            self.cache_f[i] = out.f
            self.cache_ok[i] = 1
        return out


    def run(self, program, int root):
        """Evaluates a compiled formula program against the loaded model;
        returns (vocab mask, truth mask) over all worlds."""
        ops, a1s, a2s, auxs, propss, usess, nslots = program
        cdef int n = len(ops)
        if n > MAX_NODES or nslots > MAX_SLOTS:
            raise OverflowError("program too large for the compiled "
                                "evaluator")
        cdef int i
        self.n_nodes = n
        for i in range(n):
            self.op[i] = ops[i]
            self.a1[i] = a1s[i]
            self.a2[i] = a2s[i]
            self.aux[i] = auxs[i]
            self.props[i] = propss[i]
            self.uses[i] = usess[i]
            self.cache_ok[i] = 0
        cdef VF out = self.eval(root)
        return int(out.v), int(out.f)


def make_evaluator(int n_worlds, prop_world_masks, prop_true, succ_masks,
                   aware_masks, profiles):
    """Builds a reusable evaluator for one (model, domain) pair."""
    cdef _Eval ev = _Eval()
    cdef int n_props = len(prop_world_masks)
    cdef int n_agents = len(succ_masks)
    cdef int n_profiles = len(profiles)
    if (n_worlds > MAX_WORLDS or n_props > MAX_PROPS
            or n_agents > MAX_AGENTS or n_profiles > MAX_PROFILES):
        raise OverflowError("model too large for the compiled evaluator")
    cdef int i, w
    ev.n_worlds = n_worlds
    ev.n_props = n_props
    ev.n_agents = n_agents
    ev.n_profiles = n_profiles
    ev.full = (<uint64_t>1 << n_worlds) - 1 if n_worlds < 64 \
        else <uint64_t>0xFFFFFFFFFFFFFFFF
    for i in range(n_props):
        ev.pwm[i] = prop_world_masks[i]
        ev.ptrue[i] = prop_true[i]
    for i in range(n_agents):
        for w in range(n_worlds):
            ev.succ[i][w] = succ_masks[i][w]
            ev.aware[i][w] = aware_masks[i][w]
    for i in range(n_profiles):
        ev.prof_v[i] = profiles[i][0]
        ev.prof_f[i] = profiles[i][1]
    return ev


def close_profiles(int n_worlds, lang_masks, prop_true_masks, succ_masks,
                   aware_masks, bint use_not, bint use_and, bint use_k,
                   bint use_a, bint use_x, bint include_top, max_profiles):
    cdef int n_props = len(prop_true_masks)
    cdef int n_agents = len(succ_masks)
    cdef uint64_t full = (<uint64_t>1 << n_worlds) - 1 if n_worlds < 64 \
        else <uint64_t>0xFFFFFFFFFFFFFFFF
    cdef int cap = int(max_profiles)

    cdef uint64_t[64] lang
    cdef uint64_t[64] ptrue
    cdef uint64_t[64][64] succ
    cdef uint64_t[64][64] aware
    cdef int i, j, w, ai

    if n_worlds > 64 or n_props > 64 or n_agents > 64:
        raise ValueError("compiled kernel supports at most 64 worlds, "
                         "propositions and agents")
    for w in range(n_worlds):
        lang[w] = lang_masks[w]
    for j in range(n_props):
        ptrue[j] = prop_true_masks[j]
    for ai in range(n_agents):
        for w in range(n_worlds):
            succ[ai][w] = succ_masks[ai][w]
            aware[ai][w] = aware_masks[ai][w]

    # growable arrays for the records
    cdef list records = []
    cdef list layers = []
    cdef dict index = {}
    cdef list vocabs = []   # python ints mirror for fast arg access
    cdef list truths = []

    dom_cache = {0: int(full)}

    cdef uint64_t d, v, t, g, gk, ga, vocab, truth, v2, t2

    def dom(pyvocab):
        cdef uint64_t dd, vv
        got = dom_cache.get(pyvocab)
        if got is not None:
            return got
        dd = full
        vv = pyvocab
        for ww in range(n_worlds):
            if vv & ~lang[ww]:
                dd &= ~(<uint64_t>1 << ww)
        dom_cache[pyvocab] = int(dd)
        return int(dd)

    def add(pyvocab, pytruth, op, a1, a2, aux, layer):
        key = (pyvocab, pytruth)
        if key in index:
            return
        index[key] = len(records)
        records.append((pyvocab, pytruth, op, a1, a2, aux))
        layers.append(layer)
        vocabs.append(pyvocab)
        truths.append(pytruth)

    for j in range(n_props):
        add(1 << j, int(ptrue[j]), OP_PROP, -1, -1, j, 0)
    if include_top:
        add(0, int(full), OP_TOP, -1, -1, -1, 0)

    cdef int layer = 0
    cdef int frontier = 0
    cdef int known, i1, i2
    while True:
        layer += 1
        known = len(records)
        for i1 in range(frontier, known):
            vocab = vocabs[i1]
            truth = truths[i1]
            d = dom(vocabs[i1])
            if use_not:
                add(vocabs[i1], int(d & ~truth), OP_NOT, i1, -1, -1, layer)
            if use_k or use_x:
                for ai in range(n_agents):
                    gk = 0
                    for w in range(n_worlds):
                        if (d >> w) & 1 and not (succ[ai][w] & ~truth):
                            gk |= <uint64_t>1 << w
                    if use_k:
                        add(vocabs[i1], int(gk), OP_K, i1, -1, ai, layer)
                    if use_x:
                        g = 0
                        for w in range(n_worlds):
                            if (gk >> w) & 1 and not (vocab & ~aware[ai][w]):
                                g |= <uint64_t>1 << w
                        add(vocabs[i1], int(g), OP_X, i1, -1, ai, layer)
            if use_a:
                for ai in range(n_agents):
                    ga = 0
                    for w in range(n_worlds):
                        if (d >> w) & 1 and not (vocab & ~aware[ai][w]):
                            ga |= <uint64_t>1 << w
                    add(vocabs[i1], int(ga), OP_A, i1, -1, ai, layer)
        if use_and:
            for i1 in range(frontier, known):
                v = vocabs[i1]
                t = truths[i1]
                for i2 in range(known):
                    v2 = vocabs[i2]
                    t2 = truths[i2]
                    add(int(v | v2), int(t & t2), OP_AND, i1, i2, -1, layer)
        if len(records) == known:
            return records, layers
        if len(records) > cap:
            raise RuntimeError(
                "profile closure exceeded %d profiles" % cap)
        frontier = known
