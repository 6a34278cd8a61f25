"""Pure-Python profile-closure kernel.

A profile is a pair (vocab mask over propositions, truth mask over worlds);
the truth mask is meaningful only on the worlds whose language contains the
vocabulary.  Closing the seed profiles (one per proposition) under the
language's operators yields every (vocabulary, truth map) realizable by a
quantifier-free sentence, which is what the quantifier clause ranges over.

awarecheck._kernel_c implements the same function in Cython; awarecheck.kernel
picks whichever is importable.
"""

# record ops
OP_PROP = 0
OP_TOP = 1
OP_NOT = 2
OP_AND = 3
OP_K = 4
OP_A = 5
OP_X = 6


def close_profiles(n_worlds, lang_masks, prop_true_masks, succ_masks,
                   aware_masks, use_not, use_and, use_k, use_a, use_x,
                   include_top, max_profiles):
    """Least fixpoint of the profile closure, with BFS layers.

    Returns (records, layers) where records[i] = (vocab_mask, truth_mask, op,
    arg1, arg2, aux) and layers[i] is the minimal witness depth (seeds are 0).
    arg1/arg2 index earlier records; aux is a proposition index for OP_PROP
    and an agent index (0-based) for OP_K/OP_A/OP_X.
    """
    n_props = len(prop_true_masks)
    n_agents = len(succ_masks)
    full = (1 << n_worlds) - 1

    dom_cache = {0: full}

    def dom(vocab):
        d = dom_cache.get(vocab)
        if d is None:
            d = full
            for w in range(n_worlds):
                if vocab & ~lang_masks[w]:
                    d &= ~(1 << w)
            dom_cache[vocab] = d
        return d

    records = []
    layers = []
    index = {}

    def add(vocab, truth, op, a1, a2, aux, layer):
        key = (vocab, truth)
        if key in index:
            return
        index[key] = len(records)
        records.append((vocab, truth, op, a1, a2, aux))
        layers.append(layer)

    for j in range(n_props):
        add(1 << j, prop_true_masks[j], OP_PROP, -1, -1, j, 0)
    if include_top:
        add(0, full, OP_TOP, -1, -1, -1, 0)

    layer = 0
    frontier = 0
    while True:
        layer += 1
        known = len(records)
        for i1 in range(frontier, known):
            vocab, truth = records[i1][0], records[i1][1]
            d = dom(vocab)
            if use_not:
                add(vocab, d & ~truth, OP_NOT, i1, -1, -1, layer)
            if use_k or use_x:
                for ai in range(n_agents):
                    succ = succ_masks[ai]
                    gk = 0
                    for w in range(n_worlds):
                        if (d >> w) & 1 and not succ[w] & ~truth:
                            gk |= 1 << w
                    if use_k:
                        add(vocab, gk, OP_K, i1, -1, ai, layer)
                    if use_x:
                        aware = aware_masks[ai]
                        gx = 0
                        for w in range(n_worlds):
                            if (gk >> w) & 1 and not vocab & ~aware[w]:
                                gx |= 1 << w
                        add(vocab, gx, OP_X, i1, -1, ai, layer)
            if use_a:
                for ai in range(n_agents):
                    aware = aware_masks[ai]
                    ga = 0
                    for w in range(n_worlds):
                        if (d >> w) & 1 and not vocab & ~aware[w]:
                            ga |= 1 << w
                    add(vocab, ga, OP_A, i1, -1, ai, layer)
        if use_and:
            # new conjunctions need at least one argument from the last layer
            for i1 in range(frontier, known):
                v1, t1 = records[i1][0], records[i1][1]
                for i2 in range(known):
                    rec2 = records[i2]
                    add(v1 | rec2[0], t1 & rec2[1], OP_AND, i1, i2, -1, layer)
        if len(records) == known:
            return records, layers
        if len(records) > max_profiles:
            raise RuntimeError(
                f"profile closure exceeded {max_profiles} profiles")
        frontier = known
