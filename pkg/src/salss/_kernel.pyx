# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled run engine.

Mirrors ``_pykernel`` operation for operation (same float expressions, same
RNG draw order, same key bytes) so both backends produce identical runs.
All batch entry points release the GIL.
"""
import numpy as np

from libc.math cimport floor, log
from libc.stdint cimport int64_t, uint32_t, uint64_t

DEF MAX_CLOCKS = 64
DEF MAX_EDGES = 256
DEF MAX_FIELDS = 4 + 2 * MAX_CLOCKS

cdef uint64_t FNV_OFFSET = 14695981039346656037ULL
cdef uint64_t FNV_PRIME = 1099511628211ULL
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double UNIT = 1.0 / 9007199254740992.0
cdef double U64_CAP = 18446744073709551616.0

cdef enum:
    NOT_REACHED = 0
    REACHED = 1
    TRUNCATED = 2
    BAD_RULE = -1

cdef enum:
    T_VALUES = 0
    T_TIME = 1
    F_EXP = 0
    F_ORDER = 1


cdef struct Model:
    int nc
    int initial
    const int* dist_kind
    const double* dist_a
    const double* dist_b
    const int* loc_start
    const uint64_t* guard
    const uint64_t* restart
    const int* action
    const int* tgt_start
    const int* tgt_loc
    const double* tgt_cum
    const unsigned char* goal


cdef struct Obs:
    uint64_t tag
    uint64_t n
    int hist
    int timing
    int future


cdef struct Rule:
    const int* then_act
    const int* else_act
    const int* atom_start
    const int* lhs_kind
    const int* lhs_clock
    const int* op
    const int* rhs_kind
    const int* rhs_clock
    const double* rhs_const


cdef struct Result:
    int outcome
    int location
    double elapsed
    long steps
    uint64_t digest


cdef inline uint64_t fnv_bytes(uint64_t h, uint64_t x, int nbytes) noexcept nogil:
    cdef int i
    for i in range(nbytes):
        h = (h ^ ((x >> (8 * i)) & 0xFF)) * FNV_PRIME
    return h


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double next_unit(uint64_t* state) noexcept nogil:
    state[0] += GOLDEN
    return <double>(mix64(state[0]) >> 11) * UNIT


cdef inline uint64_t disc(double x, uint64_t n) noexcept nogil:
    cdef double y = floor(x * <double>n)
    if y >= U64_CAP:
        return 0xFFFFFFFFFFFFFFFFULL
    return <uint64_t>y


cdef inline double sample_clock(const Model* m, int c, double u) noexcept nogil:
    cdef int kind = m.dist_kind[c]
    if kind == 0:
        return m.dist_a[c] + u * (m.dist_b[c] - m.dist_a[c])
    if kind == 1:
        return m.dist_a[c]
    return -log(1.0 - u) / m.dist_a[c]


cdef int build_key(const Model* m, const Obs* o, int loc, uint64_t digest,
                   const double* v, const double* e, double t, uint64_t* out) noexcept nogil:
    cdef int k = 0, c, d, d2, rank, dup
    cdef double r[MAX_CLOCKS]
    out[0] = o.tag
    out[1] = o.n
    out[2] = <uint64_t>loc
    k = 3
    if o.hist:
        out[k] = digest
        k += 1
    if o.timing == T_VALUES:
        for c in range(m.nc):
            out[k] = disc(v[c], o.n)
            k += 1
    elif o.timing == T_TIME:
        out[k] = disc(t, o.n)
        k += 1
    if o.future == F_EXP:
        for c in range(m.nc):
            out[k] = disc(e[c], o.n)
            k += 1
    elif o.future == F_ORDER:
        for c in range(m.nc):
            r[c] = e[c] - v[c]
        for c in range(m.nc):
            rank = 0
            for d in range(m.nc):
                if r[d] < r[c]:
                    dup = 0
                    for d2 in range(d):
                        if r[d2] == r[d]:
                            dup = 1
                            break
                    if not dup:
                        rank += 1
            out[k] = <uint64_t>rank
            k += 1
    return k


cdef inline uint64_t fold(uint64_t h, const uint64_t* key, int nk,
                          uint64_t kind, uint64_t value) noexcept nogil:
    cdef int i
    for i in range(nk):
        h = fnv_bytes(h, key[i], 8)
    h = fnv_bytes(h, kind, 8)
    return fnv_bytes(h, value, 8)


cdef inline int decide(uint32_t sid, const uint64_t* key, int nk, int k) noexcept nogil:
    cdef uint64_t h = fnv_bytes(FNV_OFFSET, sid, 4)
    cdef int i
    for i in range(nk):
        h = fnv_bytes(h, key[i], 8)
    cdef double u = <double>(mix64(h + GOLDEN) >> 11) * UNIT
    cdef int idx = <int>floor(u * <double>k)
    if idx > k - 1:
        idx = k - 1
    return idx


cdef inline double operand(int kind, int c, double cval, const double* v, const double* e,
                           double t, int last) noexcept nogil:
    if kind == 0:
        return v[c]
    if kind == 1:
        return e[c]
    if kind == 2:
        return e[c] - v[c]
    if kind == 3:
        return t
    if kind == 4:
        return <double>last
    return cval


cdef int rule_action(const Rule* rl, int loc, const double* v, const double* e,
                     double t, int last) noexcept nogil:
    cdef int i, op
    cdef double a, b
    if rl.then_act[loc] < 0:
        return -1
    for i in range(rl.atom_start[loc], rl.atom_start[loc + 1]):
        a = operand(rl.lhs_kind[i], rl.lhs_clock[i], 0.0, v, e, t, last)
        b = operand(rl.rhs_kind[i], rl.rhs_clock[i], rl.rhs_const[i], v, e, t, last)
        op = rl.op[i]
        if op == 0:
            if not (a < b):
                return rl.else_act[loc]
        elif op == 1:
            if not (a <= b):
                return rl.else_act[loc]
        elif not (a == b):
            return rl.else_act[loc]
    return rl.then_act[loc]


cdef inline uint64_t run_seed(uint64_t master, uint32_t sid, uint64_t index) noexcept nogil:
    cdef uint64_t h = fnv_bytes(FNV_OFFSET, master, 8)
    h = fnv_bytes(h, sid, 4)
    return fnv_bytes(h, index, 8)


cdef void run_one(const Model* m, const Obs* o, const Rule* rl, uint32_t sid, uint64_t seed,
                  long max_steps, Result* res) noexcept nogil:
    cdef double v[MAX_CLOCKS]
    cdef double e[MAX_CLOCKS]
    cdef uint64_t key[MAX_FIELDS]
    cdef int enabled[MAX_EDGES]
    cdef uint64_t state = seed
    cdef uint64_t digest = FNV_OFFSET
    cdef uint64_t expired, bit
    cdef double t = 0.0, d, w, nv, u, acc
    cdef long steps = 0
    cdef int loc = m.initial, last = -1
    cdef int c, i, ne, nk, idx, ed, act, j, hi, first
    cdef int outcome
    for c in range(m.nc):
        v[c] = 0.0
        e[c] = 0.0
    while True:
        if m.goal[loc]:
            outcome = REACHED
            break
        if steps >= max_steps:
            outcome = TRUNCATED
            break
        expired = 0
        for c in range(m.nc):
            if v[c] >= e[c]:
                expired |= (<uint64_t>1) << c
        ne = 0
        for i in range(m.loc_start[loc], m.loc_start[loc + 1]):
            if (m.guard[i] & ~expired) == 0:
                enabled[ne] = i
                ne += 1
        if ne > 0:
            nk = 0
            if o.hist or (rl == NULL and ne > 1):
                nk = build_key(m, o, loc, digest, v, e, t, key)
            idx = 0
            if ne > 1:
                if rl == NULL:
                    idx = decide(sid, key, nk, ne)
                else:
                    act = rule_action(rl, loc, v, e, t, last)
                    idx = -1
                    for j in range(ne):
                        if m.action[enabled[j]] == act:
                            idx = j
                            break
                    if idx < 0:
                        outcome = BAD_RULE
                        break
            ed = enabled[idx]
            if o.hist:
                digest = fold(digest, key, nk, 0, <uint64_t>m.action[ed])
            # target location
            if m.tgt_start[ed + 1] - m.tgt_start[ed] == 1:
                loc = m.tgt_loc[m.tgt_start[ed]]
            else:
                u = next_unit(&state)
                hi = m.tgt_start[ed + 1] - 1
                loc = m.tgt_loc[hi]
                for j in range(m.tgt_start[ed], m.tgt_start[ed + 1]):
                    if u < m.tgt_cum[j]:
                        loc = m.tgt_loc[j]
                        break
            for c in range(m.nc):
                bit = (<uint64_t>1) << c
                if m.restart[ed] & bit:
                    v[c] = 0.0
            for c in range(m.nc):
                bit = (<uint64_t>1) << c
                if m.restart[ed] & bit:
                    e[c] = sample_clock(m, c, next_unit(&state))
            last = m.action[ed]
        else:
            if m.loc_start[loc] == m.loc_start[loc + 1]:
                outcome = NOT_REACHED
                break
            d = -1.0
            for i in range(m.loc_start[loc], m.loc_start[loc + 1]):
                w = -1.0
                first = 1
                for c in range(m.nc):
                    if m.guard[i] & ((<uint64_t>1) << c):
                        if first or e[c] - v[c] > w:
                            w = e[c] - v[c]
                            first = 0
                if d < 0.0 or w < d:
                    d = w
            if o.hist:
                nk = build_key(m, o, loc, digest, v, e, t, key)
                digest = fold(digest, key, nk, 1, disc(d, o.n))
            for c in range(m.nc):
                nv = v[c] + d
                if v[c] < e[c] and e[c] - v[c] <= d and nv < e[c]:
                    nv = e[c]
                v[c] = nv
            t = t + d
        steps += 1
    res.outcome = outcome
    res.location = loc
    res.elapsed = t
    res.steps = steps
    res.digest = digest


cdef class KModel:
    """Holds the flat model arrays and the C view of them."""
    cdef Model m
    cdef object _keep
    cdef int[::1] dist_kind, loc_start, action, tgt_start, tgt_loc
    cdef double[::1] dist_a, dist_b, tgt_cum
    cdef uint64_t[::1] guard, restart

    def __init__(self, arrays):
        self._keep = arrays
        self.dist_kind = arrays["dist_kind"]
        self.dist_a = arrays["dist_a"]
        self.dist_b = arrays["dist_b"]
        self.loc_start = arrays["loc_start"]
        self.guard = arrays["guard"]
        self.restart = arrays["restart"]
        self.action = arrays["action"]
        self.tgt_start = arrays["tgt_start"]
        self.tgt_loc = arrays["tgt_loc"]
        self.tgt_cum = arrays["tgt_cum"]
        self.m.nc = <int>arrays["n_clocks"]
        self.m.initial = <int>arrays["initial"]
        self.m.dist_kind = &self.dist_kind[0]
        self.m.dist_a = &self.dist_a[0] if self.dist_a.shape[0] else NULL
        self.m.dist_b = &self.dist_b[0] if self.dist_b.shape[0] else NULL
        self.m.loc_start = &self.loc_start[0]
        self.m.guard = &self.guard[0] if self.guard.shape[0] else NULL
        self.m.restart = &self.restart[0] if self.restart.shape[0] else NULL
        self.m.action = &self.action[0] if self.action.shape[0] else NULL
        self.m.tgt_start = &self.tgt_start[0]
        self.m.tgt_loc = &self.tgt_loc[0] if self.tgt_loc.shape[0] else NULL
        self.m.tgt_cum = &self.tgt_cum[0] if self.tgt_cum.shape[0] else NULL


cdef class KRule:
    cdef Rule r
    cdef object _keep
    cdef int[::1] then_act, else_act, atom_start, lhs_kind, lhs_clock, op, rhs_kind, rhs_clock
    cdef double[::1] rhs_const

    def __init__(self, prog):
        self._keep = prog
        self.then_act = prog["then_act"]
        self.else_act = prog["else_act"]
        self.atom_start = prog["atom_start"]
        self.lhs_kind = prog["lhs_kind"]
        self.lhs_clock = prog["lhs_clock"]
        self.op = prog["op"]
        self.rhs_kind = prog["rhs_kind"]
        self.rhs_clock = prog["rhs_clock"]
        self.rhs_const = prog["rhs_const"]
        self.r.then_act = &self.then_act[0]
        self.r.else_act = &self.else_act[0]
        self.r.atom_start = &self.atom_start[0]
        if self.op.shape[0]:
            self.r.lhs_kind = &self.lhs_kind[0]
            self.r.lhs_clock = &self.lhs_clock[0]
            self.r.op = &self.op[0]
            self.r.rhs_kind = &self.rhs_kind[0]
            self.r.rhs_clock = &self.rhs_clock[0]
            self.r.rhs_const = &self.rhs_const[0]


cdef Obs make_obs(tuple view):
    cdef Obs o
    o.tag, o.n, o.hist, o.timing, o.future = view
    return o


cdef Obs no_obs():
    cdef Obs o
    o.tag = 0
    o.n = 1
    o.hist = 0
    o.timing = 2
    o.future = 2
    return o


def lss_counts(KModel km, const unsigned char[::1] goal, tuple view, const uint32_t[::1] ids,
               uint64_t master_seed, uint64_t run_start, uint64_t runs, long max_steps):
    """Reached/truncated counts per scheduler id over runs [run_start, run_start+runs)."""
    cdef Model m = km.m
    m.goal = &goal[0]
    cdef Obs o = make_obs(view)
    cdef Py_ssize_t n_ids = ids.shape[0], s
    reached_arr = np.zeros(n_ids, dtype=np.int64)
    trunc_arr = np.zeros(n_ids, dtype=np.int64)
    cdef int64_t[::1] reached = reached_arr
    cdef int64_t[::1] trunc = trunc_arr
    cdef uint64_t i
    cdef Result res
    with nogil:
        for s in range(n_ids):
            for i in range(run_start, run_start + runs):
                run_one(&m, &o, NULL, ids[s], run_seed(master_seed, ids[s], i), max_steps, &res)
                if res.outcome == REACHED:
                    reached[s] += 1
                elif res.outcome == TRUNCATED:
                    trunc[s] += 1
    return reached_arr, trunc_arr


def rule_counts(KModel km, const unsigned char[::1] goal, KRule kr, uint64_t seed,
                uint64_t run_start, uint64_t runs, long max_steps):
    cdef Model m = km.m
    m.goal = &goal[0]
    cdef Obs o = no_obs()
    cdef int64_t reached = 0, trunc = 0
    cdef uint64_t i
    cdef Result res
    cdef int bad = 0
    with nogil:
        for i in range(run_start, run_start + runs):
            run_one(&m, &o, &kr.r, 0, run_seed(seed, 0, i), max_steps, &res)
            if res.outcome == REACHED:
                reached += 1
            elif res.outcome == TRUNCATED:
                trunc += 1
            elif res.outcome == BAD_RULE:
                bad = 1
                break
    if bad:
        return None
    return reached, trunc


def lss_detail(KModel km, const unsigned char[::1] goal, tuple view, uint32_t sid,
               uint64_t master_seed, uint64_t run_index, long max_steps):
    cdef Model m = km.m
    m.goal = &goal[0]
    cdef Obs o = make_obs(view)
    cdef Result res
    run_one(&m, &o, NULL, sid, run_seed(master_seed, sid, run_index), max_steps, &res)
    return res.outcome, res.location, res.elapsed, res.steps, res.digest


def rule_detail(KModel km, const unsigned char[::1] goal, KRule kr, uint64_t seed,
                uint64_t run_index, long max_steps):
    cdef Model m = km.m
    m.goal = &goal[0]
    cdef Obs o = no_obs()
    cdef Result res
    run_one(&m, &o, &kr.r, 0, run_seed(seed, 0, run_index), max_steps, &res)
    return res.outcome, res.location, res.elapsed, res.steps, res.digest
