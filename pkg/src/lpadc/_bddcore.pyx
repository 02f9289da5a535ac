# distutils: language = c++
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled BDD kernel; mirrors lpadc._pybdd operation for operation.

Keep the algorithms in lockstep with the pure kernel: tests assert that both
produce identical values.  See _pybdd.py for the semantics (complement
edges, two weights per variable, best-path search, adjacent-level swap).
"""

from cython.operator cimport dereference as deref, preincrement as inc
from libcpp.algorithm cimport sort as csort
from libcpp.pair cimport pair
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

from lpadc._pybdd import NodeLimitError


ctypedef long long ref_t
ctypedef unsigned long long key_t


cdef inline key_t _pack(ref_t a, ref_t b):
    return (<key_t> a << 32) | <key_t> b


cdef class Kernel:
    cdef public object node_cap
    cdef public bint enable_op_cache
    cdef public bint enable_memo
    cdef ref_t _cap
    cdef vector[int] _var
    cdef vector[ref_t] _lo
    cdef vector[ref_t] _hi
    cdef vector[ref_t] _free
    cdef vector[unordered_map[key_t, ref_t]] _uniq
    cdef vector[double] _w1
    cdef vector[double] _w0
    cdef vector[int] _group
    cdef vector[int] _gindex
    cdef vector[char] _isq
    cdef vector[int] _level_of
    cdef vector[int] _var_at
    cdef unordered_map[key_t, ref_t] _and_cache
    cdef unordered_map[ref_t, double] _prob_memo

    name = "cy"

    def __cinit__(self, node_cap=1 << 22, enable_op_cache=True, enable_memo=True):
        self.node_cap = node_cap
        self._cap = <ref_t> node_cap
        self.enable_op_cache = enable_op_cache
        self.enable_memo = enable_memo
        self._var.push_back(-1)
        self._lo.push_back(0)
        self._hi.push_back(0)

    # ---- variables ----

    def new_var(self, double weight, double zero_weight, int group, int index,
                bint is_query):
        if not (0.0 < weight <= 1.0):
            raise ValueError("variable weight %r outside (0,1]" % weight)
        cdef int v = <int> self._w1.size()
        # Hoisted on purpose: a ternary passed straight to push_back(const T&)
        # is materialized by Cython 3.2 as a reference to a dead temporary and
        # stores garbage.
        cdef char q = 1 if is_query else 0
        self._w1.push_back(weight)
        self._w0.push_back(zero_weight)
        self._group.push_back(group)
        self._gindex.push_back(index)
        self._isq.push_back(q)
        self._level_of.push_back(<int> self._var_at.size())
        self._var_at.push_back(v)
        cdef unordered_map[key_t, ref_t] tab
        self._uniq.push_back(tab)
        return v

    @property
    def num_vars(self):
        return self._w1.size()

    def var_ref(self, int v):
        return self._mk(v, 1, 0)

    def var_weight(self, int v):
        return self._w1[v]

    def var_zero_weight(self, int v):
        return self._w0[v]

    def var_group(self, int v):
        return self._group[v]

    def var_index(self, int v):
        return self._gindex[v]

    def var_is_query(self, int v):
        return self._isq[v] != 0

    def var_level(self, int v):
        return self._level_of[v]

    def level_order(self):
        return [self._var_at[i] for i in range(self._var_at.size())]

    # ---- node store ----

    def live_nodes(self):
        return self._var.size() - self._free.size() - 1

    cdef ref_t _mk(self, int v, ref_t lo, ref_t hi) except -1:
        if lo == hi:
            return lo
        cdef ref_t comp = hi & 1
        if comp:
            lo ^= 1
            hi ^= 1
        cdef key_t key = _pack(lo, hi)
        cdef unordered_map[key_t, ref_t].iterator it = self._uniq[v].find(key)
        cdef ref_t n
        if it != self._uniq[v].end():
            n = deref(it).second
            return (n << 1) | comp
        if <ref_t> (self._var.size() - self._free.size()) - 1 >= self._cap:
            raise NodeLimitError("node store exceeds the cap of %d" % self.node_cap)
        if self._free.size() > 0:
            n = self._free.back()
            self._free.pop_back()
            self._var[n] = v
            self._lo[n] = lo
            self._hi[n] = hi
        else:
            n = <ref_t> self._var.size()
            self._var.push_back(v)
            self._lo.push_back(lo)
            self._hi.push_back(hi)
        self._uniq[v][key] = n
        return (n << 1) | comp

    # ---- operations ----

    def apply_not(self, ref_t a):
        return a ^ 1

    def apply_and(self, ref_t a, ref_t b):
        return self._and(a, b)

    def apply_or(self, ref_t a, ref_t b):
        return self._and(a ^ 1, b ^ 1) ^ 1

    cdef ref_t _and(self, ref_t a, ref_t b) except -1:
        if a == 0:
            return b
        if b == 0:
            return a
        if a == 1 or b == 1:
            return 1
        if a == b:
            return a
        if (a ^ b) == 1:
            return 1
        cdef ref_t t
        if a > b:
            t = a
            a = b
            b = t
        cdef key_t key = _pack(a, b)
        cdef unordered_map[key_t, ref_t].iterator it
        if self.enable_op_cache:
            it = self._and_cache.find(key)
            if it != self._and_cache.end():
                return deref(it).second
        cdef ref_t na = a >> 1, nb = b >> 1
        cdef int va = self._var[na], vb = self._var[nb]
        cdef int la = self._level_of[va], lb = self._level_of[vb]
        cdef int v
        cdef ref_t a0, a1, b0, b1, ca, cb
        if la <= lb:
            v = va
            ca = a & 1
            a1 = self._hi[na] ^ ca
            a0 = self._lo[na] ^ ca
        else:
            v = vb
            a1 = a
            a0 = a
        if lb <= la:
            if lb < la:
                v = vb
            cb = b & 1
            b1 = self._hi[nb] ^ cb
            b0 = self._lo[nb] ^ cb
        else:
            b1 = b
            b0 = b
        cdef ref_t r = self._mk(v, self._and(a0, b0), self._and(a1, b1))
        if self.enable_op_cache:
            self._and_cache[key] = r
        return r

    def eval(self, ref_t ref, values):
        cdef ref_t comp = ref & 1
        cdef ref_t n = ref >> 1
        cdef ref_t child
        while n != 0:
            child = self._hi[n] if values[self._var[n]] else self._lo[n]
            comp ^= child & 1
            n = child >> 1
        return comp == 0

    # ---- weighted counting ----

    def prob(self, ref_t ref):
        cdef double p = self._prob_node(ref >> 1)
        return 1.0 - p if ref & 1 else p

    cdef double _prob_node(self, ref_t n) except? -1.0:
        if n == 0:
            return 1.0
        cdef unordered_map[ref_t, double].iterator it
        if self.enable_memo:
            it = self._prob_memo.find(n)
            if it != self._prob_memo.end():
                return deref(it).second
        cdef ref_t lo = self._lo[n]
        cdef double p1 = self._prob_node(self._hi[n] >> 1)
        cdef double p0 = self._prob_node(lo >> 1)
        if lo & 1:
            p0 = 1.0 - p0
        cdef int v = self._var[n]
        cdef double res = p1 * self._w1[v] + p0 * self._w0[v]
        if self.enable_memo:
            self._prob_memo[n] = res
        return res

    def wmc(self, ref_t ref):
        cdef unordered_map[ref_t, double] memo
        return self._wmc(ref, 0, memo)

    cdef double _wmc(self, ref_t ref, ref_t comp, unordered_map[ref_t, double]& memo) except? -1.0:
        comp ^= ref & 1
        cdef ref_t n = ref >> 1
        if n == 0:
            return 0.0 if comp else 1.0
        cdef ref_t key = (n << 1) | comp
        cdef unordered_map[ref_t, double].iterator it
        if self.enable_memo:
            it = memo.find(key)
            if it != memo.end():
                return deref(it).second
        cdef double p1 = self._wmc(self._hi[n], comp, memo)
        cdef double p0 = self._wmc(self._lo[n], comp, memo)
        cdef int v = self._var[n]
        cdef double res = p1 * self._w1[v] + p0 * self._w0[v]
        memo[key] = res
        return res

    # ---- best path over query variables ----

    def map_best(self, ref_t ref):
        cdef unordered_map[ref_t, pair[double, char]] memo
        cdef double value = self._map_int(ref, 0, memo)
        path = []
        cdef ref_t comp = 0
        cdef ref_t cur = ref
        cdef ref_t n
        cdef int v
        while True:
            comp ^= cur & 1
            n = cur >> 1
            if n == 0:
                break
            v = self._var[n]
            if not self._isq[v]:
                break
            if memo[(n << 1) | comp].second:
                path.append(v)
                cur = self._hi[n]
            else:
                cur = self._lo[n]
        return value, path

    cdef double _map_int(self, ref_t ref, ref_t comp,
                         unordered_map[ref_t, pair[double, char]]& memo) except? -1.0:
        comp ^= ref & 1
        cdef ref_t n = ref >> 1
        if n == 0:
            return 0.0 if comp else 1.0
        cdef int v = self._var[n]
        cdef double p
        if not self._isq[v]:
            p = self._prob_node(n)
            return 1.0 - p if comp else p
        cdef ref_t key = (n << 1) | comp
        cdef unordered_map[ref_t, pair[double, char]].iterator it
        if self.enable_memo:
            it = memo.find(key)
            if it != memo.end():
                return deref(it).second.first
        cdef double p0 = self._map_int(self._lo[n], comp, memo)
        cdef double p1 = self._map_int(self._hi[n], comp, memo)
        p1 = p1 * self._w1[v]
        cdef char take1 = p1 > p0
        cdef double res = p1 if take1 else p0
        memo[key] = pair[double, char](res, take1)
        return res

    # ---- reordering ----

    def swap_levels(self, int level):
        cdef int x = self._var_at[level]
        cdef int y = self._var_at[level + 1]
        cdef vector[ref_t] interacting
        cdef unordered_map[key_t, ref_t].iterator it = self._uniq[x].begin()
        cdef ref_t n
        while it != self._uniq[x].end():
            n = deref(it).second
            if self._var[self._lo[n] >> 1] == y or self._var[self._hi[n] >> 1] == y:
                interacting.push_back(n)
            inc(it)
        cdef size_t i
        for i in range(interacting.size()):
            n = interacting[i]
            self._uniq[x].erase(_pack(self._lo[n], self._hi[n]))
        cdef ref_t h, l, hn, ln, lc, f11, f10, f01, f00, g0, g1
        for i in range(interacting.size()):
            n = interacting[i]
            h = self._hi[n]
            l = self._lo[n]
            hn = h >> 1
            if self._var[hn] == y:
                f11 = self._hi[hn]
                f10 = self._lo[hn]
            else:
                f11 = h
                f10 = h
            ln = l >> 1
            lc = l & 1
            if self._var[ln] == y:
                f01 = self._hi[ln] ^ lc
                f00 = self._lo[ln] ^ lc
            else:
                f01 = l
                f00 = l
            g1 = self._mk(x, f01, f11)
            g0 = self._mk(x, f00, f10)
            self._var[n] = y
            self._lo[n] = g0
            self._hi[n] = g1
            self._uniq[y][_pack(g0, g1)] = n
        self._var_at[level] = y
        self._var_at[level + 1] = x
        self._level_of[x] = level + 1
        self._level_of[y] = level
        self.clear_caches()

    def reorder_groups_front(self, groups):
        order = self.level_order()
        target = [v for v in order if self._group[<int> v] in groups]
        target += [v for v in order if self._group[<int> v] not in groups]
        cdef int tpos, cur
        for tpos in range(len(target)):
            cur = self._level_of[<int> target[tpos]]
            while cur > tpos:
                self.swap_levels(cur - 1)
                cur -= 1

    # ---- maintenance ----

    def clear_caches(self):
        self._and_cache.clear()
        self._prob_memo.clear()

    def gc(self, roots):
        cdef vector[char] marked
        marked.resize(self._var.size(), 0)
        marked[0] = 1
        cdef vector[ref_t] stack
        for r in roots:
            stack.push_back(<ref_t> r >> 1)
        cdef ref_t n
        while stack.size() > 0:
            n = stack.back()
            stack.pop_back()
            if marked[n]:
                continue
            marked[n] = 1
            stack.push_back(self._lo[n] >> 1)
            stack.push_back(self._hi[n] >> 1)
        cdef ref_t collected = 0
        cdef size_t v
        cdef vector[key_t] dead
        cdef unordered_map[key_t, ref_t].iterator it
        for v in range(self._uniq.size()):
            dead.clear()
            it = self._uniq[v].begin()
            while it != self._uniq[v].end():
                if not marked[deref(it).second]:
                    dead.push_back(deref(it).first)
                inc(it)
            for i in range(dead.size()):
                self._free.push_back(self._uniq[v][dead[i]])
                self._uniq[v].erase(dead[i])
                collected += 1
        if collected:
            self.clear_caches()
            csort(self._free.begin(), self._free.end())
        return collected

    # ---- inspection ----

    def nodes(self, ref_t ref):
        out = []
        cdef vector[ref_t] stack
        seen = set()
        stack.push_back(ref >> 1)
        cdef ref_t n
        while stack.size() > 0:
            n = stack.back()
            stack.pop_back()
            if n == 0 or n in seen:
                continue
            seen.add(n)
            out.append((n, self._var[n], self._lo[n], self._hi[n]))
            stack.push_back(self._lo[n] >> 1)
            stack.push_back(self._hi[n] >> 1)
        return out

    def node_count(self, ref_t ref):
        return len(self.nodes(ref))

    def support(self, ref_t ref):
        return sorted({t[1] for t in self.nodes(ref)})
