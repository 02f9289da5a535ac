"""Compilation of ground programs to BDDs.

Each choice variable becomes a block of Boolean variables under one of two
encodings:

* order: n values map to n-1 Booleans; value k is the path "first k-1 false,
  k-th true" and the last value is all-false.  Weights are conditional:
  pi_k = P_k / prod_{j<k}(1 - pi_j), with the 0-branch weighted 1 - pi_k.
  Weighted counting then sums each value exactly once, but several Boolean
  assignments can map to the same value, so maximization over these
  variables would double-count.
* onehot: one Boolean per value, weighted P_k on the 1-branch and 1 on the
  0-branch, plus an exactly-one constraint conjoined into the query BDD.
  This is the encoding maximization needs.

Marginals use order everywhere; MPE uses onehot everywhere; MAP mixes
(onehot for query variables, order for the rest).

Atom formulas are built bottom-up per stratum by a least-fixpoint iteration
starting from FALSE, restricted to atoms the query actually depends on.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bdd import BddManager

ORDER = "order"
ONEHOT = "onehot"

TASK_MODES = ("prob", "mpe", "map")


class CompileError(Exception):
    pass


class Encoding:
    """Boolean variable blocks for every choice variable of a ground program."""

    def __init__(self, manager, gp, modes, query_cvs, creation_order=None):
        self.manager = manager
        self.gp = gp
        self.modes = tuple(modes)
        self.query_cvs = frozenset(query_cvs)
        self.var_ids = [None] * len(gp.choice_vars)
        self._value_cache = {}
        self._constraint_cache = {}
        order = range(len(gp.choice_vars)) if creation_order is None else creation_order
        for ci in order:
            self.var_ids[ci] = self._create_block(ci)

    def _create_block(self, ci):
        cv = self.gp.choice_vars[ci]
        mode = self.modes[ci]
        is_query = ci in self.query_cvs
        ids = []
        if mode == ONEHOT:
            for k, p in enumerate(cv.probs):
                ids.append(
                    self.manager.new_var(
                        group=ci, index=k, weight=p, zero_weight=1.0, is_query=is_query
                    )
                )
        else:
            # chain order: explicit heads first, the null value (if any) last
            chain = list(cv.probs[1:]) if cv.has_null else list(cv.probs)
            if cv.has_null:
                chain.append(cv.probs[0])
            denom = 1.0
            for i in range(len(chain) - 1):
                w = chain[i] / denom
                ids.append(
                    self.manager.new_var(
                        group=ci, index=i, weight=w, is_query=is_query
                    )
                )
                denom *= 1.0 - w
        return tuple(ids)

    def group_vars(self, ci):
        return self.var_ids[ci]

    def _chain_position(self, ci, k):
        cv = self.gp.choice_vars[ci]
        if cv.has_null:
            return len(cv.probs) - 1 if k == 0 else k - 1
        return k

    def value_bdd(self, ci, k):
        """BDD for "choice variable ci selects value k"."""
        key = (ci, k)
        hit = self._value_cache.get(key)
        if hit is not None:
            return hit
        m = self.manager
        ids = self.var_ids[ci]
        if self.modes[ci] == ONEHOT:
            out = m.var(ids[k])
        else:
            pos = self._chain_position(ci, k)
            out = m.true
            for i in range(min(pos, len(ids))):
                out = out & m.nvar(ids[i])
            if pos < len(ids):
                out = out & m.var(ids[pos])
        self._value_cache[key] = out
        return out

    def exactly_one(self, ci):
        """At-least-one and pairwise at-most-one over a onehot block."""
        hit = self._constraint_cache.get(ci)
        if hit is not None:
            return hit
        if self.modes[ci] != ONEHOT:
            raise CompileError("exactly-one constraints only apply to onehot blocks")
        m = self.manager
        ids = self.var_ids[ci]
        out = m.false
        for v in ids:
            out = out | m.var(v)
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                out = out & ~(m.var(ids[i]) & m.var(ids[j]))
        self._constraint_cache[ci] = out
        return out


@dataclass
class CompileStats:
    fixpoint_iterations: int = 0
    strata_processed: int = 0


class CompiledProgram:
    """A ground program with its encoding and the growing formula table."""

    def __init__(self, gp, manager, encoding, task):
        self.gp = gp
        self.manager = manager
        self.encoding = encoding
        self.task = task
        self.formulas = {}
        self.stats = CompileStats()

    @property
    def query_cvs(self):
        return self.encoding.query_cvs


def compile_program(
    gp,
    task="prob",
    query_cvs=None,
    kernel=None,
    node_cap=None,
    manager=None,
    creation_order=None,
):
    """Set up the Boolean encoding for a ground program.

    query_cvs (choice-variable indices) defaults to the map_query-flagged
    variables for task "map" and to all variables for "mpe".
    """
    if task not in TASK_MODES:
        raise CompileError("unknown task %r" % task)
    n = len(gp.choice_vars)
    if task == "mpe":
        query = set(range(n))
    elif task == "map":
        if query_cvs is None:
            query = {cv.index for cv in gp.choice_vars if cv.is_query}
        else:
            query = set(query_cvs)
        if not query:
            raise CompileError("map needs at least one query choice variable")
    else:
        query = set()
    bad = [ci for ci in query if not (0 <= ci < n)]
    if bad:
        raise CompileError("query choice variables out of range: %r" % bad)
    modes = [
        ONEHOT if (task != "prob" and ci in query) else ORDER for ci in range(n)
    ]
    if manager is None:
        kwargs = {}
        if node_cap is not None:
            kwargs["node_cap"] = node_cap
        manager = BddManager(kernel=kernel, **kwargs)
    encoding = Encoding(manager, gp, modes, query, creation_order)
    return CompiledProgram(gp, manager, encoding, task)


def _needed_atoms(cp, atoms):
    gp = cp.gp
    needed = set()
    stack = [a for a in atoms if a not in cp.formulas]
    while stack:
        a = stack.pop()
        if a in needed or a in cp.formulas:
            continue
        needed.add(a)
        for gi, _ in gp.rules_by_head.get(a, ()):
            for lit in gp.ground_clauses[gi].body:
                stack.append(lit.atom)
    return needed


def _ensure_atoms(cp, atoms):
    """Compute formulas for the given atoms (and their dependencies),
    stratum by stratum, least fixpoint within each stratum."""
    needed = _needed_atoms(cp, atoms)
    if not needed:
        return
    gp = cp.gp
    m = cp.manager
    strata = gp.strata()
    discovery = {a: i for i, a in enumerate(gp.atoms)}
    by_level = {}
    for a in needed:
        by_level.setdefault(strata.index.get(a, 0), []).append(a)

    for level in sorted(by_level):
        group = sorted(
            by_level[level], key=lambda a: discovery.get(a, len(discovery))
        )
        cur = {a: m.false for a in group}
        cp.stats.strata_processed += 1

        def formula_of(atom):
            if atom in cur:
                return cur[atom]
            return cp.formulas.get(atom, m.false)

        while True:
            cp.stats.fixpoint_iterations += 1
            changed = False
            for a in group:
                f = m.false
                for gi, pos in gp.rules_by_head.get(a, ()):
                    gc = gp.ground_clauses[gi]
                    if gc.cv_index is not None:
                        term = cp.encoding.value_bdd(gc.cv_index, gc.value_index(pos))
                    else:
                        term = m.true
                    for lit in gc.body:
                        sub = formula_of(lit.atom)
                        term = term & (~sub if lit.negated else sub)
                        if term.is_false:
                            break
                    f = f | term
                if f.ref != cur[a].ref:
                    cur[a] = f
                    changed = True
            if not changed:
                break
        cp.formulas.update(cur)


def compile_atom(cp, atom):
    """BDD for "atom is derivable", over the program's choice variables."""
    if atom not in cp.formulas:
        _ensure_atoms(cp, [atom])
    return cp.formulas.get(atom, cp.manager.false)


def compile_literal(cp, lit):
    f = compile_atom(cp, lit.atom)
    return ~f if lit.negated else f


def compile_query(cp, literals, with_constraints=None):
    """Conjunction of the literals' formulas; for maximization tasks the
    exactly-one constraint of every onehot block is conjoined as well."""
    if with_constraints is None:
        with_constraints = cp.task in ("mpe", "map")
    _ensure_atoms(cp, [lit.atom for lit in literals])
    out = cp.manager.true
    for lit in literals:
        out = out & compile_literal(cp, lit)
    if with_constraints:
        for ci in range(len(cp.gp.choice_vars)):
            if cp.encoding.modes[ci] == ONEHOT:
                out = out & cp.encoding.exactly_one(ci)
    return out
