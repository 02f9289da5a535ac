"""BDD manager facade over the interchangeable kernels.

Two kernels implement the same operations: ``_pybdd`` (pure Python) and
``_bddcore`` (Cython).  The compiled one is used when importable; set
``LPADC_KERNEL=py`` or ``LPADC_KERNEL=cy`` to force a choice, or pass
``kernel=`` to :class:`BddManager`.

External code holds :class:`BddRef` handles.  Live handles pin their nodes:
garbage collection (a mark-and-sweep triggered by a node-count threshold)
only runs between operations and only frees nodes unreachable from pinned
references.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from . import _pybdd
from ._pybdd import NodeLimitError  # re-exported; kernels share the type

DEFAULT_NODE_CAP = 1 << 22
DEFAULT_GC_THRESHOLD = 1 << 20


class BddError(Exception):
    pass


def _try_import_core():
    try:
        from . import _bddcore

        return _bddcore
    except ImportError:
        return None


def available_kernels():
    names = ["py"]
    if _try_import_core() is not None:
        names.append("cy")
    return names


def default_kernel():
    env = os.environ.get("LPADC_KERNEL", "").strip().lower()
    if env in ("py", "cy"):
        return env
    if env not in ("", "auto"):
        raise BddError("LPADC_KERNEL must be 'py', 'cy' or 'auto', not %r" % env)
    return "cy" if _try_import_core() is not None else "py"


def _make_kernel(name, node_cap, enable_op_cache, enable_memo):
    if name in (None, "auto"):
        name = default_kernel()
    if name == "py":
        return _pybdd.Kernel(node_cap, enable_op_cache, enable_memo)
    if name == "cy":
        core = _try_import_core()
        if core is None:
            raise BddError("the compiled kernel is not available; install with the extension or use kernel='py'")
        return core.Kernel(node_cap, enable_op_cache, enable_memo)
    raise BddError("unknown kernel %r" % name)


@dataclass(frozen=True)
class BddVarInfo:
    var_id: int
    level: int
    group: int
    index: int
    weight: float
    zero_weight: float
    is_query: bool


class BddRef:
    """A pinned handle to a BDD function."""

    __slots__ = ("manager", "ref", "__weakref__")

    def __init__(self, manager, ref):
        self.manager = manager
        self.ref = ref
        manager._pin(ref)

    def __del__(self):
        try:
            self.manager._unpin(self.ref)
        except Exception:
            pass

    def __and__(self, other):
        return self.manager.apply_and(self, other)

    def __or__(self, other):
        return self.manager.apply_or(self, other)

    def __invert__(self):
        return self.manager.apply_not(self)

    def __eq__(self, other):
        return (
            isinstance(other, BddRef)
            and other.manager is self.manager
            and other.ref == self.ref
        )

    def __hash__(self):
        return hash((id(self.manager), self.ref))

    @property
    def is_true(self):
        return self.ref == 0

    @property
    def is_false(self):
        return self.ref == 1

    @property
    def is_complemented(self):
        return bool(self.ref & 1)

    def node_count(self):
        return self.manager.node_count(self)

    def __repr__(self):
        return "<BddRef %d (%d nodes)>" % (self.ref, self.node_count())


class BddManager:
    def __init__(
        self,
        kernel=None,
        node_cap=DEFAULT_NODE_CAP,
        gc_threshold=DEFAULT_GC_THRESHOLD,
        enable_op_cache=True,
        enable_memo=True,
    ):
        self._k = _make_kernel(kernel, node_cap, enable_op_cache, enable_memo)
        self.kernel_name = self._k.name
        self.gc_threshold = gc_threshold
        self._pins = {}
        self.true = BddRef(self, 0)
        self.false = BddRef(self, 1)

    # ---- pinning / gc ----

    def _pin(self, ref):
        node = ref >> 1
        self._pins[node] = self._pins.get(node, 0) + 1

    def _unpin(self, ref):
        node = ref >> 1
        left = self._pins.get(node, 0) - 1
        if left <= 0:
            self._pins.pop(node, None)
        else:
            self._pins[node] = left

    def gc(self):
        """Sweep nodes unreachable from live BddRefs; returns count freed."""
        return self._k.gc([n << 1 for n in self._pins])

    def _maybe_gc(self):
        if self._k.live_nodes() > self.gc_threshold:
            self.gc()

    # ---- variables ----

    def new_var(self, group, index, weight, zero_weight=None, is_query=False):
        """Add a Boolean variable at the bottom of the order.

        weight multiplies the 1-branch during weighted counting and
        zero_weight (default 1-weight) the 0-branch.
        """
        if zero_weight is None:
            zero_weight = 1.0 - weight
        v = self._k.new_var(weight, zero_weight, group, index, bool(is_query))
        return v

    def var(self, var_id):
        return BddRef(self, self._k.var_ref(var_id))

    def nvar(self, var_id):
        return BddRef(self, self._k.var_ref(var_id) ^ 1)

    @property
    def num_vars(self):
        return self._k.num_vars

    def var_info(self, var_id):
        k = self._k
        return BddVarInfo(
            var_id=var_id,
            level=k.var_level(var_id),
            group=k.var_group(var_id),
            index=k.var_index(var_id),
            weight=k.var_weight(var_id),
            zero_weight=k.var_zero_weight(var_id),
            is_query=k.var_is_query(var_id),
        )

    def level_order(self):
        return self._k.level_order()

    # ---- operations ----

    def apply_and(self, a, b):
        self._maybe_gc()
        return BddRef(self, self._k.apply_and(a.ref, b.ref))

    def apply_or(self, a, b):
        self._maybe_gc()
        return BddRef(self, self._k.apply_or(a.ref, b.ref))

    def apply_not(self, a):
        return BddRef(self, a.ref ^ 1)

    def conjoin(self, refs):
        out = self.true
        for r in refs:
            out = self.apply_and(out, r)
        return out

    def disjoin(self, refs):
        out = self.false
        for r in refs:
            out = self.apply_or(out, r)
        return out

    def eval(self, a, values):
        return self._k.eval(a.ref, values)

    def prob(self, a):
        """Probability of the encoded formula, assuming every variable's two
        weights sum to 1 (the order encoding guarantees this)."""
        return self._k.prob(a.ref)

    def wmc(self, a):
        """Weighted count valid for any weights, e.g. one-hot blocks."""
        return self._k.wmc(a.ref)

    def map_best(self, a):
        """Best-path search over query variables: returns (value, vars true
        on the best path)."""
        value, path = self._k.map_best(a.ref)
        return value, list(path)

    def reorder_groups_front(self, groups):
        self._k.reorder_groups_front(set(groups))

    def swap_levels(self, level):
        self._k.swap_levels(level)

    # ---- inspection ----

    def live_nodes(self):
        return self._k.live_nodes()

    def node_count(self, a):
        return self._k.node_count(a.ref)

    def nodes(self, a):
        return list(self._k.nodes(a.ref))

    def support(self, a):
        return list(self._k.support(a.ref))

    def var_name(self, var_id):
        info = self.var_info(var_id)
        return "x%d_%d" % (info.group, info.index)

    def to_dot(self, a, var_name=None, graph_name="bdd"):
        """GraphViz rendering: solid 1-edges, dashed 0-edges, dotted when the
        0-edge is complemented; the entry edge is dotted for a complemented
        root."""
        if var_name is None:
            var_name = self.var_name
        lines = [
            "digraph %s {" % graph_name,
            "  node [shape=circle];",
            '  one [shape=box, label="1"];',
            '  entry [shape=point, label=""];',
        ]
        nodes = sorted(self.nodes(a), key=lambda t: self._k.var_level(t[1]))
        by_level = {}
        for n, v, lo, hi in nodes:
            by_level.setdefault(self._k.var_level(v), []).append(n)
        for n, v, lo, hi in nodes:
            lines.append('  n%d [label="%s"];' % (n, var_name(v)))
        root_style = "dotted" if a.ref & 1 else "solid"
        target = "one" if a.ref >> 1 == 0 else "n%d" % (a.ref >> 1)
        lines.append("  entry -> %s [style=%s];" % (target, root_style))
        for n, v, lo, hi in nodes:
            ht = "one" if hi >> 1 == 0 else "n%d" % (hi >> 1)
            lines.append("  n%d -> %s [style=solid];" % (n, ht))
            lt = "one" if lo >> 1 == 0 else "n%d" % (lo >> 1)
            lstyle = "dotted" if lo & 1 else "dashed"
            lines.append("  n%d -> %s [style=%s];" % (n, lt, lstyle))
        for level in sorted(by_level):
            members = " ".join("n%d;" % n for n in by_level[level])
            lines.append("  { rank=same; %s }" % members)
        lines.append("}")
        return "\n".join(lines) + "\n"
