"""Seeded random propositional programs for property tests.

Every case is a pure function of its seed: at most four annotated clauses
(six choice variables would need four clauses of three heads, so the world
count stays tiny), at most three heads per clause, deterministic rules in a
second stratum whose bodies may negate first-stratum atoms, and optional
positive recursion inside either stratum.  Evidence is resampled until the
oracle certifies it has positive probability.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from lpadc.grounder import ground
from lpadc.model import Literal
from lpadc.oracle import exact_prob
from lpadc.parser import parse_atom, parse_program

_HEAD_POOL = ["h0", "h1", "h2", "h3", "h4", "h5"]
_DERIVED_POOL = ["d0", "d1", "d2"]


@dataclass(frozen=True)
class Case:
    seed: int
    src: str
    program: object
    gp: object
    query: object  # Atom
    evidence: tuple  # Literals, possibly empty


def _head_probs(rng, k):
    weights = [rng.uniform(0.1, 1.0) for _ in range(k)]
    total = 1.0 if rng.random() < 0.4 else rng.uniform(0.3, 0.95)
    scale = total / sum(weights)
    return [w * scale for w in weights]


def _choice_clause(rng):
    k = rng.randint(1, 3)
    heads = rng.sample(_HEAD_POOL, k)
    probs = _head_probs(rng, k)
    text = "; ".join("%s:%r" % (a, p) for a, p in zip(heads, probs))
    if rng.random() < 0.5:
        body = rng.sample(_HEAD_POOL, rng.randint(1, 2))
        text += " :- " + ", ".join(body)
    return text + "."


def _det_rule(rng):
    head = rng.choice(_DERIVED_POOL)
    if rng.random() < 0.15:
        return head + "."
    lits = []
    for _ in range(rng.randint(1, 3)):
        if rng.random() < 0.3:
            lits.append(rng.choice(_DERIVED_POOL))
        elif rng.random() < 0.4:
            lits.append("\\+" + rng.choice(_HEAD_POOL))
        else:
            lits.append(rng.choice(_HEAD_POOL))
    return "%s :- %s." % (head, ", ".join(lits))


def _sample_literals(rng, atoms, n):
    out = []
    for name in rng.sample(atoms, n):
        out.append(Literal(parse_atom(name), negated=rng.random() < 0.3))
    return tuple(out)


def random_case(seed):
    rng = random.Random(seed)
    lines = [_choice_clause(rng) for _ in range(rng.randint(1, 4))]
    lines.extend(_det_rule(rng) for _ in range(rng.randint(0, 3)))
    src = "\n".join(lines) + "\n"
    program = parse_program(src)
    gp = ground(program)
    atoms = sorted({str(h[0]) for c in program.clauses for h in c.heads})
    query = parse_atom(rng.choice(atoms))
    evidence = ()
    for _ in range(60):
        candidate = _sample_literals(rng, atoms, rng.randint(1, min(2, len(atoms))))
        if exact_prob(gp, candidate) > 0.0:
            evidence = candidate
            break
    return Case(seed, src, program, gp, query, evidence)


def map_subset(case, rng=None):
    """A nonempty random subset of choice-variable indices for MAP runs."""
    rng = rng or random.Random(case.seed ^ 0x9E3779B9)
    n = len(case.gp.choice_vars)
    if n == 0:
        return []
    size = rng.randint(1, n)
    return sorted(rng.sample(range(n), size))
