"""ASP encoding of the learning task: program text, fact emission, and decoding.

The program is shipped as ``data/learner.lp``. Facts follow its conventions:
``node/2``, ``tlabel/3``, ``relevant/2`` (with a ``partial/2`` marker when only
part of an instance is marked), ``feature/1``, ``f_arity/2``, ``f_static/2``,
``fval/3`` for static and ``fval/4`` for fluent valuations, ``constant/1`` and
``instance/1``. Nullary pool entries are declared with arity 1 and the
``(null,)`` argument tuple, which the program folds back to arity 0.

Transitions are facts over state pairs, so the program sees at most one edge
per pair and forbids two labels on the same pair. Data with parallel edges or
shared pairs is emitted anyway, with a warning; the native learner counts
multiplicities and is the reference there.

clingo is optional; :func:`solve_asp` raises ImportError without it.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Iterable

import numpy as np

from .grounding import Dataset, GroundedDomain, cost_of
from .predicate_pool import PredicatePool, TOP, detect_constants
from .strips_core import Domain, Literal, Predicate, Schema

log = logging.getLogger(__name__)

_PLAIN = re.compile(r"^[a-z][A-Za-z0-9_]*$")


def program_text() -> str:
    return resources.files("o2dplan").joinpath("data/learner.lp").read_text()


def _sym(name: str) -> str:
    if _PLAIN.match(name) and name not in ("not", "null", "top"):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass
class AspEncoding:
    program: str
    facts: str
    features: dict[str, int]      # ASP feature symbol -> pool index
    instances: dict[int, str]     # ASP instance number -> instance id
    constants: list[str]
    labels: dict[str, str]        # ASP label symbol -> label


def emit_asp(dataset: Dataset, pool: PredicatePool, beta=None,
             constants: Iterable[str] | None = None) -> AspEncoding:
    """Program plus facts for the dataset; ``beta`` overrides the program constants."""
    consts = list(detect_constants(pool).names if constants is None else constants)
    pairs = Counter((k, t) for k, _, t in dataset.edges())
    if any(c > 1 for c in pairs.values()):
        log.warning("%d state pair(s) carry more than one edge; the ASP program sees each pair once",
                    sum(1 for c in pairs.values() if c > 1))
    program = program_text()
    if beta is not None:
        program = program.replace("#const num_predicates = 12.",
                                  f"#const num_predicates = {beta.num_predicates}.")
        program = program.replace("#const max_action_arity = 3.",
                                  f"#const max_action_arity = {beta.max_arity}.")
    out: list[str] = []
    w = out.append
    insts = [i for i in dataset.instances_present]
    inst_num = {iid: n + 1 for n, iid in enumerate(insts)}
    labels = {_sym(lab): lab for lab in dataset.labels}
    lab_sym = {v: k for k, v in labels.items()}
    rows = {iid: sorted({pool.instances[iid].row[k[1]] for k in dataset.instance_keys(iid)})
            for iid in insts}

    # redundant entries: same valuation over every dataset state as an earlier one
    features: dict[str, int] = {}
    seen = set()
    for e in pool.entries:
        key = [bytes([e.arity])]
        for iid in insts:
            key.append(np.packbits(pool.values(e.index, iid, rows[iid]).reshape(len(rows[iid]), -1)).tobytes())
        key = b"|".join(key)
        if key in seen:
            continue
        seen.add(key)
        features["top" if e.expr == TOP else f"f{e.index}"] = e.index

    w("% instances\n")
    for iid, n in inst_num.items():
        w(f"instance({n}).\n")
    for c in consts:
        w(f"constant({_sym(c)}).\n")
    partial = [iid for iid in insts if set(dataset.instance_keys(iid)) != set(dataset.marked_keys(iid))]
    if partial:
        w("filename(data).\n")
    for iid in insts:
        n = inst_num[iid]
        t = pool.instances[iid]
        if iid in partial:
            w(f"partial({n},data).\n")
        for k in dataset.instance_keys(iid):
            w(f"node({n},{int(t.row[k[1]])}).\n")
        for k in dataset.marked_keys(iid):
            if iid in partial:
                w(f"relevant({n},{int(t.row[k[1]])}).\n")
            for lab in dataset.labels:
                for s2 in dataset.successors(k, lab):
                    w(f"tlabel({n},({t.row[k[1]]},{t.row[s2[1]]}),{lab_sym[lab]}).\n")
    w("% features\n")
    for f, idx in features.items():
        ar = pool.entries[idx].arity
        w(f"feature({f}).\nf_arity({f},{max(ar, 1)}).\n")
    for iid in insts:
        n = inst_num[iid]
        t = pool.instances[iid]
        objs = [_sym(o) for o in t.objects]
        for f, idx in features.items():
            ar = pool.entries[idx].arity
            static = pool.per_instance_static[(iid, idx)]
            vals = pool.values(idx, iid)
            if static:
                w(f"f_static({n},{f}).\n")
                targets = [(None, vals[rows[iid][0]])]
            else:
                targets = [(r, vals[r]) for r in rows[iid]]
            for r, v in targets:
                sid = "" if r is None else f",{r}"
                if ar == 0:
                    w(f"fval({n},({f},(null,)){sid},{int(bool(v))}).\n")
                elif ar == 1:
                    for o in np.flatnonzero(v):
                        w(f"fval({n},({f},({objs[o]},)){sid},1).\n")
                else:
                    for a, b in zip(*np.nonzero(v)):
                        if a != b:
                            w(f"fval({n},({f},({objs[a]},{objs[b]})){sid},1).\n")
    return AspEncoding(program, "".join(out), features, {v: k for k, v in inst_num.items()},
                       consts, labels)


# ---------------------------------------------------------------- solving

@dataclass
class AspResult:
    grounded: GroundedDomain
    cost: tuple
    optimality_proven: bool


def _arg(sym, constants):
    import clingo
    if sym.type == clingo.SymbolType.Number:
        return sym.number
    name = sym.name if sym.type == clingo.SymbolType.Function else sym.string
    return name


def solve_asp(enc: AspEncoding, pool: PredicatePool, time_limit: float | None = None,
              name: str = "learned") -> AspResult | None:
    """Solve with clingo; ``None`` when unsatisfiable."""
    import clingo

    ctl = clingo.Control(["--opt-mode=opt", "--warn=none"])
    ctl.add("base", [], enc.program)
    ctl.add("base", [], enc.facts)
    ctl.ground([("base", [])])
    best: list = []

    def on_model(m):
        best[:] = [list(m.symbols(shown=True))]

    if time_limit is None:
        res = ctl.solve(on_model=on_model)
    else:
        with ctl.solve(on_model=on_model, async_=True) as h:
            h.wait(time_limit)
            h.cancel()
            res = h.get()
    if not best:
        return None
    syms = best[0]
    preds = sorted({s.arguments[0].name for s in syms if s.name == "pred"},
                   key=lambda f: enc.features[f])
    static = {s.arguments[0].name for s in syms if s.name == "p_static"}
    arity = {_arg(s.arguments[0], enc.constants): s.arguments[1].number for s in syms if s.name == "a_arity"}
    pname = {f: f"p{i}" for i, f in enumerate(preds)}

    def p_arity(f):
        return pool.entries[enc.features[f]].arity

    lits = {lab: ([], []) for lab in arity}
    for s in syms:
        if s.name not in ("prec", "eff"):
            continue
        lab = _arg(s.arguments[0], enc.constants)
        f = s.arguments[1].arguments[0].name
        targs = s.arguments[1].arguments[1].arguments
        args = []
        for a in targs:
            v = _arg(a, enc.constants)
            if v == "null":
                continue
            args.append(v)
        if len(args) == 2 and args[0] == args[1]:
            continue  # repeated variables never match an object tuple
        lit = Literal(pname[f], tuple(args), bool(s.arguments[2].number))
        lits[lab][0 if s.name == "prec" else 1].append(lit)
    schemas = []
    for sym_lab, lab in enc.labels.items():
        key = lab if lab in lits else sym_lab
        if key not in lits:
            continue
        pre, eff = lits[key]
        st = tuple(sorted((l for l in pre if pname_static(l, pname, static)), key=str))
        dyn = tuple(sorted((l for l in pre if not pname_static(l, pname, static)), key=str))
        schemas.append(Schema(lab, arity[key], st, dyn, tuple(sorted(eff, key=str))))
    domain = Domain(name, tuple(Predicate(pname[f], p_arity(f), f in static) for f in preds),
                    tuple(schemas), tuple(enc.constants))
    gd = GroundedDomain(domain, {pname[f]: pool.entries[enc.features[f]].expr for f in preds})
    return AspResult(gd, cost_of(domain), bool(res.exhausted) if hasattr(res, "exhausted") else True)


def pname_static(lit: Literal, pname: dict, static: set) -> bool:
    inv = {v: k for k, v in pname.items()}
    return inv[lit.pred] in static
