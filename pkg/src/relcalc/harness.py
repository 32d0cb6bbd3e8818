"""Random generators, witness constructions and the property suites.

Each suite draws ``cfg.sample_count`` independent samples; sample ``i``
uses its own RNG seeded from ``(cfg.seed, i)``, so a failure is replayed
exactly by re-running its index.  Failures can be persisted to a corpus
directory and are replayed first on later runs.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import cor
from . import fo
from . import semantics as sem
from . import structures as st
from . import translations as tr
from .errors import RelcalcError

# --- configuration and generators ---------------------------------------------


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_formula_depth: int = 4
    max_universe: int = 3
    k_max: int = 4
    sample_count: int = 100


def sample_rng(cfg: GenConfig, index: int) -> random.Random:
    return random.Random(cfg.seed * 1_000_003 + index)


def _stop(rng: random.Random, depth: int, top: bool) -> bool:
    # geometric depth with p = 0.5, but never stop at the root of a deep draw
    return depth <= 0 or (not top and rng.random() < 0.5)


def gen_formula(
    cfg: GenConfig,
    signature: Sequence[str],
    var_pool: Sequence[str],
    rng: random.Random | None = None,
    depth: int | None = None,
    equality: bool = True,
) -> fo.Formula:
    """Random core formula over binary ``signature`` and ``var_pool``."""
    rng = rng or random.Random(cfg.seed)
    signature, var_pool = list(signature), list(var_pool)
    if not signature or not var_pool:
        raise RelcalcError("generator pools must be non-empty")

    def go(d: int, top: bool) -> fo.Formula:
        if _stop(rng, d, top):
            x, y = rng.choice(var_pool), rng.choice(var_pool)
            if equality and rng.random() < 0.2:
                return fo.Eq(x, y)
            return fo.Atom(rng.choice(signature), x, y)
        op = rng.choice(("not", "and", "exists", "exists"))
        if op == "not":
            return fo.Not(go(d - 1, False))
        if op == "and":
            return fo.And(go(d - 1, False), go(d - 1, False))
        return fo.Exists(rng.choice(var_pool), go(d - 1, False))

    return go(cfg.max_formula_depth if depth is None else depth, True)


def gen_term(
    cfg: GenConfig,
    signature: Sequence[str],
    rng: random.Random | None = None,
    depth: int | None = None,
    conv_id: bool = True,
) -> cor.Term:
    """Random core term; ``conv_id=False`` avoids converse and identity."""
    rng = rng or random.Random(cfg.seed)
    signature = list(signature)
    if not signature:
        raise RelcalcError("generator pools must be non-empty")
    ops = ("comp", "inter", "dot", "conv") if conv_id else ("comp", "inter", "dot")

    def go(d: int, top: bool) -> cor.Term:
        if _stop(rng, d, top):
            if conv_id and rng.random() < 0.15:
                return cor.I
            return cor.RelVar(rng.choice(signature))
        op = rng.choice(ops)
        if op == "comp":
            return cor.Comp(go(d - 1, False))
        if op == "conv":
            return cor.Conv(go(d - 1, False))
        left, right = go(d - 1, False), go(d - 1, False)
        return cor.Inter(left, right) if op == "inter" else cor.Dot(left, right)

    return go(cfg.max_formula_depth if depth is None else depth, True)


def gen_qf(
    cfg: GenConfig, signature: Sequence[str], rng: random.Random, depth: int = 2, conv_id: bool = True
) -> cor.QfFormula:
    """Random Boolean combination of equations between random terms."""
    term_depth = max(1, cfg.max_formula_depth - 1)

    def go(d: int, top: bool) -> cor.QfFormula:
        if _stop(rng, d, top):
            return cor.Equation(
                gen_term(cfg, signature, rng, term_depth, conv_id), gen_term(cfg, signature, rng, term_depth, conv_id)
            )
        if rng.random() < 0.5:
            return cor.QNot(go(d - 1, False))
        return cor.QAnd(go(d - 1, False), go(d - 1, False))

    return go(depth, True)


def gen_structure(
    cfg: GenConfig, signature: Iterable[str], rng: random.Random | None = None, size: int | None = None
) -> st.Structure:
    rng = rng or random.Random(cfg.seed)
    n = size if size is not None else rng.randint(1, cfg.max_universe)
    rels = {
        name: {(s, t) for s in range(n) for t in range(n) if rng.random() < 0.5} for name in sorted(set(signature))
    }
    return st.Structure(n, rels)


# --- witness constructions -----------------------------------------------------


def tseitin_extend(m: st.Structure, env: tr.TseitinEnv) -> st.Structure:
    """Interpret every Tseitin name ``a_s`` as the value of ``s`` on ``m``."""
    clash = set(env.name_of.values()) & set(m.relations)
    if clash:
        raise RelcalcError(f"structure already interprets {sorted(clash)}")
    mats = {name: m.matrix(name) for name in m.relations}
    for s, name in env.name_of.items():
        mats[name] = sem.term_matrix(m, s)
    return st.Structure.from_matrices(m.universe_size, mats)


def sigma2_witness(m: st.Structure, res: tr.Sigma2Result) -> st.Structure:
    """Tseitin extension plus complement names read as complements."""
    ext = tseitin_extend(m, res.env)
    mats = {name: ext.matrix(name) for name in ext.relations}
    for base, bar in res.complement_of.items():
        mats[bar] = ~mats[base]
    return st.Structure.from_matrices(m.universe_size, mats)


def quotient_by_E(m: st.Structure, e_name: str) -> st.Structure:
    """Collapse the classes of the congruence ``e_name`` and drop it."""
    if e_name not in m.relations:
        raise RelcalcError(f"structure does not interpret {e_name!r}")
    e = m.matrix(e_name)
    n = m.universe_size
    if not e.diagonal().all():
        raise RelcalcError(f"{e_name} is not reflexive")
    if not (e == e.T).all():
        raise RelcalcError(f"{e_name} is not symmetric")
    if not (e >= sem.compose(e, e)).all():
        raise RelcalcError(f"{e_name} is not transitive")
    for name in m.relations:
        if name == e_name:
            continue
        r = m.matrix(name)
        # a congruence: E ; r ; E ⊆ r
        if not (r >= sem.compose(sem.compose(e, r), e)).all():
            raise RelcalcError(f"{e_name} is not a congruence for {name}")
    rep = [int(np.flatnonzero(e[v])[0]) for v in range(n)]
    reps = sorted(set(rep))
    cls = {r: i for i, r in enumerate(reps)}
    rels = {
        name: {(cls[rep[s]], cls[rep[t]]) for s, t in pairs}
        for name, pairs in m.relations.items()
        if name != e_name
    }
    return st.Structure(len(reps), rels)


# --- Γ^(1) completeness at micro scale ------------------------------------------------


@dataclass
class MicroReport:
    k: int
    max_size: int
    checked: int
    models: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def gamma_completeness_microscale(
    k: int = 1,
    base_signature: Sequence[str] = ("a",),
    max_size: int = 2,
    gamma: Sequence[cor.QfFormula] | None = None,
    budget: int | None = None,
    chunk: int = 1 << 16,
    max_failures: int = 10,
) -> MicroReport:
    """Enumerate every Σ^(k)-structure up to ``max_size`` and check that each
    model of ⋀``gamma`` (default Γ^(k)) is isomorphic to a k-tuple structure."""
    gamma = list(tr.gamma_k(k, base_signature) if gamma is None else gamma)
    names = sorted(st.ktuple_signature(k, base_signature))
    budget = st.enumeration_budget() if budget is None else budget
    total = sum(st.count_structures(names, n) for n in range(1, max_size + 1))
    if total > budget:
        raise st.BudgetExceeded(f"{total} structures exceed the enumeration budget {budget}")
    report = MicroReport(k, max_size, 0, 0)
    for n in range(1, max_size + 1):
        count = st.count_structures(names, n)
        for start in range(0, count, chunk):
            idx = np.arange(start, min(start + chunk, count), dtype=np.uint64)
            env = st.batch_matrices(names, n, idx)
            ok = np.ones(len(idx), dtype=bool)
            for eq in gamma:
                ok &= np.broadcast_to(sem.qf_array(eq, env, n), ok.shape)
            report.checked += len(idx)
            for j in np.flatnonzero(ok):
                report.models += 1
                model = st.Structure.from_matrices(n, {name: env[name][j] for name in names})
                if not st.is_k_tuple(model, k, base_signature) and len(report.failures) < max_failures:
                    report.failures.append(model)
    return report


# --- property checks ------------------------------------------------------------


def encoded_assignments(m: st.Structure, phi: fo.Formula, unit: tr.TranslationUnit) -> set[int]:
    """Codes of the k-tuples whose coordinates satisfy ``phi`` (x_i ↦ u_i)."""
    n, k = m.universe_size, unit.k
    by_index = {i: v for v, i in unit.var_index.items()}
    variables = [by_index[i] for i in sorted(by_index)]
    sat = sem.eval_fo(m, phi, variables)
    out = set()
    for values in np.ndindex(*(n,) * k):
        if sem.Assignment({v: values[unit.var_index[v] - 1] for v in variables}) in sat:
            out.add(st.encode_tuple(values, n))
    return out


def lemma33_holds(phi: fo.Formula, m: st.Structure, translate: Callable = tr.t_k) -> bool:
    unit = tr.TranslationUnit.of(phi)
    mk = st.k_tuple_structure(m, unit.k, unit.sigma_used)
    got = sem.eval_term(mk, translate(phi, unit))
    want = {(c, c) for c in encoded_assignments(m, phi, unit)}
    return got == want


def lemma35_holds(phi: fo.Formula, m: st.Structure) -> bool:
    unit = tr.TranslationUnit.of(phi)
    mk = st.k_tuple_structure(m, unit.k, unit.sigma_used)
    return sem.holds_fo(m, phi) == sem.holds_qf(mk, tr.fo_to_cor(phi))


def schroder_holds(f: cor.QfFormula, m: st.Structure) -> bool:
    return sem.holds_qf(m, f) == bool(sem.term_matrix(m, tr.schroder_tarski(f)).all())


def standard_holds(t: cor.Term, m: st.Structure) -> bool:
    phi = tr.standard_translation(t)
    pairs = {(a["x1"], a["x2"]) for a in sem.eval_fo(m, phi, {"x1", "x2"})}
    return fo.is_fok(phi, 3) and pairs == set(sem.eval_term(m, t))


def tseitin_witness_holds(t: cor.Term, m: st.Structure) -> bool:
    env = tr.tseitin(t)
    ext = tseitin_extend(m, env)
    if not all(sem.holds_qf(ext, eq) for eq in env.gamma):
        return False
    return all(np.array_equal(ext.matrix(name), sem.term_matrix(m, s)) for s, name in env.name_of.items())


def tseitin_validity_agrees(t: cor.Term, base: Sequence[str], max_size: int = 2) -> bool:
    """``t = top`` valid up to ``max_size`` iff ``(⋀Γ_t) → a_t = top`` is,
    with the subterm lemma checked on every model of Γ_t on the way."""
    env = tr.tseitin(t)
    order = list(sorted(set(base))) + env.names
    left = bool(sem.check_valid_upto(cor.Equation(t, cor.TOP), base, max_size))
    right = True
    for n in range(1, max_size + 1):
        for model in sem.models_of(env.gamma, order, n):
            for s, name in env.name_of.items():
                if not np.array_equal(model.matrix(name), sem.term_matrix(model, s)):
                    return False
            if not model.matrix(env.root).all():
                right = False
    return left == right


def fo3_pointwise_holds(phi: fo.Formula, m: st.Structure) -> bool:
    unit = tr.TranslationUnit.of(phi, min_k=3)
    mk = st.k_tuple_structure(m, unit.k, unit.sigma_used)
    want = encoded_assignments(m, phi, unit)
    for z in tr.FO3_VARS:
        got = {a[z] for a in sem.eval_fo(mk, tr.t_z_k(phi, unit, z), {z})}
        if got != want:
            return False
    return fo.is_fok(tr.fo_to_fo3(phi), 3)


def gamma_sound_holds(m: st.Structure, k: int, sigma: Sequence[str]) -> bool:
    mk = st.k_tuple_structure(m, k, sigma)
    return all(sem.holds_qf(mk, eq) for eq in tr.gamma_k(k, sigma))


def random_congruence_structure(
    rng: random.Random, signature: Sequence[str], size: int, e_name: str
) -> st.Structure:
    """A structure where ``e_name`` is a congruence: pull a random quotient
    structure back along a random surjection."""
    classes = rng.randint(1, size)
    f = [rng.randrange(classes) for _ in range(size)]
    for c in range(classes):
        f[rng.randrange(size) if c >= size else c] = c
    rels = {}
    for name in signature:
        base = {(s, t) for s in range(classes) for t in range(classes) if rng.random() < 0.5}
        rels[name] = {(s, t) for s in range(size) for t in range(size) if (f[s], f[t]) in base}
    rels[e_name] = {(s, t) for s in range(size) for t in range(size) if f[s] == f[t]}
    return st.Structure(size, rels)


def equality_elim_holds(phi: fo.Formula, m: st.Structure, m_e: st.Structure | None, e_name: str) -> bool:
    """Forward: ``m ⊨ phi`` gives ``m + (E = id) ⊨ output``.  Backward: if
    ``m_e ⊨ output`` then its quotient satisfies ``phi``."""
    elim = tr.eliminate_equality_full(phi, "satisfiability")
    out = elim.formula
    if fo.uses_equality(out) or len(fo.vars_of(out)) > 3:
        return False
    ident = {(v, v) for v in range(m.universe_size)}
    m_id = m.with_relations({elim.e_name: ident})
    if sem.holds_fo(m_id, out) != sem.holds_fo(m, phi):
        return False
    if m_e is not None and sem.holds_fo(m_e, out):
        if not sem.holds_fo(quotient_by_E(m_e, elim.e_name), phi):
            return False
    return True


# --- linearity ---------------------------------------------------------------------


def _wide_formula(width: int) -> fo.Formula:
    """Balanced conjunction of ``width`` atoms and quantified atoms over x, y, z."""
    vs = ("x", "y", "z")
    parts = []
    for i in range(width):
        a = fo.Atom("ab"[i % 2], vs[i % 3], vs[(i + 1) % 3])
        parts.append(fo.Exists(vs[(i + 2) % 3], fo.Not(a)) if i % 4 == 3 else a)
    return fo._balanced(parts, fo.And)


def _chain_formula(k: int) -> fo.Formula:
    xs = [f"x{i}" for i in range(1, k + 1)]
    out: fo.Formula = fo.Atom("a", xs[0], xs[-1])
    for x in reversed(xs):
        out = fo.Exists(x, out)
    return out


def _wide_term(width: int) -> cor.Term:
    leaves = [cor.RelVar(f"r{i}") for i in range(width)]

    def build(lo: int, hi: int, level: int) -> cor.Term:
        if hi - lo == 1:
            return leaves[lo]
        mid = (lo + hi) // 2
        left, right = build(lo, mid, level + 1), build(mid, hi, level + 1)
        node = cor.Dot(left, right) if level % 2 else cor.Inter(left, right)
        return cor.Comp(node) if level % 3 == 0 else node

    return build(0, width, 0)


FO_FAMILIES: dict[str, Callable[[int], fo.Formula]] = {"wide": _wide_formula, "chain": _chain_formula}
FO_WIDTHS = {"wide": (4, 16, 64, 256, 1024, 2112), "chain": (4, 8, 16, 32, 64)}
TERM_WIDTHS = (4, 16, 64, 256, 1024, 4736)

# Largest measured size(output) / size(input) over the family corpus below.
LINEARITY_BOUNDS = {"fo_to_cor": 108.64, "fo_to_fo3": 111.49, "tseitin": 4.0, "godel_reduce": 53.72}


@dataclass(frozen=True)
class SizeRow:
    op: str
    family: str
    width: int
    input_size: int
    output_size: int

    @property
    def ratio(self) -> float:
        return self.output_size / self.input_size


def tseitin_size(env: tr.TseitinEnv) -> int:
    return sum(cor.size_qf(eq) for eq in env.gamma)


def size_rows() -> list[SizeRow]:
    rows = []
    for fam, build in FO_FAMILIES.items():
        for w in FO_WIDTHS[fam]:
            phi = build(w)
            n_in = fo.size_fo(phi)
            rows.append(SizeRow("fo_to_cor", fam, w, n_in, cor.size_qf(tr.fo_to_cor_equation(phi))))
            rows.append(SizeRow("fo_to_fo3", fam, w, n_in, fo.size_fo(tr.fo_to_fo3(phi))))
    for w in TERM_WIDTHS:
        t = _wide_term(w)
        rows.append(SizeRow("tseitin", "wide", w, cor.size_term(t), tseitin_size(tr.tseitin(t))))
        eq = cor.Equation(t, cor.TOP)
        rows.append(SizeRow("godel_reduce", "wide", w, cor.size_qf(eq), fo.size_fo(tr.godel_reduce(eq))))
    return rows


# --- suites ----------------------------------------------------------------------------

BASE_SIGNATURE = ("a", "b")


def _vars(rng: random.Random, k_max: int) -> list[str]:
    return [f"x{i}" for i in range(1, rng.randint(1, k_max) + 1)]


def _s_lemma33(cfg, rng):
    phi = gen_formula(cfg, BASE_SIGNATURE, _vars(rng, min(cfg.k_max, 4)), rng)
    m = gen_structure(cfg, BASE_SIGNATURE, rng)
    return lemma33_holds(phi, m), {"formula": fo.print_fo(phi), "structure": m.to_json_obj()}


def _s_lemma35(cfg, rng):
    phi = gen_formula(cfg, BASE_SIGNATURE, _vars(rng, min(cfg.k_max, 3)), rng)
    m = gen_structure(cfg, BASE_SIGNATURE, rng)
    return lemma35_holds(phi, m), {"formula": fo.print_fo(phi), "structure": m.to_json_obj()}


def _s_schroder(cfg, rng):
    f = gen_qf(cfg, BASE_SIGNATURE, rng)
    m = gen_structure(cfg, BASE_SIGNATURE, rng)
    return schroder_holds(f, m), {"formula": cor.print_cor(f), "structure": m.to_json_obj()}


def _s_standard(cfg, rng):
    t = gen_term(cfg, BASE_SIGNATURE, rng)
    m = gen_structure(cfg, BASE_SIGNATURE, rng)
    return standard_holds(t, m), {"term": cor.print_cor(t), "structure": m.to_json_obj()}


def _s_tseitin(cfg, rng):
    t = gen_term(cfg, BASE_SIGNATURE, rng, depth=min(cfg.max_formula_depth, 3))
    m = gen_structure(cfg, BASE_SIGNATURE, rng)
    ok = tseitin_witness_holds(t, m) and tseitin_validity_agrees(t, BASE_SIGNATURE, 2)
    return ok, {"term": cor.print_cor(t), "structure": m.to_json_obj()}


def _s_fo3(cfg, rng):
    phi = gen_formula(cfg, BASE_SIGNATURE, _vars(rng, 3), rng)
    m = gen_structure(cfg, BASE_SIGNATURE, rng, size=rng.randint(1, min(cfg.max_universe, 2)))
    return fo3_pointwise_holds(phi, m), {"formula": fo.print_fo(phi), "structure": m.to_json_obj()}


def _s_equality(cfg, rng):
    phi = gen_formula(cfg, BASE_SIGNATURE, ["x", "y", "z"][: rng.randint(1, 3)], rng)
    m = gen_structure(cfg, BASE_SIGNATURE, rng)
    e = tr.eliminate_equality_full(phi).e_name
    m_e = random_congruence_structure(rng, BASE_SIGNATURE, rng.randint(1, cfg.max_universe), e)
    ok = equality_elim_holds(phi, m, m_e, e)
    return ok, {"formula": fo.print_fo(phi), "structure": m.to_json_obj(), "with_e": m_e.to_json_obj()}


def _s_godel(cfg, rng):
    f = cor.Equation(gen_term(cfg, BASE_SIGNATURE, rng, conv_id=False), cor.TOP)
    if rng.random() < 0.5:
        f = cor.Equation(f.left, gen_term(cfg, BASE_SIGNATURE, rng, conv_id=False))
    out = tr.godel_reduce(f)
    pc = fo.classify_prefix(tr.negate(out))
    ok = fo.in_godel_class(pc, "forall") and pc.max_predicate_arity == 2 and not pc.uses_equality
    res = tr.sigma2_pipeline(f)
    m = gen_structure(cfg, BASE_SIGNATURE, rng, size=rng.randint(1, min(cfg.max_universe, 2)))
    # on the witness extension the output agrees with the input
    ok = ok and sem.holds_fo(sigma2_witness(m, res), out) == sem.holds_qf(m, f)
    # on arbitrary interpretations of the fresh names it agrees with the Σ2 equation
    n = rng.randint(1, min(cfg.max_universe, 2))
    noise = gen_structure(cfg, sorted(fo.predicates_of(out)), rng, size=n)
    ok = ok and sem.holds_fo(noise, out) == sem.holds_qf(noise, res.equation)
    return ok, {"equation": cor.print_cor(f), "structure": m.to_json_obj()}


def _s_gamma_sound(cfg, rng):
    k = rng.randint(1, 3)
    sigma = BASE_SIGNATURE[: rng.randint(1, 2)]
    m = gen_structure(cfg, sigma, rng)
    return gamma_sound_holds(m, k, sigma), {"k": k, "structure": m.to_json_obj()}


SAMPLERS: dict[str, Callable] = {
    "lemma33": _s_lemma33,
    "lemma35": _s_lemma35,
    "schroder": _s_schroder,
    "standard": _s_standard,
    "tseitin": _s_tseitin,
    "fo3": _s_fo3,
    "equality": _s_equality,
    "godel": _s_godel,
    "gamma-sound": _s_gamma_sound,
}
SUITES = tuple(SAMPLERS) + ("linearity", "gamma-complete")


@dataclass
class SuiteReport:
    suite: str
    seed: int
    samples: int = 0
    failures: list = field(default_factory=list)
    lines: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        return {"suite": self.suite, "samples": self.samples, "failures": self.failures}

    def text(self) -> str:
        return "\n".join(self.lines)


def _persist(corpus: Path, suite: str, seed: int, index: int, detail: dict) -> str:
    corpus.mkdir(parents=True, exist_ok=True)
    path = corpus / f"{suite}-{seed}-{index}.json"
    path.write_text(json.dumps({"suite": suite, "seed": seed, "index": index, **detail}, indent=1, sort_keys=True))
    return str(path)


def _replay_indices(corpus: Path | None, suite: str, seed: int) -> list[int]:
    if corpus is None or not corpus.is_dir():
        return []
    out = []
    for path in sorted(corpus.glob(f"{suite}-{seed}-*.json")):
        try:
            out.append(int(json.loads(path.read_text())["index"]))
        except (ValueError, KeyError, json.JSONDecodeError):
            continue
    return out


def run_suite(name: str, cfg: GenConfig | None = None, corpus_dir: str | Path | None = None) -> SuiteReport:
    """Run one property suite; see :data:`SUITES` for the names."""
    cfg = cfg or GenConfig()
    if name not in SUITES:
        raise RelcalcError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
    corpus = Path(corpus_dir) if corpus_dir is not None else None
    report = SuiteReport(name, cfg.seed)
    started = time.perf_counter()
    if name == "linearity":
        for row in size_rows():
            bound = LINEARITY_BOUNDS[row.op]
            report.samples += 1
            ok = row.ratio <= bound
            report.lines.append(
                f"{'ok' if ok else 'FAIL'} {row.op} {row.family}[{row.width}] "
                f"{row.input_size} -> {row.output_size} ratio {row.ratio:.3f} (bound {bound})"
            )
            if not ok:
                report.failures.append({"seed": cfg.seed, "input_files": [], "case": asdict(row)})
    elif name == "gamma-complete":
        micro = gamma_completeness_microscale(max_size=min(cfg.max_universe, 2))
        report.samples = micro.checked
        report.lines.append(f"checked {micro.checked} structures, {micro.models} models of Γ^(1)")
        for model in micro.failures:
            report.failures.append({"seed": cfg.seed, "input_files": [], "structure": model.to_json_obj()})
            report.lines.append(f"FAIL not a 1-tuple structure: {model.to_json()}")
    else:
        sampler = SAMPLERS[name]
        replay = _replay_indices(corpus, name, cfg.seed)
        indices = list(dict.fromkeys(replay + list(range(cfg.sample_count))))
        for i in indices:
            ok, detail = sampler(cfg, sample_rng(cfg, i))
            report.samples += 1
            if ok:
                report.lines.append(f"ok {name} #{i}")
                continue
            files = [_persist(corpus, name, cfg.seed, i, detail)] if corpus is not None else []
            report.failures.append({"seed": cfg.seed, "index": i, "input_files": files, "case": detail})
            report.lines.append(f"FAIL {name} #{i} seed={cfg.seed} {json.dumps(detail, sort_keys=True)}")
    report.elapsed = time.perf_counter() - started
    report.lines.append(f"{name}: {report.samples} samples, {len(report.failures)} failures, {report.elapsed:.1f}s")
    return report
