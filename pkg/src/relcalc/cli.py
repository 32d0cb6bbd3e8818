"""Command-line front end: ``relcalc <verb> [options]``.

Exit codes: 0 on success, 1 on a semantic rejection or a counterexample,
2 on a parse or usage error.  Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Sequence

from . import cor, fo, harness, semantics
from . import structures as st
from . import translations as tr
from .errors import ParseError, RelcalcError

VERBS = (
    "translate",
    "eval",
    "check-valid",
    "ktuple",
    "tseitin",
    "sigma2",
    "godel",
    "fo3",
    "elim-eq",
    "arity",
    "size-report",
    "selftest",
)


class UsageError(Exception):
    pass


# --- AST to JSON ---------------------------------------------------------------


def ast_json(node):
    if isinstance(node, (list, tuple)):
        return [ast_json(x) for x in node]
    if not dataclasses.is_dataclass(node):
        return node
    out = {"node": type(node).__name__}
    for field in dataclasses.fields(node):
        out[field.name] = ast_json(getattr(node, field.name))
    return out


# --- input ---------------------------------------------------------------------------


def _source(args) -> str:
    if args.expr is not None and args.file is not None:
        raise UsageError("give either -e or -f, not both")
    if args.expr is not None:
        return args.expr
    if args.file is not None:
        with open(args.file, encoding="utf-8") as fh:
            return fh.read()
    raise UsageError("an input is required (-e <expr> or -f <file>)")


def _read(args, default: str | None = None):
    """Parse the input and return (language, ast).

    Without ``--from`` both grammars are tried; when both accept, FO wins
    only if the formula mentions a predicate or a quantifier."""
    text = _source(args)
    lang = args.src or default
    if lang == "fo":
        return "fo", fo.parse_fo(text)
    if lang == "cor":
        return "cor", cor.parse_cor(text)
    try:
        f = fo.parse_fo(text)
    except ParseError as fo_err:
        try:
            return "cor", cor.parse_cor(text)
        except ParseError:
            raise fo_err from None
    try:
        c = cor.parse_cor(text)
    except ParseError:
        return "fo", f
    if fo.predicates_of(f) or any(isinstance(g, fo.Exists) for g in fo.iter_nodes(f)):
        return "fo", f
    return "cor", c


def _read_fo(args, nary: bool = False) -> fo.Formula:
    if args.src == "cor":
        raise UsageError("this verb takes a first-order formula")
    return fo.parse_fo(_source(args), nary=nary)


def _read_qf(args) -> cor.QfFormula:
    if args.src == "fo":
        raise UsageError("this verb takes a CoR equation")
    x = cor.parse_cor(_source(args))
    if isinstance(x, (cor.Equation, cor.QNot, cor.QAnd)):
        return x
    return cor.Equation(x, cor.TOP)


def _need(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required for this verb")
    return value


# --- output --------------------------------------------------------------------------


def _emit(args, ast, text: str | None = None) -> None:
    if args.json:
        print(json.dumps(ast_json(ast)))
    else:
        print(text if text is not None else _print_any(ast))


def _print_any(x) -> str:
    if isinstance(x, (cor.RelVar, cor.Id, cor.Comp, cor.Inter, cor.Dot, cor.Conv, cor.Equation, cor.QNot, cor.QAnd)):
        return cor.print_cor(x)
    return fo.print_fo(x)


def _tuple_label(code: int, n: int, k: int) -> str:
    digits = st.decode_tuple(code, n, k)
    return "".join(map(str, digits)) if n <= 10 else ",".join(map(str, digits))


# --- verbs ---------------------------------------------------------------------------


def cmd_translate(args) -> int:
    src = args.src or "fo"
    dst = _need(args.dst, "--to")
    if src == "fo":
        f = _read_fo(args)
        if dst == "cor":
            out = tr.fo_to_cor_equation(f)
        elif dst == "fo3":
            out = tr.fo_to_fo3(f)
        else:
            raise UsageError(f"no translation from fo to {dst}; translate to cor first")
    else:
        f = _read_qf(args) if dst != "fo3" else cor.parse_cor(_source(args))
        if dst == "fo3":
            if isinstance(f, (cor.Equation, cor.QNot, cor.QAnd)):
                out = tr.standard_translation_qf(f)
            else:
                out = tr.standard_translation(f)
        elif dst == "godel":
            out = tr.godel_reduce(f)
        elif dst == "sigma2":
            out = tr.sigma2_normalize(f)
        else:
            out = tr.schroder_tarski(f)
            out = cor.Equation(out, cor.TOP)
    _emit(args, out)
    return 0


def cmd_eval(args) -> int:
    m = st.load_structure(_need(args.model, "-m"))
    lang, x = _read(args)
    if lang == "fo":
        free = sorted(fo.free_vars_of(x))
        if not free:
            result = semantics.holds_fo(m, x)
            print(json.dumps(result) if args.json else str(result).lower())
            return 0
        rows = sorted(semantics.eval_fo(m, x, free), key=lambda a: tuple(a[v] for v in free))
        print(json.dumps([dict(a) for a in rows]))
        return 0
    if isinstance(x, (cor.Equation, cor.QNot, cor.QAnd)):
        result = semantics.holds_qf(m, x)
        print(json.dumps(result) if args.json else str(result).lower())
        return 0
    print(json.dumps([list(p) for p in sorted(semantics.eval_term(m, x))]))
    return 0


def cmd_check_valid(args) -> int:
    lang, x = _read(args)
    if lang == "cor" and not isinstance(x, (cor.Equation, cor.QNot, cor.QAnd)):
        x = cor.Equation(x, cor.TOP)
    bound = args.max_size if args.max_size is not None else 2
    res = semantics.check_valid_upto(x, (), bound)
    if res:
        if args.json:
            print(json.dumps({"valid_up_to": res.bound, "checked": res.checked}))
        else:
            print(f"no counterexample up to size {res.bound} ({res.checked} structures)")
        return 0
    if args.json:
        print(json.dumps({"counterexample": res.structure.to_json_obj(), "index": res.index}))
    else:
        print(f"counterexample of size {res.structure.universe_size}:")
        print(res.structure.to_json())
    return 1


def cmd_ktuple(args) -> int:
    k = _need(args.k, "-k")
    m = st.load_structure(_need(args.model, "-m"))
    mk = st.k_tuple_structure(m, k, m.relations)
    if args.json:
        print(mk.to_json())
        return 0
    n = m.universe_size
    lines = []
    for name, pairs in sorted(mk.relations.items()):
        labelled = [[_tuple_label(s, n, k), _tuple_label(t, n, k)] for s, t in sorted(pairs)]
        lines.append(f"    {json.dumps(name)}: {json.dumps(labelled)}")
    # one relation per line keeps the listing readable and still valid JSON
    print(f'{{\n  "k": {k},\n  "universe": {mk.universe_size},\n  "relations": {{')
    print(",\n".join(lines))
    print("  }\n}")
    return 0


def cmd_tseitin(args) -> int:
    x = cor.parse_cor(_source(args))
    t = x if not isinstance(x, (cor.Equation, cor.QNot, cor.QAnd)) else tr.schroder_tarski(x)
    env = tr.tseitin(t)
    if args.json:
        print(json.dumps({"root": env.root, "gamma": ast_json(env.gamma)}))
        return 0
    for eq in env.gamma:
        print(cor.print_cor(eq))
    print(f"root: {env.root}")
    return 0


def cmd_sigma2(args) -> int:
    res = tr.sigma2_pipeline(_read_qf(args))
    shape = cor.check_sigma2(res.equation)
    if not shape:
        print(f"error: output failed the shape check: {shape.reason}", file=sys.stderr)
        return 1
    if args.json:
        print(
            json.dumps(
                {
                    "equation": ast_json(res.equation),
                    "gamma": ast_json(res.gamma),
                    "display": ast_json(res.display),
                    "complement_of": res.complement_of,
                }
            )
        )
        return 0
    print("# defining equations")
    for eq in res.env.gamma:
        print(cor.print_cor(eq))
    print("# violation terms")
    for t in res.display:
        print(cor.print_cor(t))
    print("# templates")
    for t in res.gamma:
        print(cor.print_cor(t))
    print("# equation")
    print(cor.print_cor(res.equation))
    return 0


def cmd_godel(args) -> int:
    out = tr.godel_reduce(_read_qf(args))
    if args.json:
        print(json.dumps(ast_json(out)))
        return 0
    pc = fo.classify_prefix(tr.negate(out))
    print(fo.print_fo(out))
    print(f"# negation prefix: {pc.pattern}, equality: {'yes' if pc.uses_equality else 'no'}")
    return 0


def cmd_fo3(args) -> int:
    _emit(args, tr.fo_to_fo3(_read_fo(args)))
    return 0


def cmd_elim_eq(args) -> int:
    _emit(args, tr.eliminate_equality(_read_fo(args)))
    return 0


def cmd_arity(args) -> int:
    _emit(args, tr.arity_reduce(_read_fo(args, nary=True)))
    return 0


def _report_rows(args) -> list[harness.SizeRow]:
    if args.expr is None and args.file is None:
        return harness.size_rows()
    lang, x = _read(args)
    rows = []
    if lang == "fo":
        n = fo.size_fo(x)
        rows.append(harness.SizeRow("fo_to_cor", "input", 0, n, cor.size_qf(tr.fo_to_cor_equation(x))))
        rows.append(harness.SizeRow("fo_to_fo3", "input", 0, n, fo.size_fo(tr.fo_to_fo3(x))))
        return rows
    t = x if not isinstance(x, (cor.Equation, cor.QNot, cor.QAnd)) else tr.schroder_tarski(x)
    eq = x if isinstance(x, (cor.Equation, cor.QNot, cor.QAnd)) else cor.Equation(x, cor.TOP)
    rows.append(harness.SizeRow("tseitin", "input", 0, cor.size_term(t), harness.tseitin_size(tr.tseitin(t))))
    rows.append(harness.SizeRow("godel_reduce", "input", 0, cor.size_qf(eq), fo.size_fo(tr.godel_reduce(eq))))
    return rows


def cmd_size_report(args) -> int:
    rows = _report_rows(args)
    over = [r for r in rows if r.ratio > harness.LINEARITY_BOUNDS[r.op]]
    if args.json:
        print(
            json.dumps(
                {
                    "rows": [dataclasses.asdict(r) | {"ratio": r.ratio} for r in rows],
                    "bounds": harness.LINEARITY_BOUNDS,
                }
            )
        )
    else:
        print(f"{'op':<14}{'family':<8}{'width':>7}{'input':>9}{'output':>10}{'ratio':>9}{'bound':>9}")
        for r in rows:
            bound = harness.LINEARITY_BOUNDS[r.op]
            print(f"{r.op:<14}{r.family:<8}{r.width:>7}{r.input_size:>9}{r.output_size:>10}{r.ratio:>9.2f}{bound:>9.2f}")
    return 1 if over else 0


def cmd_selftest(args) -> int:
    cfg = harness.GenConfig(seed=args.seed if args.seed is not None else 0)
    failed = 0
    summaries = []
    for name in harness.SUITES:
        report = harness.run_suite(name, cfg)
        failed += len(report.failures)
        summaries.append(report.summary())
        if not args.json:
            status = "ok" if not report.failures else f"{len(report.failures)} failing"
            print(f"{name:<15} {report.samples:>5} samples  {status}  ({report.elapsed:.1f}s)")
    if args.json:
        print(json.dumps(summaries))
    return 1 if failed else 0


COMMANDS = {
    "translate": cmd_translate,
    "eval": cmd_eval,
    "check-valid": cmd_check_valid,
    "ktuple": cmd_ktuple,
    "tseitin": cmd_tseitin,
    "sigma2": cmd_sigma2,
    "godel": cmd_godel,
    "fo3": cmd_fo3,
    "elim-eq": cmd_elim_eq,
    "arity": cmd_arity,
    "size-report": cmd_size_report,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="relcalc",
        description="Translate between FO=, the calculus of relations and FO3, and check them on finite models.",
    )
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--from", dest="src", choices=("fo", "cor"), help="input language (guessed when omitted)")
    p.add_argument("--to", dest="dst", choices=("cor", "fo3", "godel", "sigma2"), help="target of translate")
    p.add_argument("-e", dest="expr", metavar="EXPR", help="input formula or term")
    p.add_argument("-f", dest="file", metavar="FILE", help="read the input from a file")
    p.add_argument("-m", dest="model", metavar="STRUCTURE.json", help="structure for eval and ktuple")
    p.add_argument("-k", dest="k", type=int, help="tuple width for ktuple")
    p.add_argument("--max-size", dest="max_size", type=int, help="largest universe for check-valid (default 2)")
    p.add_argument("--seed", type=int, help="seed for selftest (default 0)")
    p.add_argument("--json", action="store_true", help="emit JSON instead of the text grammars")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.verb](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RelcalcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
