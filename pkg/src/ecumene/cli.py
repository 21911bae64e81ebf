"""Command-line front end: ``ecumene prove|check|translate|corpus``.

Exit codes: 0 proved / check ok / corpus all-pass, 1 unknown / check
failed / some corpus entry failed, 2 usage, parse or IO error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import check_script, load_corpus, prove, run_corpus
from .formula import ImpI, is_modal_fragment
from .labek import EXTENSIONS, AxiomScheme, Theory
from .parser import ParseError, parse_formula, parse_labeled_sequent, parse_sequent, render
from .proof import FragmentError, ProofCheckError, ProofScript, SearchBudget, dump_script, load_script
from .semantics import EXTENSION_PROPERTY, find_countermodel, find_sequent_countermodel
from .translations import TranslationError, ik_translate, ik_translate_sequent, proof_translate, \
    seq_translate, std_translate

EXIT_OK, EXIT_UNKNOWN, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


# -- helpers -----------------------------------------------------------------

def _budget(args) -> SearchBudget:
    return SearchBudget(max_depth=args.depth, max_nodes=args.nodes)


def _extensions(values) -> frozenset[str]:
    out = set()
    for v in values or ():
        for ch in v.replace(",", "").replace(" ", ""):
            if ch not in EXTENSIONS:
                raise UsageError(f"unknown extension {ch!r}; choose from {', '.join(EXTENSIONS)}")
            out.add(ch)
    return frozenset(out)


def _axioms(paths) -> tuple[AxiomScheme, ...]:
    """Axiom files hold a JSON object {name, scheme} or a list of them."""
    out = []
    for p in paths or ():
        doc = json.loads(Path(p).read_text())
        for item in doc if isinstance(doc, list) else [doc]:
            try:
                out.append(AxiomScheme(item["name"], item["scheme"]))
            except (KeyError, TypeError):
                raise UsageError(f"{p}: axiom entries need 'name' and 'scheme'") from None
    return tuple(out)


def _theory(args) -> Theory:
    return Theory(_extensions(args.ext), _axioms(args.axiom))


def _system(args, text: str) -> str:
    if args.system:
        return args.system
    return "labek" if ":" in text else "leci"


def _emit(args, human: str, doc: dict) -> None:
    print(json.dumps(doc, indent=2, sort_keys=False) if args.json else human)


def _countermodel(system: str, s, theory: Theory, max_worlds: int):
    props = tuple(EXTENSION_PROPERTY[e] for e in sorted(theory.extensions))
    if system == "labek":
        return find_sequent_countermodel(s, max_worlds, props)
    goal = s.succedent
    for f in reversed(s.antecedent):
        goal = ImpI(f, goal)
    if not is_modal_fragment(goal):
        return None
    return find_countermodel(goal, max_worlds, props)


# -- subcommands -------------------------------------------------------------

def cmd_prove(args) -> int:
    system = _system(args, args.sequent)
    s = parse_labeled_sequent(args.sequent) if system == "labek" else parse_sequent(args.sequent)
    theory = _theory(args) if system == "labek" else Theory()
    if system == "leci" and (args.ext or args.axiom):
        raise UsageError("--ext and --axiom apply to labek only")
    out = prove(system, s, theory, _budget(args), allow_cut=args.allow_cut)
    doc: dict = {"sequent": s.render(), "system": system, "status": out.status, "nodes": out.nodes}
    if out.status == "proved":
        cut = args.allow_cut or bool(theory.axioms)
        script = dump_script(out.proof, system, allow_cut=cut, theory=theory if system == "labek" else None)
        doc["proof"] = json.loads(script)
        _emit(args, f"Proved ({out.nodes} nodes)\n{script.rstrip()}", doc)
        return EXIT_OK
    reason = "budget exhausted" if out.budget_exhausted else "saturated" if out.saturated else "no proof"
    doc["reason"] = reason
    lines = [f"Unknown ({reason}, {out.nodes} nodes)"]
    if args.countermodel:
        found = _countermodel(system, s, theory, args.max_worlds)
        if found is None:
            lines.append(f"no countermodel with at most {args.max_worlds} worlds")
            doc["countermodel"] = None
        else:
            model, where = found
            doc["countermodel"] = {"model": model.to_json(), "at": where}
            lines.append(f"countermodel (refuted at {json.dumps(where)}):")
            lines.append(model.dumps().rstrip())
    _emit(args, "\n".join(lines), doc)
    return EXIT_UNKNOWN


def cmd_check(args) -> int:
    script = load_script(Path(args.script).read_text())
    if args.allow_cut:
        script = ProofScript(script.system, script.proof, True, script.theory)
    try:
        check_script(script)
    except ProofCheckError as exc:
        doc = {"ok": False, "path": list(exc.path), "rule": exc.rule, "message": exc.message}
        _emit(args, f"invalid: {exc}", doc)
        return EXIT_UNKNOWN
    root = script.proof.conclusion.render()
    _emit(args, f"ok: {root} ({script.proof.size} nodes)", {"ok": True, "conclusion": root,
                                                             "nodes": script.proof.size})
    return EXIT_OK


def cmd_translate(args) -> int:
    mode, text = args.mode, args.input
    if mode == "std":
        result = render(std_translate(parse_formula(text, modal=True), args.var))
    elif mode == "ik":
        if ":" in text or "|-" in text:
            result = ik_translate_sequent(parse_labeled_sequent(text)).render()
        else:
            result = render(ik_translate(parse_formula(text, modal=True)))
    elif mode == "seq":
        result = seq_translate(parse_labeled_sequent(text)).render()
    else:
        script = load_script(Path(text).read_text())
        if script.system != "labek":
            raise UsageError("proof translation needs a labek script")
        result = dump_script(proof_translate(script.proof), "leci", allow_cut=script.allow_cut).rstrip()
        if args.json:
            print(result)
            return EXIT_OK
    _emit(args, result, {"mode": mode, "input": text, "output": result})
    return EXIT_OK


def cmd_corpus(args) -> int:
    entries = load_corpus(args.dir, args.filter)
    if not entries:
        raise UsageError(f"no corpus entries match {args.filter!r}")
    results = run_corpus(entries, _budget(args))
    failed = [r.id for r in results if not r.passed]
    if args.json:
        print(json.dumps({"entries": [r.to_json() for r in results], "passed": len(results) - len(failed),
                          "failed": failed}, indent=2))
    else:
        width = max(len(r.id) for r in results)
        for r in results:
            mark = "PASS" if r.passed else "FAIL"
            detail = f"  {r.detail}" if r.detail else ""
            print(f"{mark}  {r.id:<{width}}  {r.kind:<12}  {r.outcome}{detail}")
        print(f"{len(results) - len(failed)}/{len(results)} passed")
        if failed:
            print("failed: " + ", ".join(failed))
    return EXIT_OK if not failed else EXIT_UNKNOWN


# -- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ecumene", description="Ecumenical sequent calculi: search, checking, "
                                "translations and Kripke countermodels.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, budgets=True):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        if budgets:
            sp.add_argument("--depth", type=int, default=30, help="maximum branch depth (default 30)")
            sp.add_argument("--nodes", type=int, default=50_000, help="maximum search nodes (default 50000)")

    sp = sub.add_parser("prove", help="search for a proof of a sequent")
    sp.add_argument("sequent")
    sp.add_argument("--system", choices=("leci", "labek"))
    sp.add_argument("--ext", action="append", metavar="{T,4,5,B}", help="theory extensions, e.g. --ext T4")
    sp.add_argument("--axiom", action="append", metavar="FILE", help="JSON axiom scheme file")
    sp.add_argument("--allow-cut", action="store_true")
    sp.add_argument("--countermodel", action="store_true", help="look for a countermodel when no proof is found")
    sp.add_argument("--max-worlds", type=int, default=4)
    common(sp)
    sp.set_defaults(func=cmd_prove)

    sp = sub.add_parser("check", help="check a JSON proof script")
    sp.add_argument("script")
    sp.add_argument("--allow-cut", action="store_true", help="accept cuts even if the script does not declare them")
    common(sp, budgets=False)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("translate", help="standard, IK, sequent or proof translation")
    sp.add_argument("input", help="formula, labeled sequent, or proof script path for --mode proof")
    sp.add_argument("--mode", choices=("std", "ik", "seq", "proof"), required=True)
    sp.add_argument("--var", default="x", help="world variable for --mode std")
    common(sp, budgets=False)
    sp.set_defaults(func=cmd_translate)

    sp = sub.add_parser("corpus", help="run the regression corpus")
    sp.add_argument("--filter", help="glob over entry ids, e.g. 'axiom_k*'")
    sp.add_argument("--dir", help="corpus directory (default: $ECUMENE_CORPUS or the bundled corpus)")
    common(sp)
    sp.set_defaults(func=cmd_corpus)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        text = getattr(args, "sequent", None) or getattr(args, "input", "")
        print(f"error: {exc}", file=sys.stderr)
        if text and "\n" not in text:
            raw = text.encode()
            col = len(raw[:exc.span.start].decode(errors="ignore"))
            width = max(1, len(raw[exc.span.start:exc.span.end].decode(errors="ignore")))
            print(f"  {text}\n  {' ' * col}{'^' * width}", file=sys.stderr)
        return EXIT_ERROR
    except (UsageError, FragmentError, TranslationError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
