"""Command-line interface."""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import algebra, alba, classify, gentree, gmt, subord
from .signature import BUILTIN, SignatureError, expand_signature, parse_signature
from .syntax import ParseError, parse_inequality, parse_order, parse_term, variables_in_order

EXIT_OK, EXIT_INPUT, EXIT_REJECTED, EXIT_REFUTED, EXIT_BUDGET = 0, 2, 3, 4, 5


def load_signature(spec, mode=None):
    if spec in BUILTIN:
        text = BUILTIN[spec]
    else:
        text = Path(spec).read_text()
    sig = parse_signature(text)
    return expand_signature(sig.with_mode(mode) if mode else sig)


def read_formula(text):
    if text.startswith("@"):
        return Path(text[1:]).read_text().strip()
    return text


def parse_eps(text, variables):
    if text is None:
        return None
    parts = [p.strip() for p in text.strip("()").split(",") if p.strip()]
    return classify.normalize_eps(parts, variables)


def pool_spec(text, seed=None):
    spec = algebra.PoolSpec.parse(text)
    if seed is not None:
        spec.seed = seed
    return spec


def emit(args, data, text):
    if args.format == "json":
        print(json.dumps(data, indent=2))
    else:
        print(text)


def cmd_classify(args):
    esig = load_signature(args.sig, args.mode)
    ineq = parse_inequality(read_formula(args.formula), esig)
    vs = variables_in_order(ineq)
    eps = parse_eps(args.epsilon, vs)
    if eps is None:
        cert = classify.search_classification(ineq, esig)
    else:
        omega = parse_order(args.omega, vs) if args.omega else classify.StrictOrder(
            vs, classify.analyse(ineq, esig, eps).required)
        cert = classify.is_analytic(ineq, eps, omega, esig)
        if not cert.accepted:
            cert = classify.is_inductive(ineq, eps, omega, esig)
        if not cert.accepted:
            cert = classify.is_sahlqvist(ineq, eps, esig)
    data = cert.to_dict()
    text = str(cert)
    if cert.witness:
        text += f"\nwitness: {cert.witness}"
    if args.explain:
        trees = gentree.inequality_trees(ineq, esig)
        data["trees"] = [gentree.tree_to_dict(t) for t in trees]
        text += "\n" + "\n".join(gentree.dump_tree(t) for t in trees)
        for r in gentree.branch_analysis(trees, cert.epsilon):
            text += (f"\n  branch {r.sign}{r.leaf} critical={r.critical} good={r.good} "
                     f"excellent={r.excellent} split={r.split}")
    emit(args, data, text)
    return EXIT_OK if cert.accepted else EXIT_REJECTED


def cmd_alba(args):
    esig = load_signature(args.sig, args.mode)
    ineq = parse_inequality(read_formula(args.formula), esig)
    vs = variables_in_order(ineq)
    eps = parse_eps(args.epsilon, vs)
    omega = parse_order(args.omega, vs) if args.omega else None
    try:
        res = alba.run_alba(ineq, esig, eps, omega)
    except alba.AlbaRejected as e:
        emit(args, e.certificate.to_dict(), f"rejected: {e.certificate.witness}")
        return EXIT_REJECTED
    if args.trace_out:
        Path(args.trace_out).write_text(json.dumps([s.to_dict() for s in res.trace], indent=2))
    data = res.to_dict()
    data.pop("trace")
    lines = [str(res.certificate)] + [str(q) for q in res.quasis]
    code = EXIT_OK
    if args.verify:
        pool = algebra.generate_pool(esig, pool_spec(args.verify, args.seed))
        bad = [A.name for A in pool
               if algebra.is_valid(ineq, A) != all(algebra.is_valid(q, A) for q in res.quasis)]
        data["verify"] = {"algebras": len(pool), "disagreements": bad}
        lines.append(f"verified on {len(pool)} algebras, {len(bad)} disagreements")
        if bad:
            code = EXIT_REFUTED
    emit(args, data, "\n".join(lines))
    return code


def cmd_translate(args):
    esig = load_signature(args.sig, args.mode or "distributive")
    ineq = parse_inequality(read_formula(args.formula), esig)
    eps = parse_eps(args.epsilon, variables_in_order(ineq))
    try:
        rep = gmt.transfer_pipeline(ineq, esig, eps)
    except ValueError as e:
        emit(args, {"error": str(e)}, f"rejected: {e}")
        return EXIT_REJECTED
    emit(args, rep.to_dict(), f"{rep.image}\nsource: {rep.source_certificate}\nimage: {rep.image_certificate}")
    return EXIT_OK if rep.ok else EXIT_REJECTED


def cmd_subord(args):
    if args.action == "detect":
        t = parse_term(read_formula(args.target), subord.FORMULAS)
        d = subord.is_s_sahlqvist(t)
        cert = subord.bridge(t)
        emit(args, {"derivation": d, "certificate": cert.to_dict()},
             f"s-sahlqvist: {'yes' if d else 'no'}\nbridge: {cert}")
        return EXIT_OK if d else EXIT_REJECTED
    S = subord.SubordinationAlgebra.loads(Path(args.target).read_text())
    if args.action == "check":
        fails = subord.check_subordination(S)
        emit(args, {"fails": fails}, "ok" if not fails else "\n".join(f"{a}: {w}" for a, w in fails))
        return EXIT_OK if not fails else EXIT_REFUTED
    if args.action == "convert":
        T = subord.to_slanted(S)
        back = subord.from_slanted(T)
        data = {"dia": T.dia.tolist(), "boxb": T.boxb.tolist(), "round_trip": back == S}
        emit(args, data, f"dia: {data['dia']}\nboxb: {data['boxb']}\nround trip: {data['round_trip']}")
        return EXIT_OK
    if args.formula is None:
        raise ParseError("validity needs a formula")
    text = read_formula(args.formula)
    obj = parse_inequality(text, subord.FORMULAS) if "<=" in text else parse_term(text, subord.FORMULAS)
    ok = subord.validity_on_subordination(S, obj)
    emit(args, {"valid": ok}, "valid" if ok else "refuted")
    return EXIT_OK if ok else EXIT_REFUTED


def _oracle_one(job):
    k, text, sig_spec, mode, pool_text, seed, budget = job
    esig = load_signature(sig_spec, mode)
    ineq = parse_inequality(text, esig)
    res = alba.run_alba(ineq, esig)
    rows = []
    for A in algebra.generate_pool(esig, pool_spec(pool_text, seed)):
        s = algebra.is_valid(ineq, A, budget)
        q = all(algebra.is_valid(x, A, budget) for x in res.quasis)
        rows.append({"inequality": k, "algebra": A.name, "source_valid": s, "quasi_valid": q, "agree": s == q})
    return rows


def cmd_oracle(args):
    lines = [l.split("#", 1)[0].strip() for l in Path(args.corpus).read_text().splitlines()]
    lines = [l for l in lines if l]
    jobs = [(k, l, args.sig, args.mode, args.pool, args.seed, args.budget) for k, l in enumerate(lines)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            chunks = list(ex.map(_oracle_one, jobs))
    else:
        chunks = [_oracle_one(j) for j in jobs]
    rows = [r for c in chunks for r in c]
    algebras = list(dict.fromkeys(r["algebra"] for r in rows))
    bad = [r for r in rows if not r["agree"]]
    paths = []
    if args.report_dir:
        from .report import write_oracle_report
        paths = write_oracle_report(rows, args.report_dir, len(lines), algebras)
    if args.format == "json":
        print(json.dumps({"rows": rows, "disagreements": len(bad), "files": [str(p) for p in paths]}, indent=2))
    else:
        print("inequality\talgebras\tvalid\tdisagreements")
        for k in range(len(lines)):
            mine = [r for r in rows if r["inequality"] == k]
            print(f"{k}\t{len(mine)}\t{sum(r['source_valid'] for r in mine)}\t{sum(not r['agree'] for r in mine)}")
        for p in paths:
            print(f"wrote {p}")
    return EXIT_REFUTED if bad else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="unicorr", description="Correspondence for analytic inductive inequalities.")
    p.add_argument("--sig", default="modal", help="signature file or built-in name (%s)" % ", ".join(BUILTIN))
    p.add_argument("--mode", choices=("lattice", "distributive"))
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, help="seed for the algebra pool (overrides the pool spec)")
    p.add_argument("--jobs", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify an inequality")
    c.add_argument("formula")
    c.add_argument("--epsilon")
    c.add_argument("--omega")
    c.add_argument("--explain", action="store_true")
    c.set_defaults(func=cmd_classify)

    a = sub.add_parser("alba", help="compute pure quasi-inequalities")
    a.add_argument("formula")
    a.add_argument("--epsilon")
    a.add_argument("--omega")
    a.add_argument("--trace-out")
    a.add_argument("--verify", metavar="POOL", help="pool spec: full, small, ba:K or key=value,...")
    a.set_defaults(func=cmd_alba)

    t = sub.add_parser("translate", help="translate into the Boolean target language")
    t.add_argument("formula")
    t.add_argument("--epsilon")
    t.set_defaults(func=cmd_translate)

    s = sub.add_parser("subord", help="subordination algebras and s-Sahlqvist formulas")
    s.add_argument("action", choices=("check", "convert", "validity", "detect"))
    s.add_argument("target", help="algebra file, or the formula for detect")
    s.add_argument("formula", nargs="?")
    s.set_defaults(func=cmd_subord)

    o = sub.add_parser("oracle", help="compare inequalities and their quasi-inequalities on a pool")
    o.add_argument("corpus")
    o.add_argument("--pool", default="full")
    o.add_argument("--report-dir")
    o.add_argument("--budget", type=int, default=algebra.DEFAULT_BUDGET)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, SignatureError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (algebra.BudgetError, classify.BudgetExceeded) as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
