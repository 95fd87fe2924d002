"""Command-line entry point ``quadmix``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import mpmath

from . import formulas as F
from .cuts import OBJECTIVES, dual_conductance, exact_bottleneck, heuristic_bottleneck
from .errors import QuadmixError
from .geodesy import index_list, to_csv_rows
from .harness import ExperimentConfig, degree_experiment, run_mixing_experiment, sample_seed
from .maps import as_quadrangulation, code_hash, read_qmap, write_qmap
from .trees import enumerate_quadrangulations, sample_quadrangulation
from .walks import face_kernel, relaxation_time, tv_mixing_time, uniform_mixing_time, vertex_kernel


def _num(x) -> str:
    return mpmath.nstr(x, 30) if isinstance(x, mpmath.mpf) else str(x)


def cmd_gen(a):
    faces = a.faces if a.faces is not None else a.vertices - 2
    unit, size = ("faces", a.faces) if a.faces is not None else ("vertices", a.vertices)
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(a.count):
        q = sample_quadrangulation(faces, sample_seed(a.seed, size, unit, i))
        path = out / f"map_{i:05d}.qmap"
        write_qmap(q.map, path)
        print(f"{path}\t{code_hash(q.code)}")


def cmd_mix(a):
    q = as_quadrangulation(read_qmap(a.input))
    K = vertex_kernel(q) if a.chain == "vertex" else face_kernel(q)
    if a.measure == "uniform":
        print(uniform_mixing_time(K, a.eps))
    elif a.measure == "tv":
        print(tv_mixing_time(K, a.eps, a.tv_norm))
    else:
        lam2, rel = relaxation_time(K)
        print(f"{rel!r}\t{lam2!r}")


def cmd_enumerate(a):
    codes = enumerate_quadrangulations(a.faces)
    print(len(codes))
    if a.list:
        for c in sorted(codes):
            print(code_hash(c))


def cmd_formulas(a):
    n = a.args
    what = a.what
    if what == "count":
        print(F.count_quads(int(n[0])))
    elif what == "boundary":
        print(F.count_boundary_quads(int(n[0]), int(n[1])))
    elif what == "cp":
        print(_num(F.cp_constant(int(n[0]))))
    elif what == "kappa":
        print(_num(F.kappa_coeff(int(n[0]))))
    elif what == "phi":
        print(_num(F.phi(n[0], n[1])))
    elif what == "iterate":
        mode = n[3] if len(n) > 3 else "closed"
        print(_num(F.phi_iterate(n[0], n[1], int(n[2]), mode)))
    elif what == "laplace":
        print(_num(F.laplace_hull(int(n[0]), n[1])))
    elif what == "mean":
        print(F.mean_hull(int(n[0])))
    elif what == "tail":
        print(_num(F.tail_constant(int(n[0]))))
    elif what == "lemma12":
        r, lam = int(n[0]), n[1]
        a1, a32, pred = F.lemma12_predict(r, lam)
        print(f"{a1}\t{a32}\t{_num(pred)}\t{_num(F.lemma12_laplace(r, lam))}")
    elif what == "lemma8":
        nn, x = int(n[0]), n[1]
        print(f"{_num(F.lemma8_f(nn, x))}\t{_num(F.lemma8_f_convex(nn, x))}")


def cmd_bottleneck(a):
    q = as_quadrangulation(read_qmap(a.input))
    if a.mode == "exact":
        rep = exact_bottleneck(q, a.objective)
    elif a.objective == "conductance":
        rep = dual_conductance(q, "heuristic", a.budget, a.seed)
    else:
        rep = heuristic_bottleneck(q, a.objective, a.budget, a.seed)
    header = ["map_id", "mode", "objective", "value", "witness"]
    if rep is None:
        rows = [[code_hash(q.code), a.mode, a.objective, "", ""]]
    else:
        rows = [[code_hash(q.code), rep.mode, rep.kind, format(rep.value, ".17g"),
                 index_list(rep.witness)]]
    sys.stdout.write(to_csv_rows(rows, header))


def cmd_experiment(a):
    cfg = ExperimentConfig.from_file(a.config)
    if a.kind == "mixing":
        res = run_mixing_experiment(cfg)
        for p in res.paths.values():
            print(p)
    else:
        for row in degree_experiment(cfg):
            print(f"{row['size']}\t{row['fraction_over']!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadmix")
    sub = p.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="sample uniform quadrangulations")
    size = g.add_mutually_exclusive_group(required=True)
    size.add_argument("--faces", type=int)
    size.add_argument("--vertices", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", default=".")
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("mix", help="mixing time of one map")
    m.add_argument("--in", dest="input", required=True)
    m.add_argument("--eps", type=float, default=0.5)
    m.add_argument("--chain", choices=("vertex", "face"), default="vertex")
    m.add_argument("--measure", choices=("uniform", "tv", "rel"), default="uniform")
    m.add_argument("--tv-norm", choices=("half", "l1"), default="half")
    m.set_defaults(func=cmd_mix)

    e = sub.add_parser("enumerate", help="count rooted quadrangulations exhaustively")
    e.add_argument("--faces", type=int, required=True)
    e.add_argument("--list", action="store_true", help="also print code hashes")
    e.set_defaults(func=cmd_enumerate)

    f = sub.add_parser("formulas", help="exact and high-precision formulas")
    f.add_argument("what", choices=("count", "boundary", "cp", "kappa", "phi", "iterate",
                                    "laplace", "mean", "tail", "lemma12", "lemma8"))
    f.add_argument("args", nargs="*")
    f.set_defaults(func=cmd_formulas)

    b = sub.add_parser("bottleneck", help="isoperimetric cut of one map")
    b.add_argument("--in", dest="input", required=True)
    b.add_argument("--objective", choices=OBJECTIVES, default="theorem3")
    b.add_argument("--mode", choices=("exact", "heuristic"), default="exact")
    b.add_argument("--budget", type=int, default=64)
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bottleneck)

    x = sub.add_parser("experiment", help="Monte Carlo experiments")
    x.add_argument("kind", choices=("mixing", "degree"))
    x.add_argument("--config", required=True)
    x.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (QuadmixError, ValueError, IndexError) as exc:
        print(f"quadmix: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
