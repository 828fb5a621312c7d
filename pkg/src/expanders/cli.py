"""Command-line front end: ``expanders build | verify | info``.

Exit codes: 0 success, 1 internal error, 2 bad input or failed
precondition, 3 eigensolver did not converge, 4 certificate failed.
Errors are reported on stderr as one line of JSON.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from . import constructions as C
from .cayley_lps import build_lps
from .cayley_quaternion import build_quaternion
from .errors import ConvergenceError, ExpanderError, HypothesisError, PreconditionError, SparseSetError
from .graph_core import ball_ranks, dumps, girth_search, is_bipartite, is_connected, read_edge_list
from .spectral import BOUND_KINDS, certify

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_CONVERGENCE, EXIT_CERT = 0, 1, 2, 3, 4
GIRTH_CAP = 12


def _modulus_arg(text: str):
    """'65' or '5^2*13' -> an int or ((q, e), ...)."""
    if "^" not in text and "*" not in text:
        return int(text)
    out = []
    for part in text.split("*"):
        q, _, e = part.partition("^")
        out.append((int(q), int(e or 1)))
    return tuple(out)


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise PreconditionError(f"method {args.method} requires {', '.join(missing)}")


def _build(args):
    """Run the requested construction; return (graph, manifest dict)."""
    method = args.method
    params = {"method": method}
    if method == "lps":
        _need(args, "p", "q")
        G = build_lps(args.p, args.q)
        params.update(p=args.p, q=args.q)
        bound = {"kind": "ramanujan", "params": {}}
    elif method == "quaternion":
        _need(args, "p", "m")
        m = _modulus_arg(args.m)
        G = build_quaternion(args.p, m)
        params.update(p=args.p, m=args.m)
        bound = {"kind": "ramanujan", "params": {}}
    elif method == "pack":
        _need(args, "d")
        m = _modulus_arg(args.m) if args.m else None
        res = C.pack_cayley(args.d, backend=args.backend, q=args.q, m=m, n=args.n or 0, simple=not args.multigraph)
        G = res.graph
        params.update(simple=not args.multigraph, **res.details)
        bound = {"kind": res.bound_kind, "params": res.bound_params, "value": res.bound_value}
    elif method == "exact-n":
        _need(args, "n", "p")
        m = _modulus_arg(args.m) if args.m else None
        res = C.augment_to_exact(
            args.n, args.p, backend=args.backend, mode="matching" if args.matching else "loops",
            q=args.q, m=m, numbering=args.numbering,
        )
        G = res.graph
        params.update(p=args.p, **res.details)
        bound = {"kind": res.bound_kind, "params": res.bound_params, "value": res.bound_value}
    elif method == "trim":
        _need(args, "n", "p", "q", "epsilon")
        if not args.epsilon > 0:
            raise PreconditionError(f"--epsilon must be positive, got {args.epsilon}")
        res = C.trim_to_exact(args.n, args.epsilon, p=args.p, q=args.q, relaxed=args.relaxed_sparse_set)
        G = res.graph
        params.update(res.details)
        bound = {"kind": res.bound_kind, "params": res.bound_params, "value": res.bound_value}
    else:  # pragma: no cover - argparse restricts choices
        raise PreconditionError(f"unknown method {method!r}")
    return G, {"parameters": params, "bound": bound}


def cmd_build(args) -> int:
    G, manifest = _build(args)
    text = dumps(G)
    out = Path(args.out)
    out.write_bytes(text.encode("ascii"))
    manifest = {
        "graph": out.name,
        "n": G.n,
        "d": G.d,
        "sha256": hashlib.sha256(text.encode("ascii")).hexdigest(),
        **manifest,
    }
    man_path = Path(args.manifest) if args.manifest else out.with_name(out.name + ".manifest.json")
    man_path.write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {out} (n={G.n}, d={G.d}) and {man_path}")
    return EXIT_OK


def _bound_params(args) -> tuple[str, dict]:
    if args.from_manifest:
        bound = json.loads(Path(args.from_manifest).read_text())["bound"]
        return bound["kind"], bound["params"]
    kind = args.bound
    if kind == "thm12":
        _need(args, "p", "m_base")
        return kind, {"p": args.p, "r_new": args.r_new or 0, "m": args.m_base}
    if kind == "pack-union":
        _need(args, "primes")
        primes = [int(x) for x in args.primes.split(",") if x]
        return kind, {"primes": primes, "pairs": args.pairs, "involutions": args.involutions}
    if kind == "trim":
        _need(args, "lambda_base", "r")
        return kind, {"lambda_base": args.lambda_base, "r": args.r}
    return kind, {}


def cmd_verify(args) -> int:
    G = read_edge_list(args.graph)
    kind, params = _bound_params(args)
    cert = certify(G, kind, tol=args.tol, method=args.method, seed=args.seed, **params)
    text = cert.to_json() + "\n"
    if args.cert:
        Path(args.cert).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK if cert.passed else EXIT_CERT


def cmd_info(args) -> int:
    G = read_edge_list(args.graph)
    value, exact = girth_search(G, max_radius=args.girth_cap)
    if math.isinf(value):
        girth = "inf"
    else:
        girth = str(int(value)) if exact else f">= {int(value)}"
    radius = 2 * args.r + 4
    ranks = ball_ranks(G, radius, stop_above=1)
    bad = [int(v) for v in (ranks >= 2).nonzero()[0][:1]]
    lines = [
        f"n={G.n}",
        f"d={G.d}",
        f"loops={int(G.loops.sum())}",
        f"connected={'yes' if is_connected(G) else 'no'}",
        f"bipartite={'yes' if is_bipartite(G) else 'no'}",
        f"girth={girth}",
        f"ball_hypothesis(r={args.r}, radius={radius})="
        + ("holds" if not bad else f"fails at vertex {bad[0]} (rank {int(ranks[bad[0]])})"),
    ]
    print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="expanders", description="Explicit expander graphs with spectral certificates.")
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct a graph and write it as an edge list")
    b.add_argument("--method", required=True, choices=["lps", "quaternion", "pack", "exact-n", "trim"])
    b.add_argument("--n", type=int, help="target number of vertices")
    b.add_argument("--d", type=int, help="target degree (pack)")
    b.add_argument("--p", type=int, help="prime = 1 mod 4 giving degree p+1")
    b.add_argument("--q", type=int, help="prime for PSL(2, q)")
    b.add_argument("--m", help="quaternion modulus, e.g. 65 or 5^2*13")
    b.add_argument("--backend", choices=["psl", "quaternion"], default="psl")
    b.add_argument("--epsilon", type=float, help="trim: r = ceil(2 / epsilon)")
    b.add_argument("--matching", action="store_true", help="exact-n: pair leftover vertices instead of adding loops")
    b.add_argument("--numbering", choices=["full", "partial"], default="full", help="exact-n: base vertex numbering")
    b.add_argument("--multigraph", action="store_true", help="pack: allow repeated generators")
    b.add_argument("--relaxed-sparse-set", action="store_true", help="trim: skip the global ball hypothesis")
    b.add_argument("--out", required=True, help="edge-list output path")
    b.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="measure lambda and certify it against a bound")
    v.add_argument("graph")
    v.add_argument("--bound", choices=BOUND_KINDS, default="ramanujan")
    v.add_argument("--from-manifest", help="take bound kind and parameters from a build manifest")
    v.add_argument("--p", type=int)
    v.add_argument("--r-new", type=int)
    v.add_argument("--m-base", type=int, help="thm12: base graph size")
    v.add_argument("--primes", help="pack-union: comma-separated block primes")
    v.add_argument("--pairs", type=int, default=0)
    v.add_argument("--involutions", type=int, default=0)
    v.add_argument("--lambda-base", type=float)
    v.add_argument("--r", type=int)
    v.add_argument("--method", choices=["auto", "dense", "iterative"], default="auto")
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--cert", help="also write the certificate JSON here")
    v.set_defaults(func=cmd_verify)

    i = sub.add_parser("info", help="print graph statistics")
    i.add_argument("graph")
    i.add_argument("--r", type=int, default=1, help="radius parameter for the ball hypothesis (balls of radius 2r+4)")
    i.add_argument("--girth-cap", type=int, default=GIRTH_CAP, help="BFS radius cap for the girth search")
    i.set_defaults(func=cmd_info)
    return ap


def _fail(code: int, err: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(err).__name__, "message": str(err), "exit": code}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as e:
        return _fail(EXIT_CONVERGENCE, e)
    except (PreconditionError, HypothesisError, SparseSetError, OSError) as e:
        return _fail(EXIT_INPUT, e)
    except ExpanderError as e:
        return _fail(EXIT_INTERNAL, e)


if __name__ == "__main__":
    sys.exit(main())
