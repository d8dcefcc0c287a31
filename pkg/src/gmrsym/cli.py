"""Command-line front end.

    gmrsym eval       evaluate a solution family at (t, x)
    gmrsym classify   reduce an algebra element to its optimal-system class
    gmrsym transform  push a point or a solution through a point symmetry
    gmrsym figure     write figure data as CSV "t,x,u"
    gmrsym verify     residual | fd | mc checks, exit 0 iff the check passes

Every subcommand takes --config FILE (JSON); explicit flags win over it.
Exit codes: 0 ok, 1 check failed, 2 domain error, 3 I/O error, 64 usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import lie, solutions, transform, verify
from .errors import DomainError
from .model import ModelParams, PdePoint

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_IO, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# figures --------------------------------------------------------------------------

@dataclass(frozen=True)
class FigureSpec:
    """Figure id 1..7 and panel a|b|c; parameters follow the captions.

    Panels a, b, c are sigma = 1, 2, 3 except in figure 7 where sigma = 2 and
    a = 1, -0.5, -2.8.  Figure 3 has the caption reading (single-constant
    family, k = 1, c = 1) and, with variant="text", the Case 3 reading
    (k = 1, c1 = 2, c2 = -1 on the t^{-1/2} family with two constants).
    """

    figure_id: int
    subfigure: str = "a"
    variant: str = "caption"

    def __post_init__(self):
        if self.figure_id not in range(1, 8):
            raise UsageError("figure id must be 1..7")
        if self.subfigure not in ("a", "b", "c"):
            raise UsageError("subfigure must be a, b or c")
        if self.variant not in ("caption", "text"):
            raise UsageError("figure variant must be caption or text")

    def family(self) -> solutions.SolutionFamily:
        j = "abc".index(self.subfigure)
        if self.figure_id == 7:
            p = ModelParams.symmetric(1.0, 2.0)
            return solutions.exp_at(p, (1.0, -0.5, -2.8)[j], 2.0, 2.0)
        sigma = float(j + 1)
        fid, k, consts = {
            1: ("Inv2", 0.5, (2.0, -1.0)),
            2: ("Inv3", 1.0, (2.0, -1.0)),
            3: ("Inv5", 1.0, (1.0,)) if self.variant == "caption" else ("Inv3", 1.0, (2.0, -1.0)),
            4: ("PcfUV", 1.0, (2.0, 1.0, 2.0)),
            5: ("AiryPlus", 1.0, (-1.0, 1.0)),
            6: ("AiryMinus", 1.0, (2.0, 1.0)),
        }[self.figure_id]
        return solutions.SolutionFamily(fid, ModelParams.symmetric(k, sigma), *consts)


def figure_data(spec: FigureSpec, t_range=(0.1, 5.0), x_range=(1.0, 5.0), n_t=60, n_x=60):
    t = np.linspace(*t_range, n_t)
    x = np.linspace(*x_range, n_x)
    T, X = np.meshgrid(t, x, indexing="ij")
    return t, x, np.asarray(spec.family().eval(T, X))


def figure_csv(t, x, U) -> str:
    lines = ["t,x,u"]
    for i, ti in enumerate(t):
        for j, xj in enumerate(x):
            lines.append(f"{ti:.17g},{xj:.17g},{U[i, j]:.17g}")
    return "\n".join(lines) + "\n"


# config handling ----------------------------------------------------------------------

def _load_json_arg(text):
    """Inline JSON, or @path / a path to a JSON file."""
    if text is None:
        return None
    s = text.strip()
    if s.startswith("@"):
        s = s[1:]
    elif s[:1] in "[{" or s[:1].isdigit() or s[:1] == "-":
        try:
            return json.loads(s)
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad JSON: {exc}") from exc
    try:
        with open(s) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad JSON in {s}: {exc}") from exc


def _config(args) -> dict:
    cfg = _load_json_arg(args.config) if getattr(args, "config", None) else {}
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


def _pick(args, cfg, name, default=None, cast=float):
    v = getattr(args, name, None)
    if v is None:
        v = cfg.get(name, default)
    return None if v is None else cast(v)


def _params(args, cfg, k_default=1.0, sigma_default=1.0) -> ModelParams:
    base = dict(cfg.get("params", {}))
    for name in ("k", "sigma", "alpha"):
        v = getattr(args, name, None)
        if v is not None:
            base[name] = v
    lam = getattr(args, "lam", None)
    if lam is not None:
        base["lambda"] = lam
    base.setdefault("k", k_default)
    base.setdefault("sigma", sigma_default)
    return ModelParams.from_dict(base)


def _family(args, cfg) -> solutions.SolutionFamily:
    d = dict(_load_json_arg(args.family) or cfg.get("family_spec") or {})
    if args.family_id:
        d["family"] = args.family_id
    if "params" in d:
        d["params"] = {**d["params"]}
    for name in ("k", "sigma"):
        v = getattr(args, name, None)
        if v is not None:
            d.setdefault("params", {})[name] = v
    d.setdefault("params", {"k": 1.0, "sigma": 1.0})
    for name in ("c1", "c2", "a"):
        v = getattr(args, name, None)
        if v is not None:
            d[name] = v
            if name == "c1":
                d.pop("c", None)
    if "family" not in d and "family_id" not in d:
        raise UsageError("no family given (use --family JSON or --family-id)")
    if d.get("family") == "ExpAt":
        p = ModelParams.from_dict(d["params"])
        return solutions.exp_at(p, float(d.get("a", 0.0)), float(d.get("c1", 1.0)),
                                float(d.get("c2", 0.0)))
    return solutions.SolutionFamily.from_dict(d)


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=False))


# subcommands ------------------------------------------------------------------------

def cmd_eval(args) -> int:
    cfg = _config(args)
    f = _family(args, cfg)
    t, x = _pick(args, cfg, "t"), _pick(args, cfg, "x")
    if t is None or x is None:
        raise UsageError("eval needs --t and --x")
    print(repr(float(f.eval(t, x))))
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = _config(args)
    raw = _load_json_arg(args.element) if args.element else cfg.get("element")
    if raw is None:
        raise UsageError("classify needs an algebra element")
    sigma = _pick(args, cfg, "sigma", None)
    if isinstance(raw, dict):
        X = lie.AlgebraElement(tuple(float(v) for v in raw["a"]),
                               sigma if sigma is not None else float(raw.get("sigma", 1.0)))
    else:
        X = lie.AlgebraElement(tuple(float(v) for v in raw), sigma if sigma is not None else 1.0)
    r = lie.classify(X)
    defect = r.replay_defect(X)
    out = r.to_dict()
    out["element"] = X.to_dict()
    out["replay_defect"] = defect
    out["replay"] = "ok" if defect <= 1e-9 else "mismatch"
    _emit(out)
    return EXIT_OK if defect <= 1e-9 else EXIT_FAIL


def cmd_transform(args) -> int:
    cfg = _config(args)
    mdict = _load_json_arg(args.map) if args.map else dict(cfg.get("map", {}))
    if args.g is not None:
        mdict["g"] = args.g
    if args.eps is not None:
        mdict["eps"] = args.eps
    if "g" not in mdict or "eps" not in mdict:
        raise UsageError("transform needs a map: --map '{\"g\": i, \"eps\": e}' or --g/--eps")
    if args.point:
        p = _params(args, cfg)
        m = transform.PointMap.from_dict(mdict, p)
        t, x, u = (float(v) for v in args.point.split(","))
        pt = PdePoint(t, x, u)
        img = transform.apply_point(m, pt)
        flow = transform.flow_point(m.generator_index, m.epsilon, pt, p)
        out = {"map": m.to_dict(), "image": [img.t, img.x, img.u],
               "flow": [flow.t, flow.x, flow.u]}
        if m.generator_index == 3:
            q = transform.apply_point(m, pt, quoted=True)
            out["quoted_g3_image"] = [q.t, q.x, q.u]
        _emit(out)
        return EXIT_OK
    f = _family(args, cfg)
    m = transform.PointMap.from_dict(mdict, f.params)
    g = transform.apply_to_solution(m, f)
    out = {"map": m.to_dict(), "family": f.to_dict()}
    t, x = _pick(args, cfg, "t"), _pick(args, cfg, "x")
    if t is not None and x is not None:
        out["u"] = float(g.eval(t, x))
    if args.check or (t is None or x is None):
        rep = verify.residual_grid(g, f.params, verify.Grid(), skip_domain=True)
        out["residual"] = rep.to_dict()
        _emit(out)
        return EXIT_OK if rep.max_residual <= 1e-5 else EXIT_FAIL
    _emit(out)
    return EXIT_OK


def cmd_figure(args) -> int:
    cfg = _config(args)
    fig = int(_pick(args, cfg, "id", cast=int) or 0)
    spec = FigureSpec(fig, args.sub or cfg.get("sub", "a"), args.variant or cfg.get("variant", "caption"))
    t_rng = tuple(args.t_range or cfg.get("t_range", (0.1, 5.0)))
    x_rng = tuple(args.x_range or cfg.get("x_range", (1.0, 5.0)))
    n_t = _pick(args, cfg, "n_t", 60, int)
    n_x = _pick(args, cfg, "n_x", 60, int)
    if n_t < 2 or n_x < 2 or x_rng[0] <= 0:
        raise UsageError("figure grid needs n >= 2 and x > 0")
    text = figure_csv(*figure_data(spec, t_rng, x_rng, n_t, n_x))
    out = args.out or cfg.get("out")
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)
    return EXIT_OK


def _verify_residual(args, cfg):
    sigmas = cfg.get("sigmas", [_pick(args, cfg, "sigma", 1.0)])
    k = _pick(args, cfg, "k", 1.0)
    tol = _pick(args, cfg, "tol", 1e-7)
    grid = verify.Grid.from_dict(cfg["grid"]) if "grid" in cfg else verify.Grid()
    rows, ok = [], True
    for s in sigmas:
        for f in solutions.catalog(float(s), k):
            r = verify.residual_grid(f, f.params, grid)
            ok &= r.max_residual <= tol
            rows.append({"family": f.family_id, "sigma": s, "max": r.max_residual,
                         "mean": r.mean_residual})
    return ok, {"kind": "residual", "tol": tol, "pass": ok, "families": rows}


def _verify_fd(args, cfg):
    p = ModelParams.symmetric(_pick(args, cfg, "k", 1.0), _pick(args, cfg, "sigma", 1.0))
    f = solutions.SolutionFamily("Inv1", p, _pick(args, cfg, "c1", 1.0), _pick(args, cfg, "c2", 0.0))
    n = _pick(args, cfg, "n", 51, int)
    g = verify.Grid(0.2, 1.0, -1.0, 1.0, n, n)
    out = verify.cn_convergence(f, p, g, levels=_pick(args, cfg, "levels", 3, int))
    lo, hi = cfg.get("order_range", (1.7, 2.3))
    tol = _pick(args, cfg, "tol", None)
    ok = all(lo <= q <= hi for q in out["orders"])
    if tol is not None:
        ok &= out["errors"][-1] <= tol
    return ok, {"kind": "fd", "pass": ok, "order_range": [lo, hi], "tol": tol, **out}


def _verify_mc(args, cfg):
    k = _pick(args, cfg, "k", 1.0)
    sigma = _pick(args, cfg, "sigma", 1.0)
    p = ModelParams.symmetric(k, sigma)
    f = solutions.SolutionFamily("Inv1", p, _pick(args, cfg, "c1", 1.0), _pick(args, cfg, "c2", 0.0))
    mc = verify.McConfig(n_paths=_pick(args, cfg, "n_paths", 200_000, int),
                         n_steps=_pick(args, cfg, "n_steps", 100, int),
                         seed=_pick(args, cfg, "seed", 0, int),
                         antithetic=bool(cfg.get("antithetic", False) or args.antithetic),
                         workers=_pick(args, cfg, "workers", 1, int))
    t0, delta, x0 = (_pick(args, cfg, n, d) for n, d in (("t0", 0.5), ("delta", 0.05), ("x0", 1.0)))
    cf, est, z = verify.mc_semigroup_check(p, f, t0, delta, x0, mc)
    ok = abs(z) <= 3
    rep = verify.McReport(cf, est, z, mc).to_dict()
    return ok, {"kind": "mc", "pass": ok, "t0": t0, "delta": delta, "x0": x0, **rep}


def cmd_verify(args) -> int:
    cfg = _config(args)
    run = {"residual": _verify_residual, "fd": _verify_fd, "mc": _verify_mc}[args.kind]
    ok, out = run(args, cfg)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(out, fh, indent=2)
    _emit(out)
    return EXIT_OK if ok else EXIT_FAIL


# parser -----------------------------------------------------------------------------

def _family_flags(sp):
    sp.add_argument("--family", help="family JSON (inline or file path)")
    sp.add_argument("--family-id", dest="family_id", choices=solutions.FAMILIES + ("ExpAt",))
    sp.add_argument("--k", type=float)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--c1", type=float)
    sp.add_argument("--c2", type=float)
    sp.add_argument("--a", type=float)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gmrsym", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    sp = sub.add_parser("eval", help="evaluate a solution family at (t, x)")
    sp.add_argument("--config")
    _family_flags(sp)
    sp.add_argument("--t", type=float)
    sp.add_argument("--x", type=float)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("classify", help="optimal-system class of an algebra element")
    sp.add_argument("element", nargs="?", help='coefficients, e.g. "[0,1,0,0,0,5]"')
    sp.add_argument("--config")
    sp.add_argument("--sigma", type=float)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("transform", help="apply a point symmetry to a point or a solution")
    sp.add_argument("--config")
    sp.add_argument("--map", help='{"g": i, "eps": e}')
    sp.add_argument("--g", type=int)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--point", help="t,x,u")
    _family_flags(sp)
    sp.add_argument("--t", type=float)
    sp.add_argument("--x", type=float)
    sp.add_argument("--check", action="store_true", help="grid residual of the transformed solution")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("figure", help='figure data as CSV "t,x,u"')
    sp.add_argument("--config")
    sp.add_argument("--id", type=int)
    sp.add_argument("--sub", choices=("a", "b", "c"))
    sp.add_argument("--variant", choices=("caption", "text"))
    sp.add_argument("--t-range", dest="t_range", type=float, nargs=2)
    sp.add_argument("--x-range", dest="x_range", type=float, nargs=2)
    sp.add_argument("--n-t", dest="n_t", type=int)
    sp.add_argument("--n-x", dest="n_x", type=int)
    sp.add_argument("--out", help="output path, '-' for stdout")
    sp.set_defaults(func=cmd_figure)

    sp = sub.add_parser("verify", help="residual | fd | mc checks")
    sp.add_argument("kind", choices=("residual", "fd", "mc"))
    sp.add_argument("--config")
    sp.add_argument("--k", type=float)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--c1", type=float)
    sp.add_argument("--c2", type=float)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--levels", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--n-paths", dest="n_paths", type=int)
    sp.add_argument("--n-steps", dest="n_steps", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--antithetic", action="store_true")
    sp.add_argument("--t0", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--x0", type=float)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gmrsym: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"gmrsym: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"gmrsym: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (KeyError, ValueError, TypeError) as exc:
        print(f"gmrsym: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
