"""Command-line front end.

Subcommands: gen (structured set generators), norm (certified L1 enclosure),
kernel (flat-top values as CSV), thin (residue-class thinning), verify
(named inequality verdicts), suite (the full acceptance run).

Reports are UTF-8 JSON with sorted keys wrapped as {"config", "result",
"meta"}; everything volatile (timestamp, wall time) lives under "meta", so
two runs with the same config and seed are byte-identical after dropping
that one key.  A JSON config file can supply defaults for the common flags;
explicit flags win.  Exit codes: 0 all verdicts passed (or --no-fail),
1 verdict failure, 2 bad usage or parameters, 3 resource limits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import acceptance, backend
from .bounds import (DEFAULT_C_MPS, assemble_blocks, constant_scan,
                     family_intervals, family_random_sets,
                     verify_basic_multidim, verify_main_prop, verify_mps,
                     verify_multidim, verify_multidimz)
from .core import (IntegerSet, LatticeSet, TrigPoly, from_json_obj,
                   indicator_poly)
from .errors import (CollisionError, HypothesisError, MemoryBudgetError,
                     SupportError)
from .kernels import (discrete_l1_bound, flat_top_build, flat_top_discrete_l1,
                      property_violations)
from .modulus import (ResidueFilter, brute_force_modulus, good_modulus,
                      thinning_transform)
from .quadrature import bernstein_check, certified_l1, riemann_l1
from .structures import (build_strong_integer, build_strong_lattice,
                         gap_rank2, validate_certificate)

USAGE_ERROR = 2
RESOURCE_ERROR = 3


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    input: str | None = None
    set_spec: str | None = None
    params: dict | None = None
    theorem: str | None = None
    kind: str | None = None
    rel_err: float = 0.1
    c_mps: float = DEFAULT_C_MPS
    seed: int = acceptance.DEFAULT_SEED
    memory_budget: int | None = None
    output: str | None = None
    csv_path: str | None = None
    count: int | None = None
    grid: int | None = None
    no_fail: bool = False
    inject_kernel_fault: bool = False
    skip_determinism: bool = False
    delta: float = 1.0
    d1: int | None = None
    d2: int | None = None
    q: int | None = None
    s: int = 0
    m: int | None = None
    n: int | None = None
    r: int | None = None
    force: bool = False

    def echo(self) -> dict:
        # config echo for the report; only stable, user-facing knobs
        keep = {"command", "input", "set_spec", "params", "theorem", "kind",
                "rel_err", "c_mps", "seed", "memory_budget", "count", "grid",
                "no_fail", "delta", "d1", "d2", "q", "s", "m", "n", "r",
                "force", "inject_kernel_fault"}
        return {k: v for k, v in self.__dict__.items() if k in keep}


_MERGEABLE = ("rel_err", "c_mps", "seed", "memory_budget", "output",
              "csv_path", "count", "no_fail", "delta", "s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expsums",
        description="Certified L1 norms of exponential sums and the "
                    "structured-set machinery built on them.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with default flag values")
        p.add_argument("--rel-err", type=float, default=None,
                       help="target relative enclosure width (default 0.1)")
        p.add_argument("--c-mps", type=float, default=None,
                       help="absolute constant for coefficient-decay bounds "
                            "(default 0.25)")
        p.add_argument("--seed", type=int, default=None,
                       help="64-bit seed for anything randomized")
        p.add_argument("--memory-budget", type=int, default=None,
                       help="sample-grid budget in bytes (overrides "
                            "EXPSUMS_MEMORY_BUDGET)")
        p.add_argument("--output", default=None,
                       help="write the report here instead of stdout")
        p.add_argument("--no-fail", action="store_true", default=None,
                       help="exit 0 even when verdicts fail")

    p = sub.add_parser("gen", help="generate a structured set plus certificate")
    common(p)
    p.add_argument("--kind", required=True,
                   choices=["gap", "lattice-box", "lattice-random",
                            "zstrong-box", "zstrong-random"])
    p.add_argument("--params", default="{}",
                   help='JSON parameters, e.g. \'{"a":1,"b":10,"M":3,"N":2}\'')
    p.add_argument("--force", action="store_true",
                   help="skip the a*M < b distinctness precondition")

    p = sub.add_parser("norm", help="certified L1 enclosure of a set or polynomial")
    common(p)
    p.add_argument("--input", help="JSON file with a set or polynomial")
    p.add_argument("--set", dest="set_spec",
                   help="shorthand: interval:N, range:a:b, gap:a,b,M,N, "
                        "random:size,span, box:n1,n2,...")

    p = sub.add_parser("kernel", help="flat-top kernel values as CSV")
    common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("thin", help="keep the blocks of one residue class")
    common(p)
    p.add_argument("--input", help="JSON file with a set or polynomial")
    p.add_argument("--set", dest="set_spec")
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--s", type=int, default=None)

    p = sub.add_parser("verify", help="run one named inequality verification")
    common(p)
    p.add_argument("--theorem", required=True,
                   choices=["mps", "basic-multidim", "multidim", "main-prop",
                            "multidimz", "bernstein", "numerical", "kernel",
                            "thinning", "good-modulus"])
    p.add_argument("--input", help="JSON file with the instance")
    p.add_argument("--set", dest="set_spec")
    p.add_argument("--params", default=None, help="JSON parameters")
    p.add_argument("--count", type=int, default=None,
                   help="instances for property-style runs")
    p.add_argument("--grid", type=int, default=None,
                   help="sample count for --theorem numerical")
    p.add_argument("--csv", dest="csv_path", default=None,
                   help="also write scan rows as CSV")

    p = sub.add_parser("suite", help="run the full acceptance suite")
    common(p)
    p.add_argument("--inject-kernel-fault", action="store_true",
                   help="negative control: corrupt one kernel, criterion 1 "
                        "must fail")
    p.add_argument("--skip-determinism", action="store_true",
                   help="skip the replay comparison (criterion 11)")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    file_cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
    cfg = ExperimentConfig(command=args.command)
    for key in _MERGEABLE:
        flag = getattr(args, key, None)
        if flag is not None:
            setattr(cfg, key, flag)
        elif key in file_cfg:
            setattr(cfg, key, file_cfg[key])
    for key in ("input", "set_spec", "theorem", "kind", "grid", "d1", "d2",
                "q", "m", "n", "r"):
        val = getattr(args, key, None)
        if val is None:
            val = file_cfg.get(key)
        setattr(cfg, key, val)
    for key in ("force", "inject_kernel_fault", "skip_determinism"):
        setattr(cfg, key, bool(getattr(args, key, False) or file_cfg.get(key)))
    params = getattr(args, "params", None)
    if params is None:
        cfg.params = file_cfg.get("params")
    else:
        try:
            cfg.params = json.loads(params) if isinstance(params, str) else params
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--params is not valid JSON: {exc}") from exc
    if cfg.memory_budget is not None:
        os.environ["EXPSUMS_MEMORY_BUDGET"] = str(int(cfg.memory_budget))
    return cfg


def parse_set_spec(spec: str, seed: int):
    """Decode the --set shorthand.  Returns (set, certificate | None)."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "interval":
            n = int(rest)
            return IntegerSet.from_iterable(range(1, n + 1)), None
        if kind == "range":
            a, b = (int(x) for x in rest.split(":"))
            return IntegerSet.from_iterable(range(a, b + 1)), None
        if kind == "gap":
            a, b, m, n = (int(x) for x in rest.split(","))
            return gap_rank2(a, b, m, n), None
        if kind == "random":
            size, span = (int(x) for x in rest.split(","))
            rng = np.random.default_rng(np.random.SeedSequence(seed))
            els = np.sort(rng.choice(span, size=size, replace=False))
            return IntegerSet.from_iterable(int(x) for x in els), None
        if kind == "box":
            sizes = tuple(int(x) for x in rest.split(","))
            return build_strong_lattice(sizes)
        if kind == "zbox":
            parts = rest.split(";")
            sizes = tuple(int(x) for x in parts[-1].split(","))
            deltas = (tuple(float(x) for x in parts[0].split(","))
                      if len(parts) > 1 else (1.0,) * (len(sizes) - 1))
            return build_strong_integer(deltas, sizes)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad --set spec {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown --set kind {kind!r}")


def load_instance(cfg: ExperimentConfig):
    """The instance for norm/thin/verify: (object, certificate | None)."""
    if cfg.set_spec:
        return parse_set_spec(cfg.set_spec, cfg.seed)
    if cfg.input:
        try:
            with open(cfg.input, encoding="utf-8") as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read input: {exc}") from exc
        from .structures import DimCertificate

        # accept a report emitted by an earlier run
        if isinstance(obj, dict) and isinstance(obj.get("result"), dict) \
                and ("set" in obj["result"] or "thinned" in obj["result"]):
            obj = obj["result"]
        if isinstance(obj, dict) and "thinned" in obj:
            return from_json_obj(obj["thinned"]), None
        if isinstance(obj, dict) and "set" in obj:
            cert = (DimCertificate.from_json_dict(obj["certificate"])
                    if obj.get("certificate") else None)
            return from_json_obj(obj["set"]), cert
        return from_json_obj(obj), None
    raise ConfigError("need --input or --set")


def cmd_gen(cfg: ExperimentConfig):
    params = cfg.params or {}
    if cfg.kind == "gap":
        A = gap_rank2(params["a"], params["b"], params["M"], params["N"],
                      force=cfg.force or bool(params.get("force")))
        return {"set": A.to_json_dict(), "certificate": None,
                "size": len(A)}, True
    if cfg.kind in ("lattice-box", "lattice-random"):
        mode = "box" if cfg.kind.endswith("box") else "random"
        A, cert = build_strong_lattice(tuple(params["sizes"]), mode, cfg.seed)
    else:
        shape = "box" if cfg.kind.endswith("box") else "random"
        sizes = tuple(params["sizes"])
        deltas = tuple(params.get("deltas", (1.0,) * (len(sizes) - 1)))
        A, cert = build_strong_integer(deltas, sizes, shape, cfg.seed,
                                       stretch=float(params.get("stretch", 1.0)))
    report = validate_certificate(A, cert)
    return {"set": A.to_json_dict(), "certificate": cert.to_json_dict(),
            "size": len(A), "validation": report.to_json_dict()}, report.ok


def cmd_norm(cfg: ExperimentConfig):
    obj, _ = load_instance(cfg)
    f = obj if isinstance(obj, TrigPoly) else indicator_poly(obj)
    enc = certified_l1(f, cfg.rel_err, cfg.memory_budget)
    return enc.to_json_dict(), True


def cmd_kernel(cfg: ExperimentConfig):
    kern = flat_top_build(cfg.m, cfg.n)
    rows = [(k, str(kern.values[k]), float(kern.values[k]))
            for k in sorted(kern.values)]
    return {"csv_rows": rows, "csv_header": ("k", "value_exact", "value_float"),
            "m": cfg.m, "n": cfg.n,
            "support_limit": kern.support_limit}, True


def cmd_thin(cfg: ExperimentConfig):
    obj, _ = load_instance(cfg)
    F = obj if isinstance(obj, TrigPoly) else indicator_poly(obj)
    flt = ResidueFilter(cfg.q, cfg.s)
    thinned, factor = thinning_transform(F, cfg.d1, cfg.d2, cfg.delta, flt)
    kept = sorted({(f + cfg.d2 // 2) // cfg.d2 for (f,) in thinned.terms})
    return {"thinned": thinned.to_json_dict(),
            "bound_factor": factor,
            "filter": flt.to_json_dict(),
            "kept_blocks": kept,
            "terms_in": len(F), "terms_out": len(thinned)}, True


def _single_or_none(cfg: ExperimentConfig):
    if cfg.set_spec or cfg.input:
        return load_instance(cfg)
    return None


def _verify_mps(cfg):
    inst = _single_or_none(cfg)
    if inst is None:
        # scan mode: intervals plus seeded random sets, threshold c_mps
        count = cfg.count or 10
        family = family_intervals(range(4, 129))
        family += family_random_sets(count, 64, 10 ** 5,
                                     seed=int(cfg.seed) * 11 + 8)
        report = constant_scan(family, mode="mps", rel_err=cfg.rel_err)
        payload = report.to_json_dict()
        payload["threshold"] = cfg.c_mps
        passed = report.min_ratio >= cfg.c_mps
        payload["passed"] = passed
        return payload, passed, [report.CSV_HEADER, *report.csv_rows()]
    verdict = verify_mps(inst[0], cfg.c_mps, cfg.rel_err)
    return verdict.to_json_dict(), verdict.passed, None


def _verify_basic_multidim(cfg):
    inst = _single_or_none(cfg)
    if inst is None or not isinstance(inst[0], LatticeSet):
        raise ConfigError("basic-multidim needs a lattice set "
                          "(--set box:n1,n2 or --input)")
    verdict = verify_basic_multidim(inst[0], cfg.c_mps, cfg.rel_err)
    return verdict.to_json_dict(), verdict.passed, None


def _verify_multidim(cfg):
    inst = _single_or_none(cfg)
    if inst is None or inst[1] is None:
        raise ConfigError("multidim needs a set with a certificate "
                          "(--set box:n1,n2 or --input with certificate)")
    verdict = verify_multidim(inst[0], inst[1], cfg.c_mps, cfg.rel_err)
    return verdict.to_json_dict(), verdict.certified, None


def _verify_multidimz(cfg):
    inst = _single_or_none(cfg)
    if inst is None or inst[1] is None:
        raise ConfigError("multidimz needs a set with a certificate "
                          "(--set zbox:n1,n2 or --input with certificate)")
    params = cfg.params or {}
    override = params.get("constant_override")
    verdict = verify_multidimz(inst[0], inst[1], cfg.c_mps, cfg.rel_err,
                               constant_override=override)
    return verdict.to_json_dict(), verdict.passed, None


def _default_main_prop() -> tuple[dict, int, int, float, int, int]:
    blocks = {k: indicator_poly(IntegerSet.from_iterable(range(-10, 11)))
              for k in range(26)}
    return blocks, 10, 44, 1.0, 13, 0


def _verify_main_prop(cfg):
    if cfg.input:
        with open(cfg.input, encoding="utf-8") as fh:
            obj = json.load(fh)
        blocks = {int(k): TrigPoly.from_json_dict(p) for k, p in obj["blocks"]}
        d1, d2 = int(obj["d1"]), int(obj["d2"])
        delta, q, s = float(obj["delta"]), int(obj["q"]), int(obj["s"])
    else:
        blocks, d1, d2, delta, q, s = _default_main_prop()
    report = verify_main_prop(blocks, d1, d2, delta, q, s, cfg.c_mps,
                              cfg.rel_err)
    return report.to_json_dict(), report.passed, None


def _verify_bernstein(cfg):
    inst = _single_or_none(cfg)
    if inst is None:
        raise ConfigError("bernstein needs --input or --set")
    f = inst[0] if isinstance(inst[0], TrigPoly) else indicator_poly(inst[0])
    res = bernstein_check(f, cfg.rel_err)
    payload = {"lhs": res.lhs.to_json_dict(), "rhs_bound": res.rhs_bound,
               "passed": res.passed, "degree": f.degree[0]}
    return payload, res.passed, None


def _verify_numerical(cfg):
    inst = _single_or_none(cfg)
    if inst is None:
        sets = [IntegerSet.from_iterable(range(-d, d + 1))
                for d in (10, 50, 200)]
    else:
        sets = [inst[0]]
    rows = []
    ok = True
    for A in sets:
        f = A if isinstance(A, TrigPoly) else indicator_poly(A)
        if f.rank != 1:
            raise ConfigError("numerical applies to rank-1 polynomials")
        d = max(f.degree[0], 1)
        grid = cfg.grid or 4 * math.ceil(4 * math.pi * d)
        enc = certified_l1(f, cfg.rel_err, cfg.memory_budget)
        mean = riemann_l1(f, grid, cfg.memory_budget)
        rho = 4 * math.pi * d / grid
        good = enc.lo * (1 - rho) <= mean <= enc.hi * (1 + rho)
        ok = ok and good
        rows.append({"degree": d, "grid": grid, "mean": mean,
                     "lo": enc.lo, "hi": enc.hi, "rho": rho, "ok": good})
    return {"rows": rows, "passed": ok}, ok, None


def _verify_kernel(cfg):
    params = cfg.params or {}
    if "m" in params or "n" in params:
        pairs = [(int(params["m"]), int(params["n"]))]
    else:
        pairs = [(m, n) for n in range(3, 41) for m in range(2, n)]
    rows = []
    ok = True
    for m, n in pairs:
        kern = flat_top_build(m, n)
        bad = property_violations(kern)
        r = int(params.get("r", 2 * n + 4 * m + 1))
        mean = flat_top_discrete_l1(kern, r)
        bound = discrete_l1_bound(m, n)
        good = not bad and mean <= bound
        ok = ok and good
        if len(pairs) == 1 or not good:
            rows.append({"m": m, "n": n, "violations": bad, "r": r,
                         "discrete_mean": mean, "bound": bound, "ok": good})
    return {"pairs": len(pairs), "rows": rows, "passed": ok}, ok, None


def _verify_thinning(cfg):
    count = cfg.count or 10
    rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), 7]))
    rows = []
    ok = True
    for i in range(count):
        blocks, d1, d2, delta, q, s = acceptance.random_thinning_config(rng)
        F = assemble_blocks(blocks, d2)
        thinned, factor = thinning_transform(F, d1, d2, delta,
                                             ResidueFilter(q, s))
        direct = {(k * d2 + l,): c for k, f_k in blocks.items() if k % q == s
                  for (l,), c in f_k.terms.items()}
        identity = thinned.terms == direct
        norm_f = certified_l1(F, cfg.rel_err)
        norm_t = certified_l1(thinned, cfg.rel_err)
        certified = norm_t.lo <= factor * norm_f.hi
        good = identity and certified
        ok = ok and good
        rows.append({"index": i, "d1": d1, "d2": d2, "delta": delta, "q": q,
                     "s": s, "identity": identity, "certified": certified,
                     "factor": factor})
    return {"count": count, "rows": rows, "passed": ok}, ok, [
        ("index", "d1", "d2", "delta", "q", "s", "identity", "certified"),
        *[(r["index"], r["d1"], r["d2"], r["delta"], r["q"], r["s"],
           r["identity"], r["certified"]) for r in rows]]


def _verify_good_modulus(cfg):
    inst = _single_or_none(cfg)
    if inst is not None:
        I = inst[0]
        if not isinstance(I, IntegerSet):
            raise ConfigError("good-modulus takes an integer set")
        res = good_modulus(I)
        brute = brute_force_modulus(I)
        agree = (res.j0, len(res.filtered)) == brute
        ok = res.bounds_ok and agree
        payload = res.to_json_dict()
        payload.update(brute=list(brute), brute_agrees=agree,
                       bounds_ok=res.bounds_ok, passed=ok)
        return payload, ok, None
    count = cfg.count or 100
    rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), 6]))
    rows = []
    ok = True
    for i in range(count):
        size = int(round(math.exp(rng.uniform(math.log(8), math.log(2000)))))
        max_gap = int(round(math.exp(rng.uniform(0.0, 5.0))))
        gaps = rng.integers(1, max_gap + 1, size=size)
        I = IntegerSet.from_iterable(int(x) for x in np.cumsum(gaps))
        res = good_modulus(I)
        brute = brute_force_modulus(I)
        agree = (res.j0, len(res.filtered)) == brute
        good = res.bounds_ok and agree
        ok = ok and good
        rows.append({"index": i, "size": len(I), "j0": res.j0,
                     "filtered": len(res.filtered), "ok": good})
    return {"count": count, "rows": rows, "passed": ok}, ok, [
        ("index", "size", "j0", "filtered", "ok"),
        *[(r["index"], r["size"], r["j0"], r["filtered"], r["ok"])
          for r in rows]]


_THEOREMS = {
    "mps": _verify_mps,
    "basic-multidim": _verify_basic_multidim,
    "multidim": _verify_multidim,
    "main-prop": _verify_main_prop,
    "multidimz": _verify_multidimz,
    "bernstein": _verify_bernstein,
    "numerical": _verify_numerical,
    "kernel": _verify_kernel,
    "thinning": _verify_thinning,
    "good-modulus": _verify_good_modulus,
}


def cmd_verify(cfg: ExperimentConfig):
    payload, passed, csv_rows = _THEOREMS[cfg.theorem](cfg)
    if cfg.csv_path and csv_rows:
        _write_csv(cfg.csv_path, csv_rows)
    return payload, passed


def cmd_suite(cfg: ExperimentConfig):
    report = acceptance.run_all(cfg.seed,
                                inject_kernel_fault=cfg.inject_kernel_fault,
                                determinism=not cfg.skip_determinism)
    for line in report.lines():
        print(line, file=sys.stderr)
    return report.to_json_dict(), report.all_passed


def _write_csv(path: str, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        csv.writer(fh).writerows(rows)


def _emit(cfg: ExperimentConfig, payload: dict, started: float) -> None:
    if cfg.command == "kernel":
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(payload["csv_header"])
        w.writerows(payload["csv_rows"])
        text = buf.getvalue()
    else:
        report = {"config": cfg.echo(), "result": payload,
                  "meta": {"timestamp": datetime.now(timezone.utc).isoformat(),
                           "walltime": time.perf_counter() - started,
                           "backend": backend.BACKEND}}
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_COMMANDS = {
    "gen": cmd_gen,
    "norm": cmd_norm,
    "kernel": cmd_kernel,
    "thin": cmd_thin,
    "verify": cmd_verify,
    "suite": cmd_suite,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        payload, passed = _COMMANDS[cfg.command](cfg)
    except MemoryBudgetError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return RESOURCE_ERROR
    except (ConfigError, HypothesisError, SupportError, CollisionError,
            KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        _emit(cfg, payload, started)
    except OSError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return RESOURCE_ERROR
    if passed or cfg.no_fail:
        return 0
    return 1


if __name__ == "__main__":
    sys.exit(main())
