"""Command line front end.

Every command emits one versioned JSON report: the configuration echoed
verbatim, a results payload, and wall-clock timing.  Timing sits next to
the results rather than inside them, so the payload for a fixed config is
byte-for-byte reproducible (stochastic commands require --seed for the
same reason).  Reports go to stdout or --out; Suzuki certificates are
written as separate files so they can be shipped and re-verified alone.

At desk scale each command finishes in seconds to minutes, so the runner
executes tasks sequentially in submission order; nothing here needs a
worker pool, and report merging stays trivial.

Exit codes: 0 success, 1 verify-suite failure, 2 invalid configuration,
3 cap exceeded, 4 property violation.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
import time
from dataclasses import dataclass, field

from . import acceptance, altcodes, arith, bimap, genericity, nursery, twisted
from .errors import CapExceededError, InvalidConfigError, PropertyViolationError
from .gf import FieldCtx, FieldError, make_field

ARTIFACT_VERSION = "kinderlab-report/1"

EXIT_OK = 0
EXIT_SUITE = 1
EXIT_INVALID = 2
EXIT_CAP = 3
EXIT_PROPERTY = 4

COMMANDS = (
    "field-check",
    "hom",
    "witness",
    "generic",
    "nursery-census",
    "reconstruct",
    "alt-codes",
    "suzuki-search",
    "suzuki-verify",
    "arith",
    "b2-demo",
)


@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int | None = None
    trials: int | None = None
    caps: dict = field(default_factory=dict)
    out: str | None = None

    def echo(self) -> dict:
        return {
            "command": self.command,
            "params": dict(self.params),
            "seed": self.seed,
            "trials": self.trials,
            "caps": dict(self.caps),
            "out": self.out,
        }


@dataclass
class Report:
    config: RunConfig
    version: str
    results: dict
    elapsed_s: float

    def to_payload(self) -> dict:
        return {
            "version": self.version,
            "config": self.config.echo(),
            "results": self.results,
            "elapsed_s": self.elapsed_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_payload(), sort_keys=True, indent=2)


def _ctx_from_q(q) -> FieldCtx:
    if not isinstance(q, int) or q < 2:
        raise InvalidConfigError("q must be a prime power >= 2")
    fac = arith.factorize(q)
    if len(fac) != 1:
        raise InvalidConfigError("q = %d is not a prime power" % q)
    p, e = fac[0]
    return make_field(p, e)


def _require_seed(config: RunConfig):
    if config.seed is None:
        raise InvalidConfigError("--seed is required for stochastic commands")


def _need(params: dict, *names):
    missing = [n for n in names if params.get(n) is None]
    if missing:
        raise InvalidConfigError("missing parameters: %s" % ", ".join(missing))
    return [params[n] for n in names]


# ---------------------------------------------------------------------------
# command handlers


def _cmd_field_check(config: RunConfig) -> dict:
    p, e = _need(config.params, "p", "e")
    F = make_field(p, e)
    return {
        "p": F.p,
        "e": F.e,
        "order": F.order,
        "modulus": list(F.modulus),
        "modulus_string": F.modulus_string(),
        "checks": F.validate(),
    }


def _cmd_hom(config: RunConfig) -> dict:
    _require_seed(config)
    a, s, b, t = _need(config.params, "a", "s", "b", "t")
    c = config.params.get("c") or 2
    q = config.params.get("q") or 2
    sign = config.params.get("sign") or 1
    trials = config.trials or 10
    K = _ctx_from_q(q)
    rng = random.Random(config.seed)
    dims = []
    for _ in range(trials):
        phi = bimap.MatrixSystem.random(K, (s, b), c, rng)
        ups = bimap.MatrixSystem.random(K, (a, t), c, rng)
        hs = bimap.hom_space(phi, ups, sign)
        dims.append({"dim_k": hs.dim_k, "dim_fp": hs.dim_fp})
    hist = {}
    for d in dims:
        key = str(d["dim_k"])
        hist[key] = hist.get(key, 0) + 1
    return {
        "shape": {"a": a, "s": s, "b": b, "t": t, "c": c, "q": q, "sign": sign},
        "unknowns": a * s + b * t,
        "systems": dims,
        "dim_hist": hist,
    }


def _cmd_witness(config: RunConfig) -> dict:
    m, n = _need(config.params, "m", "n")
    q = config.params.get("q") or 2
    K = _ctx_from_q(q)
    W = bimap.witness_system(m, n, K)
    hs = bimap.end_space(W)
    return {
        "m": m,
        "n": n,
        "q": q,
        "matrices": len(W.mats),
        "end_dim_k": hs.dim_k,
        "end_dim_fp": hs.dim_fp,
    }


def _trial_payload(r: genericity.TrialReport) -> dict:
    out = {
        "kind": r.kind,
        "trials": r.trials,
        "success": r.success,
        "frequency": r.success / r.trials,
        "histogram": {str(k): v for k, v in sorted(r.histogram.items(), key=lambda kv: str(kv[0]))},
        "exact": r.exact,
    }
    if r.seed is not None:
        out["seed"] = r.seed
    if r.bound is not None:
        out["paper_bound"] = float(r.bound)
    if r.extra:
        out["extra"] = r.extra
    return out


def _cmd_generic(config: RunConfig) -> dict:
    (kind,) = _need(config.params, "kind")
    mode = config.params.get("mode") or "estimate"
    if mode not in ("estimate", "exhaustive"):
        raise InvalidConfigError("generic mode must be estimate or exhaustive")
    params = {
        k: v
        for k, v in config.params.items()
        if k in ("n", "s", "m", "a", "b", "c", "ell", "q") and v is not None
    }
    try:
        if mode == "exhaustive":
            rep = genericity.exhaustive_mode(kind, params)
        else:
            _require_seed(config)
            rep = genericity.estimate(kind, params, config.trials or 1000, seed=config.seed)
    except KeyError as exc:
        raise InvalidConfigError("kind %s needs parameter %s" % (kind, exc)) from None
    return _trial_payload(rep)


def _make_nursery(params: dict) -> nursery.ModuleNursery:
    (kind,) = _need(params, "kind")
    if kind == "matrix":
        a, c, q = _need(params, "a", "c", "q")
        return nursery.make_nursery("matrix", a=a, c=c, ctx=_ctx_from_q(q))
    if kind == "unitary":
        p, e = _need(params, "p", "e")
        return nursery.make_nursery("unitary", p=p, e=e)
    if kind == "b2_odd":
        (q,) = _need(params, "q")
        return nursery.make_nursery("b2_odd", ctx=_ctx_from_q(q))
    if kind == "ree_small":
        (e,) = _need(params, "e")
        return nursery.make_nursery("ree_small", e=e)
    raise InvalidConfigError("unknown nursery kind %r" % kind)


def _cmd_census(config: RunConfig) -> dict:
    nur = _make_nursery(config.params)
    ell = config.params.get("ell")
    if ell is None:
        ell = nur.s_subspace().dim
    mode = config.params.get("mode") or "strict"
    if mode not in ("strict", "relaxed"):
        raise InvalidConfigError("census mode must be strict or relaxed")
    max_kinder = config.caps.get("subgroups") or 4096
    rep = nursery.census(nur, ell, relaxed=(mode == "relaxed"), max_kinder=max_kinder)
    return rep.to_payload()


def _cmd_reconstruct(config: RunConfig) -> dict:
    _require_seed(config)
    nur = _make_nursery(config.params)
    trials = config.trials or 10
    rng = random.Random(config.seed)
    lo = nur.s_subspace().dim
    ell_fixed = config.params.get("ell")
    g2 = frozenset(nur.gamma2_labels())
    g3 = frozenset(nur.gamma3_labels())
    ident = frozenset([nur.identity_label()])
    good = 0
    dims = []
    for _ in range(trials):
        ell = ell_fixed if ell_fixed is not None else rng.randint(lo, nur.rdim)
        kind = nursery.random_kind(nur, ell, rng)
        rho, mu = nursery.random_frames(kind, rng)
        rec = nursery.reconstruct(kind, rho, mu)
        if rec.X == g2 and rec.Y == g3 and rec.Z == ident:
            good += 1
        dims.append(ell)
    return {
        "nursery": nur.describe(),
        "trials": trials,
        "exact_recoveries": good,
        "dims": dims,
    }


def _cmd_alt_codes(config: RunConfig) -> dict:
    k, l = _need(config.params, "k", "l")
    return altcodes.code_class_table(k, l)


def _cmd_suzuki_search(config: RunConfig) -> dict:
    _require_seed(config)
    (e,) = _need(config.params, "e")
    budget = config.params.get("budget") or 40
    res = twisted.suzuki_search(e, budget=budget, seed=config.seed)
    if isinstance(res, twisted.SearchFailure):
        return {
            "found": False,
            "e": res.e,
            "s_bound": res.s_bound,
            "best_rank": res.best_rank,
            "needed": res.needed,
            "restarts": res.restarts,
        }
    path = config.params.get("cert") or ("suzuki_cert_e%d.json" % e)
    with open(path, "w") as fh:
        fh.write(res.to_json())
    r = math.isqrt(res.degree)
    return {
        "found": True,
        "e": res.e,
        "degree": res.degree,
        "s_size": len(res.elements),
        "s_bound": 3 * (r if r * r == res.degree else r + 1),
        "pairs": len(res.pairs),
        "verified": twisted.suzuki_verify(res),
        "certificate_path": path,
    }


def _cmd_suzuki_verify(config: RunConfig) -> dict:
    (path,) = _need(config.params, "cert")
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidConfigError("cannot read certificate: %s" % exc) from None
    cert = twisted.SpanCertificate.from_json(text)
    return {
        "valid": twisted.suzuki_verify(cert),
        "e": cert.e,
        "degree": cert.degree,
        "s_size": len(cert.elements),
    }


def _cmd_arith(config: RunConfig) -> dict:
    (op,) = _need(config.params, "op")
    if op == "legendre":
        k, p = _need(config.params, "k", "p")
        return {"valuation": arith.legendre_valuation(k, p)}
    if op == "nu":
        n, p = _need(config.params, "n", "p")
        return {"valuation": arith.nu_p(n, p)}
    if op == "mu":
        (n,) = _need(config.params, "n")
        return {"mu": arith.mu(n)}
    if op == "factorize":
        (n,) = _need(config.params, "n")
        return {"factors": [[p, e] for p, e in arith.factorize(n)]}
    if op == "wall-bound":
        (n,) = _need(config.params, "n")
        return {"log_bound": arith.wall_log_bound(n)}
    raise InvalidConfigError("unknown arith op %r" % op)


def _cmd_b2_demo(config: RunConfig) -> dict:
    q = config.params.get("q") or 8
    F = _ctx_from_q(q)
    b2 = twisted.b2_build(F)
    G = b2.group()
    w = F.primitive
    A = {i: (F.pow(w, i % (q - 1)), 0, 0, 0) for i in (-1, 0, 1)}
    B = {i: (0, F.pow(w, i % (q - 1)), 0, 0) for i in (-1, 0, 1)}
    lab = twisted.b2_labels(b2, G, A, B)
    return {
        "q": q,
        "order": G.n,
        "gamma3_size": len(list(b2.gamma3_labels())),
        "gamma4_size": len(lab.gamma4),
        "complement_size": len(lab.complement),
        "a_series": {str(k): list(v) for k, v in sorted(lab.a_series.items())},
        "q_image": sorted(lab.q_image),
        "q_image_is_field": frozenset(range(q)) == lab.q_image,
    }


_HANDLERS = {
    "field-check": _cmd_field_check,
    "hom": _cmd_hom,
    "witness": _cmd_witness,
    "generic": _cmd_generic,
    "nursery-census": _cmd_census,
    "reconstruct": _cmd_reconstruct,
    "alt-codes": _cmd_alt_codes,
    "suzuki-search": _cmd_suzuki_search,
    "suzuki-verify": _cmd_suzuki_verify,
    "arith": _cmd_arith,
    "b2-demo": _cmd_b2_demo,
}


def run(config: RunConfig) -> Report:
    """Execute one command; raises the library error on failure."""
    if config.command not in _HANDLERS:
        raise InvalidConfigError("unknown command %r" % config.command)
    t0 = time.time()
    results = _HANDLERS[config.command](config)
    return Report(config, ARTIFACT_VERSION, results, round(time.time() - t0, 6))


def verify_suite(tier: str = "fast", stream=None) -> tuple[dict, int]:
    """Run the acceptance criteria; returns (payload, exit_code)."""
    if tier not in ("fast", "full"):
        raise InvalidConfigError("tier must be fast or full")
    stream = stream if stream is not None else sys.stderr
    rows = []
    failing = []
    t0 = time.time()
    for idx, name, _ in acceptance.CRITERIA:
        r = acceptance.run_criterion(idx, tier)
        rows.append(
            {
                "index": r.index,
                "name": r.name,
                "passed": r.passed,
                "detail": r.detail,
                "elapsed_s": round(r.elapsed_s, 3),
            }
        )
        print(
            "[%2d/13] %s %-24s (%.1fs) %s"
            % (r.index, "PASS" if r.passed else "FAIL", r.name, r.elapsed_s, r.detail),
            file=stream,
        )
        if not r.passed:
            failing.append(r.name)
    payload = {
        "version": ARTIFACT_VERSION,
        "tier": tier,
        "criteria": rows,
        "all_passed": not failing,
        "elapsed_s": round(time.time() - t0, 3),
    }
    if failing:
        print("FAILED criteria: %s" % ", ".join(failing), file=stream)
    return payload, (EXIT_OK if not failing else EXIT_SUITE)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="PRNG seed (required for stochastic commands)")
    common.add_argument("--trials", type=int, help="number of random trials")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--cap-subgroups", type=int, help="enumeration cap for subgroup counts")
    common.add_argument("--cap-iso", type=int, help="order cap for isomorphism classification")
    common.add_argument("--mode", help="command-specific mode switch")

    ap = argparse.ArgumentParser(
        prog="kinderlab",
        description="desk-scale workbench for small p-group linear algebra experiments",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("field-check", parents=[common], help="build a field and re-check its invariants")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--e", type=int, required=True)

    sp = sub.add_parser("hom", parents=[common], help="solve random twisted hom systems")
    for flag in ("--a", "--s", "--b", "--t"):
        sp.add_argument(flag, type=int, required=True)
    sp.add_argument("--c", type=int, default=2)
    sp.add_argument("--q", type=int, default=2)
    sp.add_argument("--sign", type=int, choices=(1, -1), default=1)

    sp = sub.add_parser("witness", parents=[common], help="endomorphisms of a witness system")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--q", type=int, default=2)

    sp = sub.add_parser("generic", parents=[common], help="genericity frequency, sampled or exhaustive")
    sp.add_argument("--kind", required=True, choices=genericity.KINDS)
    for flag in ("--n", "--s", "--m", "--a", "--b", "--c", "--ell", "--q"):
        sp.add_argument(flag, type=int)

    sp = sub.add_parser("nursery-census", parents=[common], help="classify every kind of one dimension")
    sp.add_argument("--kind", required=True, choices=("matrix", "unitary", "b2_odd", "ree_small"))
    for flag in ("--a", "--c", "--p", "--e", "--q", "--ell"):
        sp.add_argument(flag, type=int)

    sp = sub.add_parser("reconstruct", parents=[common], help="rebuild the filtration from group multiplication")
    sp.add_argument("--kind", required=True, choices=("matrix", "unitary", "b2_odd", "ree_small"))
    for flag in ("--a", "--c", "--p", "--e", "--q", "--ell"):
        sp.add_argument(flag, type=int)

    sp = sub.add_parser("alt-codes", parents=[common], help="code classes inside (Sym_3)^k")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)

    sp = sub.add_parser("suzuki-search", parents=[common], help="search for a small spanning certificate")
    sp.add_argument("--e", type=int, required=True)
    sp.add_argument("--budget", type=int, default=40)
    sp.add_argument("--cert", help="certificate output path (default suzuki_cert_e<e>.json)")

    sp = sub.add_parser("suzuki-verify", parents=[common], help="re-verify a certificate file")
    sp.add_argument("--cert", required=True)

    sp = sub.add_parser("arith", parents=[common], help="factorial valuations and friends")
    sp.add_argument("--op", required=True, choices=("legendre", "nu", "mu", "factorize", "wall-bound"))
    for flag in ("--k", "--p", "--n"):
        sp.add_argument(flag, type=int)

    sp = sub.add_parser("b2-demo", parents=[common], help="run the center-labeling recurrence over F_q")
    sp.add_argument("--q", type=int, default=8)

    sp = sub.add_parser("verify", parents=[common], help="run the acceptance criteria suite")
    sp.add_argument("--tier", choices=("fast", "full"), default="fast")

    return ap


_COMMON_KEYS = {"command", "seed", "trials", "out", "cap_subgroups", "cap_iso"}


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(args).items() if k not in _COMMON_KEYS and v is not None}
    caps = {}
    if args.cap_subgroups is not None:
        caps["subgroups"] = args.cap_subgroups
    if args.cap_iso is not None:
        caps["iso"] = args.cap_iso
    return RunConfig(
        command=args.command,
        params=params,
        seed=args.seed,
        trials=args.trials,
        caps=caps,
        out=args.out,
    )


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        payload, code = verify_suite(args.tier)
        _emit(json.dumps(payload, sort_keys=True, indent=2), args.out)
        return code
    config = _config_from_args(args)
    try:
        report = run(config)
    except (InvalidConfigError, FieldError) as exc:
        print("error (invalid-config): %s" % exc, file=sys.stderr)
        return EXIT_INVALID
    except CapExceededError as exc:
        print("error (cap-exceeded): %s" % exc, file=sys.stderr)
        return EXIT_CAP
    except PropertyViolationError as exc:
        print("error (property-violation): %s" % exc, file=sys.stderr)
        return EXIT_PROPERTY
    _emit(report.to_json(), config.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
