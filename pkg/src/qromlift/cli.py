"""Command-line entry point: ``qromlift {verify,run,lift,pseudodet}``.

Exit status: 0 pass, 1 failed check, 2 usage or parse error, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import checks
from . import fixtures as fx
from .distribution import EXACT, sampled
from .errors import BudgetExceeded, ParseError, QromliftError
from .experiments import GAMES, prg_advantage, run_experiment
from .lifting import lifting_report, reprogram_game
from .oracles import DEFAULT_BUDGET, Oracle, all_oracles, from_bits, parse_oracle
from .pseudodet import (
    SimBudget,
    canonical_output,
    check_critical_set,
    critical_set_bruteforce,
    is_delta_deterministic,
    qeq,
    sim_oracle,
)
from .quantum import QueryCircuit, load_circuit, run_circuit

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("qromlift")

DEFAULTS = {
    "mode": EXACT,
    "seed": None,
    "budget": DEFAULT_BUDGET,
    "format": "json",
    "out": None,
    "suite": "all",
    "prg": "G_id",
    "distinguisher": None,
    "eps": "auto",
    "trials": 4096,
    "game": "PRGg",
    "g": None,
    "delta": None,
    "alg": "eval0",
    "oracle": None,
    "fixture": "grover_uniform",
    "check_critical_set": False,
}


class UsageError(QromliftError):
    pass


def parse_config(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS and key != "circuit":
            raise ParseError(f"unknown config key {key!r}", lineno)
        out[key] = value
    return out


def _coerce(key: str, value):
    if value is None:
        return None
    if key in ("seed", "budget", "trials"):
        return int(value)
    if key == "delta":
        return float(value)
    if key == "check_critical_set":
        return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes", "on")
    if key == "circuit":
        return value if isinstance(value, list) else [v.strip() for v in str(value).split(",") if v.strip()]
    return value


def resolve(args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then explicit flags."""
    conf = dict(DEFAULTS)
    if getattr(args, "config", None):
        conf.update(parse_config(Path(args.config).read_text(encoding="utf-8")))
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        conf[key] = value
    conf = {k: _coerce(k, v) for k, v in conf.items()}
    if conf["mode"] not in (EXACT, "sampled"):
        raise UsageError(f"--mode must be exact or sampled, got {conf['mode']!r}")
    if conf["mode"] == "sampled" and conf["seed"] is None:
        raise UsageError("sampled mode requires --seed")
    if conf["mode"] == EXACT:
        conf["seed"] = None
    return conf


def _provenance(conf: dict) -> str:
    return EXACT if conf["mode"] == EXACT else sampled(conf["seed"], conf["trials"])


def _load_distinguisher(ref: str) -> QueryCircuit:
    if ref in fx.DISTINGUISHERS:
        return fx.DISTINGUISHERS[ref]()
    if Path(ref).exists():
        return load_circuit(ref)
    raise UsageError(f"unknown distinguisher {ref!r}: not a built-in name or an existing file")


def _load_prg(name: str):
    if name not in fx.PRGS:
        raise UsageError(f"unknown PRG {name!r}; built-ins: {', '.join(fx.PRGS)}")
    return fx.PRGS[name]()


def _default_distinguisher(conf: dict) -> QueryCircuit:
    if conf["distinguisher"]:
        return _load_distinguisher(conf["distinguisher"])
    for a_name, p_name in fx.PAIRINGS.items():
        if p_name == conf["prg"]:
            return fx.DISTINGUISHERS[a_name]()
    raise UsageError(f"no built-in distinguisher for {conf['prg']}; pass --distinguisher")


def _load_alg(ref: str):
    """Returns ``(circuit, delta, fill)``."""
    try:
        fixture = fx.det_fixture(ref)
        return fixture.circuit, fixture.delta, fixture.fill
    except KeyError:
        pass
    if Path(ref).exists():
        circ = load_circuit(ref)
        return circ, 0.0, None if circ.n == circ.m else Oracle.zero(circ.n, circ.m)
    raise UsageError(f"unknown algorithm {ref!r}: not a built-in name or an existing file")


def _parse_g(bits: str | None, ell: int) -> int:
    if bits is None:
        raise UsageError("this game needs --g")
    if len(bits) != ell or set(bits) - {"0", "1"}:
        raise UsageError(f"--g must be a {ell}-bit string, got {bits!r}")
    return from_bits(bits)


def _config_record(conf: dict, keys) -> dict:
    return {k: conf.get(k) for k in keys}


# -- subcommands -----------------------------------------------------------------------


def _circuit_checks(paths, conf) -> list[checks.CheckResult]:
    results = []
    for path in paths:
        circ = load_circuit(path)
        worst = 0.0
        for H in all_oracles(circ.n, circ.m, conf["budget"]):
            _, ledger = run_circuit(circ, H)
            worst = max(worst, ledger.total - circ.query_count)
        results.append(checks.CheckResult(
            f"circuit:{Path(path).name}", "query magnitude ledger total <= Q over all oracles",
            worst <= checks.SLACK, {"queries": circ.query_count, "max_total_minus_Q": worst},
        ))
    return results


def cmd_verify(conf: dict) -> tuple[dict, int]:
    cfg = checks.CheckConfig(budget=conf["budget"])
    results = _circuit_checks(conf.get("circuit") or [], conf)
    results += checks.run_suite(conf["suite"], cfg)
    report = checks.make_report(
        "verify",
        _config_record(conf, ("suite", "mode", "seed", "budget", "circuit")),
        {"checks": [r.as_dict() for r in results], "passed": all(r.passed for r in results)},
        _provenance(conf),
    )
    return report, EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_run(conf: dict) -> tuple[dict, int]:
    game = conf["game"]
    keys = ["game", "mode", "seed", "budget"]
    if game in GAMES:
        G = _load_prg(conf["prg"])
        A = _default_distinguisher(conf)
        g = None if game in ("PRG", "Rand") else _parse_g(conf["g"], G.ell)
        delta = conf["delta"]
        if game.startswith("Hyb") and delta is None:
            raise UsageError(f"{game} needs --delta")
        dist = run_experiment(game, A, G, g=g, delta=delta, mode=conf["mode"], seed=conf["seed"],
                              trials=conf["trials"], budget=conf["budget"])
        conf = {**conf, "distinguisher": A.name}
        body = {
            "game": game,
            "g": conf["g"],
            "distribution": {str(k): float(v) for k, v in dist.items()},
            "params": {"delta": delta, "prg": G.name, "distinguisher": A.name},
        }
        keys += ["prg", "distinguisher", "g", "delta", "trials"]
        return checks.make_report("run", _config_record(conf, keys), body, dist.provenance), EXIT_OK
    if game == "sim_oracle":
        circ, delta, fill = _load_alg(conf["alg"])
        delta = conf["delta"] if conf["delta"] is not None else delta
        F = _load_oracle(conf, circ)
        res = sim_oracle(circ, F, delta, fill=fill)
        conf = {**conf, "delta": delta}
        body = {
            "game": game,
            "oracle": str(F),
            "simulated_oracle": str(res.oracle),
            "queries": res.queries,
            "queries_used": res.queries_used,
            "trace": res.trace,
            "qeq": qeq(circ, F, res.oracle, delta),
        }
        keys += ["alg", "oracle", "delta"]
        return checks.make_report("run", _config_record(conf, keys), body), EXIT_OK
    if game == "reprogram":
        by_name = {f.name: f for f in fx.reprogram_fixtures()}
        if conf["fixture"] not in by_name:
            raise UsageError(f"unknown reprogramming fixture {conf['fixture']!r}; choose from {', '.join(by_name)}")
        f = by_name[conf["fixture"]]
        adv, bound = reprogram_game(f.distinguisher, f.F0, f.sampler)
        body = {"game": game, "fixture": f.name, "measured_adv": adv, "bound": bound,
                "epsilon": float(f.sampler.epsilon)}
        keys += ["fixture"]
        return checks.make_report("run", _config_record(conf, keys), body), EXIT_OK
    raise UsageError(f"unknown game {game!r}; choose from {', '.join(GAMES + ('sim_oracle', 'reprogram'))}")


def cmd_lift(conf: dict) -> tuple[dict, int]:
    G = _load_prg(conf["prg"])
    A = _default_distinguisher(conf)
    eps = conf["eps"]
    if conf["mode"] == "sampled" and eps == "auto":
        eps = prg_advantage(A, G, mode="sampled", seed=conf["seed"], trials=conf["trials"], budget=conf["budget"])
    elif eps != "auto":
        eps = float(eps)
    report = lifting_report(A, G, eps_target=eps, delta=conf["delta"], budget=conf["budget"])
    conf = {**conf, "distinguisher": A.name}
    out = checks.make_report(
        "lift",
        _config_record(conf, ("prg", "distinguisher", "eps", "delta", "mode", "seed", "budget")),
        {"report": report.as_dict(), "passed": report.passed},
        _provenance(conf),
    )
    return out, EXIT_OK if report.passed else EXIT_FAIL


def _load_oracle(conf: dict, circ: QueryCircuit) -> Oracle:
    if conf["oracle"] is None:
        return Oracle.zero(circ.n, circ.m)
    path = Path(conf["oracle"])
    if not path.exists():
        raise UsageError(f"oracle file {path} does not exist")
    try:
        F = parse_oracle(path.read_text(encoding="utf-8"))
    except ParseError as exc:
        raise ParseError(f"{path}: {exc.args[0]}") from exc
    if (F.n, F.m) != (circ.n, circ.m):
        raise UsageError(f"oracle ({F.n},{F.m}) does not match algorithm ({circ.n},{circ.m})")
    return F


def cmd_pseudodet(conf: dict) -> tuple[dict, int]:
    circ, delta, fill = _load_alg(conf["alg"])
    delta = conf["delta"] if conf["delta"] is not None else delta
    F = _load_oracle(conf, circ)
    budget = SimBudget.for_params(circ.query_count, delta)
    counter = is_delta_deterministic(circ, delta, all_oracles(circ.n, circ.m, conf["budget"]))
    res = sim_oracle(circ, F, delta, fill=fill)
    agree = qeq(circ, F, res.oracle, delta)
    body = {
        "delta_deterministic": counter is None,
        "canonical_output": canonical_output(circ, F)._asdict(),
        "sim": {"oracle": str(res.oracle), "queries_used": res.queries_used, "queries": res.queries,
                "qeq": agree, "trace": res.trace},
        "budget": {"k": budget.k, "threshold": budget.threshold, "query_cap": budget.query_cap},
    }
    passed = agree and res.queries_used <= budget.query_cap
    if counter is not None:
        body["counterexample"] = {"oracle": str(counter.oracle), "canonical": counter.canonical._asdict()}
    if conf["check_critical_set"]:
        S = critical_set_bruteforce(circ, F, delta, budget=conf["budget"])
        chk = check_critical_set(circ, F, delta, S, budget=conf["budget"])
        body["critical_set"] = {
            "points": list(S.points), "magnitudes": {str(k): v for k, v in S.magnitudes.items()},
            "size_ok": chk.size_ok, "stable_ok": chk.stable_ok, "magnitude_ok": chk.magnitude_ok,
        }
        passed = passed and chk.ok
    body["passed"] = passed
    conf = {**conf, "alg": circ.name or conf["alg"], "delta": delta}
    out = checks.make_report(
        "pseudodet", _config_record(conf, ("alg", "oracle", "delta", "check_critical_set", "budget")), body
    )
    return out, EXIT_OK if passed else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "run": cmd_run, "lift": cmd_lift, "pseudodet": cmd_pseudodet}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="key = value file; flags override it")
    shared.add_argument("--mode", choices=("exact", "sampled"))
    shared.add_argument("--seed", type=int)
    shared.add_argument("--budget", type=int, help="max oracles per exact enumeration")
    shared.add_argument("--out", help="write the report here instead of stdout")
    shared.add_argument("--format", choices=("json", "table"))
    shared.add_argument("-v", "--verbose", action="store_true", default=None)

    parser = argparse.ArgumentParser(prog="qromlift", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[shared], help="run acceptance suites")
    p.add_argument("--suite", choices=sorted(checks.SUITES))
    p.add_argument("--circuit", action="append", help="also validate this circuit file (repeatable)")

    p = sub.add_parser("run", parents=[shared], help="run one experiment")
    p.add_argument("--game", help=f"one of {', '.join(GAMES)}, sim_oracle, reprogram")
    p.add_argument("--prg")
    p.add_argument("--distinguisher")
    p.add_argument("--g", help="PRG output as a bit string")
    p.add_argument("--delta", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--alg")
    p.add_argument("--oracle")
    p.add_argument("--fixture")

    p = sub.add_parser("lift", parents=[shared], help="lifting report for a PRG and distinguisher")
    p.add_argument("--prg")
    p.add_argument("--distinguisher", help="built-in name or circuit JSON file")
    p.add_argument("--eps", help="target advantage or 'auto'")
    p.add_argument("--delta", type=float, help="override the derived delta")
    p.add_argument("--trials", type=int)

    p = sub.add_parser("pseudodet", parents=[shared], help="simulate a pseudo-deterministic algorithm")
    p.add_argument("--alg", help="built-in name or circuit JSON file")
    p.add_argument("--oracle", help="oracle text file")
    p.add_argument("--delta", type=float)
    p.add_argument("--check-critical-set", action="store_true", default=None)
    return parser


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    target = Path(out)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, target)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    verbose = args.verbose
    del args.verbose
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        conf = resolve(args)
        report, status = COMMANDS[args.command](conf)
    except BudgetExceeded as exc:
        print(f"qromlift: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, UsageError, OSError) as exc:
        print(f"qromlift: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QromliftError as exc:
        print(f"qromlift: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = checks.render_table(report) if conf["format"] == "table" else checks.dumps(report)
    _write(text, conf["out"])
    return status


if __name__ == "__main__":
    raise SystemExit(main())
