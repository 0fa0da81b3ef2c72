"""Command line interface.

Exit status: 0 pass or ok, 1 fail or violation, 2 usage or input error.
System arguments may be file paths or the names of shipped fixtures.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import fixtures
from .composition import compose
from .conformance import check_uioco, decide_eco, is_utrace_closed
from .io import parse_lts, parse_test_case, serialize_lts, serialize_test_case
from .lts import Lts, LtsError, show_label, show_trace, validate
from .otf import OtfConfig, otf_cioco, otf_eco, otf_uioco, simulate_adapter
from .testgen import (
    GenPolicy,
    TestCase,
    combined_suite,
    eco_suite,
    gen_combined_test,
    gen_eco_test,
    run_suite,
    validate_test_case,
)

SEPARATOR = "---"


def _read(path: str) -> str:
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8")
    stem = p.name.removesuffix(".lts")
    if stem in fixtures.names():
        return fixtures.text(stem)
    raise FileNotFoundError(f"no such file or fixture: {path}")


def _system(path: str) -> Lts:
    return parse_lts(_read(path))


def _suite(path: str) -> list[TestCase]:
    chunks, cur = [], []
    for line in _read(path).splitlines():
        if line.strip() == SEPARATOR:
            chunks.append("\n".join(cur))
            cur = []
        else:
            cur.append(line)
    chunks.append("\n".join(cur))
    return [parse_test_case(c) for c in chunks if c.strip()]


def _default_seed() -> int:
    return int(os.environ.get("COMPOTEST_SEED", "0"))


def _weights(text: str | None) -> dict[str, float]:
    out: dict[str, float] = {}
    for part in (text or "").split(","):
        if part.strip():
            case, _, val = part.partition("=")
            out[case.strip().upper()] = float(val)
    return out


def cmd_validate(args) -> int:
    l = parse_lts(_read(args.file), check=False)
    report = validate(l)
    if report.ok:
        print("ok")
        return 0
    for v in report.violations:
        print(v)
    return 1


def cmd_compose(args) -> int:
    print(serialize_lts(compose(_system(args.left), _system(args.right))), end="")
    return 0


def cmd_check_uioco(args) -> int:
    i, s = _system(args.impl), _system(args.spec)
    v = check_uioco(i, s)
    if v.passed:
        print("pass")
        return 0
    print("fail")
    print(f"counterexample: {v.counterexample}")
    return 1


def cmd_check_eco(args) -> int:
    s, e = _system(args.left), _system(args.right)
    v = decide_eco(s, e)
    if v.passed:
        print("pass")
        for xs, xe in sorted(v.relation):
            print(f"({s.show_set(xs)}, {e.show_set(xe)})")
        return 0
    ce = v.counterexample
    print("fail")
    print(f"counterexample: {ce}")
    side = e if ce.site == "e" else s
    print(f"{side.name or ce.site} does not accept {show_label(ce.label)}")
    return 1


def cmd_check_utrace_closed(args) -> int:
    ans = is_utrace_closed(_system(args.file))
    if ans:
        print("yes")
        return 0
    print("no")
    print(f"witness: {show_trace(ans.witness)}")
    return 1


def cmd_gen_test(args) -> int:
    policy = GenPolicy(
        mode=args.mode,
        seed=args.seed,
        depth_cap=args.depth,
        stop_probability=args.stop,
        steps=tuple(s for s in (args.steps or "").split(",") if s.strip()),
        weights={**GenPolicy().weights, **_weights(args.weights)},
    )
    if args.kind == "eco":
        if args.sut:
            sut = _system(args.sut)
            ins, outs = sut.inputs, sut.outputs
        else:
            ins, outs = set((args.inputs or "").split()), set((args.outputs or "").split())
        env = _system(args.env)
        if args.mode == "exhaustive":
            tests = eco_suite(env, ins, outs, args.depth)
        else:
            tests = iter([gen_eco_test(env, ins, outs, policy)])
    else:
        if not args.spec:
            raise LtsError("cioco tests need --spec")
        s, e = _system(args.spec), _system(args.env)
        if args.mode == "exhaustive":
            tests = combined_suite(s, e, args.depth)
        else:
            tests = iter([gen_combined_test(s, e, policy)])
    for k, t in enumerate(tests):
        if k >= args.limit:
            print(f"# stopped after {args.limit} tests")
            break
        if k:
            print(SEPARATOR)
        print(serialize_test_case(t), end="")
    return 0


def cmd_run_test(args) -> int:
    tests = _suite(args.test)
    for k, t in enumerate(tests):
        report = validate_test_case(t)
        if not report.ok:
            raise LtsError(f"test {k} is not a valid test case: " + "; ".join(report.violations))
    v = run_suite(tests, _system(args.impl))
    if v.passed:
        print(f"pass ({len(tests)} test{'s' if len(tests) != 1 else ''})")
        return 0
    run = v.failing_run
    print(f"fail (test {v.test_index})")
    print(f"run: {show_trace(run.trace)}")
    return 1


def cmd_otf(args) -> int:
    cfg = OtfConfig(max_steps=args.steps, seed=args.seed, weights={**OtfConfig().weights, **_weights(args.weights)})
    adapter = simulate_adapter(_system(args.sut), args.seed, args.input_wins)
    if args.kind == "eco":
        log = otf_eco(adapter, _system(args.env), cfg)
    elif args.kind == "uioco":
        log = otf_uioco(adapter, _system(args.spec), cfg)
    else:
        log = otf_cioco(adapter, _system(args.spec), _system(args.env), cfg)
    print(log.text(), end="")
    if log.reason:
        print(f"# {log.reason}")
    return {"PASS": 0, "FAIL": 1}.get(log.verdict, 2)


def cmd_fixtures(args) -> int:
    if args.action == "list":
        for n in fixtures.names():
            print(n)
        return 0
    if not args.name:
        raise LtsError("fixtures show needs a name")
    print(fixtures.text(args.name), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="compotest", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the well-formedness of a system")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compose", help="print the parallel composition")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("check-uioco", help="decide impl uioco spec")
    p.add_argument("impl")
    p.add_argument("spec")
    p.set_defaults(func=cmd_check_uioco)

    for name in ("check-eco", "check-ma"):
        p = sub.add_parser(name, help="decide environmental conformance (mutual acceptance)")
        p.add_argument("left")
        p.add_argument("right")
        p.set_defaults(func=cmd_check_eco)

    p = sub.add_parser("check-utrace-closed", help="decide whether every trace is a utrace")
    p.add_argument("file")
    p.set_defaults(func=cmd_check_utrace_closed)

    p = sub.add_parser("gen-test", help="generate eco or combined test cases")
    p.add_argument("kind", choices=["eco", "cioco"])
    p.add_argument("--env", required=True)
    p.add_argument("--spec", help="component specification (cioco)")
    p.add_argument("--sut", help="system whose alphabet the SUT has (eco)")
    p.add_argument("--inputs", help="SUT inputs, space separated (eco)")
    p.add_argument("--outputs", help="SUT outputs, space separated (eco)")
    p.add_argument("--mode", choices=["random", "exhaustive", "directed"], default="random")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--stop", type=float, default=0.2, help="stop probability per node (random)")
    p.add_argument("--steps", help="comma separated steps CASE[:label][>branch] (directed)")
    p.add_argument("--weights", help="case weights, e.g. B=1,C=1,D=1,E=0.1")
    p.add_argument("--limit", type=int, default=1000, help="max tests printed (exhaustive)")
    p.set_defaults(func=cmd_gen_test)

    p = sub.add_parser("run-test", help="execute a test case or suite against an implementation")
    p.add_argument("test")
    p.add_argument("impl")
    p.set_defaults(func=cmd_run_test)

    p = sub.add_parser("otf", help="on-the-fly testing of a simulated SUT")
    p.add_argument("kind", choices=["eco", "uioco", "cioco"])
    p.add_argument("--sut", required=True)
    p.add_argument("--spec")
    p.add_argument("--env")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--weights")
    p.add_argument("--input-wins", type=float, default=0.5, help="probability an input beats a pending output")
    p.set_defaults(func=cmd_otf)

    p = sub.add_parser("fixtures", help="list or print the shipped example systems")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "otf":
        need = {"eco": ["env"], "uioco": ["spec"], "cioco": ["spec", "env"]}[args.kind]
        missing = [f"--{n}" for n in need if getattr(args, n) is None]
        if missing:
            print(f"compotest: otf {args.kind} needs {' '.join(missing)}", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except (LtsError, OSError, KeyError, ValueError) as exc:
        print(f"compotest: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
