"""Command-line interface: ATE calculators, power, sample sizes, the
elicitation wizard, scenario runs, and the HTTP server.

Exit codes: 0 success, 1 computation/validation failure, 2 usage error.
The wizard reads stdin and writes stdout only, so it is scriptable.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

from . import elicitation as el
from .design import (
    BinaryOutcome,
    ContinuousOutcome,
    DesignError,
    diagnostics_fixed,
    diagnostics_mixture,
    required_n,
    se_conservative_binary,
)
from .effects import (
    BinaryTypeModel,
    Discrete,
    EffectDistribution,
    EffectModelError,
    PlausibleRange,
    binary_to_distribution,
    binary_type_ate,
    from_plausible_range,
    mixture_mean,
    with_null_mass,
)
from .scenarios import ScenarioError, list_scenarios, run_all, run_scenario

COMPUTE_FAILURE = 1
USAGE_ERROR = 2


def _emit(args, doc: dict, table: str) -> None:
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(table)


def _parse_pair(text: str) -> tuple[float, float]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected 'lo,hi', got {text!r}")
    return float(parts[0]), float(parts[1])


# ---------------------------------------------------------------------------
# ate


def cmd_ate(args) -> int:
    if args.types:
        shares = [float(x) for x in args.types.split(",")]
        if len(shares) != 4:
            print("--types needs four comma-separated shares: always,saved,harmed,never",
                  file=sys.stderr)
            return USAGE_ERROR
        model = BinaryTypeModel(*shares)
        summary = binary_type_ate(model)
        dist = binary_to_distribution(model)
        doc = {
            "ate": summary.ate,
            "treat_rate": summary.treat_rate,
            "control_rate": summary.control_rate,
            "distribution": dist.to_json(),
        }
        table = (f"ate           {summary.ate:g}\n"
                 f"treat_rate    {summary.treat_rate:g}\n"
                 f"control_rate  {summary.control_rate:g}")
        _emit(args, doc, table)
        return 0

    if args.range:
        lo, hi = _parse_pair(args.range)
        base = from_plausible_range(PlausibleRange(lo, hi))
    elif args.balls:
        with open(args.balls) as fh:
            spec = json.load(fh)
        alloc = el.BallsAllocation(spec["bin_edges"], spec["balls"],
                                   spec.get("total_balls", sum(spec["balls"])))
        keep = [(v, b / alloc.total_balls)
                for v, b in zip(alloc.midpoints(), alloc.balls) if b > 0]
        base = Discrete([v for v, _ in keep], [m for _, m in keep])
    else:
        print("one of --range, --balls, or --types is required", file=sys.stderr)
        return USAGE_ERROR

    dist = with_null_mass(base, args.p_null)
    doc = {"ate": mixture_mean(dist), "distribution": dist.to_json()}
    _emit(args, doc, f"ate  {mixture_mean(dist):g}")
    return 0


# ---------------------------------------------------------------------------
# power


def cmd_power(args) -> int:
    if args.se is not None:
        se = args.se
    elif args.n_per_arm is not None:
        if not args.binary_conservative:
            print("--n-per-arm requires --binary-conservative", file=sys.stderr)
            return USAGE_ERROR
        se = se_conservative_binary(args.n_per_arm, args.n_per_arm)
    else:
        print("one of --se or --n-per-arm is required", file=sys.stderr)
        return USAGE_ERROR

    if args.dist:
        with open(args.dist) as fh:
            dist = EffectDistribution.from_json(json.load(fh))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            diag = diagnostics_mixture(dist, se, args.alpha, args.sides,
                                       draws=args.draws, seed=args.seed)
    else:
        if args.effect is None:
            print("one of --effect or --dist is required", file=sys.stderr)
            return USAGE_ERROR
        diag = diagnostics_fixed(args.effect, se, args.alpha, args.sides)

    doc = diag.to_json()
    exagg = f"{diag.exaggeration:g}" if diag.exaggeration is not None else "undefined"
    table = (f"power         {diag.power:g}\n"
             f"type_s        {diag.type_s:g}\n"
             f"exaggeration  {exagg}\n"
             f"se            {diag.se:g}\n"
             f"z_crit        {diag.z_crit:g}")
    _emit(args, doc, table)
    return 0


# ---------------------------------------------------------------------------
# solve-n


def cmd_solve_n(args) -> int:
    if args.sd is not None:
        outcome = ContinuousOutcome(args.sd)
    elif args.base_rate is not None:
        outcome = BinaryOutcome(base_rate=args.base_rate, conservative=False)
    else:
        outcome = BinaryOutcome(conservative=True)
    result = required_n(args.effect, outcome, args.alpha, args.sides,
                        args.target_power, args.allocation)
    doc = result.to_json()
    table = (f"n_treat         {result.n_treat}\n"
             f"n_control       {result.n_control}\n"
             f"n_total         {result.n_total}\n"
             f"achieved_power  {result.achieved_power:g}")
    _emit(args, doc, table)
    return 0


# ---------------------------------------------------------------------------
# elicit


_PROMPTS = {
    "context": ("population", "sample size estimate", "treatment", "control",
                "outcome measure", "analysis plan", "effect units"),
}


def _ask(prompt: str) -> str:
    print(prompt, flush=True)
    line = sys.stdin.readline()
    if not line:
        raise EOFError("input ended before the protocol finished")
    return line.strip()


def _wizard_step(session: el.ElicitationSession) -> el.ElicitationSession:
    stage = session.stage
    if stage == "context":
        answers = [_ask(f"context/{field}?") for field in _PROMPTS["context"]]
        ctx = el.StudyContext(
            population=answers[0], sample_size_estimate=int(answers[1]),
            treatment=answers[2], control=answers[3], outcome_measure=answers[4],
            analysis_plan=answers[5], effect_units=answers[6],
        )
        return el.advance(session, ctx)
    if stage == "ate_pre":
        return el.advance(session, float(_ask(
            "average effect if the treatment works as intended?")))
    if stage == "extremes":
        hi = float(_ask("largest individual effect?"))
        hi_who = _ask("who has that largest effect?")
        hi_tail = float(_ask("share of the sample at the largest effect or beyond?"))
        lo = float(_ask("smallest individual effect?"))
        lo_who = _ask("who has that smallest effect?")
        lo_tail = float(_ask("share of the sample at the smallest effect or beyond?"))
        return el.advance(session, (
            el.ExtremeJudgment("largest", hi, hi_who, tail_share=hi_tail),
            el.ExtremeJudgment("smallest", lo, lo_who, tail_share=lo_tail),
        ))
    if stage == "allocation":
        mode = _ask("allocation mode: 'balls' or 'split'?")
        if mode == "balls":
            edges = [float(x) for x in _ask("bin edges (comma-separated)?").split(",")]
            balls = [int(x) for x in _ask("balls per bin (comma-separated)?").split(",")]
            payload = el.BallsAllocation(edges, balls, total_balls=sum(balls))
        else:
            lower = float(_ask("share between the smallest effect and the midpoint?"))
            payload = el.MidpointSplit(lower, 1.0 - lower)
        return el.advance(session, payload)
    if stage == "null_share":
        return el.advance(session, float(_ask(
            "share of pure nulls (treatment never activates)? "
            "[defaults: 0.5 direct, 0.9 marketing]")))
    if stage == "derived":
        report = el.comparison_report(session)
        print(report.narrative)
        print(f"initial estimate {report.ate_pre:g}  vs  implied average {report.ate_post:g}")
        return el.advance(session, _ask("your reflection on the comparison?"))
    raise el.ElicitationError(f"unexpected stage {stage!r}")


def cmd_elicit(args) -> int:
    if args.replay:
        with open(args.replay) as fh:
            session = el.session_from_json(json.load(fh))
        recomputed = el.derive_ate_post(session)
        stored = session.ate_post
        doc = {"ate_post": recomputed, "stored_ate_post": stored,
               "reproduced": stored is not None and recomputed == stored}
        print(json.dumps(doc, indent=2))
        return 0 if doc["reproduced"] else COMPUTE_FAILURE

    path = args.session_file
    if path and _exists(path):
        with open(path) as fh:
            session = el.session_from_json(json.load(fh))
        print(f"resuming session {session.id} at stage {session.stage}")
    else:
        session = el.new_session()

    try:
        while session.stage != "compared":
            session = _wizard_step(session)
            if path:
                with open(path, "w") as fh:
                    json.dump(el.session_to_json(session), fh, indent=2)
    except EOFError:
        if path:
            print(f"interrupted at stage {session.stage}; resume with the same "
                  f"--session-file", file=sys.stderr)
            return 0
        raise
    print(json.dumps({"id": session.id, "stage": session.stage,
                      "ate_pre": session.ate_pre, "ate_post": session.ate_post}, indent=2))
    return 0


def _exists(path: str) -> bool:
    import os
    return os.path.exists(path)


# ---------------------------------------------------------------------------
# scenario / serve


def cmd_scenario(args) -> int:
    if args.name == "all":
        outcomes = run_all()
    else:
        try:
            outcomes = [run_scenario(args.name)]
        except ScenarioError:
            print(f"unknown scenario {args.name!r}; known: {', '.join(list_scenarios())}",
                  file=sys.stderr)
            return COMPUTE_FAILURE
    if args.format == "json":
        print(json.dumps([o.to_json() for o in outcomes], indent=2))
    else:
        for o in outcomes:
            print(o.table())
    return 0 if all(o.passed for o in outcomes) else COMPUTE_FAILURE


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(args.store), host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="effectmix",
        description="Hypothesize distributions of treatment effects and derive "
                    "the design consequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=("json", "table"), default="table")

    p = sub.add_parser("ate", help="implied average effect from a range, balls file, "
                                   "or binary type shares")
    p.add_argument("--range", help="'lo,hi' plausible range of individual effects")
    p.add_argument("--balls", help="JSON file with bin_edges, balls, total_balls")
    p.add_argument("--types", help="'always,saved,harmed,never' shares")
    p.add_argument("--p-null", type=float, default=0.0, dest="p_null")
    add_format(p)
    p.set_defaults(func=cmd_ate)

    p = sub.add_parser("power", help="power, sign-error, and exaggeration diagnostics")
    p.add_argument("--effect", type=float)
    p.add_argument("--se", type=float)
    p.add_argument("--n-per-arm", type=int, dest="n_per_arm")
    p.add_argument("--binary-conservative", action="store_true",
                   dest="binary_conservative")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--sides", choices=("two_sided", "one_sided"), default="two_sided")
    p.add_argument("--dist", help="distribution JSON file (Monte Carlo path)")
    p.add_argument("--draws", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    add_format(p)
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("solve-n", help="smallest arm sizes reaching a target power")
    p.add_argument("--effect", type=float, required=True)
    p.add_argument("--target-power", type=float, default=0.8, dest="target_power")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--sides", choices=("two_sided", "one_sided"), default="two_sided")
    p.add_argument("--sd", type=float, help="continuous outcome residual SD")
    p.add_argument("--base-rate", type=float, dest="base_rate",
                   help="binary outcome at this rate instead of the conservative bound")
    p.add_argument("--allocation", type=float, default=1.0)
    add_format(p)
    p.set_defaults(func=cmd_solve_n)

    p = sub.add_parser("elicit", help="guided protocol wizard (stdin/stdout)")
    p.add_argument("--replay", help="recompute the implied average from a saved session")
    p.add_argument("--session-file", dest="session_file",
                   help="save after each stage; resumable")
    p.set_defaults(func=cmd_elicit)

    p = sub.add_parser("scenario", help="run packaged worked-example scenarios")
    psub = p.add_subparsers(dest="scenario_command", required=True)
    prun = psub.add_parser("run")
    prun.add_argument("name", help="scenario name or 'all'")
    add_format(prun)
    prun.set_defaults(func=cmd_scenario)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store", help="session store directory")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EffectModelError, DesignError, el.ElicitationError, ValueError,
            OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return COMPUTE_FAILURE


if __name__ == "__main__":
    sys.exit(main())
