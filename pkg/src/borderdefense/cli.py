"""
Command-line frontend.

    borderdefense solve SCENARIO
    borderdefense enumerate SCENARIO
    borderdefense simulate SCENARIO [--pursuer-policy P] [--evader-policy E]
                          [--out traj.csv] [--events-out events.json] [--plot fig.png]
    borderdefense verify SCENARIO [--samples N] [--seed S] [--out report.json]
    borderdefense oracle SCENARIO [--resolution R]

Exit codes: 0 ok, 1 input error, 2 outside the pursuers' winning region,
3 verification failure. Agents are numbered from 1 in all input and output.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from typing import Dict, List, Optional, Tuple

from .assignment import (AssignmentError, NoFeasibleAssignmentError, enumerate_assignments, game_of_kind,
                         optimal_assignment)
from .oracle import compare_assignment
from .scenario import (ScenarioError, assignment_to_dict, events_to_list, kind_to_dict, load_scenario,
                       write_trajectory_csv)
from .sim import EngagementTimeout, SimulationError, run_engagement
from .strategy import (FIXED_ASSIGNMENT, FIXED_HEADING, POLICY_KINDS, WRONG_LOWEST_POINT, PolicyError,
                       TeamPolicy, current_engagement)
from .value import TooFewAssignmentsError, dispersal_gap
from .verification import verify_around

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_OUTSIDE = 2
EXIT_VERIFY = 3

POLICY_HELP = ("optimal | pure-pursuit | straight-to-border | reassign | fixed-assignment:REF | "
               "wrong-lowest-point:REF | fixed-heading:DEG,DEG,...  where REF is an assignment index "
               "or a matching like E1=P1,E2=P2+P3")


class InputError(ValueError):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def _finite(v: float) -> Optional[float]:
    return v if math.isfinite(v) else None


_PAIR_RE = re.compile(r"^E(\d+)=P(\d+)(?:\+P(\d+))?$")


def _parse_matching(text: str, n: int, m: int) -> Dict[int, Tuple[int, ...]]:
    out = {}
    for part in text.split(","):
        mt = _PAIR_RE.match(part.strip())
        if mt is None:
            raise InputError(f"cannot parse matching entry {part!r} (expected e.g. E1=P2 or E1=P1+P3)")
        j = int(mt.group(1)) - 1
        ps = tuple(int(g) - 1 for g in mt.groups()[1:] if g is not None)
        if not 0 <= j < m or any(not 0 <= i < n for i in ps):
            raise InputError(f"matching entry {part!r} names an agent that does not exist")
        if j in out:
            raise InputError(f"evader E{j + 1} matched twice")
        out[j] = ps
    used = [i for ps in out.values() for i in ps]
    if len(used) != len(set(used)):
        raise InputError("a pursuer is matched to more than one evader")
    if set(out) != set(range(m)):
        raise InputError("the matching must cover every evader")
    return out


def parse_policy(text: str, n_team: int, n: int, m: int) -> TeamPolicy:
    """Policy name from the command line; ``n_team`` is the size of the team it steers."""
    name, _, arg = text.partition(":")
    if name not in POLICY_KINDS:
        raise InputError(f"unknown policy {name!r}; valid: {', '.join(POLICY_KINDS)}")
    if name in (FIXED_ASSIGNMENT, WRONG_LOWEST_POINT):
        if not arg:
            raise InputError(f"{name} needs an assignment, e.g. {name}:1 or {name}:E1=P1,E2=P2")
        ref = int(arg) if arg.isdigit() else _parse_matching(arg, n, m)
        return TeamPolicy(name, assignment=ref)
    if name == FIXED_HEADING:
        try:
            degs = [float(s) for s in arg.split(",")] if arg else []
        except ValueError:
            raise InputError(f"fixed-heading angles must be numbers, got {arg!r}") from None
        if len(degs) != n_team:
            raise InputError(f"fixed-heading needs {n_team} angles (degrees), got {len(degs)}")
        return TeamPolicy(name, angles=tuple(math.radians(d) for d in degs))
    if arg:
        raise InputError(f"policy {name!r} takes no argument")
    return TeamPolicy(name)


# ---------------------------------------------------------------------------
# commands

def solve_report(scenario) -> Tuple[dict, int]:
    st, sp = scenario.state, scenario.speeds
    allas = enumerate_assignments(st, sp)
    report = {"assignments": [assignment_to_dict(a) for a in allas if a.feasible],
              "game_of_kind": kind_to_dict(game_of_kind(st, sp))}
    try:
        best = optimal_assignment(st, sp)
    except NoFeasibleAssignmentError:
        report.update(optimal=None, value=None, captures=[], dispersal_gap=None)
        return report, EXIT_OUTSIDE
    try:
        gap = dispersal_gap(st, sp)
    except TooFewAssignmentsError:
        gap = None
    report.update(optimal=best.index, value=st.frozen_payoff() + best.value,
                  captures=assignment_to_dict(best)["plans"], dispersal_gap=gap)
    return report, EXIT_OK


def cmd_solve(args) -> int:
    report, code = solve_report(load_scenario(args.scenario))
    print(_dump(report))
    return code


def cmd_enumerate(args) -> int:
    sc = load_scenario(args.scenario)
    allas = enumerate_assignments(sc.state, sc.speeds)
    print(_dump({"assignments": [assignment_to_dict(a) for a in sorted(allas, key=lambda a: a.index)]}))
    return EXIT_OK


def cmd_simulate(args) -> int:
    sc = load_scenario(args.scenario)
    st, sp = sc.state, sc.speeds
    n, m = st.n_pursuers, st.n_evaders
    pp = parse_policy(args.pursuer_policy, n, n, m)
    ep = parse_policy(args.evader_policy, m, n, m)
    try:
        v = st.frozen_payoff() + optimal_assignment(st, sp).value
    except NoFeasibleAssignmentError:
        v = math.nan
        if not args.allow_partial:
            print("state is outside the pursuers' winning region; rerun with --allow-partial", file=sys.stderr)
            return EXIT_OUTSIDE
    code = EXIT_OK
    try:
        log = run_engagement(sc, pp, ep, allow_partial=args.allow_partial, sample_every=args.sample_every)
    except EngagementTimeout as exc:
        print(f"engagement did not finish: {exc}", file=sys.stderr)
        log, code = exc.log, EXIT_INPUT
    if args.out:
        write_trajectory_csv(log, n, m, args.out)
    if args.events_out:
        with open(args.events_out, "w") as fh:
            fh.write(_dump(events_to_list(log)))
    if args.plot:
        from .plotting import plot_engagement
        plot_engagement(sc, log, args.plot, title=f"{args.pursuer_policy} vs {args.evader_policy}")
    diff = log.payoff - v
    print(f"payoff={log.payoff!r} terminal_time={log.terminal_time!r} V={v!r} payoff-V={diff!r}")
    return code


def cmd_verify(args) -> int:
    sc = load_scenario(args.scenario)
    seed = sc.seed if args.seed is None else args.seed
    rep = verify_around(sc.state, sc.speeds, args.samples, seed)
    out = rep.as_dict()
    out["seed"] = seed
    text = _dump(out)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    print(text)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_oracle(args) -> int:
    if not args.resolution > 0:
        raise InputError("--resolution must be > 0")
    sc = load_scenario(args.scenario)
    best = current_engagement(sc.state, sc.speeds)
    cmp = compare_assignment(sc.state, sc.speeds, best, args.resolution)
    tol = 2.0 * args.resolution
    rows = [{"evader": j + 1, "pursuers": [i + 1 for i in r["pursuers"]], "mode": r["mode"],
             "closed_form": r["closed_form"], "grid": r["grid"], "error": r["error"],
             "ok": r["error"] <= tol} for j, r in sorted(cmp.items())]
    ok = all(r["ok"] for r in rows)
    print(_dump({"resolution": args.resolution, "tolerance": tol, "evaders": rows, "passed": ok}))
    return EXIT_OK if ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="borderdefense", description="Multi-agent border defense games.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="value, optimal assignment and capture points")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("enumerate", help="every candidate assignment in structural order")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("simulate", help="run one engagement")
    p.add_argument("scenario")
    p.add_argument("--pursuer-policy", default="optimal", help=POLICY_HELP)
    p.add_argument("--evader-policy", default="optimal", help=POLICY_HELP)
    p.add_argument("--out", help="trajectory CSV")
    p.add_argument("--events-out", help="events JSON")
    p.add_argument("--plot", help="PNG figure of the engagement")
    p.add_argument("--sample-every", type=int, default=1, help="record every k-th step")
    p.add_argument("--allow-partial", action="store_true",
                   help="simulate states outside the winning region with the best partial assignment")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="randomized HJI, gradient and identity checks")
    p.add_argument("scenario")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=None, help="defaults to the scenario's seed")
    p.add_argument("--out", help="also write the report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="closed-form capture heights vs grid brute force")
    p.add_argument("scenario")
    p.add_argument("--resolution", type=float, default=1e-3)
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, InputError, PolicyError, AssignmentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
