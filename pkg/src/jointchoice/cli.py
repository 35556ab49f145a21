"""``jointchoice`` command line.

Exit codes: 0 pass / feasible / success, 1 fail / infeasible, 2 usage,
file or precondition error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import corpus, decompose, graphs, io, moebius, oracle
from .core import ChoiceError, JointChoiceRule, marginal_rules, split_labels

REPORT_VERSION = 1


class UsageError(ChoiceError):
    pass


class Report:
    def __init__(self, command: str):
        self.command = command
        self.verdicts: dict[str, str] = {}
        self.witnesses: list[dict] = []
        self.outputs: dict[str, str] = {}
        self.messages: list[str] = []
        self.data = None
        self.exit_code = 0
        self._start = time.perf_counter()

    def axiom(self, report: moebius.AxiomReport, name: str | None = None):
        name = name or report.name
        self.verdicts[name] = report.verdict
        self.witnesses.extend({"check": name, **w.to_dict()} for w in report.witnesses)
        if not report.passed:
            self.exit_code = max(self.exit_code, 1)

    def verdict(self, name: str, value: str, ok: bool):
        self.verdicts[name] = value
        if not ok:
            self.exit_code = max(self.exit_code, 1)

    def to_dict(self) -> dict:
        out = {"report_version": REPORT_VERSION, "command": self.command,
               "exit_code": self.exit_code, "verdicts": self.verdicts,
               "witnesses": self.witnesses, "outputs": self.outputs,
               "timing": {"seconds": round(time.perf_counter() - self._start, 6)}}
        if self.messages:
            out["messages"] = self.messages
        if self.data is not None:
            out["data"] = self.data
        return out

    def to_text(self) -> str:
        lines = [f"{k}: {v}" for k, v in self.verdicts.items()]
        for w in self.witnesses:
            where = ", ".join(f"{k}={_fmt_labels(v)}" for k, v in w["where"].items())
            lines.append(f"  witness [{w['check']}] {w['identity']} at {where}: {w['lhs']} vs {w['rhs']}")
        lines.extend(self.messages)
        lines.extend(f"wrote {k}: {v}" for k, v in self.outputs.items())
        return "\n".join(lines)


def _fmt_labels(v):
    return "{" + ",".join(map(str, v)) + "}" if isinstance(v, list) else str(v)


# -- input helpers --------------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load_any(path: str):
    """A joint dataset, or a single-agent rule when the file has ``menus``."""
    text = _read(path)
    try:
        single = "menus" in json.loads(text)
    except (json.JSONDecodeError, TypeError):
        single = False
    return io.parse_choice_rule(text) if single else io.parse_dataset(text)


def _load_joint(path: str) -> JointChoiceRule:
    return io.parse_dataset(_read(path))


def _emit_artifact(args, report: Report, name: str, text: str, as_json):
    """Write to ``--out`` if given, else attach to the report."""
    if args.out:
        Path(args.out).write_text(text)
        report.outputs[name] = args.out
    elif args.format == "json":
        report.data = as_json
    else:
        report.messages.append(text.rstrip("\n"))


def _tracer(args):
    if not args.trace:
        return None

    def trace(event):
        print(json.dumps(event, sort_keys=True), file=sys.stderr, flush=True)

    return trace


# -- commands -------------------------------------------------------------------

def cmd_check(args, report: Report):
    rule = _load_joint(args.file)
    if not rule.complete:
        report.axiom(moebius.check_marginality(rule, allow_partial=True), "marginality")
        report.verdicts["recursivity"] = "not applicable (partial rule)"
        report.verdicts["non-negativity"] = "not applicable (partial rule)"
        return
    marginality = moebius.check_marginality(rule)
    report.axiom(marginality, "marginality")
    bm = moebius.bm_joint(rule)
    if marginality.passed:
        report.axiom(moebius.check_recursivity(bm), "recursivity")
    else:
        report.verdict("recursivity", "fail (marginality fails)", False)
    report.axiom(moebius.check_nonnegativity(bm), "non-negativity")


def cmd_bm(args, report: Report):
    rule = _load_joint(args.file)
    rule.require_complete()
    bm = moebius.bm_joint(rule)
    if args.agent == "joint":
        payload = moebius.bm_to_dict(bm)
    else:
        agent = int(args.agent)
        payload = moebius.marginal_to_dict(rule.x_set if agent == 1 else rule.y_set,
                                           moebius.bm_marginal(rule, agent))
    _emit_artifact(args, report, "polynomials", json.dumps(payload, indent=2) + "\n", payload)
    if args.graphs_out:
        out = Path(args.graphs_out)
        out.mkdir(parents=True, exist_ok=True)
        for lead in (1, 2):
            system = graphs.build_system(bm, lead)
            path = out / f"lead{lead}_marginal.dot"
            path.write_text(system.marginal.to_dot(f"lead{lead}_marginal"))
            (out / f"lead{lead}_system.json").write_text(json.dumps(system.to_dict(), indent=2) + "\n")
            g = system.marginal.ground
            for (x, a), graph in system.conditionals.items():
                if graph.is_zero():
                    continue
                stem = f"lead{lead}_cond_{g.labels[x]}_{'-'.join(g.names(a))}"
                (out / f"{stem}.dot").write_text(graph.to_dot(stem))
        report.outputs["graphs"] = str(out)
    report.verdicts["polynomials"] = "computed"


def cmd_decompose(args, report: Report):
    rule = _load_any(args.file)
    trace = _tracer(args)
    if isinstance(rule, JointChoiceRule):
        measure = decompose.decompose_joint_rule(rule, trace=trace)
    else:
        measure = decompose.decompose_choice_rule(rule, trace=trace)
    negative = sum(1 for w in measure.weights.values() if w < 0)
    report.verdicts["decomposition"] = "success"
    report.messages.append(f"{len(measure.weights)} orders in support, {negative} with negative weight")
    _emit_artifact(args, report, "measure", io.serialize(measure), io.measure_to_dict(measure))


def cmd_rum(args, report: Report):
    rule = _load_joint(args.file)
    lead = args.lead if args.lead == "auto" else int(args.lead)
    measure = decompose.recover_separable_rum(rule, lead=lead, trace=_tracer(args), cap=args.cap)
    report.verdicts["separable-rum"] = "recovered"
    _emit_artifact(args, report, "measure", io.serialize(measure), io.measure_to_dict(measure))


def cmd_unique(args, report: Report):
    rule = _load_joint(args.file)
    rule.require_complete()
    agent = int(args.agent)
    ground = rule.x_set if agent == 1 else rule.y_set
    check = graphs.unique_rum_check(moebius.bm_marginal(rule, agent), ground, cap=args.cap)
    report.verdict("unique-rum-check", check.verdict, check.passed)
    report.data = {"supported_paths": [[ground.labels[i] for i in p.ranking] for p in check.paths],
                   "certificate": [{"order": [ground.labels[i] for i in p.ranking],
                                    "edge": {"x": ground.labels[x], "A": ground.names(a)}}
                                   for p, (x, a) in check.certificate.items()],
                   "unresolved": [[ground.labels[i] for i in p.ranking] for p in check.unresolved]}
    if args.brute_force:
        p1, p2 = marginal_rules(rule)
        result = oracle.brute_force_unique_rum(p1 if agent == 1 else p2)
        report.verdict("brute-force", result.verdict, result.unique)
    if args.format == "text":
        for p in check.unresolved:
            report.messages.append("no certifying edge: " + " > ".join(ground.labels[i] for i in p.ranking))


def _parse_budget(rule: JointChoiceRule, text: str) -> tuple[int, int]:
    try:
        left, right = text.split(":")
    except ValueError:
        raise UsageError(f"budget {text!r} must look like 'a,b:x,y'") from None
    return rule.x_set.mask(split_labels(left)), rule.y_set.mask(split_labels(right))


def _feasibility(args, report: Report, name: str, result: oracle.FeasibilityResult):
    report.verdict(name, result.verdict, result.feasible)
    report.messages.append(f"{result.n_variables} variables, {result.n_constraints} constraints, "
                           f"phase-1 objective {result.phase1_objective}")
    if result.feasible:
        _emit_artifact(args, report, "certificate", io.serialize(result.certificate),
                       io.measure_to_dict(result.certificate))


def cmd_separable(args, report: Report):
    rule = _load_joint(args.file)
    budgets = [_parse_budget(rule, b) for b in args.budgets] if args.budgets else None
    result = oracle.lp_stochastic_separability(rule, budgets, cap=args.cap)
    _feasibility(args, report, "stochastic-separability", result)


def cmd_sep_rum(args, report: Report):
    rule = _load_joint(args.file)
    _feasibility(args, report, "separable-rum", oracle.lp_separable_rum(rule, cap=args.cap))


def cmd_gen(args, report: Report):
    spec = corpus.GeneratorSpec(args.seed, args.nx, args.ny, args.k, args.mode)
    generated = corpus.generate(spec)
    _emit_artifact(args, report, "rule", io.serialize(generated.rule), io.rule_to_dict(generated.rule))
    if args.measure_out and generated.measure is not None:
        Path(args.measure_out).write_text(io.serialize(generated.measure))
        report.outputs["measure"] = args.measure_out
    report.verdicts["generate"] = "success"


def cmd_verify(args, report: Report):
    rule = _load_any(args.rule)
    if isinstance(rule, JointChoiceRule):
        measure = io.parse_measure(_read(args.measure), rule.x_set, rule.y_set)
    else:
        measure = io.parse_measure(_read(args.measure), rule.ground)
    report.axiom(oracle.verify_measure(rule, measure), "verify")


COMMANDS = {"check": cmd_check, "bm": cmd_bm, "decompose": cmd_decompose, "rum": cmd_rum,
            "unique": cmd_unique, "separable": cmd_separable, "sep-rum": cmd_sep_rum,
            "gen": cmd_gen, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="write the main artifact here")
    common.add_argument("--trace", action="store_true", help="stream algorithm steps to stderr as JSON lines")
    common.add_argument("--cap", type=int, default=None, help="size cap for enumerations")

    parser = argparse.ArgumentParser(prog="jointchoice", description="Analyse random joint choice data.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    add("check", "marginality, recursivity and non-negativity").add_argument("file")
    p = add("bm", "dump Block-Marschak polynomials")
    p.add_argument("file")
    p.add_argument("--agent", choices=("joint", "1", "2"), default="joint")
    p.add_argument("--graphs-out", help="directory for DOT/JSON graphs of both marginal graph systems")
    add("decompose", "signed measure over orders or order pairs").add_argument("file")
    p = add("rum", "recover a separable random utility measure")
    p.add_argument("file")
    p.add_argument("--lead", choices=("auto", "1", "2"), default="auto")
    p = add("unique", "edge-uniqueness test on one marginal")
    p.add_argument("file")
    p.add_argument("--agent", choices=("1", "2"), default="1")
    p.add_argument("--brute-force", action="store_true", help="also run the exhaustive LP test")
    p = add("separable", "LP test for stochastic separability")
    p.add_argument("file")
    p.add_argument("--budgets", nargs="+", metavar="A:B", help="budget pairs such as 'a,b:x,y'")
    add("sep-rum", "LP test for separable random utility").add_argument("file")
    p = add("gen", "generate a random rule")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nx", type=int, default=3)
    p.add_argument("--ny", type=int, default=3)
    p.add_argument("-k", type=int, default=3, help="number of order pairs in the generating measure")
    p.add_argument("--mode", choices=corpus.MODES, default="probability")
    p.add_argument("--measure-out", help="also write the generating measure")
    p = add("verify", "does a measure induce a rule?")
    p.add_argument("rule")
    p.add_argument("measure")
    return parser


_DEFAULT_CAPS = {"rum": graphs.DEFAULT_PATH_CAP, "unique": graphs.DEFAULT_PATH_CAP,
                 "separable": oracle.DEFAULT_SEPARABILITY_CAP, "sep-rum": oracle.DEFAULT_RUM_CAP}


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.cap is None:
        args.cap = _DEFAULT_CAPS.get(args.command, 0)
    report = Report(args.command)
    try:
        COMMANDS[args.command](args, report)
    except ChoiceError as exc:
        report.exit_code = 2
        report.verdicts["error"] = type(exc).__name__
        report.messages.append(f"error: {exc}")
    except ValueError as exc:
        report.exit_code = 2
        report.verdicts["error"] = "ValueError"
        report.messages.append(f"error: {exc}")
    if args.format == "json":
        print(json.dumps(report.to_dict(), indent=2), file=stdout)
    else:
        print(report.to_text(), file=stdout)
    return report.exit_code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
