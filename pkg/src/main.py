"""
CLI 入口
Command-line entry point

子命令：check, dualize, solve, oracle, gap, robustify, selftest, batch, schema
报告写到 stdout（json 或 text），日志写到 stderr，退出码即报告中的 exitCode。

使用方法：
python -m src.main gap problems/quartic_pair.json
python -m src.main solve --fractional problems/frac_unattained.json --format text
python -m src.main batch problems --command gap --jobs 4
"""

from __future__ import annotations
import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence, Tuple

from .config import Settings, setup_logging
from .exceptions import InputError, SosDualError
from .polycore import from_terms, to_text
from .problemfile import load
from .runner import COMMANDS, DualityPipeline, RunFlags, exit_code_for, run_batch
from .schemas import RunReport, schema_for

logger = logging.getLogger(__name__)


def _parse_box(text: str) -> Tuple[float, float]:
    """--box lo,hi"""
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from e
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"box must satisfy lo < hi, got {text!r}")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="solver feasibility/gap tolerance and oracle cpTol")
    common.add_argument("--max-iters", type=int, help="interior-point iteration limit")
    common.add_argument("--box", type=_parse_box, help="oracle search box 'lo,hi'")
    common.add_argument("--seed", type=int, help="oracle grid jitter / sampling seed")
    common.add_argument("--format", choices=("json", "text"), help="report format")
    common.add_argument("--dump-sdp", metavar="PATH", help="write the assembled program in sparse text form")
    common.add_argument("--emit-cert", metavar="PATH", help="write the certificate as JSON")
    common.add_argument("--config", metavar="YML", help="configuration file (default configs/default.yml)")
    common.add_argument("--log-level", help="DEBUG / INFO / WARNING / ERROR")

    forms = argparse.ArgumentParser(add_help=False)
    g = forms.add_mutually_exclusive_group()
    g.add_argument("--quadratic", action="store_true", help="single LMI dual (all degrees <= 2)")
    g.add_argument("--fractional", action="store_true", help="fractional SOS dual")
    g.add_argument("--linear-fractional", action="store_true", help="LP dual of an affine fractional program")
    g.add_argument("--robust", action="store_true", help="dual of the robust counterpart")

    parser = argparse.ArgumentParser(prog="sosdual", description="SOS-convex minimax duality toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="certify SOS / SOS-convexity of the problem data")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--sos", action="store_true", help="SOS membership of each objective")
    mode.add_argument("--sos-convex", action="store_true", help="SOS-convexity of every polynomial (default)")
    p.add_argument("file")

    p = sub.add_parser("dualize", parents=[common, forms], help="build the dual program")
    p.add_argument("--out", metavar="PATH", help="sparse text dump of the program")
    p.add_argument("file")

    for name, text in (("solve", "solve the dual and extract a certificate"), ("gap", "compare dual and primal values")):
        p = sub.add_parser(name, parents=[common, forms], help=text)
        p.add_argument("file")

    p = sub.add_parser("oracle", parents=[common], help="solve the primal problem")
    p.add_argument("file")

    p = sub.add_parser("robustify", parents=[common], help="write the robust counterpart as a minimax file")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("file")

    sub.add_parser("selftest", parents=[common], help="run the bundled problems")

    p = sub.add_parser("batch", parents=[common, forms], help="run one command over every file in a directory")
    p.add_argument("--command", dest="batch_command", choices=COMMANDS, default="gap")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("directory")

    p = sub.add_parser("schema", help="print a JSON schema")
    p.add_argument("which", choices=("problem", "report"))
    return parser


def _flags(args: argparse.Namespace) -> RunFlags:
    return RunFlags(
        sos=getattr(args, "sos", False),
        quadratic=getattr(args, "quadratic", False),
        fractional=getattr(args, "fractional", False),
        linear_fractional=getattr(args, "linear_fractional", False),
        robust=getattr(args, "robust", False),
        out=getattr(args, "out", None),
        dump_sdp=getattr(args, "dump_sdp", None),
        emit_cert=getattr(args, "emit_cert", None),
    )


def _settings(args: argparse.Namespace) -> Settings:
    settings = Settings.load(args.config).with_overrides(
        tol=args.tol, max_iters=args.max_iters, box=args.box, seed=args.seed
    )
    if args.log_level:
        settings.logging.level = args.log_level
    if args.format:
        settings.report.format = args.format
    return settings


def _scalar(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, allow_nan=False)
    return str(v)


def render_text(payload: dict) -> str:
    """text 格式：键值表 + 明细表（checks），证书与多项式简写"""
    import pandas as pd

    head = {k: v for k, v in payload.items() if k not in ("checks", "certificate", "oracle", "problem", "timings")}
    lines = [pd.Series({k: _scalar(v) for k, v in head.items()}).to_string()]
    cert = payload.get("certificate")
    if cert:
        lines.append("")
        lines.append(f"certificate: delta={cert['delta']} lambda={cert['lambda']} mu={cert['mu']!r}")
        lines.append(f"  identityResidual={cert['identityResidual']!r} minEigenvalue={cert['minEigenvalue']!r}")
    oracle = payload.get("oracle")
    if oracle:
        lines.append("")
        lines.append(
            f"oracle: {oracle['status']} value={oracle.get('value')!r} minimizer={oracle['minimizer']} "
            f"boundaryFlag={oracle['boundaryFlag']}"
        )
    problem = payload.get("problem")
    if problem:
        n = problem["dimension"]
        lines.append("")
        for key in ("objectives", "constraints"):
            for k, terms in enumerate(problem.get(key, [])):
                lines.append(f"{key}.{k}: {to_text(from_terms(n, terms))}")
    checks = payload.get("checks")
    if checks:
        flat = [{k: _scalar(v) for k, v in row.items() if k != "certificate"} for row in checks]
        lines.append("")
        lines.append(pd.DataFrame(flat).to_string(index=False))
    if payload.get("timings"):
        lines.append("")
        lines.append("timings: " + ", ".join(f"{k}={v:.3f}s" for k, v in payload["timings"].items()))
    return "\n".join(lines)


def emit(report: RunReport, fmt: str, indent: int = 2) -> None:
    payload = report.to_json_dict()
    if fmt == "text":
        print(render_text(payload))
    else:
        print(json.dumps(payload, indent=indent, allow_nan=False))


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        print(json.dumps(schema_for(args.which), indent=2))
        return 0
    try:
        settings = _settings(args)
    except SosDualError as e:
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)
    setup_logging(settings.logging)
    fmt, indent = settings.report.format, settings.report.indent
    flags = _flags(args)

    if args.command == "batch":
        try:
            summary, reports = run_batch(settings, args.batch_command, args.directory, flags, args.jobs)
        except InputError as e:
            logger.error(str(e))
            return exit_code_for(e)
        if fmt == "text":
            print(render_text(summary.to_json_dict()))
        else:
            out: List[dict] = [r.to_json_dict() for r in reports]
            print(json.dumps({"summary": summary.to_json_dict(), "reports": out}, indent=indent, allow_nan=False))
        return summary.exit_code

    pipeline = DualityPipeline(settings)
    pf = None
    if args.command != "selftest":
        try:
            pf = load(args.file)
        except InputError as e:
            report = pipeline.error_report(args.command, None, e)
            emit(report, fmt, indent)
            return report.exit_code
    report = pipeline.run(args.command, pf, flags)
    emit(report, fmt, indent)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
