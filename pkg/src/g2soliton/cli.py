"""Command-line frontend.

Exit codes: 0 success, 1 bad input or parse error, 2 not a positive or not a
closed G2-structure, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .catalog import NAMES, catalog, param_specs
from .errors import InputError, NotClosedError, NotPositiveError, NumericError
from .flow import IntegratorConfig, integrate, trace_to_text
from .g2core import analyze_positivity, torsion
from .soliton import analyze
from .textio import load_problem, render_certificate, render_report

EXIT_OK, EXIT_INPUT, EXIT_NOT_G2, EXIT_NUMERIC = 0, 1, 2, 3


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _load(source: str, params: dict):
    """Return ``(label, algebra, phi)`` for ``catalog:<name>`` or a problem-file path."""
    if source.startswith("catalog:"):
        name = source.split(":", 1)[1]
        specs = {s.name for s in param_specs(name)}
        entry = catalog(name, **{k: v for k, v in params.items() if k in specs})
        label = name + "".join(f" {k}={v:g}" for k, v in entry.params.items())
        return label, entry.algebra, entry.phi
    pf = load_problem(source)
    return source, pf.algebra(), pf.phi


def _single(values: list[float] | None, name: str) -> dict:
    if values is None:
        return {}
    if len(values) != 1:
        raise InputError(f"--{name} takes a single value for this command")
    return {name: values[0]}


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_list(args) -> int:
    for name in NAMES:
        specs = param_specs(name)
        rng = "; ".join(s.describe() for s in specs) if specs else "no parameters"
        print(f"{name}: {rng}")
    return EXIT_OK


def _params(args) -> dict:
    out = {}
    out.update(_single(args.mu, "mu"))
    out.update(_single(args.alpha, "alpha"))
    return out


def cmd_check(args) -> int:
    label, L, phi = _load(args.source, _params(args))
    G2 = analyze_positivity(phi)
    tors = torsion(G2, L)
    print(f"{label}: Lie algebra ok (jacobi residual {L.jacobi_residual():.1e}); "
          f"phi positive (det b = {G2.det_b:.12g}); "
          f"closed (||d phi|| = {tors.closed_residual:.1e})")
    return EXIT_OK


def cmd_analyze(args) -> int:
    label, L, phi = _load(args.source, _params(args))
    text = render_report(analyze(L, phi), precision=args.precision, title=label)
    _emit(text, args.output)
    return EXIT_OK


def cmd_soliton(args) -> int:
    _, L, phi = _load(args.source, _params(args))
    _emit(render_certificate(analyze(L, phi).certificate, precision=args.precision), args.output)
    return EXIT_OK


def _flow_one(source, params, args):
    label, L, phi = _load(source, params)
    cfg = IntegratorConfig(
        method=args.method,
        step=args.step,
        rtol=args.rtol,
        atol=args.atol,
        max_steps=args.max_steps,
        sample_stride=args.stride,
        compute_soliton_residual=args.soliton_residual,
    )
    return label, integrate(phi, L, args.t_end, cfg)


def cmd_flow(args) -> int:
    grid = [{}]
    for name in ("mu", "alpha"):
        values = getattr(args, name)
        if values:
            grid = [dict(g, **{name: v}) for g in grid for v in values]
    if len(grid) > 1 and not args.output:
        raise InputError("a parameter sweep needs --output (one file per parameter value)")
    with ThreadPoolExecutor(max_workers=min(len(grid), 4)) as pool:
        results = list(pool.map(lambda p: _flow_one(args.source, p, args), grid))
    status = EXIT_OK
    for params, (label, trace) in zip(grid, results):
        out = args.output
        if out and len(grid) > 1:
            path = Path(out)
            tag = "_".join(f"{k}{v:g}" for k, v in params.items())
            out = str(path.with_name(f"{path.stem}_{tag}{path.suffix}"))
        _emit(trace_to_text(trace), out)
        print(
            f"{label}: {len(trace.samples)} samples, {trace.steps} steps, "
            f"termination {trace.termination}",
            file=sys.stderr,
        )
        if trace.termination == "positivity_lost" and len(trace.samples) <= 1:
            status = EXIT_NUMERIC
        elif trace.termination in ("step_underflow", "max_steps"):
            status = EXIT_NUMERIC
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="g2soliton",
        description="G2-structures, Laplacian solitons and Laplacian flow on 7-dimensional Lie algebras.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)

    sub.add_parser("list", help="list catalog entries and parameter ranges")

    def source_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("source", help="catalog:<name> or a problem file path")
        sp.add_argument("--mu", type=_floats, default=None, help="g_mu parameter")
        sp.add_argument("--alpha", type=_floats, default=None, help="k_alpha parameter")
        return sp

    source_cmd("check", "validate Jacobi identity, positivity and closedness")
    for name, help_ in (("analyze", "full report"), ("soliton", "soliton certificate only")):
        sp = source_cmd(name, help_)
        sp.add_argument("--precision", type=int, default=12, help="significant digits in output")
        sp.add_argument("--output", "-o", default=None)

    sp = source_cmd("flow", "integrate the Laplacian flow and write a CSV trace")
    sp.add_argument("--t-end", type=float, default=0.5)
    sp.add_argument("--method", choices=("rk45", "rk4"), default="rk45")
    sp.add_argument("--step", type=float, default=1e-3, help="fixed step for rk4")
    sp.add_argument("--rtol", type=float, default=1e-8)
    sp.add_argument("--atol", type=float, default=1e-10)
    sp.add_argument("--max-steps", type=int, default=10**6)
    sp.add_argument("--stride", type=int, default=1, help="record every n-th accepted step")
    sp.add_argument("--soliton-residual", action="store_true", help="record the soliton residual per sample")
    sp.add_argument("--output", "-o", default=None)
    return p


_COMMANDS = {
    "list": cmd_list,
    "check": cmd_check,
    "analyze": cmd_analyze,
    "soliton": cmd_soliton,
    "flow": cmd_flow,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.verb](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotPositiveError, NotClosedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_G2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
