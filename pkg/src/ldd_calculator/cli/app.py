from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction

from rich.console import Console
from rich.logging import RichHandler
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
    TimeRemainingColumn,
)
from rich.table import Table

from ldd_calculator.config.constants import (
    COMPARATORS,
    QED_STRATEGIES,
    STRATEGIES,
    get_bundle,
)
from ldd_calculator.config.settings import apply_config, given_options, load_config
from ldd_calculator.data.codes import (
    build_decoder,
    load_bundle,
    load_candidates,
    load_code,
    load_dd,
    load_decoder,
    read_decoder_rows,
    store_dd,
)
from ldd_calculator.errors import DecoderError, LddCalculatorError
from ldd_calculator.models.code import (
    DecoderMap,
    DecouplingGroup,
    StabilizerCode,
    code_distance,
    make_decoder,
    resolve_generator_order,
    trivial_code,
    trivial_decoder,
)
from ldd_calculator.models.pauli import format_pauli
from ldd_calculator.services import asymptotics, montecarlo, scan
from ldd_calculator.services.fidelity import NoiseParams, evaluate
from ldd_calculator.services.wep import PauliSpace, WepTable, check_identities
from ldd_calculator.ui import charts
from ldd_calculator.utils.io_utils import header_lines, provenance, write_csv_data, write_json_data
from ldd_calculator.utils.math_utils import Number, lin_space, log_space, parse_number, render

logger = logging.getLogger(__name__)

PROG = "ldd-calculator"


@dataclass
class Inputs:
    code: StabilizerCode
    decoder: DecoderMap | None
    dd: DecouplingGroup | None
    paths: list[str] = field(default_factory=list)


def _console(args: argparse.Namespace) -> Console:
    # machine output on stdout stays clean; human output moves to stderr
    return Console(stderr=getattr(args, "out", None) is None)


@contextmanager
def _progress(console: Console, label: str):
    with Progress(
        SpinnerColumn(),
        TextColumn(label),
        BarColumn(),
        TextColumn("{task.completed}/{task.total}"),
        TimeElapsedColumn(),
        TimeRemainingColumn(),
        console=console,
        transient=True,
    ) as progress:
        task = progress.add_task(label, total=None)

        def update(done: int, total: int):
            progress.update(task, completed=done, total=total)

        yield update


def _bundle(args: argparse.Namespace):
    if not args.bundle:
        return None
    try:
        return get_bundle(args.bundle)
    except KeyError as e:
        raise LddCalculatorError(str(e.args[0])) from None


def _load_inputs(args: argparse.Namespace, need_decoder: bool = True, need_dd: bool = True) -> Inputs:
    bundle = _bundle(args)
    from_bundle = bundle is not None and not args.code
    if args.code:
        code_path = args.code
        code = load_code(code_path)
    elif bundle is not None:
        code_path = bundle.code_path()
        code = load_bundle(args.bundle)[0]
    else:
        raise LddCalculatorError("give --code or --bundle")
    paths = [code_path]

    decoder = None
    if need_decoder:
        if args.decoder:
            decoder = load_decoder(args.decoder, code)
            paths.append(args.decoder)
        elif args.decoder_overrides:
            decoder = build_decoder(code, None, args.decoder_overrides, args.tie_break)
            paths.append(args.decoder_overrides)
        elif from_bundle:
            decoder = load_bundle(args.bundle)[1]
            paths += [bundle.decoder_path(), bundle.overrides_path()]
        elif code.r == 0:
            decoder = trivial_decoder(code)
        else:
            raise LddCalculatorError("the qec setting needs --decoder or --decoder-overrides")

    dd = None
    if args.dd:
        dd = load_dd(args.dd)
        paths.append(args.dd)
    elif from_bundle:
        dd = load_bundle(args.bundle)[2]
        paths.append(bundle.dd_path())
    elif need_dd:
        raise LddCalculatorError("give --dd or --bundle")
    if dd is not None and dd.n != code.n:
        raise LddCalculatorError(f"DD group acts on {dd.n} qubits, code has {code.n}")
    return Inputs(code, decoder, dd, [p for p in paths if p])


def _provenance(args: argparse.Namespace, inputs: Inputs | None = None, extra=()) -> dict:
    paths = (inputs.paths if inputs else []) + [p for p in extra if p]
    return provenance([PROG, *args.argv], paths)


def _values(text: str, exact: bool) -> list[Number]:
    """'a,b,c' or 'lo:hi:count[:log]'."""
    text = text.strip()
    if text.count(":") >= 2:
        parts = text.split(":")
        lo, hi = parse_number(parts[0], exact), parse_number(parts[1], exact)
        count = int(parts[2])
        if len(parts) > 3 and parts[3] == "log":
            values = log_space(float(lo), float(hi), count)
            return [Fraction(f"{v:.12g}") for v in values] if exact else values
        return lin_space(lo, hi, count)
    return [parse_number(t, exact) for t in text.split(",") if t.strip()]


def _single(name: str, text: str, exact: bool) -> Number:
    values = _values(text, exact)
    if len(values) != 1:
        raise LddCalculatorError(f"--{name.replace('_', '-')} takes a single value here")
    return values[0]


def _strategies(text: str) -> tuple[str, ...]:
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    unknown = [s for s in names if s not in STRATEGIES]
    if unknown:
        raise LddCalculatorError(f"unknown strategy {unknown[0]!r}; expected one of {', '.join(STRATEGIES)}")
    return names


def _compute_tables(
    inputs: Inputs, console: Console, threads: int, qec: bool = True, qed: bool = False
) -> tuple[WepTable | None, WepTable | None]:
    wep = wep_qed = None
    if qec:
        with _progress(console, "Enumerating (qec)") as update:
            wep = PauliSpace(inputs.code, inputs.decoder).table(inputs.dd, workers=threads, progress=update)
    if qed:
        with _progress(console, "Enumerating (qed)") as update:
            wep_qed = PauliSpace(inputs.code, None).table(inputs.dd, workers=threads, progress=update)
    return wep, wep_qed


def cmd_validate(args: argparse.Namespace) -> int:
    console = Console()
    bundle = _bundle(args)
    from_bundle = bundle is not None and not args.code
    code_path = args.code or (bundle.code_path() if bundle else None)
    decoder_path = args.decoder or (bundle.decoder_path() if from_bundle else None)
    overrides_path = args.decoder_overrides or (bundle.overrides_path() if from_bundle else None)
    dd_path = args.dd or (bundle.dd_path() if from_bundle else None)
    if code_path:
        code = load_code(code_path)
    elif bundle is not None:
        code = trivial_code(bundle.k)
    else:
        raise LddCalculatorError("give --code or --bundle")

    table = Table(title=f"Validation of {code}")
    table.add_column("Check")
    table.add_column("Result")
    table.add_row("code invariants", "ok")
    table.add_row("distance", str(code_distance(code)))
    status = 0

    if decoder_path:
        rows = read_decoder_rows(decoder_path, code)
        try:
            decoder = make_decoder(code, rows)
            table.add_row("decoder", f"ok ({len(decoder)} syndromes)")
        except DecoderError as e:
            table.add_row("decoder", f"[red]{e}[/red]")
            status = 1
            if args.resolve:
                resolved = resolve_generator_order(code, rows)
                if resolved is None:
                    table.add_row("generator order", "[red]no ordering validates this table[/red]")
                else:
                    make_decoder(resolved, rows)
                    order = ", ".join(format_pauli(S) for S in resolved.stabilizers)
                    table.add_row("generator order", f"resolved: {order}")
    elif overrides_path:
        tie_break = bundle.tieBreak if from_bundle and not args.decoder_overrides else args.tie_break
        decoder = build_decoder(code, None, overrides_path, tie_break)
        table.add_row("decoder", f"ok (min-weight with overrides, {len(decoder)} syndromes)")
    if dd_path:
        dd = load_dd(dd_path)
        if dd.n != code.n:
            table.add_row("dd group", f"[red]{dd.n} qubits, code has {code.n}[/red]")
            status = 1
        else:
            table.add_row("dd group", f"ok (rank {dd.generators.rank()})")
    console.print(table)
    return status


def cmd_wep(args: argparse.Namespace) -> int:
    console = _console(args)
    qec = args.setting == "qec"
    inputs = _load_inputs(args, need_decoder=qec)
    wep, wep_qed = _compute_tables(inputs, console, args.threads, qec=qec, qed=not qec)
    result = wep if qec else wep_qed
    failures = check_identities(result)
    write_json_data(result.to_json(), args.out, _provenance(args, inputs))

    summary = Table(title=f"{args.setting} enumerators for {inputs.code}")
    summary.add_column("Tag")
    summary.add_column("Coefficients (w = 0..)")
    for tag in ("notS", "S", "notS-notC", "S-notC") if qec else ("notS-L", "S-L", "StL"):
        summary.add_row(tag, ", ".join(str(c) for c in result[tag][:6]))
    console.print(summary)
    if failures:
        for name in failures:
            console.print(f"[red]identity failed:[/red] {name}")
        return 1
    console.print("[green]all enumerator identities hold[/green]")
    return 0


def cmd_fidelity(args: argparse.Namespace) -> int:
    console = _console(args)
    strategies = _strategies(args.strategy)
    needs_qec = any(s not in QED_STRATEGIES and s != "dd_phys" for s in strategies)
    needs_qed = any(s in QED_STRATEGIES for s in strategies)
    inputs = _load_inputs(args, need_decoder=needs_qec, need_dd=needs_qec or needs_qed)
    wep, wep_qed = _compute_tables(inputs, console, args.threads, qec=needs_qec, qed=needs_qed)

    sqrt_qec = args.p_qec.strip() == "sqrt"
    if sqrt_qec and args.exact:
        raise LddCalculatorError("--p-qec sqrt is irrational; drop --exact")
    values = {
        "p": _values(args.p, args.exact),
        "p_dd": _values(args.p_dd, args.exact),
        "p_qed": _values(args.p_qed, args.exact),
    }
    if not sqrt_qec:
        values["p_qec"] = _values(args.p_qec, args.exact)
    grid = scan.parameter_grid(values, sqrt_qec=sqrt_qec)
    rows = scan.fidelity_rows(strategies, grid, wep, wep_qed, inputs.code.k)
    write_csv_data(scan.FIDELITY_COLUMNS, rows, args.out, _provenance(args, inputs))
    if args.plot:
        fig = charts.fidelity_curves_figure(rows, f"Logical infidelity, {inputs.code}")
        charts.write_chart(fig, args.plot, "fidelity-curves")

    destination = args.out or "stdout"
    table = Table(title=f"Fidelities ({len(rows)} rows written to {destination})")
    for column in scan.FIDELITY_COLUMNS:
        table.add_column(column)
    for row in rows[: args.top or len(rows)]:
        table.add_row(*(render(v) if v is not None else "-" for v in row))
    console.print(table)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    console = _console(args)
    if args.comparator not in COMPARATORS:
        raise LddCalculatorError(f"comparator must be one of {', '.join(COMPARATORS)}")
    inputs = _load_inputs(args)
    wep, _ = _compute_tables(inputs, console, args.threads)

    spec = scan.SweepSpec(comparator=args.comparator)
    for name, text in (("p", args.p), ("p_dd", args.p_dd), ("p_qec", args.p_qec)):
        parts = text.strip().split(":")
        if len(parts) >= 3:
            lo, hi = parse_number(parts[0], args.exact), parse_number(parts[1], args.exact)
            log = len(parts) > 3 and parts[3] == "log"
            spec.axes.append(scan.Axis(name, lo, hi, int(parts[2]), log))
        else:
            spec.fixed[name] = _single(name, text, args.exact)
    rows = scan.advantage_rows(spec, wep, inputs.code.k)
    write_csv_data(scan.ADVANTAGE_COLUMNS, rows, args.out, _provenance(args, inputs))
    if args.plot:
        if "p" in spec.fixed:
            fig = charts.advantage_heatmap_figure(rows, f"R vs {args.comparator}, p = {render(spec.fixed['p'])}")
            charts.write_chart(fig, args.plot, "advantage-heatmap")
        else:
            logger.warning("--plot needs a fixed p for the heatmap; skipped")

    wins = sum(1 for r in rows if r[4] > 0)
    degenerate = sum(r[5] for r in rows)
    console.print(
        f"R > 0 at {wins}/{len(rows)} grid points against {args.comparator}"
        + (f" ({degenerate} degenerate)" if degenerate else "")
    )
    return 0


def cmd_scan_ldd(args: argparse.Namespace) -> int:
    console = _console(args)
    inputs = _load_inputs(args, need_dd=args.candidates is None)
    if args.candidates:
        candidates = load_candidates(args.candidates)
    else:
        candidates = scan.dressing_candidates(inputs.code, inputs.dd)
    params = NoiseParams(
        _single("p", args.p, False), _single("p_dd", args.p_dd, False), _single("p_qec", args.p_qec, False)
    )
    with _progress(console, f"Scanning {len(candidates)} groups") as update:
        result = scan.scan_ldd(inputs.code, inputs.decoder, candidates, params, args.threads, update)

    rows = [
        (rank, e.index, " ".join(e.generators), e.objective, int(e.tie))
        for rank, e in enumerate(result.entries, start=1)
    ]
    columns = ("rank", "index", "generators", "objective", "tie")
    write_csv_data(columns, rows, args.out, _provenance(args, inputs, [args.candidates]))

    table = Table(title=f"Best LDD groups at p={params.p}, p_dd={params.p_dd}, p_qec={params.p_qec}")
    table.add_column("Rank")
    table.add_column("Generators")
    table.add_column("1 - F_hyb")
    table.add_column("Tie")
    for rank, _, gens, objective, tie in rows[: args.top or len(rows)]:
        table.add_row(str(rank), gens, f"{objective:.6e}", "yes" if tie else "")
    console.print(table)
    return 0


def cmd_asymptotics(args: argparse.Namespace) -> int:
    console = _console(args)
    inputs = _load_inputs(args)
    wep, wep_qed = _compute_tables(inputs, console, args.threads, qec=True, qed=True)
    report = asymptotics.asymptotics_report(inputs.code, inputs.decoder, inputs.dd, wep, wep_qed)
    data = report.to_json()
    rejection = asymptotics.qed_rejection_coeffs(inputs.code)
    data["qed_rejection"] = {"p_qed": rejection[0], "z": rejection[1]}
    if args.threshold:
        threshold = asymptotics.find_advantage_threshold(wep)
        data["advantage_threshold"] = threshold._asdict() if threshold else None
    write_json_data(data, args.out, _provenance(args, inputs))

    table = Table(title=f"Low-noise behaviour of {inputs.code}")
    table.add_column("Quantity")
    table.add_column("Value")
    for key in ("alpha", "a_count", "beta", "B_count", "b_qec", "ldd_a", "ldd_b", "criterion_part1", "qed_d"):
        value = getattr(report, key)
        table.add_row(key, render(value) if isinstance(value, Fraction) else str(value))
    console.print(table)
    return 0


def cmd_dress(args: argparse.Namespace) -> int:
    console = _console(args)
    inputs = _load_inputs(args)
    space = PauliSpace(inputs.code, inputs.decoder)
    with _progress(console, "Enumerating (qec)") as update:
        wep = space.table(inputs.dd, workers=args.threads, progress=update)
    result = asymptotics.find_dressing(inputs.code, inputs.decoder, inputs.dd, wep, space, args.threads)
    if result is None:
        console.print("[yellow]every weight-alpha uncorrectable error is a logical; no dressing exists[/yellow]")
        return 1
    if args.out:
        store_dd(result.group, args.out, header_lines(_provenance(args, inputs)))
    else:
        for g in result.group.generators:
            print(f"generator {format_pauli(g)}")
    console.print(
        f"dressed generator {result.index} by {result.stabilizer} to suppress {result.error}; beta = {result.beta}"
    )
    return 0


def cmd_mc(args: argparse.Namespace) -> int:
    console = _console(args)
    strategies = _strategies(args.strategy)
    inputs = _load_inputs(args)
    grid = scan.parameter_grid(
        {
            "p": _values(args.p, False),
            "p_dd": _values(args.p_dd, False),
            "p_qec": _values(args.p_qec, False),
            "p_qed": _values(args.p_qed, False),
        }
    )
    wep = wep_qed = None
    if args.compare:
        wep, wep_qed = _compute_tables(
            inputs, console, args.threads, qec=True, qed=any(s in QED_STRATEGIES for s in strategies)
        )

    rows = []
    table = Table(title=f"Monte-Carlo estimates ({args.shots} shots, seed {args.seed})")
    for column in ("strategy", "p", "F_hat", "stderr", "P_A_hat") + (("F_closed", "z-score") if args.compare else ()):
        table.add_column(column)
    with _progress(console, "Sampling") as update:
        total = len(grid) * len(strategies)
        for i, (params, strategy) in enumerate(((g, s) for g in grid for s in strategies), start=1):
            config = montecarlo.McConfig(args.shots, args.seed, strategy, params, args.threads)
            est = montecarlo.estimate(config, inputs.code, inputs.decoder, inputs.dd)
            rows.append(
                (strategy, params.p, params.p_dd, params.p_qec, params.p_qed, args.shots, args.seed,
                 est.f_hat, est.f_stderr, est.pa_hat, est.pa_stderr)
            )
            cells = [strategy, render(params.p), f"{est.f_hat:.8f}", f"{est.f_stderr:.2e}", f"{est.pa_hat:.6f}"]
            if args.compare:
                closed = float(evaluate(strategy, params, wep, wep_qed, inputs.code.k).fidelity)
                zscore = (est.f_hat - closed) / est.f_stderr if est.f_stderr > 0 else 0.0
                cells += [f"{closed:.8f}", f"{zscore:+.2f}"]
            table.add_row(*cells)
            update(i, total)
    columns = ("strategy", "p", "p_dd", "p_qec", "p_qed", "shots", "seed", "f_hat", "f_stderr", "pa_hat", "pa_stderr")
    write_csv_data(columns, rows, args.out, _provenance(args, inputs))
    console.print(table)
    return 0


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--bundle", default=None, help="Shipped inputs: steane, code13 or trivial")
    parser.add_argument("--code", default=None, help="Code file")
    parser.add_argument("--decoder", default=None, help="Decoder table file")
    parser.add_argument("--decoder-overrides", default=None, help="Override file applied to the min-weight decoder")
    parser.add_argument(
        "--tie-break",
        choices=("canonical", "support"),
        default="canonical",
        help="Order among equal-weight recoveries of the min-weight decoder",
    )
    parser.add_argument("--dd", default=None, help="Decoupling group file")
    parser.add_argument("--out", default=None, help="Output file (stdout when omitted)")
    parser.add_argument("--exact", action="store_true", help="Exact rational arithmetic")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--config", default=None, help="File of 'key = value' option defaults")
    parser.add_argument("--verbose", action="store_true")
    parser.add_argument("--quiet", action="store_true")


def _noise(parser: argparse.ArgumentParser, p: str = "1e-3") -> None:
    parser.add_argument("--p", default=p, help="Values 'a,b' or a range 'lo:hi:count[:log]'")
    parser.add_argument("--p-dd", default="1")
    parser.add_argument("--p-qec", default="0")
    parser.add_argument("--p-qed", default="0")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=PROG)
    sub = p.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("validate", help="Validate code, decoder and DD files")
    _common(v)
    v.add_argument("--resolve", action="store_true", help="Search a generator order under which the decoder validates")
    v.set_defaults(func=cmd_validate)

    w = sub.add_parser("wep", help="Compute weight-enumerator tables")
    _common(w)
    w.add_argument("--setting", choices=("qec", "qed"), default="qec")
    w.set_defaults(func=cmd_wep)

    f = sub.add_parser("fidelity", help="Evaluate closed-form fidelities over a parameter grid")
    _common(f)
    _noise(f, "1e-4:1e-1:13:log")
    f.add_argument("--strategy", default="dd_phys,qec_only,ldd_only,hybrid")
    f.add_argument("--plot", default=None, help="Write an HTML chart")
    f.add_argument("--top", type=int, default=20)
    f.set_defaults(func=cmd_fidelity)

    s = sub.add_parser("sweep", help="Relative advantage R over a parameter grid")
    _common(s)
    s.add_argument("--p", default="1e-3")
    s.add_argument("--p-dd", default="0:1:21")
    s.add_argument("--p-qec", default="0:1:21")
    s.add_argument("--comparator", default="qec")
    s.add_argument("--plot", default=None, help="Write an HTML heatmap")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("scan-ldd", help="Rank LDD groups by hybrid logical failure probability")
    _common(c)
    _noise(c, "1e-3")
    c.add_argument("--candidates", default=None, help="Candidate groups, blank-line separated")
    c.add_argument("--top", type=int, default=10)
    c.set_defaults(func=cmd_scan_ldd)

    a = sub.add_parser("asymptotics", help="Leading-order coefficients and advantage conditions")
    _common(a)
    a.add_argument("--threshold", action="store_true", help="Also bisect for the advantage threshold")
    a.set_defaults(func=cmd_asymptotics)

    d = sub.add_parser("dress", help="Dress a DD generator with a stabilizer so that beta = alpha")
    _common(d)
    d.set_defaults(func=cmd_dress)

    m = sub.add_parser("mc", help="Monte-Carlo estimates of fidelity and acceptance")
    _common(m)
    _noise(m, "1e-2")
    m.add_argument("--strategy", default="hybrid")
    m.add_argument("--shots", type=int, default=100_000)
    m.add_argument("--compare", action="store_true", help="Show closed-form values and z-scores")
    m.set_defaults(func=cmd_mc)

    return p


def _setup_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    root = logging.getLogger()
    if not any(isinstance(h, RichHandler) for h in root.handlers):
        root.addHandler(RichHandler(console=Console(stderr=True), show_path=False))
    root.setLevel(level)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    _setup_logging(args.verbose, args.quiet)
    err = Console(stderr=True)

    if args.config:
        try:
            config = load_config(args.config)
        except (OSError, UnicodeDecodeError) as e:
            err.print(f"[red]error:[/red] {e}")
            return 2
        defaults = vars(parser.parse_args([args.cmd]))
        given = given_options(build_parser(), argv)
        try:
            applied = apply_config(args, config, defaults, given)
        except ValueError as e:
            err.print(f"[red]error:[/red] bad value in {args.config}: {e}")
            return 2
        logger.debug("applied config keys: %s", ", ".join(applied) or "(none)")

    try:
        return args.func(args)
    except FileNotFoundError as e:
        err.print(f"[red]error:[/red] {e}")
        return 2
    except LddCalculatorError as e:
        err.print(f"[red]error:[/red] {e}")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
