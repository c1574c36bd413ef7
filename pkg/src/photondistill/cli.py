"""Command-line front end.

Verbs: ztl, distill, decompose, compare, mesh-render, verify-all. Every table
is also available as line-delimited JSON records (--output-format records),
and all output is deterministic for a fixed (command, parameters, seed).

Exit codes: 0 success, 1 a verification of a physics claim failed, 2 usage
error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import circuits, distillation, fock, mesh, numerics, records, verify
from .errors import CapacityError, DegenerateHeraldError, DimensionError

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2

DISTILL_ORACLE_MAX_M = 4


class UsageError(Exception):
    pass


def _emit(text: str, output_path: str | None):
    if output_path:
        Path(output_path).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad epsilon grid {text!r}: {exc}") from exc


def _mode_labels(occ) -> str:
    return "(" + ",".join(str(c) for c in occ) + ")"


def cmd_ztl(args) -> int:
    if not 2 <= args.m <= 6:
        raise UsageError(f"--m must be in [2, 6] for ztl, got {args.m}")
    report = distillation.verify_suppression(args.m)
    u = circuits.qft_matrix(args.m)
    r = (1,) * args.m
    ideal = fock.output_distribution(u, r)
    classical = fock.distinguishable_distribution(u, r)
    rows = []
    recs = []
    for s in ideal:
        allowed = distillation.ztl_allowed(s)
        rows.append(
            [_mode_labels(s), "allowed" if allowed else "suppressed", ideal[s], classical[s]]
        )
        recs.append(
            records.record(
                "ztl-outcome",
                m=args.m,
                outcome=list(s),
                allowed=allowed,
                probability_indistinguishable=ideal[s],
                probability_distinguishable=classical[s],
            )
        )
    ok = report.suppressed and report.distinguishable_violates
    recs.append(
        records.record(
            "ztl-summary",
            m=args.m,
            suppressed=report.suppressed,
            max_forbidden_probability=report.max_forbidden_probability,
            distinguishable_violates=report.distinguishable_violates,
        )
    )
    if args.output_format == "records":
        _emit(records.to_json_lines(recs), args.output_path)
    else:
        text = records.format_table(
            ["outcome", "ztl", "P(indistinguishable)", "P(distinguishable)"], rows
        )
        text += (
            f"suppression holds: {report.suppressed} "
            f"(max forbidden P = {report.max_forbidden_probability:.3e}); "
            f"distinguishable photons violate: {report.distinguishable_violates}\n"
        )
        _emit(text, args.output_path)
    return EXIT_OK if ok else EXIT_VERIFICATION_FAILED


def _build_protocol(args) -> distillation.Protocol:
    if args.protocol == "hom":
        return distillation.protocol_cascaded_hom()
    if args.protocol == "tree":
        return distillation.protocol_tree()
    if args.protocol == "fourier":
        m = args.m if args.m is not None else 4
        if m > DISTILL_ORACLE_MAX_M:
            raise UsageError(
                f"fourier distillation runs are capped at m <= {DISTILL_ORACLE_MAX_M} "
                f"(oracle photon limit); got m={m}"
            )
        return distillation.protocol_fourier(m)
    raise UsageError(f"unknown protocol {args.protocol!r}")


def cmd_distill(args) -> int:
    proto = _build_protocol(args)
    m = proto.circuit.mode_count
    recs = []
    lines = []
    if args.protocol == "tree":
        grid = _parse_grid(args.eps_grid) if args.eps_grid else (args.eps if args.eps is not None else 0.1,)
        rows = []
        for eps in grid:
            out = distillation.evaluate_tree(proto, eps)
            rows.append(
                [eps, out.herald_probability, out.coincidence_probability,
                 out.final_visibility, out.raw_visibility]
            )
            recs.append(
                records.record(
                    "tree-distillation",
                    protocol="tree",
                    epsilon_in=eps,
                    herald_probability=out.herald_probability,
                    coincidence_probability=out.coincidence_probability,
                    final_visibility=out.final_visibility,
                    raw_visibility=out.raw_visibility,
                )
            )
        lines.append(
            records.format_table(
                ["eps", "P(sub-heralds)", "P(coincidence)", "V(final)", "V(raw)"], rows
            )
        )
    elif args.eps_grid or args.eps is None:
        grid = _parse_grid(args.eps_grid) if args.eps_grid else distillation.DEFAULT_EPSILON_GRID
        herald = (
            distillation.best_fourier_herald(m)
            if args.protocol == "fourier"
            else proto.herald
        )
        fit = distillation.error_slope(proto, grid, herald=herald)
        rows = [
            [eps, out, ratio]
            for eps, out, ratio in zip(fit.epsilons, fit.epsilon_outs, fit.ratios)
        ]
        lines.append(records.format_table(["eps", "eps_out", "ratio"], rows))
        lines.append(f"herald {herald.pattern} on modes {herald.measured_modes}; "
                     f"fitted slope = {fit.slope:.6f}\n")
        for eps, out, ratio in zip(fit.epsilons, fit.epsilon_outs, fit.ratios):
            recs.append(
                records.record(
                    "distillation-point",
                    protocol=proto.name,
                    m=m,
                    epsilon_in=eps,
                    herald=list(herald.pattern),
                    epsilon_out=out,
                    ratio=ratio,
                )
            )
        recs.append(
            records.record("distillation-slope", protocol=proto.name, m=m, slope=fit.slope)
        )
    else:
        rows = []
        for row in distillation.herald_table(proto, args.eps):
            rows.append(
                [
                    _mode_labels(row.herald.pattern),
                    "yes" if row.ztl_allowed else "no",
                    row.success_probability,
                    row.epsilon_out,
                    row.visibility_out,
                ]
            )
            recs.append(
                records.record(
                    "distillation-herald",
                    protocol=proto.name,
                    m=m,
                    epsilon_in=args.eps,
                    herald=list(row.herald.pattern),
                    ztl_allowed=row.ztl_allowed,
                    success_probability=row.success_probability,
                    epsilon_out=row.epsilon_out,
                    visibility_out=row.visibility_out,
                    degenerate=row.degenerate,
                )
            )
        lines.append(
            records.format_table(
                ["herald", "ztl", "P(success)", "eps_out", "V_out"], rows
            )
        )
    if args.output_format == "records":
        _emit(records.to_json_lines(recs), args.output_path)
    else:
        _emit("".join(lines), args.output_path)
    return EXIT_OK


def _load_unitary(path: str) -> np.ndarray:
    if path.endswith(".npy"):
        return np.load(path)
    return np.loadtxt(path, dtype=complex)


def cmd_decompose(args) -> int:
    if args.n is not None:
        if args.n < 1:
            raise UsageError(f"--n must be >= 1, got {args.n}")
        args.m = 1 << args.n
    if args.source == "qft":
        u = circuits.qft_matrix(args.m)
    elif args.source == "random":
        u = numerics.random_unitary(args.m, args.seed)
    elif args.source == "file":
        if not args.input_file:
            raise UsageError("--source file requires --input-file")
        u = _load_unitary(args.input_file)
    else:
        raise UsageError(f"unknown source {args.source!r}")
    m = u.shape[0]
    if args.method == "reck":
        circ = circuits.reck_decompose(u)
    elif args.method == "clements":
        circ = circuits.clements_decompose(u)
    elif args.method == "qfft":
        if m & (m - 1) or m < 2:
            raise UsageError(f"qfft needs a power-of-two mode count, got {m}")
        if args.source != "qft":
            raise UsageError("qfft decomposes the Fourier transform; use --source qft")
        circ = circuits.cooley_tukey_qfft(int(round(np.log2(m))))
    else:
        raise UsageError(f"unknown method {args.method!r}")

    reconstructed = circuits.circuit_to_unitary(circ)
    if circ.input_permutation is not None:
        reconstructed = reconstructed @ circuits.permutation_matrix(circ.input_permutation)
    err = float(
        np.max(
            np.abs(
                numerics.normalize_global_phase(reconstructed)
                - numerics.normalize_global_phase(u)
            )
        )
    )
    report = circuits.component_report(circ)
    tol = 1e-10 if args.method == "qfft" else 1e-8
    out_path = args.output_path or f"{args.method}-m{m}.circuit"
    Path(out_path).write_text(circuits.serialize_circuit(circ))
    if args.output_format == "records":
        rec = records.record(
            "decomposition",
            method=args.method,
            source=args.source,
            m=m,
            pairs=report.pairs,
            depth_layers=report.depth_layers,
            reconstruction_error=err,
            circuit_file=out_path,
        )
        sys.stdout.write(records.to_json_lines([rec]))
    else:
        sys.stdout.write(
            f"method={args.method} m={m}: pairs={report.pairs} "
            f"depth_layers={report.depth_layers}\n"
            f"circuit written to {out_path}\n"
            f"max reconstruction error = {err:.3e}\n"
        )
    return EXIT_OK if err <= tol else EXIT_VERIFICATION_FAILED


def cmd_compare(args) -> int:
    if args.circuit_file:
        target = circuits.parse_circuit(Path(args.circuit_file).read_text())
    else:
        if args.m is None:
            raise UsageError("compare needs --m or --circuit-file")
        if not 2 <= args.m <= 8:
            raise UsageError(f"--m must be in [2, 8] for compare, got {args.m}")
        target = circuits.qft_matrix(args.m)
    rows = mesh.compare_architectures(target, mzis_per_cell=args.mzis_per_cell)
    table_rows = [
        [r.architecture, r.strategy, r.pairs, r.depth_layers,
         r.mesh_active_mzis, r.mesh_depth, r.mesh_traversal_depth]
        for r in rows
    ]
    recs = [
        records.record(
            "architecture-comparison",
            architecture=r.architecture,
            strategy=r.strategy,
            pairs=r.pairs,
            depth_layers=r.depth_layers,
            mesh_active_mzis=r.mesh_active_mzis,
            mesh_depth=r.mesh_depth,
            mesh_traversal_depth=r.mesh_traversal_depth,
        )
        for r in rows
    ]
    if args.output_format == "records":
        _emit(records.to_json_lines(recs), args.output_path)
    else:
        _emit(
            records.format_table(
                ["architecture", "strategy", "pairs", "depth_layers",
                 "mesh_active", "mesh_depth", "mesh_traversal"],
                table_rows,
            ),
            args.output_path,
        )
    return EXIT_OK


def cmd_mesh_render(args) -> int:
    lattice = mesh.build_bricks_mesh(args.rows, args.cols, args.mzis_per_cell)
    placement = None
    if args.circuit_file:
        circ = circuits.parse_circuit(Path(args.circuit_file).read_text())
        placement = mesh.place_circuit(circ, lattice, args.strategy)
    _emit(mesh.render_mesh(lattice, placement), args.output_path)
    return EXIT_OK


def cmd_verify_all(args) -> int:
    results = verify.run_all()
    failed = [r for r in results if not r.passed]
    for r in results:
        sys.stdout.write(
            f"[{'PASS' if r.passed else 'FAIL'}] criterion {r.criterion}: "
            f"{r.name} ({r.elapsed_s}s) {r.detail}\n"
        )
    sys.stdout.write(f"{len(results) - len(failed)}/{len(results)} criteria passed\n")
    return EXIT_OK if not failed else EXIT_VERIFICATION_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photondistill",
        description="Linear-optical photon-distillation simulator and circuit compiler",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ztl", help="verify the zero-transmission law for QFT_m")
    p.add_argument("--m", type=int, required=True)
    _output_flags(p)
    p.set_defaults(func=cmd_ztl)

    p = sub.add_parser("distill", help="run a heralded distillation protocol")
    p.add_argument("--protocol", required=True, choices=("hom", "tree", "fourier"))
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--eps-grid", type=str, default=None)
    _output_flags(p)
    p.set_defaults(func=cmd_distill)

    p = sub.add_parser("decompose", help="decompose a unitary into two-mode elements")
    p.add_argument("--source", required=True, choices=("qft", "random", "file"))
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--n", type=int, default=None, help="qubit count; sets m = 2^n")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input-file", type=str, default=None)
    p.add_argument("--method", required=True, choices=("reck", "clements", "qfft"))
    _output_flags(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("compare", help="compare decomposition/mesh architectures")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--circuit-file", type=str, default=None)
    p.add_argument("--mzis-per-cell", type=int, default=2, choices=(2, 4))
    _output_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("mesh-render", help="draw a bricks mesh, optionally with a placement")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--mzis-per-cell", type=int, default=2, choices=(2, 4))
    p.add_argument("--circuit-file", type=str, default=None)
    p.add_argument(
        "--strategy",
        default=mesh.RECIRCULATING,
        choices=(mesh.FEED_FORWARD, mesh.RECIRCULATING),
    )
    _output_flags(p)
    p.set_defaults(func=cmd_mesh_render)

    p = sub.add_parser("verify-all", help="run every acceptance check")
    p.set_defaults(func=cmd_verify_all)
    return parser


def _output_flags(p: argparse.ArgumentParser):
    p.add_argument("--output-format", default="table", choices=("table", "records"))
    p.add_argument("--output-path", type=str, default=None)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, DimensionError, CapacityError, DegenerateHeraldError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
