"""Command-line front end: the whole workflow without the browser UI.

Exit codes: 0 success, 1 analysis-negative (asked for something the design
does not have), 2 usage error, 3 I/O or input-format error.  Results go to
stdout, logs to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .errors import AnalysisError, NetrevError
from .fsm import (
    brute_force_state_graph,
    candidates_report,
    export_dot,
    find_fsm_candidates,
    state_graph_report,
)
from .graph import build_digraph, tarjan_scc
from .harpoon import analyze_harpoon, apply_harpoon_patch, attack_report
from .library import load_gate_library
from .logutil import configure_logging
from .netlist import Netlist
from .snapshot import load_snapshot, save_snapshot
from .verilog import load_verilog, write_verilog
from .watermark import (
    extract_watermark,
    findings_csv,
    findings_report,
    remove_watermark,
    scan_watermarks,
    scrub_all,
)

log = logging.getLogger("netrev.cli")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_IO = 3

LIBRARY_ENV = "NETREV_LIBRARY"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netrev",
        description="Reverse engineering toolkit for flat gate-level netlists.")
    parser.add_argument("-l", "--library",
                        default=os.environ.get(LIBRARY_ENV),
                        help=f"gate-library JSON (default: ${LIBRARY_ENV})")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--log-channel", action="append", dest="log_channels",
                        metavar="CHANNEL", help="only show these log channels")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable output on stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p, needed=True):
        group = p.add_mutually_exclusive_group(required=needed)
        group.add_argument("-i", "--input", metavar="DESIGN_V",
                           help="structural Verilog input")
        group.add_argument("--snapshot", metavar="SNAP_JSON",
                           help="session snapshot input")

    p = sub.add_parser("parse", help="parse a design and report its size")
    add_input(p)
    p.add_argument("--save", metavar="SNAP_JSON", help="write a snapshot after parsing")

    p = sub.add_parser("stats", help="summary statistics")
    add_input(p)

    p = sub.add_parser("scc", help="strongly connected components of the gate graph")
    add_input(p)
    p.add_argument("--include-trivial", action="store_true",
                   help="also list loop-free single gates")

    p = sub.add_parser("fsm", help="FSM detection and state-graph extraction")
    fsm_sub = p.add_subparsers(dest="fsm_command", required=True)
    p_list = fsm_sub.add_parser("list", help="list FSM candidates")
    add_input(p_list)
    p_ext = fsm_sub.add_parser("extract", help="brute-force one candidate's state graph")
    add_input(p_ext)
    p_ext.add_argument("--candidate", type=int, default=0, metavar="N")
    p_ext.add_argument("--dot", metavar="OUT_DOT", help="write the state graph as DOT")
    p_ext.add_argument("--max-inputs", type=int, default=10)
    p_ext.add_argument("--max-states", type=int, default=65536)

    p = sub.add_parser("harpoon", help="enabling-key recovery and init patching")
    harpoon_sub = p.add_subparsers(dest="harpoon_command", required=True)
    p_an = harpoon_sub.add_parser("analyze", help="recover the enabling key")
    add_input(p_an)
    p_an.add_argument("--candidate", type=int, default=0, metavar="N")
    p_pa = harpoon_sub.add_parser("patch", help="rewrite FF init values")
    add_input(p_pa)
    p_pa.add_argument("--candidate", type=int, default=0, metavar="N")
    p_pa.add_argument("--save", metavar="SNAP_JSON")
    p_pa.add_argument("--write-verilog", metavar="OUT_V")

    p = sub.add_parser("watermark", help="constant-tied LUT payload analysis")
    wm_sub = p.add_subparsers(dest="wm_command", required=True)
    p_scan = wm_sub.add_parser("scan", help="scan every constant-tied LUT")
    add_input(p_scan)
    p_scan.add_argument("--csv", action="store_true", help="CSV summary output")
    p_wex = wm_sub.add_parser("extract", help="payload of one LUT")
    add_input(p_wex)
    p_wex.add_argument("--gate", type=int, required=True, metavar="GATE_ID")
    p_rm = wm_sub.add_parser("remove", help="zero unreachable config entries")
    add_input(p_rm)
    rm_target = p_rm.add_mutually_exclusive_group(required=True)
    rm_target.add_argument("--gate", type=int, metavar="GATE_ID")
    rm_target.add_argument("--all", action="store_true")
    p_rm.add_argument("--save", metavar="SNAP_JSON")
    p_rm.add_argument("--write-verilog", metavar="OUT_V")

    p = sub.add_parser("write-verilog", help="emit synthesizable structural Verilog")
    add_input(p)
    p.add_argument("-o", "--output", required=True, metavar="OUT_V")
    p.add_argument("--allow-dangling", action="store_true")

    p = sub.add_parser("snapshot", help="save or validate snapshots")
    snap_sub = p.add_subparsers(dest="snap_command", required=True)
    p_save = snap_sub.add_parser("save", help="parse input and save a snapshot")
    add_input(p_save)
    p_save.add_argument("-o", "--output", required=True, metavar="SNAP_JSON")
    p_load = snap_sub.add_parser("load", help="validate a snapshot and report stats")
    add_input(p_load)

    p = sub.add_parser("serve", help="start the HTTP API / UI service")
    add_input(p, needed=False)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ui-dir", metavar="DIR",
                   help="static UI assets directory (default: bundled frontend)")

    return parser


def _load_design(args) -> Netlist:
    if not args.library:
        raise UsageError(f"a gate library is required (-l or ${LIBRARY_ENV})")
    library = load_gate_library(args.library)
    if getattr(args, "input", None):
        return load_verilog(args.input, library)
    if getattr(args, "snapshot", None):
        return load_snapshot(args.snapshot, library)
    raise UsageError("an input design is required (-i or --snapshot)")


class UsageError(Exception):
    pass


def _emit(args, payload: dict, human_lines):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for line in human_lines:
            print(line)


def _pick_candidate(netlist, index: int):
    scan = find_fsm_candidates(netlist)
    if not scan.candidates:
        raise AnalysisError("no FSM candidates found")
    if not 0 <= index < len(scan.candidates):
        raise AnalysisError(
            f"candidate index {index} out of range (found {len(scan.candidates)})")
    return scan.candidates[index]


def _state_graph(netlist, args):
    cand = _pick_candidate(netlist, args.candidate)
    kwargs = {}
    if hasattr(args, "max_inputs"):
        kwargs = {"max_inputs": args.max_inputs, "max_states": args.max_states}
    return cand, brute_force_state_graph(netlist, cand, **kwargs)


def cmd_parse(args) -> int:
    netlist = _load_design(args)
    if args.save:
        save_snapshot(netlist, args.save)
        log.info("snapshot written to %s", args.save)
    stats = netlist.stats()
    _emit(args, stats, [f"parsed {stats['design']}: {stats['gates']} gates, "
                        f"{stats['nets']} nets"])
    return EXIT_OK


def cmd_stats(args) -> int:
    stats = _load_design(args).stats()
    lines = [f"{key}: {value}" for key, value in stats.items()]
    _emit(args, stats, lines)
    return EXIT_OK


def cmd_scc(args) -> int:
    netlist = _load_design(args)
    graph = build_digraph(netlist)
    sccs = tarjan_scc(graph, include_trivial=args.include_trivial)
    payload = {
        "count": len(sccs),
        "components": [sorted(scc) for scc in sccs],
    }
    lines = [f"{len(sccs)} strongly connected component(s)"]
    for i, scc in enumerate(payload["components"]):
        names = ", ".join(netlist.gates[g].name for g in scc[:8])
        suffix = ", ..." if len(scc) > 8 else ""
        lines.append(f"  [{i}] {len(scc)} gate(s): {names}{suffix}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_fsm(args) -> int:
    netlist = _load_design(args)
    if args.fsm_command == "list":
        scan = find_fsm_candidates(netlist)
        report = candidates_report(netlist, scan)
        lines = [f"{len(report['candidates'])} FSM candidate(s), "
                 f"{len(report['rejected'])} rejected"]
        for entry in report["candidates"]:
            ffs = ", ".join(ff["name"] for ff in entry["state_ffs"])
            ins = ", ".join(i["name"] for i in entry["inputs"])
            lines.append(f"  [{entry['index']}] {len(entry['state_ffs'])} FF(s): {ffs}"
                         f"; inputs: {ins or '-'}")
        for entry in report["rejected"]:
            lines.append(f"  rejected ({len(entry['gates'])} gates): {entry['reason']}")
        _emit(args, report, lines)
        return EXIT_OK
    cand, sg = _state_graph(netlist, args)
    if args.dot:
        export_dot(sg, args.dot)
        log.info("state graph written to %s", args.dot)
    report = state_graph_report(sg)
    lines = [f"{len(report['states'])} reachable state(s) from {report['initial_state']}",
             f"inputs: {', '.join(report['inputs']) or '-'}"]
    _emit(args, report, lines)
    return EXIT_OK


def cmd_harpoon(args) -> int:
    netlist = _load_design(args)
    cand, sg = _state_graph(netlist, args)
    result = analyze_harpoon(sg)
    report = attack_report(sg, result)
    if args.harpoon_command == "analyze":
        lines = [f"enabling key of length {report['key_length']}",
                 f"original initial state: {report['original_initial_state']}"]
        for i, step in enumerate(report["key"]):
            assignment = ", ".join(f"{k}={v}" for k, v in sorted(step.items()))
            lines.append(f"  step {i}: {assignment}")
        _emit(args, report, lines)
        return EXIT_OK
    apply_harpoon_patch(netlist, cand, result)
    if args.save:
        save_snapshot(netlist, args.save)
    if args.write_verilog:
        write_verilog(netlist, args.write_verilog)
    report["patched"] = True
    _emit(args, report, [f"patched {len(report['patched_ffs'])} FF init value(s); "
                         f"design now boots at {report['original_initial_state']}"])
    return EXIT_OK


def cmd_watermark(args) -> int:
    netlist = _load_design(args)
    if args.wm_command == "scan":
        findings = scan_watermarks(netlist)
        report = findings_report(findings)
        if args.csv and not args.json:
            sys.stdout.write(findings_csv(findings))
            return EXIT_OK
        lines = [f"{report['suspicious']} suspicious LUT(s) of "
                 f"{len(report['findings'])} constant-tied"]
        for f in report["findings"]:
            mark = "SUSPICIOUS" if f["suspicious"] else "clean"
            ties = ", ".join(f"{p}={v}" for p, v in f["tied_pins"].items())
            lines.append(f"  gate {f['gate']} ({f['name']}): {ties}; "
                         f"payload {f['payload_hex']} [{mark}]")
        _emit(args, report, lines)
        return EXIT_OK
    if args.wm_command == "extract":
        finding = extract_watermark(netlist, args.gate)
        report = findings_report([finding])
        _emit(args, report["findings"][0],
              [f"gate {finding.gate_id} payload {finding.payload_hex()} "
               f"({'suspicious' if finding.suspicious else 'clean'})"])
        return EXIT_OK
    if args.all:
        findings = scrub_all(netlist)
    else:
        findings = [remove_watermark(netlist, args.gate)]
    if args.save:
        save_snapshot(netlist, args.save)
    if args.write_verilog:
        write_verilog(netlist, args.write_verilog)
    scrubbed = sum(1 for f in findings if f.suspicious)
    _emit(args, {"scrubbed": scrubbed, **findings_report(findings)},
          [f"scrubbed {scrubbed} suspicious LUT(s)"])
    return EXIT_OK


def cmd_write_verilog(args) -> int:
    netlist = _load_design(args)
    write_verilog(netlist, args.output, allow_dangling=args.allow_dangling)
    _emit(args, {"written": args.output, "gates": len(netlist.gates)},
          [f"wrote {args.output}"])
    return EXIT_OK


def cmd_snapshot(args) -> int:
    netlist = _load_design(args)
    if args.snap_command == "save":
        save_snapshot(netlist, args.output)
        _emit(args, {"written": args.output}, [f"snapshot written to {args.output}"])
        return EXIT_OK
    stats = netlist.stats()
    _emit(args, stats, [f"snapshot ok: {stats['gates']} gates, {stats['nets']} nets"])
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    if not args.library:
        raise UsageError(f"a gate library is required (-l or ${LIBRARY_ENV})")
    library = load_gate_library(args.library)
    netlist = None
    if args.input or args.snapshot:
        netlist = _load_design(args)
    app = build_app(library, netlist, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


COMMANDS = {
    "parse": cmd_parse,
    "stats": cmd_stats,
    "scc": cmd_scc,
    "fsm": cmd_fsm,
    "harpoon": cmd_harpoon,
    "watermark": cmd_watermark,
    "write-verilog": cmd_write_verilog,
    "snapshot": cmd_snapshot,
    "serve": cmd_serve,
}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level, args.log_channels)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AnalysisError as exc:
        log.error("%s", exc)
        return EXIT_NEGATIVE
    except (NetrevError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_IO


def main():  # console_scripts entry point
    sys.exit(run())


if __name__ == "__main__":
    main()
