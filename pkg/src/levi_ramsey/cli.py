"""Command-line front end.

Subcommands: ``params``, ``trajectory``, ``fringe``, ``thermal``, ``verify``.
Every command reads an optional JSON config (defaults shipped in the
package), writes its outputs atomically with 12 significant digits, and drops
a run manifest next to them.  Exit codes: 0 ok, 1 verification failure,
2 usage or config error.  ``LEVI_RAMSEY_THREADS`` caps the linear-algebra
thread pools and is applied before the numeric modules load.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile

_VERSION = "0.1.0"

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

TRAJECTORY_HEADER = "t,re_beta,im_beta,phase,s_z"
FRINGE_HEADER = "theta,delta_phi,contrast,p0,pplus,pminus"
THERMAL_HEADER = "sample,re_beta,im_beta,p0"


def _apply_thread_cap() -> None:
    cap = os.environ.get("LEVI_RAMSEY_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, cap)


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_manifest(command: str, config_path: str | None, config_bytes: bytes,
                    seed: int | None, outputs: list[str]) -> None:
    manifest = {
        "command": command,
        "config_path": config_path,
        "config_sha256": hashlib.sha256(config_bytes).hexdigest(),
        "seed": seed,
        "outputs": [os.path.abspath(p) for p in outputs],
        "tool_version": _VERSION,
    }
    base = outputs[0] if outputs else f"{command}.out"
    path = os.path.join(os.path.dirname(os.path.abspath(base)),
                        f"{command}.manifest.json")
    _atomic_write(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_document(path: str | None):
    from .constants import ConfigDocument, ExperimentConfig, parse_config_document
    if path is None:
        return ConfigDocument(config=ExperimentConfig()), b"{}"
    with open(path, "rb") as fh:
        raw = fh.read()
    data = json.loads(raw.decode("utf-8"))
    return parse_config_document(data), raw


def _parse_beta(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as err:
        raise ValueError(f"cannot parse beta {text!r}; use forms like 2+1.5j") from err


def cmd_params(args) -> int:
    from .constants import derive_couplings
    document, raw = _load_document(args.config)
    derived = derive_couplings(document.config)
    payload = derived.to_dict()
    payload["gamma_sc_over_omega_z"] = derived.gamma_sc / document.config.omega_z
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    out = args.output or "derived.json"
    _atomic_write(out, text)
    _write_manifest("params", args.config, raw, None, [out])
    sys.stdout.write(text)
    return EXIT_OK


def cmd_trajectory(args) -> int:
    from .dynamics import trajectory
    document, raw = _load_document(args.config)
    couplings = document.reduced()
    betas = [_parse_beta(b) for b in args.beta] if args.beta else [0j, 2 + 1.5j]
    spins = args.sz if args.sz else [1, -1]
    if args.samples < 1:
        raise ValueError("--samples must be >= 1")
    t0 = couplings.t0
    times = [i * t0 / (args.samples - 1) for i in range(args.samples)] \
        if args.samples > 1 else [0.0]
    lines = [TRAJECTORY_HEADER]
    for beta in betas:
        for s_z in spins:
            for point in trajectory(beta, s_z, times, couplings):
                lines.append(",".join([_fmt(point.t), _fmt(point.label.real),
                                       _fmt(point.label.imag), _fmt(point.phase),
                                       str(s_z)]))
    out = args.output or "trajectory.csv"
    _atomic_write(out, "\n".join(lines) + "\n")
    _write_manifest("trajectory", args.config, raw, None, [out])
    return EXIT_OK


def cmd_fringe(args) -> int:
    import numpy as np
    from .ramsey import fringe_scan
    document, raw = _load_document(args.config)
    couplings = document.reduced()
    if args.steps < 1:
        raise ValueError("--steps must be >= 1; the theta grid may not be empty")
    theta_min = args.theta_min if args.theta_min is not None else math.pi / 2 - math.pi / 20
    theta_max = args.theta_max if args.theta_max is not None else math.pi / 2
    thetas = np.linspace(theta_min, theta_max, args.steps)
    kwargs = {}
    if args.contrast == "on":
        from .constants import derive_couplings
        derived = derive_couplings(document.config)
        kwargs = {"T2": document.config.T2, "gamma_max": derived.gamma_max}
    scan = fringe_scan([float(t) for t in thetas], couplings,
                       echo=(args.echo == "on"), **kwargs)
    lines = [FRINGE_HEADER]
    for row in scan.rows:
        lines.append(",".join(_fmt(v) for v in
                              (row.theta, row.delta_phi, row.contrast,
                               row.p0, row.pplus, row.pminus)))
    out = args.output or "fringe.csv"
    _atomic_write(out, "\n".join(lines) + "\n")
    _write_manifest("fringe", args.config, raw, None, [out])
    return EXIT_OK


def cmd_thermal(args) -> int:
    from .constants import derive_couplings
    from .sequences import PulseSequence
    from .thermal import ThermalSpec, monte_carlo_fringe
    document, raw = _load_document(args.config)
    couplings = document.reduced()
    nbar = args.nbar if args.nbar is not None else derive_couplings(document.config).nbar
    spec = ThermalSpec(nbar=nbar, n_samples=args.samples, seed=args.seed)
    if document.sequence is not None:
        sequence = PulseSequence.from_json(document.sequence, document.config.rabi_Omega)
    else:
        sequence = PulseSequence.ramsey(document.config.rabi_Omega)
    result = monte_carlo_fringe(spec, None, couplings, sequence)
    lines = [THERMAL_HEADER]
    for i, (beta, p0) in enumerate(zip(result.betas, result.p0_samples)):
        lines.append(",".join([str(i), _fmt(beta.real), _fmt(beta.imag), _fmt(p0)]))
    out = args.output or "thermal_samples.csv"
    summary_path = args.summary or "thermal_summary.json"
    summary = {
        "nbar": spec.nbar,
        "n_samples": spec.n_samples,
        "seed": spec.seed,
        "mean_p0": result.mean,
        "spread": result.spread,
    }
    _atomic_write(out, "\n".join(lines) + "\n")
    _atomic_write(summary_path, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write_manifest("thermal", args.config, raw, spec.seed, [out, summary_path])
    sys.stdout.write(f"mean_p0={result.mean:.12g} spread={result.spread:.3g}\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suite
    document, raw = _load_document(args.config)
    sign = -1.0 if args.inject_lambda_sign_flip else 1.0
    report = run_suite(document, suite=args.suite, engine_lambda_sign=sign)
    out = args.report or "verify_report.json"
    _atomic_write(out, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    _write_manifest("verify", args.config, raw, None, [out])
    for res in report.results:
        status = "pass" if res.passed else "FAIL"
        sys.stdout.write(f"{status}  {res.name}: measured {res.measured:.3g} "
                         f"(tolerance {res.tolerance:.3g})\n")
    sys.stdout.write(f"suite={report.suite} passed={report.passed} "
                     f"runtime={report.runtime_s:.1f}s\n")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levi-ramsey",
        description="Spin-probed interferometry of a levitated nano-oscillator: "
                    "derived parameters, trajectories, fringes, thermal ensembles, "
                    "and self-verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="derive all coupling constants from a config")
    p.add_argument("config", nargs="?", help="config JSON path (omit for defaults)")
    p.add_argument("-o", "--output", help="output JSON path (default derived.json)")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("trajectory", help="phase-space trajectory CSV")
    p.add_argument("config", nargs="?")
    p.add_argument("--beta", action="append",
                   help="initial coherent label, e.g. 0 or 2+1.5j (repeatable)")
    p.add_argument("--sz", action="append", type=int, choices=[-1, 0, 1],
                   help="spin sector (repeatable; default +1 and -1)")
    p.add_argument("--samples", type=int, default=64,
                   help="number of time samples over one period (default 64)")
    p.add_argument("-o", "--output", help="output CSV path (default trajectory.csv)")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("fringe", help="population fringe over a theta grid")
    p.add_argument("config", nargs="?")
    p.add_argument("--theta-min", type=float, help="default pi/2 - pi/20")
    p.add_argument("--theta-max", type=float, help="default pi/2")
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--contrast", choices=["on", "off"], default="off",
                   help="apply the dephasing and scattering contrast factors")
    p.add_argument("--echo", choices=["on", "off"], default="off",
                   help="use the echo-with-orientation-flip protocol (doubled phase)")
    p.add_argument("-o", "--output", help="output CSV path (default fringe.csv)")
    p.set_defaults(func=cmd_fringe)

    p = sub.add_parser("thermal", help="thermal-ensemble Monte Carlo")
    p.add_argument("config", nargs="?")
    p.add_argument("--nbar", type=float, help="occupation (default: from config temperature)")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=2013)
    p.add_argument("-o", "--output", help="samples CSV path (default thermal_samples.csv)")
    p.add_argument("--summary", help="summary JSON path (default thermal_summary.json)")
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("verify", help="run the self-verification suite")
    p.add_argument("config", nargs="?")
    p.add_argument("--suite", choices=["quick", "full"], default="quick")
    p.add_argument("--report", help="report JSON path (default verify_report.json)")
    p.add_argument("--inject-lambda-sign-flip", action="store_true",
                   help="debug: corrupt the engine coupling sign (negative control)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        # argparse exits with 2 on usage errors already; normalize other codes
        return EXIT_USAGE if err.code not in (0,) else 0
    from .errors import ConfigError, DomainError, SequenceError
    try:
        return args.func(args)
    except (ConfigError, SequenceError, DomainError, ValueError,
            FileNotFoundError, json.JSONDecodeError) as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
