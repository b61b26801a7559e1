"""Command-line front end.

Subcommands cover frequency-domain analysis (``bode``, ``nyquist``,
``margins``), canceller design (``design``), FIR realization (``impulse``)
and closed/open-loop step simulation (``step``).  Every file-producing run
writes a manifest with the fully resolved parameter set so outputs can be
reproduced bit-for-bit.

Exit codes: 0 success, 2 input error, 3 design found no solution,
4 simulated loop diverged.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .canceller import (
    augmented_plant,
    design_boost_both,
    design_same_dc,
    design_same_pm,
    fractional_zero_term,
    make_canceller,
)
from .discrete import canceller_fir, write_fir_csv, zoh_discretize
from .errors import (
    FracZeroError,
    InstabilityError,
    NoSolutionError,
    PlantSpecError,
)
from .fotf import PlantParams, benchmark_plant, evaluate_grid, load_plant, scale
from .freqresp import (
    characteristic_frequency,
    freq_response,
    margins,
    write_series_csv,
)
from .ilt import TimeSamples, laplace_impulse, write_time_csv
from .loopsim import (
    DEFAULT_T_FINAL,
    LoopConfig,
    simulate_closed_step,
    simulate_open_step,
    step_metrics,
    write_trajectory_csv,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NO_SOLUTION = 3
EXIT_UNSTABLE = 4


def _add_plant_args(sub):
    g = sub.add_argument_group("plant")
    g.add_argument("--benchmark", action="store_true",
                   help="use the built-in NMP benchmark plant")
    g.add_argument("--r2c2", type=float, default=PlantParams().r2c2,
                   help="benchmark zero time constant, seconds")
    g.add_argument("--r3c3", type=float, default=PlantParams().r3c3,
                   help="benchmark pole time constant, seconds")
    g.add_argument("--plant", metavar="FILE", help="plant description JSON")


def _resolve_plant(args):
    """Returns (tf, resolved parameter dict, input digest dict)."""
    if args.plant:
        tf = load_plant(args.plant)
        return tf, {"plant_file": args.plant}, {args.plant: _sha256(args.plant)}
    if args.benchmark:
        params = PlantParams(args.r2c2, args.r3c3)
        return benchmark_plant(params), {
            "benchmark": {"r2c2": params.r2c2, "r3c3": params.r3c3}
        }, {}
    raise PlantSpecError("no plant specified: use --benchmark or --plant FILE")


def _loop_tf(plant, args):
    tf = plant
    if getattr(args, "canceller", None):
        tf = augmented_plant(tf, args.canceller)
    if getattr(args, "kp", None) is not None:
        tf = scale(tf, args.kp)
    return tf


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _write_manifest(out_path: Path, command: str, parameters: dict,
                    inputs: dict, outputs: list[Path]) -> Path:
    manifest = {
        "command": command,
        "tool_version": __version__,
        "parameters": parameters,
        "inputs": inputs,
        "outputs": [p.name for p in outputs],
    }
    path = out_path.with_name(out_path.stem + ".manifest.json")
    path.write_text(_dump_json(manifest), encoding="utf-8")
    return path


def _omega_grid(args, tf):
    f0 = characteristic_frequency(tf)
    wmin = args.wmin if args.wmin is not None else 1e-3 * f0
    wmax = args.wmax if args.wmax is not None else 1e3 * f0
    if not wmin < wmax:
        raise PlantSpecError(f"--wmin ({wmin:g}) must be below --wmax ({wmax:g})")
    if args.points < 2:
        raise PlantSpecError("--points must be >= 2")
    return np.geomspace(wmin, wmax, args.points), wmin, wmax


def _cmd_response(args, command: str) -> int:
    out = Path(args.out)
    if args.alpha_sweep:
        if args.benchmark or args.plant:
            plant, plant_params, inputs = _resolve_plant(args)
            z = plant.nmp_zero
            if not z:
                raise PlantSpecError("--alpha-sweep needs a plant with nmp_zero metadata")
        else:
            plant_params, inputs, z = {"normalized": True}, {}, 1.0
        alphas = [round(0.1 * k, 1) for k in range(1, 11)]
        wmin = args.wmin if args.wmin is not None else 1e-2 * z
        wmax = args.wmax if args.wmax is not None else 1e2 * z
        grid = np.geomspace(wmin, wmax, args.points)
        with open(out, "w", newline="", encoding="utf-8") as fh:
            fh.write("alpha,omega_rad_s,re,im,mag_db,phase_deg\n")
            for alpha in alphas:
                series_a = freq_response(fractional_zero_term(alpha, z), grid)
                mdb = series_a.magnitude_db
                for i in range(grid.size):
                    fh.write(f"{alpha!r},{float(grid[i])!r},"
                             f"{float(series_a.response[i].real)!r},"
                             f"{float(series_a.response[i].imag)!r},"
                             f"{float(mdb[i])!r},{float(series_a.phase_deg[i])!r}\n")
        params = {"alpha_sweep": alphas, "z_nmp": z, "plant": plant_params,
                  "wmin": wmin, "wmax": wmax, "points": args.points}
        _write_manifest(out, command, params, inputs, [out])
        return EXIT_OK

    plant, plant_params, inputs = _resolve_plant(args)
    tf = _loop_tf(plant, args)
    grid, wmin, wmax = _omega_grid(args, tf)
    series_ = freq_response(tf, grid)
    write_series_csv(series_, out)
    params = {"plant": plant_params, "canceller": args.canceller,
              "kp": args.kp, "wmin": wmin, "wmax": wmax, "points": args.points}
    _write_manifest(out, command, params, inputs, [out])
    return EXIT_OK


def cmd_bode(args) -> int:
    return _cmd_response(args, "bode")


def cmd_nyquist(args) -> int:
    return _cmd_response(args, "nyquist")


def cmd_margins(args) -> int:
    plant, plant_params, inputs = _resolve_plant(args)
    tf = _loop_tf(plant, args)
    report = margins(tf).as_dict()
    text = _dump_json(report)
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="utf-8")
        params = {"plant": plant_params, "canceller": args.canceller, "kp": args.kp}
        _write_manifest(out, "margins", params, inputs, [out])
    return EXIT_OK


def cmd_design(args) -> int:
    plant, plant_params, inputs = _resolve_plant(args)
    if args.mode == "same-pm":
        if args.pm is None:
            raise PlantSpecError("design same-pm requires --pm")
        design = design_same_pm(plant, args.pm, args.n)
    elif args.mode == "boost":
        if args.pm is None or args.boost is None:
            raise PlantSpecError("design boost requires --pm and --boost")
        design = design_boost_both(plant, args.pm, args.boost, args.n)
    else:  # same-dc
        if args.kp is None or args.pm is None:
            raise PlantSpecError("design same-dc requires --kp and --pm (minimum PM)")
        design = design_same_dc(plant, args.kp, args.pm)
    text = _dump_json(design.as_dict())
    sys.stdout.write(text)
    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="utf-8")
        params = {"plant": plant_params, "mode": args.mode, "pm": args.pm,
                  "boost": args.boost, "kp": args.kp, "n": args.n}
        _write_manifest(out, "design", params, inputs, [out])
    return EXIT_OK


def cmd_impulse(args) -> int:
    if args.n < 1:
        raise PlantSpecError("--n must be >= 1")
    if args.tau <= 0 or args.T <= 0 or args.len < 1:
        raise PlantSpecError("--tau and --T must be positive, --len >= 1")
    out = Path(args.out)
    z = 1.0 / args.tau
    fir = canceller_fir(z, args.n, args.T, args.len)
    if args.n == 1:
        # identity canceller: the impulse response is a delta, no samples
        samples = TimeSamples(np.array([]), np.array([]))
    else:
        tf = make_canceller(z, args.n)
        h = laplace_impulse(lambda s: evaluate_grid(tf, s))
        t_grid = (np.arange(args.len) + 0.5) * args.T
        samples = TimeSamples(t_grid, h(t_grid))
    write_time_csv(samples, out)
    fir_path = out.with_name(out.stem + ".fir.csv")
    write_fir_csv(fir, fir_path)
    sys.stdout.write(f"dc_scale = {fir.dc_scale!r}\n")
    params = {"n": args.n, "tau": args.tau, "T": args.T, "len": args.len,
              "z_nmp": z}
    _write_manifest(out, "impulse", params, {}, [out, fir_path])
    return EXIT_OK


def cmd_step(args) -> int:
    plant, plant_params, inputs = _resolve_plant(args)
    out = Path(args.out)
    dplant = zoh_discretize(plant, args.T)
    if args.open:
        traj = simulate_open_step(dplant, args.tfinal)
        params = {"plant": plant_params, "mode": "open", "T": args.T,
                  "tfinal": args.tfinal}
    else:
        fir = None
        if args.canceller and args.canceller > 1:
            if not plant.nmp_zero:
                raise PlantSpecError("--canceller needs a plant with nmp_zero metadata")
            fir = canceller_fir(plant.nmp_zero, args.canceller, args.T, args.fir_len)
        cfg = LoopConfig(kp=args.kp, plant=dplant, canceller=fir,
                         t_final=args.tfinal)
        traj = simulate_closed_step(cfg)
        params = {"plant": plant_params, "mode": "closed", "kp": args.kp,
                  "canceller": args.canceller, "T": args.T,
                  "fir_len": args.fir_len, "tfinal": args.tfinal}
    metrics = step_metrics(traj).as_dict()
    text = _dump_json(metrics)
    sys.stdout.write(text)
    write_trajectory_csv(traj, out)
    metrics_path = out.with_name(out.stem + ".metrics.json")
    metrics_path.write_text(text, encoding="utf-8")
    _write_manifest(out, "step", params, inputs, [out, metrics_path])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraczero",
        description="Fractional-order partial cancellation of NMP zeros: "
                    "analysis, design, realization, simulation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    for name, fn in (("bode", cmd_bode), ("nyquist", cmd_nyquist)):
        sp = subs.add_parser(name, help=f"{name} response CSV")
        _add_plant_args(sp)
        sp.add_argument("--canceller", type=int, metavar="N",
                        help="insert an order-N canceller in series")
        sp.add_argument("--kp", type=float, help="proportional gain")
        sp.add_argument("--alpha-sweep", action="store_true",
                        help="emit the partly-cancelled zero term family "
                             "for alpha = 0.1 .. 1.0 instead of a plant response")
        sp.add_argument("--wmin", type=float, help="lowest frequency, rad/s")
        sp.add_argument("--wmax", type=float, help="highest frequency, rad/s")
        sp.add_argument("--points", type=int, default=500)
        sp.add_argument("--out", required=True, help="output CSV path")
        sp.set_defaults(func=fn)

    sp = subs.add_parser("margins", help="crossovers, PM/GM/kappa JSON")
    _add_plant_args(sp)
    sp.add_argument("--canceller", type=int, metavar="N")
    sp.add_argument("--kp", type=float)
    sp.add_argument("--out", help="also write the JSON here (with manifest)")
    sp.set_defaults(func=cmd_margins)

    sp = subs.add_parser("design", help="canceller + gain design JSON")
    sp.add_argument("mode", choices=["same-pm", "boost", "same-dc"])
    _add_plant_args(sp)
    sp.add_argument("--pm", type=float,
                    help="target PM (same-pm/boost) or minimum PM (same-dc), degrees")
    sp.add_argument("--boost", type=float, help="extra PM on top of --pm, degrees")
    sp.add_argument("--kp", type=float, help="fixed gain for same-dc")
    sp.add_argument("--n", type=int, default=2, help="cancellation order")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_design)

    sp = subs.add_parser("impulse", help="canceller impulse response + FIR table")
    sp.add_argument("--n", type=int, required=True, help="cancellation order")
    sp.add_argument("--tau", type=float, default=PlantParams().r2c2,
                    help="zero time constant 1/z_nmp, seconds")
    sp.add_argument("--T", type=float, default=0.05, help="sample period, seconds")
    sp.add_argument("--len", type=int, default=100, help="FIR length")
    sp.add_argument("--out", required=True, help="continuous-samples CSV path")
    sp.set_defaults(func=cmd_impulse)

    sp = subs.add_parser("step", help="step-response simulation CSV + metrics")
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--open", action="store_true", help="open-loop plant step")
    mode.add_argument("--closed", action="store_true", help="closed-loop step")
    _add_plant_args(sp)
    sp.add_argument("--kp", type=float, default=1.0)
    sp.add_argument("--canceller", type=int, metavar="N")
    sp.add_argument("--tfinal", type=float, default=DEFAULT_T_FINAL)
    sp.add_argument("--T", type=float, default=0.05)
    sp.add_argument("--fir-len", type=int, default=100)
    sp.add_argument("--out", required=True, help="trajectory CSV path")
    sp.set_defaults(func=cmd_step)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PlantSpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoSolutionError as exc:
        print(f"no solution: {exc}", file=sys.stderr)
        return EXIT_NO_SOLUTION
    except InstabilityError as exc:
        print(f"unstable: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except FracZeroError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
