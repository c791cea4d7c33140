"""Command-line entry point: ``auditory-fb <command> [flags]``.

Commands emit CSV (or JSON for ``design``) to stdout unless ``--out`` is
given. Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .design import (
    DesignRequest,
    ErbScaled,
    coverage_closed_form_linear_erb,
    coverage_closed_form_log,
    design_filterbank,
    solve_n_bands,
)
from .errors import DomainError, NumericalError, UnreachableTargetError
from .gammatone import apply_filterbank, gammatone_q_factor, k_of_n, make_filter, magnitude_response, measure_bandwidth
from .scales import (
    DEFAULT_FM,
    DEFAULT_LOG_A,
    LinearErb,
    LinearErbScale,
    LogErb,
    LogScale,
    erb,
    erbs,
    fit_log_erb_slope,
    read_erb_csv,
)
from .signals import SampledSignal, load_speaker, mix
from .wavio import read_wav, write_wav

log = logging.getLogger("auditory_fb")


class UsageError(Exception):
    """Bad flag value; reported with exit code 2."""


def _fmt(x) -> str:
    return format(float(x), ".9g")


def _require(cond, flag, message):
    if not cond:
        raise UsageError(f"{flag}: {message}")


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _check_range(args):
    _require(args.fmin > 0 and math.isfinite(args.fmin), "--fmin", "must be a finite value > 0")
    _require(args.fmax > args.fmin and math.isfinite(args.fmax), "--fmax", "must be finite and > --fmin")


def _check_models(args):
    _require(args.A > 0, "--A", "must be > 0")
    _require(args.fm > 0, "--fm", "must be > 0")
    _require(args.D > 0, "--D", "must be > 0")
    _require(args.E > 0, "--E", "must be > 0")
    _require(1 <= args.order <= 12, "--order", "must be in [1, 12]")


def _rule_and_scale(args, scale_name):
    k = k_of_n(args.order)
    if scale_name == "log":
        return LogScale(args.A, args.fm), ErbScaled(k, LogErb(args.A))
    model = LinearErb(args.D, args.E)
    return LinearErbScale(model), ErbScaled(k, model)


def _request(args, n_bands, scale_name=None):
    scale_name = scale_name or args.scale
    scale, rule = _rule_and_scale(args, scale_name)
    if scale_name == "log":
        _require(args.fmin > args.fm, "--fmin", f"must exceed --fm ({args.fm:g} Hz) on the log scale")
    return DesignRequest(args.fmin, args.fmax, n_bands, scale, rule)


# commands


def cmd_design(args):
    _check_range(args)
    _check_models(args)
    extra = {"order": args.order}
    if args.coverage is not None:
        _require(args.coverage > 0, "--coverage", "must be > 0")
        _, rule = _rule_and_scale(args, args.scale)
        n_bands = solve_n_bands(args.fmin, args.fmax, args.coverage, rule)
        extra.update(target_coverage=args.coverage, solved_n_bands=n_bands)
    else:
        _require(args.nbands >= 2, "--nbands", "must be >= 2")
        n_bands = args.nbands
    design = design_filterbank(_request(args, n_bands))
    if args.format == "csv":
        _emit(design.to_csv(), args.out)
        return
    if not args.reproducible:
        extra["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    _emit(design.to_json(**extra), args.out)


def cmd_scale_export(args):
    _check_range(args)
    _check_models(args)
    _require(args.grid_min > 0, "--grid-min", "must be > 0")
    _require(args.grid_max > args.grid_min, "--grid-max", "must be > --grid-min")
    _require(args.points >= 2, "--points", "must be >= 2")
    _require(args.nbands >= 2, "--nbands", "must be >= 2")
    lin = LinearErbScale(LinearErb(args.D, args.E))
    lg = LogScale(args.A, args.fm)
    grid = np.concatenate([[0.0], np.geomspace(args.grid_min, args.grid_max, args.points)])
    rows = [(f, erbs(lin, f), erbs(lg, f), "grid") for f in grid]
    for name in ("log", "linear-erb"):
        centers = design_filterbank(_request(args, args.nbands, name)).centers
        rows += [(f, erbs(lin, f), erbs(lg, f), f"center_{name.replace('-', '_')}") for f in centers]
    _emit(_csv(["freq_hz", "erbs_linear", "erbs_log", "kind"], rows), args.out)


def cmd_coverage_sweep(args):
    _check_range(args)
    _check_models(args)
    _require(args.nbands_max >= 2, "--nbands-max", "must be >= 2")
    k = k_of_n(args.order)
    eta = gammatone_q_factor(args.order, args.A)
    rows = [
        (
            str(nb),
            coverage_closed_form_log(args.fmin, args.fmax, nb, eta),
            coverage_closed_form_linear_erb(args.fmin, args.fmax, nb, args.D, args.E, k),
        )
        for nb in range(2, args.nbands_max + 1)
    ]
    _emit(_csv(["nbands", "coverage_log", "coverage_linear_erb"], rows), args.out)


def cmd_qfactor_sweep(args):
    _check_models(args)
    _require(args.grid_min > 0, "--grid-min", "must be > 0")
    _require(args.grid_max > args.grid_min, "--grid-max", "must be > --grid-min")
    _require(args.points >= 2, "--points", "must be >= 2")
    k = k_of_n(args.order)
    grid = np.geomspace(args.grid_min, args.grid_max, args.points)
    q_log = grid / (k * np.asarray(erb(LogErb(args.A), grid)))
    q_lin = grid / (k * np.asarray(erb(LinearErb(args.D, args.E), grid)))
    _emit(_csv(["freq_hz", "q_log", "q_linear_erb"], zip(grid, q_log, q_lin)), args.out)


def cmd_fit(args):
    points = read_erb_csv(args.csv)
    A = fit_log_erb_slope(points)
    f = np.array([p[0] for p in points])
    measured = np.array([p[1] for p in points])
    fitted = f / A
    linear = np.asarray(erb(LinearErb(args.D, args.E), f))
    rms = float(np.sqrt(np.mean((measured - fitted) ** 2)))
    print(f"fitted_A={_fmt(A)}", file=sys.stderr)
    print(f"residual_rms_hz={_fmt(rms)}", file=sys.stderr)
    rows = zip(f, measured, fitted, linear)
    _emit(_csv(["freq_hz", "erb_measured", "erb_log_fit", "erb_linear"], rows), args.out)


def cmd_synth(args):
    _require(args.duration > 0, "--duration", "must be > 0")
    _require(args.sample_rate > 0 and args.sample_rate == int(args.sample_rate), "--sample-rate", "must be a positive integer")
    speakers = [load_speaker(p) for p in args.speaker]
    signal = mix(speakers, args.duration, args.sample_rate)
    if args.peak is not None:
        _require(0 < args.peak <= 1, "--peak", "must be in (0, 1]")
        top = np.max(np.abs(signal.samples))
        if top > 0:
            signal = SampledSignal(signal.samples * (args.peak / top), signal.sample_rate_hz)
    clipped = write_wav(args.out, signal)
    if clipped:
        log.warning("%d samples clipped; use --peak to normalize", clipped)


def cmd_filter(args):
    _check_range(args)
    _check_models(args)
    _require(args.nbands >= 2, "--nbands", "must be >= 2")
    signal = read_wav(args.input)
    design = design_filterbank(_request(args, args.nbands))
    bands = apply_filterbank(design, args.order, signal)
    if args.out_dir is not None:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = Path(args.input).stem
        for b, band in enumerate(bands, start=1):
            write_wav(out_dir / f"{stem}_band{b}.wav", band)
    rows = [(str(b), fc, band.rms()) for b, (fc, band) in enumerate(zip(design.centers, bands), start=1)]
    _emit(_csv(["band", "center_hz", "rms"], rows), args.out)


def cmd_response(args):
    _check_models(args)
    _require(args.center > 0, "--center", "must be > 0")
    _require(args.center < args.sample_rate / 2, "--center", "must be below Nyquist")
    model = LogErb(args.A) if args.erb == "log" else LinearErb(args.D, args.E)
    filt = make_filter(args.order, args.center, model, args.sample_rate)
    freqs, mag = magnitude_response(filt, args.nfft)
    measured = measure_bandwidth(filt, args.nfft)
    print(f"erb_hz={_fmt(measured.erb_hz)}", file=sys.stderr)
    print(f"bw3db_hz={_fmt(measured.bw3db_hz)}", file=sys.stderr)
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(mag)
    db = np.maximum(db, -400.0)
    _emit(_csv(["freq_hz", "magnitude_db"], zip(freqs, db)), args.out)


# parser


def _add_models(p, order=True):
    p.add_argument("--A", type=float, default=DEFAULT_LOG_A, help="log ERB slope, ERB = f/A (default 7.7)")
    p.add_argument("--fm", type=float, default=DEFAULT_FM, help="log scale zero point in Hz (default 20)")
    p.add_argument("--D", type=float, default=24.7, help="linear ERB intercept in Hz (default 24.7)")
    p.add_argument("--E", type=float, default=0.108, help="linear ERB slope (default 0.108)")
    if order:
        p.add_argument("--order", type=int, default=4, help="gammatone order (default 4)")


def _add_range(p):
    p.add_argument("--fmin", type=float, default=200.0)
    p.add_argument("--fmax", type=float, default=3600.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="auditory-fb", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="select center frequencies and export the design")
    p.add_argument("--scale", choices=["log", "linear-erb"], default="log")
    _add_range(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--nbands", type=int, default=16)
    group.add_argument("--coverage", type=float, help="solve for the smallest band count reaching this coverage")
    _add_models(p)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--reproducible", action="store_true", help="omit generated_at")
    p.add_argument("--out")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("scale-export", help="ERB-rate curves of both scales plus selected centers")
    _add_range(p)
    p.add_argument("--nbands", type=int, default=16)
    p.add_argument("--grid-min", type=float, default=DEFAULT_FM)
    p.add_argument("--grid-max", type=float, default=8000.0)
    p.add_argument("--points", type=int, default=200)
    _add_models(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scale_export)

    p = sub.add_parser("coverage-sweep", help="closed-form coverage of both scales versus band count")
    _add_range(p)
    p.add_argument("--nbands-max", type=int, default=40)
    _add_models(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_coverage_sweep)

    p = sub.add_parser("qfactor-sweep", help="gammatone Q-factor versus frequency for both ERB models")
    p.add_argument("--grid-min", type=float, default=200.0)
    p.add_argument("--grid-max", type=float, default=3600.0)
    p.add_argument("--points", type=int, default=100)
    _add_models(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_qfactor_sweep)

    p = sub.add_parser("fit", help="fit A in ERB = f/A to a freq_hz,erb_hz CSV")
    p.add_argument("csv")
    _add_models(p, order=False)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("synth", help="synthesize harmonic speakers to a WAV file")
    p.add_argument("--speaker", action="append", required=True, help="speaker spec JSON (repeatable)")
    p.add_argument("--duration", type=float, default=1.0)
    p.add_argument("--sample-rate", type=float, default=16000.0)
    p.add_argument("--peak", type=float, help="normalize the mix to this peak amplitude")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("filter", help="run a WAV through a gammatone filterbank")
    p.add_argument("--input", required=True)
    p.add_argument("--scale", choices=["log", "linear-erb"], default="log")
    _add_range(p)
    p.add_argument("--nbands", type=int, default=16)
    _add_models(p)
    p.add_argument("--out-dir", help="directory for per-band WAVs")
    p.add_argument("--out", help="per-band RMS CSV (default stdout)")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("response", help="magnitude response of one gammatone filter")
    p.add_argument("--center", type=float, default=1000.0)
    p.add_argument("--erb", choices=["log", "linear"], default="linear")
    p.add_argument("--sample-rate", type=float, default=16000.0)
    p.add_argument("--nfft", type=int)
    _add_models(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_response)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except UnreachableTargetError as exc:
        print(f"error: {exc} (achievable range {exc.floor:.6g} to {exc.ceiling:.6g})", file=sys.stderr)
        return 2
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
