"""Command-line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

import argparse
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .acquisition import (AcquisitionModel, PATTERNS, SamplingMask, estimate_sensitivities,
                          gen_mask, rss)
from .acquisition.masks import CUSTOM
from .core import make_rng
from .evaluation import (PSNR_CAP, AblationVariant, RunRecord, psnr, run_ablations, ssim,
                         sweep_cg_iters, sweep_hyperparams, zero_filled)
from .io import (OUTPUT_ROOT_ENV, ConfigError, RunConfig, default_config_text, export_png,
                 load_config, read_array, to_toml, write_array, write_loss_log, write_manifest,
                 write_metrics_csv, write_sweep)
from .io.arrays import atomic_write_bytes
from .io.manifest import utc_now
from .unroll import train

log = logging.getLogger("inrrecon")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    """Bad invocation detected after argument parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _grid(text):
    """``lo:hi:step`` (inclusive) or a comma list."""
    if ":" in text:
        try:
            lo, hi, step = (float(v) for v in text.split(":"))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected lo:hi:step, got {text!r}")
        if step <= 0 or hi < lo:
            raise argparse.ArgumentTypeError(f"empty grid {text!r}")
        n = int(round((hi - lo) / step)) + 1
        return [round(lo + k * step, 12) for k in range(n)]
    return _floats(text)


def _variants(text):
    try:
        return [AblationVariant(v.strip()) for v in text.split(",")]
    except ValueError:
        choices = ", ".join(v.value for v in AblationVariant)
        raise argparse.ArgumentTypeError(f"unknown variant in {text!r}; choose from {choices}")


def _load_run_config(args):
    if args.print_default_config:
        sys.stdout.write(default_config_text())
        return None
    cfg = load_config(args.config) if args.config else RunConfig()
    un = {}
    for name, key in (("epochs", "epochs"), ("train_seed", "seed"), ("cg_iters", "cg_iters")):
        value = getattr(args, name, None)
        if value is not None:
            un[key] = value
    if un:
        try:
            cfg = replace(cfg, unroll=replace(cfg.unroll, **un))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if getattr(args, "out", None):
        cfg = replace(cfg, output_dir=args.out)
    return cfg


def _build_scenario(spec):
    try:
        return spec.build()
    except ValueError as exc:
        raise UsageError(f"invalid scenario: {exc}") from None


def _run_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def _save_config(run_dir, cfg):
    # the copy lives in the run directory, so the directory itself is left out
    text = to_toml(replace(cfg, output_dir=""))
    atomic_write_bytes(os.path.join(run_dir, "config.toml"), text.encode())


def _default_out(prefix, fingerprint):
    root = os.environ.get(OUTPUT_ROOT_ENV) or "runs"
    return os.path.join(root, f"{prefix}-{fingerprint[:12]}")


# -- subcommands -------------------------------------------------------------


def cmd_simulate(args):
    cfg = _load_run_config(args)
    if cfg is None:
        return EXIT_OK
    spec = cfg.scenario
    over = {k: getattr(args, k) for k in ("size", "coils", "noise", "pattern", "accel", "acs",
                                          "seed", "phase")
            if getattr(args, k) is not None}
    try:
        spec = replace(spec, **over)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sc = _build_scenario(spec)
    started = utc_now()
    fp = RunConfig(spec, cfg.unroll).fingerprint()
    out = _run_dir(args.out or _default_out("simulate", fp))
    write_array(os.path.join(out, "image.cxg"), sc.image)
    write_array(os.path.join(out, "maps.cxg"), sc.model.maps)
    write_array(os.path.join(out, "mask.cxg"), sc.model.mask.sampled)
    write_array(os.path.join(out, "kspace.cxg"), sc.kspace)
    _save_config(out, replace(cfg, scenario=spec))
    write_manifest(out, "simulate", fp, started,
                   metrics={"undersampling_rate": sc.model.mask.undersampling_rate,
                            "acceleration": sc.model.mask.acceleration})
    print(f"wrote {out}")
    return EXIT_OK


def cmd_mask(args):
    try:
        mask = gen_mask(args.pattern, args.height or args.size, args.width or args.size,
                        args.accel, args.acs, make_rng(args.seed))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    started = utc_now()
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    write_array(args.out, mask.sampled)
    if args.png:
        export_png(mask.sampled, args.png, window=(0.0, 1.0))
    print(f"pattern {mask.pattern}  lines {mask.num_lines}  "
          f"rate {100 * mask.undersampling_rate:.2f}%  R {mask.acceleration:.3f}")
    if args.manifest:
        write_manifest(out_dir, "mask", "", started,
                       metrics={"num_lines": mask.num_lines,
                                "undersampling_rate": mask.undersampling_rate})
    return EXIT_OK


def _model_from_files(args):
    ksp = read_array(args.kspace)
    if ksp.ndim == 2:
        ksp = ksp[None]
    sampled = read_array(args.mask).real if args.mask else (np.abs(ksp).sum(0) > 0).astype(float)
    mask = SamplingMask(CUSTOM, sampled, args.acs or 0)
    if args.maps:
        maps = read_array(args.maps)
    else:
        if not args.acs:
            raise UsageError("--maps or --acs is required to reconstruct from a k-space file")
        maps = estimate_sensitivities(ksp, mask)
    return ksp.astype(np.complex128), AcquisitionModel(maps, mask)


def cmd_recon(args):
    cfg = _load_run_config(args)
    if cfg is None:
        return EXIT_OK
    started = utc_now()
    inputs = [args.config] if args.config else []
    reference = None
    if args.kspace:
        y, model = _model_from_files(args)
        inputs += [p for p in (args.kspace, args.maps, args.mask) if p]
        if args.reference:
            reference = read_array(args.reference)
            inputs.append(args.reference)
    else:
        sc = _build_scenario(cfg.scenario)
        y, model, reference = sc.kspace, sc.model, sc.image
    out = _run_dir(cfg.resolve_output_dir("recon"))
    _save_config(out, cfg)
    log.info("training %d epochs into %s", cfg.unroll.epochs, out)
    report, _ = train(y, model, cfg.unroll, reference=reference)
    write_array(os.path.join(out, "recon.cxg"), report.x_hat)
    export_png(report.x_hat, os.path.join(out, "recon.png"))
    zf = zero_filled(y, model)
    write_array(os.path.join(out, "zero_filled.cxg"), zf)
    write_loss_log(os.path.join(out, "loss_log.csv"), report.history)
    metrics = {"lambda": report.lam, "lambda_s": report.lambda_s,
               "epochs_run": len(report.history), "stop_reason": report.stop_reason}
    if reference is not None:
        rec = RunRecord("baseline", cfg.unroll.seed, report.psnr, report.ssim, report.seconds)
        zrec = RunRecord("zero_filled", cfg.unroll.seed, psnr(reference, zf), ssim(reference, zf),
                         0.0)
        write_metrics_csv(os.path.join(out, "metrics.csv"), [rec, zrec])
        metrics.update(psnr_db=report.psnr, ssim=report.ssim, zero_filled_psnr_db=zrec.psnr)
        print(f"PSNR {report.psnr:.3f} dB  SSIM {report.ssim:.4f}  "
              f"(zero-filled {zrec.psnr:.3f} dB)")
    write_manifest(out, "recon", report.fingerprint, started, inputs, metrics)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_eval(args):
    ref, test = read_array(args.ref), read_array(args.test)
    if ref.shape != test.shape:
        raise UsageError(f"shape mismatch: {ref.shape} vs {test.shape}")
    p = psnr(ref, test)
    s = ssim(ref, test)
    p_text = "inf (identical)" if p == PSNR_CAP else f"{p:.4f}"
    print(f"PSNR {p_text} dB")
    print(f"SSIM {s:.6f}")
    return EXIT_OK


def _scenario_config(args):
    cfg = _load_run_config(args)
    if cfg is None:
        return None
    if args.size is not None:
        cfg = replace(cfg, scenario=replace(cfg.scenario, size=args.size))
    _build_scenario(cfg.scenario)  # fail fast on an impossible scenario
    return cfg


def cmd_ablate(args):
    cfg = _scenario_config(args)
    if cfg is None:
        return EXIT_OK
    started = utc_now()
    out = _run_dir(cfg.resolve_output_dir("ablate"))
    _save_config(out, cfg)
    res = run_ablations(args.variants, cfg.scenario, cfg.unroll, args.seeds,
                        callback=lambda r: log.info("%s seed %d: %.3f dB", r.label, r.seed, r.psnr))
    write_sweep(res, os.path.join(out, "metrics.csv"), os.path.join(out, "ablation.json"))
    for row in res.rows:
        print(f"{row.axis['variant']:>15}  PSNR {row.psnr_mean:.3f} +- {row.psnr_std:.3f}  "
              f"SSIM {row.ssim_mean:.4f} +- {row.ssim_std:.4f}")
    write_manifest(out, "ablate", cfg.fingerprint(), started,
                   [args.config] if args.config else [],
                   {r.axis["variant"]: r.psnr_mean for r in res.rows})
    print(f"wrote {out}")
    return EXIT_OK


def cmd_sweep(args):
    cfg = _scenario_config(args)
    if cfg is None:
        return EXIT_OK
    started = utc_now()
    out = _run_dir(cfg.resolve_output_dir(f"sweep-{args.kind}"))
    _save_config(out, cfg)
    cb = lambda r: log.info("%s seed %d: %.3f dB", r.label, r.seed, r.psnr)  # noqa: E731
    if args.kind == "hyper":
        res = sweep_hyperparams(cfg.scenario, cfg.unroll, args.lambdas, args.lambdas_s,
                                args.seeds, cross=args.cross, callback=cb)
    else:
        res = sweep_cg_iters(cfg.scenario, cfg.unroll, args.iters, args.seeds, callback=cb)
    write_sweep(res, os.path.join(out, "metrics.csv"), os.path.join(out, "sweep.json"))
    for row in res.rows:
        axis = " ".join(f"{k}={v}" for k, v in row.axis.items())
        print(f"{axis:>28}  PSNR {row.psnr_mean:.3f}  SSIM {row.ssim_mean:.4f}  "
              f"{row.seconds_mean:.1f} s" + (f"  missing {row.num_missing}" if row.num_missing else ""))
    write_manifest(out, f"sweep-{args.kind}", cfg.fingerprint(), started,
                   [args.config] if args.config else [], {"rows": len(res.rows)})
    print(f"wrote {out}")
    return EXIT_OK


def cmd_export(args):
    arr = read_array(args.input)
    if arr.ndim == 3:
        arr = arr[args.coil] if args.coil is not None else rss(arr)
    elif arr.ndim != 2:
        raise UsageError(f"expected a 2D image or (C, H, W) stack, got shape {arr.shape}")
    window = tuple(args.window) if args.window else None
    try:
        export_png(arr, args.out, window)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(f"wrote {args.out}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def _config_args(p, with_out=True):
    p.add_argument("--config", help="TOML run configuration (see --print-default-config)")
    p.add_argument("--print-default-config", action="store_true",
                   help="print the reference configuration with every default and exit")
    if with_out:
        p.add_argument("--out", help=f"output directory (default under ${OUTPUT_ROOT_ENV})")


def build_parser():
    parser = _Parser(prog="inrrecon", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("simulate", help="simulate phantom, coil maps, mask and k-space")
    _config_args(p)
    p.add_argument("--size", type=int)
    p.add_argument("--coils", type=int)
    p.add_argument("--noise", type=float)
    p.add_argument("--pattern", choices=PATTERNS)
    p.add_argument("--accel", type=float)
    p.add_argument("--acs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--phase", type=float)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("mask", help="generate a sampling mask")
    p.add_argument("--pattern", choices=PATTERNS, default="random-lines")
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--height", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--accel", type=float, required=True)
    p.add_argument("--acs", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="mask array file")
    p.add_argument("--png", help="also write a PNG of the mask")
    p.add_argument("--manifest", action="store_true",
                   help="write a manifest for the output directory")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("recon", help="train and reconstruct one scan")
    _config_args(p)
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", dest="train_seed", type=int, help="network initialization seed")
    p.add_argument("--cg-iters", type=int)
    p.add_argument("--kspace", help="measured (C, H, W) k-space array; default simulates")
    p.add_argument("--maps", help="coil sensitivity array for --kspace")
    p.add_argument("--mask", help="sampling mask array for --kspace")
    p.add_argument("--acs", type=int, help="calibration size, for map estimation")
    p.add_argument("--reference", help="ground-truth image for metrics")
    p.set_defaults(func=cmd_recon)

    p = sub.add_parser("eval", help="PSNR and SSIM between two arrays")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="ablation study over seeds")
    _config_args(p)
    p.add_argument("--variants", type=_variants,
                   default=list(AblationVariant),
                   help="comma list of " + ", ".join(v.value for v in AblationVariant))
    p.add_argument("--seeds", type=_ints, default=[0, 1, 2])
    p.add_argument("--epochs", type=int)
    p.add_argument("--size", type=int)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("sweep", help="hyperparameter or CG-iteration sweep")
    _config_args(p)
    p.add_argument("--kind", choices=("hyper", "cg"), default="hyper")
    p.add_argument("--lambdas", type=_grid, default=_grid("0.01:0.10:0.01"),
                   help="lo:hi:step or comma list")
    p.add_argument("--lambdas-s", type=_grid, default=_grid("0.1:1.0:0.1"))
    p.add_argument("--cross", action="store_true", help="full cross-product of the two grids")
    p.add_argument("--iters", type=_ints, default=[10, 15, 20, 25, 30])
    p.add_argument("--seeds", type=_ints, default=[0])
    p.add_argument("--epochs", type=int)
    p.add_argument("--size", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export", help="array to 8-bit PNG of the magnitude")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--coil", type=int, help="coil index for stacks (default: RSS)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"inrrecon {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001  report any runtime failure as exit 2
        log.debug("runtime failure", exc_info=True)
        print(f"inrrecon {args.command}: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
