"""Command-line interface: bound, sweep, figure, selftest."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .estimator import ExpectationSpec
from .experiments import (
    BOUND_KINDS,
    EXIT_OK,
    EXIT_PARTIAL,
    EXIT_USAGE,
    FIGURE_PRESETS,
    SweepConfig,
    run_figure,
    run_point,
    run_sweep,
    selftest,
)
from .fading import (
    ConstantError,
    FadingModel,
    GaussianEstimateLaw,
    InterpolationError,
    PredictionError,
)
from .layering import parse_layering


def _parse_snr(text: str) -> tuple:
    """"A:B:STEP" or a comma-separated list of dB values."""
    if ":" in text:
        a, b, step = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("SNR step must be positive")
        n = int(round((b - a) / step))
        return tuple(a + i * step for i in range(n + 1))
    return tuple(float(v) for v in text.split(","))


def _build_model(args) -> FadingModel:
    if args.model == "constant":
        return FadingModel(
            GaussianEstimateLaw(complex(args.mu_re, args.mu_im), args.vhat),
            ConstantError(args.vtilde),
        )
    if args.model == "prediction":
        return FadingModel(error=PredictionError(B=args.B), normalized=True)
    if args.model == "interpolation":
        return FadingModel(error=InterpolationError(B=args.B, T=args.T), normalized=True)
    raise ValueError(f"unknown model {args.model!r}")


def _build_spec(args) -> ExpectationSpec:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("RSB_SEED", "0"))
    method = {"quad": "quadrature", "mc": "monte-carlo"}[args.method]
    return ExpectationSpec(
        method=method, nodes_g=args.nodes, nodes_w=args.nodes, samples=args.samples, seed=seed
    )


def _add_common(p):
    p.add_argument("--config", help="JSON (or TOML, python>=3.11) config file; flags win")
    p.add_argument("--model", default="constant", choices=["constant", "prediction", "interpolation"])
    p.add_argument("--vtilde", type=float, default=0.5)
    p.add_argument("--vhat", type=float, default=0.5)
    p.add_argument("--mu-re", dest="mu_re", type=float, default=0.0)
    p.add_argument("--mu-im", dest="mu_im", type=float, default=0.0)
    p.add_argument("--B", type=float, default=0.25)
    p.add_argument("--T", type=int, default=None)
    p.add_argument("--snr-db", dest="snr_db", default="10")
    p.add_argument("--power", type=float, default=None, help="override P (else P = rho * N0)")
    p.add_argument("--n0", type=float, default=1.0)
    p.add_argument("--layers", type=int, default=None)
    p.add_argument("--layering", default=None, help='"q1,q2,..." or "uniform:K"')
    p.add_argument("--kinds", default=",".join(BOUND_KINDS))
    p.add_argument("--method", default="quad", choices=["quad", "mc"])
    p.add_argument("--nodes", type=int, default=64)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=None, help="default: $RSB_SEED or 0")
    p.add_argument("--units", default="nats", choices=["nats", "bits"])
    p.add_argument("--pilot-loss", dest="pilot_loss", default="off", choices=["on", "off"])
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)


def _apply_config_file(args, argv):
    if not args.config:
        return
    with open(args.config) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        try:
            import tomllib
        except ImportError as e:
            raise ValueError("config file is not JSON and tomllib is unavailable") from e
        data = tomllib.loads(text)
    defaults = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = set(defaults) - set(vars(args))
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    # flags win: a key is skipped if its option appeared on the command line
    given = set()
    for tok in argv:
        if tok.startswith("--"):
            given.add(tok[2:].split("=", 1)[0].replace("-", "_"))
    for k, v in defaults.items():
        if k not in given:
            setattr(args, k, v)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="fadecap")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="evaluate bounds at a single SNR point")
    _add_common(p_bound)
    p_sweep = sub.add_parser("sweep", help="evaluate bounds over an SNR grid, emit CSV")
    _add_common(p_sweep)
    p_fig = sub.add_parser("figure", help="run a frozen figure preset")
    p_fig.add_argument("preset", choices=["fig1"] + sorted(FIGURE_PRESETS))
    _add_common(p_fig)
    p_self = sub.add_parser("selftest", help="run the invariant suite")
    p_self.add_argument("--samples", type=int, default=10**5)
    p_self.add_argument("--seed", type=int, default=None)
    p_self.add_argument("--json", action="store_true")

    if argv is None:
        argv = sys.argv[1:]
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0

    try:
        if args.command == "selftest":
            seed = args.seed if args.seed is not None else int(os.environ.get("RSB_SEED", "0"))
            rows = selftest(samples=args.samples, seed=seed)
            if args.json:
                print(json.dumps([{"name": n, "pass": ok, "detail": d} for n, ok, d in rows]))
            else:
                for name, ok, detail in rows:
                    tag = "PASS" if ok else "FAIL"
                    print(f"[{tag}] {name}" + (f"  {detail}" if detail else ""))
            return EXIT_OK if all(ok for _, ok, _ in rows) else 1

        _apply_config_file(args, argv)
        model = _build_model(args)
        spec = _build_spec(args)
        snr = _parse_snr(str(args.snr_db))
        kinds = tuple(k for k in str(args.kinds).split(",") if k)

        if args.command == "figure":
            _, failures = run_figure(
                args.preset, spec=spec, units=args.units, out=args.out, jobs=args.jobs
            )
            if args.out is None:
                print(f"preset {args.preset} evaluated (use --out to write CSV)")
            return EXIT_PARTIAL if failures else EXIT_OK

        n0 = args.n0
        if args.power is not None and len(snr) == 1:
            # explicit P with a single SNR point fixes N0 = P / rho
            n0 = args.power / 10.0 ** (snr[0] / 10.0)

        cfg = SweepConfig(
            model=model, snr_db=snr, kinds=kinds, spec=spec, units=args.units,
            n0=n0, out=args.out, pilot_loss=args.pilot_loss == "on", jobs=args.jobs,
        )

        if args.command == "bound":
            if len(snr) != 1:
                raise ValueError("bound takes a single --snr-db value")
            record = run_point(cfg)
            if args.layering is not None:
                from .bounds import ChannelPoint, layered_bound

                rho = 10.0 ** (snr[0] / 10.0)
                ch = ChannelPoint(P=rho * n0, N0=n0)
                Q = parse_layering(args.layering, ch.P)
                record["r_layered"] = layered_bound(model, ch, Q, spec).rate_nats
            elif args.layers is not None:
                from .bounds import ChannelPoint, optimize_layers

                rho = 10.0 ** (snr[0] / 10.0)
                ch = ChannelPoint(P=rho * n0, N0=n0)
                _, bv = optimize_layers(model, ch, args.layers, spec)
                record[f"r_star_L{args.layers}"] = bv.rate_nats
            print(json.dumps(record, default=str, indent=2))
            return EXIT_OK

        # sweep
        text, failures = run_sweep(cfg)
        if args.out is None:
            sys.stdout.write(text)
        return EXIT_PARTIAL if failures else EXIT_OK

    except (ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
