"""Command-line front end: PGM in/out, run configuration, JSON diagnostics,
and a thread-scaling benchmark harness for the two backends."""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time

import numpy as np

from .diffusivity import DiffusivityKind
from .grid import Image
from .pgm import PgmError, load_pgm, save_pgm
from .schemes import (
    BACKENDS,
    TAU_MODES,
    ConstantModel,
    EedModel,
    SchemeConfig,
    run_diffusion,
)
from .stability import max_step
from .stencil import StencilParams
from .tensors import DiffusionTensor, constant_field, eed_field

_DIFFUSIVITY_TAGS = {"pm": "peronamalik", "charbonnier": "charbonnier", "wexp": "wexp"}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="anisodiff",
        description="Anisotropic diffusion filtering with directional-split 3x3 stencils.",
    )
    ap.add_argument("--input", help="input PGM image (P2 or P5)")
    ap.add_argument("--output", help="output PGM image (P5)")
    ap.add_argument(
        "--model",
        choices=["eed", "constant", "homogeneous"],
        default="eed",
        help="diffusion tensor model (default: eed)",
    )
    ap.add_argument("--sigma", type=float, default=1.0, help="presmoothing std dev for eed (default: 1)")
    ap.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=3.0,
        help="contrast parameter in grey levels (default: 3)",
    )
    ap.add_argument(
        "--diffusivity",
        choices=sorted(_DIFFUSIVITY_TAGS),
        default="charbonnier",
        help="diffusivity for eed (default: charbonnier)",
    )
    ap.add_argument("--a", type=float, default=1.0, help="tensor entry a for --model constant")
    ap.add_argument("--b", type=float, default=0.0, help="tensor entry b for --model constant")
    ap.add_argument("--c", type=float, default=1.0, help="tensor entry c for --model constant")
    ap.add_argument("--alpha", type=float, default=0.0, help="stencil parameter in [0, 0.5] (default: 0)")
    ap.add_argument("--gamma", type=float, default=0.0, help="stencil parameter in [-1, 1] (default: 0)")
    ap.add_argument("--steps", type=int, default=10, help="number of explicit steps (default: 10)")
    ap.add_argument(
        "--tau",
        default="auto-theorem",
        help="time step: auto-theorem, auto-gershgorin, or a positive float (default: auto-theorem)",
    )
    ap.add_argument("--backend", choices=list(BACKENDS), default="stencil")
    ap.add_argument("--threads", type=int, default=1, help="worker threads (default: 1)")
    ap.add_argument("--diagnostics", help="write a JSON diagnostics report to this path")
    ap.add_argument(
        "--benchmark",
        type=int,
        metavar="SIZE",
        help="run the benchmark harness on a synthetic SIZExSIZE image instead of filtering",
    )
    ap.add_argument("--repeats", type=int, default=5, help="benchmark repetitions per cell (default: 5)")
    return ap


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _parse_tau(text: str):
    if text in TAU_MODES:
        return text
    try:
        tau = float(text)
    except ValueError:
        return None
    return tau if tau > 0 else None


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not 0.0 <= args.alpha <= 0.5:
        return _fail("--alpha must lie in [0, 0.5]")
    if not -1.0 <= args.gamma <= 1.0:
        return _fail("--gamma must lie in [-1, 1]")
    if args.steps < 1:
        return _fail("--steps must be at least 1")
    if args.threads < 1:
        return _fail("--threads must be at least 1")
    tau = _parse_tau(args.tau)
    if tau is None:
        return _fail("--tau must be auto-theorem, auto-gershgorin, or a positive number")
    params = StencilParams(args.alpha, args.gamma)

    if args.model in ("constant", "homogeneous"):
        try:
            tensor = (
                DiffusionTensor(1.0, 0.0, 1.0)
                if args.model == "homogeneous"
                else DiffusionTensor(args.a, args.b, args.c)
            )
        except ValueError as exc:
            return _fail(f"--a/--b/--c: {exc}")
        model = ConstantModel(tensor)
    else:
        if args.sigma < 0:
            return _fail("--sigma must be nonnegative")
        if args.lam <= 0:
            return _fail("--lambda must be positive")
        model = EedModel(args.sigma, DiffusivityKind(_DIFFUSIVITY_TAGS[args.diffusivity], args.lam))

    if args.benchmark is not None:
        if args.benchmark < 2:
            return _fail("--benchmark size must be at least 2")
        report = benchmark(args.benchmark, steps=args.steps, params=params, model=model, repeats=args.repeats)
        print(json.dumps(report, indent=2))
        return 0

    if not args.input or not args.output:
        return _fail("--input and --output are required unless --benchmark is given")
    try:
        img = load_pgm(args.input)
    except (OSError, PgmError) as exc:
        return _fail(str(exc))

    if isinstance(tau, float):
        fld = (
            constant_field(model.tensor, (img.height, img.width))
            if isinstance(model, ConstantModel)
            else eed_field(img, model.sigma, model.kind)
        )
        try:
            limit = max_step(fld, params, img.h, "theorem")
            if tau > limit:
                print(
                    f"warning: fixed tau {tau} exceeds the stability limit {limit:.6g}",
                    file=sys.stderr,
                )
        except ValueError:
            pass

    cfg = SchemeConfig(
        steps=args.steps, params=params, model=model, tau=tau,
        backend=args.backend, threads=args.threads,
    )
    try:
        result, trace = run_diffusion(img, cfg)
        save_pgm(result, args.output)
    except (OSError, RuntimeError, ValueError) as exc:
        return _fail(str(exc))

    if args.diagnostics:
        report = {
            "config": {
                "input": args.input,
                "output": args.output,
                "model": args.model,
                "sigma": args.sigma,
                "lambda": args.lam,
                "diffusivity": args.diffusivity,
                "tensor": {"a": args.a, "b": args.b, "c": args.c},
                "alpha": args.alpha,
                "gamma": args.gamma,
                "steps": args.steps,
                "tau": args.tau,
                "backend": args.backend,
                "threads": args.threads,
            },
            "bounds": {"theorem": trace.theorem_bound, "gershgorin": trace.gershgorin_bound},
            "steps": [
                {"tau": t, "norm": n, "mean": m, "ms": ms}
                for t, n, m, ms in zip(trace.taus, trace.norms, trace.means, trace.step_ms)
            ],
        }
        try:
            with open(args.diagnostics, "w") as fh:
                json.dump(report, fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            return _fail(str(exc))
    return 0


def synthetic_image(size: int, seed: int = 20240531) -> Image:
    """Deterministic benchmark input: smooth structure plus seeded noise."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size]
    base = 128.0 + 90.0 * np.sin(x / 37.0) * np.cos(y / 23.0)
    return Image(np.clip(base + rng.normal(0.0, 12.0, (size, size)), 0.0, 255.0))


def benchmark(
    size: int,
    steps: int = 10,
    params: StencilParams = StencilParams(),
    model=None,
    repeats: int = 5,
    threads_list=None,
) -> dict:
    """Median wall-clock per backend and thread count on a synthetic image.

    Records a soft speedup check (multi-thread vs single-thread); nothing is
    asserted about absolute times.
    """
    if model is None:
        model = EedModel()
    if threads_list is None:
        threads_list = sorted({1, os.cpu_count() or 1})
    img = synthetic_image(size)
    cells = []
    for backend in BACKENDS:
        for threads in threads_list:
            cfg = SchemeConfig(steps=steps, params=params, model=model, backend=backend, threads=threads)
            times = []
            for _ in range(repeats):
                t0 = time.perf_counter()
                run_diffusion(img, cfg)
                times.append((time.perf_counter() - t0) * 1000.0)
            cells.append(
                {
                    "backend": backend,
                    "threads": threads,
                    "median_ms": statistics.median(times),
                    "runs_ms": times,
                }
            )
    report = {"size": size, "steps": steps, "cells": cells, "speedup": {}}
    for backend in BACKENDS:
        per = {c["threads"]: c["median_ms"] for c in cells if c["backend"] == backend}
        if len(per) > 1:
            tmax = max(per)
            ratio = per[1] / per[tmax]
            report["speedup"][backend] = {"threads": tmax, "vs_single": ratio}
            if (os.cpu_count() or 1) >= 4 and ratio <= 1.5:
                print(
                    f"warning: {backend} backend speedup {ratio:.2f}x with {tmax} threads "
                    "is below the expected 1.5x",
                    file=sys.stderr,
                )
    return report


def main() -> None:
    sys.exit(run_cli())
