"""Batch verification runs: config parsing, job execution, reports, export.

Configs are JSON with mandatory per-job seeds; reports are JSON and
deterministic given (config, seed, version) apart from wall times.  Exit
codes: 0 all jobs pass, 1 any job fails or is partial, 2 the config is
invalid.  The worker pool size is capped by the HARMOMORPH_THREADS
environment variable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    EmptySample,
    HarmomorphError,
    InadmissibleAlpha,
    PartialSample,
)
from .families import basic_sphere_family, catalog, measure_eigenvalues, verify_eigenfamily
from .fibers import FiberSample, certify, holomorphy_defect, sample_fiber
from .morphisms import (
    CoefficientPair,
    build_morphism,
    dualize,
    is_admissible,
    random_coefficient_pair,
    verify_invariance,
    verify_morphism,
)
from .spaces import AmbientSpace, SpaceKind, group_act, random_group

__all__ = [
    "RunConfig",
    "Report",
    "run",
    "export_points",
    "default_suite_config",
    "main",
]

_JOB_KINDS = ("eigenfamily", "morphism", "fiber", "duality", "invariance", "holomorphy")
_SPACE_LABELS = {k.value for k in SpaceKind} | {"sphere-basic"}


def resolve_space(label: str, n: int | None = None) -> tuple:
    """Resolve a space label like ``sphere-complex:n=3`` to (space, basic_flag)."""
    name = label
    if ":" in label:
        name, _, tail = label.partition(":")
        if not tail.startswith("n="):
            raise ConfigError(label, "expected label:n=<int>")
        n = int(tail[2:])
    if name not in _SPACE_LABELS:
        raise ConfigError(label, f"unknown space label (choose from {sorted(_SPACE_LABELS)})")
    if n is None or n < 1:
        raise ConfigError(label, "space parameter n is required and positive")
    if name == "sphere-basic":
        return AmbientSpace.round_sphere_complex(n), True
    return AmbientSpace(SpaceKind(name), n, 2 * n), False


def _parse_alpha(value) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)):
        return complex(value)
    raise ValueError(f"alpha must be [re, im] or a real number, got {value!r}")


@dataclass
class Job:
    index: int
    kind: str
    raw: dict
    space: AmbientSpace
    basic: bool
    seed: int

    @property
    def label(self) -> str:
        base = "sphere-basic" if self.basic else self.space.kind.value
        return f"{base}:n={self.space.n}"


@dataclass
class RunConfig:
    jobs: list
    source: dict

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict) or "jobs" not in data or not isinstance(data["jobs"], list):
            raise ConfigError("config", "top level must be an object with a 'jobs' list")
        jobs = []
        for i, raw in enumerate(data["jobs"]):
            loc = f"jobs[{i}]"
            if not isinstance(raw, dict):
                raise ConfigError(loc, "job must be an object")
            kind = raw.get("kind")
            if kind not in _JOB_KINDS:
                raise ConfigError(loc, f"kind must be one of {_JOB_KINDS}, got {kind!r}")
            if "seed" not in raw:
                raise ConfigError(loc, "seed is mandatory (runs take no wall-clock entropy)")
            label = raw.get("space")
            if not isinstance(label, str):
                raise ConfigError(loc, "space label is required")
            try:
                space, basic = resolve_space(label, raw.get("n"))
            except (ConfigError, ValueError) as exc:
                raise ConfigError(loc, str(exc)) from exc
            if basic and kind != "eigenfamily":
                raise ConfigError(loc, "sphere-basic only supports eigenfamily jobs")
            job = Job(i, kind, raw, space, basic, int(raw["seed"]))
            try:
                _validate_job(job)
            except ConfigError:
                raise
            except (HarmomorphError, ValueError, KeyError, TypeError) as exc:
                raise ConfigError(loc, str(exc)) from exc
            jobs.append(job)
        return cls(jobs, data)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}", exc.msg) from exc
        return cls.from_dict(data)

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.source, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _job_pair(job: Job) -> CoefficientPair:
    raw = job.raw
    if "A" not in raw or "B" not in raw:
        raise ConfigError(f"jobs[{job.index}]", f"{job.kind} job needs coefficient matrices A and B")
    entries_a = raw["A"]
    size = int(round(len(entries_a) ** 0.5))
    return CoefficientPair.from_json_dict(
        {"n": size, "d": raw.get("d", 1), "A": entries_a, "B": raw["B"]}
    )


def _job_morphism(job: Job):
    return build_morphism(job.space, _job_pair(job), allow_power=bool(job.raw.get("allow_power")))


def _validate_job(job: Job):
    """Everything checkable without running: shapes, pairs, required fields."""
    kind = job.kind
    if kind in ("morphism", "fiber", "duality", "invariance", "holomorphy"):
        _job_morphism(job)
    if kind in ("fiber", "holomorphy"):
        if "alpha" not in job.raw:
            raise ConfigError(f"jobs[{job.index}]", f"{kind} job needs alpha")
        _parse_alpha(job.raw["alpha"])
    if kind in ("invariance", "holomorphy") and job.space.is_flat:
        raise ConfigError(f"jobs[{job.index}]", f"{kind} jobs need a sphere or pseudosphere kind")
    if kind == "holomorphy" and job.space.kind is not SpaceKind.SPHERE_COMPLEX:
        raise ConfigError(f"jobs[{job.index}]", "holomorphy jobs run on sphere-complex")


# ---------------------------------------------------------------------------
# job execution


def _run_eigenfamily(job: Job):
    fam = basic_sphere_family(job.space) if job.basic else catalog(job.space)
    rep = verify_eigenfamily(
        fam,
        points=int(job.raw.get("points", 100)),
        tol=float(job.raw.get("tol", 1e-8)),
        seed=job.seed,
    )
    verdict = "pass" if rep.passed else "fail"
    residuals = {"tau": rep.worst_tau, "kappa": rep.worst_kappa}
    return verdict, residuals, {"points": rep.points, "members": len(fam)}


def _run_morphism(job: Job):
    m = _job_morphism(job)
    rep = verify_morphism(
        m,
        points=int(job.raw.get("points", 100)),
        tol=float(job.raw.get("tol", 1e-8)),
        seed=job.seed,
    )
    verdict = "pass" if rep.passed else "fail"
    return verdict, {"tau": rep.worst_tau, "kappa": rep.worst_kappa}, {"points": rep.points}


def _run_fiber(job: Job):
    m = _job_morphism(job)
    alpha = _parse_alpha(job.raw["alpha"])
    count = int(job.raw.get("count", 25))
    verdict = "pass"
    try:
        sample = sample_fiber(m, alpha, count=count, seed=job.seed)
    except InadmissibleAlpha as exc:
        return "fail", {"reason": str(exc)}, {"accepted": 0}
    except PartialSample as exc:
        sample = exc.sample
        verdict = "partial"
    report = certify(
        sample,
        tol_H=float(job.raw.get("tol_H", 1e-6)),
        margin_grad=float(job.raw.get("margin", 1e-6)),
    )
    if not (report.minimal and report.regular):
        verdict = "fail"
    if job.raw.get("points_csv"):
        export_points(sample, job.raw["points_csv"], report=report)
    residuals = {
        "worst_H": report.worst_mean_curvature,
        "min_margin": report.min_gradient_margin,
        "worst_residual": max(fp.residual for fp in sample.points) if sample.points else np.inf,
    }
    return verdict, residuals, {"accepted": len(sample.points), "requested": count}


def _run_duality(job: Job):
    m = _job_morphism(job)
    dual = dualize(m)
    points = int(job.raw.get("points", 25))
    tol = float(job.raw.get("tol", 1e-8))
    lam_a, mu_a = measure_eigenvalues(catalog(m.space), points=points, seed=job.seed)
    lam_b, mu_b = measure_eigenvalues(catalog(dual.space), points=points, seed=job.seed + 1)
    flip_err = max(abs(lam_a + lam_b), abs(mu_a + mu_b))
    scale = max(1.0, abs(lam_a), abs(mu_a))
    rep_a = verify_morphism(m, points=points, tol=tol, seed=job.seed + 2)
    rep_b = verify_morphism(dual, points=points, tol=tol, seed=job.seed + 3)
    ok = flip_err / scale <= tol and rep_a.passed and rep_b.passed
    residuals = {
        "eigenvalue_flip": flip_err / scale,
        "tau": max(rep_a.worst_tau, rep_b.worst_tau),
        "kappa": max(rep_a.worst_kappa, rep_b.worst_kappa),
    }
    return ("pass" if ok else "fail"), residuals, {"points": points}


def _run_invariance(job: Job):
    m = _job_morphism(job)
    samples = int(job.raw.get("samples", 20))
    tol = float(job.raw.get("tol", 1e-12))
    rep = verify_invariance(m, samples=samples, tol=tol, seed=job.seed)
    residuals = {"value_defect": rep.worst_defect}
    counts = {"samples": samples}
    verdict = "pass" if rep.passed else "fail"
    if "alpha" in job.raw:
        orbit_tol = float(job.raw.get("orbit_tol", 1e-8))
        alpha = _parse_alpha(job.raw["alpha"])
        orbit_pts = int(job.raw.get("orbit_points", 5))
        try:
            sample = sample_fiber(m, alpha, count=orbit_pts, seed=job.seed + 1)
        except PartialSample as exc:
            sample = exc.sample
        rng = np.random.default_rng(job.seed + 2)
        worst_orbit = 0.0
        for fp in sample.points:
            g = random_group(m.space, rng)
            moved = group_act(m.space, g, fp.point)
            pair = FiberSample(m, alpha, [fp, type(fp)(moved, fp.residual, 0)])
            rows = certify(pair).rows
            worst_orbit = max(worst_orbit, abs(rows[0].mean_curvature_norm - rows[1].mean_curvature_norm))
        residuals["orbit_H_difference"] = worst_orbit
        counts["orbit_points"] = len(sample.points)
        if worst_orbit > orbit_tol:
            verdict = "fail"
    return verdict, residuals, counts


def _run_holomorphy(job: Job):
    m = _job_morphism(job)
    alpha = _parse_alpha(job.raw["alpha"])
    count = int(job.raw.get("count", 10))
    threshold = float(job.raw.get("threshold", 0.1))
    try:
        sample = sample_fiber(m, alpha, count=count, seed=job.seed)
    except PartialSample as exc:
        sample = exc.sample
    defects = [holomorphy_defect(m.space, m, fp.point) for fp in sample.points]
    best = max(defects, default=0.0)
    verdict = "pass" if best > threshold else "fail"
    return verdict, {"max_defect": best}, {"points": len(defects)}


_RUNNERS = {
    "eigenfamily": _run_eigenfamily,
    "morphism": _run_morphism,
    "fiber": _run_fiber,
    "duality": _run_duality,
    "invariance": _run_invariance,
    "holomorphy": _run_holomorphy,
}


@dataclass
class Report:
    metadata: dict
    jobs: list

    @property
    def verdict(self) -> str:
        return "pass" if all(j["verdict"] == "pass" for j in self.jobs) else "fail"

    def to_dict(self) -> dict:
        return {"metadata": self.metadata, "verdict": self.verdict, "jobs": self.jobs}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _execute(job: Job) -> dict:
    start = time.perf_counter()
    try:
        verdict, residuals, counts = _RUNNERS[job.kind](job)
        failure = None
    except HarmomorphError as exc:
        verdict, residuals, counts = "fail", {}, {}
        failure = f"{type(exc).__name__}: {exc}"
    out = {
        "kind": job.kind,
        "label": job.label,
        "seed": job.seed,
        "verdict": verdict,
        "residuals": {k: _jsonable(v) for k, v in residuals.items()},
        "counts": counts,
        "wall_time": round(time.perf_counter() - start, 4),
    }
    if failure:
        out["reason"] = failure
    return out


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and not np.isfinite(v):
        return repr(v)
    return v


def run(config: RunConfig) -> Report:
    """Execute all jobs and aggregate verdicts; order-independent semantics."""
    workers = os.environ.get("HARMOMORPH_THREADS")
    max_workers = max(1, int(workers)) if workers else min(8, os.cpu_count() or 1)
    if max_workers == 1 or len(config.jobs) == 1:
        results = [_execute(j) for j in config.jobs]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(_execute, config.jobs))
    metadata = {"config_hash": config.config_hash, "version": __version__, "jobs": len(config.jobs)}
    return Report(metadata, results)


# ---------------------------------------------------------------------------
# point export


def export_points(sample: FiberSample, path: str, fmt: str = "csv", report=None) -> str:
    """Write the sample as CSV: coordinates, residual, H norm, gradient margin."""
    if fmt != "csv":
        raise ValueError(f"unsupported format {fmt!r}")
    if not sample.points:
        raise EmptySample("refusing to export an empty fiber sample")
    if report is None:
        report = certify(sample)
    m = sample.morphism.space.m
    header = ",".join(f"x{j},y{j}" for j in range(1, m + 1)) + ",residual,H_norm,grad_margin"
    lines = [header]
    for fp, row in zip(sample.points, report.rows):
        coords = ",".join(repr(float(c)) for c in fp.point)
        lines.append(
            f"{coords},{float(fp.residual)!r},{float(row.mean_curvature_norm)!r},{float(row.gradient_margin)!r}"
        )
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


# ---------------------------------------------------------------------------
# default suite


def _choose_alpha(morphism, rng: np.random.Generator) -> complex:
    for _ in range(100):
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        if is_admissible(morphism, alpha):
            return alpha
    raise RuntimeError("no admissible alpha found")


def default_suite_config() -> dict:
    """Verification suite over all eight spaces at laptop scale."""
    jobs = []
    seed = 1000
    for kind in SpaceKind:
        for n in (2, 3):
            jobs.append({"kind": "eigenfamily", "space": kind.value, "n": n, "points": 100, "seed": seed})
            seed += 1
    for n in (2, 3):
        jobs.append({"kind": "eigenfamily", "space": "sphere-basic", "n": n, "points": 100, "seed": seed})
        seed += 1

    rng = np.random.default_rng(7)
    for kind in SpaceKind:
        quat = "quaternionic" in kind.value
        n = 6 if quat else 3
        size = 3
        for d in (1, 2):
            pair = random_coefficient_pair(size, rng, d=d)
            space, _ = resolve_space(kind.value, n)
            morphism = build_morphism(space, pair, allow_power=True)
            alpha = _choose_alpha(morphism, rng)
            pair_json = pair.to_json_dict()
            base = {
                "space": kind.value,
                "n": n,
                "d": d,
                "A": pair_json["A"],
                "B": pair_json["B"],
                "allow_power": True,
                "seed": seed,
            }
            jobs.append({"kind": "morphism", "points": 100, **base})
            seed += 1
            if d == 1:
                jobs.append(
                    {"kind": "fiber", "alpha": [alpha.real, alpha.imag], "count": 25, **base, "seed": seed}
                )
                seed += 1
                if space.is_curved:
                    jobs.append(
                        {
                            "kind": "invariance",
                            "alpha": [alpha.real, alpha.imag],
                            "samples": 20,
                            **base,
                            "seed": seed,
                        }
                    )
                    seed += 1
                if space.is_sphere or (space.is_flat and not space.is_indefinite):
                    jobs.append({"kind": "duality", "points": 25, **base, "seed": seed})
                    seed += 1
                if kind is SpaceKind.SPHERE_COMPLEX:
                    hol_space, _ = resolve_space(kind.value, 2)
                    hol_pair = random_coefficient_pair(2, rng)
                    hol_m = build_morphism(hol_space, hol_pair)
                    hol_alpha = _choose_alpha(hol_m, rng)
                    hol_json = hol_pair.to_json_dict()
                    jobs.append(
                        {
                            "kind": "holomorphy",
                            "space": kind.value,
                            "n": 2,
                            "A": hol_json["A"],
                            "B": hol_json["B"],
                            "alpha": [hol_alpha.real, hol_alpha.imag],
                            "count": 10,
                            "seed": seed,
                        }
                    )
                    seed += 1
    return {"jobs": jobs}


# ---------------------------------------------------------------------------
# entry point


def _cmd_verify(args) -> int:
    if args.default_suite:
        config = RunConfig.from_dict(default_suite_config())
    else:
        if not args.config:
            print("error: provide a config path or --default-suite", file=sys.stderr)
            return 2
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        try:
            config = RunConfig.from_json(text)
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
    report = run(config)
    out = report.to_json()
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return 0 if report.verdict == "pass" else 1


def _cmd_sample_fiber(args) -> int:
    try:
        space, _ = resolve_space(args.space, args.n)
        pair = CoefficientPair.from_json_dict(
            {
                "n": int(round(len(json.loads(args.A)) ** 0.5)),
                "d": args.d,
                "A": json.loads(args.A),
                "B": json.loads(args.B),
            }
        )
        morphism = build_morphism(space, pair, allow_power=True)
        alpha = _parse_alpha(json.loads(args.alpha))
    except (ConfigError, HarmomorphError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        sample = sample_fiber(morphism, alpha, count=args.count, seed=args.seed)
        verdict = "pass"
    except InadmissibleAlpha as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PartialSample as exc:
        sample = exc.sample
        verdict = "partial"
    report = certify(sample)
    export_points(sample, args.out, report=report)
    print(
        f"{verdict}: {len(sample.points)} points, worst H {report.worst_mean_curvature:.3e}, "
        f"min margin {report.min_gradient_margin:.3e} -> {args.out}"
    )
    return 0 if verdict == "pass" and report.minimal and report.regular else 1


def _cmd_catalog(args) -> int:
    print("space label                      n        members  lambda      mu")
    for kind in SpaceKind:
        for n in (2, 3):
            space, _ = resolve_space(kind.value, n)
            fam = catalog(space)
            print(
                f"{kind.value:<32} n={n}      {len(fam):<8} {fam.lam.real:<+11.0f} {fam.mu.real:+.0f}"
            )
    for n in (2, 3):
        space, _ = resolve_space("sphere-basic", n)
        fam = basic_sphere_family(space)
        print(f"{'sphere-basic':<32} n={n}      {len(fam):<8} {fam.lam.real:<+11.0f} {fam.mu.real:+.0f}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="harmomorph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a verification config")
    p_verify.add_argument("config", nargs="?", help="path to a JSON run config")
    p_verify.add_argument("--default-suite", action="store_true", help="run the built-in full suite")
    p_verify.add_argument("--report", help="write the JSON report to this path instead of stdout")
    p_verify.set_defaults(func=_cmd_verify)

    p_fiber = sub.add_parser("sample-fiber", help="sample one fiber and export a CSV point cloud")
    p_fiber.add_argument("--space", required=True)
    p_fiber.add_argument("--n", type=int, required=True)
    p_fiber.add_argument("--d", type=int, default=1)
    p_fiber.add_argument("--A", required=True, help="JSON list of n^2 [re,im] pairs, row-major")
    p_fiber.add_argument("--B", required=True, help="JSON list of n^2 [re,im] pairs, row-major")
    p_fiber.add_argument("--alpha", required=True, help="JSON [re,im]")
    p_fiber.add_argument("--count", type=int, default=25)
    p_fiber.add_argument("--seed", type=int, required=True)
    p_fiber.add_argument("--out", required=True)
    p_fiber.set_defaults(func=_cmd_sample_fiber)

    p_catalog = sub.add_parser("catalog", help="list spaces and catalog families")
    p_catalog.set_defaults(func=_cmd_catalog)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
