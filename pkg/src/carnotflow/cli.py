"""Batch front-end: verification suites and evolution runs from a config.

One JSON document describes an experiment; the subcommands read it and
write static outputs (text report, CSV files, an effective-config echo).

    carnotflow verify     --config cfg.json [--suite NAME ...]
    carnotflow barrier    --config cfg.json --kind gauge [--lattice N]
    carnotflow evolve     --config cfg.json [--out DIR]
    carnotflow extinction --config cfg.json

Config sections (all optional, defaults in parentheses):

    group   {"preset": "heisenberg"} or {"m", "n", "B": [matrix, ...]}
    domain  {"box": [[lo, hi], ...] ([-2,2]^n), "resolution": [...] (32^n)}
    initial {"preset" ("cylinder"), "r" (1.0), "c" (kind default),
             "relabel" (null)}
    scheme  {"kind" ("regularized"), "delta_reg" (1e-6 diam),
             "eps_sing" (h_min^2), "cfl" (0.25)}
    run     {"t_end" (0.5), "snapshot_every" (0.0), "out_dir" ("out"),
             "sandwich" (false)}
    verify  {"suites" (all), "samples" (500), "pairs" (200),
             "tolerance" (1e-9), "seed" (0), "barrier_drifts" ({})}

verify.barrier_drifts overrides the drift constant c used for a kind's
classified fixture (e.g. {"sqrt_gauge": 4.0}); it exists so a deliberately
broken fixture demonstrably fails the suite.

Exit codes: 0 all checks pass / run completed; 1 scientific failure or
instability; 2 unusable config or arguments.  The worker-count environment
variable (CARNOTFLOW_WORKERS) affects speed only, never results.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .barriers import (
    BarrierEval,
    SmoothMap1D,
    change_of_variables_check,
    gauge_profile_value,
    make_barrier,
    psi_s_plus_s3,
    psi_sqrt,
    psi_square,
)
from .calculus import (
    ScalarField,
    envelope_lower,
    envelope_upper,
    exact_jet,
    full_operator_G,
    horizontal_gradient,
    horizontal_hessian,
    sq_norm,
)
from .groups import (
    GroupSpec,
    compose,
    dilate,
    gauge_distance,
    heisenberg,
    homogeneous_norm,
    inverse,
    is_heisenberg_like,
    validate_spec,
)
from .solver import (
    InitialSpec,
    SolverConfig,
    extract_front,
    run,
    write_front_csv,
    write_snapshot_csv,
)
from .verdicts import check_norm_lemma, check_point, sweep

__all__ = [
    "main",
    "ConfigError",
    "load_config",
    "build_group",
    "build_solver_config",
    "SUITES",
    "suite_group_axioms",
    "suite_norm_lemma",
    "suite_barriers",
    "suite_envelopes",
    "suite_change_of_variables",
    "m3n5_spec",
]


class ConfigError(Exception):
    """Config rejected; the message carries the offending field path."""


def _get(section: dict, path: str, key: str, default, caster=None):
    if key not in section:
        return default
    value = section[key]
    if caster is not None:
        try:
            return caster(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}.{key}: {exc}") from exc
    return value


def load_config(path: str | None) -> dict:
    """Parse the JSON config document; {} when no path is given."""
    if path is None:
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config: {path} is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be an object")
    return doc


def m3n5_spec() -> GroupSpec:
    """A step-two group beyond the Heisenberg family: m=3, two brackets."""
    B1 = np.array([[0.0, 1, 0], [-1, 0, 0], [0, 0, 0]])
    B2 = np.array([[0.0, 0, 1], [0, 0, 0], [-1, 0, 0]])
    return validate_spec(3, 5, [B1, B2])


def build_group(doc: dict) -> GroupSpec:
    section = doc.get("group", {"preset": "heisenberg"})
    if not isinstance(section, dict):
        raise ConfigError("group: must be an object")
    preset = section.get("preset")
    if preset is not None:
        if preset == "heisenberg":
            return heisenberg()
        if preset == "m3n5":
            return m3n5_spec()
        raise ConfigError(f"group.preset: unknown preset {preset!r}")
    try:
        m = int(section["m"])
        n = int(section["n"])
        B = [np.array(mat, dtype=float) for mat in section["B"]]
    except KeyError as exc:
        raise ConfigError(f"group.{exc.args[0]}: missing") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"group: {exc}") from exc
    try:
        return validate_spec(m, n, B)
    except ValueError as exc:
        raise ConfigError(f"group.B: {exc}") from exc


def build_solver_config(doc: dict, group: GroupSpec) -> SolverConfig:
    n = group.n
    domain = doc.get("domain", {})
    box = _get(domain, "domain", "box", [[-2.0, 2.0]] * n)
    resolution = _get(domain, "domain", "resolution", [32] * n)
    initial = doc.get("initial", {})
    scheme = doc.get("scheme", {})
    run_sec = doc.get("run", {})
    try:
        init_spec = InitialSpec(
            preset=_get(initial, "initial", "preset", "cylinder", str),
            r=_get(initial, "initial", "r", 1.0, float),
            relabel=initial.get("relabel"),
        )
        return SolverConfig(
            group=group,
            box=tuple(tuple(side) for side in box),
            resolution=tuple(resolution),
            initial=init_spec,
            scheme=_get(scheme, "scheme", "kind", "regularized", str),
            delta_reg=_get(scheme, "scheme", "delta_reg", None, lambda v: v if v is None else float(v)),
            eps_sing=_get(scheme, "scheme", "eps_sing", None, lambda v: v if v is None else float(v)),
            cfl=_get(scheme, "scheme", "cfl", 0.25, float),
            t_end=_get(run_sec, "run", "t_end", 0.5, float),
            snapshot_every=_get(run_sec, "run", "snapshot_every", 0.0, float),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"config: {exc}") from exc


def effective_config_dict(doc: dict, group: GroupSpec, cfg: SolverConfig) -> dict:
    """Defaults-filled config that reproduces the run exactly."""
    return {
        "group": {"m": group.m, "n": group.n, "B": group.B.tolist()},
        "domain": {
            "box": [list(side) for side in cfg.box],
            "resolution": list(cfg.resolution),
        },
        "initial": {
            "preset": cfg.initial.preset,
            "r": cfg.initial.r,
            "relabel": cfg.initial.relabel,
        },
        "scheme": {
            "kind": cfg.scheme,
            "delta_reg": cfg.delta_reg_effective,
            "eps_sing": cfg.eps_sing_effective,
            "cfl": cfg.cfl,
        },
        "run": {
            "t_end": cfg.t_end,
            "snapshot_every": cfg.snapshot_every,
            "out_dir": doc.get("run", {}).get("out_dir", "out"),
            "sandwich": bool(doc.get("run", {}).get("sandwich", False)),
        },
        "verify": doc.get("verify", {}),
    }


# -------------------------------------------------------------- suites ----


@dataclass
class SuiteResult:
    name: str
    passed: bool
    lines: list[str]

    def report(self) -> str:
        head = f"[{'PASS' if self.passed else 'FAIL'}] {self.name}"
        return "\n".join([head] + [f"    {line}" for line in self.lines])


def suite_group_axioms(
    g: GroupSpec, samples: int = 1000, tol: float = 1e-12, seed: int = 0
) -> SuiteResult:
    """Group law axioms, dilation homomorphism, norm homogeneity,
    left-invariance of the gauge distance."""
    rng = np.random.default_rng(seed)
    worst = {
        "associativity": 0.0,
        "identity": 0.0,
        "inverse": 0.0,
        "dilation-homomorphism": 0.0,
        "norm-homogeneity": 0.0,
        "distance-left-invariance": 0.0,
    }
    e = np.zeros(g.n)
    for _ in range(samples):
        x, y, z = (rng.uniform(-2, 2, size=g.n) for _ in range(3))
        lam = float(rng.uniform(0.1, 3.0))
        worst["associativity"] = max(
            worst["associativity"],
            float(np.max(np.abs(compose(g, compose(g, x, y), z) - compose(g, x, compose(g, y, z))))),
        )
        worst["identity"] = max(
            worst["identity"],
            float(np.max(np.abs(compose(g, x, e) - x))),
            float(np.max(np.abs(compose(g, e, x) - x))),
        )
        worst["inverse"] = max(
            worst["inverse"],
            float(np.max(np.abs(compose(g, x, inverse(x))))),
            float(np.max(np.abs(compose(g, inverse(x), x)))),
        )
        worst["dilation-homomorphism"] = max(
            worst["dilation-homomorphism"],
            float(
                np.max(
                    np.abs(
                        dilate(g, lam, compose(g, x, y))
                        - compose(g, dilate(g, lam, x), dilate(g, lam, y))
                    )
                )
            ),
        )
        hn = homogeneous_norm(g, x)
        worst["norm-homogeneity"] = max(
            worst["norm-homogeneity"],
            abs(homogeneous_norm(g, dilate(g, lam, x)) - lam * hn) / max(1.0, lam * hn),
        )
        worst["distance-left-invariance"] = max(
            worst["distance-left-invariance"],
            abs(
                gauge_distance(g, compose(g, z, x), compose(g, z, y))
                - gauge_distance(g, x, y)
            ),
        )
    lines = [f"{name}: worst deviation {dev:.3e}" for name, dev in worst.items()]
    return SuiteResult(
        f"group-axioms (m={g.m}, n={g.n}, {samples} draws, tol {tol:.0e})",
        max(worst.values()) <= tol,
        lines,
    )


def suite_norm_lemma(
    g: GroupSpec, samples: int = 1000, tol: float = 1e-10, seed: int = 0
) -> SuiteResult:
    rep = check_norm_lemma(g, n_points=samples, n_pairs=max(1, samples // 2), rng=np.random.default_rng(seed))
    lines = [
        f"closed-form XN: worst {rep.worst_grad:.3e}",
        f"closed-form X2N: worst {rep.worst_hess:.3e}",
        f"|XN|^2 >= 16|x_h|^6 margin: worst {rep.worst_lower_bound:.3e}",
        f"axis x_h=0 zero set: worst {rep.worst_axis:.3e}",
        f"quartic-distance |X_x| vs |X_y|: worst {rep.worst_pair_grad:.3e}",
        f"quartic-distance X2_x vs X2_y: worst {rep.worst_pair_hess:.3e}",
    ]
    return SuiteResult(
        f"norm-lemma (m={g.m}, n={g.n}, {rep.n_points} points, tol {tol:.0e})",
        rep.max_deviation() <= tol,
        lines,
    )


def _barrier_fixtures(g: GroupSpec, drifts: dict[str, float]) -> list[tuple[BarrierEval, str]]:
    """Catalog instances with classified drifts (config-overridable)."""
    m, n = g.m, g.n
    table = [
        ("cylinder", drifts.get("cylinder", -2.0 * (m - 1)), "solution"),
        ("gauge", drifts.get("gauge_super", 1.0), "supersolution"),
        ("gauge", drifts.get("gauge", -4.0 * n), "subsolution"),
        ("euclid_ball", drifts.get("euclid_ball_super", 0.0), "supersolution"),
        ("euclid_ball", drifts.get("euclid_ball", -2.0 * (m - 1) - 4.0), "subsolution"),
        ("sqrt_gauge", drifts.get("sqrt_gauge_super", 0.0), "supersolution"),
        ("sqrt_gauge", drifts.get("sqrt_gauge", -2.0 * n), "subsolution"),
    ]
    out = []
    for kind, c, expect in table:
        if kind != "cylinder" and not is_heisenberg_like(g):
            continue
        out.append((make_barrier(kind, g, c, 1.0), expect))
    return out


def _sample_points(g: GroupSpec, rng, count: int, region=None, scale: float = 1.4):
    pts = []
    while len(pts) < count:
        x = rng.uniform(-scale, scale, size=g.n)
        if float(np.hypot(*x[: g.m]) if g.m == 2 else np.linalg.norm(x[: g.m])) < 1e-3:
            continue
        if region is not None and not region(x):
            continue
        pts.append(x)
    return pts


def suite_barriers(
    g: GroupSpec,
    samples: int = 500,
    tol: float = 1e-9,
    seed: int = 0,
    drifts: dict[str, float] | None = None,
) -> SuiteResult:
    """Closed forms vs jet recomputation, exactness of the solution
    cylinder, and the classified sign of every catalog fixture."""
    rng = np.random.default_rng(seed)
    drifts = drifts or {}
    lines: list[str] = []
    ok = True

    for barrier, expect in _barrier_fixtures(g, drifts):
        spec = barrier.spec
        label = f"{spec.kind}(c={spec.c:g})"
        pts = _sample_points(g, rng, samples, region=barrier.region)
        worst_op = worst_grad = worst_hess = 0.0
        t = 0.25
        for x in pts:
            j = exact_jet(barrier.field, x, t)
            q = horizontal_gradient(g, j, x)
            A = horizontal_hessian(g, j, x)
            op_jet = j.dt + full_operator_G(g, x, j)
            op_closed = barrier.closed_form_operator(x)
            worst_op = max(worst_op, abs(op_jet - op_closed) / max(1.0, abs(op_closed)))
            worst_grad = max(worst_grad, float(np.max(np.abs(q - barrier.closed_hgrad(x)))))
            worst_hess = max(worst_hess, float(np.max(np.abs(A - barrier.closed_hhess(x)))))
        match_ok = max(worst_op, worst_grad, worst_hess) <= tol
        ok = ok and match_ok
        lines.append(
            f"{label}: closed-vs-jet op {worst_op:.3e}, Xu {worst_grad:.3e}, "
            f"X2u {worst_hess:.3e} ({'ok' if match_ok else 'MISMATCH'})"
        )

        if spec.kind == "cylinder" and expect == "solution":
            worst_exact = max(abs(barrier.closed_form_operator(x)) for x in pts)
            exact_ok = worst_exact <= 1e-12
            ok = ok and exact_ok
            lines.append(
                f"{label}: exact-solution residual {worst_exact:.3e} "
                f"({'ok' if exact_ok else 'NOT EXACT'})"
            )

        report = sweep(
            g,
            barrier.field,
            [(x, t) for x in pts],
            expect=expect,
            tolerance=tol,
            region=barrier.region,
        )
        ok = ok and report.passed
        lines.append(f"{label}: {report.summary()}")

    return SuiteResult(
        f"barriers (m={g.m}, n={g.n}, {samples} points/fixture, tol {tol:.0e})",
        ok,
        lines,
    )


def _sphere_directions(m: int, count: int) -> np.ndarray:
    if m == 2:
        ang = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    if m == 3:
        # Fibonacci lattice: near-uniform covering of S^2
        i = np.arange(count) + 0.5
        phi = np.pi * (1.0 + np.sqrt(5.0)) * i
        z = 1.0 - 2.0 * i / count
        rho = np.sqrt(1.0 - z ** 2)
        return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)
    raise ValueError("direction lattice implemented for m in {2, 3}")


def suite_envelopes(
    matrices: int = 100, directions: int = 10_000, tol: float = 1e-3, seed: int = 0
) -> SuiteResult:
    """Eigen-based envelopes vs dense direction sampling of q -> qq-projected F.

    F_*(0, A) = inf over |q|=1 of F(q, A) and F^* the sup; sampling the unit
    sphere bounds both from inside, which pins the eigenvalue formulas.
    Matrices are normalized to unit Frobenius norm so the tolerance is an
    absolute one.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m in (2, 3):
        dirs = _sphere_directions(m, directions)
        for _ in range(matrices):
            raw = rng.normal(size=(m, m))
            A = (raw + raw.T) / 2.0
            A /= np.linalg.norm(A)
            quad = np.einsum("ij,jk,ik->i", dirs, A, dirs)
            sampled_lo = -np.trace(A) + float(np.min(quad))
            sampled_hi = -np.trace(A) + float(np.max(quad))
            worst = max(
                worst,
                abs(sampled_lo - envelope_lower(A)),
                abs(sampled_hi - envelope_upper(A)),
            )
    return SuiteResult(
        f"envelopes ({matrices} matrices x m in {{2,3}}, {directions} directions, tol {tol:.0e})",
        worst <= tol,
        [f"eigen vs sampled envelopes: worst {worst:.3e}"],
    )


def _cov_families(g: GroupSpec) -> list[ScalarField]:
    hsq = sq_norm(range(g.m))
    full = sq_norm(range(g.n))
    gauge_expr = hsq ** 2 + 4.0 * sq_norm(range(g.m, g.n))
    fields = [hsq, full, gauge_expr, hsq + 0.5 * full, gauge_expr + full]
    return [ScalarField(e, g) for e in fields]


def suite_change_of_variables(
    g: GroupSpec, samples: int = 200, tol: float = 1e-9, seed: int = 0
) -> SuiteResult:
    """curv_op(psi(U)) = psi'(U) curv_op(U) over documented (U, psi, x) draws."""
    rng = np.random.default_rng(seed)
    fields = _cov_families(g)
    maps: list[SmoothMap1D] = [psi_square, psi_sqrt, psi_s_plus_s3]
    worst = 0.0
    count = 0
    while count < samples:
        U = fields[rng.integers(len(fields))]
        psi = maps[rng.integers(len(maps))]
        x = rng.uniform(-1.5, 1.5, size=g.n)
        if np.linalg.norm(x[: g.m]) < 1e-3:
            continue
        value = U(x)
        if psi in (psi_square, psi_sqrt) and value <= 1e-6:
            continue  # stay inside the map's increasing domain
        worst = max(worst, change_of_variables_check(g, U, psi, x))
        count += 1
    return SuiteResult(
        f"change-of-variables ({samples} draws, tol {tol:.0e})",
        worst <= tol,
        [f"relabeling identity: worst relative residual {worst:.3e}"],
    )


SUITES = (
    "group-axioms",
    "norm-lemma",
    "barriers",
    "envelopes",
    "change-of-variables",
)


def run_verify(doc: dict, suites: list[str] | None = None) -> tuple[bool, str]:
    g = build_group(doc)
    vf = doc.get("verify", {})
    samples = _get(vf, "verify", "samples", 500, int)
    tol = _get(vf, "verify", "tolerance", 1e-9, float)
    seed = _get(vf, "verify", "seed", 0, int)
    drifts = vf.get("barrier_drifts", {}) or {}
    selected = suites or vf.get("suites") or list(SUITES)
    for name in selected:
        if name not in SUITES:
            raise ConfigError(f"verify.suites: unknown suite {name!r} (choose from {SUITES})")

    results: list[SuiteResult] = []
    for name in selected:
        if name == "group-axioms":
            results.append(suite_group_axioms(g, max(samples, 1000), 1e-12, seed))
            if g.m == 2:  # also exercise a higher-step-two spec
                results.append(suite_group_axioms(m3n5_spec(), max(samples, 1000), 1e-12, seed))
        elif name == "norm-lemma":
            results.append(suite_norm_lemma(g, max(samples, 1000), 1e-10, seed))
            if g.m == 2:
                results.append(suite_norm_lemma(m3n5_spec(), max(samples, 1000), 1e-10, seed))
        elif name == "barriers":
            results.append(suite_barriers(g, samples, tol, seed, drifts))
        elif name == "envelopes":
            results.append(suite_envelopes(100, 10_000, 1e-3, seed))
        elif name == "change-of-variables":
            results.append(suite_change_of_variables(g, max(samples, 200), tol, seed))
    text = "\n".join(r.report() for r in results)
    return all(r.passed for r in results), text


# -------------------------------------------------------------- commands ---


def cmd_verify(args) -> int:
    doc = load_config(args.config)
    passed, text = run_verify(doc, args.suite or None)
    print(text)
    print("verify:", "all suites passed" if passed else "FAILURES above")
    return 0 if passed else 1


_BARRIER_DEFAULT_C = {
    "cylinder": lambda g: -2.0 * (g.m - 1),
    "gauge": lambda g: 0.0,
    "euclid_ball": lambda g: 0.0,
    "sqrt_gauge": lambda g: -2.0 * g.n,
}


def cmd_barrier(args) -> int:
    doc = load_config(args.config)
    g = build_group(doc)
    kind = args.kind
    if kind not in _BARRIER_DEFAULT_C:
        raise ConfigError(f"--kind: unknown barrier kind {kind!r}")
    initial = doc.get("initial", {})
    r = _get(initial, "initial", "r", 1.0, float)
    c = _get(initial, "initial", "c", _BARRIER_DEFAULT_C[kind](g), float)
    barrier = make_barrier(kind, g, c, r)
    expect = barrier.classification

    lattice = args.lattice
    axes = [np.linspace(-1.5, 1.5, lattice) for _ in range(g.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([a.ravel() for a in mesh], axis=-1)

    rows = []
    skipped_origin = 0
    n_fail = 0
    for x in points:
        if np.linalg.norm(x[: g.m]) < 1e-6:
            skipped_origin += 1
            continue
        if kind == "sqrt_gauge" and homogeneous_norm(g, x) <= 1e-8:
            skipped_origin += 1
            continue
        in_region = barrier.region(x)
        closed = barrier.closed_form_operator(x)
        j = exact_jet(barrier.field, x, 0.0)
        numeric = j.dt + full_operator_G(g, x, j)
        verdict = check_point(g, barrier.field, x, 0.0)
        if not in_region:
            status = "outside-region"
        else:
            mismatch = abs(closed - numeric) > 1e-9 * max(1.0, abs(closed))
            sign_ok = True
            if expect in ("subsolution", "solution"):
                sign_ok = sign_ok and verdict.sub_residual <= 1e-9
            if expect in ("supersolution", "solution"):
                sign_ok = sign_ok and verdict.super_residual >= -1e-9
            status = "ok" if (sign_ok and not mismatch) else "fail"
            if status == "fail":
                n_fail += 1
        rows.append([*x, closed, numeric, verdict.regime, status])
    if not rows:
        raise ConfigError("barrier sampling produced no admissible points")

    out_dir = args.out or doc.get("run", {}).get("out_dir", "out")
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"barrier_{kind}.csv")
    with open(path, "w") as fh:
        fh.write(",".join([f"x{i+1}" for i in range(g.n)] + ["closed_op", "numeric_op", "regime", "verdict"]) + "\n")
        for row in rows:
            coords = ",".join(f"{v:.17g}" for v in row[: g.n + 2])
            fh.write(f"{coords},{row[g.n + 2]},{row[g.n + 3]}\n")
    print(
        f"{kind}(c={c:g}, r={r:g}) expected {expect}: {len(rows)} rows, "
        f"{n_fail} failures, {skipped_origin} points skipped near the axis/origin -> {path}"
    )
    return 0 if n_fail == 0 else 1


def _write_outputs(cfg: SolverConfig, out_dir: str, doc: dict, g: GroupSpec, sandwich: bool) -> int:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "config_effective.json"), "w") as fh:
        json.dump(effective_config_dict(doc, g, cfg), fh, indent=2)
        fh.write("\n")

    counter = {"i": 0}

    def writer(snap):
        i = counter["i"]
        write_snapshot_csv(snap, os.path.join(out_dir, f"snap_{i:04d}.csv"))
        write_front_csv(extract_front(snap), os.path.join(out_dir, f"front_{i:04d}.csv"))
        counter["i"] = i + 1

    try:
        result = run(cfg, record_sandwich=sandwich, on_snapshot=writer)
    except RuntimeError as exc:
        print(f"evolve: aborted, {exc}", file=sys.stderr)
        print(f"evolve: partial outputs in {out_dir}", file=sys.stderr)
        return 1
    print(f"evolve: {counter['i']} snapshots, dt={result.dt:.6g}, steps={result.n_steps}")
    if result.extinction_time is not None:
        print(f"evolve: extinction at t={result.extinction_time:.6g}")
    else:
        print("evolve: no extinction before t_end")
    if sandwich:
        print(f"evolve: sandwich max violation {result.sandwich_max_violation:.3e}")
    return 0


def cmd_evolve(args) -> int:
    doc = load_config(args.config)
    g = build_group(doc)
    cfg = build_solver_config(doc, g)
    run_sec = doc.get("run", {})
    out_dir = args.out or run_sec.get("out_dir", "out")
    sandwich = bool(run_sec.get("sandwich", False))
    if sandwich and cfg.scheme == "regularized":
        status = _write_outputs(cfg, out_dir, doc, g, sandwich=True)
        if status != 0:
            return status
        # companion envelope runs for inspection
        for scheme in ("envelope_min", "envelope_max"):
            sub = build_solver_config({**doc, "scheme": {**doc.get("scheme", {}), "kind": scheme}}, g)
            status = _write_outputs(sub, os.path.join(out_dir, scheme), doc, g, sandwich=False)
            if status != 0:
                return status
        return 0
    return _write_outputs(cfg, out_dir, doc, g, sandwich=False)


def cmd_extinction(args) -> int:
    doc = load_config(args.config)
    g = build_group(doc)
    cfg = build_solver_config(doc, g)
    result = run(cfg)
    if result.extinction_time is not None:
        print(f"extinction: t={result.extinction_time:.6g}")
    else:
        print(f"extinction: none before t_end={cfg.t_end:g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carnotflow",
        description="Step-two Carnot group calculus and horizontal mean curvature flow runs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run verification suites")
    p_verify.add_argument("--config", default=None, help="JSON config path")
    p_verify.add_argument(
        "--suite", action="append", choices=SUITES, help="select a suite (repeatable)"
    )
    p_verify.set_defaults(fn=cmd_verify)

    p_barrier = sub.add_parser("barrier", help="tabulate a catalog barrier on a lattice")
    p_barrier.add_argument("--config", default=None)
    p_barrier.add_argument("--kind", required=True, help="cylinder|gauge|euclid_ball|sqrt_gauge")
    p_barrier.add_argument("--lattice", type=int, default=7, help="lattice points per axis")
    p_barrier.add_argument("--out", default=None, help="output directory override")
    p_barrier.set_defaults(fn=cmd_barrier)

    p_evolve = sub.add_parser("evolve", help="run the level-set evolution, write CSVs")
    p_evolve.add_argument("--config", default=None)
    p_evolve.add_argument("--out", default=None, help="output directory override")
    p_evolve.set_defaults(fn=cmd_evolve)

    p_ext = sub.add_parser("extinction", help="report the numerical extinction time")
    p_ext.add_argument("--config", default=None)
    p_ext.set_defaults(fn=cmd_extinction)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"carnotflow: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
