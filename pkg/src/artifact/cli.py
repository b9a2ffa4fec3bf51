"""Command-line driver.

Every command writes a JSON artifact into ``--out`` and exits nonzero when an
exact identity fails.  ``suite`` runs the whole battery through a process
pool whose size comes from ``--jobs`` or the ``ARTIFACT_THREADS`` variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .report import Report
from .ring import CYCLOTOMIC, SYMBOLIC, Field, RationalField, field_from_spec

log = logging.getLogger("artifact")

COMMANDS = (
    "solve",
    "verify",
    "oracle",
    "tower-braid",
    "tower-dual",
    "nu-check",
    "transfer-check",
    "o1-check",
    "hecke-weights",
    "macdonald",
    "cm-compare",
    "suite",
)

THREADS_ENV = "ARTIFACT_THREADS"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    n: Optional[int] = None
    n_max: Optional[int] = None
    mode: str = "symbolic"
    samples: int = 10
    seed: int = 0
    out: Path = Path(".")
    jobs: int = 1
    as_printed: bool = False
    input: Optional[Path] = None

    def field(self) -> Field:
        try:
            return field_from_spec(self.mode)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad --mode {self.mode!r}: use symbolic, cyclotomic or rational:p/q") from exc


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------


def _dump(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _finish(cfg: RunConfig, name: str, report: Report, extra: Optional[dict] = None) -> int:
    data = {"command": cfg.command, "mode": cfg.mode, "seed": cfg.seed, **report.to_json()}
    if extra:
        data.update(extra)
    _dump(cfg.out / f"{name}.json", data)
    failed = [c for c in report.checks if not c[1]]
    print(f"{name}: {len(report.checks) - len(failed)}/{len(report.checks)} checks passed")
    for check, _, detail in failed:
        print(f"  FAIL {check} {detail}".rstrip())
    return 0 if report.ok else 1


def _need_n(cfg: RunConfig) -> int:
    if cfg.n is None:
        raise ConfigError(f"{cfg.command} needs --n")
    if cfg.n < 0:
        raise ConfigError("--n must be nonnegative")
    return cfg.n


def _n_max(cfg: RunConfig, default: int) -> int:
    n = cfg.n_max if cfg.n_max is not None else (cfg.n if cfg.n is not None else default)
    if n < 0:
        raise ConfigError("--n-max must be nonnegative")
    return n


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_solve(cfg: RunConfig) -> int:
    from .qkz import solve, verify

    n = _need_n(cfg)
    if n < 1:
        raise ConfigError("solve needs n >= 1")
    F = cfg.field()
    if F is SYMBOLIC and n > 5:
        raise ConfigError("symbolic solve is limited to n <= 5; use --mode rational:p/q for n = 6")
    t0 = time.perf_counter()
    g = solve(n, F)
    report = verify(g)
    data = g.to_json(cfg.mode)
    data["verified"] = report.ok
    _dump(cfg.out / f"g{n}.json", data)
    print(f"g{n}: {len(g.patterns())} components, degree {g.degree()}, {time.perf_counter() - t0:.2f}s")
    return _finish(cfg, f"solve-n{n}", report)


def cmd_verify(cfg: RunConfig) -> int:
    from .qkz import PolyVector, solve_cached, verify, verify_basic_rep

    F = cfg.field()
    if cfg.input is not None:
        with open(cfg.input) as fh:
            g = PolyVector.from_json(F, json.load(fh))
    else:
        g = solve_cached(_need_n(cfg), F)
    report = verify(g)
    report.extend(verify_basic_rep(g), "basic-rep ")
    return _finish(cfg, f"verify-n{g.nvars}", report)


def cmd_oracle(cfg: RunConfig) -> int:
    from .qkz import oracle_report

    n = _need_n(cfg)
    F = cfg.field()
    if not isinstance(F, RationalField):
        raise ConfigError("the oracle is exact linear algebra over Q: pass --mode rational:p/q (e.g. rational:2)")
    if not 1 <= n <= 4:
        raise ConfigError("the oracle is limited to 1 <= n <= 4 (the n = 5 system is too large)")
    return _finish(cfg, f"oracle-n{n}", oracle_report(n, F, q_samples=5, seed=cfg.seed))


def cmd_tower_braid(cfg: RunConfig) -> int:
    from .tower import braid_o1_verify, braid_verify, restricted_lhs_report

    n_max = _n_max(cfg, 4)
    F = cfg.field()
    report = Report()
    printed = braid_verify(F, n_max, signed=False)
    signed = braid_verify(F, n_max, signed=True)
    o1 = braid_o1_verify(n_max, as_stated=True)
    if cfg.as_printed:
        report.extend(printed, "printed ")
    else:
        report.extend(signed)
    for n in range(1, min(n_max, 3) + 1):
        report.extend(restricted_lhs_report(F, n))
    report.extend(o1)
    extra = {"printed_factor": printed.to_json()}
    return _finish(cfg, "tower-braid", report, extra)


def cmd_tower_dual(cfg: RunConfig) -> int:
    from .tower import dual_verify

    return _finish(cfg, "tower-dual", dual_verify(cfg.field(), _n_max(cfg, 4)))


def cmd_nu_check(cfg: RunConfig) -> int:
    from .tower import independence_report, intertwining_report, nested_coefficient_report, nu_diagram_check

    F = cfg.field()
    report = Report()
    for n in range(0, _n_max(cfg, 5) + 1):
        report.extend(nu_diagram_check(F, n), f"n={n} ")
        report.extend(intertwining_report(F, n), f"n={n} ")
        report.extend(intertwining_report(F, n, dual=True), f"dual n={n} ")
        report.extend(nested_coefficient_report(F, n), f"n={n} ")
        report.extend(independence_report(F, n, seed=cfg.seed))
    return _finish(cfg, "nu-check", report)


def cmd_transfer_check(cfg: RunConfig) -> int:
    from .transfer import commutation_report, limit_weight_report, rtt_report, tmat_conjugated_report

    report = Report()
    report.extend(limit_weight_report(cfg.samples, cfg.seed))
    for n in range(0, _n_max(cfg, 5) + 1):
        report.extend(commutation_report(n, cfg.samples, cfg.seed))
        report.extend(rtt_report(n, cfg.samples, cfg.seed))
        if n >= 1:
            report.extend(tmat_conjugated_report(n, cfg.samples, cfg.seed))
    return _finish(cfg, "transfer-check", report)


def cmd_o1_check(cfg: RunConfig) -> int:
    from .transfer import o1_groundstate_check, stochasticity_check

    n = _need_n(cfg)
    if n > 6:
        raise ConfigError("o1-check is limited to n <= 6")
    report = o1_groundstate_check(n, seed=cfg.seed)
    if n >= 1:
        report.extend(stochasticity_check(n, 100, cfg.seed))
    return _finish(cfg, f"o1-check-n{n}", report)


def cmd_hecke_weights(cfg: RunConfig) -> int:
    from .qkz import ybe_report
    from .tlrep import hecke_relations_report, pairing_report, principal_series_report, tl_relations_report, weight_vector_report

    F = cfg.field()
    n_max = _n_max(cfg, 5)
    report = Report()
    for n in range(1, n_max + 1):
        report.extend(tl_relations_report(F, n), f"TL n={n} ")
        report.extend(hecke_relations_report(F, n), f"Hecke n={n} ")
        if n >= 2:
            report.extend(ybe_report(F, n, cfg.samples, cfg.seed), f"R n={n} ")
        report.extend(weight_vector_report(F, n), f"n={n} ")
        if n >= 2:
            report.extend(principal_series_report(F, n), f"n={n} ")
    report.extend(pairing_report(F, min(3, n_max // 2)))
    return _finish(cfg, "hecke-weights", report)


def _macdonald_field(cfg: RunConfig, n: int) -> Field:
    F = cfg.field()
    if F is SYMBOLIC and n >= 4:
        raise ConfigError("symbolic Macdonald polynomials are limited to n <= 3; use --mode rational:p/q for n = 4")
    if F is CYCLOTOMIC:
        raise ConfigError("q = t^{3/2} = 1 at the cyclotomic point; use symbolic or rational:p/q")
    return F


def cmd_macdonald(cfg: RunConfig) -> int:
    from .daha import b_relation_report, macdonald_report

    n = _need_n(cfg)
    if not 2 <= n <= 4:
        raise ConfigError("macdonald supports 2 <= n <= 4")
    F = _macdonald_field(cfg, n)
    report = macdonald_report(F, n, wheel_count=20, seed=cfg.seed, compare=False)
    if F is SYMBOLIC:
        report.extend(b_relation_report(F, sizes=(n,) if n <= 3 else ()), "generic q ")
    return _finish(cfg, f"macdonald-n{n}", report)


def cmd_cm_compare(cfg: RunConfig) -> int:
    from .daha import cm_compare
    from .qkz import solve_cached

    n = _need_n(cfg)
    if not 2 <= n <= 4:
        raise ConfigError("cm-compare supports 2 <= n <= 4")
    F = _macdonald_field(cfg, n)
    ok, kappa = cm_compare(F, n, solve_cached(n, F))
    report = Report()
    report.add(f"kappa CM(E) = g n={n}", ok, f"kappa = {kappa}")
    return _finish(cfg, f"cm-compare-n{n}", report, {"kappa": str(kappa)})


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------


def _task_solve(n: int, seed: int, samples: int) -> Report:
    from .qkz import solve_cached, verify

    F = SYMBOLIC if n <= 5 else RationalField(2)
    return verify(solve_cached(n, F))


def _task_oracle(n: int, seed: int, samples: int) -> Report:
    from .qkz import oracle_report

    return oracle_report(n, RationalField(2), 5, seed)


def _task_braid(n: int, seed: int, samples: int) -> Report:
    from .tower import braid_o1_verify, braid_verify

    r = Report().extend(braid_verify(SYMBOLIC, n, signed=True))
    return r.extend(braid_o1_verify(n, as_stated=True))


def _task_braid_printed(n: int, seed: int, samples: int) -> Report:
    from .tower import braid_verify

    return braid_verify(SYMBOLIC, n, signed=False)


def _task_dual(n: int, seed: int, samples: int) -> Report:
    from .tower import dual_verify

    return dual_verify(SYMBOLIC, n)


def _task_intertwiner(n: int, seed: int, samples: int) -> Report:
    from .tower import independence_report, intertwining_report, nested_coefficient_report

    r = Report()
    for k in range(0, n + 1):
        r.extend(intertwining_report(SYMBOLIC, k)).extend(nested_coefficient_report(SYMBOLIC, k))
        r.extend(independence_report(SYMBOLIC, k, seed=seed))
    return r


def _task_algebra(n: int, seed: int, samples: int) -> Report:
    from .qkz import ybe_report
    from .tlrep import hecke_relations_report, tl_relations_report
    from .tower import nu_diagram_check

    r = Report()
    for k in range(1, n + 1):
        r.extend(tl_relations_report(SYMBOLIC, k), f"n={k} ").extend(hecke_relations_report(SYMBOLIC, k), f"n={k} ")
        if k >= 2:
            r.extend(ybe_report(SYMBOLIC, k, samples, seed), f"n={k} ")
    for k in range(0, n + 1):
        r.extend(nu_diagram_check(SYMBOLIC, k), f"n={k} ")
    return r


def _task_transfer(n: int, seed: int, samples: int) -> Report:
    from .transfer import commutation_report, limit_weight_report, rtt_report, tmat_conjugated_report

    r = Report().extend(limit_weight_report(samples, seed))
    for k in range(0, n + 1):
        r.extend(commutation_report(k, samples, seed)).extend(rtt_report(k, samples, seed))
        if k >= 1:
            r.extend(tmat_conjugated_report(k, samples, seed))
    return r


def _task_o1(n: int, seed: int, samples: int) -> Report:
    from .transfer import o1_groundstate_check, stochasticity_check

    r = Report()
    for k in range(0, n + 1):
        r.extend(o1_groundstate_check(k, seed=seed))
        if k >= 1:
            r.extend(stochasticity_check(k, 100, seed))
    return r


def _task_weights(n: int, seed: int, samples: int) -> Report:
    from .tlrep import pairing_report, principal_series_report, weight_vector_report

    r = Report()
    for k in range(1, n + 1):
        r.extend(weight_vector_report(SYMBOLIC, k), f"n={k} ")
        if k >= 2:
            r.extend(principal_series_report(SYMBOLIC, k), f"n={k} ")
    return r.extend(pairing_report(SYMBOLIC, min(3, n // 2)))


def _task_macdonald(n: int, seed: int, samples: int) -> Report:
    from .daha import b_relation_report, macdonald_report

    r = Report()
    for k in range(2, min(n, 4) + 1):
        F = SYMBOLIC if k <= 3 else RationalField(Fraction(3, 2))
        r.extend(macdonald_report(F, k, 20, seed), f"n={k} ")
    return r.extend(b_relation_report(SYMBOLIC))


def _task_basic_rep(n: int, seed: int, samples: int) -> Report:
    from .qkz import solve_cached, verify_basic_rep

    r = Report()
    for k in range(1, min(n, 4) + 1):
        r.extend(verify_basic_rep(solve_cached(k, SYMBOLIC)), f"n={k} ")
    return r


SUITE: List[Tuple[str, Callable[[int, int, int], Report], Callable[[int], List[int]]]] = [
    ("solve", _task_solve, lambda m: list(range(1, m + 1))),
    ("oracle", _task_oracle, lambda m: list(range(1, min(m, 4) + 1))),
    ("braid", _task_braid, lambda m: [m]),
    ("braid-as-printed", _task_braid_printed, lambda m: [m]),
    ("dual", _task_dual, lambda m: [m]),
    ("intertwiner", _task_intertwiner, lambda m: [m]),
    ("algebra", _task_algebra, lambda m: [m]),
    ("transfer", _task_transfer, lambda m: [m]),
    ("o1", _task_o1, lambda m: [m]),
    ("weights", _task_weights, lambda m: [m]),
    ("macdonald", _task_macdonald, lambda m: [m]),
    ("basic-rep", _task_basic_rep, lambda m: [m]),
]

# Checks whose failure is a documented property of the unsigned braid prefactor
# rather than of the implementation; reported, but not counted in the exit code.
KNOWN_DEVIATIONS = {"braid-as-printed"}


def _run_task(args) -> Tuple[str, int, dict, float]:
    name, n, seed, samples = args
    fn = {entry[0]: entry[1] for entry in SUITE}[name]
    t0 = time.perf_counter()
    report = fn(n, seed, samples)
    return name, n, report.to_json(), (time.perf_counter() - t0) * 1000


def cmd_suite(cfg: RunConfig) -> int:
    n_max = _n_max(cfg, 4)
    if n_max < 1:
        raise ConfigError("suite needs --n-max >= 1")
    if n_max > 6:
        raise ConfigError("suite is limited to --n-max <= 6")
    tasks = [(name, n, cfg.seed, cfg.samples) for name, _, ns in SUITE for n in ns(n_max)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]
    summary = []
    exit_code = 0
    for name, n, rep, millis in results:
        status = "pass" if rep["ok"] else ("known-deviation" if name in KNOWN_DEVIATIONS else "fail")
        if status == "fail":
            exit_code = 1
        summary.append({"check": name, "n": n, "status": status, "millis": round(millis)})
        print(f"{name:18s} n={n}  {status}")
        _dump(cfg.out / "suite" / f"{name}-n{n}.json", rep)
    _dump(cfg.out / "suite.json", {"seed": cfg.seed, "n_max": n_max, "results": summary})
    return exit_code


HANDLERS: Dict[str, Callable[[RunConfig], int]] = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
    "tower-braid": cmd_tower_braid,
    "tower-dual": cmd_tower_dual,
    "nu-check": cmd_nu_check,
    "transfer-check": cmd_transfer_check,
    "o1-check": cmd_o1_check,
    "hecke-weights": cmd_hecke_weights,
    "macdonald": cmd_macdonald,
    "cm-compare": cmd_cm_compare,
    "suite": cmd_suite,
}


def run(cfg: RunConfig) -> int:
    if cfg.command not in HANDLERS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    return HANDLERS[cfg.command](cfg)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _default_jobs() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artifact", description="qKZ solutions on link pattern modules")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--n", type=int, default=None, help="system size")
    parser.add_argument("--n-max", type=int, default=None, help="largest size for range commands")
    parser.add_argument("--mode", default="symbolic", help="symbolic | rational:p/q | cyclotomic")
    parser.add_argument("--samples", type=int, default=10, help="random samples per sampled identity")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=Path("."), help="directory for JSON artifacts")
    parser.add_argument("--jobs", type=int, default=None, help=f"worker processes (default ${THREADS_ENV} or 1)")
    parser.add_argument("--as-printed", action="store_true", help="tower-braid: use h^(n) without the (-1)^n sign")
    parser.add_argument("--input", type=Path, default=None, help="verify: a g<n>.json produced by solve")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    if args.samples < 1:
        raise ConfigError("--samples must be positive")
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    if jobs < 1:
        raise ConfigError("--jobs must be positive")
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return RunConfig(
        command=args.command,
        n=args.n,
        n_max=args.n_max,
        mode=args.mode,
        samples=args.samples,
        seed=args.seed,
        out=args.out,
        jobs=jobs,
        as_printed=args.as_printed,
        input=args.input,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = config_from_args(argv)
        return run(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
