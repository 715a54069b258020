"""Experiment harness: run suites across algorithms, emit CSV.

CSV schema (one file per run):

    iter,f_value,gap,cum_directions,cum_F_entries,cum_flops,elapsed_ns

Decimals carry 17 significant digits so a round-trip parse is exact; the
gap column is empty when no optimal value is known.  A suite additionally
writes summary.csv with final metrics and the effective settings echoed
per run.  Wall-clock columns are recorded but never used for acceptance;
the flop ledger is the portable complexity proxy.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import ConfigError
from .manifold import CholeskyPoint
from .problems import gen_problem, with_optimum
from .solvers import RunRecord, SolverConfig, run

CSV_HEADER = "iter,f_value,gap,cum_directions,cum_F_entries,cum_flops,elapsed_ns"

SUITE_ALPHAS = {
    "rgd": 0.1,
    "rrsd_uni": 0.5,
    "rrsd_multi": 0.5,
    "rgsd_uni": 0.5,
    "rgsd_multi": 0.5,
}

SUITES = {
    "paper-f1": {"k": -1.0, "algos": ("rgd", "rrsd_uni", "rrsd_multi", "rgsd_multi")},
    "paper-f2": {"k": 0.0, "algos": ("rgd", "rrsd_uni", "rrsd_multi", "rgsd_multi")},
}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def emit_csv(record: RunRecord, path) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for t in range(record.rows):
                fh.write(
                    ",".join(
                        [
                            str(record.iters[t]),
                            _fmt(record.f_values[t]),
                            _fmt(record.gaps[t]),
                            str(record.cum_directions[t]),
                            str(record.cum_f_entries[t]),
                            str(record.cum_flops[t]),
                            str(record.elapsed_ns[t]),
                        ]
                    )
                    + "\n"
                )
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def parse_csv(path):
    """Columns back as python lists (inverse of emit_csv)."""
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}: {header!r}")
        out = {name: [] for name in header.split(",")}
        names = header.split(",")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            for name, raw in zip(names, parts):
                if name in ("iter", "cum_directions", "cum_F_entries", "cum_flops", "elapsed_ns"):
                    out[name].append(int(raw))
                elif raw == "":
                    out[name].append(None)
                else:
                    out[name].append(float(raw))
    return out


@dataclass
class SuiteSettings:
    suite: str
    sizes: tuple = (100,)
    seed: int = 7
    steps: dict = field(default_factory=dict)
    rel_gap_tol: float = 1e-6
    out_dir: str = "bench_out"
    threads: int = 4

    def default_steps(self, algo: str, n: int) -> int:
        if algo in self.steps:
            return self.steps[algo]
        if algo == "rgd":
            return 2000
        if algo == "rrsd_uni":
            return 250 * n * n
        return 5 * n * n


def _one_run(spec, config, x0, f_star):
    return run(spec, config, x0, f_star)


def run_experiment(settings: SuiteSettings):
    """Run the suite; returns (records, summary_path).  One CSV per
    (algorithm, n) plus a merged summary written by the coordinator."""
    if settings.suite not in SUITES:
        raise ConfigError(f"unknown suite {settings.suite!r}; choose from {sorted(SUITES)}")
    suite = SUITES[settings.suite]
    os.makedirs(settings.out_dir, exist_ok=True)

    jobs = []
    for n in settings.sizes:
        inst = with_optimum(gen_problem(n, settings.seed, suite["k"]))
        spec = inst.to_objective()
        x0 = CholeskyPoint.identity(n)
        from .objective import value_at

        d0 = value_at(spec, x0) - inst.f_star
        for algo in suite["algos"]:
            config = SolverConfig(
                algo=algo,
                alpha=SUITE_ALPHAS[algo],
                max_iters=settings.default_steps(algo, n),
                tol=settings.rel_gap_tol * d0,
                seed=settings.seed,
            )
            jobs.append((spec, config, x0, inst.f_star, n, algo))

    records = []
    with ThreadPoolExecutor(max_workers=max(1, settings.threads)) as pool:
        futures = [
            (pool.submit(_one_run, spec, config, x0, f_star), n, algo, config)
            for spec, config, x0, f_star, n, algo in jobs
        ]
        for fut, n, algo, config in futures:
            rec = fut.result()
            path = os.path.join(settings.out_dir, f"{settings.suite}_{algo}_n{n}.csv")
            emit_csv(rec, path)
            records.append((rec, config, path))

    summary_path = os.path.join(settings.out_dir, "summary.csv")
    with open(summary_path, "w") as fh:
        fh.write(
            "suite,algo,n,seed,alpha,max_iters,tol,status,iters_run,"
            "final_f,final_gap,cum_directions,cum_F_entries,cum_flops,elapsed_ns,csv\n"
        )
        for rec, config, path in records:
            fh.write(
                ",".join(
                    [
                        settings.suite,
                        rec.algo,
                        str(rec.n),
                        str(rec.seed),
                        _fmt(rec.alpha),
                        str(config.max_iters),
                        _fmt(config.tol),
                        rec.status,
                        str(rec.iters[-1]),
                        _fmt(rec.f_values[-1]),
                        _fmt(rec.gaps[-1]),
                        str(rec.cum_directions[-1]),
                        str(rec.cum_f_entries[-1]),
                        str(rec.cum_flops[-1]),
                        str(rec.elapsed_ns[-1]),
                        os.path.basename(path),
                    ]
                )
                + "\n"
            )
    return records, summary_path


def gap_at_budget(record: RunRecord, metric: str, budget: int) -> float:
    """Gap at the last row whose cumulative metric is within the budget."""
    series = {
        "directions": record.cum_directions,
        "f_entries": record.cum_f_entries,
        "flops": record.cum_flops,
    }[metric]
    gap = None
    for t in range(record.rows):
        if series[t] > budget:
            break
        gap = record.gaps[t]
    if gap is None:
        raise ValueError("budget below the first recorded row")
    return gap
