"""Seeded Monte Carlo experiments: the superadditivity counterexample
scatter and the quasi-factorization validity sweep.

Every sample ``i`` draws from its own stream ``sample_rng(seed, i)``, so
results do not depend on the number of workers or their scheduling.
CSV rows are always written in ``sample_id`` order.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import partial
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import __version__
from .divergences import bs_entropy
from .errors import BSLabError, ConditioningWarning, ConfigError
from .qf import THEOREMS, evaluate_all
from .states import (
    BipartiteState,
    marginals,
    perturbed_product,
    product_state,
    sample_bipartite,
    sample_ginibre_density,
    sample_rng,
)

log = logging.getLogger(__name__)

MODES = ("general", "perturbed", "qf-sweep")
MARGINAL_SOURCES = ("joint", "independent")
SIGMA_MODELS = ("general", "product", "perturbed")

FIGURE1_HEADER = ["sample_id", "bs_joint", "bs_sum_marginals", "gap"]
QF_HEADER = ["sample_id", "theorem", "applicable", "mult", "add", "lhs", "rhs", "gap", "h_norm", "sigma_min"]


@dataclass
class ExperimentConfig:
    """Parameters of one run.

    ``marginal_source`` controls how the single-site states ``sigma_A``,
    ``sigma_B`` (and ``eta_A``, ``eta_B`` in perturbed mode) are drawn:
    ``"joint"`` takes the marginals of one Hilbert-Schmidt random state on
    AB, ``"independent"`` draws each factor on its own. ``sigma_model``
    only applies to ``qf-sweep``.
    """

    mode: str = "perturbed"
    n: int = 10000
    seed: int = 0
    d_a: int = 2
    d_b: int = 2
    epsilon: float = 0.01
    out_csv: str | None = None
    out_json: str | None = None
    violation_tol: float = 1e-9
    marginal_source: str = "joint"
    sigma_model: str = "general"
    workers: int = 1

    def validate(self) -> ExperimentConfig:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, not {self.mode!r}")
        if self.marginal_source not in MARGINAL_SOURCES:
            raise ConfigError(f"marginal_source must be one of {MARGINAL_SOURCES}")
        if self.sigma_model not in SIGMA_MODELS:
            raise ConfigError(f"sigma_model must be one of {SIGMA_MODELS}")
        for name in ("n", "seed", "d_a", "d_b", "workers"):
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise ConfigError(f"{name} must be an integer")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if self.d_a < 2 or self.d_b < 2:
            raise ConfigError("bipartite modes need d_a, d_b >= 2")
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ConfigError("epsilon must be a finite non-negative number")
        if not (math.isfinite(self.violation_tol) and self.violation_tol >= 0):
            raise ConfigError("violation_tol must be a finite non-negative number")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        return self

    @classmethod
    def from_dict(cls, doc: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc).validate()

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentSummary:
    n: int
    rows: int
    skipped: int
    fraction_violations: float
    max_violation: float
    mean_gap: float
    applicable_fraction: float | None = None
    by_theorem: dict | None = field(default=None)

    def to_dict(self) -> dict:
        return _nan_to_none(asdict(self))

    @classmethod
    def from_dict(cls, doc: dict) -> ExperimentSummary:
        d = dict(doc)
        if d.get("mean_gap") is None:
            d["mean_gap"] = math.nan
        return cls(**d)

    def __eq__(self, other):
        if not isinstance(other, ExperimentSummary):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _nan_to_none(x):
    if isinstance(x, float) and math.isnan(x):
        return None
    if isinstance(x, dict):
        return {k: _nan_to_none(v) for k, v in x.items()}
    return x


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return f"{x:.17g}"


# -- sampling recipes -------------------------------------------------------


def _local_pair(cfg: ExperimentConfig, rng: np.random.Generator):
    if cfg.marginal_source == "joint":
        return marginals(sample_bipartite(cfg.d_a, cfg.d_b, rng))
    return sample_ginibre_density(cfg.d_a, rng), sample_ginibre_density(cfg.d_b, rng)


def draw_figure1_sample(cfg: ExperimentConfig, index: int):
    """(rho_AB, sigma_A, sigma_B) for one sample; sigma is drawn first."""
    rng = sample_rng(cfg.seed, index)
    sigma_a, sigma_b = _local_pair(cfg, rng)
    if cfg.mode == "general":
        rho = sample_bipartite(cfg.d_a, cfg.d_b, rng)
    else:
        eta_a, eta_b = _local_pair(cfg, rng)
        lam = sample_ginibre_density(cfg.d_a * cfg.d_b, rng)
        rho = perturbed_product(eta_a, eta_b, lam, cfg.epsilon)
    return rho, sigma_a, sigma_b


def draw_qf_sample(cfg: ExperimentConfig, index: int) -> tuple[BipartiteState, BipartiteState]:
    rng = sample_rng(cfg.seed, index)
    rho = sample_bipartite(cfg.d_a, cfg.d_b, rng)
    if cfg.sigma_model == "general":
        sigma = sample_bipartite(cfg.d_a, cfg.d_b, rng)
    elif cfg.sigma_model == "product":
        sigma = product_state(sample_ginibre_density(cfg.d_a, rng), sample_ginibre_density(cfg.d_b, rng))
    else:
        sigma = perturbed_product(
            sample_ginibre_density(cfg.d_a, rng),
            sample_ginibre_density(cfg.d_b, rng),
            sample_ginibre_density(cfg.d_a * cfg.d_b, rng),
            cfg.epsilon,
        )
    return rho, sigma


# -- per-sample work --------------------------------------------------------


class Figure1Row(NamedTuple):
    sample_id: int
    bs_joint: float
    bs_sum_marginals: float
    gap: float

    def csv_fields(self) -> list[str]:
        return [str(self.sample_id), fmt(self.bs_joint), fmt(self.bs_sum_marginals), fmt(self.gap)]


class QFRow(NamedTuple):
    sample_id: int
    theorem: str
    applicable: bool
    mult: float
    add: float
    lhs: float
    rhs: float
    gap: float
    h_norm: float
    sigma_min: float
    ill_conditioned: bool

    def csv_fields(self) -> list[str]:
        return [
            str(self.sample_id),
            self.theorem,
            "1" if self.applicable else "0",
            *(fmt(x) for x in (self.mult, self.add, self.lhs, self.rhs, self.gap, self.h_norm, self.sigma_min)),
        ]


def figure1_sample(cfg: ExperimentConfig, index: int) -> Figure1Row | str:
    """One scatter point, or an error message if the sample had to be skipped."""
    try:
        rho, sigma_a, sigma_b = draw_figure1_sample(cfg, index)
        ra, rb = marginals(rho)
        joint = bs_entropy(rho, np.kron(sigma_a.matrix, sigma_b.matrix))
        total = bs_entropy(ra, sigma_a) + bs_entropy(rb, sigma_b)
    except BSLabError as exc:
        return f"{type(exc).__name__}: {exc}"
    return Figure1Row(index, joint, total, joint - total)


def qf_sample(cfg: ExperimentConfig, index: int) -> list[QFRow] | str:
    try:
        rho, sigma = draw_qf_sample(cfg, index)
        reports = evaluate_all(rho, sigma)
    except BSLabError as exc:
        return f"{type(exc).__name__}: {exc}"
    return [
        QFRow(index, t, r.applicable, r.multiplicative, r.additive, r.lhs, r.rhs, r.gap,
              r.h_norm, r.sigma_min, r.ill_conditioned)
        for t, r in reports.items()
    ]


def _quiet(func, cfg: ExperimentConfig, index: int):
    # conditioning is already surfaced per row (ill_conditioned, sigma_min)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        return func(cfg, index)


def _map_samples(func, cfg: ExperimentConfig):
    work = partial(_quiet, func, cfg)
    if cfg.workers == 1:
        return [work(i) for i in range(cfg.n)]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        # map() yields in submission order, which keeps CSV rows sorted
        return list(pool.map(work, range(cfg.n), chunksize=max(1, cfg.n // (8 * cfg.workers))))


def _collect(results):
    rows, skipped = [], 0
    for i, r in enumerate(results):
        if isinstance(r, str):
            skipped += 1
            log.warning("sample %d skipped: %s", i, r)
        elif isinstance(r, list):
            rows.extend(r)
        else:
            rows.append(r)
    return rows, skipped


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row.csv_fields())


# -- summaries --------------------------------------------------------------


def summarize_figure1(rows: list[Figure1Row], n: int, skipped: int, tol: float) -> ExperimentSummary:
    gaps = np.array([r.gap for r in rows])
    viol = gaps[gaps < -tol]
    return ExperimentSummary(
        n=n,
        rows=len(rows),
        skipped=skipped,
        fraction_violations=len(viol) / n,
        max_violation=float(-viol.min()) if len(viol) else 0.0,
        mean_gap=float(gaps.mean()) if len(gaps) else math.nan,
    )


def summarize_qf(rows: list[QFRow], n: int, skipped: int, tol: float) -> ExperimentSummary:
    """Violations are counted among applicable, well-conditioned rows only."""
    by_theorem = {}
    violating_samples: set[int] = set()
    all_gaps, max_violation, applicable = [], 0.0, 0
    for t in THEOREMS:
        trows = [r for r in rows if r.theorem == t]
        used = [r for r in trows if r.applicable and not r.ill_conditioned]
        gaps = np.array([r.gap for r in used])
        bad = [r for r in used if r.gap < -tol]
        violating_samples.update(r.sample_id for r in bad)
        worst = max((-r.gap for r in bad), default=0.0)
        max_violation = max(max_violation, worst)
        all_gaps.extend(gaps.tolist())
        applicable += sum(r.applicable for r in trows)
        by_theorem[t] = {
            "applicable_fraction": sum(r.applicable for r in trows) / n,
            "ill_conditioned": sum(r.ill_conditioned for r in trows),
            "violations": len(bad),
            "max_violation": worst,
            "mean_gap": float(gaps.mean()) if len(gaps) else None,
            "min_gap": float(gaps.min()) if len(gaps) else None,
        }
    return ExperimentSummary(
        n=n,
        rows=len(rows) // len(THEOREMS),
        skipped=skipped,
        fraction_violations=len(violating_samples) / n,
        max_violation=max_violation,
        mean_gap=float(np.mean(all_gaps)) if all_gaps else math.nan,
        applicable_fraction=applicable / (len(THEOREMS) * n),
        by_theorem=by_theorem,
    )


# -- drivers ----------------------------------------------------------------


def run_figure1(cfg: ExperimentConfig) -> tuple[ExperimentSummary, list[Figure1Row]]:
    """Scatter of ``D_BS(rho_AB||sigma_A x sigma_B)`` against the sum of the
    marginal BS-entropies. Negative gaps break superadditivity."""
    cfg.validate()
    if cfg.mode not in ("general", "perturbed"):
        raise ConfigError("figure1 runs in 'general' or 'perturbed' mode")
    rows, skipped = _collect(_map_samples(figure1_sample, cfg))
    if cfg.out_csv:
        write_csv(cfg.out_csv, FIGURE1_HEADER, rows)
    return summarize_figure1(rows, cfg.n, skipped, cfg.violation_tol), rows


def run_qf_sweep(cfg: ExperimentConfig) -> tuple[ExperimentSummary, list[QFRow]]:
    cfg.validate()
    if cfg.mode != "qf-sweep":
        raise ConfigError("qf-sweep needs mode='qf-sweep'")
    rows, skipped = _collect(_map_samples(qf_sample, cfg))
    if cfg.out_csv:
        write_csv(cfg.out_csv, QF_HEADER, rows)
    return summarize_qf(rows, cfg.n, skipped, cfg.violation_tol), rows


def sampling_note(cfg: ExperimentConfig) -> str:
    src = (
        "marginals of one Hilbert-Schmidt random state on AB"
        if cfg.marginal_source == "joint"
        else "independent Hilbert-Schmidt random states on A and B"
    )
    if cfg.mode == "qf-sweep":
        return f"rho_AB Hilbert-Schmidt random; sigma_AB model '{cfg.sigma_model}'"
    rho = (
        "rho_AB Hilbert-Schmidt random"
        if cfg.mode == "general"
        else f"rho_AB = (eta_A x eta_B + eps*lambda_AB)/tr, eta_A, eta_B as {src}, lambda_AB Hilbert-Schmidt random"
    )
    return f"sigma_A, sigma_B resampled per sample as {src}; {rho}"


def emit_report(summary: ExperimentSummary, cfg: ExperimentConfig, wall_time: float | None = None,
                path=None) -> dict:
    """Build the JSON run report and write it to ``path`` (or ``cfg.out_json``)."""
    doc = {
        "config": cfg.to_dict(),
        "summary": summary.to_dict(),
        "wall_time_s": wall_time,
        "version": __version__,
        "sampling": sampling_note(cfg),
    }
    target = path if path is not None else cfg.out_json
    if target:
        Path(target).write_text(json.dumps(doc, indent=2) + "\n")
    return doc


def parse_report(doc: dict) -> tuple[ExperimentConfig, ExperimentSummary]:
    return ExperimentConfig.from_dict(doc["config"]), ExperimentSummary.from_dict(doc["summary"])


def load_report(path) -> tuple[ExperimentConfig, ExperimentSummary]:
    return parse_report(json.loads(Path(path).read_text()))


def run(cfg: ExperimentConfig) -> tuple[ExperimentSummary, dict]:
    """Run the configured experiment and emit its report."""
    start = time.perf_counter()
    if cfg.mode == "qf-sweep":
        summary, _ = run_qf_sweep(cfg)
    else:
        summary, _ = run_figure1(cfg)
    doc = emit_report(summary, cfg, wall_time=time.perf_counter() - start)
    return summary, doc
