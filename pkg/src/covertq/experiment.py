"""Monte Carlo campaigns across N with decay-rate fitting.

For each point on the N grid the campaign computes false-alarm, miss and
total error probabilities, either exactly (binomial oracle) or by Monte
Carlo through the event simulator, then fits log-error versus N by least
squares.  The fitted slope of the total error should track the negative
analytical exponent.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from math import log

import numpy as np

from .detect import ErrorProbabilities, exact_error_probabilities, monte_carlo_error
from .exponent import ExponentReport, exponent_report
from .model import ModelParams
from .sim import RngSeed

RESULT_FORMAT_VERSION = 1


class ResultParseError(ValueError):
    """Malformed result file; message names the offending field."""


class ResultVersionError(ValueError):
    """Result file written by an incompatible format version."""


@dataclass(frozen=True)
class CampaignConfig:
    params: ModelParams
    n_grid: tuple[int, ...]
    trials_per_point: int
    threshold: float = 0.0
    master_seed: RngSeed = RngSeed(0)
    use_exact_when_feasible: bool = True
    workers: int = 1

    def __post_init__(self):
        grid = tuple(int(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if not grid:
            raise ValueError("n_grid must be non-empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be positive")


@dataclass
class CampaignRow:
    n: int
    p_f: float
    p_m: float
    p_e: float
    se_f: float
    se_m: float
    trials: int
    seed: int
    method: str  # 'exact' or 'mc'


@dataclass
class ExperimentResult:
    rows: list[CampaignRow]
    fitted_slope_f: float | None
    fitted_slope_m: float | None
    fitted_slope_e: float | None
    exponent_ref: ExponentReport | None
    config: CampaignConfig | None = field(default=None, repr=False)


def _row_stream(master: RngSeed, n: int) -> int:
    # Row streams keyed by n only, so extending the grid never perturbs
    # existing rows.  The detect module offsets per hypothesis and block
    # within a 2**24-wide window per row.
    return master.stream_id + (n + 1) * 2**24


def _fit_slope(ns: np.ndarray, ps: np.ndarray, floor: float) -> float | None:
    keep = ps > floor
    if np.count_nonzero(keep) < 3:
        return None
    return float(np.polyfit(ns[keep], np.log(ps[keep]), 1)[0])


def run_campaign(cfg: CampaignConfig) -> ExperimentResult:
    """Estimate error probabilities at every grid point and fit decay rates."""
    exact_ok = cfg.use_exact_when_feasible and cfg.params.lambda_b > 0
    rows = []
    for n in cfg.n_grid:
        stream = _row_stream(cfg.master_seed, n)
        if exact_ok:
            ep = exact_error_probabilities(cfg.params, n, cfg.threshold)
            row = CampaignRow(
                n=n, p_f=ep.p_f, p_m=ep.p_m, p_e=ep.p_e, se_f=0.0, se_m=0.0,
                trials=cfg.trials_per_point, seed=stream, method="exact",
            )
        else:
            ep = monte_carlo_error(
                cfg.params, n, cfg.threshold, cfg.trials_per_point,
                cfg.master_seed.with_stream(stream), workers=cfg.workers,
            )
            row = CampaignRow(
                n=n, p_f=ep.p_f, p_m=ep.p_m, p_e=ep.p_e,
                se_f=ep.se_f, se_m=ep.se_m,
                trials=cfg.trials_per_point, seed=stream, method="mc",
            )
        rows.append(row)

    ns = np.array([r.n for r in rows], dtype=float)
    # Exact rows are reliable down to tiny probabilities; Monte Carlo rows
    # only down to ~10 observed errors.
    floor = 0.0 if exact_ok else 10.0 / cfg.trials_per_point
    slope_f = _fit_slope(ns, np.array([r.p_f for r in rows]), floor)
    slope_m = _fit_slope(ns, np.array([r.p_m for r in rows]), floor)
    slope_e = _fit_slope(ns, np.array([r.p_e for r in rows]), floor)
    ref = exponent_report(cfg.params) if cfg.params.lambda_b > 0 else None
    return ExperimentResult(
        rows=rows,
        fitted_slope_f=slope_f,
        fitted_slope_m=slope_m,
        fitted_slope_e=slope_e,
        exponent_ref=ref,
        config=cfg,
    )


def threshold_sweep(
    params: ModelParams,
    n: int,
    thresholds: list[float],
    trials: int | None = None,
    seed: RngSeed | None = None,
) -> list[dict]:
    """Error trade-off across detection thresholds.

    Exact binomial evaluation by default; pass `trials` (and a seed) for
    the Monte Carlo path instead.
    """
    rows = []
    for gamma in thresholds:
        if trials is None:
            ep = exact_error_probabilities(params, n, gamma)
        else:
            if seed is None:
                raise ValueError("Monte Carlo sweep requires a seed")
            ep = monte_carlo_error(params, n, gamma, trials, seed)
        rows.append({"gamma": gamma, "p_f": ep.p_f, "p_m": ep.p_m, "p_e": ep.p_e})
    return rows


# --- persistence ----------------------------------------------------------

_ROW_FIELDS = ("n", "p_f", "p_m", "p_e", "se_f", "se_m", "trials", "seed", "method")


def result_to_json(result: ExperimentResult) -> str:
    doc = {
        "version": RESULT_FORMAT_VERSION,
        "rows": [
            {f: getattr(r, f) for f in _ROW_FIELDS} for r in result.rows
        ],
        "fitted_slope_f": result.fitted_slope_f,
        "fitted_slope_m": result.fitted_slope_m,
        "fitted_slope_e": result.fitted_slope_e,
        "exponent_ref": (
            json.loads(result.exponent_ref.to_json())
            if result.exponent_ref is not None
            else None
        ),
    }
    if result.config is not None:
        cfg = result.config
        doc["config"] = {
            "lambda_w": cfg.params.lambda_w,
            "lambda_b": cfg.params.lambda_b,
            "mu": cfg.params.mu,
            "n_grid": list(cfg.n_grid),
            "trials_per_point": cfg.trials_per_point,
            "threshold": cfg.threshold,
            "master_seed": cfg.master_seed.seed,
            "master_stream": cfg.master_seed.stream_id,
            "use_exact_when_feasible": cfg.use_exact_when_feasible,
        }
    return json.dumps(doc, sort_keys=True, indent=1)


def persist(result: ExperimentResult, path) -> None:
    with open(path, "w") as fh:
        fh.write(result_to_json(result))


def load(path) -> ExperimentResult:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ResultParseError(f"not valid JSON: line {exc.lineno}: {exc.msg}")
    version = doc.get("version")
    if version is None:
        raise ResultParseError("missing required field: version")
    if version != RESULT_FORMAT_VERSION:
        raise ResultVersionError(
            f"result file version {version}, expected {RESULT_FORMAT_VERSION}"
        )
    if "rows" not in doc:
        raise ResultParseError("missing required field: rows")
    rows = []
    for i, rec in enumerate(doc["rows"]):
        for f in _ROW_FIELDS:
            if f not in rec:
                raise ResultParseError(f"row {i}: missing required field: {f}")
        rows.append(CampaignRow(**{f: rec[f] for f in _ROW_FIELDS}))
    for f in ("fitted_slope_f", "fitted_slope_m", "fitted_slope_e"):
        if f not in doc:
            raise ResultParseError(f"missing required field: {f}")
    ref = None
    if doc.get("exponent_ref") is not None:
        e = doc["exponent_ref"]
        try:
            ref = ExponentReport(
                v_closed=e["v_closed"],
                v_numeric=e["v_numeric"],
                i_err_closed=e["i_err_closed"],
                i_err_numeric=e["i_err_numeric"],
                i_err_taylor=e["i_err_taylor"],
                abcd=(e["A"], e["B"], e["C"], e["D"]),
                abc_small=(e["a"], e["b"], e["c"]),
            )
        except KeyError as exc:
            raise ResultParseError(
                f"exponent_ref: missing required field: {exc.args[0]}"
            ) from None
    return ExperimentResult(
        rows=rows,
        fitted_slope_f=doc["fitted_slope_f"],
        fitted_slope_m=doc["fitted_slope_m"],
        fitted_slope_e=doc["fitted_slope_e"],
        exponent_ref=ref,
    )


def rows_to_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["n", "p_f", "p_m", "p_e", "se_f", "se_m", "trials"])
    for r in result.rows:
        writer.writerow(
            [r.n, repr(r.p_f), repr(r.p_m), repr(r.p_e),
             repr(r.se_f), repr(r.se_m), r.trials]
        )
    return buf.getvalue()
