"""Command line front end.

Subcommands: ``fit``, ``forecast``, ``backtest``, ``grid-search``, ``excess``
and ``simulate``. Options may also come from a ``key = value`` config file
(``--config``); explicit flags win over the file.

Exit codes: 0 success, 2 invalid input, 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import re
import sys
import warnings
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .basis import BasisSpec
from .design import ModelKind, PenaltyConfig, build_design
from .errors import SolverError, ValidationError
from .evaluation import DEFAULT_LAMBDAS, backtest, grid_search, lambda_pairs, bic
from .excess import Period, excess_report, pandemic_periods
from .forecast import forecast, seasonal_decomposition, trend_linear_predictor
from .simulation import SimulationConfig, population_table, simulate
from .solver import fit
from .timeseries_io import MonthKey, MonthlySeries, load_series, serialize_monthly_deaths, window

logger = logging.getLogger("seasonal_mortality")

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3
MAX_ADVISED_HORIZON = 36

DEFAULTS: dict[str, Any] = {
    "deaths": None,
    "population": None,
    "model": "stfs",
    "window_years": 5,
    "horizon": 12,
    "lambda_trend": 1e5,
    "lambda_season": 1e5,
    "order_trend": 2,
    "order_season": 1,
    "degree": 3,
    "segments_per_year": 2,
    "lambdas": None,
    "fit_start": None,
    "fit_end": None,
    "periods": "pandemic:2020",
    "stratum": None,
    "out": ".",
    "seed": 0,
    "jobs": 1,
    # simulate
    "start": "2010-01",
    "months": 120,
    "level": 7.0,
    "slope": -0.001,
    "curvature": 0.0,
    "cos_amp": 0.1,
    "sin_amp": 0.03,
    "shock_start": None,
    "shock_months": 0,
    "shock_factor": 1.0,
    "pop_size": None,
}


# -- config ------------------------------------------------------------------
def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment, quotes are stripped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value.strip("\"'")
    return out


@dataclass(frozen=True)
class RunConfig:
    command: str
    values: dict[str, Any]

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def kind(self) -> ModelKind:
        return ModelKind(self.values["model"])

    @property
    def penalty(self) -> PenaltyConfig:
        return PenaltyConfig(self.lambda_trend, self.lambda_season, self.order_trend, self.order_season)

    @property
    def basis_spec(self) -> BasisSpec:
        return BasisSpec(12, self.degree, self.segments_per_year)

    @property
    def out_dir(self) -> Path:
        return Path(self.out)


_CASTS = {
    "window_years": int, "horizon": int, "order_trend": int, "order_season": int, "degree": int,
    "segments_per_year": int, "seed": int, "jobs": int, "months": int, "shock_months": int,
    "lambda_trend": float, "lambda_season": float, "level": float, "slope": float,
    "curvature": float, "cos_amp": float, "sin_amp": float, "shock_factor": float, "pop_size": float,
}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file and flags, then validate before any work starts."""
    values = dict(DEFAULTS)
    if args.config:
        values.update(read_config_file(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    for key, cast in _CASTS.items():
        if values[key] is not None:
            try:
                values[key] = cast(values[key])
            except (TypeError, ValueError):
                raise ValidationError(f"{key}: cannot parse {values[key]!r}") from None
    cfg = RunConfig(args.command, values)

    if values["model"] not in {k.value for k in ModelKind}:
        raise ValidationError(f"unknown model {values['model']!r}")
    if values["window_years"] not in (5, 10):
        raise ValidationError(f"window-years must be 5 or 10, got {values['window_years']}")
    if values["horizon"] < 1:
        raise ValidationError(f"horizon must be >= 1, got {values['horizon']}")
    if values["jobs"] < 1:
        raise ValidationError("jobs must be >= 1")
    cfg.penalty  # validates lambdas and orders
    cfg.basis_spec
    for key in ("fit_start", "fit_end", "start", "shock_start"):
        if values[key] is not None:
            MonthKey.parse(str(values[key]))
    if args.command != "simulate" and not values["deaths"]:
        raise ValidationError("--deaths is required")
    return cfg


# -- output helpers ----------------------------------------------------------
def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".6g")
    return str(v)


def safe_name(stratum: str) -> str:
    return re.sub(r"[^A-Za-z0-9._+-]", "_", stratum)


def write_csv(path: Path, header: Sequence[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_json(path: Path, obj) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_plotdata(path: Path, months, series: dict[str, Sequence]) -> Path:
    """Long format ``month,series_name,value``; missing values are skipped."""
    rows = []
    for name, values in series.items():
        for m, v in zip(months, values):
            if v is not None and np.isfinite(v):
                rows.append((str(m), name, float(v)))
    return write_csv(path, ("month", "series_name", "value"), rows)


def _meta(cfg: RunConfig, series: MonthlySeries) -> dict:
    return {
        "command": cfg.command,
        "stratum": series.stratum,
        "model": cfg.kind.label,
        "start": str(series.start),
        "end": str(series.end),
        "n_months": len(series),
        "penalty": {
            "lambda_trend": cfg.lambda_trend,
            "lambda_season": cfg.lambda_season,
            "order_trend": cfg.order_trend,
            "order_season": cfg.order_season,
        },
        "basis": {"degree": cfg.degree, "segments_per_year": cfg.segments_per_year},
        "has_exposure": series.exposure is not None,
    }


@contextmanager
def _for_stratum(stratum: str):
    """Prefix errors raised while processing one stratum with its label."""
    try:
        yield
    except (ValidationError, SolverError) as exc:
        if repr(stratum) in str(exc):
            raise
        raise type(exc)(f"stratum {stratum!r}: {exc}") from exc


def _load(cfg: RunConfig) -> list[MonthlySeries]:
    series = load_series(cfg.deaths, cfg.population)
    if cfg.stratum:
        series = [s for s in series if s.stratum == cfg.stratum]
        if not series:
            raise ValidationError(f"stratum {cfg.stratum!r} not found")
    return series


def _fit_span(cfg: RunConfig, s: MonthlySeries) -> MonthlySeries:
    start = MonthKey.parse(cfg.fit_start) if cfg.fit_start else s.start
    end = MonthKey.parse(cfg.fit_end) if cfg.fit_end else s.end
    return window(s, start, end - start + 1)


# -- commands ----------------------------------------------------------------
def cmd_fit(cfg: RunConfig) -> list[Path]:
    out = []
    for full in _load(cfg):
        with _for_stratum(full.stratum):
            s = _fit_span(cfg, full)
            bundle = build_design(cfg.kind, len(s), 0, cfg.basis_spec, cfg.penalty, s.exposure)
            res = fit(bundle, s.deaths)
            trend = np.exp(trend_linear_predictor(bundle, res.theta))
            name = safe_name(s.stratum)
            out.append(write_csv(
                cfg.out_dir / f"fit_{name}.csv",
                ("month", "observed", "fitted", "trend_component"),
                zip(map(str, s.months), s.deaths.astype(int), res.mu, trend),
            ))
            meta = _meta(cfg, s)
            meta.update(
                theta=res.theta.tolist(),
                deviance=res.deviance,
                ed=res.ed,
                bic=bic(res, len(s)),
                iterations=res.iterations,
                converged=res.converged,
            )
            out.append(write_json(cfg.out_dir / f"fit_{name}.json", meta))
            plot = {"observed": s.deaths.astype(float), "fitted": res.mu, "trend": trend}
            if s.exposure is not None:
                plot.update(
                    observed_rate=s.deaths / s.exposure,
                    fitted_rate=res.mu / s.exposure,
                    trend_rate=trend / s.exposure,
                )
            if cfg.kind is ModelKind.SP_STSS:
                dec = seasonal_decomposition(res, bundle, s.deaths)
                plot.update(detrended=dec.detrended, modulation=dec.modulation, amplitude=dec.amplitude)
            out.append(write_plotdata(cfg.out_dir / f"plotdata_fit_{name}.csv", s.months, plot))
    return out


def _warn_horizon(horizon: int) -> None:
    if horizon > MAX_ADVISED_HORIZON:
        logger.warning(
            "horizon of %d months exceeds %d; intervals of smooth-trend models widen quickly, "
            "forecasts are advised for one to three years ahead", horizon, MAX_ADVISED_HORIZON,
        )


def _run_forecast(cfg: RunConfig, full: MonthlySeries, train: MonthlySeries, horizon: int):
    """Forecast ``train``; exposures already known for the horizon are used as is."""
    future = None
    if train.exposure is not None:
        i0 = train.end - full.start + 1
        known = full.exposure[i0: i0 + horizon]
        if known.size == horizon:
            future = known
    return forecast(cfg.kind, train, horizon, cfg.basis_spec, cfg.penalty, future)


def _forecast_rows(fc, full: MonthlySeries):
    obs = {m: d for m, d in zip(full.months, full.deaths)}
    for i, m in enumerate(fc.months):
        row = [
            str(m), obs.get(m), fc.expected[i], fc.lower95[i], fc.upper95[i], fc.se_eta[i],
            int(i >= fc.horizon_start),
        ]
        if fc.exposure is not None:
            o = obs.get(m)
            row += [
                None if o is None else o / fc.exposure[i],
                fc.expected_rate[i], fc.lower95_rate[i], fc.upper95_rate[i],
            ]
        yield row


def cmd_forecast(cfg: RunConfig) -> list[Path]:
    _warn_horizon(cfg.horizon)
    out = []
    for full in _load(cfg):
        with _for_stratum(full.stratum):
            train = _fit_span(cfg, full)
            fc = _run_forecast(cfg, full, train, cfg.horizon)
            name = safe_name(full.stratum)
            header = ["month", "observed", "expected", "lower95", "upper95", "se_eta", "is_forecast"]
            if fc.exposure is not None:
                header += ["observed_rate", "expected_rate", "lower95_rate", "upper95_rate"]
            out.append(write_csv(cfg.out_dir / f"forecast_{name}.csv", header, _forecast_rows(fc, full)))
            meta = _meta(cfg, train)
            meta.update(
                horizon=cfg.horizon,
                horizon_start=str(fc.months[fc.horizon_start]),
                theta=fc.fit.theta.tolist(),
                deviance=fc.fit.deviance,
                ed=fc.fit.ed,
                iterations=fc.fit.iterations,
                converged=fc.fit.converged,
                intervals_widen=fc.intervals_widen(),
            )
            out.append(write_json(cfg.out_dir / f"forecast_{name}.json", meta))
            obs = {m: float(d) for m, d in zip(full.months, full.deaths)}
            plot = {
                "observed": [obs.get(m) for m in fc.months],
                "expected": fc.expected,
                "lower95": fc.lower95,
                "upper95": fc.upper95,
                "trend": np.exp(fc.trend_eta),
            }
            out.append(write_plotdata(cfg.out_dir / f"plotdata_forecast_{name}.csv", fc.months, plot))
    return out


def _backtest_files(cfg: RunConfig, s: MonthlySeries, rep, stem: str) -> list[Path]:
    rows = [
        (str(r.fit_start), str(r.test_start), r.bic, r.deviance, r.ed, r.rmse, r.mape)
        for r in rep.records
    ]
    out = [write_csv(
        cfg.out_dir / f"{stem}.csv",
        ("fit_start", "test_start", "bic", "deviance", "ed", "rmse", "mape"),
        rows,
    )]
    meta = _meta(cfg, s)
    meta.update(
        window_years=rep.window_years,
        n_windows=len(rep.records),
        mean_bic=rep.mean_bic,
        mean_rmse=rep.mean_rmse,
        mean_mape=rep.mean_mape,
        windows=[
            {"fit_start": str(r.fit_start), "test_start": str(r.test_start), "bic": r.bic,
             "deviance": r.deviance, "ed": r.ed, "rmse": r.rmse, "mape": r.mape}
            for r in rep.records
        ],
    )
    out.append(write_json(cfg.out_dir / f"{stem}.json", meta))
    months = [r.test_start for r in rep.records]
    out.append(write_plotdata(
        cfg.out_dir / f"plotdata_{stem}.csv",
        months,
        {"bic": [r.bic for r in rep.records], "rmse": [r.rmse for r in rep.records],
         "mape": [r.mape for r in rep.records]},
    ))
    return out


def cmd_backtest(cfg: RunConfig) -> list[Path]:
    out = []
    for full in _load(cfg):
        with _for_stratum(full.stratum):
            s = _fit_span(cfg, full)
            rep = backtest(s, cfg.kind, cfg.window_years, cfg.penalty, cfg.basis_spec, jobs=cfg.jobs)
            stem = f"backtest_{safe_name(s.stratum)}_{cfg.kind.value}_{cfg.window_years}y"
            out += _backtest_files(cfg, s, rep, stem)
    return out


def _parse_lambdas(text: str | None) -> list[float]:
    if not text:
        return list(DEFAULT_LAMBDAS)
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"bad lambda list {text!r}") from None
    if not vals:
        raise ValidationError("lambda grid is empty")
    return vals


def cmd_grid_search(cfg: RunConfig) -> list[Path]:
    grid = lambda_pairs(_parse_lambdas(cfg.lambdas))
    out = []
    for full in _load(cfg):
        with _for_stratum(full.stratum):
            s = _fit_span(cfg, full)
            res = grid_search(
                s, cfg.kind, grid, (cfg.order_trend, cfg.order_season), cfg.window_years,
                cfg.basis_spec, jobs=cfg.jobs,
            )
            stem = f"grid_{safe_name(s.stratum)}_{cfg.kind.value}"
            out.append(write_csv(
                cfg.out_dir / f"{stem}.csv",
                ("lambda_trend", "lambda_season", "mean_mape"),
                [(a, b, m) for (a, b), m in zip(res.grid, res.mean_mape)],
            ))
            meta = _meta(cfg, s)
            meta.update(
                window_years=cfg.window_years,
                chosen={"lambda_trend": res.chosen[0], "lambda_season": res.chosen[1]},
                best_mean_mape=res.best_mape,
                surface=[{"lambda_trend": a, "lambda_season": b, "mean_mape": m}
                         for (a, b), m in zip(res.grid, res.mean_mape)],
            )
            out.append(write_json(cfg.out_dir / f"{stem}.json", meta))
            pen = PenaltyConfig(res.chosen[0], res.chosen[1], cfg.order_trend, cfg.order_season)
            rep = backtest(s, cfg.kind, cfg.window_years, pen, cfg.basis_spec)
            out.append(write_plotdata(
                cfg.out_dir / f"plotdata_{stem}.csv",
                [r.test_start for r in rep.records],
                {"mape_chosen": [r.mape for r in rep.records], "rmse_chosen": [r.rmse for r in rep.records]},
            ))
    return out


def parse_periods(text: str) -> list[Period]:
    """``pandemic:YEAR`` or ``label:YYYY-MM:YYYY-MM[,label:...]``."""
    text = str(text).strip()
    if text.startswith("pandemic"):
        _, _, year = text.partition(":")
        return pandemic_periods(int(year) if year else 2020)
    periods = []
    for item in text.split(","):
        parts = item.strip().split(":")
        if len(parts) != 3:
            raise ValidationError(f"bad period {item!r}; expected label:YYYY-MM:YYYY-MM")
        periods.append(Period(parts[0], MonthKey.parse(parts[1]), MonthKey.parse(parts[2])))
    return periods


def cmd_excess(cfg: RunConfig) -> list[Path]:
    if not cfg.fit_end:
        raise ValidationError("excess needs --fit-end (last month of the baseline period)")
    periods = parse_periods(cfg.periods)
    out = []
    for full in _load(cfg):
        with _for_stratum(full.stratum):
            train = _fit_span(cfg, full)
            horizon = full.end - train.end
            if horizon < 1:
                raise ValidationError(f"stratum {full.stratum!r}: no observed months after {train.end}")
            _warn_horizon(horizon)
            fc = _run_forecast(cfg, full, train, horizon)
            observed = window(full, train.end.shift(1), horizon)
            rep = excess_report(observed, fc, periods)
            name = safe_name(full.stratum)
            has_rate = fc.exposure is not None
            header = ["month", "observed", "expected", "lower95", "upper95", "excess", "flag"]
            if has_rate:
                header += ["observed_rate", "expected_rate", "lower95_rate", "upper95_rate", "excess_rate"]
            rows = []
            for r in rep.months:
                row = [str(r.month), int(r.observed), r.expected, r.lower95, r.upper95, r.excess, r.flag]
                if has_rate:
                    row += [r.rate("observed"), r.rate("expected"), r.rate("lower95"), r.rate("upper95"), r.rate("excess")]
                rows.append(row)
            out.append(write_csv(cfg.out_dir / f"excess_{name}.csv", header, rows))

            pheader = ["period", "start", "end", "observed", "expected", "excess", "lower95", "upper95", "flag"]
            if has_rate:
                pheader += ["excess_rate", "lower95_rate", "upper95_rate"]
            prows = []
            for p in rep.periods:
                row = [p.label, str(p.start), str(p.end), int(p.observed), p.expected, p.excess, p.lower95, p.upper95, p.flag]
                if has_rate:
                    row += [p.excess_rate, p.lower95_rate, p.upper95_rate]
                prows.append(row)
            out.append(write_csv(cfg.out_dir / f"excess_periods_{name}.csv", pheader, prows))

            meta = _meta(cfg, train)
            meta.update(
                horizon=horizon,
                periods=[
                    {"label": p.label, "start": str(p.start), "end": str(p.end), "observed": p.observed,
                     "expected": p.expected, "excess": p.excess, "lower95": p.lower95,
                     "upper95": p.upper95, "flag": p.flag}
                    for p in rep.periods
                ],
                interval="delta-method 95% prediction interval for the mean; period bounds sum monthly bounds",
            )
            out.append(write_json(cfg.out_dir / f"excess_{name}.json", meta))
            months = fc.months
            obs = {m: float(d) for m, d in zip(full.months, full.deaths)}
            plot = {
                "observed": [obs.get(m) for m in months],
                "expected": fc.expected,
                "lower95": fc.lower95,
                "upper95": fc.upper95,
            }
            if has_rate:
                plot.update(
                    observed_rate=[None if obs.get(m) is None else obs[m] / e for m, e in zip(months, fc.exposure)],
                    expected_rate=fc.expected_rate,
                    lower95_rate=fc.lower95_rate,
                    upper95_rate=fc.upper95_rate,
                )
            out.append(write_plotdata(cfg.out_dir / f"plotdata_excess_{name}.csv", months, plot))
    return out


def simulation_config(cfg: RunConfig) -> SimulationConfig:
    return SimulationConfig(
        n_months=cfg.months,
        start=MonthKey.parse(cfg.start),
        level=cfg.level,
        slope=cfg.slope,
        curvature=cfg.curvature,
        cos_amp=cfg.cos_amp,
        sin_amp=cfg.sin_amp,
        shock_start=MonthKey.parse(cfg.shock_start) if cfg.shock_start else None,
        shock_months=cfg.shock_months,
        shock_factor=cfg.shock_factor,
        population=cfg.pop_size,
        stratum=cfg.stratum or "SIM",
    )


def cmd_simulate(cfg: RunConfig) -> list[Path]:
    sim = simulation_config(cfg)
    if sim.n_months < 24:
        raise ValidationError("simulate needs at least 24 months")
    series = simulate(sim, cfg.seed)
    out_dir = cfg.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    deaths = out_dir / "deaths.csv"
    deaths.write_text(serialize_monthly_deaths([series]), encoding="utf-8")
    out = [deaths]
    if sim.population is not None:
        pop = population_table(sim)
        out.append(write_csv(
            out_dir / "population.csv",
            ("stratum", "year", "jan1_population"),
            [(series.stratum, y, repr(p)) for y, p in sorted(pop.items())],
        ))
    return out


COMMANDS = {
    "fit": cmd_fit,
    "forecast": cmd_forecast,
    "backtest": cmd_backtest,
    "grid-search": cmd_grid_search,
    "excess": cmd_excess,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seasonal-mortality", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", help="key = value file; flags override it")
    shared.add_argument("--out", help="output directory (default: .)")
    shared.add_argument("--seed", type=int)
    shared.add_argument("--stratum", help="restrict to one stratum (simulate: label to write)")
    shared.add_argument("-v", "--verbose", action="store_true")

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--deaths", help="deaths.csv (stratum,year,month,deaths)")
    model.add_argument("--population", help="population.csv (stratum,year,jan1_population)")
    model.add_argument("--model", choices=[k.value for k in ModelKind])
    model.add_argument("--window-years", type=int, choices=(5, 10))
    model.add_argument("--horizon", type=int)
    model.add_argument("--lambda-trend", type=float)
    model.add_argument("--lambda-season", type=float)
    model.add_argument("--order-trend", type=int, choices=(1, 2, 3))
    model.add_argument("--order-season", type=int, choices=(1, 2, 3))
    model.add_argument("--degree", type=int)
    model.add_argument("--segments-per-year", type=int)
    model.add_argument("--fit-start", help="first month to fit, YYYY-MM")
    model.add_argument("--fit-end", help="last month to fit, YYYY-MM")
    model.add_argument("--jobs", type=int, help="worker threads for backtests")

    sub.add_parser("fit", parents=[shared, model], help="fit a model and report BIC")
    sub.add_parser("forecast", parents=[shared, model], help="forecast with 95%% intervals")
    sub.add_parser("backtest", parents=[shared, model], help="rolling one-year-ahead backtest")
    g = sub.add_parser("grid-search", parents=[shared, model], help="choose lambdas by mean MAPE")
    g.add_argument("--lambdas", help="comma-separated values used on both axes")
    e = sub.add_parser("excess", parents=[shared, model], help="excess mortality after --fit-end")
    e.add_argument("--periods", help="pandemic:YEAR or label:YYYY-MM:YYYY-MM,...")

    s = sub.add_parser("simulate", parents=[shared], help="write a synthetic deaths.csv")
    s.add_argument("--start", help="first month, YYYY-MM")
    s.add_argument("--months", type=int)
    s.add_argument("--level", type=float)
    s.add_argument("--slope", type=float)
    s.add_argument("--curvature", type=float)
    s.add_argument("--cos-amp", type=float)
    s.add_argument("--sin-amp", type=float)
    s.add_argument("--shock-start", help="first shocked month, YYYY-MM")
    s.add_argument("--shock-months", type=int)
    s.add_argument("--shock-factor", type=float)
    s.add_argument("--pop-size", type=float, help="constant population; also writes population.csv")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        cfg = resolve_config(args)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            logging.captureWarnings(True)
            try:
                paths = COMMANDS[args.command](cfg)
            finally:
                logging.captureWarnings(False)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    for p in paths:
        logger.info("wrote %s", p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
