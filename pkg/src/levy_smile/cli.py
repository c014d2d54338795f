"""``levy-smile`` command line.

Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure,
4 capability refusal.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import kernels
from .asymptotics import classify, predicted_iv, relevant_slope
from .errors import (ArbitrageError, CapabilityError, ConfigError, DomainError, IntegrationError,
                     NotApplicableError, NumericalError, UpperBoundError)
from .implied_vol import implied_vol
from .models import LevyModel, load_document, model_from_dict
from .pricing import (DEFAULT_N_TERMS, DEFAULT_RANGE_WIDTH, SAMPLERS, mc_expectation,
                      price_call_fourier, price_call_mc)
from .quadrature import integrate_payoff, slope_call, slope_put, slopes

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CAPABILITY = 0, 2, 3, 4

COMMANDS = ("price", "slope", "iv-curve", "verify-slope", "rate", "classify")


class Refusal(Exception):
    """The command does not apply to this model or strike."""


@dataclass(frozen=True)
class Payoff:
    kind: str  # "indicator", "call" or "put"
    lower: float = math.nan
    upper: float = math.nan


@dataclass(frozen=True)
class RunConfig:
    model: LevyModel
    s0: float = 100.0
    strike: float = 110.0
    tau_max: float = 0.1
    tau_ratio: float = 10.0
    tau_count: int = 6
    tau_ref: float = 1.0
    n_terms: int = DEFAULT_N_TERMS
    range_width: float = DEFAULT_RANGE_WIDTH
    n_paths: int = 100_000
    seed: int = 1
    workers: int = 1
    payoff: Payoff = field(default_factory=lambda: Payoff("indicator", 0.5, 1.0))
    out: str | None = None

    def taus(self) -> list[float]:
        """Geometric grid, largest first."""
        return [self.tau_max / self.tau_ratio ** i for i in range(self.tau_count)]

    def check(self) -> "RunConfig":
        if not (self.s0 > 0 and math.isfinite(self.s0)):
            raise ConfigError("market.s0: must be positive")
        if not (self.strike > 0 and math.isfinite(self.strike)):
            raise ConfigError("market.strike: must be positive")
        if not (self.tau_max > 0 and math.isfinite(self.tau_max)):
            raise ConfigError("market.tau_max: must be positive (tau = 0 is not a grid point)")
        if not self.tau_ratio > 1:
            raise ConfigError("market.tau_ratio: must exceed 1 so the grid strictly decreases")
        if self.tau_count < 1:
            raise ConfigError("market.tau_count: must be at least 1")
        if not self.tau_ref > 0:
            raise ConfigError("market.tau_ref: must be positive")
        if self.n_terms < 2:
            raise ConfigError("engine.n_terms: must be at least 2")
        if not self.range_width > 0:
            raise ConfigError("engine.range_width: must be positive")
        if self.n_paths < 2:
            raise ConfigError("engine.n_paths: must be at least 2")
        if self.workers < 1:
            raise ConfigError("engine.workers: must be at least 1")
        if any(t <= 0 for t in self.taus()):
            raise ConfigError("market: tau grid underflows to 0")
        return self


_SECTIONS = {
    "market": {"s0": float, "strike": float, "tau_max": float, "tau_ratio": float,
               "tau_count": int, "tau_ref": float},
    "engine": {"n_terms": int, "range_width": float, "n_paths": int, "seed": int,
               "workers": int},
}


def _coerce(section, key, raw, kind):
    if isinstance(raw, bool):
        raise ConfigError(f"{section}.{key}: expected a number, got {raw!r}")
    try:
        if kind is int:
            value = float(raw)
            if not value.is_integer():
                raise ValueError
            return int(value)
        return float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{key}: expected {'an integer' if kind is int else 'a number'}, "
                          f"got {raw!r}") from None


def parse_payoff(spec) -> Payoff:
    """``{kind: indicator, lower: a, upper: b}`` or the flag form ``indicator:a:b`` / ``call`` / ``put``."""
    if isinstance(spec, str):
        parts = spec.split(":")
        doc = {"kind": parts[0]}
        if len(parts) == 3:
            doc.update(lower=parts[1], upper=parts[2])
        elif len(parts) != 1:
            raise ConfigError(f"payoff: cannot parse {spec!r}")
        spec = doc
    if not isinstance(spec, dict):
        raise ConfigError("payoff: expected a mapping")
    unknown = set(spec) - {"kind", "lower", "upper"}
    if unknown:
        raise ConfigError(f"payoff.{sorted(unknown)[0]}: unknown key")
    kind = str(spec.get("kind", "")).lower()
    if kind == "indicator":
        if "lower" not in spec or "upper" not in spec:
            raise ConfigError("payoff: indicator needs lower and upper")
        return Payoff(kind, _coerce("payoff", "lower", spec["lower"], float),
                      _coerce("payoff", "upper", spec["upper"], float))
    if kind in ("call", "put"):
        if "lower" in spec or "upper" in spec:
            raise ConfigError(f"payoff: {kind} takes its strike from market.strike")
        return Payoff(kind)
    raise ConfigError(f"payoff.kind: unknown payoff {spec.get('kind')!r} (indicator, call, put)")


def config_from_document(doc: dict) -> RunConfig:
    unknown = set(doc) - {"model", "market", "engine", "payoff", "output"}
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown top-level key")
    if "model" not in doc:
        raise ConfigError("model: missing")
    values: dict = {"model": model_from_dict(doc["model"])}
    for section, keys in _SECTIONS.items():
        block = doc.get(section) or {}
        if not isinstance(block, dict):
            raise ConfigError(f"{section}: expected a mapping")
        for key, raw in block.items():
            if key not in keys:
                raise ConfigError(f"{section}.{key}: unknown key")
            values[key] = _coerce(section, key, raw, keys[key])
    if "payoff" in doc:
        values["payoff"] = parse_payoff(doc["payoff"])
    if "output" in doc:
        values["out"] = str(doc["output"])
    return RunConfig(**values)


def _apply_flags(cfg: RunConfig, args) -> RunConfig:
    updates = {}
    for name in ("s0", "strike", "tau_max", "tau_ratio", "tau_count", "n_terms", "n_paths",
                 "seed", "workers", "range_width", "tau_ref", "out"):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "payoff", None):
        updates["payoff"] = parse_payoff(args.payoff)
    return replace(cfg, **updates)


# ---------------------------------------------------------------------------
# output


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return ""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands; each returns (header, rows, summary)


def _require_off_money(cfg):
    if cfg.s0 == cfg.strike:
        raise DomainError("K = S0: at-the-money strikes are excluded; choose K != S0")


def cmd_price(cfg: RunConfig):
    header = ["tau", "fourier_value", "fourier_err", "mc_value", "mc_stderr"]
    mc_ok = type(cfg.model) in SAMPLERS
    rows = []
    for tau in cfg.taus():
        f = price_call_fourier(cfg.model, cfg.s0, cfg.strike, tau, cfg.n_terms, cfg.range_width)
        if mc_ok:
            m = price_call_mc(cfg.model, cfg.s0, cfg.strike, tau, cfg.n_paths, cfg.seed,
                              workers=cfg.workers)
            rows.append([tau, f.value, f.err, m.value, m.err])
        else:
            rows.append([tau, f.value, f.err, None, None])
    note = "" if mc_ok else f" (no Monte-Carlo for {cfg.model.kind})"
    return header, rows, f"price: {len(rows)} expiries{note}"


def cmd_slope(cfg: RunConfig):
    _require_off_money(cfg)
    r = slopes(cfg.model, cfg.s0, cfg.strike)
    header = ["s0", "strike", "k", "I_c", "err_c", "I_p", "err_p"]
    rows = [[cfg.s0, cfg.strike, r.k, r.I_c, r.err_c, r.I_p, r.err_p]]
    return header, rows, f"slope: relevant slope {fmt(r.relevant)}"


def _excess_rows(cfg):
    for tau in cfg.taus():
        yield tau, price_call_fourier(cfg.model, cfg.s0, cfg.strike, tau, cfg.n_terms,
                                      cfg.range_width)


def cmd_verify_slope(cfg: RunConfig):
    _require_off_money(cfg)
    slope, _ = relevant_slope(cfg.model, cfg.s0, cfg.strike)
    if slope <= 0.0:
        raise Refusal("the out-of-the-money slope is zero: the excess is o(tau), "
                      "so there is no linear rate to verify")
    header = ["tau", "excess", "excess_over_tau", "slope", "ratio"]
    rows = []
    for tau, q in _excess_rows(cfg):
        rows.append([tau, q.excess, q.excess / tau, slope, q.excess / (tau * slope)])
    return header, rows, f"verify-slope: final ratio {fmt(rows[-1][4])} at tau={fmt(rows[-1][0])}"


def cmd_iv_curve(cfg: RunConfig):
    _require_off_money(cfg)
    header = ["tau", "sigma_measured", "sigma_predicted", "ratio"]
    rows = []
    for tau, q in _excess_rows(cfg):
        point = implied_vol(q.value, cfg.s0, cfg.strike, tau, log_excess=q.log_excess)
        try:
            pred = predicted_iv(cfg.model, cfg.s0, cfg.strike, tau)
        except NotApplicableError:
            pred = None
        except DomainError:
            pred = None
        ratio = point.sigma / pred if pred else None
        rows.append([tau, point.sigma, pred, ratio])
    return header, rows, f"iv-curve: sigma {fmt(rows[-1][1])} at tau={fmt(rows[-1][0])}"


def _payoff_integral(cfg: RunConfig):
    p = cfg.payoff
    if p.kind == "indicator":
        if not p.lower < p.upper:
            raise ConfigError("payoff: indicator needs lower < upper")
        if p.lower <= 0.0 <= p.upper:
            raise ConfigError("payoff: indicator support touches 0")
        value, _ = integrate_payoff(lambda x: np.ones_like(x), cfg.model, (p.lower, p.upper))
        return value, (kernels.PAYOFF_INDICATOR, p.lower, p.upper)
    if p.kind == "call":
        if cfg.strike <= cfg.s0:
            raise ConfigError("payoff: call payoff needs K > S0 to vanish near 0")
        value, _ = slope_call(cfg.model, cfg.s0, cfg.strike)
        return value, (kernels.PAYOFF_CALL, cfg.s0, cfg.strike)
    if cfg.strike >= cfg.s0:
        raise ConfigError("payoff: put payoff needs K < S0 to vanish near 0")
    value, _ = slope_put(cfg.model, cfg.s0, cfg.strike)
    return value, (kernels.PAYOFF_PUT, cfg.s0, cfg.strike)


def cmd_rate(cfg: RunConfig):
    if type(cfg.model) not in SAMPLERS:
        raise CapabilityError(f"rate needs Monte-Carlo sampling, unavailable for {cfg.model.kind}")
    integral, (code, p1, p2) = _payoff_integral(cfg)
    if integral == 0.0:
        raise ConfigError("payoff: integral against the Levy measure is 0, the ratio is 0/0")
    header = ["tau", "mc_rate", "integral", "ratio", "mc_rate_stderr"]
    rows = []
    for tau in cfg.taus():
        mean, se = mc_expectation(cfg.model, tau, code, p1, p2, cfg.n_paths, cfg.seed,
                                  workers=cfg.workers)
        rows.append([tau, mean / tau, integral, mean / tau / integral, se / tau])
    return header, rows, f"rate: final ratio {fmt(rows[-1][3])} at tau={fmt(rows[-1][0])}"


def cmd_classify(cfg: RunConfig):
    _require_off_money(cfg)
    regime = classify(cfg.model, cfg.s0, cfg.strike, cfg.tau_ref)
    header = ["field", "value"]
    rows = [["regime", regime.tag]] + [[k, regime.evidence[k]] for k in sorted(regime.evidence)]
    lines = [f"regime: {regime}"] + [f"  {k} = {fmt(v)}" for k, v in rows[1:]]
    return header, rows, "\n".join(lines)


HANDLERS = {
    "price": cmd_price,
    "slope": cmd_slope,
    "iv-curve": cmd_iv_curve,
    "verify-slope": cmd_verify_slope,
    "rate": cmd_rate,
    "classify": cmd_classify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levy-smile",
        description="Small-expiry prices, slopes and implied volatilities for exponential-Levy models.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="YAML or JSON run configuration")
    parser.add_argument("--s0", type=float)
    parser.add_argument("--strike", type=float)
    parser.add_argument("--tau-max", dest="tau_max", type=float)
    parser.add_argument("--tau-ratio", dest="tau_ratio", type=float)
    parser.add_argument("--tau-count", dest="tau_count", type=int)
    parser.add_argument("--tau-ref", dest="tau_ref", type=float)
    parser.add_argument("--n-terms", dest="n_terms", type=int)
    parser.add_argument("--range-width", dest="range_width", type=float)
    parser.add_argument("--n-paths", dest="n_paths", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--payoff", help="rate payoff: indicator:<a>:<b>, call or put")
    parser.add_argument("--out", help="CSV output path (default: standard output)")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_flags(config_from_document(load_document(args.config)), args).check()
        header, rows, summary = HANDLERS[args.command](cfg)
    except (ArbitrageError, UpperBoundError) as exc:
        # a model price outside the no-arbitrage band is an engine failure
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (ConfigError, DomainError) as exc:
        if isinstance(exc, NotApplicableError):
            print(f"refused: {exc}", file=stderr)
            return EXIT_CAPABILITY
        print(f"error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (CapabilityError, Refusal) as exc:
        print(f"refused: {exc}", file=stderr)
        return EXIT_CAPABILITY
    except (NumericalError, IntegrationError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    text = render_csv(header, rows)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        stdout.write(text)
    print(summary, file=stdout if cfg.out else stderr)
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
