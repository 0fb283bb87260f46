"""Command-line experiment runner.

Every subcommand writes one CSV with the fixed column order in ``COLUMNS``.
The first line is a ``# config {...}`` comment holding the fully resolved
configuration, so a file is self-describing; readers skip ``#`` lines.
Exit codes: 0 success, 2 invalid configuration, 3 capacity exceeded,
4 a verification fell outside its numerical tolerance.
"""

import argparse
import csv
import io
import json
import math
import sys
import time
from contextlib import contextmanager
from dataclasses import fields

import numpy as np

from . import bounds, charsums, chaos, partition, rmf, zetasums
from .arith import build_modulus_context, is_prime, sieve
from .estimate import mc_estimate, power_q
from .limits import CAPS, CapacityError

COLUMNS = ("experiment", "r", "x", "T", "P", "q", "lambda", "n_samples", "seed",
           "estimate", "std_error", "bound_name", "bound_value", "ratio", "method",
           "wall_time_ms")
REPORT_COLUMNS = COLUMNS + ("m", "trend")
EXPERIMENTS = ("char-moments", "zeta-moments", "rmf-moments", "chaos-moments",
               "theta-moments", "tails", "verify-partition", "verify-orthogonality",
               "verify-parseval")
STOCHASTIC = {"zeta-moments", "rmf-moments", "chaos-moments", "verify-parseval"}
DEFAULT_Q = (0.0, 0.25, 0.5, 0.75, 1.0)
TREND_RTOL = 1e-12  # rounding slack when comparing m along a sweep

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_TOLERANCE = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


class ToleranceError(RuntimeError):
    pass


# ---------------------------------------------------------------- config


def _parse_list(text, cast=float):
    if isinstance(text, (list, tuple)):
        return [cast(v) for v in text]
    return [cast(v) for v in str(text).split(",") if v.strip()]


def load_config_file(path):
    """JSON object, or ``key = value`` lines (``#`` comments allowed)."""
    with open(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigError("config JSON must be an object")
        return data
    except json.JSONDecodeError:
        pass
    data = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        data[k.replace("-", "_")] = v
    return data


_INT_KEYS = ("r", "x", "p_limit", "samples", "threads", "seed", "n_max")
_FLOAT_KEYS = ("t_max", "sigma")
_LIST_KEYS = {"q": float, "lambda": float, "delta": float, "N": int, "x_list": int}
_BOOL_KEYS = ("exclude_principal", "timing")
_STR_KEYS = ("coeffs", "mode", "estimator", "out")
_CAP_KEYS = tuple(f.name for f in fields(CAPS))


def _as_bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def normalize_config(raw):
    cfg = {}
    for k, v in raw.items():
        key = k.replace("-", "_")
        if v is None:
            continue
        try:
            if key in _INT_KEYS:
                f = float(v)
                if f != int(f):
                    raise ConfigError(f"{key} must be an integer")
                cfg[key] = int(f)
            elif key in _FLOAT_KEYS:
                cfg[key] = float(v)
            elif key in _LIST_KEYS:
                cfg[key] = _parse_list(v, _LIST_KEYS[key])
            elif key in _BOOL_KEYS:
                cfg[key] = _as_bool(v)
            elif key in _STR_KEYS:
                cfg[key] = str(v)
            elif key == "caps":
                cfg[key] = {c: float(x) for c, x in dict(v).items()}
            elif key == "experiment":
                cfg[key] = str(v)
            else:
                raise ConfigError(f"unknown configuration key {k!r}")
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {k!r}: {v!r}") from None
    for c in cfg.get("caps", {}):
        if c not in _CAP_KEYS:
            raise ConfigError(f"unknown cap {c!r}; expected one of {_CAP_KEYS}")
    return cfg


def _need(cfg, key, experiment):
    if key not in cfg:
        raise ConfigError(f"{experiment} needs --{key.replace('_', '-')}")
    return cfg[key]


def _check_prime(r):
    if r < 3 or not is_prime(r):
        raise ConfigError(f"r={r} must be an odd prime")


def _check_qs(qs):
    for q in qs:
        if not 0.0 <= q <= 1.0:
            raise ConfigError(f"q={q} outside [0, 1]")


@contextmanager
def _caps(overrides):
    saved = {c: getattr(CAPS, c) for c in _CAP_KEYS}
    try:
        for c, v in overrides.items():
            setattr(CAPS, c, type(saved[c])(v))
        yield
    finally:
        for c, v in saved.items():
            setattr(CAPS, c, v)


# ---------------------------------------------------------------- rows


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def _row(experiment, **kw):
    unknown = set(kw) - set(COLUMNS)
    assert not unknown, unknown
    return {c: kw.get(c) for c in COLUMNS} | {"experiment": experiment}


def _moment_row(experiment, est, shape=None, **kw):
    row = _row(experiment, q=est.q, n_samples=est.n_samples, estimate=est.value,
               std_error=est.std_error, method=est.method, **kw)
    if shape is not None:
        rec = bounds.ratio_report(est, shape)
        row.update(bound_name=shape.name, bound_value=shape.value, ratio=rec.ratio)
    return row


def _maybe_bound(name, **params):
    try:
        return bounds.bound(name, **params)
    except ValueError:
        return None


# ---------------------------------------------------------------- experiments


def run_char_moments(cfg):
    r = _need(cfg, "r", "char-moments")
    _check_prime(r)
    x = cfg.get("x", r // 2)
    if not 1 <= x < r:
        raise ConfigError(f"x={x} must satisfy 1 <= x < r")
    qs = cfg.get("q", list(DEFAULT_Q))
    _check_qs(qs)
    coeffs = cfg.get("coeffs", "unit")
    if coeffs not in ("unit", "mobius", "liouville"):
        raise ConfigError("coeffs must be unit, mobius or liouville")
    ctx = build_modulus_context(r)
    table = charsums.bulk_character_sums(ctx, x, coeffs)
    name = "thm1" if coeffs == "unit" else "thm3"
    rows = []
    for q in qs:
        est = charsums.empirical_moment(table, q, cfg.get("exclude_principal", False))
        rows.append(_moment_row("char-moments", est, _maybe_bound(name, x=x, r=r, q=q), r=r, x=x))
    return rows


def run_zeta_moments(cfg):
    x = _need(cfg, "x", "zeta-moments")
    T = _need(cfg, "t_max", "zeta-moments")
    if not 1 <= x <= T:
        raise ConfigError("need 1 <= x <= t-max")
    qs = cfg.get("q", list(DEFAULT_Q))
    _check_qs(qs)
    mode = cfg.get("mode", "monte-carlo")
    try:
        spec = zetasums.TAverageSpec(T=T, mode=mode, n_points=cfg.get("samples", 10_000),
                                     seed=cfg.get("seed", 0))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    rows = []
    for q in qs:
        est = zetasums.zeta_moment(x, spec, q, cfg.get("threads", 1))
        rows.append(_moment_row("zeta-moments", est, _maybe_bound("thm2", x=x, T=T, q=q),
                                x=x, T=T, seed=cfg.get("seed")))
    return rows


def _samples(cfg, experiment):
    n = _need(cfg, "samples", experiment)
    if n < 2:
        raise ConfigError("samples must be >= 2")
    return n


def run_rmf_moments(cfg):
    x = _need(cfg, "x", "rmf-moments")
    if x < 1:
        raise ConfigError("x must be >= 1")
    qs = cfg.get("q", list(DEFAULT_Q))
    _check_qs(qs)
    n = _samples(cfg, "rmf-moments")
    sums = rmf.rmf_sums(x, n, cfg["seed"], cfg.get("threads", 1))
    rows = []
    for q in qs:
        est = rmf.moment_from_sums(sums, q)
        rows.append(_moment_row("rmf-moments", est, _maybe_bound("helson", x=x, q=q),
                                x=x, seed=cfg["seed"]))
    return rows


def run_chaos_moments(cfg):
    P = _need(cfg, "p_limit", "chaos-moments")
    if P < 3:
        raise ConfigError("p-limit must be >= 3")
    qs = cfg.get("q", [2 / 3, 0.75, 1.0])
    _check_qs(qs)
    n = _samples(cfg, "chaos-moments")
    estimator = cfg.get("estimator", "integral")
    threads = cfg.get("threads", 1)
    if estimator == "integral":
        vals = chaos.integral_averages(P, n, cfg["seed"], threads=threads)
    elif estimator == "discrete":
        vals = chaos.discrete_averages(P, n, cfg["seed"], threads=threads)
    else:
        raise ConfigError("estimator must be 'integral' or 'discrete'")
    rows = []
    for q in qs:
        est = mc_estimate(power_q(vals, q), q)
        rows.append(_moment_row("chaos-moments", est, _maybe_bound("chaos", P=P, q=q),
                                P=P, seed=cfg["seed"]))
    return rows


def run_theta_moments(cfg):
    r = _need(cfg, "r", "theta-moments")
    _check_prime(r)
    qs = cfg.get("q", list(DEFAULT_Q))
    _check_qs(qs)
    ctx = build_modulus_context(r)
    rows = []
    for parity in ("even", "odd"):
        vals = charsums.theta_values(ctx, parity)
        for q in qs:
            est = charsums.theta_moment(vals, q, r)
            shape = _maybe_bound(f"cor2-{parity}", r=r, q=q)
            rows.append(_moment_row("theta-moments", est, shape, r=r))
    return rows


def run_tails(cfg):
    r = _need(cfg, "r", "tails")
    _check_prime(r)
    x = _need(cfg, "x", "tails")
    if not 1 <= x < r:
        raise ConfigError(f"x={x} must satisfy 1 <= x < r")
    lams = cfg.get("lambda", [2.0, 4.0, 8.0])
    for lam in lams:
        if lam < 2:
            raise ConfigError(f"lambda={lam} must be >= 2")
    table = charsums.bulk_character_sums(build_modulus_context(r), x)
    rows = []
    for lam in lams:
        frac = charsums.tail_fraction(table, lam)
        shape = bounds.bound("cor1", x=x, r=r, lam=lam)
        rows.append(_row("tails", r=r, x=x, **{"lambda": lam}, n_samples=r - 1, estimate=frac,
                         std_error=0.0, bound_name="cor1", bound_value=shape.value,
                         ratio=frac / shape.value, method="exact-average"))
    return rows


def _verify_row(experiment, name, measured, limit, ok, **kw):
    row = _row(experiment, estimate=measured, std_error=0.0, bound_name=name,
               bound_value=limit, ratio=(measured / limit if limit > 0 else None), **kw)
    row["_ok"] = bool(ok)
    return row


def run_verify_partition(cfg):
    deltas = cfg.get("delta", [0.5, 0.2, 0.05])
    Ns = cfg.get("N", [5, 20])
    tol = 1e-8
    rows = []
    for delta in deltas:
        if not 0 < delta <= 1:
            raise ConfigError(f"delta={delta} outside (0, 1]")
        for N in Ns:
            if N < 1:
                raise ConfigError("N must be >= 1")
            x = np.linspace(-3 * N, 3 * N, 12001 + 400 * N)
            vals = partition.SmoothPartition(delta, N).evaluate(x)
            g, rest = vals[:, :-1], vals[:, -1]
            g0 = partition.g_eval(delta, x)
            far = np.abs(x) > 1
            tag = f"@delta={delta:g},N={N}"
            common = dict(method="quadrature")
            rows += [
                _verify_row("verify-partition", "g-min" + tag, float(g0.min()), -tol,
                            g0.min() >= -tol, **common),
                _verify_row("verify-partition", "g-far-max" + tag, float(g0[far].max()), delta + tol,
                            g0[far].max() <= delta + tol, **common),
                _verify_row("verify-partition", "cells-sum-max" + tag, float(g.sum(axis=1).max()),
                            1 + tol, g.sum(axis=1).max() <= 1 + tol, **common),
                _verify_row("verify-partition", "remainder-min" + tag, float(rest.min()), -tol,
                            rest.min() >= -tol, **common),
                _verify_row("verify-partition", "remainder-inner-max" + tag,
                            float(rest[np.abs(x) <= N].max()), delta + tol,
                            rest[np.abs(x) <= N].max() <= delta + tol, **common),
            ]
            for l in (1, 2, 3):
                ratio = partition.derivative_bound_check(delta, l, np.linspace(-N - 2, N + 2, 4001))
                rows.append(_verify_row("verify-partition", f"derivative-l{l}" + tag, ratio, 1.1,
                                        ratio <= 1.1, **common))
    return rows


def run_verify_orthogonality(cfg):
    r = _need(cfg, "r", "verify-orthogonality")
    _check_prime(r)
    xs = cfg.get("x_list", [1, 10, r // 2]) if "x" not in cfg else [cfg["x"]]
    ctx = build_modulus_context(r)
    rows = []
    for x in xs:
        if not 1 <= x < r:
            raise ConfigError(f"x={x} must satisfy 1 <= x < r")
        est = charsums.empirical_moment(charsums.bulk_character_sums(ctx, x), 1.0)
        rel = abs(est.value - x) / x
        rows.append(_verify_row("verify-orthogonality", "floor-x", est.value, float(x),
                                rel <= 1e-6, r=r, x=x, q=1.0, n_samples=r - 1,
                                method="exact-average"))
    return rows


def run_verify_parseval(cfg):
    n_max = cfg.get("n_max", cfg.get("x", 100))
    P = cfg.get("p_limit", 5)
    sigma = cfg.get("sigma", 0.6)
    t_max = cfg.get("t_max", 1000.0)
    if sigma <= 0:
        raise ConfigError("sigma must be positive")
    if n_max < 1:
        raise ConfigError("x must be >= 1")
    sample = rmf.sample_rmf(sieve(max(n_max, 2)), cfg["seed"])
    f = rmf.f_values(sample, n_max)[1:]
    smooth = rmf._plan(n_max).gpf[1:] <= P
    a = np.where(smooth, f, 0.0)
    res = chaos.parseval_check(a, sigma, t_max)
    single = chaos.parseval_check([1.0], sigma, t_max)
    common = dict(x=n_max, P=P, T=t_max, seed=cfg["seed"], method="quadrature")
    tag = f"@sigma={sigma:g}"
    return [
        _verify_row("verify-parseval", "parseval-smooth" + tag, res.rhs, res.lhs, res.rel_diff < 5e-3,
                    **common),
        _verify_row("verify-parseval", "parseval-single" + tag, single.rhs, single.lhs,
                    single.rel_diff < 5e-3, **common),
    ]


RUNNERS = {
    "char-moments": run_char_moments,
    "zeta-moments": run_zeta_moments,
    "rmf-moments": run_rmf_moments,
    "chaos-moments": run_chaos_moments,
    "theta-moments": run_theta_moments,
    "tails": run_tails,
    "verify-partition": run_verify_partition,
    "verify-orthogonality": run_verify_orthogonality,
    "verify-parseval": run_verify_parseval,
}


def render_csv(rows, config=None, columns=COLUMNS):
    buf = io.StringIO()
    if config is not None:
        buf.write("# config " + json.dumps(config, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def run(experiment, cfg):
    """Run one experiment; returns (csv_text, all_checks_passed)."""
    if experiment not in RUNNERS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    stochastic = experiment in STOCHASTIC and not (
        experiment == "zeta-moments" and cfg.get("mode") == "quadrature")
    if stochastic and "seed" not in cfg:
        raise ConfigError(f"{experiment} is stochastic and needs an explicit --seed")
    if "seed" in cfg and not 0 <= cfg["seed"] < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if cfg.get("threads", 1) < 1:
        raise ConfigError("threads must be >= 1")
    resolved = dict(sorted(cfg.items())) | {"experiment": experiment}
    with _caps(cfg.get("caps", {})):
        start = time.perf_counter()
        rows = RUNNERS[experiment](cfg)
        elapsed = (time.perf_counter() - start) * 1e3
    if cfg.get("timing"):
        for row in rows:
            row["wall_time_ms"] = elapsed
    ok = all(row.pop("_ok", True) for row in rows)
    return render_csv(rows, resolved), ok


# ---------------------------------------------------------------- report


def read_rows(path):
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader, None)
    if header is None or tuple(header) != COLUMNS:
        raise ConfigError(f"{path}: header does not match the run schema")
    rows = []
    for rec in reader:
        if len(rec) != len(COLUMNS):
            raise ConfigError(f"{path}: row has {len(rec)} fields, expected {len(COLUMNS)}")
        rows.append(dict(zip(COLUMNS, rec)))
    return rows


def _num(s):
    return float(s) if s not in ("", None) else None


def normalized_first_moment(row):
    """m = estimate^{1/(2q)} / sqrt(x): the 2q-th moment mapped to the scale of
    a first moment and normalized by sqrt(x)."""
    if row["experiment"] not in ("char-moments", "zeta-moments", "rmf-moments"):
        return None
    q, x, est = _num(row["q"]), _num(row["x"]), _num(row["estimate"])
    if not q or not x or est is None:
        return None
    return est ** (1.0 / (2.0 * q)) / math.sqrt(x)


def report(paths, sweep="r"):
    """Join run CSVs, add m and a non-increase verdict per group along ``sweep``.

    Rows sharing experiment, q, lambda and bound name form a group; each row
    gets ``trend`` = pass/fail for m being non-increasing in the sweep
    variable across its group (empty when the group has one row or no m).
    A blank standard error on an exact-average row is reported as 0.
    """
    if sweep not in ("r", "x", "T", "P"):
        raise ConfigError("sweep must be one of r, x, T, P")
    rows = []
    for p in paths:
        rows += read_rows(p)
    for row in rows:
        if row["method"] == "exact-average" and row["std_error"] == "":
            row["std_error"] = "0"
        m = normalized_first_moment(row)
        row["m"] = "" if m is None else format(m, ".17g")
    groups = {}
    for row in rows:
        key = (row["experiment"], row["q"], row["lambda"], row["bound_name"])
        groups.setdefault(key, []).append(row)
    for members in groups.values():
        usable = [r for r in members if r["m"] and r[sweep]]
        verdict = ""
        if len(usable) > 1:
            usable.sort(key=lambda r: float(r[sweep]))
            ms = [float(r["m"]) for r in usable]
            verdict = "pass" if all(b <= a * (1 + TREND_RTOL) for a, b in zip(ms, ms[1:])) else "fail"
        for r in members:
            r["trend"] = verdict if r in usable else ""
    return render_csv(rows, columns=REPORT_COLUMNS)


# ---------------------------------------------------------------- entry point


def _error(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": str(message), "exit_code": code}) + "\n")
    return code


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or key = value file; flags override it")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--r", type=int, default=None)
    common.add_argument("--x", type=int, default=None)
    common.add_argument("--t-max", type=float, default=None)
    common.add_argument("--p-limit", type=int, default=None)
    common.add_argument("--q", default=None, help='comma list, e.g. "0,0.25,0.5,0.75,1"')
    common.add_argument("--lambda", dest="lambda_", default=None, help="comma list of lambda")
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--exclude-principal", action="store_true", default=None)
    common.add_argument("--coeffs", default=None, help="unit, mobius or liouville")
    common.add_argument("--mode", default=None, help="monte-carlo or quadrature (zeta)")
    common.add_argument("--estimator", default=None, help="integral or discrete (chaos)")
    common.add_argument("--delta", default=None, help="comma list (verify-partition)")
    common.add_argument("--N", default=None, help="comma list (verify-partition)")
    common.add_argument("--sigma", type=float, default=None)
    common.add_argument("--timing", action="store_true", default=None,
                        help="fill wall_time_ms (makes output run-dependent)")

    parser = argparse.ArgumentParser(prog="lowmoments", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sub.add_parser(name, parents=[common])
    rep = sub.add_parser("report")
    rep.add_argument("inputs", nargs="+")
    rep.add_argument("--sweep", default="r")
    rep.add_argument("--out")
    return parser


def _cli_overrides(ns):
    mapping = {"lambda_": "lambda"}
    skip = {"experiment", "config"}
    return {mapping.get(k, k): v for k, v in vars(ns).items() if k not in skip and v is not None}


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if ns.experiment == "report":
            _write(report(ns.inputs, ns.sweep), ns.out)
            return EXIT_OK
        raw = load_config_file(ns.config) if ns.config else {}
        cfg = normalize_config(raw | _cli_overrides(ns))
        out = cfg.pop("out", None)
        text, ok = run(ns.experiment, cfg)
        _write(text, out)
        if not ok:
            return _error("tolerance", f"{ns.experiment}: a check fell outside tolerance",
                          EXIT_TOLERANCE)
        return EXIT_OK
    except CapacityError as exc:
        return _error("capacity", exc, EXIT_CAPACITY)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        return _error("invalid-config", exc, EXIT_CONFIG)
    except ToleranceError as exc:
        return _error("tolerance", exc, EXIT_TOLERANCE)


if __name__ == "__main__":
    sys.exit(main())
