"""Monte-Carlo frame-error simulation and the analytic curves that go with it.

An experiment fixes a code, a channel with a list of parameter values, and
an erasure-pattern scheme. Every frame draws its randomness from a stream
derived from ``(seed, point index, frame index)``, so results do not depend
on how frames are split across worker threads.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    AwgnBpskChannel,
    MscChannel,
    build_error_model,
    reliability_from_awgn,
    reliability_from_msc,
    transmit_awgn_bpsk,
    transmit_msc,
)
from .galois import RsCode, encode
from .multitrial import (
    gmd_patterns,
    hd_patterns,
    ml_select,
    run_attempts,
    sample_patterns,
    sed_patterns,
)
from .rde import (
    InfeasibleTarget,
    blahut_rd_at_rate,
    max_exponent,
    mbm_distortion,
    min_rate_for_exponent,
    solve_st,
)
from .rde.binary import binary_entropy, kl_binary

log = logging.getLogger(__name__)

SCHEMES = ("hd", "gmd", "sed", "rd", "rde")
CHANNELS = ("msc", "awgn")
MAX_RATE = 30
DESK_MAX_N = 63
CHUNK = 256
CSV_COLUMNS = ("channel_param", "frames", "frame_errors", "list_misses", "ml_errors",
               "fer", "fer_ci95", "f_exponent", "pe_approx")


class ConfigError(ValueError):
    pass


def _floats(text):
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    return tuple(float(x) for x in str(text).replace(",", " ").split())


def _bool(text):
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 31
    k: int = 25
    bits: int = 0
    channel: str = "msc"
    params: tuple = (0.95, 0.96, 0.97, 0.98)
    scheme: str = "rde"
    ell: int = 1
    rate: float = 8.0
    d_target: int = 0
    sed_l: int = 8
    sed_f: int = 8
    trials: int = 100_000
    min_errors: int = 100
    seed: int = 1
    allow_large: bool = False
    # not part of the experiment definition, never written to output
    output: str = field(default="", compare=False)
    workers: int = field(default=1, compare=False)

    _CONVERTERS = {"params": _floats, "allow_large": _bool}

    def __post_init__(self):
        b = self.bits or max(2, math.ceil(math.log2(self.n + 1)))
        object.__setattr__(self, "bits", b)
        object.__setattr__(self, "d_target", self.d_target or self.n - self.k + 1)
        if not 0 < self.k < self.n <= (1 << b) - 1:
            raise ConfigError(f"need 0 < k < n <= 2^bits - 1, got n={self.n}, k={self.k}, bits={b}")
        if self.channel not in CHANNELS:
            raise ConfigError(f"channel must be one of {CHANNELS}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        if not self.params:
            raise ConfigError("params must list at least one channel parameter")
        if self.channel == "msc":
            for p in self.params:
                if not 0 < p <= 1 or not p > (1 - p) / ((1 << b) - 1):
                    raise ConfigError(f"m-SC parameter {p} out of range")
        if not 1 <= self.ell < (1 << b) or self.ell > 9:
            raise ConfigError("ell must lie in [1, min(m-1, 9)]")
        if self.scheme in ("rd", "rde") and not 0 < self.rate <= MAX_RATE:
            raise ConfigError(f"rate must lie in (0, {MAX_RATE}]")
        if not (0 <= self.sed_f <= self.sed_l <= self.n and self.sed_f % 2 == 0):
            raise ConfigError("SED needs even sed_f <= sed_l <= n")
        for name in ("trials", "min_errors", "workers", "d_target"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.seed < 0 or self.seed >= 1 << 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.n > DESK_MAX_N and not self.allow_large:
            raise ConfigError(f"n={self.n} is beyond desk scale; set allow_large = true to run it")

    @classmethod
    def from_mapping(cls, values: dict) -> "ExperimentConfig":
        kwargs = {}
        names = {f.name: f for f in dataclasses.fields(cls)}
        for key, raw in values.items():
            key = key.strip().replace("-", "_")
            if key not in names:
                raise ConfigError(f"unknown setting {key!r}")
            conv = cls._CONVERTERS.get(key, type(names[key].default))
            try:
                kwargs[key] = conv(raw.strip() if isinstance(raw, str) else raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_file(cls, path, overrides: dict | None = None) -> "ExperimentConfig":
        parser = configparser.ConfigParser()
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not parser.has_section("experiment"):
            raise ConfigError(f"{path}: missing [experiment] section")
        values = dict(parser.items("experiment"))
        values.update(overrides or {})
        return cls.from_mapping(values)

    def header_items(self):
        """Settings that define the experiment, in a fixed order."""
        out = []
        for f in dataclasses.fields(self):
            if not f.compare or f.name.startswith("_"):
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ", ".join(repr(x) for x in v)
            out.append((f.name, v))
        return out

    @property
    def code(self) -> RsCode:
        return RsCode.create(self.n, self.k, self.bits)


@dataclass
class CurvePoint:
    channel_param: float
    frames: int = 0
    frame_errors: int = 0
    list_misses: int = 0
    ml_errors: int = 0
    fer: float = float("nan")
    fer_ci95: float = float("nan")
    f_exponent: float | None = None
    pe_approx: float | None = None

    @classmethod
    def from_counts(cls, param, frames, list_misses, ml_errors, f_exponent=None):
        errors = list_misses + ml_errors
        fer = errors / frames
        ci = 1.96 * math.sqrt(fer * (1.0 - fer) / frames)
        pe = None if f_exponent is None else 2.0 ** (-f_exponent)
        return cls(param, frames, errors, list_misses, ml_errors, fer, ci, f_exponent, pe)


# ---------------------------------------------------------------------------
# frame simulation

def _channel(cfg: ExperimentConfig, param):
    if cfg.channel == "msc":
        return MscChannel(param, 1 << cfg.bits)
    return AwgnBpskChannel(param, cfg.bits, cfg.k / cfg.n)


def msc_model(cfg: ExperimentConfig, p: float):
    """Error-pattern model of the m-SC; identical rows at every position."""
    ch = MscChannel(p, 1 << cfg.bits)
    return build_error_model(reliability_from_msc(np.zeros(cfg.n, dtype=np.int64), ch), cfg.ell)


def _q_for(cfg, model, delta):
    """Reproduction distribution and exponent for the random strategies."""
    if cfg.scheme == "rd":
        _, Q, _ = blahut_rd_at_rate(model, delta, cfg.rate)
        return Q, None
    try:
        _, pt = solve_st(model, delta, cfg.rate, cfg.d_target)
    except InfeasibleTarget as exc:
        if cfg.channel == "msc" or exc.point is None:
            raise
        # this frame's soft information cannot reach the target: use the frontier
        log.debug("frontier fallback: %s", exc)
        return exc.point.Q, exc.point.F
    return pt.Q, pt.F


def _pattern_set(cfg, code, model, delta, rng_seed):
    if cfg.scheme == "hd":
        return hd_patterns(model)
    if cfg.scheme == "gmd":
        return gmd_patterns(model, code)
    if cfg.scheme == "sed":
        return sed_patterns(model, cfg.sed_l, cfg.sed_f)
    Q, _ = _q_for(cfg, model, delta)
    count = int(round(2.0 ** cfg.rate))
    return sample_patterns(Q, count, rng_seed, model, code.d_min, cfg.scheme.upper())


@dataclass
class _PointContext:
    cfg: ExperimentConfig
    code: RsCode
    index: int
    param: float
    channel: object
    delta: np.ndarray
    fixed_set: object = None


def _frame(ctx: _PointContext, f: int):
    """``(list_miss, ml_error)`` of frame ``f``."""
    cfg, code = ctx.cfg, ctx.code
    ch_seq, pat_seq = np.random.SeedSequence(cfg.seed, spawn_key=(ctx.index, 1, f)).spawn(2)
    rng = np.random.default_rng(ch_seq)
    cw = encode(rng.integers(0, code.field.m, code.k), code)
    if cfg.channel == "msc":
        obs = transmit_msc(cw, ctx.channel, rng)
        rel = reliability_from_msc(obs, ctx.channel)
    else:
        obs = transmit_awgn_bpsk(cw, ctx.channel, rng)
        rel = reliability_from_awgn(obs, ctx.channel)
    model = build_error_model(rel, cfg.ell)
    pset = ctx.fixed_set or _pattern_set(cfg, code, model, ctx.delta, pat_seq)
    cands = run_attempts(model.ranked, pset, code)
    if not cands.contains(cw):
        return 1, 0
    return 0, int(not np.array_equal(ml_select(cands, obs, ctx.channel), cw))


def _run_point(ctx: _PointContext, pool):
    cfg = ctx.cfg
    frames = misses = ml_err = 0
    start = 0
    while start < cfg.trials:
        stop = min(start + CHUNK, cfg.trials)
        idx = range(start, stop)
        results = pool.map(lambda f: _frame(ctx, f), idx) if pool else map(lambda f: _frame(ctx, f), idx)
        for lm, me in results:
            frames += 1
            misses += lm
            ml_err += me
            if misses + ml_err >= cfg.min_errors:
                return frames, misses, ml_err
        start = stop
    return frames, misses, ml_err


def run_experiment(cfg: ExperimentConfig, workers: int | None = None):
    """One :class:`CurvePoint` per channel parameter, in config order."""
    if cfg.n > DESK_MAX_N:
        warnings.warn(f"n={cfg.n} is beyond desk scale and may take hours", RuntimeWarning)
    code = cfg.code
    delta = mbm_distortion(cfg.ell)
    workers = workers or cfg.workers
    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    points = []
    try:
        for i, param in enumerate(cfg.params):
            ctx = _PointContext(cfg, code, i, param, _channel(cfg, param), delta)
            F = None
            if cfg.channel == "msc":
                model = msc_model(cfg, param)
                seq = np.random.SeedSequence(cfg.seed, spawn_key=(i, 0))
                ctx.fixed_set = _pattern_set(cfg, code, model, delta, seq)
                if cfg.scheme == "rde":
                    _, F = _q_for(cfg, model, delta)
            frames, misses, ml_err = _run_point(ctx, pool)
            pt = CurvePoint.from_counts(param, frames, misses, ml_err, F)
            if misses:
                log.info("param %s: ml_errors / list_misses = %.3g", param, ml_err / misses)
            points.append(pt)
    finally:
        if pool:
            pool.shutdown()
    return points


# ---------------------------------------------------------------------------
# analytic curves

def _check_analytic(cfg: ExperimentConfig):
    if cfg.channel != "msc" or cfg.ell != 1:
        raise ConfigError("the closed-form analysis covers the m-SC with mBM-1 only")


def analytic_curve(cfg: ExperimentConfig):
    """F and 2^-F of mBM-1 with ``2^rate`` random patterns, per m-SC parameter."""
    _check_analytic(cfg)
    if cfg.scheme != "rde":
        raise ConfigError("the analytic curve is defined for the rde scheme")
    out = []
    for p in cfg.params:
        F = max_exponent(cfg.rate, cfg.d_target, cfg.n, p)
        out.append(CurvePoint(p, f_exponent=F, pe_approx=2.0 ** (-F)))
    return out


def attempts_budget_report(cfg: ExperimentConfig, exponents=None, steps: int = 11):
    """Rows ``(p, F, R, 2^R)``: fewest mBM-1 attempts reaching exponent F."""
    _check_analytic(cfg)
    N, D = cfg.n, cfg.d_target
    rows = []
    for p in cfg.params:
        if p < 1.0 - D / N:
            raise InfeasibleTarget(f"p={p}: no positive exponent at D={D} (need p >= {1 - D / N:.6g})")
        top = N * kl_binary(1.0 - D / N, p)
        grid = np.linspace(0.0, top, steps) if exponents is None else _floats(exponents)
        for F in grid:
            if not 0.0 <= F <= top * (1 + 1e-12):
                raise ConfigError(f"exponent {F} outside [0, {top:.6g}] at p={p}")
            R = min_rate_for_exponent(float(F), D, N, p)
            rows.append((p, float(F), R, 2.0 ** R))
    return rows


def rate_ceiling(cfg: ExperimentConfig) -> float:
    return cfg.n * binary_entropy(1.0 - cfg.d_target / cfg.n)


# ---------------------------------------------------------------------------
# output

def _fmt(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_header(cfg: ExperimentConfig, handle, command: str):
    handle.write(f"# command = {command}\n")
    for key, value in cfg.header_items():
        handle.write(f"# {key} = {value}\n")


def write_curve(points, cfg: ExperimentConfig, handle, command: str = "simulate"):
    write_header(cfg, handle, command)
    handle.write(",".join(CSV_COLUMNS) + "\n")
    for pt in points:
        handle.write(",".join(_fmt(getattr(pt, c)) for c in CSV_COLUMNS) + "\n")


def curve_csv(points, cfg: ExperimentConfig, command: str = "simulate") -> str:
    buf = io.StringIO()
    write_curve(points, cfg, buf, command)
    return buf.getvalue()
