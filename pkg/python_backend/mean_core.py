#!/usr/bin/env python3
"""
Mean-Type Mapping Toolkit - Mean Core
Intervals, the built-in mean catalog, table means, sampling helpers and
pointwise classification of mean properties (internality, symmetry,
one-sided strictness).
"""

import csv
import math
import sys
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple
import logging

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from config_system import DEFAULTS
from errors import DomainError, EmptySampleError, MeanEvaluationError, ParameterError, TableDataError

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


class MeanKind(Enum):
    """Catalog tag of a mean"""
    ARITHMETIC = "arithmetic"
    GEOMETRIC = "geometric"
    HARMONIC = "harmonic"
    POWER = "power"
    MIN = "min"
    MAX = "max"
    PROJ1 = "proj1"
    PROJ2 = "proj2"
    WEIGHTED_ARITHMETIC = "weighted_arithmetic"
    TABLE = "table"


# Number of real parameters each DSL kind takes
KIND_ARITY: Dict[MeanKind, int] = {
    MeanKind.ARITHMETIC: 0,
    MeanKind.GEOMETRIC: 0,
    MeanKind.HARMONIC: 0,
    MeanKind.POWER: 1,
    MeanKind.MIN: 0,
    MeanKind.MAX: 0,
    MeanKind.PROJ1: 0,
    MeanKind.PROJ2: 0,
    MeanKind.WEIGHTED_ARITHMETIC: 1,
}


@dataclass(frozen=True)
class Interval:
    """An interval of the extended real line; infinite ends are always open"""
    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or not self.lo < self.hi:
            raise ParameterError(f"degenerate interval: lo={self.lo}, hi={self.hi}")
        if math.isinf(self.lo):
            object.__setattr__(self, "lo_open", True)
        if math.isinf(self.hi):
            object.__setattr__(self, "hi_open", True)

    @classmethod
    def real_line(cls) -> "Interval":
        return cls(-math.inf, math.inf)

    @classmethod
    def positive(cls) -> "Interval":
        return cls(0.0, math.inf, lo_open=True)

    @classmethod
    def nonnegative(cls) -> "Interval":
        return cls(0.0, math.inf)

    @classmethod
    def closed(cls, lo: float, hi: float) -> "Interval":
        return cls(lo, hi)

    def contains(self, x: float) -> bool:
        if math.isnan(x) or math.isinf(x):
            return False
        above = self.lo < x if self.lo_open else self.lo <= x
        below = x < self.hi if self.hi_open else x <= self.hi
        return above and below

    def contains_point(self, x: float, y: float) -> bool:
        return self.contains(x) and self.contains(y)

    def is_subset(self, other: "Interval") -> bool:
        """True if self is contained in other"""
        if self.lo < other.lo or (self.lo == other.lo and other.lo_open and not self.lo_open):
            return False
        if self.hi > other.hi or (self.hi == other.hi and other.hi_open and not self.hi_open):
            return False
        return True

    def intersection(self, other: "Interval") -> "Interval":
        if self.lo > other.lo:
            lo, lo_open = self.lo, self.lo_open
        elif self.lo < other.lo:
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open or other.lo_open
        if self.hi < other.hi:
            hi, hi_open = self.hi, self.hi_open
        elif self.hi > other.hi:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open or other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def bounded_box(self, span: float = DEFAULTS.unbounded_span,
                    margin: float = DEFAULTS.sampling_margin) -> Tuple[float, float]:
        """Finite closed sub-box used for sampling, strictly inside open ends"""
        lo, hi = self.lo, self.hi
        if math.isinf(lo) and math.isinf(hi):
            lo, hi = -span, span
        elif math.isinf(lo):
            lo = hi - span
        elif math.isinf(hi):
            hi = lo + span
        width = hi - lo
        if self.lo_open:
            lo = lo + margin * width
        if self.hi_open:
            hi = hi - margin * width
        return lo, hi

    def __str__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


@dataclass(frozen=True)
class TableData:
    """Lattice of (x, y, value) samples for a user-defined mean"""
    source: str
    xs: Tuple[float, ...]
    ys: Tuple[float, ...]
    values: Tuple[Tuple[float, ...], ...]
    interpolator: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        grid = RegularGridInterpolator(
            (np.asarray(self.xs), np.asarray(self.ys)),
            np.asarray(self.values, dtype=float),
            method="linear",
            bounds_error=True,
        )
        object.__setattr__(self, "interpolator", grid)

    def interpolate(self, x: float, y: float) -> float:
        return float(self.interpolator([[x, y]])[0])


@dataclass(frozen=True)
class MeanSpec:
    """Declarative description of a bivariate mean"""
    kind: MeanKind
    params: Tuple[float, ...] = ()
    domain: Interval = field(default_factory=Interval.real_line)
    table: Optional[TableData] = None

    @property
    def name(self) -> str:
        return render_mean(self)

    def __call__(self, x: float, y: float) -> float:
        return evaluate(self, x, y)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FunctionMean:
    """A candidate mean given by a plain Python callable; never clipped"""
    func: Callable[[float, float], float]
    domain: Interval
    name: str = "function"

    def __call__(self, x: float, y: float) -> float:
        if not self.domain.contains_point(x, y):
            raise DomainError((x, y), self.domain)
        return float(self.func(x, y))

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Evaluation:
    value: float
    clipped: bool = False


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def make_mean(kind: MeanKind, params: Sequence[float] = ()) -> MeanSpec:
    """Build a catalog mean, validating parameters and choosing its domain"""
    params = tuple(float(p) for p in params)
    if kind is MeanKind.TABLE:
        raise ParameterError("table means are built with load_table_mean")
    expected = KIND_ARITY[kind]
    if len(params) != expected:
        raise ParameterError(f"{kind.value} takes {expected} parameter(s), got {len(params)}")
    if any(not math.isfinite(p) for p in params):
        raise ParameterError(f"{kind.value} parameters must be finite, got {params}")

    if kind in (MeanKind.GEOMETRIC, MeanKind.HARMONIC, MeanKind.POWER):
        domain = Interval.positive()
    elif kind is MeanKind.WEIGHTED_ARITHMETIC:
        if not 0.0 <= params[0] <= 1.0:
            raise ParameterError(f"weight must lie in [0, 1], got {params[0]}")
        domain = Interval.real_line()
    else:
        domain = Interval.real_line()
    return MeanSpec(kind, params, domain)


def arithmetic() -> MeanSpec:
    return make_mean(MeanKind.ARITHMETIC)


def geometric() -> MeanSpec:
    return make_mean(MeanKind.GEOMETRIC)


def harmonic() -> MeanSpec:
    return make_mean(MeanKind.HARMONIC)


def power(p: float) -> MeanSpec:
    return make_mean(MeanKind.POWER, (p,))


def minimum() -> MeanSpec:
    return make_mean(MeanKind.MIN)


def maximum() -> MeanSpec:
    return make_mean(MeanKind.MAX)


def proj1() -> MeanSpec:
    return make_mean(MeanKind.PROJ1)


def proj2() -> MeanSpec:
    return make_mean(MeanKind.PROJ2)


def weighted_arithmetic(w: float) -> MeanSpec:
    return make_mean(MeanKind.WEIGHTED_ARITHMETIC, (w,))


def catalog() -> Dict[str, MeanSpec]:
    """Named built-in means used by the "every catalog mean" checks"""
    means = [
        arithmetic(), geometric(), harmonic(),
        power(2), power(-2), power(0.5),
        minimum(), maximum(), proj1(), proj2(),
        weighted_arithmetic(0.25),
    ]
    return {render_mean(m): m for m in means}


def render_mean(mean: MeanSpec) -> str:
    """Render a MeanSpec as mean-expression text"""
    if mean.kind is MeanKind.TABLE:
        return f"table:{mean.table.source}"
    if not mean.params:
        return mean.kind.value
    args = ",".join(repr(p) for p in mean.params)
    return f"{mean.kind.value}({args})"


def load_table_mean(path: str) -> MeanSpec:
    """Load a user-defined mean from a CSV of x,y,value lattice nodes"""
    source = str(path)
    try:
        with open(Path(path), newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != ["x", "y", "value"]:
                raise TableDataError(f"{source}: header must be exactly x,y,value")
            nodes: Dict[Point, float] = {}
            for row_number, row in enumerate(reader, start=2):
                try:
                    x, y, v = float(row["x"]), float(row["y"]), float(row["value"])
                except (TypeError, ValueError) as e:
                    raise TableDataError(f"{source}:{row_number}: non-numeric field ({e})")
                if not all(math.isfinite(u) for u in (x, y, v)):
                    raise TableDataError(f"{source}:{row_number}: non-finite value")
                if (x, y) in nodes:
                    raise TableDataError(f"{source}:{row_number}: duplicate node ({x}, {y})")
                nodes[(x, y)] = v
    except OSError as e:
        raise TableDataError(f"cannot read table mean {source}: {e}")
    except (UnicodeDecodeError, csv.Error) as e:
        raise TableDataError(f"{source}: not a UTF-8 CSV file ({e})")

    xs = sorted({x for x, _ in nodes})
    ys = sorted({y for _, y in nodes})
    if len(xs) < 2 or len(ys) < 2:
        raise TableDataError(f"{source}: need at least 2 distinct x and y values")
    if len(nodes) != len(xs) * len(ys):
        raise TableDataError(f"{source}: nodes do not form a full lattice "
                             f"({len(nodes)} of {len(xs) * len(ys)} present)")

    values = tuple(tuple(nodes[(x, y)] for y in ys) for x in xs)
    try:
        domain = Interval.closed(xs[0], xs[-1]).intersection(Interval.closed(ys[0], ys[-1]))
    except ParameterError:
        raise TableDataError(f"{source}: x and y ranges do not overlap")

    table = TableData(source, tuple(xs), tuple(ys), values)
    logger.info(f"Loaded table mean {source}: {len(xs)}x{len(ys)} lattice on {domain}")
    return MeanSpec(MeanKind.TABLE, (), domain, table)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

# Catalog values may leave [min, max] by this many ulps of the nearer end
ROUNDING_ULPS = 4


def _arithmetic(x: float, y: float) -> float:
    s = x + y
    if math.isfinite(s):
        return s / 2.0
    return x / 2.0 + y / 2.0


def _geometric(x: float, y: float) -> float:
    p = x * y
    if sys.float_info.min <= p < math.inf:
        return math.sqrt(p)
    return math.sqrt(x) * math.sqrt(y)


def _harmonic(x: float, y: float) -> float:
    # 2 lo hi / (lo + hi) = lo * (hi / mean(lo, hi)); both factors stay in range
    lo, hi = (x, y) if x < y else (y, x)
    r = (hi / 2.0) / (lo / 2.0 + hi / 2.0)
    return lo * (2.0 * r)


def _power_mean(x: float, y: float, p: float) -> float:
    if p == 0:
        return _geometric(x, y)
    # Scale so both ratios are at most 1 and nothing overflows
    m = max(x, y) if p > 0 else min(x, y)
    s = ((x / m) ** p + (y / m) ** p) / 2.0
    return m * s ** (1.0 / p)


def _weighted(x: float, y: float, w: float) -> float:
    value = w * x + (1.0 - w) * y
    if math.isfinite(value):
        return value
    return 2.0 * (w * (x / 2.0) + (1.0 - w) * (y / 2.0))


def _raw_value(mean: MeanSpec, x: float, y: float) -> float:
    kind = mean.kind
    if kind is MeanKind.ARITHMETIC:
        return _arithmetic(x, y)
    if kind is MeanKind.GEOMETRIC:
        return _geometric(x, y)
    if kind is MeanKind.HARMONIC:
        return _harmonic(x, y)
    if kind is MeanKind.POWER:
        return _power_mean(x, y, mean.params[0])
    if kind is MeanKind.MIN:
        return min(x, y)
    if kind is MeanKind.MAX:
        return max(x, y)
    if kind is MeanKind.PROJ1:
        return x
    if kind is MeanKind.PROJ2:
        return y
    if kind is MeanKind.WEIGHTED_ARITHMETIC:
        return _weighted(x, y, mean.params[0])
    if kind is MeanKind.TABLE:
        return mean.table.interpolate(x, y)
    raise ParameterError(f"unknown mean kind {kind}")


def evaluate_detailed(mean: MeanSpec, x: float, y: float) -> Evaluation:
    """Evaluate a mean, reporting whether the raw value had to be clipped"""
    if not mean.domain.contains_point(x, y):
        raise DomainError((x, y), mean.domain)
    if x == y:
        return Evaluation(x)
    lo, hi = (x, y) if x < y else (y, x)
    raw = _raw_value(mean, x, y)
    if lo <= raw <= hi:
        return Evaluation(raw)
    if mean.kind is MeanKind.TABLE:
        logger.debug(f"{render_mean(mean)} clipped {raw!r} into [{lo!r}, {hi!r}] at ({x!r}, {y!r})")
        return Evaluation(min(max(raw, lo), hi), True)
    # Catalog formulas may only miss the range by rounding
    if not (lo - ROUNDING_ULPS * math.ulp(lo) <= raw <= hi + ROUNDING_ULPS * math.ulp(hi)):
        raise MeanEvaluationError((x, y), raw,
                                  f"{render_mean(mean)}({x!r}, {y!r}) = {raw!r} lies outside [{lo!r}, {hi!r}]")
    return Evaluation(min(max(raw, lo), hi))


def evaluate(mean: MeanSpec, x: float, y: float) -> float:
    return evaluate_detailed(mean, x, y).value


def call_mean(mean: Any, x: float, y: float) -> float:
    if isinstance(mean, MeanSpec):
        return evaluate(mean, x, y)
    return mean(x, y)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def grid_points(x_range: Tuple[float, float], y_range: Tuple[float, float],
                resolution: Tuple[int, int] = DEFAULTS.grid_resolution) -> List[Point]:
    """Row-major lattice: x varies slowest"""
    nx, ny = resolution
    if nx < 2 or ny < 2:
        raise ParameterError(f"grid resolution must be at least 2 per axis, got {resolution}")
    xs = np.linspace(x_range[0], x_range[1], nx)
    ys = np.linspace(y_range[0], y_range[1], ny)
    return [(float(x), float(y)) for x in xs for y in ys]


def random_points(x_range: Tuple[float, float], y_range: Tuple[float, float],
                  count: int, seed: int) -> List[Point]:
    rng = np.random.default_rng(seed)
    xs = rng.uniform(x_range[0], x_range[1], count)
    ys = rng.uniform(y_range[0], y_range[1], count)
    return [(float(x), float(y)) for x, y in zip(xs, ys)]


def off_diagonal(points: Iterable[Point]) -> List[Point]:
    return [(x, y) for x, y in points if x != y]


def domain_box(interval: Interval, span: float = DEFAULTS.unbounded_span,
               margin: float = DEFAULTS.sampling_margin) -> Tuple[Point, Point]:
    box = interval.bounded_box(span, margin)
    return box, box


# ---------------------------------------------------------------------------
# Verdicts and property checks
# ---------------------------------------------------------------------------

class Verdict(Enum):
    HOLDS = "holds-on-sample"
    VIOLATED = "violated"
    UNTESTABLE = "untestable-on-side"


@dataclass(frozen=True)
class PropertyVerdict:
    """Outcome of a sampled check; a violation always carries its witness"""
    verdict: Verdict
    witness: Optional[Point] = None
    sample_size: int = 0
    clipped_count: int = 0

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def violated(self) -> bool:
        return self.verdict is Verdict.VIOLATED


def _require_sample(sample: Sequence[Point], what: str) -> None:
    if not sample:
        raise EmptySampleError(f"{what} needs at least one sample point")


def _check_points(mean: Any, sample: Sequence[Point], predicate: Callable[[float, float, float], bool],
                  what: str) -> PropertyVerdict:
    _require_sample(sample, what)
    clipped = 0
    for x, y in sample:
        if isinstance(mean, MeanSpec):
            ev = evaluate_detailed(mean, x, y)
            value = ev.value
            clipped += ev.clipped
        else:
            value = mean(x, y)
        if not predicate(x, y, value):
            return PropertyVerdict(Verdict.VIOLATED, (x, y), len(sample), clipped)
    if clipped:
        logger.warning(f"{mean}: {clipped} of {len(sample)} evaluations clipped into range")
    return PropertyVerdict(Verdict.HOLDS, None, len(sample), clipped)


def check_internality(mean: Any, sample: Sequence[Point]) -> PropertyVerdict:
    """min(x,y) <= M(x,y) <= max(x,y) at every sample point"""
    return _check_points(mean, sample, lambda x, y, v: min(x, y) <= v <= max(x, y), "internality check")


def check_strict(mean: Any, sample: Sequence[Point]) -> PropertyVerdict:
    """Sharp internality away from the diagonal"""
    return _check_points(mean, off_diagonal(sample),
                         lambda x, y, v: min(x, y) < v < max(x, y), "strictness check")


def check_left_strict_global(mean: Any, sample: Sequence[Point]) -> PropertyVerdict:
    """x != y => M(x,y) < max(x,y)"""
    return _check_points(mean, off_diagonal(sample), lambda x, y, v: v < max(x, y), "left-strict check")


def check_right_strict_global(mean: Any, sample: Sequence[Point]) -> PropertyVerdict:
    """x != y => M(x,y) > min(x,y)"""
    return _check_points(mean, off_diagonal(sample), lambda x, y, v: v > min(x, y), "right-strict check")


def check_symmetry(mean: Any, sample: Sequence[Point]) -> PropertyVerdict:
    _require_sample(sample, "symmetry check")
    for x, y in sample:
        if call_mean(mean, x, y) != call_mean(mean, y, x):
            return PropertyVerdict(Verdict.VIOLATED, (x, y), len(sample))
    return PropertyVerdict(Verdict.HOLDS, None, len(sample))


# ---------------------------------------------------------------------------
# One-sided strictness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbePlan:
    """Anchors with finitely many test values strictly below and above each"""
    anchors: Tuple[float, ...]
    below: Tuple[Tuple[float, ...], ...]
    above: Tuple[Tuple[float, ...], ...]
    description: str = ""

    def pairs_below(self) -> List[Point]:
        return [(a, t) for a, ts in zip(self.anchors, self.below) for t in ts]

    def pairs_above(self) -> List[Point]:
        return [(a, t) for a, ts in zip(self.anchors, self.above) for t in ts]


def default_probe_plan(interval: Interval,
                       anchors: int = DEFAULTS.probe_anchors,
                       per_side: int = DEFAULTS.probe_values_per_side,
                       span: float = DEFAULTS.unbounded_span,
                       margin: float = DEFAULTS.sampling_margin) -> ProbePlan:
    """Equally spaced anchors, test values geometrically approaching each anchor"""
    a, b = interval.bounded_box(span, margin)
    points = [float(v) for v in np.linspace(a, b, anchors)]
    below, above = [], []
    for x0 in points:
        gap_lo, gap_hi = x0 - a, b - x0
        below.append(tuple(x0 - gap_lo * 2.0 ** -k for k in range(per_side)) if gap_lo > 0 else ())
        above.append(tuple(x0 + gap_hi * 2.0 ** -k for k in range(per_side)) if gap_hi > 0 else ())
    description = f"{anchors} anchors in [{a:g}, {b:g}], {per_side} values per side, geometric spacing"
    return ProbePlan(tuple(points), tuple(below), tuple(above), description)


@dataclass(frozen=True)
class StrictnessReport:
    left_var1: PropertyVerdict
    right_var1: PropertyVerdict
    left_var2: PropertyVerdict
    right_var2: PropertyVerdict
    sample: str

    @staticmethod
    def _combine(a: PropertyVerdict, b: PropertyVerdict) -> Verdict:
        if a.violated or b.violated:
            return Verdict.VIOLATED
        if a.holds and b.holds:
            return Verdict.HOLDS
        return Verdict.UNTESTABLE

    @property
    def left_strict(self) -> Verdict:
        """Left-strict in both variables"""
        return self._combine(self.left_var1, self.left_var2)

    @property
    def right_strict(self) -> Verdict:
        """Right-strict in both variables"""
        return self._combine(self.right_var1, self.right_var2)

    def verdicts(self) -> Dict[str, PropertyVerdict]:
        return {
            "left_var1": self.left_var1,
            "right_var1": self.right_var1,
            "left_var2": self.left_var2,
            "right_var2": self.right_var2,
        }

    @property
    def has_untestable(self) -> bool:
        return any(v.verdict is Verdict.UNTESTABLE for v in self.verdicts().values())


def _one_sided(mean: Any, pairs: List[Point], point_of: Callable[[float, float], Point],
               implication: Callable[[float, float], bool]) -> PropertyVerdict:
    if not pairs:
        return PropertyVerdict(Verdict.UNTESTABLE)
    for anchor, t in pairs:
        px, py = point_of(anchor, t)
        if not implication(anchor, call_mean(mean, px, py)):
            return PropertyVerdict(Verdict.VIOLATED, (px, py), len(pairs))
    return PropertyVerdict(Verdict.HOLDS, None, len(pairs))


def classify_strictness(mean: Any, probe: Optional[ProbePlan] = None) -> StrictnessReport:
    """Check the four one-sided strictness implications on a probe plan"""
    if probe is None:
        probe = default_probe_plan(mean.domain)
    below, above = probe.pairs_below(), probe.pairs_above()
    for anchor, t in below + above:
        if not mean.domain.contains_point(anchor, t):
            raise DomainError((anchor, t), mean.domain, f"probe pair ({anchor}, {t}) outside {mean.domain}")

    first = lambda a, t: (a, t)
    second = lambda a, t: (t, a)
    report = StrictnessReport(
        left_var1=_one_sided(mean, below, first, lambda a, v: v < a),
        right_var1=_one_sided(mean, above, first, lambda a, v: a < v),
        left_var2=_one_sided(mean, below, second, lambda a, v: v < a),
        right_var2=_one_sided(mean, above, second, lambda a, v: a < v),
        sample=probe.description,
    )
    logger.info(f"Strictness of {mean}: "
                + ", ".join(f"{k}={v.verdict.value}" for k, v in report.verdicts().items()))
    return report
