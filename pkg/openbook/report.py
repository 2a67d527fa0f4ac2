"""
Check results and reports.

A CheckResult summarizes one named check over its samples; a CheckReport
collects the results for one (n, k) cell. Merging is associative: sample
counts add, residuals take the worst value and passes are conjoined, so
partial results may be combined in any grouping.
"""

from collections.abc import Callable, Iterable
from dataclasses import dataclass, field

import numpy as np

from .exceptions import OpenBookException
from .logger import get_logger
from .utils import json_dumps

logger = get_logger(__name__)

MAX_BOUND = "max"
MIN_BOUND = "min"
WORST_MAX = float(np.finfo(np.float64).max)


@dataclass(frozen=True)
class CheckResult:
    """
    Outcome of one check.

    Attributes:
        name: Dotted check name, e.g. "cmap.pullback".
        samples: Number of evaluated samples.
        max_abs_err: For "max" checks the largest residual; for "min"
            checks the smallest observed value.
        tolerance: Upper bound ("max") or lower bound ("min").
        passed: Whether the bound held at every sample.
        bound: "max" or "min".
        error: Exception code when the check could not be evaluated.
    """

    name: str
    samples: int
    max_abs_err: float
    tolerance: float
    passed: bool
    bound: str = MAX_BOUND
    error: str | None = None

    @classmethod
    def from_values(
        cls, name: str, values: Iterable[float], tolerance: float, bound: str = MAX_BOUND
    ) -> "CheckResult":
        values = np.asarray(list(values), dtype=np.float64).reshape(-1)
        if values.size == 0:
            return cls.failure(name, tolerance, bound, "no_samples")
        if not np.all(np.isfinite(values)):
            logger.warning(f"{name}: non-finite values among {values.size} samples")
            return cls(name, int(values.size), _worst(bound), tolerance, False, bound, "nan")
        if bound == MIN_BOUND:
            observed = float(values.min())
            passed = observed > tolerance
        else:
            observed = float(np.abs(values).max())
            passed = observed <= tolerance
        return cls(name, int(values.size), observed, tolerance, passed, bound)

    @classmethod
    def failure(
        cls, name: str, tolerance: float, bound: str = MAX_BOUND, error: str = "error"
    ) -> "CheckResult":
        return cls(name, 0, _worst(bound), tolerance, False, bound, error)

    def merge(self, other: "CheckResult") -> "CheckResult":
        """Combine two partial results of the same check."""
        if other.name != self.name:
            raise ValueError(f"cannot merge {self.name!r} with {other.name!r}")
        pick = min if self.bound == MIN_BOUND else max
        return CheckResult(
            self.name,
            self.samples + other.samples,
            pick(self.max_abs_err, other.max_abs_err),
            min(self.tolerance, other.tolerance)
            if self.bound == MAX_BOUND
            else max(self.tolerance, other.tolerance),
            self.passed and other.passed,
            self.bound,
            self.error or other.error,
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "max_abs_err": self.max_abs_err,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


def _worst(bound: str) -> float:
    return 0.0 if bound == MIN_BOUND else WORST_MAX


def run_check(
    name: str,
    tolerance: float,
    measure: Callable[[], Iterable[float]],
    bound: str = MAX_BOUND,
) -> CheckResult:
    """
    Evaluate `measure` and summarize it; failures become failed results.

    Library exceptions are recorded under their code; anything else is
    logged with a traceback and recorded as "error".
    """
    try:
        result = CheckResult.from_values(name, measure(), tolerance, bound)
    except OpenBookException as exc:
        logger.warning(f"{name}: {exc.message}")
        return CheckResult.failure(name, tolerance, bound, exc.code)
    except Exception:
        logger.exception(f"{name}: unexpected error")
        return CheckResult.failure(name, tolerance, bound)
    if not result.passed:
        relation = ">" if bound == MIN_BOUND else "<="
        logger.warning(
            f"{name} failed: {result.max_abs_err:.3e} not {relation} {tolerance:.1e}"
        )
    return result


@dataclass
class CheckReport:
    """All check results for one (n, k) cell."""

    n: int
    k: int
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(check.passed for check in self.checks)

    def add(self, result: CheckResult) -> "CheckReport":
        self.checks.append(result)
        return self

    def get(self, name: str) -> CheckResult | None:
        for check in self.checks:
            if check.name == name:
                return check
        return None

    def failing(self) -> list[str]:
        return [check.name for check in self.checks if not check.passed]

    def merge(self, other: "CheckReport") -> "CheckReport":
        """Merge results by name; names keep their first-seen order."""
        if (self.n, self.k, self.seed) != (other.n, other.k, other.seed):
            raise ValueError("cannot merge reports of different cells")
        merged: dict[str, CheckResult] = {}
        for check in (*self.checks, *other.checks):
            merged[check.name] = merged[check.name].merge(check) if check.name in merged else check
        return CheckReport(self.n, self.k, self.seed, list(merged.values()))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "seed": self.seed,
            "checks": [check.to_dict() for check in self.checks],
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json_dumps(self.to_dict())

    def summary(self) -> str:
        passed = sum(check.passed for check in self.checks)
        return f"n={self.n} k={self.k}: {len(self.checks)} checks, {passed} passed"


def reports_document(reports: list[CheckReport]) -> dict:
    """One report as is; several wrapped as {"reports": [...], "pass": ...}."""
    if len(reports) == 1:
        return reports[0].to_dict()
    return {
        "reports": [report.to_dict() for report in reports],
        "pass": all(report.passed for report in reports),
    }


def render_json(reports: list[CheckReport]) -> str:
    if len(reports) == 1:
        return reports[0].to_json() + "\n"
    return json_dumps(reports_document(reports)) + "\n"


def render_csv(reports: list[CheckReport]) -> str:
    lines = ["n,k,seed,name,samples,max_abs_err,tolerance,pass"]
    for report in reports:
        for check in report.checks:
            lines.append(
                f"{report.n},{report.k},{report.seed},{check.name},{check.samples},"
                f"{check.max_abs_err:.17g},{check.tolerance:.17g},{str(check.passed).lower()}"
            )
    return "\n".join(lines) + "\n"
