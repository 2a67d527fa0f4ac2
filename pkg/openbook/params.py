import math
from dataclasses import dataclass, field

from .exceptions import ConfigurationException

MIN_N = 2
MAX_N = 4

DEFAULT_N = (2, 3, 4)
DEFAULT_K = (1, 2, 3, 5, 8)
DEFAULT_SAMPLES = 200
DEFAULT_SEED = 7
SEED_MASK = (1 << 64) - 1

FORMATS = ("json", "text", "csv")


@dataclass(frozen=True)
class BrieskornParams:
    """Dimension n (ambient C^{n+1}) and exponent k of z0 in the Brieskorn polynomial."""

    n: int
    k: int

    def __post_init__(self):
        if not isinstance(self.n, int) or not MIN_N <= self.n <= MAX_N:
            raise ConfigurationException(
                f"n must be an integer in [{MIN_N}, {MAX_N}], got {self.n!r}"
            )
        if not isinstance(self.k, int) or self.k < 1:
            raise ConfigurationException(f"k must be a positive integer, got {self.k!r}")

    @property
    def ambient_dim(self) -> int:
        return 2 * (self.n + 1)

    @property
    def manifold_dim(self) -> int:
        return 2 * self.n - 1

    @property
    def torus_dim(self) -> int:
        return 2 * self.n + 1

    def __repr__(self):
        return f"<BrieskornParams n={self.n} k={self.k}>"


def parse_tolerance(entry: str) -> tuple[str, float]:
    """
    Parse a `--tol` entry of the form `<check>=<real>`.

    Returns:
        The check name and the tolerance.

    Raises:
        ConfigurationException: If the entry is malformed or the tolerance
            is not a positive finite number.
    """
    name, sep, raw = entry.partition("=")
    name = name.strip()
    if not sep or not name:
        raise ConfigurationException(f"tolerance must look like <check>=<real>: {entry!r}")
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationException(f"tolerance for {name!r} is not a number: {raw!r}") from None
    if not math.isfinite(value) or value <= 0:
        raise ConfigurationException(f"tolerance for {name!r} must be positive: {raw!r}")
    return name, value


@dataclass
class RunConfig:
    """Everything one CLI invocation needs; validated before any work starts."""

    command: str = "verify"
    n_list: tuple[int, ...] = DEFAULT_N
    k_list: tuple[int, ...] = DEFAULT_K
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    tol_overrides: dict[str, float] = field(default_factory=dict)
    output: str | None = None
    format: str = "json"
    checks: tuple[str, ...] = ("all",)
    threads: int | None = None
    count: int = 10
    kind: str = "all"

    def validate(self, known_checks=None) -> "RunConfig":
        errors = {}
        bad_n = [n for n in self.n_list if not MIN_N <= n <= MAX_N]
        if bad_n or not self.n_list:
            errors["n"] = f"n must lie in [{MIN_N}, {MAX_N}], got {list(self.n_list)}"
        if not self.k_list or any(k < 1 for k in self.k_list):
            errors["k"] = f"k must be >= 1, got {list(self.k_list)}"
        if self.samples < 1:
            errors["samples"] = f"samples must be >= 1, got {self.samples}"
        if self.count < 1:
            errors["count"] = f"count must be >= 1, got {self.count}"
        if self.format not in FORMATS:
            errors["format"] = f"format must be one of {FORMATS}, got {self.format!r}"
        if self.threads is not None and self.threads < 1:
            errors["threads"] = f"threads must be >= 1, got {self.threads}"
        if known_checks is not None:
            unknown = [
                name
                for name in (*self.checks, *self.tol_overrides)
                if name != "all" and not _matches_any(name, known_checks)
            ]
            if unknown:
                errors["check"] = f"unknown checks: {', '.join(sorted(unknown))}"
        if errors:
            raise ConfigurationException("; ".join(errors.values()), errors)
        self.seed &= SEED_MASK
        return self

    def cells(self) -> list[BrieskornParams]:
        return [BrieskornParams(n, k) for n in self.n_list for k in self.k_list]

    def selects(self, check_name: str) -> bool:
        if "all" in self.checks:
            return True
        return any(_matches(pattern, check_name) for pattern in self.checks)


def _matches(pattern: str, name: str) -> bool:
    # "cmap" selects every "cmap.*" check.
    return name == pattern or name.startswith(pattern + ".")


def _matches_any(pattern: str, names) -> bool:
    return any(_matches(pattern, name) for name in names)


def override_for(overrides: dict[str, float], check_name: str) -> float | None:
    """
    The override that applies to `check_name`.

    An exact name wins over a group; among groups the longest prefix wins,
    so `cmap=1e-5` covers every `cmap.*` check.
    """
    if check_name in overrides:
        return overrides[check_name]
    groups = [pattern for pattern in overrides if _matches(pattern, check_name)]
    if not groups:
        return None
    return overrides[max(groups, key=len)]
