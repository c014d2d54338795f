"""Parametric exponential-Levy models under the zero-rate martingale measure.

Every model is a frozen dataclass. The pieces the rest of the package uses:

* ``jump_exponent(u)`` - the jump part of the characteristic exponent, in
  finite-variation form ``int (e^{iux} - 1) nu(dx)`` when the jumps have finite
  variation and in compensated form ``int (e^{iux} - 1 - iux) nu(dx)``
  otherwise.  The full exponent is
  ``psi(u) = i u b - sigma^2 u^2 / 2 + jump_exponent(u)`` with ``b`` fixed by
  ``psi(-i) = 0``.
* ``density(x)`` - the Levy density, ``x != 0``.
* closed-form jump cumulants, tail decay rates and structural metadata.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, ClassVar

import numpy as np
from scipy import special

from . import gausskronrod
from .errors import ConfigError, DomainError

SUPPORT_NONE = "none"
SUPPORT_TWO_SIDED = "two-sided"
SUPPORT_POSITIVE = "positive-only"
SUPPORT_NEGATIVE = "negative-only"

_STRIP_SLACK = 1e-12


def _finite(name, value, out):
    if not math.isfinite(value):
        out.append(f"{name} must be a finite number, got {value!r}")
        return False
    return True


@dataclass(frozen=True)
class LevyModel:
    """Common behaviour; concrete models override the jump-specific hooks."""

    kind: ClassVar[str] = ""

    # -- hooks -------------------------------------------------------------
    def _range_violations(self) -> list[str]:
        raise NotImplementedError

    def density(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def jump_exponent(self, u):
        return np.zeros_like(np.asarray(u, dtype=complex))

    def jump_mean(self) -> float:
        """Mean of the jump part in the representation of ``jump_exponent``."""
        return 0.0

    def jump_cumulants(self) -> tuple[float, float]:
        """Second and fourth cumulant of the jump part per unit time."""
        return 0.0, 0.0

    def big_jump_mean(self) -> float:
        """``int_{|x|>1} x nu(dx)``."""
        return 0.0

    @property
    def gaussian_sigma(self) -> float:
        return 0.0

    @property
    def total_intensity(self) -> float | None:
        """``nu(R)`` for finite activity, ``None`` for infinite activity."""
        return 0.0

    @property
    def jumps_finite_variation(self) -> bool:
        return True

    @property
    def support(self) -> str:
        return SUPPORT_NONE

    def tail_rates(self) -> tuple[float, float]:
        """Exponential decay rates of nu on the negative and positive half-lines.

        ``inf`` means there are no jumps on that side.
        """
        return math.inf, math.inf

    def jump_range(self) -> tuple[float, float] | None:
        """Bulk of a single jump for models with Gaussian-tailed jumps."""
        return None

    # -- derived -----------------------------------------------------------
    def violations(self) -> list[str]:
        out: list[str] = []
        for f in fields(self):
            _finite(f.name, getattr(self, f.name), out)
        if out:
            return out
        return self._range_violations()

    def params(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class BlackScholes(LevyModel):
    sigma: float

    kind: ClassVar[str] = "black_scholes"

    def _range_violations(self):
        return [] if self.sigma >= 0 else ["sigma < 0: Gaussian coefficient must be nonnegative"]

    @property
    def gaussian_sigma(self):
        return self.sigma


@dataclass(frozen=True)
class Merton(LevyModel):
    sigma: float
    lam: float
    mu_j: float
    delta_j: float

    kind: ClassVar[str] = "merton"

    def _range_violations(self):
        out = []
        if self.sigma < 0:
            out.append("sigma < 0: Gaussian coefficient must be nonnegative")
        if self.lam <= 0:
            out.append("lam <= 0: jump intensity must be positive")
        if self.delta_j <= 0:
            out.append("delta_j <= 0: jump standard deviation must be positive")
        return out

    def density(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.mu_j) / self.delta_j
        return self.lam * np.exp(-0.5 * z * z) / (self.delta_j * math.sqrt(2.0 * math.pi))

    def jump_exponent(self, u):
        u = np.asarray(u, dtype=complex)
        return self.lam * np.expm1(1j * u * self.mu_j - 0.5 * (self.delta_j * u) ** 2)

    def jump_mean(self):
        return self.lam * self.mu_j

    def jump_cumulants(self):
        m, d2 = self.mu_j, self.delta_j ** 2
        return (self.lam * (m * m + d2),
                self.lam * (m ** 4 + 6.0 * m * m * d2 + 3.0 * d2 * d2))

    def big_jump_mean(self):
        m, d = self.mu_j, self.delta_j
        hi, lo = (1.0 - m) / d, (-1.0 - m) / d
        upper = m * special.ndtr(-hi) + d * math.exp(-0.5 * hi * hi) / math.sqrt(2 * math.pi)
        lower = m * special.ndtr(lo) - d * math.exp(-0.5 * lo * lo) / math.sqrt(2 * math.pi)
        return self.lam * (upper + lower)

    @property
    def gaussian_sigma(self):
        return self.sigma

    @property
    def total_intensity(self):
        return self.lam

    @property
    def support(self):
        return SUPPORT_TWO_SIDED

    def jump_range(self):
        return (self.mu_j - 12.0 * self.delta_j,
                self.mu_j + self.delta_j ** 2 + 12.0 * self.delta_j)


@dataclass(frozen=True)
class Kou(LevyModel):
    sigma: float
    lam: float
    p: float
    eta1: float
    eta2: float

    kind: ClassVar[str] = "kou"

    def _range_violations(self):
        out = []
        if self.sigma < 0:
            out.append("sigma < 0: Gaussian coefficient must be nonnegative")
        if self.lam <= 0:
            out.append("lam <= 0: jump intensity must be positive")
        if not 0.0 <= self.p <= 1.0:
            out.append("p outside [0, 1]: up-jump probability")
        if self.eta1 <= 1:
            out.append("eta1 <= 1: e^y not nu-integrable on the upper tail")
        if self.eta2 <= 0:
            out.append("eta2 <= 0: down-jump decay must be positive")
        return out

    def density(self, x):
        x = np.asarray(x, dtype=float)
        up = self.p * self.eta1 * np.exp(-self.eta1 * np.abs(x))
        down = (1.0 - self.p) * self.eta2 * np.exp(-self.eta2 * np.abs(x))
        return self.lam * np.where(x > 0, up, down)

    def jump_exponent(self, u):
        u = np.asarray(u, dtype=complex)
        p, e1, e2 = self.p, self.eta1, self.eta2
        # p e1/(e1 - iu) + (1-p) e2/(e2 + iu) - 1, written without cancellation
        return self.lam * 1j * u * (p / (e1 - 1j * u) - (1.0 - p) / (e2 + 1j * u))

    def jump_mean(self):
        return self.lam * (self.p / self.eta1 - (1.0 - self.p) / self.eta2)

    def jump_cumulants(self):
        p, e1, e2 = self.p, self.eta1, self.eta2
        return (2.0 * self.lam * (p / e1 ** 2 + (1.0 - p) / e2 ** 2),
                24.0 * self.lam * (p / e1 ** 4 + (1.0 - p) / e2 ** 4))

    def big_jump_mean(self):
        p, e1, e2 = self.p, self.eta1, self.eta2
        return self.lam * (p * (1.0 + 1.0 / e1) * math.exp(-e1)
                           - (1.0 - p) * (1.0 + 1.0 / e2) * math.exp(-e2))

    @property
    def gaussian_sigma(self):
        return self.sigma

    @property
    def total_intensity(self):
        return self.lam

    @property
    def support(self):
        if self.p == 1.0:
            return SUPPORT_POSITIVE
        if self.p == 0.0:
            return SUPPORT_NEGATIVE
        return SUPPORT_TWO_SIDED

    def tail_rates(self):
        down = math.inf if self.p == 1.0 else self.eta2
        up = math.inf if self.p == 0.0 else self.eta1
        return down, up


@dataclass(frozen=True)
class VarianceGamma(LevyModel):
    """Brownian motion with drift ``theta_vg`` and volatility ``sigma_vg`` run on a
    gamma clock of unit mean rate and variance rate ``kappa``."""

    theta_vg: float
    sigma_vg: float
    kappa: float

    kind: ClassVar[str] = "variance_gamma"

    def _range_violations(self):
        out = []
        if self.sigma_vg <= 0:
            out.append("sigma_vg <= 0: must be positive")
        if self.kappa <= 0:
            out.append("kappa <= 0: gamma-clock variance must be positive")
        if not out and self.kappa * (self.theta_vg + 0.5 * self.sigma_vg ** 2) >= 1:
            out.append("kappa*(theta_vg + sigma_vg^2/2) >= 1: e^y not nu-integrable on the upper tail")
        return out

    def _ab(self):
        s2 = self.sigma_vg ** 2
        a = self.theta_vg / s2
        b = math.sqrt(self.theta_vg ** 2 + 2.0 * s2 / self.kappa) / s2
        return a, b

    def density(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self._ab()
        ax = np.abs(x)
        return np.exp(a * x - b * ax) / (self.kappa * ax)

    def jump_exponent(self, u):
        u = np.asarray(u, dtype=complex)
        th, s2, k = self.theta_vg, self.sigma_vg ** 2, self.kappa
        return -np.log1p(-1j * u * th * k + 0.5 * s2 * k * u * u) / k

    def jump_mean(self):
        return self.theta_vg

    def jump_cumulants(self):
        th, s2, k = self.theta_vg, self.sigma_vg ** 2, self.kappa
        return (s2 + th * th * k,
                3.0 * (s2 * s2 * k + 2.0 * th ** 4 * k ** 3 + 4.0 * s2 * th * th * k * k))

    def big_jump_mean(self):
        g, m = self.tail_rates()
        return (math.exp(-m) / m - math.exp(-g) / g) / self.kappa

    @property
    def total_intensity(self):
        return None

    @property
    def support(self):
        return SUPPORT_TWO_SIDED

    def tail_rates(self):
        a, b = self._ab()
        return b + a, b - a


@dataclass(frozen=True)
class NIG(LevyModel):
    """Normal inverse Gaussian with tail ``alpha``, skew ``beta`` and scale ``delta``."""

    alpha: float
    beta: float
    delta: float

    kind: ClassVar[str] = "nig"

    def _range_violations(self):
        out = []
        if self.alpha <= 0:
            out.append("alpha <= 0: must be positive")
        if self.delta <= 0:
            out.append("delta <= 0: must be positive")
        if abs(self.beta) >= self.alpha:
            out.append("|beta| >= alpha: Levy measure not defined")
        if self.beta + 1.0 >= self.alpha:
            out.append("beta + 1 >= alpha: e^y not nu-integrable on the upper tail")
        return out

    def _gbar(self):
        return math.sqrt(self.alpha ** 2 - self.beta ** 2)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        a = self.alpha
        # K1(z) = k1e(z) e^{-z}
        return (a * self.delta / math.pi) * np.exp(self.beta * x - a * ax) * special.k1e(a * ax) / ax

    def jump_exponent(self, u):
        u = np.asarray(u, dtype=complex)
        a, b, d = self.alpha, self.beta, self.delta
        gb = self._gbar()
        w = b + 1j * u
        root = np.sqrt(a * a - w * w)
        # gbar - root == (w^2 - b^2) / (gbar + root), avoids cancellation near u = 0
        return d * ((w * w - b * b) / (gb + root) - 1j * u * b / gb)

    def jump_cumulants(self):
        a, b, d = self.alpha, self.beta, self.delta
        gb = self._gbar()
        return d * a * a / gb ** 3, 3.0 * d * a * a * (a * a + 4.0 * b * b) / gb ** 7

    def big_jump_mean(self):
        up, _ = gausskronrod.integrate(lambda x: x * self.density(x), 1.0, math.inf,
                                       abs_tol=1e-15, rel_tol=1e-12)
        down, _ = gausskronrod.integrate(lambda x: x * self.density(x), -math.inf, -1.0,
                                         abs_tol=1e-15, rel_tol=1e-12)
        return up + down

    @property
    def total_intensity(self):
        return None

    @property
    def jumps_finite_variation(self):
        return False

    @property
    def support(self):
        return SUPPORT_TWO_SIDED

    def tail_rates(self):
        return self.alpha + self.beta, self.alpha - self.beta


@dataclass(frozen=True)
class CGMY(LevyModel):
    C: float
    G: float
    M: float
    Y: float

    kind: ClassVar[str] = "cgmy"

    def _range_violations(self):
        out = []
        if self.C <= 0:
            out.append("C <= 0: must be positive")
        if self.G <= 0:
            out.append("G <= 0: must be positive")
        if self.M <= 1:
            out.append("M <= 1: e^y not nu-integrable on the upper tail")
        if not 0.0 < self.Y < 2.0:
            out.append("Y outside (0, 2)")
        return out

    def density(self, x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        rate = np.where(x > 0, self.M, self.G)
        return self.C * np.exp(-rate * ax) / ax ** (1.0 + self.Y)

    def jump_exponent(self, u):
        u = np.asarray(u, dtype=complex)
        C, G, M, Y = self.C, self.G, self.M, self.Y
        if Y == 1.0:
            mu, gu = M - 1j * u, G + 1j * u
            return C * (mu * np.log(mu / M) + gu * np.log(gu / G))
        core = (M - 1j * u) ** Y - M ** Y + (G + 1j * u) ** Y - G ** Y
        if Y > 1.0:
            core = core + 1j * u * Y * (M ** (Y - 1.0) - G ** (Y - 1.0))
        return C * special.gamma(-Y) * core

    def jump_mean(self):
        if self.Y >= 1.0:
            return 0.0
        C, G, M, Y = self.C, self.G, self.M, self.Y
        return C * special.gamma(1.0 - Y) * (M ** (Y - 1.0) - G ** (Y - 1.0))

    def _cumulant(self, k):
        C, G, M, Y = self.C, self.G, self.M, self.Y
        return C * special.gamma(k - Y) * (M ** (Y - k) + (-1) ** k * G ** (Y - k))

    def jump_cumulants(self):
        return self._cumulant(2), self._cumulant(4)

    def big_jump_mean(self):
        up, _ = gausskronrod.integrate(lambda x: x * self.density(x), 1.0, math.inf,
                                       abs_tol=1e-15, rel_tol=1e-12)
        down, _ = gausskronrod.integrate(lambda x: x * self.density(x), -math.inf, -1.0,
                                         abs_tol=1e-15, rel_tol=1e-12)
        return up + down

    @property
    def total_intensity(self):
        return None

    @property
    def jumps_finite_variation(self):
        return self.Y < 1.0

    @property
    def support(self):
        return SUPPORT_TWO_SIDED

    def tail_rates(self):
        return self.G, self.M


MODEL_TYPES: dict[str, type[LevyModel]] = {
    cls.kind: cls for cls in (BlackScholes, Merton, Kou, VarianceGamma, NIG, CGMY)
}


# ---------------------------------------------------------------------------
# module-level operations


def validate(model: LevyModel) -> list[str]:
    """Return the list of violated conditions; an empty list means valid."""
    out = model.violations()
    if out:
        return out
    try:
        mass = levy_measure_mass(model)
    except Exception as exc:  # noqa: BLE001 - any failure is a violation here
        return [f"int (1 ^ y^2) nu(dy) could not be evaluated: {exc}"]
    if not math.isfinite(mass):
        out.append("int (1 ^ y^2) nu(dy) is not finite")
    return out


def ensure_valid(model: LevyModel) -> None:
    problems = model.violations()
    if problems:
        raise DomainError(f"invalid {model.kind} model: " + "; ".join(problems))


def levy_measure_mass(model: LevyModel) -> float:
    """``int (1 ^ y^2) nu(dy)`` by quadrature on [-50, 50] plus exponential tail bounds."""
    if model.support == SUPPORT_NONE:
        return 0.0

    def f(y):
        return np.minimum(1.0, y * y) * model.density(y)

    total = 0.0
    for lo, hi in ((-50.0, -1.0), (-1.0, 0.0), (0.0, 1.0), (1.0, 50.0)):
        v, _ = gausskronrod.integrate(f, lo, hi, abs_tol=1e-12, rel_tol=1e-10,
                                      max_subdivisions=4000)
        total += v
    return total


def levy_density(model: LevyModel, x):
    """Levy density at ``x``; ``x = 0`` is outside the domain."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr == 0.0):
        raise DomainError("the Levy density is not defined at x = 0")
    out = model.density(arr)
    return float(out) if np.ndim(out) == 0 else out


def core_drift(model: LevyModel) -> float:
    """Drift ``b`` multiplying ``i u`` when the jump part is written as ``jump_exponent``."""
    return -0.5 * model.gaussian_sigma ** 2 - float(np.real(model.jump_exponent(-1j)))


def mean_rate(model: LevyModel) -> float:
    """First cumulant of ``X_1``."""
    return core_drift(model) + model.jump_mean()


def cumulants(model: LevyModel) -> tuple[float, float, float]:
    """``(c1, c2, c4)`` of ``X_1``."""
    c2j, c4j = model.jump_cumulants()
    return mean_rate(model), model.gaussian_sigma ** 2 + c2j, c4j


def martingale_drift(model: LevyModel) -> float:
    """Triplet drift for the truncation function ``1_{|y| <= 1}`` making ``e^X`` a martingale."""
    ensure_valid(model)
    return mean_rate(model) - model.big_jump_mean()


def support_drift(model: LevyModel) -> float | None:
    """Drift of the finite-variation representation, ``None`` without finite variation.

    For a finite-variation process, ``X_t - t * support_drift`` is a pure
    jump process, so with one-sided jumps ``X_t`` stays on one side of
    ``t * support_drift``.
    """
    if model.gaussian_sigma > 0 or not model.jumps_finite_variation:
        return None
    return core_drift(model)


def char_exponent(model: LevyModel, u):
    """``psi(u)`` with ``E[exp(i u X_t)] = exp(t psi(u))`` on the strip ``-1 <= Im u <= 0``."""
    ensure_valid(model)
    z = np.asarray(u, dtype=complex)
    im = z.imag
    if np.any(im > _STRIP_SLACK) or np.any(im < -1.0 - _STRIP_SLACK):
        raise DomainError("char_exponent is only defined for -1 <= Im(u) <= 0")
    s2 = model.gaussian_sigma ** 2
    psi = 1j * z * core_drift(model) - 0.5 * s2 * z * z + model.jump_exponent(z)
    psi = np.where(z == 0, 0.0 + 0.0j, psi)
    return complex(psi) if np.ndim(psi) == 0 else psi


@dataclass(frozen=True)
class CharacteristicQuery:
    """A complex argument for the characteristic exponent, checked against the strip."""

    u: complex

    def __post_init__(self):
        im = complex(self.u).imag
        if im > _STRIP_SLACK or im < -1.0 - _STRIP_SLACK:
            raise DomainError("query outside the strip -1 <= Im(u) <= 0")

    def evaluate(self, model: LevyModel) -> complex:
        return char_exponent(model, self.u)


@dataclass(frozen=True)
class LevyTriplet:
    gamma: float
    sigma: float
    density: Callable
    activity: str
    variation: str
    support: str
    total_intensity: float | None


def triplet(model: LevyModel) -> LevyTriplet:
    ensure_valid(model)
    lam = model.total_intensity
    finite_var = model.gaussian_sigma == 0 and model.jumps_finite_variation
    return LevyTriplet(
        gamma=martingale_drift(model),
        sigma=model.gaussian_sigma,
        density=model.density,
        activity="finite" if lam is not None else "infinite",
        variation="finite" if finite_var else "infinite",
        support=model.support,
        total_intensity=lam,
    )


def is_trivial(model: LevyModel) -> bool:
    """True for the triplet (0, 0, 0): a constant stock."""
    return model.support == SUPPORT_NONE and model.gaussian_sigma == 0


# ---------------------------------------------------------------------------
# configuration


def model_from_dict(doc: dict) -> LevyModel:
    """Build a model from ``{"type": <kind>, <field>: <number>, ...}``."""
    if not isinstance(doc, dict):
        raise ConfigError("model: expected a mapping")
    if "type" not in doc:
        raise ConfigError("model.type: missing (one of " + ", ".join(MODEL_TYPES) + ")")
    kind = doc["type"]
    cls = MODEL_TYPES.get(str(kind).lower())
    if cls is None:
        raise ConfigError(f"model.type: unknown model {kind!r}")
    names = [f.name for f in fields(cls)]
    for key in doc:
        if key != "type" and key not in names:
            raise ConfigError(f"model.{key}: unknown key for {cls.kind}")
    values = {}
    for name in names:
        if name not in doc:
            raise ConfigError(f"model.{name}: missing")
        raw = doc[name]
        if isinstance(raw, bool):
            raise ConfigError(f"model.{name}: expected a decimal number, got {raw!r}")
        try:
            values[name] = float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"model.{name}: expected a decimal number, got {raw!r}") from None
    model = cls(**values)
    problems = model.violations()
    if problems:
        raise ConfigError("model: " + "; ".join(problems))
    return model


def model_to_dict(model: LevyModel) -> dict:
    return {"type": model.kind, **model.params()}


def load_document(path) -> dict:
    import yaml

    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not a valid YAML/JSON document ({exc})") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return doc


def load_model(path) -> LevyModel:
    """Read one model document (YAML or JSON); a ``model:`` wrapper is accepted."""
    doc = load_document(path)
    if "model" in doc and isinstance(doc["model"], dict):
        doc = doc["model"]
    return model_from_dict(doc)
