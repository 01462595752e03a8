"""Battery model for an energy-harvesting transmitter.

The stored energy is discretised into unit quanta and evolves as a
birth-death chain: harvested quanta arrive at rate mu0, transmission
drains quanta at rate nu0 while the device is ON.  The device switches
OFF when the battery empties and back ON once it has collected enough
quanta for a full preamble cycle (one quantum per repetition).  The
fraction of time spent ON is the energy availability.

Two depletion regimes bound the truth: every attempt failing (preamble
energy only, the faster drain per stored quantum) and every attempt
succeeding (preamble plus data grant energy per quantum).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .errors import ConfigError

# NPRACH repetition values admitted by the standard.
STANDARD_REPETITIONS = (1, 2, 4, 8, 16, 32, 64, 128)

# Below this |mu0/nu0 - 1| the closed form loses too many digits and the
# hitting times come from the banded linear solve instead.
RATE_RATIO_SINGULAR_BAND = 1e-6


class BoundMode(enum.Enum):
    """Which depletion regime the chain models."""

    FAILURE = "failure"
    SUCCESS = "success"


@dataclass(frozen=True)
class StrategySpec:
    """Threshold toggle policy: OFF when the level falls to off_level,
    ON again once it climbs back to on_level."""

    off_level: int
    on_level: int


@dataclass(frozen=True)
class EnergyConfig:
    """Parameters of the battery chain.

    Energies are joules, rates are events per second.  m0 is the battery
    capacity in quanta, n_t the repetition value (= ON threshold in quanta).
    Defaults are the reference operating point: 20 mW transmit power, 6 ms
    preamble repetitions, calibrated data-phase energy per repetition.
    """

    mu0: float = 0.05
    a_a: float = 0.001
    p: float = 0.02
    e0_ra: float = 1.2e-4
    e0_da: float = 2.48e-4
    m0: int = 161
    n_t: int = 1
    bound_mode: BoundMode = BoundMode.FAILURE
    enforce_standard_repetitions: bool = True

    def __post_init__(self):
        if not (self.mu0 > 0.0):
            raise ConfigError("mu0 must be positive")
        if not (0.0 < self.a_a <= 1.0):
            raise ConfigError("a_a must lie in (0, 1]")
        if not (self.p > 0.0):
            raise ConfigError("p must be positive")
        if not (self.e0_ra > 0.0):
            raise ConfigError("e0_ra must be positive")
        if self.e0_da < 0.0:
            raise ConfigError("e0_da must be non-negative")
        if int(self.m0) != self.m0 or self.m0 < 1:
            raise ConfigError("m0 must be a positive integer")
        if int(self.n_t) != self.n_t or not (1 <= self.n_t <= self.m0):
            raise ConfigError("n_t must be an integer in [1, m0]")
        if self.enforce_standard_repetitions and self.n_t not in STANDARD_REPETITIONS:
            raise ConfigError(
                f"n_t={self.n_t} is not a standard repetition value {STANDARD_REPETITIONS}")
        if not isinstance(self.bound_mode, BoundMode):
            raise ConfigError("bound_mode must be a BoundMode")

    def with_bound(self, mode: BoundMode) -> "EnergyConfig":
        return replace(self, bound_mode=mode)


@dataclass(frozen=True)
class AvailabilityResult:
    """Stationary split of the ON/OFF cycle."""

    eta0: float
    mean_on: float
    mean_off: float
    nu0: float


@dataclass(frozen=True)
class ChainEstimate:
    """Empirical availability from an event-driven run of the chain."""

    eta_hat: float
    se: float
    transitions: int
    cycles: int
    seed: int


def normalize_strategy(spec: StrategySpec, capacity: int) -> tuple[StrategySpec, int]:
    """Shift a toggle policy so the OFF threshold sits at level zero.

    A policy {off, on} on a battery of `capacity` quanta behaves identically
    to {0, on - off} on capacity - off quanta: levels below the OFF threshold
    are never visited, so the chain is a pure translation.  Idempotent.
    """
    if not (0 <= spec.off_level < spec.on_level <= capacity):
        raise ConfigError("strategy must satisfy 0 <= off_level < on_level <= capacity")
    shifted = StrategySpec(0, spec.on_level - spec.off_level)
    return shifted, capacity - spec.off_level


def depletion_rate(cfg: EnergyConfig) -> float:
    """Drain rate nu0 in quanta per second for the configured regime.

    The device transmits a fraction a_a of the time at power p; one quantum
    holds the energy of one repetition (preamble only, or preamble plus the
    data grant when every attempt is assumed to succeed).
    """
    if cfg.bound_mode is BoundMode.FAILURE:
        unit = cfg.e0_ra
    else:
        unit = cfg.e0_ra + cfg.e0_da
    return cfg.a_a * cfg.p / unit


def generator_matrix(mu0: float, nu0: float, capacity: int, exact: bool = False) -> np.ndarray:
    """Generator of the ON-phase birth-death chain on levels 0..capacity.

    Level 0 only gains (harvest), interior levels gain at mu0 and drain at
    nu0, the full battery only drains.  Rows sum to zero.  With exact=True
    the matrix is built from Fractions of the given rates (object dtype).
    """
    if capacity < 1:
        raise ConfigError("capacity must be at least 1")
    if not (mu0 > 0.0 and nu0 > 0.0):
        raise ConfigError("rates must be positive")
    if exact:
        mu, nu = Fraction(mu0), Fraction(nu0)
        q = np.zeros((capacity + 1, capacity + 1), dtype=object)
        q[:] = Fraction(0)
    else:
        mu, nu = mu0, nu0
        q = np.zeros((capacity + 1, capacity + 1))
    q[0, 0] = -mu
    q[0, 1] = mu
    for m in range(1, capacity):
        q[m, m - 1] = nu
        q[m, m] = -(mu + nu)
        q[m, m + 1] = mu
    q[capacity, capacity - 1] = nu
    q[capacity, capacity] = -nu
    return q


def neg_B_inverse(mu0: float, nu0: float, capacity: int, exact: bool = False) -> np.ndarray:
    """Inverse of -B0, where B0 restricts the generator to levels 1..capacity.

    Entry (m, n), 1-indexed levels, equals sum_{k=1}^{min(m,n)}
    mu0^(n-k) nu0^(k-1) / nu0^n; row m sums to the expected time to hit
    level 0 from level m.  With exact=True everything is computed in
    rational arithmetic on the binary values of the rates.
    """
    if capacity < 1:
        raise ConfigError("capacity must be at least 1")
    if not (mu0 > 0.0 and nu0 > 0.0):
        raise ConfigError("rates must be positive")
    if exact:
        mu, nu = Fraction(mu0), Fraction(nu0)
        rho = mu / nu
        out = np.empty((capacity, capacity), dtype=object)
    else:
        nu = nu0
        rho = mu0 / nu0
        out = np.empty((capacity, capacity))
    # Entry (m, n) = (1/nu) * sum_{k=1}^{min(m,n)} rho^(n-k); build the inner
    # sums once per column and reuse them down the rows.
    inv_nu = (Fraction(1) / nu) if exact else 1.0 / nu
    for n in range(1, capacity + 1):
        # partial[t] = sum_{k=1}^{t} rho^(n-k), t = 1..n
        acc = rho ** (n - 1)
        partial = [acc]
        for k in range(2, n + 1):
            acc = acc + rho ** (n - k)
            partial.append(acc)
        col = n - 1
        for m in range(1, capacity + 1):
            out[m - 1, col] = inv_nu * partial[min(m, n) - 1]
    return out


def hitting_times_solve(mu0: float, nu0: float, capacity: int) -> np.ndarray:
    """Expected times to empty from levels 1..capacity by solving
    (-B0) t = 1 directly.

    Elimination runs from the reflecting boundary down: with d_m the
    increment t_m - t_(m-1), the system reduces to d_cap = 1/nu0 and
    d_m = (1 + mu0 d_(m+1)) / nu0, all positive terms, so the solve stays
    componentwise stable for any rate ratio (a pivoted LU from the other
    end loses the solution entirely for mu0 >> nu0).
    """
    if capacity < 1:
        raise ConfigError("capacity must be at least 1")
    if not (mu0 > 0.0 and nu0 > 0.0):
        raise ConfigError("rates must be positive")
    d = np.empty(capacity)
    d[-1] = 1.0 / nu0
    for m in range(capacity - 2, -1, -1):
        d[m] = (1.0 + mu0 * d[m + 1]) / nu0
    return np.cumsum(d)


def mean_on_time(mu0: float, nu0: float, capacity: int, start_level: int) -> float:
    """Expected ON duration: time for the chain to first empty the battery
    when it starts at start_level quanta.

    Uses the closed form of the hitting time, evaluated in the log domain
    when the rate ratio is large, and falls back to the linear solve inside
    the singular band around mu0 == nu0.
    """
    if not (1 <= start_level <= capacity):
        raise ConfigError("start_level must lie in [1, capacity]")
    if not (mu0 > 0.0 and nu0 > 0.0):
        raise ConfigError("rates must be positive")
    rho = mu0 / nu0
    if abs(rho - 1.0) < RATE_RATIO_SINGULAR_BAND:
        return float(hitting_times_solve(mu0, nu0, capacity)[start_level - 1])
    m = start_level
    if rho < 1.0:
        head = rho ** (capacity - m + 1) * (rho ** m - 1.0) / (rho - 1.0)
        return (head - m) / (nu0 * (rho - 1.0))
    # rho > 1: head = rho^(capacity+1) (1 - rho^-m) / (rho - 1) in logs
    log_head = ((capacity + 1) * math.log(rho)
                + math.log1p(-rho ** (-m))
                - math.log(rho - 1.0))
    denom = nu0 * (rho - 1.0)
    if log_head < 700.0:
        return (math.exp(log_head) - m) / denom
    # head dwarfs m beyond any float representation of the difference
    log_t = log_head - math.log(denom)
    return math.exp(log_t) if log_t < 709.0 else math.inf


def mean_off_time(cfg: EnergyConfig) -> float:
    """Expected OFF duration: n_t harvest arrivals at rate mu0."""
    return cfg.n_t / cfg.mu0


def energy_availability(cfg: EnergyConfig) -> AvailabilityResult:
    """Stationary fraction of time the device is ON, renewal cycle ratio
    mean_on / (mean_on + mean_off)."""
    nu0 = depletion_rate(cfg)
    t_on = mean_on_time(cfg.mu0, nu0, cfg.m0, cfg.n_t)
    t_off = mean_off_time(cfg)
    if math.isinf(t_on):
        eta = 1.0
    else:
        eta = 1.0 / (1.0 + cfg.n_t / (cfg.mu0 * t_on))
    return AvailabilityResult(eta0=eta, mean_on=t_on, mean_off=t_off, nu0=nu0)


def availability_bounds(cfg: EnergyConfig) -> tuple[AvailabilityResult, AvailabilityResult]:
    """(lower, upper) availability: all-failure drain is the faster drain per
    quantum, all-success the slower, so they bracket the mixed truth."""
    lower = energy_availability(cfg.with_bound(BoundMode.FAILURE))
    upper = energy_availability(cfg.with_bound(BoundMode.SUCCESS))
    return lower, upper


def simulate_energy_chain(cfg: EnergyConfig, num_transitions: int = 1_000_000,
                          seed: int = 0) -> ChainEstimate:
    """Event-driven run of the ON/OFF battery chain.

    Counts num_transitions applied events (harvest arrivals, including
    saturated ones at full battery, and depletions).  Returns the empirical
    availability with a regenerative standard error estimated from the
    completed ON/OFF cycles.  Deterministic for a fixed seed.
    """
    if num_transitions < 1:
        raise ConfigError("num_transitions must be positive")
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xE4E26)))
    mu = cfg.mu0
    nu = depletion_rate(cfg)
    m0 = cfg.m0
    n_t = cfg.n_t
    p_harvest = mu / (mu + nu)
    inv_total = 1.0 / (mu + nu)
    inv_mu = 1.0 / mu

    level = n_t
    on = True
    t_on_total = 0.0
    t_off_total = 0.0
    cycle_on: list[float] = []
    cycle_off: list[float] = []
    phase_elapsed = 0.0

    block = 1 << 14
    exp_draws = rng.exponential(size=block)
    uni_draws = rng.random(size=block)
    ei = ui = 0

    for _ in range(num_transitions):
        if ei == block:
            exp_draws = rng.exponential(size=block)
            ei = 0
        e = exp_draws[ei]
        ei += 1
        if on:
            phase_elapsed += e * inv_total
            if ui == block:
                uni_draws = rng.random(size=block)
                ui = 0
            harvest = uni_draws[ui] < p_harvest
            ui += 1
            if harvest:
                if level < m0:
                    level += 1
            else:
                level -= 1
                if level == 0:
                    on = False
                    t_on_total += phase_elapsed
                    cycle_on.append(phase_elapsed)
                    phase_elapsed = 0.0
        else:
            phase_elapsed += e * inv_mu
            level += 1
            if level == n_t:
                on = True
                t_off_total += phase_elapsed
                cycle_off.append(phase_elapsed)
                phase_elapsed = 0.0

    # fold the unfinished phase into the totals for the point estimate
    if on:
        t_on_total += phase_elapsed
    else:
        t_off_total += phase_elapsed
    total = t_on_total + t_off_total
    eta_hat = t_on_total / total if total > 0.0 else 0.0

    n_cycles = min(len(cycle_on), len(cycle_off))
    if n_cycles >= 2:
        x = np.asarray(cycle_on[:n_cycles])
        y = np.asarray(cycle_off[:n_cycles])
        h = x.sum() / (x.sum() + y.sum())
        z = (1.0 - h) * x - h * y
        se = float(np.std(z, ddof=1) / ((x.mean() + y.mean()) * math.sqrt(n_cycles)))
    else:
        se = math.inf
    return ChainEstimate(eta_hat=float(eta_hat), se=se,
                         transitions=num_transitions, cycles=n_cycles, seed=seed)
