"""Hand-built frequency series that probe how the increment test behaves.

Each generator is deterministic: logistic curves ``1 / (1 + exp(-k (t - t0)))``
optionally perturbed by seeded normal noise and clipped into (0, 1).  Points
sit at unit time steps and carry a nominal 100 tokens each.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .series import FrequencySeries

TOKENS = 100


@dataclass(frozen=True)
class Scenario:
    name: str
    series: FrequencySeries
    description: str
    params: dict = field(default_factory=dict)


def logistic(t, k: float, t0: float) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-k * (np.asarray(t, dtype=float) - t0)))


def _series(values, t_start: int = 1) -> FrequencySeries:
    values = [float(x) for x in values]
    t = tuple(float(t_start + i) for i in range(len(values)))
    return FrequencySeries(t, tuple(values), (TOKENS,) * len(values))


def _noisy_logistic(n, k, t0, sd, seed, lo=0.005, hi=0.995, sign=1.0):
    t = np.arange(1, n + 1)
    rng = np.random.default_rng(seed)
    return np.clip(logistic(t, sign * k, t0) + rng.normal(0.0, sd, n), lo, hi)


def partial_change() -> tuple[np.ndarray, int, int]:
    """Whole series for the head/tail pair, plus the cut points."""
    return _noisy_logistic(16, 0.4, 11.0, 0.06, seed=47), 10, 8


def central_s() -> np.ndarray:
    return _noisy_logistic(9, 0.9, 5.0, 0.08, seed=82, lo=0.02, hi=0.98)


def rise_and_fall() -> np.ndarray:
    t = np.arange(1, 17)
    v = np.where(t <= 8, logistic(t, 1.0, 4.5), logistic(t, -1.0, 12.5))
    rng = np.random.default_rng(0)
    return np.clip(v + rng.normal(0.0, 0.03, 16), 0.01, 0.99)


D_BASE = (0.04, 0.06, 0.07, 0.08, 0.10, 0.11, 0.13, 0.15, 0.16, 0.18)
D_OUTLIER = 0.005
ABSORBED_TAIL = 1.0 / 501.0


def scenario_fixtures() -> dict[str, Scenario]:
    whole, head_len, tail_start = partial_change()
    s_curve = central_s()
    tail = [ABSORBED_TAIL] * 8
    flat_s = np.concatenate([tail, s_curve, [1.0 - x for x in tail]])
    up_down = rise_and_fall()
    d2 = list(D_BASE)
    d2[3] = D_OUTLIER
    near_zero = np.clip(np.random.default_rng(0).normal(0.01, 0.004, 200), 1e-3, None)

    out = [
        Scenario("a.1", _series(whole[:head_len]),
                 "head of a partially observed change: near-zero tail then a rise",
                 {"k": 0.4, "t0": 11.0, "noise_sd": 0.06, "seed": 47, "points": "1-10"}),
        Scenario("a.2", _series(whole[tail_start:], tail_start + 1),
                 "tail end of the same change, overlapping the head by two points",
                 {"k": 0.4, "t0": 11.0, "noise_sd": 0.06, "seed": 47, "points": "9-16"}),
        Scenario("a", _series(whole), "the whole partially observed change",
                 {"k": 0.4, "t0": 11.0, "noise_sd": 0.06, "seed": 47}),
        Scenario("b.1", _series(up_down), "rise towards one variant followed by a fall back",
                 {"k": 1.0, "t0_up": 4.5, "t0_down": 12.5, "noise_sd": 0.03, "seed": 0}),
        Scenario("b.2", _series(flat_s), "the c.2 S-curve embedded in absorbed flat tails",
                 {"tail_value": ABSORBED_TAIL, "tail_length": 8}),
        Scenario("c.1", _series(s_curve[:-2]), "c.2 with its last two points removed",
                 {"k": 0.9, "t0": 5.0, "noise_sd": 0.08, "seed": 82}),
        Scenario("c.2", _series(s_curve), "short noisy S-curve",
                 {"k": 0.9, "t0": 5.0, "noise_sd": 0.08, "seed": 82}),
        Scenario("d.1", _series(D_BASE), "slow rise close to the lower boundary", {}),
        Scenario("d.2", _series(d2), "d.1 with its fourth point pushed towards zero",
                 {"fourth_point": D_OUTLIER}),
        Scenario("e.1", _series(logistic(np.arange(1, 31), 0.5, 15.5)),
                 "clean S-curve over the full range", {"k": 0.5, "t0": 15.5, "n": 30}),
        Scenario("e.2", _series(near_zero), "noise with a small mean close to zero",
                 {"mean": 0.01, "sd": 0.004, "n": 200, "seed": 0, "floor": 1e-3}),
    ]
    return {s.name: s for s in out}
