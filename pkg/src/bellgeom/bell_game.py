"""Rounds of the generalised Bell game and their statistics.

One round draws a hidden coordinate for detector A by inverse-CDF
sampling, re-expresses it in detector B's chart with the transformation
law and reads both outcomes. Per-round randomness comes from a
counter-based hash of ``(seed, round_id)``, so results do not depend on
how rounds are split across workers.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import _backend
from ._format import sig12, sig12_str
from .correlation_family import CorrelationFamily, evaluate
from .errors import DomainError
from .hidden_model import ModelContext, response, sample_lambda, transform
from .rng import counter_uniform, normalize_seed

__all__ = [
    "JointDistribution",
    "RoundRecord",
    "SimulationSummary",
    "closed_form_distribution",
    "reconstruct_correlation",
    "round_record",
    "run_round",
    "simulate",
    "sweep_csv",
]

OUTCOME_KEYS = ("pp", "pm", "mp", "mm")


@dataclass(frozen=True)
class JointDistribution:
    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    @property
    def correlation(self) -> float:
        return self.p_pp - self.p_pm - self.p_mp + self.p_mm

    @property
    def marginal_a(self) -> float:
        """P(s_A = +1)."""
        return self.p_pp + self.p_pm

    @property
    def marginal_b(self) -> float:
        """P(s_B = +1)."""
        return self.p_pp + self.p_mp

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_pp, self.p_pm, self.p_mp, self.p_mm)


@dataclass(frozen=True)
class RoundRecord:
    round_id: int
    lambda_a: float
    lambda_b: float
    s_a: int
    s_b: int


@dataclass(frozen=True)
class SimulationSummary:
    rounds: int
    seed: int
    theta: float
    counts: dict = field(default_factory=dict)
    partial: bool = False

    @property
    def correlation(self) -> float:
        c = self.counts
        return (c["pp"] - c["pm"] - c["mp"] + c["mm"]) / self.rounds

    def to_dict(self) -> dict:
        out = {
            "rounds": self.rounds,
            "seed": self.seed,
            "theta": sig12(self.theta),
            "counts": {k: int(self.counts[k]) for k in OUTCOME_KEYS},
            "correlation": sig12(self.correlation),
        }
        if self.partial:
            out["partial"] = True
        return out


def closed_form_distribution(ctx: ModelContext) -> JointDistribution:
    e = evaluate(ctx.family, ctx.theta)
    same = (1.0 + e) / 4.0
    diff = (1.0 - e) / 4.0
    return JointDistribution(same, diff, diff, same)


def run_round(ctx: ModelContext, u: float, round_id: int = 0) -> RoundRecord:
    """Play one round from a given uniform draw."""
    lam_a = sample_lambda(ctx.family, u)
    lam_b = transform(ctx, lam_a)
    return RoundRecord(round_id, lam_a, lam_b, response(lam_a), response(lam_b))


def round_record(ctx: ModelContext, seed: int, round_id: int) -> RoundRecord:
    """The round ``round_id`` of the sequence identified by ``seed``."""
    u = float(counter_uniform(seed, round_id, round_id + 1)[0])
    return run_round(ctx, u, round_id)


def _shards(rounds: int, workers: int) -> list[tuple[int, int]]:
    step, extra = divmod(rounds, workers)
    bounds, lo = [], 0
    for w in range(workers):
        hi = lo + step + (1 if w < extra else 0)
        if hi > lo:
            bounds.append((lo, hi))
        lo = hi
    return bounds


def simulate(
    ctx: ModelContext,
    rounds: int,
    seed: int,
    workers: int = 1,
    backend: str | None = None,
) -> SimulationSummary:
    """Monte Carlo run of ``rounds`` rounds, sharded over ``workers`` threads."""
    if rounds < 1:
        raise DomainError("rounds must be at least 1")
    if workers < 1:
        raise DomainError("workers must be at least 1")
    shards = _shards(rounds, workers)

    def job(bounds):
        return _backend.round_counts(ctx, seed, bounds[0], bounds[1], backend)

    if len(shards) == 1:
        parts = [job(shards[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(shards)) as pool:
            parts = list(pool.map(job, shards))
    totals = [sum(col) for col in zip(*parts)]
    return SimulationSummary(
        rounds=rounds,
        seed=normalize_seed(seed),
        theta=ctx.theta,
        counts=dict(zip(OUTCOME_KEYS, totals)),
    )


def reconstruct_correlation(
    f: CorrelationFamily,
    thetas: Sequence[float],
    rounds: int,
    seed: int,
    workers: int = 1,
    backend: str | None = None,
) -> list[tuple[float, float, float]]:
    """``(theta, empirical, closed_form)`` for each requested angle."""
    if len(thetas) == 0:
        raise DomainError("thetas must be non-empty")
    rows = []
    for theta in thetas:
        ctx = ModelContext(f, theta)
        summary = simulate(ctx, rounds, seed, workers, backend)
        rows.append((float(theta), summary.correlation, closed_form_distribution(ctx).correlation))
    return rows


def sweep_csv(rows: Iterable[tuple[float, float | None, float]]) -> str:
    """Render ``theta,empirical,closed_form`` rows; ``None`` leaves a blank."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta", "empirical", "closed_form"])
    for theta, emp, closed in rows:
        writer.writerow([sig12_str(theta), "" if emp is None else sig12_str(emp), sig12_str(closed)])
    return buf.getvalue()
