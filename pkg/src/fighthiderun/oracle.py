"""Monte Carlo simulation of the incident, used to check the closed forms.

Each trial replays the generative story minute by minute: exiters and victims
are drawn as disjoint uniform subsets of the civilians present, fights and
runs are Bernoulli draws, and the incident stops when the authority arrives
or the arena is empty.  Nothing here evaluates a survival formula.

Victims are drawn by a partial Fisher-Yates shuffle of the present pool.
Civilians other than the focal one are exchangeable, so only the focal
civilian's slot is followed through the swaps; the census itself is exact.

Trials run in fixed-size blocks; block ``b`` draws from
``PCG64(SeedSequence(seed, spawn_key=(b,)))`` so results do not depend on how
many workers share the blocks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .analytic import Action, SurvivalTable, closed_table
from .complex_arena import p_s, phase1_table
from .policy import hallway_survival, optimal_deviation
from .scenario import (ArmamentProfile, ClosedScenario, ComplexScenario, HallwayScenario,
                       MultiArmedProfile, OpenScenario, Setup, _schedule_value)
from .tables import table_for

GENERATOR = "numpy PCG64, SeedSequence(seed, spawn_key=(block,))"
BLOCK_SIZE = 1 << 17
Z_THRESHOLD = 4.0

Strategy = tuple[Action, ...]
# (rng, trials, pool at start of minute, stage minute) -> bool array of fight successes
FightModel = Callable[[np.random.Generator, int, int, int], np.ndarray]


@dataclass(frozen=True)
class TrialConfig:
    trials: int
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class EstimateReport:
    quantity: str
    estimate: float
    stderr: float
    trials: int
    seed: int
    analytic: float | None = None
    generator: str = GENERATOR

    @property
    def z(self) -> float | None:
        """Standardised deviation from the analytic value.

        The standard error is floored at ``1/(2 trials)`` so that an estimate
        of exactly 0 or 1 is not infinitely significant.
        """
        if self.analytic is None:
            return None
        se = max(self.stderr, 0.5 / self.trials)
        return (self.estimate - self.analytic) / se

    def passed(self, threshold: float = Z_THRESHOLD) -> bool:
        return self.z is None or abs(self.z) < threshold

    CSV_HEADER = "quantity,estimate,stderr,analytic,z,trials,seed"

    def csv_row(self) -> str:
        analytic = "" if self.analytic is None else f"{self.analytic:.6f}"
        z = "" if self.z is None else f"{self.z:.3f}"
        return (f"{self.quantity},{self.estimate:.6f},{self.stderr:.6f},{analytic},{z},"
                f"{self.trials},{self.seed}")


def reports_csv(reports: Iterable[EstimateReport]) -> str:
    return "\n".join([EstimateReport.CSV_HEADER, *(r.csv_row() for r in reports)]) + "\n"


def parse_strategy(spec: str | Sequence[Action | str]) -> Strategy:
    """``"HHF"``, ``"hide,hide,fight"`` or a sequence of actions."""
    letters = {"H": Action.HIDE, "F": Action.FIGHT, "R": Action.RUN}
    if isinstance(spec, str):
        spec = spec.strip()
        if "," in spec:
            return tuple(Action(s.strip().lower()) for s in spec.split(","))
        return tuple(letters[c] for c in spec.upper())
    return tuple(Action(a) for a in spec)


def deviate_at(minute: int, action: Action = Action.FIGHT) -> Strategy:
    """Hide for ``minute - 1`` minutes, then take ``action``."""
    return (Action.HIDE,) * (minute - 1) + (action,)


def bernoulli_fight(p: float) -> FightModel:
    return lambda rng, size, pool, minute: rng.random(size) < p


def joint_fight(p2: float, p_f: float, j_schedule) -> FightModel:
    """``j`` fighters shoot at once; each other fighter may hit a random bystander."""

    def fight(rng: np.random.Generator, size: int, pool: int, minute: int) -> np.ndarray:
        j = _schedule_value(j_schedule, minute, pool)
        shooter_down = (rng.random((size, j)) < p2).any(axis=1)
        if j == 1:
            return shooter_down
        fires = rng.random((size, j - 1)) < p_f
        # each stray shot lands on one of the pool - 1 other civilians; slot 0 is the focal one
        target = rng.integers(0, pool - 1, size=(size, j - 1))
        return shooter_down & ~(fires & (target == 0)).any(axis=1)

    return fight


@dataclass(frozen=True)
class Stage:
    """A run of minutes with fixed killing and exit rates.

    ``minutes=None`` lasts until the arena is empty.  ``authority`` is the
    stage minute after which the incident is over.  ``massacre`` stages
    kill ``m`` civilians at once, before anyone can react.
    """

    m: int
    e: int = 0
    minutes: int | None = None
    authority: int | None = None
    fight: FightModel | None = None
    run_p: float | None = None
    massacre: bool = False


def _focal_hit(rng: np.random.Generator, size: int, pool: int, exits: int, kills: int) -> np.ndarray:
    """Partial Fisher-Yates over ``pool`` slots, focal civilian parked in the last slot.

    The first ``exits`` slots are filled from the other civilians only (the
    focal civilian is hiding and never leaves), the next ``kills`` slots are
    the victims, drawn from everyone left.
    """
    pos = np.full(size, pool - 1, dtype=np.int64)
    if kills == 0:
        return np.zeros(size, dtype=bool)
    draws = rng.integers(np.arange(exits, exits + kills), pool, size=(size, kills))
    for col, t in enumerate(range(exits, exits + kills)):
        j = draws[:, col]
        pos = np.where(j == pos, t, np.where(pos == t, j, pos))
    return (pos >= exits) & (pos < exits + kills)


def _simulate_block(rng: np.random.Generator, size: int, N: int, stages: Sequence[Stage],
                    script: Strategy) -> int:
    pool = N
    alive = np.ones(size, dtype=bool)
    safe = np.zeros(size, dtype=bool)
    step = 0
    for stage in stages:
        if stage.massacre:
            alive &= ~_focal_hit(rng, size, pool, 0, stage.m)
            pool -= stage.m
            continue
        minute = 0
        while stage.minutes is None or minute < stage.minutes:
            minute += 1
            if step >= len(script) or pool <= 0:
                return int((alive | safe).sum())
            if stage.authority is not None and minute > stage.authority:
                return int((alive | safe).sum())
            action = script[step]
            step += 1
            exposed = alive & ~safe
            if action is Action.FIGHT:
                if stage.fight is None:
                    raise ValueError("no fight success probability for this phase")
                ok = stage.fight(rng, size, pool, minute)
                safe |= exposed & ok
                alive &= ~(exposed & ~ok)
            elif action is Action.RUN:
                if stage.run_p is None:
                    raise ValueError("running is not possible in this arena")
                ok = rng.random(size) < stage.run_p
                safe |= exposed & ok
                alive &= ~(exposed & ~ok)
            exits = min(stage.e, max(pool - stage.m, 0))
            kills = min(stage.m, pool - exits)
            if action is Action.HIDE:
                alive &= ~(exposed & _focal_hit(rng, size, pool, exits, kills))
            assert exits >= 0 and kills >= 0 and pool - exits - kills >= 0, "census went negative"
            pool -= exits + kills
    return int((alive | safe).sum())


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def run_trials(N: int, stages: Sequence[Stage], script: Strategy, config: TrialConfig,
               quantity: str = "survival", analytic: float | None = None) -> EstimateReport:
    """Fraction of trials in which the focal civilian is alive after the script."""
    n_blocks = math.ceil(config.trials / BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, config.trials - b * BLOCK_SIZE) for b in range(n_blocks)]

    def block(b: int) -> int:
        return _simulate_block(_block_rng(config.seed, b), sizes[b], N, stages, script)

    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            successes = sum(pool.map(block, range(n_blocks)))
    else:
        successes = sum(block(b) for b in range(n_blocks))
    p_hat = successes / config.trials
    stderr = math.sqrt(p_hat * (1 - p_hat) / config.trials)
    return EstimateReport(quantity, p_hat, stderr, config.trials, config.seed, analytic)


def _check_script(script: Strategy, horizon: int) -> None:
    if len(script) > horizon:
        raise ValueError(f"strategy has {len(script)} minutes, horizon is {horizon}")


def closed_stages(scenario: ClosedScenario, fight: FightModel) -> list[Stage]:
    return [Stage(m=scenario.m, authority=scenario.T2, fight=fight)]


def open_stages(scenario: OpenScenario, fight: FightModel, p_r: float) -> list[Stage]:
    return [Stage(m=scenario.m, e=scenario.e, authority=scenario.T2, fight=fight, run_p=p_r)]


def complex_stages(scenario: ComplexScenario, phase1_fight: FightModel | None, p_r: float | None,
                   phase2_fight: FightModel, p_r_tilde: float | None) -> list[Stage]:
    return [
        Stage(m=scenario.N - scenario.N1, massacre=True),
        Stage(m=scenario.m1, e=scenario.e1, minutes=scenario.n, fight=phase1_fight, run_p=p_r),
        Stage(m=scenario.m2, e=scenario.e2, authority=scenario.T2, fight=phase2_fight, run_p=p_r_tilde),
    ]


def simulate_closed(scenario: ClosedScenario, p: float, strategy: Strategy | str,
                    config: TrialConfig, analytic: float | None = None) -> EstimateReport:
    script = parse_strategy(strategy)
    _check_script(script, max(scenario.T1, scenario.T2))
    return run_trials(scenario.N, closed_stages(scenario, bernoulli_fight(p)), script, config,
                      _label(script), analytic)


def simulate_open(scenario: OpenScenario, p: float, p_r: float, strategy: Strategy | str,
                  config: TrialConfig, analytic: float | None = None) -> EstimateReport:
    script = parse_strategy(strategy)
    _check_script(script, max(scenario.T1, scenario.T2))
    return run_trials(scenario.N, open_stages(scenario, bernoulli_fight(p), p_r), script, config,
                      _label(script), analytic)


def simulate_complex(scenario: ComplexScenario, armament: ArmamentProfile, strategy: Strategy | str,
                     config: TrialConfig, armed: bool = False, analytic: float | None = None,
                     phase2_fight: FightModel | None = None) -> EstimateReport:
    """The script covers the ``n`` Phase-1 minutes followed by Phase-2 minutes.

    Hiding through exactly ``n`` minutes estimates the probability of being
    alive in the arena when Phase 2 starts.
    """
    script = parse_strategy(strategy)
    _check_script(script, scenario.n + max(scenario.T1, scenario.T2))
    p_tilde = armament.p_tilde2 if armed else armament.p_tilde1
    p1_fight = None if p_tilde is None else bernoulli_fight(p_tilde)
    stages = complex_stages(scenario, p1_fight, armament.p_r,
                            phase2_fight or bernoulli_fight(armament.fight(armed)), armament.p_r_tilde)
    return run_trials(scenario.N, stages, script, config, _label(script), analytic)


def simulate_multi_armed(scenario: ClosedScenario | OpenScenario | ComplexScenario,
                         armament: ArmamentProfile, profile: MultiArmedProfile,
                         strategy: Strategy | str, config: TrialConfig, armed: bool = True,
                         analytic: float | None = None) -> EstimateReport:
    """Same incident, but a fight started by an armed focal civilian is joined by others."""
    script = parse_strategy(strategy)
    if isinstance(scenario, ComplexScenario):
        if armed:
            p_f = profile.p_f_tilde if profile.p_f_tilde is not None else profile.p_f
            fight = joint_fight(armament.require("p_tilde2"), p_f, profile.j_schedule)
        else:
            fight = bernoulli_fight(armament.require("p_tilde1"))
        return simulate_complex(scenario, armament, script, config, armed, analytic, phase2_fight=fight)
    fight = joint_fight(armament.p2, profile.p_f, profile.j_schedule) if armed \
        else bernoulli_fight(armament.p1)
    _check_script(script, max(scenario.T1, scenario.T2))
    if isinstance(scenario, ClosedScenario):
        stages = closed_stages(scenario, fight)
    else:
        stages = open_stages(scenario, fight, armament.require("p_r"))
    return run_trials(scenario.N, stages, script, config, _label(script), analytic)


def simulate_hallway(hallway: HallwayScenario, armament: ArmamentProfile, armed: bool,
                     config: TrialConfig, policy: str = "optimal",
                     analytic: float | None = None) -> EstimateReport:
    """Hide into an arena during the hallway minute, then wait for the shooter.

    The arena search order is a uniform shuffle of the K arenas.  Inside the
    focal arena the civilian follows the plan for the time left before the
    authority arrives (or keeps hiding with ``policy="hide"``).
    """
    p = armament.fight(armed)
    p_h = armament.require("p_h")
    K, T1 = hallway.K, hallway.T1
    n_blocks = math.ceil(config.trials / BLOCK_SIZE)
    successes = 0
    scripts: dict[int, Strategy] = {}
    for b in range(n_blocks):
        size = min(BLOCK_SIZE, config.trials - b * BLOCK_SIZE)
        rng = _block_rng(config.seed, b)
        hid = rng.random(size) < p_h
        order = np.argsort(rng.random((size, K)), axis=1)
        rank = np.argmax(order == 0, axis=1) + 1  # search position of the focal arena
        for r in range(1, K + 1):
            sel = hid & (rank == r)
            count = int(sel.sum())
            remaining = hallway.T2 - 1 - (r - 1) * T1
            if remaining <= 0:
                successes += count
                continue
            if count == 0:
                continue
            arena = hallway.arena_template(remaining)
            if remaining not in scripts:
                table = closed_table(arena, p)
                if policy == "optimal":
                    scripts[remaining] = optimal_deviation(table).actions or (Action.HIDE,)
                else:
                    scripts[remaining] = (Action.HIDE,) * table.horizon
            successes += _simulate_block(rng, count, arena.N, closed_stages(arena, bernoulli_fight(p)),
                                         scripts[remaining])
    p_hat = successes / config.trials
    stderr = math.sqrt(p_hat * (1 - p_hat) / config.trials)
    return EstimateReport("hallway", p_hat, stderr, config.trials, config.seed, analytic)


def _label(script: Strategy) -> str:
    if not script:
        return "survival"
    last = script[-1]
    return f"{last.value}({len(script)})"


def table_strategies(table: SurvivalTable) -> list[tuple[Action, int, Strategy]]:
    """One script per table entry, matching the row semantics."""
    out = []
    for action in table.actions:
        for minute in range(1, table.horizon + 1):
            script = (Action.HIDE,) * minute if action is Action.HIDE else deviate_at(minute, action)
            out.append((action, minute, script))
    return out


def compare(setup: Setup, config: TrialConfig, armed: bool = True) -> list[EstimateReport]:
    """Estimate every entry of the setup's analytic table by simulation."""
    sc, arm, multi = setup.scenario, setup.armament, setup.multi_armed
    prefix: list[EstimateReport] = []
    if isinstance(sc, HallwayScenario):
        return [simulate_hallway(sc, arm, armed, config, analytic=hallway_survival(sc, arm, armed))]
    table = table_for(setup, armed, "standard")
    if isinstance(sc, ComplexScenario):
        hide_n = (Action.HIDE,) * sc.n
        rep = simulate_complex(sc, arm, hide_n, config, armed, p_s(sc))
        prefix.append(_relabel(rep, "p_s"))
        if sc.n and arm.p_r is not None and (arm.p_tilde2 if armed else arm.p_tilde1) is not None:
            t1 = phase1_table(sc, arm, armed)
            for action, minute, script in table_strategies(t1):
                rep = simulate_complex(sc, arm, script, config, armed, t1[action, minute])
                prefix.append(_relabel(rep, f"phase1.{action.value}({minute})"))
    reports = prefix
    for action, minute, script in table_strategies(table):
        analytic = table[action, minute]
        if isinstance(sc, ComplexScenario):
            script = (Action.HIDE,) * sc.n + script
        if multi is not None:
            rep = simulate_multi_armed(sc, arm, multi, script, config, armed, analytic)
        elif isinstance(sc, ClosedScenario):
            rep = simulate_closed(sc, arm.fight(armed), script, config, analytic)
        elif isinstance(sc, OpenScenario):
            rep = simulate_open(sc, arm.fight(armed), arm.require("p_r"), script, config, analytic)
        else:
            rep = simulate_complex(sc, arm, script, config, armed, analytic)
        reports.append(_relabel(rep, f"{action.value}({minute})"))
    return reports


def _relabel(report: EstimateReport, quantity: str) -> EstimateReport:
    return EstimateReport(quantity, report.estimate, report.stderr, report.trials, report.seed,
                          report.analytic, report.generator)
