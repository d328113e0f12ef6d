"""Seeded particle swarm optimizer for ordered switching-angle vectors, plus
a brute-force grid-search oracle for validating solver output on small
instances.

All randomness flows from one seeded generator per solve, so identical
(problem, params) inputs give bit-identical results.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .she import SheProblem, Residuals, cost_batch, is_feasible, residuals
from .waveform import HALF_PI, SwitchingAngles

__all__ = [
    "BoundPolicy",
    "PsoParams",
    "SolveResult",
    "SwarmState",
    "repair_angles",
    "init_swarm",
    "step",
    "solve",
    "grid_oracle",
    "ANGLE_EPS",
]

# Clamp margin for the feasible open interval (0, pi/2); also the minimum
# gap enforced between consecutive angles by the repair pass.
ANGLE_EPS = 1e-4

# Cost surcharge per radian of constraint violation in penalty mode; large
# enough to dominate any attainable cost difference.
_PENALTY_WEIGHT = 100.0

_MIN_RESOLUTION = math.radians(0.1)


class BoundPolicy(str, Enum):
    REPAIR_SORT_CLAMP = "repair_sort_clamp"
    PENALTY = "penalty"


@dataclass(frozen=True)
class PsoParams:
    """Solver configuration.

    swarm_size, inertia, cognitive and social follow the standard
    constriction-equivalent values. Each solve runs `restarts` independent
    swarms; each swarm is refined over `zoom_rounds` re-initializations in a
    box around its incumbent best whose radius (and velocity clamp) shrink by
    `zoom_shrink` per round. The first round of every restart searches the
    full domain. `inertia_final`, when set, decays the inertia linearly from
    `inertia` to that value over a round's iterations.
    """

    swarm_size: int = 50
    max_iterations: int = 500
    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49
    seed: int = 42
    velocity_clamp: float = math.pi / 4
    bound_policy: BoundPolicy = BoundPolicy.REPAIR_SORT_CLAMP
    convergence_tol: float = 1e-6
    stall_iterations: int = 75
    restarts: int = 16
    zoom_rounds: int = 6
    zoom_shrink: float = 0.2
    inertia_final: float | None = None

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError(f"swarm_size must be >= 2, got {self.swarm_size}")
        if not (0.0 <= self.inertia <= 1.0):
            raise ValueError(f"inertia must be in [0, 1], got {self.inertia}")
        if self.cognitive < 0 or self.social < 0:
            raise ValueError("acceleration coefficients must be >= 0")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not (self.velocity_clamp > 0):
            raise ValueError(f"velocity_clamp must be > 0, got {self.velocity_clamp}")
        if self.convergence_tol < 0:
            raise ValueError(f"convergence_tol must be >= 0, got {self.convergence_tol}")
        if self.stall_iterations < 1:
            raise ValueError(f"stall_iterations must be >= 1, got {self.stall_iterations}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.zoom_rounds < 1:
            raise ValueError(f"zoom_rounds must be >= 1, got {self.zoom_rounds}")
        if not (0.0 < self.zoom_shrink < 1.0):
            raise ValueError(f"zoom_shrink must be in (0, 1), got {self.zoom_shrink}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.inertia_final is not None and not (0.0 <= self.inertia_final <= 1.0):
            raise ValueError(f"inertia_final must be in [0, 1], got {self.inertia_final}")
        object.__setattr__(self, "bound_policy", BoundPolicy(self.bound_policy))


@dataclass(frozen=True)
class SolveResult:
    """Best angles found plus everything needed to reproduce the run."""

    angles: SwitchingAngles
    best_cost: float
    residuals: Residuals
    feasible: bool
    iterations_used: int
    convergence_trace: tuple[tuple[int, float], ...]
    seed: int
    params_echo: PsoParams | None

    def to_dict(self) -> dict:
        """Canonical dictionary form (deterministic key order and values)."""
        return {
            "angles_rad": list(self.angles.radians),
            "angles_deg": list(self.angles.degrees),
            "best_cost": self.best_cost,
            "fundamental_error": self.residuals.fundamental_error,
            "harmonic_values": list(self.residuals.harmonic_values),
            "feasible": self.feasible,
            "iterations_used": self.iterations_used,
            "convergence_trace": [[i, c] for i, c in self.convergence_trace],
            "seed": self.seed,
            "params": None if self.params_echo is None else {
                "swarm_size": self.params_echo.swarm_size,
                "max_iterations": self.params_echo.max_iterations,
                "inertia": self.params_echo.inertia,
                "cognitive": self.params_echo.cognitive,
                "social": self.params_echo.social,
                "seed": self.params_echo.seed,
                "velocity_clamp": self.params_echo.velocity_clamp,
                "bound_policy": self.params_echo.bound_policy.value,
                "convergence_tol": self.params_echo.convergence_tol,
                "stall_iterations": self.params_echo.stall_iterations,
                "restarts": self.params_echo.restarts,
                "zoom_rounds": self.params_echo.zoom_rounds,
                "zoom_shrink": self.params_echo.zoom_shrink,
                "inertia_final": self.params_echo.inertia_final,
            },
        }


@dataclass
class SwarmState:
    """Mutable state of one swarm; owned exclusively by a single solve run."""

    positions: np.ndarray
    velocities: np.ndarray
    pbest_pos: np.ndarray
    pbest_cost: np.ndarray
    gbest_pos: np.ndarray
    gbest_cost: float
    rng: np.random.Generator
    velocity_clamp: float
    iteration: int = 0


def repair_angles(x: np.ndarray, eps: float = ANGLE_EPS) -> np.ndarray:
    """Map arbitrary angle vectors onto the feasible ordered region.

    Sorts each vector ascending, clamps into [eps, pi/2 - eps], then nudges
    ties apart by eps: an upward pass enforces the minimum gap, a downward
    pass pulls everything back under the top bound while preserving the gaps.
    Works on any (..., dims) array; returns a new array.
    """
    out = np.sort(np.asarray(x, dtype=float), axis=-1)
    dims = out.shape[-1]
    if (dims + 1) * eps >= HALF_PI:
        raise ValueError(f"eps {eps} leaves no room for {dims} ordered angles")
    np.clip(out, eps, HALF_PI - eps, out=out)
    for k in range(1, dims):
        out[..., k] = np.maximum(out[..., k], out[..., k - 1] + eps)
    out[..., -1] = np.minimum(out[..., -1], HALF_PI - eps)
    for k in range(dims - 2, -1, -1):
        out[..., k] = np.minimum(out[..., k], out[..., k + 1] - eps)
    return out


def _violation(x: np.ndarray, eps: float = ANGLE_EPS) -> np.ndarray:
    """Radians of bound and ordering violation per angle vector."""
    low = np.maximum(0.0, eps - x).sum(axis=-1)
    high = np.maximum(0.0, x - (HALF_PI - eps)).sum(axis=-1)
    order = np.maximum(0.0, x[..., :-1] + eps - x[..., 1:]).sum(axis=-1)
    return low + high + order


def _evaluate(problem: SheProblem, x: np.ndarray, policy: BoundPolicy) -> np.ndarray:
    if policy is BoundPolicy.PENALTY:
        return cost_batch(problem, x) + _PENALTY_WEIGHT * _violation(x)
    return cost_batch(problem, x)


def _init_in_box(problem: SheProblem, params: PsoParams, rng: np.random.Generator,
                 lo, hi, velocity_clamp: float) -> SwarmState:
    dims = problem.cfg.cells
    shape = (params.swarm_size, dims)
    x = np.sort(rng.uniform(lo, hi, shape), axis=1)
    if params.bound_policy is BoundPolicy.REPAIR_SORT_CLAMP:
        x = repair_angles(x)
    v = rng.uniform(-velocity_clamp, velocity_clamp, shape)
    c = _evaluate(problem, x, params.bound_policy)
    gi = int(np.argmin(c))
    return SwarmState(
        positions=x,
        velocities=v,
        pbest_pos=x.copy(),
        pbest_cost=c.copy(),
        gbest_pos=x[gi].copy(),
        gbest_cost=float(c[gi]),
        rng=rng,
        velocity_clamp=float(velocity_clamp),
    )


def init_swarm(problem: SheProblem, params: PsoParams,
               rng: np.random.Generator | None = None) -> SwarmState:
    """Seeded uniform swarm over the ordered-angle simplex.

    Positions are S uniforms in (0, pi/2) sorted ascending per particle;
    velocities are uniform within the clamp. Personal bests start at the
    initial positions; the global best is the cheapest of those.
    """
    if rng is None:
        rng = np.random.default_rng(params.seed)
    return _init_in_box(problem, params, rng, 0.0, HALF_PI, params.velocity_clamp)


def step(state: SwarmState, problem: SheProblem, params: PsoParams,
         inertia: float | None = None) -> SwarmState:
    """One velocity/position update of the whole swarm (in place).

    v <- w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x); x <- x + v, with fresh
    uniform(0,1) draws per dimension per particle, velocity clamping, and
    bound handling per the configured policy. Personal and global bests move
    only on strict cost improvement (first minimum wins ties).
    """
    w = params.inertia if inertia is None else inertia
    r1 = state.rng.random(state.positions.shape)
    r2 = state.rng.random(state.positions.shape)
    state.velocities = (
        w * state.velocities
        + params.cognitive * r1 * (state.pbest_pos - state.positions)
        + params.social * r2 * (state.gbest_pos - state.positions)
    )
    np.clip(state.velocities, -state.velocity_clamp, state.velocity_clamp,
            out=state.velocities)
    state.positions = state.positions + state.velocities
    if params.bound_policy is BoundPolicy.REPAIR_SORT_CLAMP:
        state.positions = repair_angles(state.positions)
    costs = _evaluate(problem, state.positions, params.bound_policy)
    improved = costs < state.pbest_cost
    state.pbest_pos[improved] = state.positions[improved]
    state.pbest_cost[improved] = costs[improved]
    gi = int(np.argmin(state.pbest_cost))
    if state.pbest_cost[gi] < state.gbest_cost:
        state.gbest_pos = state.pbest_pos[gi].copy()
        state.gbest_cost = float(state.pbest_cost[gi])
    state.iteration += 1
    return state


def _round_inertia(params: PsoParams, it: int) -> float:
    if params.inertia_final is None:
        return params.inertia
    if params.max_iterations == 1:
        return params.inertia
    frac = it / (params.max_iterations - 1)
    return params.inertia + (params.inertia_final - params.inertia) * frac


def solve(problem: SheProblem, params: PsoParams | None = None) -> SolveResult:
    """Minimize the weighted SHE cost over ordered switching angles.

    Runs `restarts` independent swarms. Each starts on the full domain and is
    then re-initialized `zoom_rounds - 1` times in a shrinking box around its
    own incumbent, which refines through the narrow valley that the
    fundamental-tracking weight creates. Every round stops on the convergence
    tolerance or after `stall_iterations` iterations without improvement.
    The best-ever position is repaired to a valid angle vector and its cost
    re-evaluated, so best_cost always equals cost(problem, angles).
    """
    if params is None:
        params = PsoParams()
    rng = np.random.default_rng(params.seed)
    dims = problem.cfg.cells

    best_pos: np.ndarray | None = None
    best_cost = math.inf
    trace: list[tuple[int, float]] = []
    total_steps = 0

    for _restart in range(params.restarts):
        center: np.ndarray | None = None
        radius = HALF_PI
        vclamp = params.velocity_clamp
        incumbent_pos: np.ndarray | None = None
        incumbent_cost = math.inf
        for _round in range(params.zoom_rounds):
            if center is None:
                state = _init_in_box(problem, params, rng, 0.0, HALF_PI, vclamp)
            else:
                lo = np.maximum(ANGLE_EPS, center - radius)
                hi = np.minimum(HALF_PI - ANGLE_EPS, center + radius)
                state = _init_in_box(problem, params, rng, lo, hi, vclamp)
            if state.gbest_cost < best_cost:
                best_pos = state.gbest_pos.copy()
                best_cost = state.gbest_cost
            trace.append((total_steps, best_cost))
            # stall counts iterations without improvement of this round's own best
            stall = 0
            for it in range(params.max_iterations):
                before = state.gbest_cost
                step(state, problem, params, inertia=_round_inertia(params, it))
                total_steps += 1
                stall = 0 if state.gbest_cost < before else stall + 1
                if state.gbest_cost < best_cost:
                    best_pos = state.gbest_pos.copy()
                    best_cost = state.gbest_cost
                trace.append((total_steps, best_cost))
                if state.gbest_cost < params.convergence_tol or stall >= params.stall_iterations:
                    break
            if state.gbest_cost < incumbent_cost:
                incumbent_pos = state.gbest_pos.copy()
                incumbent_cost = state.gbest_cost
            center = incumbent_pos
            radius *= params.zoom_shrink
            vclamp = max(vclamp * params.zoom_shrink, 1e-6)
            if incumbent_cost < params.convergence_tol:
                break
        if best_cost < params.convergence_tol:
            break

    assert best_pos is not None
    final = repair_angles(best_pos.reshape(1, dims))[0]
    angles = SwitchingAngles(tuple(float(a) for a in final))
    final_cost = float(cost_batch(problem, final[None, :])[0])
    res = residuals(problem, angles)
    return SolveResult(
        angles=angles,
        best_cost=final_cost,
        residuals=res,
        feasible=is_feasible(problem, res),
        iterations_used=total_steps,
        convergence_trace=tuple(trace),
        seed=params.seed,
        params_echo=params,
    )


def grid_oracle(problem: SheProblem, resolution: float,
                eval_budget: int = 100_000_000) -> SolveResult:
    """Exhaustive cost evaluation on every strictly increasing angle tuple of
    the uniform grid {resolution, 2*resolution, ...} below pi/2.

    An independent brute-force check for the swarm solver: on matching
    problems the solver's best cost must not exceed the grid optimum. Guarded
    to small instances (cells <= 4) and resolutions of at least 0.1 degree.
    """
    dims = problem.cfg.cells
    if dims > 4:
        raise ValueError(f"grid oracle supports at most 4 cells, got {dims}")
    if resolution < _MIN_RESOLUTION - 1e-15:
        raise ValueError(
            f"resolution must be >= 0.1 degree ({_MIN_RESOLUTION:.6f} rad), got {resolution}"
        )
    n_points = int((HALF_PI - 1e-12) // resolution)
    if n_points < dims:
        raise ValueError("grid too coarse: fewer points than angle dimensions")
    predicted = math.comb(n_points, dims)
    if predicted > eval_budget:
        raise ValueError(
            f"predicted evaluation count {predicted} exceeds budget {eval_budget}"
        )
    points = resolution * np.arange(1, n_points + 1)

    best_cost = math.inf
    best_idx: np.ndarray | None = None
    evaluated = 0
    chunk_size = 200_000
    combo_iter = itertools.combinations(range(n_points), dims)
    row_dtype = np.dtype((np.int64, dims))
    while True:
        chunk = np.fromiter(itertools.islice(combo_iter, chunk_size), dtype=row_dtype)
        if chunk.size == 0:
            break
        chunk = chunk.reshape(-1, dims)
        costs = cost_batch(problem, points[chunk])
        i = int(np.argmin(costs))
        if costs[i] < best_cost:
            best_cost = float(costs[i])
            best_idx = chunk[i].copy()
        evaluated += len(chunk)

    assert best_idx is not None
    angles = SwitchingAngles(tuple(float(a) for a in points[best_idx]))
    res = residuals(problem, angles)
    return SolveResult(
        angles=angles,
        best_cost=best_cost,
        residuals=res,
        feasible=is_feasible(problem, res),
        iterations_used=evaluated,
        convergence_trace=((evaluated, best_cost),),
        seed=0,
        params_echo=None,
    )
