"""Search policies over the valid architecture space.

Five methods (random sampling, simulated annealing, surrogate/Bayesian
search, a genetic algorithm and ant colony optimization) share one driver
loop: evaluate a population through a memoizing evaluator, track the best
architecture, and stop on a termination condition.  Everything is seeded;
identical (preset, seed, space, circuit) inputs reproduce identical runs.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import gp
from .circuit_ir import Circuit
from .compiler import CompileError, compile_circuit, verify
from .design_space import (
    Architecture,
    DesignSpace,
    FULL_DOMAINS,
    VARIABLE_ORDER,
    arch_from_id,
    arch_id,
    index_vector,
)
from .esp import EspBreakdown, esp_breakdown
from .noise import NoiseConfig


class OptimizerError(RuntimeError):
    pass


def rng_stream(seed: int, label: str) -> np.random.Generator:
    """Independent, reproducible generator derived from a master seed and label."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return np.random.default_rng(
        np.random.SeedSequence([seed, int.from_bytes(digest[:8], "big")])
    )


# ---------------------------------------------------------------------------
# Evaluation cache


@dataclass(frozen=True)
class EvalOutcome:
    arch_id: int
    log_esp: float  # -inf on compile failure
    breakdown: EspBreakdown | None
    error: str | None = None


class Evaluator:
    """Memoized architecture -> success-probability evaluator.

    A repeated architecture never recompiles: results are cached by dense id
    and only first-time evaluations count as calls.
    """

    def __init__(
        self,
        space: DesignSpace,
        circuit: Circuit,
        config: NoiseConfig,
        verify_each: bool = False,
    ) -> None:
        self.space = space
        self.circuit = circuit
        self.config = config
        self.verify_each = verify_each
        self.unique_calls = 0
        self.cache_hits = 0
        self._cache: dict[int, EvalOutcome] = {}

    @property
    def total_requests(self) -> int:
        return self.unique_calls + self.cache_hits

    def cached(self, aid: int) -> EvalOutcome | None:
        return self._cache.get(aid)

    def evaluate(self, arch: Architecture) -> EvalOutcome:
        aid = arch_id(arch)
        hit = self._cache.get(aid)
        if hit is not None:
            self.cache_hits += 1
            return hit
        self.unique_calls += 1
        try:
            compiled = compile_circuit(self.circuit, arch, self.config)
            if self.verify_each:
                report = verify(self.circuit, compiled)
                if not report.ok:
                    raise CompileError(
                        f"verification failed: {report.issues[0].message}"
                    )
            breakdown = esp_breakdown(compiled, self.config)
            outcome = EvalOutcome(aid, breakdown.total_log_esp, breakdown)
        except CompileError as exc:
            outcome = EvalOutcome(aid, float("-inf"), None, error=str(exc))
        self._cache[aid] = outcome
        return outcome

    def evaluate_id(self, aid: int) -> EvalOutcome:
        return self.evaluate(arch_from_id(aid))


# ---------------------------------------------------------------------------
# Termination


@dataclass(frozen=True)
class TerminationCondition:
    """Stop criteria, checked once per iteration (target first)."""

    target_log_esp: float | None = None
    wall_clock_s: float | None = None
    call_fraction: float | None = None
    max_iterations: int | None = None

    def __post_init__(self):
        if (
            self.target_log_esp is None
            and self.wall_clock_s is None
            and self.call_fraction is None
            and self.max_iterations is None
        ):
            raise ValueError("at least one termination condition must be set")

    def check(
        self,
        *,
        best_log_esp: float,
        unique_calls: int,
        valid_count: int,
        elapsed_s: float,
        iteration: int,
    ) -> str | None:
        if self.target_log_esp is not None and best_log_esp >= self.target_log_esp:
            return "target"
        if (
            self.call_fraction is not None
            and unique_calls >= self.call_fraction * valid_count
        ):
            return "call_fraction"
        if self.wall_clock_s is not None and elapsed_s >= self.wall_clock_s:
            return "wall_clock"
        if self.max_iterations is not None and iteration >= self.max_iterations:
            return "max_iterations"
        return None


# ---------------------------------------------------------------------------
# Presets


PROBABILITY_SCALE = "probability"
NORMALIZED_LOG_SCALE = "normalized_log"


@dataclass(frozen=True)
class OptimizerConfig:
    """One optimization method plus its hyper-parameters.

    The 17 named presets (see PRESET_NAMES) cover: plain random sampling,
    four annealing variants (start temperature x step size), four surrogate
    variants (acquisition x kernel), four genetic variants (population x
    mutation rate) and four ant-colony variants (population x exploitation).
    """

    method: str
    # simulated annealing
    t_start: float = 20.0
    step_size: int = 3
    # surrogate search
    acquisition: str = "EI"  # or "UCB"
    kernel: str = gp.MATERN
    history: int = 300
    candidates: int = 1000
    bo_pop: int = 50
    # genetic algorithm
    pop_size: int = 100
    p_mut: float = 0.2
    elite_frac: float = 0.15
    parent_frac: float = 0.50
    tournament: int = 5
    crossover_frac: float = 0.30
    mutation_frac: float = 0.55
    # ant colony
    p_exploit: float = 0.1
    min_ph: float = 1.0
    max_ph: float = 6.0
    decay: float = 0.10
    # value scale fed to annealing exponents and pheromone deposits
    value_scale: str = PROBABILITY_SCALE

    def label(self) -> str:
        if self.method == "RS":
            return "RS"
        if self.method == "SA":
            return f"SA[{self.t_start:g},{self.step_size}]"
        if self.method == "BO":
            kern = "Ma" if self.kernel == gp.MATERN else "Ga"
            return f"BO[{self.acquisition},{kern}]"
        if self.method == "GA":
            return f"GA[{self.pop_size},{self.p_mut:g}]"
        if self.method == "ACO":
            return f"ACO[{self.pop_size},{self.p_exploit:g}]"
        raise ValueError(f"unknown method {self.method!r}")

    @classmethod
    def preset(cls, name: str, value_scale: str = PROBABILITY_SCALE) -> "OptimizerConfig":
        name = name.strip()
        if name == "RS":
            return cls(method="RS", value_scale=value_scale)
        if "[" not in name or not name.endswith("]"):
            raise ValueError(f"unknown preset {name!r}")
        method, args_text = name[:-1].split("[", 1)
        args = [a.strip() for a in args_text.split(",")]
        if method == "SA" and len(args) == 2:
            return cls(
                method="SA",
                t_start=float(args[0]),
                step_size=int(args[1]),
                value_scale=value_scale,
            )
        if method == "BO" and len(args) == 2:
            kernels = {"Ga": gp.GAUSSIAN, "Ma": gp.MATERN}
            if args[0] not in ("EI", "UCB") or args[1] not in kernels:
                raise ValueError(f"unknown preset {name!r}")
            return cls(
                method="BO",
                acquisition=args[0],
                kernel=kernels[args[1]],
                value_scale=value_scale,
            )
        if method == "GA" and len(args) == 2:
            return cls(
                method="GA",
                pop_size=int(args[0]),
                p_mut=float(args[1]),
                value_scale=value_scale,
            )
        if method == "ACO" and len(args) == 2:
            return cls(
                method="ACO",
                pop_size=int(args[0]),
                p_exploit=float(args[1]),
                value_scale=value_scale,
            )
        raise ValueError(f"unknown preset {name!r}")


PRESET_NAMES = (
    "RS",
    "SA[50,2]",
    "SA[50,3]",
    "SA[20,2]",
    "SA[20,3]",
    "BO[EI,Ga]",
    "BO[EI,Ma]",
    "BO[UCB,Ga]",
    "BO[UCB,Ma]",
    "GA[50,0.15]",
    "GA[50,0.2]",
    "GA[100,0.15]",
    "GA[100,0.2]",
    "ACO[50,0.1]",
    "ACO[50,0.3]",
    "ACO[100,0.1]",
    "ACO[100,0.3]",
)


# ---------------------------------------------------------------------------
# Run records


@dataclass(frozen=True)
class TrajectoryPoint:
    iteration: int
    evaluated_ids: tuple[int, ...]
    best_log_esp: float


@dataclass(frozen=True)
class RunRecord:
    preset: str
    seed: int
    best_id: int
    best_log_esp: float
    best_architecture: dict
    trajectory: tuple[TrajectoryPoint, ...]
    unique_calls: int
    cache_hits: int
    iterations: int
    tc_fired: str
    wall_time_s: float

    def to_dict(self, include_timing: bool = True) -> dict:
        record = {
            "preset": self.preset,
            "seed": self.seed,
            "best": {
                "id": self.best_id,
                "log_esp": self.best_log_esp,
                "architecture": self.best_architecture,
            },
            "unique_calls": self.unique_calls,
            "cache_hits": self.cache_hits,
            "iterations": self.iterations,
            "tc_fired": self.tc_fired,
            "trajectory": [
                {
                    "iteration": p.iteration,
                    "evaluated_ids": list(p.evaluated_ids),
                    "best_log_esp": p.best_log_esp,
                }
                for p in self.trajectory
            ],
        }
        if include_timing:
            record["timing"] = {"wall_time_s": self.wall_time_s}
        return record

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(
            preset=data["preset"],
            seed=data["seed"],
            best_id=data["best"]["id"],
            best_log_esp=data["best"]["log_esp"],
            best_architecture=data["best"]["architecture"],
            trajectory=tuple(
                TrajectoryPoint(
                    p["iteration"], tuple(p["evaluated_ids"]), p["best_log_esp"]
                )
                for p in data["trajectory"]
            ),
            unique_calls=data["unique_calls"],
            cache_hits=data["cache_hits"],
            iterations=data["iterations"],
            tc_fired=data["tc_fired"],
            wall_time_s=data.get("timing", {}).get("wall_time_s", 0.0),
        )


# ---------------------------------------------------------------------------
# Policies


def sa_temperature(t_start: float, i: int) -> float:
    """Linear cooling: the temperature at candidate step i (1-based)."""
    return t_start / i


def sa_accept(delta_value: float, temperature: float, u: float) -> bool:
    """Metropolis-style rule: always accept improvements, otherwise accept
    when exp(delta / T) beats the uniform draw."""
    if delta_value >= 0:
        return True
    return math.exp(delta_value / temperature) > u


def pheromone_deposit(
    delta_i: float, delta_avg: float, min_ph: float = 1.0, max_ph: float = 6.0
) -> float:
    """Deposit for one ant: worse-than-best ants leave the minimum, and gains
    are scaled against the recent average gain (capped at max_ph; a zero
    average maps to the cap)."""
    if delta_i < 0:
        return min_ph
    if delta_avg < 0:
        return max_ph
    if delta_avg == 0:
        return max_ph
    return min(min_ph + (max_ph - min_ph) * (delta_i / delta_avg), max_ph)


class _ValueView:
    """Maps cached log-ESP values onto the scale a policy consumes."""

    def __init__(self, evaluator: Evaluator, scale: str) -> None:
        if scale not in (PROBABILITY_SCALE, NORMALIZED_LOG_SCALE):
            raise ValueError(f"unknown value scale {scale!r}")
        self.evaluator = evaluator
        self.scale = scale
        self.best_log = float("-inf")

    def observe(self, log_esp: float) -> None:
        self.best_log = max(self.best_log, log_esp)

    def value(self, log_esp: float) -> float:
        if log_esp == float("-inf"):
            return 0.0
        if self.scale == PROBABILITY_SCALE:
            return math.exp(log_esp)
        ref = self.best_log if self.best_log > float("-inf") else log_esp
        return math.exp(log_esp - ref)

    def value_of_id(self, aid: int) -> float:
        outcome = self.evaluator.cached(aid)
        return self.value(outcome.log_esp if outcome else float("-inf"))


class RandomSampling:
    """Population of one uniformly drawn valid architecture per iteration."""

    def __init__(self, config, space, evaluator, values, seed):
        self.space = space
        self.evaluator = evaluator
        self.rng = rng_stream(seed, "rs/policy")

    def step(self, iteration: int) -> list[int]:
        arch = self.space.sample_uniform(self.rng)
        return [self.evaluator.evaluate(arch).arch_id]


class SimulatedAnnealing:
    def __init__(self, config, space, evaluator, values, seed):
        self.config = config
        self.space = space
        self.evaluator = evaluator
        self.values = values
        self.rng = rng_stream(seed, "sa/policy")
        self.current: Architecture | None = None
        self.current_log = float("-inf")

    def step(self, iteration: int) -> list[int]:
        if iteration == 1:
            self.current = self.space.sample_uniform(self.rng)
            outcome = self.evaluator.evaluate(self.current)
            self.current_log = outcome.log_esp
            return [outcome.arch_id]
        if self.space.valid_count <= 1:
            return []
        temperature = sa_temperature(self.config.t_start, iteration - 1)
        candidate = None
        for _ in range(200):
            dist = max(1, int(round(self.rng.normal(1.0, 1.0) * self.config.step_size)))
            candidate = self.space.sample_at_distance(self.current, dist, self.rng)
            if candidate is not None:
                break
        if candidate is None:
            return []
        outcome = self.evaluator.evaluate(candidate)
        self.values.observe(outcome.log_esp)
        delta = self.values.value(outcome.log_esp) - self.values.value(self.current_log)
        if sa_accept(delta, temperature, float(self.rng.random())):
            self.current = candidate
            self.current_log = outcome.log_esp
        return [outcome.arch_id]


class BayesianOptimization:
    """GP-surrogate search over the integer index lattice of valid points.

    Candidates are drawn without replacement from the not-yet-observed valid
    architectures, so every scored point already lies on the lattice and
    integer rounding never arises.
    """

    def __init__(self, config, space, evaluator, values, seed):
        self.config = config
        self.space = space
        self.evaluator = evaluator
        self.values = values
        self.rng = rng_stream(seed, "bo/policy")
        self.history: list[int] = []  # insertion order of unique observations
        self.observed: set[int] = set()
        self._vectors = {
            aid: index_vector(arch)
            for aid, arch in zip(space.valid_ids(), space.valid_architectures())
        }

    def _observe(self, ids: Sequence[int]) -> list[int]:
        out = []
        for aid in sorted(ids):
            outcome = self.evaluator.evaluate_id(aid)
            self.values.observe(outcome.log_esp)
            if aid not in self.observed:
                self.observed.add(aid)
                self.history.append(aid)
            out.append(aid)
        return out

    def step(self, iteration: int) -> list[int]:
        valid_ids = self.space.valid_ids()
        if iteration == 1:
            k = min(self.config.bo_pop, len(valid_ids))
            ids = self.rng.choice(np.asarray(valid_ids), size=k, replace=False)
            return self._observe(int(a) for a in ids)
        unsampled = np.asarray([a for a in valid_ids if a not in self.observed])
        if unsampled.size == 0:
            return []
        window = self.history[-self.config.history :]
        x = np.asarray([self._vectors[a] for a in window], dtype=float)
        y = np.asarray([self.values.value_of_id(a) for a in window])
        surrogate = gp.GaussianProcess(self.config.kernel).fit(x, y)
        cand_ids = self.rng.choice(
            unsampled, size=min(self.config.candidates, unsampled.size), replace=False
        )
        xc = np.asarray([self._vectors[int(a)] for a in cand_ids], dtype=float)
        mu, var = surrogate.predict(xc)
        sigma = np.sqrt(var)
        if self.config.acquisition == "EI":
            scores = gp.expected_improvement(mu, sigma, float(y.max()))
        else:
            scores = gp.upper_confidence_bound(mu, sigma)
        ranked = sorted(
            zip(scores.tolist(), (int(a) for a in cand_ids)),
            key=lambda t: (-t[0], t[1]),
        )
        chosen = [aid for _, aid in ranked[: self.config.bo_pop]]
        return self._observe(chosen)


class GeneticAlgorithm:
    """Elite / crossover / mutation generations with tournament parents."""

    RETRY_BUDGET = 10_000

    def __init__(self, config, space, evaluator, values, seed):
        self.config = config
        self.space = space
        self.evaluator = evaluator
        self.values = values
        self.rng = rng_stream(seed, "ga/policy")
        self.population: list[Architecture] = []
        n = config.pop_size
        self.n_elite = int(n * config.elite_frac + 0.5)
        self.n_cross = int(n * config.crossover_frac + 0.5)
        self.n_mut = n - self.n_elite - self.n_cross
        self.n_parents = int(n * config.parent_frac + 0.5)
        self.last_composition: tuple[int, int, int] | None = None

    def composition(self) -> tuple[int, int, int]:
        return (self.n_elite, self.n_cross, self.n_mut)

    def _evaluate_population(self) -> list[int]:
        ids = []
        for arch in self.population:
            outcome = self.evaluator.evaluate(arch)
            self.values.observe(outcome.log_esp)
            ids.append(outcome.arch_id)
        return ids

    def _fitness(self, arch: Architecture) -> float:
        outcome = self.evaluator.cached(arch_id(arch))
        return outcome.log_esp if outcome else float("-inf")

    def _tournament_parents(self) -> list[Architecture]:
        remaining = list(range(len(self.population)))
        parents: list[Architecture] = []
        while remaining and len(parents) < self.n_parents:
            k = min(self.config.tournament, len(remaining))
            picks = self.rng.choice(len(remaining), size=k, replace=False)
            slots = [remaining[int(p)] for p in picks]
            winner = min(
                slots,
                key=lambda s: (-self._fitness(self.population[s]), arch_id(self.population[s]), s),
            )
            parents.append(self.population[winner])
            remaining.remove(winner)
        return parents

    def _crossover_child(self, parents: list[Architecture]) -> Architecture:
        for _ in range(self.RETRY_BUDGET):
            ia, ib = self.rng.choice(len(parents), size=2, replace=False)
            p1, p2 = parents[int(ia)], parents[int(ib)]
            c = int(self.rng.integers(1, len(VARIABLE_ORDER) + 1))
            values = p1.as_tuple()[:c] + p2.as_tuple()[c:]
            child = Architecture(*values)
            if self.space.validate(child).valid:
                return child
        raise OptimizerError("crossover resampling budget exhausted")

    def _mutation_child(self, parents: list[Architecture]) -> Architecture:
        for _ in range(self.RETRY_BUDGET):
            base = parents[int(self.rng.integers(len(parents)))]
            values = list(base.as_tuple())
            for k, name in enumerate(VARIABLE_ORDER):
                if self.rng.random() < self.config.p_mut:
                    dom = self.space.domains[name]
                    values[k] = dom[int(self.rng.integers(len(dom)))]
            child = Architecture(*values)
            if self.space.validate(child).valid:
                return child
        raise OptimizerError("mutation resampling budget exhausted")

    def step(self, iteration: int) -> list[int]:
        if iteration == 1:
            self.population = [
                self.space.sample_uniform(self.rng) for _ in range(self.config.pop_size)
            ]
            return self._evaluate_population()
        ranked = sorted(
            range(len(self.population)),
            key=lambda s: (-self._fitness(self.population[s]), arch_id(self.population[s]), s),
        )
        elites = [self.population[s] for s in ranked[: self.n_elite]]
        parents = self._tournament_parents()
        if len(parents) < 2:
            parents = list(self.population)
        children = [self._crossover_child(parents) for _ in range(self.n_cross)]
        mutants = [self._mutation_child(parents) for _ in range(self.n_mut)]
        self.population = elites + children + mutants
        self.last_composition = (len(elites), len(children), len(mutants))
        return self._evaluate_population()


class _TreeNode:
    __slots__ = ("children", "pheromone")

    def __init__(self) -> None:
        self.children: dict[int, "_TreeNode"] = {}
        self.pheromone: dict[int, float] = {}


def build_architecture_tree(space: DesignSpace, init_ph: float = 1.0) -> _TreeNode:
    """Prefix tree over the index vectors of all valid architectures.

    Keys at depth d are the canonical domain indices of variable d, so the
    construction is order-independent and leaves map one-to-one onto valid
    architectures.  Intended for restricted or moderate spaces: the whole
    valid set is enumerated once.
    """
    root = _TreeNode()
    for arch in space.enumerate_architectures():
        node = root
        for idx in index_vector(arch):
            if idx not in node.children:
                node.children[idx] = _TreeNode()
                node.pheromone[idx] = init_ph
            node = node.children[idx]
    return root


def tree_leaf_count(root: _TreeNode) -> int:
    if not root.children:
        return 1
    return sum(tree_leaf_count(child) for child in root.children.values())


def _arch_from_indices(indices: Sequence[int]) -> Architecture:
    values = [FULL_DOMAINS[name][idx] for name, idx in zip(VARIABLE_ORDER, indices)]
    return Architecture(*values)


class AntColonyOptimization:
    def __init__(self, config, space, evaluator, values, seed):
        self.config = config
        self.space = space
        self.evaluator = evaluator
        self.values = values
        self.rng = rng_stream(seed, "aco/policy")
        self.tree = build_architecture_tree(space, init_ph=config.min_ph)
        self.best_value: float | None = None
        self.gain_history: list[float] = []

    def _walk(self) -> tuple[list[tuple[_TreeNode, int]], tuple[int, ...]]:
        node = self.tree
        path: list[tuple[_TreeNode, int]] = []
        indices: list[int] = []
        while node.children:
            keys = sorted(node.children)
            if len(keys) == 1:
                choice = keys[0]
            elif self.rng.random() < self.config.p_exploit:
                choice = max(keys, key=lambda k: (node.pheromone[k], -k))
            else:
                weights = np.asarray([node.pheromone[k] for k in keys])
                total = weights.sum()
                if total <= 0:
                    choice = keys[int(self.rng.integers(len(keys)))]
                else:
                    choice = keys[int(self.rng.choice(len(keys), p=weights / total))]
            path.append((node, choice))
            indices.append(choice)
            node = node.children[choice]
        return path, tuple(indices)

    def _decay(self, node: _TreeNode) -> None:
        for k, child in node.children.items():
            node.pheromone[k] *= 1.0 - self.config.decay
            self._decay(child)

    def step(self, iteration: int) -> list[int]:
        walks = [self._walk() for _ in range(self.config.pop_size)]
        evaluated: list[int] = []
        ant_values: list[float] = []
        for _, indices in walks:
            outcome = self.evaluator.evaluate(_arch_from_indices(indices))
            self.values.observe(outcome.log_esp)
            evaluated.append(outcome.arch_id)
            ant_values.append(self.values.value(outcome.log_esp))

        # Reference for this iteration's gains: the best value seen in earlier
        # iterations (the first iteration bootstraps against its own best).
        best_before = self.best_value if self.best_value is not None else max(ant_values)
        delta_avg = sum(self.gain_history[-3:]) / 3.0
        for (path, _), value in zip(walks, ant_values):
            amount = pheromone_deposit(
                value - best_before, delta_avg, self.config.min_ph, self.config.max_ph
            )
            for node, key in path:
                node.pheromone[key] += amount
        self._decay(self.tree)

        iteration_best = max(ant_values)
        self.gain_history.append(iteration_best - best_before)
        self.best_value = max(best_before, iteration_best)
        return evaluated


_POLICIES: dict[str, type] = {
    "RS": RandomSampling,
    "SA": SimulatedAnnealing,
    "BO": BayesianOptimization,
    "GA": GeneticAlgorithm,
    "ACO": AntColonyOptimization,
}


def make_policy(
    config: OptimizerConfig, space: DesignSpace, evaluator: Evaluator, seed: int
):
    values = _ValueView(evaluator, config.value_scale)
    cls = _POLICIES.get(config.method)
    if cls is None:
        raise ValueError(f"unknown method {config.method!r}")
    return cls(config, space, evaluator, values, seed)


def run(
    config: OptimizerConfig,
    evaluator: Evaluator,
    tc: TerminationCondition,
    seed: int,
) -> RunRecord:
    """Drive one policy until a termination condition fires."""
    space = evaluator.space
    if space.valid_count == 0:
        raise OptimizerError("the valid architecture space is empty")
    policy = make_policy(config, space, evaluator, seed)
    started = time.perf_counter()
    best_id: int | None = None
    best_log = float("-inf")
    trajectory: list[TrajectoryPoint] = []
    iteration = 0
    fired: str | None = None
    while fired is None:
        iteration += 1
        evaluated = policy.step(iteration)
        for aid in evaluated:
            outcome = evaluator.cached(aid)
            if outcome is not None and outcome.log_esp > best_log:
                best_log = outcome.log_esp
                best_id = aid
        trajectory.append(TrajectoryPoint(iteration, tuple(evaluated), best_log))
        fired = tc.check(
            best_log_esp=best_log,
            unique_calls=evaluator.unique_calls,
            valid_count=space.valid_count,
            elapsed_s=time.perf_counter() - started,
            iteration=iteration,
        )
    if best_id is None:
        raise OptimizerError("no architecture was evaluated before termination")
    return RunRecord(
        preset=config.label(),
        seed=seed,
        best_id=best_id,
        best_log_esp=best_log,
        best_architecture=arch_from_id(best_id).to_dict(),
        trajectory=tuple(trajectory),
        unique_calls=evaluator.unique_calls,
        cache_hits=evaluator.cache_hits,
        iterations=iteration,
        tc_fired=fired,
        wall_time_s=time.perf_counter() - started,
    )
