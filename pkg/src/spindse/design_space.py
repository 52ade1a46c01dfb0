"""Architecture design space: variables, validity rules, enumeration, distance.

An architecture is a point in a 13-variable space (gate parallelization
booleans, per-gate-type parallelization caps, single-qubit and Z-rotation
implementations, coupling degree, router choice, SWAP replacement).  Not
every combination is physically meaningful; a declarative rule set filters
the cross-product down to the valid space.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property, reduce
from importlib import resources
from typing import Iterator, Mapping, Sequence

import numpy as np


class SingleQubitImpl(IntEnum):
    """Single-qubit drive scheme.  Codes follow the usual device convention."""

    SEQUENTIAL = 0
    LOCAL = 1
    GLOBAL = 2
    SEMI_GLOBAL = 3


class ZRotImpl(IntEnum):
    SHUTTLE_BASED = 0
    PULSE_BASED = 1


class RouterKind(IntEnum):
    SHUTTLE_BASED_SWAP = 0
    SNAKE = 1


# Declared variable order.  Enumeration, dense ids, crossover points and the
# ant-walk prefix tree all follow it.
VARIABLE_ORDER = (
    "xy_z",
    "xy_tqg",
    "z_tqg",
    "xy_z_tqg",
    "xyD",
    "zD",
    "tqgD",
    "sD",
    "single_qubit_impl",
    "z_rot_impl",
    "degree",
    "router",
    "swap_opt",
)

CAP_DOMAIN = (-1, 1, 25, 50, 75, 100)

# Canonical ordered domains.  The position of a value inside its domain is the
# index used by `distance`; note single_qubit_impl is ordered by achievable
# parallelism, not by its numeric code.
FULL_DOMAINS: dict[str, tuple] = {
    "xy_z": (0, 1),
    "xy_tqg": (0, 1),
    "z_tqg": (0, 1),
    "xy_z_tqg": (0, 1),
    "xyD": CAP_DOMAIN,
    "zD": CAP_DOMAIN,
    "tqgD": CAP_DOMAIN,
    "sD": CAP_DOMAIN,
    "single_qubit_impl": (
        SingleQubitImpl.SEQUENTIAL,
        SingleQubitImpl.SEMI_GLOBAL,
        SingleQubitImpl.LOCAL,
        SingleQubitImpl.GLOBAL,
    ),
    "z_rot_impl": (ZRotImpl.SHUTTLE_BASED, ZRotImpl.PULSE_BASED),
    "degree": (4, 6, 8),
    "router": (RouterKind.SHUTTLE_BASED_SWAP, RouterKind.SNAKE),
    "swap_opt": (0, 1),
}

_FIELD_POS = {name: i for i, name in enumerate(VARIABLE_ORDER)}
_CANON_INDEX = {
    name: {int(v): i for i, v in enumerate(dom)} for name, dom in FULL_DOMAINS.items()
}

_ENUM_FIELDS = {
    "single_qubit_impl": SingleQubitImpl,
    "z_rot_impl": ZRotImpl,
    "router": RouterKind,
}

_ENUM_NAMES = {
    "single_qubit_impl": {
        SingleQubitImpl.SEQUENTIAL: "Sequential",
        SingleQubitImpl.LOCAL: "Local",
        SingleQubitImpl.GLOBAL: "Global",
        SingleQubitImpl.SEMI_GLOBAL: "Semi-Global",
    },
    "z_rot_impl": {
        ZRotImpl.SHUTTLE_BASED: "ShuttleBased",
        ZRotImpl.PULSE_BASED: "PulseBased",
    },
    "router": {
        RouterKind.SHUTTLE_BASED_SWAP: "ShuttleBasedSwap",
        RouterKind.SNAKE: "Snake",
    },
}
_NAME_VALUES = {
    field: {name: value for value, name in names.items()}
    for field, names in _ENUM_NAMES.items()
}


class DomainError(ValueError):
    """A field carries a value outside its declared domain."""

    def __init__(self, field: str, value) -> None:
        self.field = field
        self.value = value
        super().__init__(f"value {value!r} not in the domain of {field!r}")


def parse_value(field: str, text: str):
    """Parse one field value from its textual form (enum name or integer)."""
    text = text.strip()
    if field in _NAME_VALUES and text in _NAME_VALUES[field]:
        return _NAME_VALUES[field][text]
    try:
        raw = int(text)
    except ValueError:
        raise DomainError(field, text) from None
    if field in _ENUM_FIELDS:
        try:
            return _ENUM_FIELDS[field](raw)
        except ValueError:
            raise DomainError(field, raw) from None
    return raw


def format_value(field: str, value) -> str:
    if field in _ENUM_NAMES:
        return _ENUM_NAMES[field][value]
    return str(int(value))


@dataclass(frozen=True)
class Architecture:
    """One point of the design space."""

    xy_z: int
    xy_tqg: int
    z_tqg: int
    xy_z_tqg: int
    xyD: int
    zD: int
    tqgD: int
    sD: int
    single_qubit_impl: SingleQubitImpl
    z_rot_impl: ZRotImpl
    degree: int
    router: RouterKind
    swap_opt: int

    def __post_init__(self):
        for field, enum_cls in _ENUM_FIELDS.items():
            object.__setattr__(self, field, enum_cls(getattr(self, field)))

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, name) for name in VARIABLE_ORDER)

    def to_dict(self) -> dict:
        return {name: format_value(name, getattr(self, name)) for name in VARIABLE_ORDER}

    @classmethod
    def from_dict(cls, data: Mapping[str, object]) -> "Architecture":
        values = []
        for name in VARIABLE_ORDER:
            raw = data[name]
            values.append(parse_value(name, str(raw)))
        return cls(*values)

    def replace(self, **changes) -> "Architecture":
        values = {name: getattr(self, name) for name in VARIABLE_ORDER}
        values.update(changes)
        return Architecture(**values)


def index_vector(arch: Architecture) -> tuple[int, ...]:
    """Canonical per-variable domain indices (the coordinates used for distance)."""
    out = []
    for name in VARIABLE_ORDER:
        value = int(getattr(arch, name))
        try:
            out.append(_CANON_INDEX[name][value])
        except KeyError:
            raise DomainError(name, value) from None
    return tuple(out)


def distance(a: Architecture, b: Architecture) -> int:
    """L1 distance between the two index vectors, one unit per domain step."""
    va, vb = index_vector(a), index_vector(b)
    return sum(abs(x - y) for x, y in zip(va, vb))


def arch_id(arch: Architecture) -> int:
    """Dense mixed-radix id over the canonical domains (stable across restrictions)."""
    acc = 0
    for name, idx in zip(VARIABLE_ORDER, index_vector(arch)):
        acc = acc * len(FULL_DOMAINS[name]) + idx
    return acc


def arch_from_id(aid: int) -> Architecture:
    values = []
    for name in reversed(VARIABLE_ORDER):
        dom = FULL_DOMAINS[name]
        aid, idx = divmod(aid, len(dom))
        values.append(dom[idx])
    if aid:
        raise ValueError("architecture id out of range")
    return Architecture(*reversed(values))


# ---------------------------------------------------------------------------
# Rules


@dataclass(frozen=True)
class Rule:
    """If every premise literal holds, the consequence assignments must hold.

    `forces` pins fields to values; `forbids` excludes values.
    """

    rule_id: str
    premise: tuple[tuple[str, int], ...]
    forces: tuple[tuple[str, int], ...] = ()
    forbids: tuple[tuple[str, int], ...] = ()

    def applies(self, arch: Architecture) -> bool:
        return all(int(getattr(arch, f)) == v for f, v in self.premise)

    def satisfied(self, arch: Architecture) -> bool:
        if not self.applies(arch):
            return True
        if any(int(getattr(arch, f)) != v for f, v in self.forces):
            return False
        if any(int(getattr(arch, f)) == v for f, v in self.forbids):
            return False
        return True


@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    violations: tuple[str, ...]


@dataclass(frozen=True)
class RuleSet:
    format_tag: str
    rules: tuple[Rule, ...]

    def validate(self, arch: Architecture) -> ValidationResult:
        """Check `arch` against every rule; the violation list is exhaustive.

        Raises DomainError when a field value is outside its domain.
        """
        index_vector(arch)  # domain check, raises with the offending field
        violated = tuple(r.rule_id for r in self.rules if not r.satisfied(arch))
        return ValidationResult(valid=not violated, violations=violated)

    def compiled_checks(self):
        """Per-rule predicates over raw value tuples, for fast enumeration."""
        checks = []
        for rule in self.rules:
            prem = tuple((_FIELD_POS[f], v) for f, v in rule.premise)
            forces = tuple((_FIELD_POS[f], v) for f, v in rule.forces)
            forbids = tuple((_FIELD_POS[f], v) for f, v in rule.forbids)

            def check(values, _p=prem, _fo=forces, _fb=forbids):
                for pos, v in _p:
                    if values[pos] != v:
                        return True
                for pos, v in _fo:
                    if values[pos] != v:
                        return False
                for pos, v in _fb:
                    if values[pos] == v:
                        return False
                return True

            checks.append(check)
        return checks


_LITERAL_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(!=|=)\s*([^\s,]+)$")


def _parse_literals(text: str, *, allow_forbid: bool):
    equals, forbids = [], []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        m = _LITERAL_RE.match(part)
        if not m:
            raise ValueError(f"cannot parse literal {part!r}")
        field, op, raw = m.groups()
        if field not in FULL_DOMAINS:
            raise ValueError(f"unknown variable {field!r}")
        value = int(parse_value(field, raw))
        if op == "=":
            equals.append((field, value))
        elif not allow_forbid:
            raise ValueError("'!=' is not allowed in a premise")
        else:
            forbids.append((field, value))
    return tuple(equals), tuple(forbids)


def parse_rules(text: str) -> RuleSet:
    """Parse the declarative rule file format (see data/default.rules)."""
    format_tag = None
    rules = []
    current: dict | None = None

    def flush():
        nonlocal current
        if current is None:
            return
        if current.get("premise") is None:
            raise ValueError(f"rule {current['id']!r} is missing an 'if' line")
        if current.get("forces") is None and current.get("forbids") is None:
            raise ValueError(f"rule {current['id']!r} is missing a 'then' line")
        rules.append(
            Rule(
                rule_id=current["id"],
                premise=current["premise"],
                forces=current.get("forces") or (),
                forbids=current.get("forbids") or (),
            )
        )
        current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("format:"):
                format_tag = line.split(":", 1)[1].strip()
            elif line.startswith("rule "):
                flush()
                current = {"id": line[5:].strip()}
            elif line.startswith("if "):
                if current is None:
                    raise ValueError("'if' outside a rule block")
                premise, forbids = _parse_literals(line[3:], allow_forbid=False)
                if forbids:
                    raise ValueError("premises must use '='")
                current["premise"] = premise
            elif line.startswith("then "):
                if current is None:
                    raise ValueError("'then' outside a rule block")
                forces, forbids = _parse_literals(line[5:], allow_forbid=True)
                current["forces"] = forces
                current["forbids"] = forbids
            else:
                raise ValueError(f"unrecognized line {line!r}")
        except ValueError as exc:
            raise ValueError(f"rules file, line {lineno}: {exc}") from None
    flush()
    if format_tag is None:
        raise ValueError("rules file is missing a 'format:' tag")
    return RuleSet(format_tag=format_tag, rules=tuple(rules))


def serialize_rules(rule_set: RuleSet) -> str:
    lines = [f"format: {rule_set.format_tag}", ""]
    for rule in rule_set.rules:
        lines.append(f"rule {rule.rule_id}")
        lines.append(
            "if " + ", ".join(f"{f}={format_value(f, v)}" for f, v in rule.premise)
        )
        parts = [f"{f}={format_value(f, v)}" for f, v in rule.forces]
        parts += [f"{f}!={format_value(f, v)}" for f, v in rule.forbids]
        lines.append("then " + ", ".join(parts))
        lines.append("")
    return "\n".join(lines)


def parse_domains(text: str) -> dict[str, tuple]:
    """Parse the ordered-domains file; values must come from the canonical sets."""
    format_tag = None
    domains: dict[str, tuple] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("format:"):
            format_tag = line.split(":", 1)[1].strip()
            continue
        if ":" not in line:
            raise ValueError(f"domains file, line {lineno}: expected 'var: v1, v2'")
        name, rest = line.split(":", 1)
        name = name.strip()
        if name not in FULL_DOMAINS:
            raise ValueError(f"domains file, line {lineno}: unknown variable {name!r}")
        values = tuple(parse_value(name, v) for v in rest.split(",") if v.strip())
        if len(set(values)) != len(values):
            raise ValueError(f"domains file, line {lineno}: duplicate values")
        for v in values:
            if int(v) not in _CANON_INDEX[name]:
                raise DomainError(name, v)
        domains[name] = values
    if format_tag is None:
        raise ValueError("domains file is missing a 'format:' tag")
    missing = [n for n in VARIABLE_ORDER if n not in domains]
    if missing:
        raise ValueError(f"domains file does not cover: {', '.join(missing)}")
    return domains


# ---------------------------------------------------------------------------
# Design space

# Spaces at or below this size enumerate the valid set once and reuse it for
# sampling; larger spaces fall back to rejection sampling.  Keyed off
# valid_count only, so a given space always takes the same code path.
_MATERIALIZE_LIMIT = 20_000


@dataclass(frozen=True)
class DesignSpace:
    """Ordered variable domains plus the rule set that filters them."""

    domains: Mapping[str, tuple]
    rule_set: RuleSet

    def __post_init__(self):
        object.__setattr__(
            self, "domains", {name: tuple(self.domains[name]) for name in VARIABLE_ORDER}
        )

    @property
    def total_combinations(self) -> int:
        return int(np.prod([len(d) for d in self.domains.values()], dtype=object))

    def restrict(self, restrictions: Mapping[str, Sequence]) -> "DesignSpace":
        """Narrow some variable domains (values keep their declared order)."""
        domains = dict(self.domains)
        for name, values in restrictions.items():
            if name not in FULL_DOMAINS:
                raise ValueError(f"unknown variable {name!r}")
            tup = tuple(values)
            if not tup:
                raise ValueError(f"empty restriction for {name!r}")
            for v in tup:
                if int(v) not in _CANON_INDEX[name]:
                    raise DomainError(name, v)
            domains[name] = tuple(
                v for v in self.domains[name] if int(v) in {int(x) for x in tup}
            )
            if not domains[name]:
                raise ValueError(f"restriction for {name!r} excludes every value")
        return DesignSpace(domains=domains, rule_set=self.rule_set)

    def validate(self, arch: Architecture) -> ValidationResult:
        return self.rule_set.validate(arch)

    def enumerate_architectures(self) -> Iterator[Architecture]:
        """Yield valid architectures in lexicographic (declared) order."""
        checks = self.rule_set.compiled_checks()
        for combo in itertools.product(*self.domains.values()):
            values = tuple(int(v) for v in combo)
            if all(chk(values) for chk in checks):
                yield Architecture(*combo)

    def count_valid(self) -> int:
        """Exhaustive validation of the cross-product, vectorized over index grids."""
        dims = [len(self.domains[name]) for name in VARIABLE_ORDER]
        grids = np.meshgrid(*[np.arange(n) for n in dims], indexing="ij", sparse=True)
        codes = {
            name: np.asarray([int(v) for v in self.domains[name]])[grid]
            for name, grid in zip(VARIABLE_ORDER, grids)
        }
        mask = np.ones(tuple(dims), dtype=bool)
        for rule in self.rule_set.rules:
            prem = reduce(
                np.logical_and,
                (codes[f] == v for f, v in rule.premise),
                np.bool_(True),
            )
            ok = np.bool_(True)
            for f, v in rule.forces:
                ok = ok & (codes[f] == v)
            for f, v in rule.forbids:
                ok = ok & (codes[f] != v)
            mask &= ~prem | ok
        return int(mask.sum())

    @cached_property
    def valid_count(self) -> int:
        return self.count_valid()

    @cached_property
    def _valid_list(self) -> tuple[Architecture, ...]:
        return tuple(self.enumerate_architectures())

    def valid_architectures(self) -> tuple[Architecture, ...]:
        return self._valid_list

    def valid_ids(self) -> tuple[int, ...]:
        return tuple(arch_id(a) for a in self._valid_list)

    def sample_uniform(self, rng: np.random.Generator, budget: int = 10_000) -> Architecture:
        """Uniform draw from the valid set (rejection over the cross-product)."""
        if self.valid_count == 0:
            raise ValueError("the valid space is empty")
        if self.valid_count <= _MATERIALIZE_LIMIT:
            pool = self._valid_list
            return pool[int(rng.integers(len(pool)))]
        order = list(self.domains.values())
        checks = self.rule_set.compiled_checks()
        for _ in range(budget):
            combo = tuple(dom[int(rng.integers(len(dom)))] for dom in order)
            values = tuple(int(v) for v in combo)
            if all(chk(values) for chk in checks):
                return Architecture(*combo)
        # Extremely restrictive rule sets can defeat rejection sampling.
        pool = self._valid_list
        if not pool:
            raise ValueError("the valid space is empty")
        return pool[int(rng.integers(len(pool)))]

    def sample_at_distance(
        self,
        center: Architecture,
        dist: int,
        rng: np.random.Generator,
        budget: int = 10_000,
    ) -> Architecture | None:
        """Uniform draw among valid architectures at exactly `dist` from `center`.

        Returns None when the shell is empty (small spaces) or the rejection
        budget runs out (large spaces).
        """
        if dist <= 0:
            return None
        if self.valid_count <= _MATERIALIZE_LIMIT:
            shell = [a for a in self._valid_list if distance(a, center) == dist]
            if not shell:
                return None
            return shell[int(rng.integers(len(shell)))]
        for _ in range(budget):
            cand = self.sample_uniform(rng)
            if distance(cand, center) == dist:
                return cand
        return None


# ---------------------------------------------------------------------------
# Packaged defaults


def _read_data(name: str) -> str:
    return resources.files("spindse.data").joinpath(name).read_text(encoding="utf-8")


def default_rule_set() -> RuleSet:
    return parse_rules(_read_data("default.rules"))


def default_domains() -> dict[str, tuple]:
    return parse_domains(_read_data("default.domains"))


def default_design_space(
    rules: RuleSet | None = None, domains: Mapping[str, tuple] | None = None
) -> DesignSpace:
    return DesignSpace(
        domains=domains or default_domains(),
        rule_set=rules if rules is not None else default_rule_set(),
    )


def load_rules(path) -> RuleSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_rules(fh.read())


def load_domains(path) -> dict[str, tuple]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_domains(fh.read())
