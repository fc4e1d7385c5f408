"""A deterministic synthetic stand-in for a molecular domain.

Instances are short strings over a SMILES-like alphabet.  Atoms carry a
mass; ``(`` ``)`` open and close a branch and ``=`` marks a double bond.  The
three built-in factors are closed-form functions of token composition so that
searches over this domain have an exact, cheap oracle:

``molwt``
    sum of atom masses.
``affinity``
    ``6.5 + 3.5 * tanh(4 (z - 0.75))`` where ``z`` weighs the heteroatom
    fractions and the branch count; always inside [3, 10].
``sas``
    ``7 * (1 - exp(-(len/60 + 0.4 * branches + 0.25 * doubles) / 3))``;
    always inside [0, 7].

Real scoring tools plug in through :class:`SubprocessAdapter`.
"""
from __future__ import annotations

import functools
import logging
import math
import subprocess
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .._random import as_generator
from ..exceptions import AdapterError, FactorUndefined
from ..hypothesis import Background, Direction, FactorSpecification
from ..intervals import IntervalVector

log = logging.getLogger(__name__)

ATOM_MASSES: Mapping[str, int] = {"C": 12, "N": 14, "O": 16, "F": 19, "P": 31, "S": 32}
STRUCTURAL = "()="
ALPHABET = frozenset(ATOM_MASSES) | frozenset(STRUCTURAL)

# default search bounds and optimisation hints
DEFAULT_BOUNDS = {"affinity": (3.0, 10.0), "molwt": (200.0, 700.0), "sas": (0.0, 7.0)}
DEFAULT_DIRECTIONS = {"affinity": Direction.MAXIMIZE, "molwt": Direction.FREE, "sas": Direction.MINIMIZE}


@dataclass(frozen=True)
class Features:
    length: int
    atoms: int
    counts: tuple[tuple[str, int], ...]
    branches: int
    doubles: int

    def count(self, atom: str) -> int:
        return dict(self.counts).get(atom, 0)


def _parse(text: str) -> Optional[Features]:
    if not text or any(ch not in ALPHABET for ch in text):
        return None
    depth = 0
    prev = ""
    for ch in text:
        if ch == "(":
            if prev in ("", "(", "="):
                return None
            depth += 1
        elif ch == ")":
            if prev in ("(", "="):
                return None
            depth -= 1
            if depth < 0:
                return None
        elif ch == "=":
            if prev in ("", "="):
                return None
        prev = ch
    if depth != 0 or prev == "=":
        return None
    counts = {a: text.count(a) for a in ATOM_MASSES if a in text}
    n_atoms = sum(counts.values())
    if n_atoms == 0:
        return None
    return Features(len(text), n_atoms, tuple(sorted(counts.items())), text.count("("), text.count("="))


@dataclass(frozen=True, order=True)
class SyntheticInstance:
    text: str

    @functools.cached_property
    def features(self) -> Optional[Features]:
        """Parsed composition, or ``None`` for an invalid string."""
        return _parse(self.text)

    @property
    def valid(self) -> bool:
        return self.features is not None

    def __str__(self) -> str:
        return self.text


def _features(x) -> Features:
    if isinstance(x, str):
        x = SyntheticInstance(x)
    feats = x.features
    if feats is None:
        raise FactorUndefined(f"invalid token string {x.text!r}")
    return feats


def weight_like(x) -> float:
    f = _features(x)
    return float(sum(ATOM_MASSES[a] * n for a, n in f.counts))


def affinity_like(x) -> float:
    f = _features(x)
    z = (
        2.0 * f.count("N") + 1.5 * f.count("O") + 3.0 * f.count("S") + 0.8 * f.count("F") - 0.5 * f.count("P")
    ) / f.atoms + 0.05 * f.branches
    return 6.5 + 3.5 * math.tanh(4.0 * (z - 0.75))


def sas_like(x) -> float:
    f = _features(x)
    load = f.length / 60.0 + 0.4 * f.branches + 0.25 * f.doubles
    return 7.0 * (1.0 - math.exp(-load / 3.0))


FACTORS = {"molwt": weight_like, "affinity": affinity_like, "sas": sas_like}


def compute_factor(name: str, x) -> float:
    try:
        fn = FACTORS[name]
    except KeyError:
        raise KeyError(f"unknown factor {name!r}") from None
    return fn(x)


def tokens(x) -> frozenset:
    """Unigrams and adjacent bigrams of the token string."""
    text = x.text if isinstance(x, SyntheticInstance) else str(x)
    return frozenset(text) | frozenset(text[i:i + 2] for i in range(len(text) - 1))


def jaccard_novelty(x, known: Iterable) -> float:
    """Mean Jaccard similarity between ``x`` and each known instance (lower is more novel)."""
    known = list(known)
    if not known:
        raise ValueError("the known set is empty")
    tx = tokens(x)
    total = 0.0
    for k in known:
        tk = tokens(k)
        union = tx | tk
        total += len(tx & tk) / len(union) if union else 1.0
    return total / len(known)


# ---------------------------------------------------------------- universe

_ATOMS = np.array(list(ATOM_MASSES))
_ATOM_P = np.array([0.55, 0.12, 0.15, 0.08, 0.04, 0.06])  # C N O F P S


def random_instance(rng=None, min_atoms: int = 15, max_atoms: int = 52) -> SyntheticInstance:
    rng = as_generator(rng)
    n = int(rng.integers(min_atoms, max_atoms + 1))
    out: list[str] = []
    depth = 0
    open_len = 0
    for i in range(n):
        if i > 0 and rng.random() < 0.08 and out[-1] not in "(=":
            out.append("=")
        out.append(str(rng.choice(_ATOMS, p=_ATOM_P)))
        open_len += 1
        if depth and open_len >= 2 and rng.random() < 0.35:
            out.append(")")
            depth -= 1
        elif depth < 2 and i < n - 2 and rng.random() < 0.10:
            out.append("(")
            depth += 1
            open_len = 0
    if out[-1] == "(":
        out.pop()
        depth -= 1
    out.extend(")" * depth)
    return SyntheticInstance("".join(out))


def random_universe(size: int, seed=0, **kwargs) -> tuple[str, ...]:
    """``size`` distinct valid encodings, deterministic under ``seed``."""
    rng = as_generator(seed)
    seen: dict[str, None] = {}
    while len(seen) < size:
        x = random_instance(rng, **kwargs)
        if x.valid:
            seen.setdefault(x.text, None)
    return tuple(seen)


def decode(text: str) -> Optional[SyntheticInstance]:
    text = text.strip()
    return SyntheticInstance(text) if text else None


def default_spec(names: Sequence[str] = ("affinity", "molwt", "sas")) -> FactorSpecification:
    return FactorSpecification(
        tuple(names),
        IntervalVector(DEFAULT_BOUNDS[n] for n in names),
        tuple(DEFAULT_DIRECTIONS[n] for n in names),
    )


def background(universe: Optional[Sequence[str]] = None, extra_factors: Optional[Mapping] = None) -> Background:
    """Background with the built-in factors; invalid strings decode but have no factor values."""
    factors = dict(FACTORS)
    factors.update(extra_factors or {})
    return Background(factors=factors, decode=decode, encode=str, universe=universe)


# ---------------------------------------------------------------- adapter


class SubprocessAdapter:
    """Batch factor computation through an external command.

    The command is run once per batch with the factor name appended as its
    final argument.  Instance encodings go to stdin, one per line; stdout
    holds ``encoding<TAB>value`` or ``encoding<TAB>ERR`` lines.  A missing
    line or ``ERR`` leaves that encoding undefined; a nonzero exit status
    fails the whole batch with :class:`AdapterError`.
    """

    def __init__(self, command: Sequence[str], timeout: float = 600.0):
        self.command = list(command)
        self.timeout = timeout

    def invoke(self, factor: str, encodings: Sequence[str]) -> dict[str, Optional[float]]:
        payload = "".join(e + "\n" for e in encodings)
        proc = subprocess.run(
            self.command + [factor], input=payload, capture_output=True, text=True, timeout=self.timeout
        )
        if proc.returncode != 0:
            raise AdapterError(f"{self.command[0]} exited with {proc.returncode}: {proc.stderr.strip()}")
        out: dict[str, Optional[float]] = {e: None for e in encodings}
        for line in proc.stdout.splitlines():
            enc, sep, value = line.rpartition("\t")
            if not sep or enc not in out:
                continue
            try:
                out[enc] = None if value.strip() == "ERR" else float(value)
            except ValueError:
                out[enc] = None
        return out


class AdapterFactor:
    """A per-instance factor function backed by a batching adapter.

    ``prefetch`` computes uncached instances in batches of ``batch_size``;
    a failed batch leaves its instances undefined rather than raising.
    """

    def __init__(self, adapter: SubprocessAdapter, name: str, batch_size: int = 64):
        self.adapter = adapter
        self.name = name
        self.batch_size = batch_size
        self._cache: dict[str, Optional[float]] = {}

    def prefetch(self, instances: Iterable) -> None:
        todo = list(dict.fromkeys(str(x) for x in instances if str(x) not in self._cache))
        for start in range(0, len(todo), self.batch_size):
            batch = todo[start:start + self.batch_size]
            try:
                self._cache.update(self.adapter.invoke(self.name, batch))
            except (AdapterError, OSError, subprocess.TimeoutExpired) as exc:
                log.warning("adapter batch for %s failed: %s", self.name, exc)
                self._cache.update({e: None for e in batch})

    def __call__(self, x) -> Optional[float]:
        key = str(x)
        if key not in self._cache:
            self.prefetch([key])
        value = self._cache[key]
        if value is None:
            raise FactorUndefined(f"{self.name} undefined for {key!r}")
        return value
