"""Coefficient distributions and reproducible random streams."""

import math
from enum import Enum
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

_U64 = 1 << 64


class AtomKind(str, Enum):
    """Family of the coefficient distribution."""

    TYPE_I = "typeI"
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    CUSTOM = "custom"


class Atom(BaseModel):
    """Distribution of the iid coefficients of a Kac polynomial.

    Type I atoms are uniform on {+-1, ..., +-N}. The continuous uniform atom is
    scaled to half-width sqrt(3) so its variance is 1. Custom atoms carry an
    integer value table with exact rational probabilities.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: AtomKind = Field(..., description="Distribution family")
    N: Optional[int] = Field(None, description="Type I parameter")
    values: Tuple[int, ...] = Field(default=(), description="Custom support")
    probabilities: Tuple[Fraction, ...] = Field(
        default=(), description="Custom probabilities, aligned with values"
    )
    label: str = Field(default="", description="Display label")
    type2_p: Optional[float] = Field(
        None, description="Density integrability exponent, metadata only"
    )
    type2_eps0: Optional[float] = Field(
        None, description="Moment exponent excess, metadata only"
    )

    @field_validator("probabilities", mode="before")
    @classmethod
    def _exact_probabilities(cls, v: Tuple) -> Tuple[Fraction, ...]:
        return tuple(Fraction(p) for p in v)

    @model_validator(mode="after")
    def _check_invariants(self) -> "Atom":
        if self.kind is AtomKind.TYPE_I:
            if self.N is None or self.N < 1:
                raise ValueError("Type I atoms need a positive integer N")
        if self.kind is AtomKind.CUSTOM:
            if not self.values or len(self.values) != len(self.probabilities):
                raise ValueError("custom atom needs aligned values and probabilities")
            if 0 in self.values:
                raise ValueError("custom atom support must exclude 0")
            if len(set(self.values)) != len(self.values):
                raise ValueError("custom atom values must be distinct")
            if any(p <= 0 for p in self.probabilities):
                raise ValueError("custom atom probabilities must be positive")
            if sum(self.probabilities) != 1:
                raise ValueError("custom atom probabilities must sum to 1")
            if math.lcm(*(p.denominator for p in self.probabilities)) >= 1 << 62:
                raise ValueError("custom atom probability denominators are too large")
            mean = sum(v * p for v, p in zip(self.values, self.probabilities))
            if mean != 0:
                raise ValueError(f"custom atom must have mean 0, got {mean}")
        return self

    @classmethod
    def type_one(cls, N: int = 1) -> "Atom":
        label = "bernoulli" if N == 1 else f"typeI:{N}"
        return cls(kind=AtomKind.TYPE_I, N=N, label=label)

    @classmethod
    def gaussian(cls) -> "Atom":
        return cls(kind=AtomKind.GAUSSIAN, label="gaussian")

    @classmethod
    def uniform(cls, p: Optional[float] = None, eps0: Optional[float] = None) -> "Atom":
        return cls(kind=AtomKind.UNIFORM, label="uniform", type2_p=p, type2_eps0=eps0)

    @classmethod
    def custom(cls, table: dict, label: str = "custom") -> "Atom":
        items = sorted(table.items())
        return cls(
            kind=AtomKind.CUSTOM,
            values=tuple(int(v) for v, _ in items),
            probabilities=tuple(Fraction(p) for _, p in items),
            label=label,
        )

    @property
    def is_discrete(self) -> bool:
        """Whether samples are exact integers."""
        return self.kind in (AtomKind.TYPE_I, AtomKind.CUSTOM)

    def support(self) -> Tuple[int, ...]:
        """Sorted integer support of a discrete atom."""
        if self.kind is AtomKind.TYPE_I:
            assert self.N is not None
            return tuple(range(-self.N, 0)) + tuple(range(1, self.N + 1))
        if self.kind is AtomKind.CUSTOM:
            return self.values
        raise ValueError(f"{self.label} atom has no discrete support")

    def __str__(self) -> str:
        return self.label or self.kind.value


UNIFORM_HALF_WIDTH = math.sqrt(3.0)


def stream_seed(master_seed: int, *tags: int) -> int:
    """Derive an independent 64-bit seed from a master seed and integer tags."""
    entropy = [master_seed % _U64] + [int(t) % _U64 for t in tags]
    state = np.random.SeedSequence(entropy).generate_state(1, np.uint64)
    return int(state[0])


class RngSpec(BaseModel):
    """Counter-based random stream keyed by (seed, trial, counter).

    The Philox key is the 128-bit pair (seed, trial) and the draw counter is
    the generator's starting counter, so the sample stream is a pure function
    of the three fields and independent of execution order.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(..., description="64-bit master seed")
    trial: int = Field(default=0, ge=0, description="Trial index")
    counter: int = Field(default=0, ge=0, description="Starting draw counter")

    @field_validator("seed")
    @classmethod
    def _wrap_seed(cls, v: int) -> int:
        return v % _U64

    def generator(self) -> np.random.Generator:
        """Fresh numpy Generator positioned at this spec's counter."""
        key = self.seed | ((self.trial % _U64) << 64)
        return np.random.Generator(np.random.Philox(key=key, counter=self.counter))

    def advanced(self, draws: int) -> "RngSpec":
        """Spec for the block of draws starting ``draws`` counter steps later."""
        return self.model_copy(update={"counter": self.counter + draws})
