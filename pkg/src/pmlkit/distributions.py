"""Discrete distributions, channels, and joint models.

Everything here is immutable after construction and validated eagerly:
probability vectors must sum to one (with an explicitly recorded
truncation deficit for laws that were cut down from countable support),
and malformed inputs are rejected rather than renormalized.

Conventions used throughout the package:

* an outcome ``y`` with ``P_Y(y) = 0`` conditions to the prior unchanged
  (so its leakage is zero);
* symbols are ordered and ties downstream always break toward the
  lowest index.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Sequence, Union

import numpy as np
from scipy import stats

from .errors import (
    AlphabetMismatchError,
    UnknownSymbolError,
    UnsupportedLawError,
    ValidationError,
)

Symbol = Union[str, int]

#: absolute tolerance for probability-sum validation
SUM_ATOL = 1e-12
#: coarsest truncation deficit accepted at construction
MAX_DEFICIT = 1e-9


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.asarray(arr, dtype=float).copy()
    out.setflags(write=False)
    return out


@dataclasses.dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of distinct labels (strings or integers)."""

    symbols: tuple

    def __init__(self, symbols: Sequence[Symbol]):
        symbols = tuple(symbols)
        if len(symbols) < 1:
            raise ValidationError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ValidationError("alphabet symbols must be unique")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, symbol: Symbol) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise UnknownSymbolError(f"symbol {symbol!r} not in alphabet") from None

    def __contains__(self, symbol) -> bool:
        return symbol in self._index

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)


@dataclasses.dataclass(frozen=True)
class DiscreteDistribution:
    """Probability vector over an alphabet, with a tracked truncation deficit.

    ``truncation_deficit`` records the mass dropped when a countably
    infinite law was restricted to an initial segment; it participates in
    the normalization check ``sum(probs) + deficit == 1`` and must not
    exceed ``MAX_DEFICIT``.
    """

    alphabet: Alphabet
    probs: np.ndarray
    truncation_deficit: float = 0.0

    def __post_init__(self):
        probs = _readonly(self.probs)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.shape[0] != self.alphabet.size:
            raise ValidationError(
                f"probability vector length {probs.shape} does not match "
                f"alphabet size {self.alphabet.size}"
            )
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValidationError("probabilities must be finite and >= 0")
        deficit = float(self.truncation_deficit)
        if deficit < 0:
            raise ValidationError("truncation_deficit must be >= 0")
        if deficit > MAX_DEFICIT:
            raise ValidationError(
                f"truncation_deficit {deficit:g} exceeds the accepted "
                f"maximum {MAX_DEFICIT:g}; refine the truncation"
            )
        total = float(probs.sum()) + deficit
        if abs(total - 1.0) > SUM_ATOL:
            raise ValidationError(
                f"probabilities sum to {total!r} (with deficit "
                f"{deficit:g}); expected 1 within {SUM_ATOL:g}"
            )
        object.__setattr__(self, "truncation_deficit", deficit)

    def prob(self, symbol: Symbol) -> float:
        return float(self.probs[self.alphabet.index(symbol)])

    def support(self) -> tuple:
        return tuple(s for s, p in zip(self.alphabet.symbols, self.probs) if p > 0)


def uniform(alphabet: Alphabet) -> DiscreteDistribution:
    n = alphabet.size
    return DiscreteDistribution(alphabet, np.full(n, 1.0 / n))


def point_mass(alphabet: Alphabet, symbol: Symbol) -> DiscreteDistribution:
    probs = np.zeros(alphabet.size)
    probs[alphabet.index(symbol)] = 1.0
    return DiscreteDistribution(alphabet, probs)


@dataclasses.dataclass(frozen=True)
class DiscreteChannel:
    """Row-stochastic conditional family P_{Y|X}.

    ``matrix[i, j]`` is the probability of output ``j`` given input ``i``.
    Each row is validated as a DiscreteDistribution; rows of truncated
    kernels carry their own deficits in ``row_deficits``.
    """

    input_alphabet: Alphabet
    output_alphabet: Alphabet
    matrix: np.ndarray
    row_deficits: np.ndarray = None

    def __post_init__(self):
        matrix = _readonly(self.matrix)
        object.__setattr__(self, "matrix", matrix)
        if matrix.shape != (self.input_alphabet.size, self.output_alphabet.size):
            raise ValidationError(
                f"channel matrix shape {matrix.shape} does not match "
                f"alphabets ({self.input_alphabet.size}, {self.output_alphabet.size})"
            )
        deficits = self.row_deficits
        if deficits is None:
            deficits = np.zeros(self.input_alphabet.size)
        deficits = _readonly(deficits)
        object.__setattr__(self, "row_deficits", deficits)
        for i, symbol in enumerate(self.input_alphabet.symbols):
            try:
                DiscreteDistribution(self.output_alphabet, matrix[i], float(deficits[i]))
            except ValidationError as exc:
                raise ValidationError(f"channel row for input {symbol!r}: {exc}") from None

    def row(self, x: Symbol) -> DiscreteDistribution:
        i = self.input_alphabet.index(x)
        return DiscreteDistribution(
            self.output_alphabet, self.matrix[i], float(self.row_deficits[i])
        )

    def compose(self, other: "DiscreteChannel") -> "DiscreteChannel":
        """Post-process through ``other``, realizing the chain X - Y - Z."""
        if other.input_alphabet.symbols != self.output_alphabet.symbols:
            raise AlphabetMismatchError(
                "post-processing channel input alphabet must match output alphabet"
            )
        matrix = self.matrix @ other.matrix
        deficits = 1.0 - matrix.sum(axis=1)
        return DiscreteChannel(
            self.input_alphabet, other.output_alphabet, matrix, np.maximum(deficits, 0.0)
        )


def identity_channel(alphabet: Alphabet) -> DiscreteChannel:
    return DiscreteChannel(alphabet, alphabet, np.eye(alphabet.size))


def constant_channel(
    input_alphabet: Alphabet, row: DiscreteDistribution
) -> DiscreteChannel:
    matrix = np.tile(row.probs, (input_alphabet.size, 1))
    deficits = np.full(input_alphabet.size, row.truncation_deficit)
    return DiscreteChannel(input_alphabet, row.alphabet, matrix, deficits)


def marginal(
    prior: DiscreteDistribution, channel: DiscreteChannel
) -> DiscreteDistribution:
    """Output law P_Y(y) = sum_x P_X(x) P_{Y|X=x}(y).

    The deficit is rebuilt as ``1 - sum(P_Y)`` so that it also absorbs
    any mass lost to truncated channel rows; for exact rows this equals
    the prior's deficit up to floating rounding.
    """
    if prior.alphabet.symbols != channel.input_alphabet.symbols:
        raise AlphabetMismatchError("prior alphabet does not match channel input alphabet")
    probs = prior.probs @ channel.matrix
    deficit = max(0.0, 1.0 - float(probs.sum()))
    return DiscreteDistribution(channel.output_alphabet, probs, deficit)


@dataclasses.dataclass(frozen=True)
class JointModel:
    """Prior + channel with the derived output marginal cached."""

    prior: DiscreteDistribution
    channel: DiscreteChannel
    marginal: DiscreteDistribution = None

    def __post_init__(self):
        computed = marginal(self.prior, self.channel)
        if self.marginal is None:
            object.__setattr__(self, "marginal", computed)
        elif not np.allclose(self.marginal.probs, computed.probs, rtol=0, atol=1e-12):
            raise ValidationError("cached marginal disagrees with prior @ channel")

    @property
    def input_alphabet(self) -> Alphabet:
        return self.prior.alphabet

    @property
    def output_alphabet(self) -> Alphabet:
        return self.channel.output_alphabet


def posterior(model: JointModel, y: Symbol) -> DiscreteDistribution:
    """Bayes inversion P_{X|Y=y}; returns the prior when P_Y(y) = 0.

    The zero-probability branch is the convention that conditioning on a
    null event equals no conditioning.
    """
    j = model.output_alphabet.index(y)
    p_y = float(model.marginal.probs[j])
    if p_y <= 0.0:
        return model.prior
    probs = model.prior.probs * model.channel.matrix[:, j] / p_y
    deficit = max(0.0, 1.0 - float(probs.sum()))
    return DiscreteDistribution(model.input_alphabet, probs, deficit)


def truncate_countable(
    law: str, param: float, tail_bound: float
) -> DiscreteDistribution:
    """Restrict a countable law to an initial segment with tail <= tail_bound.

    Supported descriptors: ``"geometric"`` (success probability p, support
    starting at 1) and ``"poisson"`` (rate lambda, support starting at 0).
    The dropped mass is recorded in ``truncation_deficit``.
    """
    if not (0.0 < tail_bound <= MAX_DEFICIT):
        raise ValidationError(
            f"tail_bound must lie in (0, {MAX_DEFICIT:g}], got {tail_bound!r}"
        )
    if law == "geometric":
        p = float(param)
        if not (0.0 < p < 1.0):
            raise ValidationError(f"geometric parameter must be in (0, 1), got {p!r}")
        # tail beyond n terms is (1-p)^n
        n = max(1, math.ceil(math.log(tail_bound) / math.log1p(-p)))
        ks = np.arange(1, n + 1)
        probs = p * (1.0 - p) ** (ks - 1)
        deficit = math.exp(n * math.log1p(-p))
        return DiscreteDistribution(Alphabet([int(k) for k in ks]), probs, deficit)
    if law == "poisson":
        lam = float(param)
        if not (lam > 0 and math.isfinite(lam)):
            raise ValidationError(f"poisson rate must be positive, got {lam!r}")
        n = int(stats.poisson.isf(tail_bound, lam)) + 1
        while stats.poisson.sf(n, lam) > tail_bound:
            n += 1
        while n > 0 and stats.poisson.sf(n - 1, lam) <= tail_bound:
            n -= 1
        ks = np.arange(0, n + 1)
        probs = stats.poisson.pmf(ks, lam)
        deficit = float(stats.poisson.sf(n, lam))
        return DiscreteDistribution(Alphabet([int(k) for k in ks]), probs, deficit)
    raise UnsupportedLawError(f"unsupported law descriptor {law!r}")


def geometric_binary_model(p: float, q: float, tail_bound: float = 1e-12) -> JointModel:
    """Geometric prior Geom(p) on {1, 2, ...} with the binary kernel
    P_{Y|X=x}(0) = q^x, truncated so the dropped tail is <= tail_bound."""
    if not (0.0 < q < 1.0):
        raise ValidationError(f"kernel parameter q must be in (0, 1), got {q!r}")
    # The kernel column q^x can decay slower than the prior tail; keep enough
    # symbols that both the dropped prior mass and q^n fall below tail_bound,
    # so sup_x (1 - q^x) over the kept support is within tail_bound of 1.
    n_kernel = math.ceil(math.log(tail_bound) / math.log(q))
    prior_tail = min(tail_bound, (1.0 - p) ** n_kernel)
    prior = truncate_countable("geometric", p, prior_tail)
    xs = np.asarray(prior.alphabet.symbols, dtype=float)
    col0 = q ** xs
    matrix = np.column_stack([col0, 1.0 - col0])
    channel = DiscreteChannel(prior.alphabet, Alphabet([0, 1]), matrix)
    return JointModel(prior, channel)
