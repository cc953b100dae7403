"""Per-outcome leakage via the order-infinity Renyi divergence.

The core quantity is ``renyi_inf(P, Q) = log max_x P(x)/Q(x)`` over the
support of P, with the conventions 0/0 = 1 and x/0 = +infinity.  The
leakage of an outcome y is this divergence between the posterior and the
prior; collected over all outcomes (weighted by the output marginal)
this forms the leakage random variable, from which the averaged
statistics and tail probabilities derive.

All values are in nats internally; bits are a presentation conversion.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from .distributions import (
    Alphabet,
    DiscreteDistribution,
    JointModel,
    Symbol,
    posterior,
)
from .errors import AlphabetMismatchError, ValidationError

LN2 = math.log(2.0)


@dataclasses.dataclass(frozen=True, order=True)
class LeakageValue:
    """Extended non-negative leakage in nats; may be +infinity."""

    nats: float

    def __post_init__(self):
        if math.isnan(self.nats) or self.nats < 0:
            raise ValidationError(f"leakage must be >= 0, got {self.nats!r}")

    @property
    def bits(self) -> float:
        return self.nats / LN2

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.nats)

    def in_units(self, units: str) -> float:
        if units == "nats":
            return self.nats
        if units == "bits":
            return self.bits
        raise ValidationError(f"unknown units {units!r}")

    def __float__(self) -> float:
        return self.nats


@dataclasses.dataclass(frozen=True)
class LeakageProfile:
    """The map y -> leakage(X -> y) together with the output law P_Y."""

    outcomes: Alphabet
    leakages: Tuple[LeakageValue, ...]
    weights: DiscreteDistribution

    def __post_init__(self):
        if len(self.leakages) != self.outcomes.size:
            raise ValidationError("one leakage value per outcome required")
        if self.weights.alphabet.symbols != self.outcomes.symbols:
            raise AlphabetMismatchError("weights must live on the outcome alphabet")
        for lv, w in zip(self.leakages, self.weights.probs):
            if w == 0.0 and lv.nats != 0.0:
                raise ValidationError(
                    "zero-probability outcomes must carry zero leakage"
                )

    def nats_array(self) -> np.ndarray:
        return np.array([lv.nats for lv in self.leakages])


def renyi_inf(p: DiscreteDistribution, q: DiscreteDistribution) -> LeakageValue:
    """D_inf(P || Q) = log max over the support of P of P(x)/Q(x).

    Returns +infinity exactly when P is not absolutely continuous with
    respect to Q.  Computed in the log domain so long-tailed truncated
    alphabets cannot overflow.
    """
    if p.alphabet.symbols != q.alphabet.symbols:
        raise AlphabetMismatchError("renyi_inf requires a shared alphabet")
    support = p.probs > 0
    if not support.any():
        return LeakageValue(0.0)
    if np.any(q.probs[support] == 0.0):
        return LeakageValue(math.inf)
    with np.errstate(divide="ignore"):
        val = float(np.max(np.log(p.probs[support]) - np.log(q.probs[support])))
    # max ratio >= 1 whenever both vectors (nearly) normalize; clamp fp dust
    return LeakageValue(max(val, 0.0))


def pml(model: JointModel, y: Symbol) -> LeakageValue:
    """Pointwise maximal leakage from X to the outcome y.

    Equals ``renyi_inf(posterior, prior)``; zero for outcomes with
    P_Y(y) = 0 via the no-conditioning convention.
    """
    return renyi_inf(posterior(model, y), model.prior)


def leakage_profile(model: JointModel) -> LeakageProfile:
    leakages = tuple(pml(model, y) for y in model.output_alphabet)
    return LeakageProfile(model.output_alphabet, leakages, model.marginal)


def maximal_leakage(profile: LeakageProfile) -> LeakageValue:
    """log E_{P_Y}[exp leakage] — the averaged (Sibson-infinity) statistic.

    On finite full-support models this equals the log of the sum of the
    channel's column maxima, which the tests use as an independent check.
    """
    weights = profile.weights.probs
    nats = profile.nats_array()
    mask = weights > 0
    if np.any(np.isinf(nats[mask])):
        return LeakageValue(math.inf)
    if not mask.any():
        return LeakageValue(0.0)
    val = float(logsumexp(np.log(weights[mask]) + nats[mask]))
    return LeakageValue(max(val, 0.0))


def mean_leakage(profile: LeakageProfile) -> LeakageValue:
    """E_{P_Y}[leakage], with the convention 0 * inf = 0."""
    weights = profile.weights.probs
    nats = profile.nats_array()
    mask = weights > 0
    if np.any(np.isinf(nats[mask])):
        return LeakageValue(math.inf)
    return LeakageValue(max(float(np.dot(weights[mask], nats[mask])), 0.0))


def tail_probability(profile: LeakageProfile, eps: float) -> float:
    """P_Y over the outcomes whose leakage strictly exceeds eps."""
    if eps < 0:
        raise ValidationError(f"eps must be >= 0, got {eps!r}")
    mask = profile.nats_array() > eps
    return float(profile.weights.probs[mask].sum())


def absolute_continuity_witness(
    p: DiscreteDistribution, q: DiscreteDistribution
) -> Optional[Symbol]:
    """Lowest-index symbol with P > 0 but Q = 0, or None if P << Q."""
    if p.alphabet.symbols != q.alphabet.symbols:
        raise AlphabetMismatchError("absolute continuity check requires a shared alphabet")
    violations = np.flatnonzero((p.probs > 0) & (q.probs == 0))
    if violations.size == 0:
        return None
    return p.alphabet.symbols[int(violations[0])]


def check_absolute_continuity(
    model: JointModel, y: Symbol
) -> Tuple[bool, Optional[Symbol]]:
    """True iff the posterior at y is absolutely continuous w.r.t. the prior.

    When false, the second element is the violating atom; ``pml`` is
    +infinity exactly in that case.
    """
    witness = absolute_continuity_witness(posterior(model, y), model.prior)
    return witness is None, witness
