"""Brute-force adversaries used as ground truth for the leakage pipeline.

Each routine here evaluates an operational definition of leakage
directly — optimal gain-function adversaries, exhaustive event
enumeration, the epsilon-partition gain construction, and guessing
adversaries over functions of the secret — without going through the
likelihood-ratio shortcut that ``pmlkit.leakage`` uses.  Agreement
between the two routes is what the verification suite checks.

Enumeration caps are hard errors: an oracle that silently under-searches
is worse than none.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from functools import lru_cache
from typing import Dict, Mapping, Tuple

import numpy as np

from .distributions import (
    Alphabet,
    DiscreteChannel,
    JointModel,
    Symbol,
    posterior,
)
from .errors import (
    AbsoluteContinuityError,
    AlphabetMismatchError,
    CapacityError,
    ValidationError,
)

#: largest input alphabet for subset enumeration (2^n events)
SUBSET_CAP = 20
#: largest number of enumerated groupings for the function adversary
GROUPING_CAP = 10_000_000
#: largest input alphabet for the function adversary
FUNCTION_ALPHABET_CAP = 10
#: largest estimate alphabet / resolution for simplex enumeration
STRATEGY_ALPHABET_CAP = 4
STRATEGY_RESOLUTION_CAP = 50


@dataclasses.dataclass(frozen=True)
class GainFunction:
    """Dense non-negative gain table g(x, w) over secrets x and estimates w."""

    x_alphabet: Alphabet
    estimate_alphabet: Alphabet
    gains: np.ndarray

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=float).copy()
        gains.setflags(write=False)
        object.__setattr__(self, "gains", gains)
        if gains.shape != (self.x_alphabet.size, self.estimate_alphabet.size):
            raise ValidationError(
                f"gain table shape {gains.shape} does not match alphabets "
                f"({self.x_alphabet.size}, {self.estimate_alphabet.size})"
            )
        if np.any(gains < 0) or not np.all(np.isfinite(gains)):
            raise ValidationError("gains must be finite and >= 0")

    def expected_gain(self, probs: np.ndarray) -> np.ndarray:
        """Expected gain of each pure estimate under the given law on X."""
        return probs @ self.gains


def _require_positive_outcome(model: JointModel, y: Symbol) -> None:
    if model.marginal.prob(y) <= 0.0:
        raise ValidationError(f"outcome {y!r} has zero probability")


def gain_ratio(model: JointModel, y: Symbol, g: GainFunction) -> float:
    """Best posterior expected gain over best prior expected gain.

    Randomized estimate strategies cannot beat the best pure estimate
    (they are mixtures), so both optima are maxima over columns of the
    gain table.  A zero prior optimum with positive posterior optimum
    yields +infinity.
    """
    if g.x_alphabet.symbols != model.input_alphabet.symbols:
        raise AlphabetMismatchError("gain function secret alphabet does not match model")
    _require_positive_outcome(model, y)
    num = float(np.max(g.expected_gain(posterior(model, y).probs)))
    den = float(np.max(g.expected_gain(model.prior.probs)))
    if den == 0.0:
        return math.inf if num > 0.0 else 1.0
    return num / den


def _best_set_ratio(post_sums: np.ndarray, prior_sums: np.ndarray) -> float:
    """Max of post/prior over paired event masses, with 0/0 = 1."""
    ratios = np.ones_like(post_sums)
    pos = prior_sums > 0
    ratios[pos] = post_sums[pos] / prior_sums[pos]
    null = (~pos) & (post_sums > 0)
    if null.any():
        return math.inf
    return float(ratios.max())


def subset_oracle(model: JointModel, y: Symbol) -> float:
    """log max over all non-empty events A of P_{X|y}(A) / P_X(A).

    Enumerates all 2^n - 1 events, so the input alphabet is capped at
    SUBSET_CAP symbols.
    """
    n = model.input_alphabet.size
    if n > SUBSET_CAP:
        raise CapacityError(
            f"subset oracle enumerates 2^n events; n={n} exceeds cap {SUBSET_CAP}"
        )
    _require_positive_outcome(model, y)
    post = posterior(model, y).probs
    prior = model.prior.probs
    post_sums = np.zeros(1)
    prior_sums = np.zeros(1)
    for i in range(n):
        post_sums = np.concatenate([post_sums, post_sums + post[i]])
        prior_sums = np.concatenate([prior_sums, prior_sums + prior[i]])
    best = _best_set_ratio(post_sums[1:], prior_sums[1:])
    return math.log(best) if best > 0 else -math.inf


@dataclasses.dataclass(frozen=True)
class PartitionGain:
    """The epsilon-partition gain: cells B_w = {x : e^{w eps} <= f(x) < e^{(w+1) eps}}
    of the posterior/prior ratio f, each rewarded by 1/P_X(B_w) on itself.

    Cell index -infinity collects the symbols with f(x) = 0.
    """

    epsilon: float
    cells: Mapping[float, Tuple[Symbol, ...]]

    def to_gain_function(self, model: JointModel) -> GainFunction:
        labels = [str(w) for w in sorted(self.cells)]
        estimate = Alphabet(labels)
        gains = np.zeros((model.input_alphabet.size, estimate.size))
        for j, w in enumerate(sorted(self.cells)):
            idx = [model.input_alphabet.index(x) for x in self.cells[w]]
            mass = float(model.prior.probs[idx].sum())
            if mass > 0.0:
                gains[idx, j] = 1.0 / mass
        return GainFunction(model.input_alphabet, estimate, gains)


def build_partition_gain(model: JointModel, y: Symbol, epsilon: float) -> PartitionGain:
    if epsilon <= 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon!r}")
    _require_positive_outcome(model, y)
    post = posterior(model, y).probs
    prior = model.prior.probs
    cells: Dict[float, list] = {}
    for i, x in enumerate(model.input_alphabet.symbols):
        if prior[i] == 0.0:
            if post[i] > 0.0:
                raise AbsoluteContinuityError(
                    f"posterior not absolutely continuous at atom {x!r}", witness=x
                )
            f = 1.0  # 0/0 convention
        else:
            f = post[i] / prior[i]
        w = -math.inf if f == 0.0 else math.floor(math.log(f) / epsilon)
        cells.setdefault(w, []).append(x)
    return PartitionGain(epsilon, {w: tuple(xs) for w, xs in cells.items()})


def partition_oracle(model: JointModel, y: Symbol, epsilon: float) -> float:
    """Leakage achieved by the epsilon-partition gain.

    Guaranteed to land in [pml - epsilon, pml]: averaging the ratio over
    a cell loses at most a factor e^epsilon against the cell's supremum.
    """
    gain = build_partition_gain(model, y, epsilon).to_gain_function(model)
    return math.log(gain_ratio(model, y, gain))


def shattering_value(
    model: JointModel, y: Symbol, grouping: Mapping[Symbol, object]
) -> float:
    """Leakage achieved by guessing W = grouping(X) through the shattering
    construction: log max_i P_{W|Y=y}(i) / P_W(i).

    The construction's full channel has unbounded alphabet; only its
    achieved value is computed.
    """
    _require_positive_outcome(model, y)
    missing = [x for x in model.input_alphabet if x not in grouping]
    if missing:
        raise ValidationError(f"grouping is not total on E; missing {missing[:3]!r}")
    groups = sorted({grouping[x] for x in model.input_alphabet}, key=repr)
    index = {g: i for i, g in enumerate(groups)}
    post = posterior(model, y).probs
    prior = model.prior.probs
    post_w = np.zeros(len(groups))
    prior_w = np.zeros(len(groups))
    for i, x in enumerate(model.input_alphabet.symbols):
        j = index[grouping[x]]
        post_w[j] += post[i]
        prior_w[j] += prior[i]
    best = _best_set_ratio(post_w, prior_w)
    return math.log(best) if best > 0 else -math.inf


@lru_cache(maxsize=None)
def _set_partitions(n: int, max_groups: int) -> Tuple[np.ndarray, ...]:
    """All assignments of n items into at most max_groups unlabeled blocks,
    as restricted growth strings, bucketed by block count (1-based)."""
    buckets = [[] for _ in range(max_groups)]

    def extend(prefix, used):
        i = len(prefix)
        if i == n:
            buckets[used - 1].append(prefix)
            return
        for g in range(min(used + 1, max_groups)):
            extend(prefix + (g,), max(used, g + 1))

    extend((), 0)
    return tuple(np.array(b, dtype=np.intp) for b in buckets if b)


def _count_partitions(n: int, max_groups: int) -> int:
    # restricted Bell number via the Stirling triangle
    row = [1]  # partitions of 1 element into exactly j+1 blocks
    total = 1
    for m in range(2, n + 1):
        new = [0] * min(m, max_groups)
        for j, cnt in enumerate(row):
            if j < len(new):
                new[j] += cnt * (j + 1)
            if j + 1 < len(new):
                new[j + 1] += cnt
        row = new
        total = sum(row)
    return total if n >= 1 else 0


def randomized_function_oracle(model: JointModel, y: Symbol, max_groups: int) -> float:
    """Max shattering value over every total grouping of E into max_groups
    classes.

    Groupings are enumerated as canonical set partitions (labels up to
    relabeling), which covers every map E -> [max_groups] since the
    shattering value only depends on the induced partition.  The result
    is a certified lower bound on pml, and equals pml once max_groups
    reaches the alphabet size (singleton grouping available).
    """
    n = model.input_alphabet.size
    if n > FUNCTION_ALPHABET_CAP:
        raise CapacityError(
            f"function adversary enumerates groupings; |E|={n} exceeds cap "
            f"{FUNCTION_ALPHABET_CAP}"
        )
    if max_groups < 1:
        raise ValidationError("max_groups must be a positive integer")
    k = min(max_groups, n)
    count = _count_partitions(n, k)
    if count > GROUPING_CAP:
        raise CapacityError(
            f"{count} groupings exceed the enumeration cap {GROUPING_CAP}"
        )
    _require_positive_outcome(model, y)
    post = posterior(model, y).probs
    prior = model.prior.probs
    best = 1.0
    for assignments in _set_partitions(n, k):
        blocks = int(assignments.max()) + 1
        post_cells = np.stack([(assignments == g) @ post for g in range(blocks)], axis=1)
        prior_cells = np.stack([(assignments == g) @ prior for g in range(blocks)], axis=1)
        ratios = np.ones_like(post_cells)
        pos = prior_cells > 0
        ratios[pos] = post_cells[pos] / prior_cells[pos]
        if np.any((~pos) & (post_cells > 0)):
            return math.inf
        best = max(best, float(ratios.max(axis=1).max()))
    return math.log(best)


def _simplex_grid(dim: int, resolution: int):
    for counts in itertools.product(range(resolution + 1), repeat=dim - 1):
        rest = resolution - sum(counts)
        if rest >= 0:
            yield np.array(counts + (rest,), dtype=float) / resolution


def randomized_strategy_check(
    model: JointModel, y: Symbol, g: GainFunction, grid_resolution: int
) -> bool:
    """Verify that no mixed estimate strategy beats the best pure estimate.

    Walks a simplex grid over the estimate alphabet and checks every
    mixture's expected posterior gain against the pure optimum (within
    1e-12).  Always true by the mixture argument; this is the oracle
    confirming it numerically.
    """
    if g.estimate_alphabet.size > STRATEGY_ALPHABET_CAP:
        raise CapacityError(
            f"strategy check caps the estimate alphabet at {STRATEGY_ALPHABET_CAP}"
        )
    if not (1 <= grid_resolution <= STRATEGY_RESOLUTION_CAP):
        raise CapacityError(
            f"simplex resolution must lie in [1, {STRATEGY_RESOLUTION_CAP}]"
        )
    _require_positive_outcome(model, y)
    pure = g.expected_gain(posterior(model, y).probs)
    best_pure = float(pure.max())
    for weights in _simplex_grid(g.estimate_alphabet.size, grid_resolution):
        if float(weights @ pure) > best_pure + 1e-12:
            return False
    return True


def make_guessing_gain(subchannel: DiscreteChannel) -> GainFunction:
    """Gain for guessing U exactly, where U is drawn from P_{U|X}:
    g(x, w) = P_{U|X=x}(w)."""
    return GainFunction(
        subchannel.input_alphabet, subchannel.output_alphabet, subchannel.matrix
    )


def make_approx_gain(subchannel: DiscreteChannel, radius: float) -> GainFunction:
    """Gain for guessing an integer-valued U within an open ball of
    the given radius: g(x, w) = P_{U|X=x}({a : |a - w| < radius})."""
    labels = subchannel.output_alphabet.symbols
    if not all(isinstance(a, int) for a in labels):
        raise ValidationError("approximate guessing requires an integer estimate alphabet")
    if radius <= 0:
        raise ValidationError(f"radius must be positive, got {radius!r}")
    a_vals = np.array(labels, dtype=float)
    ball = np.abs(a_vals[:, None] - a_vals[None, :]) < radius
    gains = subchannel.matrix @ ball
    return GainFunction(subchannel.input_alphabet, subchannel.output_alphabet, gains)
