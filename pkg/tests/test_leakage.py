import math

import numpy as np
import pytest

from pmlkit import (
    Alphabet,
    DiscreteChannel,
    DiscreteDistribution,
    JointModel,
    LeakageProfile,
    LeakageValue,
    absolute_continuity_witness,
    check_absolute_continuity,
    constant_channel,
    geometric_binary_model,
    identity_channel,
    leakage_profile,
    maximal_leakage,
    mean_leakage,
    pml,
    renyi_inf,
    tail_probability,
    uniform,
)
from pmlkit.errors import AlphabetMismatchError, ValidationError
from conftest import random_full_support_model


def dist(probs):
    return DiscreteDistribution(Alphabet(list(range(len(probs)))), np.asarray(probs, float))


class TestRenyiInf:
    def test_equal_distributions(self):
        p = dist([0.2, 0.3, 0.5])
        assert renyi_inf(p, p).nats == 0.0

    def test_point_mass_vs_uniform(self):
        assert renyi_inf(dist([1.0, 0.0]), dist([0.5, 0.5])).nats == pytest.approx(math.log(2))

    def test_not_absolutely_continuous(self):
        assert renyi_inf(dist([0.5, 0.5]), dist([1.0, 0.0])).is_infinite

    def test_zero_zero_atoms_are_neutral(self):
        # trailing atom has P = Q = 0; ratio 1 by convention
        p = dist([0.6, 0.4, 0.0])
        q = dist([0.3, 0.7, 0.0])
        assert renyi_inf(p, q).nats == pytest.approx(math.log(2))

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatchError):
            renyi_inf(dist([1.0]), dist([0.5, 0.5]))


def test_leakage_value_units_and_bounds():
    v = LeakageValue(math.log(2))
    assert v.bits == pytest.approx(1.0)
    assert v.in_units("nats") == v.nats
    with pytest.raises(ValidationError):
        LeakageValue(-0.1)
    assert LeakageValue(math.inf).is_infinite


def test_pml_identity_uniform():
    for n in (2, 4, 7):
        a = Alphabet(list(range(n)))
        model = JointModel(uniform(a), identity_channel(a))
        for y in a:
            assert pml(model, y).nats == pytest.approx(math.log(n), abs=1e-12)


def test_pml_constant_channel_is_zero():
    a = Alphabet(list(range(3)))
    row = dist([0.1, 0.9])
    model = JointModel(uniform(a), constant_channel(a, row))
    assert pml(model, 0).nats == 0.0
    assert pml(model, 1).nats == 0.0


def test_pml_geometric_binary_exact_values():
    p, q = 0.3, 0.5
    model = geometric_binary_model(p, q)
    top = 1 - q + p * q
    assert pml(model, 0).nats == pytest.approx(math.log(top / p), abs=1e-8)
    assert pml(model, 1).nats == pytest.approx(math.log(top / (1 - q)), abs=1e-8)


def test_pml_equals_likelihood_ratio_form():
    # oracle identity: pml = log max_x P(y|x) / P_Y(y) on positive outcomes
    rng = np.random.default_rng(11)
    for _ in range(50):
        model = random_full_support_model(rng, int(rng.integers(2, 8)), int(rng.integers(2, 8)))
        for j, y in enumerate(model.output_alphabet.symbols):
            expected = math.log(model.channel.matrix[:, j].max() / model.marginal.probs[j])
            assert pml(model, y).nats == pytest.approx(expected, abs=1e-10)


def test_profile_zero_weight_outcome_has_zero_leakage():
    a = Alphabet(["x0", "x1"])
    b = Alphabet(["y0", "y1", "never"])
    channel = DiscreteChannel(a, b, np.array([[0.9, 0.1, 0.0], [0.3, 0.7, 0.0]]))
    model = JointModel(uniform(a), channel)
    profile = leakage_profile(model)
    assert profile.leakages[2].nats == 0.0
    assert profile.weights.prob("never") == 0.0


def test_maximal_leakage_identity_and_constant():
    a = Alphabet(list(range(5)))
    ident = leakage_profile(JointModel(uniform(a), identity_channel(a)))
    assert maximal_leakage(ident).nats == pytest.approx(math.log(5), abs=1e-12)
    const = leakage_profile(JointModel(uniform(a), constant_channel(a, dist([0.5, 0.5]))))
    assert maximal_leakage(const).nats == 0.0


def test_maximal_leakage_column_maxima_oracle():
    rng = np.random.default_rng(23)
    for _ in range(25):
        model = random_full_support_model(rng, 4, 4)
        got = maximal_leakage(leakage_profile(model)).nats
        expected = math.log(model.channel.matrix.max(axis=0).sum())
        assert got == pytest.approx(expected, abs=1e-10)


def test_mean_leakage():
    a = Alphabet(list(range(4)))
    ident = leakage_profile(JointModel(uniform(a), identity_channel(a)))
    assert mean_leakage(ident).nats == pytest.approx(math.log(4), abs=1e-12)
    model = geometric_binary_model(0.3, 0.5)
    profile = leakage_profile(model)
    expected = float(np.dot(profile.weights.probs, profile.nats_array()))
    assert mean_leakage(profile).nats == pytest.approx(expected, abs=1e-15)


def test_tail_probability():
    a = Alphabet(list(range(4)))
    ident = leakage_profile(JointModel(uniform(a), identity_channel(a)))
    assert tail_probability(ident, 0.0) == 1.0
    assert tail_probability(ident, math.log(4)) == 0.0  # strict inequality
    const = leakage_profile(JointModel(uniform(a), constant_channel(a, dist([0.2, 0.8]))))
    assert tail_probability(const, 0.0) == 0.0

    model = geometric_binary_model(0.3, 0.5)
    profile = leakage_profile(model)
    low, high = sorted(profile.nats_array())
    between = 0.5 * (low + high)
    bigger = int(np.argmax(profile.nats_array()))
    assert tail_probability(profile, between) == pytest.approx(
        float(profile.weights.probs[bigger])
    )
    with pytest.raises(ValidationError):
        tail_probability(profile, -1.0)


def test_tail_is_monotone_step_function():
    rng = np.random.default_rng(37)
    model = random_full_support_model(rng, 5, 6)
    profile = leakage_profile(model)
    grid = np.linspace(0.0, profile.nats_array().max() + 0.5, 60)
    tails = [tail_probability(profile, e) for e in grid]
    assert all(b <= a for a, b in zip(tails, tails[1:]))
    # constant between consecutive distinct leakage values
    values = sorted(set(profile.nats_array()))
    for lo, hi in zip(values, values[1:]):
        mid1, mid2 = lo + 0.25 * (hi - lo), lo + 0.75 * (hi - lo)
        assert tail_probability(profile, mid1) == tail_probability(profile, mid2)


def test_data_processing_inequality():
    rng = np.random.default_rng(53)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        model = random_full_support_model(rng, n, int(rng.integers(2, 7)))
        z_stage = random_full_support_model(
            rng, model.output_alphabet.size, int(rng.integers(2, 7))
        )
        post = DiscreteChannel(
            model.output_alphabet, z_stage.output_alphabet, z_stage.channel.matrix
        )
        composed = JointModel(model.prior, model.channel.compose(post))
        bound = max(pml(model, y).nats for y in model.output_alphabet)
        for z in composed.output_alphabet:
            assert pml(composed, z).nats <= bound + 1e-10


def test_absolute_continuity_checks():
    rng = np.random.default_rng(71)
    model = random_full_support_model(rng, 4, 4)
    for y in model.output_alphabet:
        ok, witness = check_absolute_continuity(model, y)
        assert ok and witness is None
        assert not pml(model, y).is_infinite

    # prior null atom never receives posterior mass under exact Bayes
    a = Alphabet(["x0", "x1"])
    prior = DiscreteDistribution(a, np.array([0.0, 1.0]))
    model = JointModel(prior, identity_channel(a))
    ok, witness = check_absolute_continuity(model, "x1")
    assert ok and witness is None

    # externally supplied pair with a violating atom
    p = dist([0.5, 0.5, 0.0])
    q = dist([1.0, 0.0, 0.0])
    assert absolute_continuity_witness(p, q) == 1
    assert renyi_inf(p, q).is_infinite


def test_profile_invariant_zero_weight_zero_leakage():
    a = Alphabet([0, 1])
    weights = DiscreteDistribution(a, np.array([1.0, 0.0]))
    with pytest.raises(ValidationError):
        LeakageProfile(a, (LeakageValue(0.0), LeakageValue(0.5)), weights)
