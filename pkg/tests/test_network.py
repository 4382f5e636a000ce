import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitssa import (
    Custom,
    InfeasibleFiringError,
    MassAction,
    ReactionNetwork,
    SplitPartition,
    WeightVector,
    apply_channel,
    as_state,
    evaluate_propensity,
    weighted_norm,
)


def birth_death(k=5.0, mu=0.05):
    return ReactionNetwork(
        stoich=np.array([[-1, 1]]),
        propensities=(MassAction(k, (0,)), MassAction(mu, (1,))),
        species_names=("X",),
        channel_names=("birth", "death"),
    )


def bimolecular(k1=5.0, k2=0.005):
    return ReactionNetwork(
        stoich=np.array([[-1, 0, 1], [0, -1, 1]]),
        propensities=(
            MassAction(k1, (0, 0)),
            MassAction(k1, (0, 0)),
            MassAction(k2, (1, 1)),
        ),
    )


class TestEvaluatePropensity:
    def test_birth_death_birth_channel(self):
        # constant birth intensity regardless of state
        assert evaluate_propensity(birth_death(), 0, as_state([50])) == 5.0

    def test_empty_state_degradation(self):
        assert evaluate_propensity(birth_death(), 1, as_state([0])) == 0.0

    def test_dimerization_pair_counting(self):
        nu = 2.5e-4
        net = ReactionNetwork(
            stoich=np.array([[-1, 2]]),
            propensities=(MassAction(5.0, (0,)), MassAction(nu, (2,))),
        )
        assert evaluate_propensity(net, 1, as_state([2])) == pytest.approx(5e-4)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            evaluate_propensity(birth_death(), 2, as_state([1]))

    def test_clamp_overrides_positive_form(self):
        # consumes two copies but counts multiplicity one: the form is
        # positive at x=1 yet firing would go negative, so the clamp wins
        net = ReactionNetwork(
            stoich=np.array([[2]]),
            propensities=(MassAction(1.0, (1,)),),
        )
        assert evaluate_propensity(net, 0, as_state([1])) == 0.0
        assert evaluate_propensity(net, 0, as_state([2])) == 2.0

    def test_custom_clamped_too(self):
        net = ReactionNetwork(
            stoich=np.array([[1]]),
            propensities=(Custom(lambda x: 3.0),),
        )
        assert evaluate_propensity(net, 0, as_state([0])) == 0.0
        assert evaluate_propensity(net, 0, as_state([1])) == 3.0


class TestApplyChannel:
    def test_bimolecular_annihilation(self):
        out = apply_channel(as_state([2, 3]), bimolecular(), 2)
        assert out.tolist() == [1, 2]

    def test_birth_from_empty(self):
        assert apply_channel(as_state([0]), birth_death(), 0).tolist() == [1]

    def test_degradation_to_empty(self):
        assert apply_channel(as_state([1]), birth_death(), 1).tolist() == [0]

    def test_infeasible_firing_raises(self):
        with pytest.raises(InfeasibleFiringError):
            apply_channel(as_state([0]), birth_death(), 1)


class TestWeightedNorm:
    def test_zero_state(self):
        assert weighted_norm(as_state([0, 0]), WeightVector.ones(2)) == 0.0

    def test_unit_weights(self):
        assert weighted_norm(as_state([3, 4]), WeightVector.ones(2)) == 7.0

    def test_general_weights(self):
        assert weighted_norm(as_state([3, 4]), WeightVector(np.array([1.0, 2.0]))) == 11.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            weighted_norm(as_state([1]), WeightVector.ones(2))

    def test_min_weight_must_be_one(self):
        with pytest.raises(ValueError):
            WeightVector(np.array([2.0, 3.0]))
        with pytest.raises(ValueError):
            WeightVector(np.array([0.5, 1.0]))


@st.composite
def random_mass_action_case(draw):
    D = draw(st.integers(1, 4))
    x = draw(st.lists(st.integers(0, 12), min_size=D, max_size=D))
    m = draw(st.lists(st.integers(0, 3), min_size=D, max_size=D))
    c = draw(st.floats(0.0, 10.0, allow_nan=False))
    return x, m, c


@given(random_mass_action_case())
@settings(max_examples=200)
def test_mass_action_matches_bruteforce_falling_factorial(case):
    x, m, c = case
    w = MassAction(c, tuple(m))(as_state(x))
    expected = c
    for xi, mi in zip(x, m):
        for j in range(mi):
            expected *= xi - j
    assert w == pytest.approx(max(expected, 0.0))


@st.composite
def random_network_and_state(draw):
    D = draw(st.integers(1, 3))
    R = draw(st.integers(1, 4))
    stoich = draw(
        st.lists(
            st.lists(st.integers(-2, 2), min_size=D, max_size=D),
            min_size=R,
            max_size=R,
        )
    )
    mults = draw(
        st.lists(
            st.lists(st.integers(0, 2), min_size=D, max_size=D),
            min_size=R,
            max_size=R,
        )
    )
    net = ReactionNetwork(
        stoich=np.array(stoich).T,
        propensities=tuple(MassAction(1.0, tuple(m)) for m in mults),
    )
    x = draw(st.lists(st.integers(0, 3), min_size=D, max_size=D))
    return net, as_state(x)


@given(random_network_and_state())
@settings(max_examples=200)
def test_conservativeness_clamp(case):
    net, x = case
    for r in range(net.channel_count):
        if np.any(x - net.stoich[:, r] < 0):
            assert evaluate_propensity(net, r, x) == 0.0


@given(
    st.integers(1, 4).flatmap(
        lambda d: st.tuples(
            st.lists(st.integers(0, 50), min_size=d, max_size=d),
            st.lists(st.floats(0.0, 9.0, allow_nan=False), min_size=d, max_size=d),
        )
    )
)
@settings(max_examples=200)
def test_weighted_norm_dominates_one_norm(case):
    counts, extra = case
    x = as_state(counts)
    weights = 1.0 + np.array(extra)
    weights[0] = 1.0  # enforce the min-one normalization
    l = WeightVector(weights)
    assert np.sum(x) <= weighted_norm(x, l) + 1e-12


class TestSplitPartition:
    def test_partition_must_cover(self):
        with pytest.raises(ValueError):
            SplitPartition((0,), (2,)).validate(3)

    def test_partition_no_overlap(self):
        with pytest.raises(ValueError):
            SplitPartition((0, 1), (1,))

    def test_group_labels(self):
        part = SplitPartition((0, 2), (1,))
        assert part.group_of(3).tolist() == [0, 1, 0]
