import numpy as np
import pytest
from numpy.testing import assert_allclose

from renyisc.channels import (
    ChannelSpec,
    apply_channel,
    apply_channels,
    channel_from_kraus,
    dephasing_channel,
    identity_channel,
    isometry_channel,
    measurement_channel,
)
from renyisc.errors import InvalidChannelError
from renyisc.random_ensembles import generator, random_povm, random_state
from renyisc.spaces import LabeledOperator, SystemSpace, partial_trace


def test_non_isometry_rejected():
    space = SystemSpace.of(("A", 2))
    with pytest.raises(InvalidChannelError):
        isometry_channel(space, space, np.array([[1.0, 0.0], [0.0, 0.5]]))


def test_identity_channel_is_identity():
    rho = random_state(SystemSpace.of(("A", 2), ("B", 3)), seed=1)
    ch = identity_channel(SystemSpace.of(("B", 3)))
    assert_allclose(apply_channel(ch, rho).matrix, rho.matrix, atol=1e-12)


def test_identity_channel_rename():
    rho = random_state(SystemSpace.of(("A", 2)), seed=2)
    ch = identity_channel(SystemSpace.of(("A", 2)), rename={"A": "Ap"})
    out = apply_channel(ch, rho)
    assert out.space.labels == ("Ap",)
    assert_allclose(out.matrix, rho.matrix, atol=1e-12)


def test_channel_preserves_trace_and_positivity():
    rng = generator(3)
    from renyisc.random_ensembles import haar_isometry_matrix

    space_in = SystemSpace.of(("A", 3))
    space_out = SystemSpace.of(("B", 2), ("E", 3))
    ch = ChannelSpec(
        LabeledOperator(space_out, space_in, haar_isometry_matrix(rng, 6, 3)), frozenset({"E"})
    )
    rho = random_state(space_in, seed=4)
    out = apply_channel(ch, rho)
    assert out.space.labels == ("B",)
    assert_allclose(np.trace(out.matrix).real, 1.0, atol=1e-12)
    assert np.min(np.linalg.eigvalsh(out.matrix)) > -1e-12


def test_channel_acts_as_identity_on_bystanders():
    # a channel on B must not disturb the A marginal
    rng = generator(5)
    from renyisc.random_ensembles import haar_isometry_matrix

    rho = random_state(SystemSpace.of(("A", 2), ("B", 2)), seed=5)
    ch = ChannelSpec(
        LabeledOperator(
            SystemSpace.of(("B", 2), ("E", 2)),
            SystemSpace.of(("B", 2)),
            haar_isometry_matrix(rng, 4, 2),
        ),
        frozenset({"E"}),
    )
    out = apply_channel(ch, rho)
    assert_allclose(
        partial_trace(out, {"A"}).matrix, partial_trace(rho, {"A"}).matrix, atol=1e-12
    )


def test_channel_from_kraus_matches_direct_sum():
    # amplitude damping via Kraus pieces
    gamma = 0.3
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    space = SystemSpace.of(("A", 2))
    ch = channel_from_kraus(space, space, [k0, k1], "E")
    rho = random_state(space, seed=6)
    out = apply_channel(ch, rho)
    expected = k0 @ rho.matrix @ k0.conj().T + k1 @ rho.matrix @ k1.conj().T
    assert_allclose(out.matrix, expected, atol=1e-12)


def test_channel_from_kraus_incomplete_rejected():
    k0 = np.array([[0.5, 0.0], [0.0, 0.5]], dtype=complex)
    space = SystemSpace.of(("A", 2))
    with pytest.raises(InvalidChannelError):
        channel_from_kraus(space, space, [k0], "E")


def test_dephasing_kills_off_diagonals():
    space = SystemSpace.of(("A", 2))
    plus = LabeledOperator.square(space, np.full((2, 2), 0.5, dtype=complex))
    out = apply_channel(dephasing_channel(space), plus)
    assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-12)


def test_measurement_channel_outcome_statistics():
    povm = random_povm(2, 3, seed=7)
    space = SystemSpace.of(("A", 2))
    rho = random_state(space, seed=8)
    ch = measurement_channel(povm, space)
    out = apply_channel(ch, rho)
    assert set(out.space.labels) == {"X", "Xp"}
    probs = np.real(np.diag(partial_trace(out, {"X"}).matrix))
    expected = [np.trace(e @ rho.matrix).real for e in povm]
    assert_allclose(probs, expected, atol=1e-10)
    # both classical copies agree
    m = out.matrix.reshape(3, 3, 3, 3)
    for x in range(3):
        for y in range(3):
            if x != y:
                assert abs(m[x, y, x, y]) < 1e-12


def test_apply_channels_in_sequence():
    space = SystemSpace.of(("A", 2))
    rho = random_state(space, seed=9)
    chs = [dephasing_channel(space, "E1"), identity_channel(space, rename={"A": "Z"})]
    out = apply_channels(chs, rho)
    assert out.space.labels == ("Z",)
    assert_allclose(np.trace(out.matrix).real, 1.0, atol=1e-12)
