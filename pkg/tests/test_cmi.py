import numpy as np
import pytest
from numpy.testing import assert_allclose

from renyisc.entropies import (
    OptimizerConfig,
    cmi_generalizations,
    conditional_mutual_information,
    von_neumann_cmi,
)
from renyisc.errors import UsageError
from renyisc.random_ensembles import generator, random_pure_state, random_state, random_state_matrix
from renyisc.spaces import LabeledOperator, SystemSpace, partial_trace

CFG = OptimizerConfig(starts=3)


def _tripartite(seed):
    return random_state(SystemSpace.of(("A", 2), ("B", 2), ("C", 2)), seed=seed)


def test_vn_cmi_nonnegative_and_symmetric():
    rho = _tripartite(1)
    v = von_neumann_cmi(rho, "A", "B", "C")
    assert v > -1e-10
    assert_allclose(v, von_neumann_cmi(rho, "B", "A", "C"), atol=1e-10)


def test_vn_cmi_independent_c_reduces_to_mi():
    # A, B correlated but both independent of C: I(A;B|C) = I(A;B)
    rng = generator(2)
    rho = LabeledOperator.square(
        SystemSpace.of(("A", 2), ("B", 2), ("C", 2)),
        np.kron(random_state_matrix(rng, 4), random_state_matrix(rng, 2)),
    )
    from renyisc.entropies import von_neumann_entropy

    sa = von_neumann_entropy(partial_trace(rho, {"A"}))
    sb = von_neumann_entropy(partial_trace(rho, {"B"}))
    sab = von_neumann_entropy(partial_trace(rho, {"A", "B"}))
    assert_allclose(von_neumann_cmi(rho, "A", "B", "C"), sa + sb - sab, atol=1e-10)


def test_schatten_cmi_approaches_vn_near_one():
    rho = _tripartite(3)
    vn = von_neumann_cmi(rho, "A", "B", "C")
    near = conditional_mutual_information(rho, "A", "B", "C", 1.001)
    assert abs(near - vn) < 5e-3


def test_schatten_cmi_vanishes_when_a_decoupled():
    # rho_A (x) rho_BC: the four marginal powers collapse and the norm is 1
    rng = generator(4)
    rho = LabeledOperator.square(
        SystemSpace.of(("A", 2), ("B", 2), ("C", 2)),
        np.kron(random_state_matrix(rng, 2), random_state_matrix(rng, 4)),
    )
    for a in (0.75, 1.5):
        assert abs(conditional_mutual_information(rho, "A", "B", "C", a)) < 1e-8


def test_schatten_cmi_reduces_extra_systems():
    # a fourth system is traced out before evaluation
    rho4 = random_state(SystemSpace.of(("A", 2), ("B", 2), ("C", 2), ("D", 2)), seed=5)
    rho3 = partial_trace(rho4, {"A", "B", "C"})
    for a in (0.75, 1.5):
        assert_allclose(
            conditional_mutual_information(rho4, "A", "B", "C", a),
            conditional_mutual_information(rho3, "A", "B", "C", a),
            atol=1e-10,
        )


def test_generalizations_alpha_one_equal_vn():
    rho = _tripartite(6)
    vn = von_neumann_cmi(rho, "A", "B", "C")
    i1, i2 = cmi_generalizations(rho, "A", "B", "C", 1.0, CFG)
    assert_allclose(i1, vn, atol=1e-9)
    assert_allclose(i2, vn, atol=1e-9)


def test_generalizations_monotonic_in_alpha():
    rho = _tripartite(7)
    grid = (0.6, 1.0, 1.5, 2.0)
    vals = [cmi_generalizations(rho, "A", "B", "C", a, CFG) for a in grid]
    for (x1, y1), (x2, y2) in zip(vals, vals[1:]):
        assert x1 >= x2 - 1e-6  # first form non-increasing
        assert y2 >= y1 - 1e-6  # second form non-decreasing


def test_generalizations_duality_on_purification():
    psi = random_pure_state(SystemSpace.of(("A", 2), ("B", 2), ("C", 2), ("D", 2)), seed=8)
    for a in (0.75, 1.5):
        i1c, _ = cmi_generalizations(psi, "A", "B", "C", a, CFG)
        i1d, _ = cmi_generalizations(psi, "A", "B", "D", a, CFG)
        assert abs(i1c - i1d) < 1e-6


def test_cmi_unknown_label_rejected():
    rho = _tripartite(9)
    with pytest.raises(UsageError):
        conditional_mutual_information(rho, "A", "B", "Z", 1.5)
