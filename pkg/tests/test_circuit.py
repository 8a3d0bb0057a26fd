import numpy as np
import pytest

from qconstel.circuit import (
    Beamsplitter,
    InterferometerNetlist,
    PhaseShifter,
    from_json_dict,
    from_text,
    netlist_unitary,
    preset_circuit,
    reck_decompose,
    relabeling_distance,
    to_json_dict,
    to_text,
)
from qconstel.estimation import outcome_probabilities, pair_model, rectangle_model, ring_model
from qconstel.linalg import haar_unitary, unitarity_defect, unitary_distance
from qconstel.symmetry import AbelianGroup, qft_matrix

HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def test_empty_netlist_is_identity():
    net = InterferometerNetlist(3, ())
    assert np.allclose(netlist_unitary(net), np.eye(3))


def test_single_5050_is_hadamard():
    net = InterferometerNetlist(2, (Beamsplitter(0, 1, np.pi / 4),))
    assert np.max(np.abs(netlist_unitary(net) - HADAMARD)) <= 1e-15


def test_element_validation():
    with pytest.raises(ValueError):
        Beamsplitter(1, 1, 0.3)
    with pytest.raises(ValueError):
        Beamsplitter(2, 1, 0.3)
    with pytest.raises(ValueError):
        PhaseShifter(-1, 0.3)
    with pytest.raises(ValueError):
        InterferometerNetlist(2, (Beamsplitter(0, 2, 0.3),))
    with pytest.raises(ValueError):
        InterferometerNetlist(2, (), output_phases=(0.1,))


def test_phaseshifter_and_order():
    net = InterferometerNetlist(
        2, (PhaseShifter(0, np.pi / 2), Beamsplitter(0, 1, np.pi / 4))
    )
    expected = HADAMARD @ np.diag([1j, 1.0])  # shifter applied first
    assert np.max(np.abs(netlist_unitary(net) - expected)) <= 1e-15


def test_reck_hadamard_single_beamsplitter():
    net = reck_decompose(HADAMARD)
    assert net.beamsplitter_count == 1
    assert all(p == 0.0 for p in net.output_phases)
    assert unitary_distance(netlist_unitary(net), HADAMARD) <= 1e-12


def test_reck_identity_empty():
    net = reck_decompose(np.eye(5))
    assert net.beamsplitter_count == 0
    assert all(p == 0.0 for p in net.output_phases)


def test_reck_rejects_nonunitary():
    with pytest.raises(ValueError, match="not unitary"):
        reck_decompose(np.ones((3, 3)))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8])
def test_reck_roundtrip_random(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        u = haar_unitary(n, rng)
        net = reck_decompose(u)
        assert net.beamsplitter_count <= n * (n - 1) // 2
        realized = netlist_unitary(net)
        assert unitarity_defect(realized) <= 1e-10
        assert unitary_distance(realized, u) <= 1e-9


def test_reck_of_netlist_roundtrip():
    rng = np.random.default_rng(0)
    u = haar_unitary(4, rng)
    net = reck_decompose(u)
    again = reck_decompose(netlist_unitary(net))
    assert unitary_distance(netlist_unitary(again), u) <= 1e-9


def test_preset_pair():
    net = preset_circuit("pair")
    assert net.beamsplitter_count == 1
    assert unitary_distance(netlist_unitary(net), qft_matrix(AbelianGroup((2,)))) <= 1e-12
    with pytest.raises(ValueError):
        preset_circuit("pair", 3)


def test_preset_rect_walsh_two_layers():
    net = preset_circuit("rect")
    assert net.beamsplitter_count == 4
    pairs = [(el.i, el.j) for el in net.elements]
    assert pairs[:2] == [(0, 1), (2, 3)]  # first layer
    assert pairs[2:] == [(0, 2), (1, 3)]  # second layer
    walsh = qft_matrix(AbelianGroup((2, 2)))
    assert unitary_distance(netlist_unitary(net), walsh) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
def test_preset_ring_matches_qft(n):
    net = preset_circuit("ring", n)
    target = qft_matrix(AbelianGroup((n,)))
    dist, _perm = relabeling_distance(netlist_unitary(net), target)
    assert dist <= 1e-9


def test_preset_ring4_contains_quarter_phases():
    net = preset_circuit("ring", 4)
    phases = [el.phase for el in net.elements if isinstance(el, Beamsplitter)]
    phases += [el.phase for el in net.elements if isinstance(el, PhaseShifter)]
    phases += list(net.output_phases)
    wrapped = np.mod(phases, 2 * np.pi)
    for target in (np.pi / 2, np.pi, 3 * np.pi / 2):  # angles of i, i^2, i^3
        assert np.min(np.abs(wrapped - target)) <= 1e-9


def test_preset_measurement_distributions_match_qft():
    cases = [
        (preset_circuit("pair"), pair_model(1.0), [0.4]),
        (preset_circuit("rect"), rectangle_model(1.0, 0.5), [0.5, 0.7]),
        (preset_circuit("ring", 4), ring_model(4, 1.0), [0.8]),
        (preset_circuit("ring", 5), ring_model(5, 1.0), [0.6]),
    ]
    for net, model, point in cases:
        u = netlist_unitary(net)
        dist, perm = relabeling_distance(u, qft_matrix(model.group))
        assert dist <= 1e-9
        q_net = outcome_probabilities(model, point, u.conj().T)
        q_qft = outcome_probabilities(model, point, model.qft_basis)
        assert np.max(np.abs(np.sort(q_net) - np.sort(q_qft))) <= 1e-10
        assert np.max(np.abs(q_net[np.argsort(perm)] - q_qft)) <= 1e-10


def test_relabeling_distance_recovers_permutation():
    rng = np.random.default_rng(2)
    u = haar_unitary(5, rng)
    perm = rng.permutation(5)
    p = np.zeros((5, 5))
    p[np.arange(5), perm] = 1.0
    shuffled = np.exp(0.7j) * p @ u
    dist, found = relabeling_distance(shuffled, u)
    assert dist <= 1e-10
    assert np.array_equal(found, perm)


def test_text_serialization_roundtrip():
    rng = np.random.default_rng(3)
    u = haar_unitary(4, rng)
    net = reck_decompose(u)
    text = to_text(net)
    parsed = from_text(text, n_modes=4)
    assert unitary_distance(netlist_unitary(parsed), u) <= 1e-9
    # 17 significant digits survive the round trip exactly
    bs_lines = [ln for ln in text.splitlines() if ln.startswith("BS")]
    assert len(bs_lines) == net.beamsplitter_count
    first = net.elements[0]
    assert f"{first.mixing:.17g}" in bs_lines[0]


def test_text_identity_is_empty():
    assert to_text(reck_decompose(np.eye(3))) == ""


def test_from_text_diagnostics():
    with pytest.raises(ValueError, match="line 2"):
        from_text("BS 0 1 0.5 0.0\nXX 0 1\n")
    with pytest.raises(ValueError, match="line 1"):
        from_text("BS 0 1 abc 0.0\n")


def test_json_serialization_roundtrip():
    net = preset_circuit("ring", 3)
    data = to_json_dict(net)
    back = from_json_dict(data)
    assert unitary_distance(netlist_unitary(back), netlist_unitary(net)) <= 1e-12
    assert data["modes"] == 3


def test_netlist_unitary_always_unitary():
    rng = np.random.default_rng(4)
    for _ in range(10):
        elements = []
        for _ in range(6):
            if rng.uniform() < 0.7:
                i, j = sorted(rng.choice(5, size=2, replace=False))
                elements.append(Beamsplitter(int(i), int(j), rng.uniform(0, np.pi / 2), rng.uniform(-np.pi, np.pi)))
            else:
                elements.append(PhaseShifter(int(rng.integers(5)), rng.uniform(-np.pi, np.pi)))
        net = InterferometerNetlist(5, tuple(elements))
        assert unitarity_defect(netlist_unitary(net)) <= 1e-10
