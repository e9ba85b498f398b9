"""Blind-computation tests: masking algebra, exhaustive blindness, flow
adaptation against a circuit oracle, paired-seed agreement with the direct
run, and exchange accounting."""

import math

import numpy as np
import pytest

from covertqnet.bfk import (ClientSecrets, ServerState, adapt_phi,
                            angle_octant, client_correct, client_delta,
                            client_prepare, load_run_description,
                            octant_angle, run_blind_computation,
                            run_direct_mbqc, save_run_description,
                            server_measure)
from covertqnet.errors import AlreadyMeasured, FlowViolation
from covertqnet.graphs import brickwork_graph

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


# -- masking algebra --------------------------------------------------------

def test_delta_spot_value():
    assert client_delta(math.pi / 4, math.pi / 2, 1) == 7 * math.pi / 4


def test_delta_trivial_and_reduction():
    assert client_delta(0.0, 0.0, 0) == 0.0
    assert 0.0 <= client_delta(7 * math.pi / 4, 7 * math.pi / 4, 1) < 2 * math.pi


def test_delta_theta_shift_equivalence():
    """(phi', theta + pi, r xor 1) gives the same delta as (phi', theta, r)."""
    for kp in range(8):
        for kt in range(8):
            for r in (0, 1):
                d1 = client_delta(octant_angle(kp), octant_angle(kt), r)
                d2 = client_delta(octant_angle(kp), octant_angle(kt + 4),
                                  r ^ 1)
                assert angle_octant(d1) == angle_octant(d2)


def test_blindness_exhaustive():
    """delta is exactly uniform over the octants for every phi'."""
    for kp in range(8):
        hist = {}
        for kt in range(8):
            for r in (0, 1):
                k = angle_octant(client_delta(octant_angle(kp),
                                              octant_angle(kt), r))
                hist[k] = hist.get(k, 0) + 1
        assert hist == {k: 2 for k in range(8)}


def test_client_correct():
    assert client_correct(0, 1) == 1
    assert client_correct(1, 0) == 1
    assert client_correct(1, 1) == 0
    assert client_correct(0, 0) == 0


def test_angle_octant_rejects_off_grid():
    with pytest.raises(ValueError):
        angle_octant(0.3)


# -- preparation ----------------------------------------------------------

def test_client_prepare_octants(rng):
    phi = np.zeros((1, 1), dtype=int)
    secrets = ClientSecrets.sample(phi, rng)
    for k in range(8):
        secrets.theta_octants[0, 0] = k
        v = client_prepare(1, 1, secrets)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        assert v[0] == pytest.approx(1 / math.sqrt(2))
        assert v[1] == pytest.approx(np.exp(1j * k * math.pi / 4)
                                     / math.sqrt(2))


def test_theta_zero_is_plus_and_pi_is_minus(rng):
    secrets = ClientSecrets.sample(np.zeros((1, 1), dtype=int), rng)
    secrets.theta_octants[0, 0] = 0
    assert np.allclose(client_prepare(1, 1, secrets),
                       np.array([1, 1]) / math.sqrt(2))
    secrets.theta_octants[0, 0] = 4
    assert np.allclose(client_prepare(1, 1, secrets),
                       np.array([1, -1]) / math.sqrt(2))


# -- adaptation ---------------------------------------------------------------

def test_adapt_phi_no_priors_is_identity():
    g = brickwork_graph(3, 1)
    assert adapt_phi(0.7, 1, 1, {}, g, 3, 1) == pytest.approx(0.7)


def test_adapt_phi_sign_and_shift():
    g = brickwork_graph(4, 1)
    out = adapt_phi(0.7, 2, 1, {(1, 1): 1}, g, 4, 1)
    assert out == pytest.approx((-0.7) % (2 * math.pi))
    out = adapt_phi(0.7, 3, 1, {(1, 1): 1, (2, 1): 0}, g, 4, 1)
    assert out == pytest.approx(0.7 + math.pi)


def test_adapt_phi_flow_violation():
    g = brickwork_graph(4, 1)
    with pytest.raises(FlowViolation):
        adapt_phi(0.0, 3, 1, {(1, 1): 0}, g, 4, 1)  # (2,1) missing


def test_linear_cluster_reproduces_circuit():
    """Measuring a path at adapted angles implements the J(-phi) chain on
    the last qubit, deterministically across outcome histories."""
    phis = [0.3, 1.1, 2.0]
    n = len(phis) + 1
    graph = brickwork_graph(n, 1)
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)

    def j_gate(alpha):
        h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        return h @ np.diag([1.0, np.exp(1j * alpha)])

    circuit = plus.copy()
    for p in phis:
        circuit = j_gate(-p) @ circuit

    for seed in range(10):
        server = ServerState(n, 1, [plus] * n, graph)
        outcomes = {}
        rng = np.random.default_rng(seed)
        for x in range(1, n):
            pp = adapt_phi(phis[x - 1], x, 1, outcomes, graph, n, 1)
            outcomes[(x, 1)] = server_measure((x, 1), pp, server, rng=rng)
        v = server.state.v.reshape([2] * n)
        v = np.moveaxis(v, n - 1, 0).reshape(2, -1)
        out = v[:, int(np.argmax(np.linalg.norm(v, axis=0)))]
        out /= np.linalg.norm(out)
        sx = outcomes[(n - 1, 1)]
        sz = outcomes[(n - 2, 1)]
        corr = np.linalg.matrix_power(Z, sz) @ np.linalg.matrix_power(X, sx)
        out = corr @ out
        assert abs(np.vdot(out, circuit)) ** 2 == pytest.approx(1.0,
                                                                abs=1e-10)


# -- server ----------------------------------------------------------------

def test_server_measure_rejects_double_measurement(rng):
    g = brickwork_graph(2, 1)
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    server = ServerState(2, 1, [plus, plus], g)
    server_measure((1, 1), 0.0, server, rng=rng)
    with pytest.raises(AlreadyMeasured):
        server_measure((1, 1), 0.0, server, rng=rng)


def test_server_deterministic_on_matching_eigenstate(rng):
    g = brickwork_graph(1, 1)
    delta = octant_angle(3)
    state = np.array([1.0, np.exp(1j * delta)], dtype=complex) / math.sqrt(2)
    server = ServerState(1, 1, [state], g)
    assert server_measure((1, 1), delta, server, rng=rng) == 0


# -- full runs -----------------------------------------------------------

def test_all_zero_path_matches_direct_per_seed():
    phi = np.zeros((4, 1), dtype=int)
    for seed in range(20):
        blind, tr = run_blind_computation(phi, seed)
        direct, tag = run_direct_mbqc(np.zeros((4, 1)), seed)
        assert np.array_equal(blind, direct)
        assert tr.layout == tag


def test_blind_run_replayable():
    phi = np.array([[1, 3], [5, 0]])
    a1, t1 = run_blind_computation(phi, 42)
    a2, t2 = run_blind_computation(phi, 42)
    assert np.array_equal(a1, a2)
    assert t1.to_json_lines() == t2.to_json_lines()


def test_2x4_distribution_against_direct():
    rng = np.random.default_rng(0)
    phi = rng.integers(0, 8, size=(2, 4))
    angles = phi * math.pi / 4
    counts_b = {}
    counts_d = {}
    shots = 300
    for seed in range(shots):
        b, tr = run_blind_computation(phi, seed)
        d, _ = run_direct_mbqc(angles, seed)
        counts_b[b.tobytes()] = counts_b.get(b.tobytes(), 0) + 1
        counts_d[d.tobytes()] = counts_d.get(d.tobytes(), 0) + 1
        assert tr.layout == "fallback-cluster"
    keys = set(counts_b) | set(counts_d)
    tv = 0.5 * sum(abs(counts_b.get(k, 0) - counts_d.get(k, 0))
                   for k in keys) / shots
    assert tv < 0.05


def test_transcript_accounting_per_site():
    phi = np.zeros((2, 3), dtype=int)
    _, tr = run_blind_computation(phi, 7)
    sites = 6
    assert tr.covert_bits == sites * (2 + 3 + 1)
    assert tr.messages.bell_pairs_consumed == sites
    angle_msgs = [m for m in tr.messages.messages
                  if m.purpose == "measurement_angle"]
    outcome_msgs = [m for m in tr.messages.messages
                    if m.purpose == "raw_outcome"]
    assert len(angle_msgs) == sites and len(outcome_msgs) == sites
    assert all(len(m.bits) == 3 for m in angle_msgs)
    assert all(len(m.bits) == 1 for m in outcome_msgs)
    # column-major site order
    assert [(s.x, s.y) for s in tr.sites] == [
        (1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]


def test_blind_rejects_non_octant_pattern():
    with pytest.raises(ValueError):
        run_blind_computation(np.array([[0.5]]), 1)


def test_run_description_roundtrip(tmp_path):
    path = tmp_path / "run.json"
    phi = [[0, 1], [2, 3]]
    save_run_description(path, 2, 2, phi, seed=5)
    desc = load_run_description(path)
    assert desc["n"] == 2 and desc["m"] == 2 and desc["seed"] == 5
    assert np.array_equal(desc["phi_table"], phi)


def test_run_description_shape_check(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2, "m": 3, "phi_table": [[0]], "seed": 1}')
    with pytest.raises(ValueError):
        load_run_description(path)
