"""Measure and distillation tests, each against an independent oracle:
magic-basis eigenvalues and a brute-force unitary grid for the singlet
fraction, the Bell-diagonal closed form for concurrence, and an explicit
two-copy density-matrix simulation for the recurrence step."""

import math

import numpy as np
import pytest

from conftest import random_density_2q
from covertqnet.entanglement import (BELL_VECTORS, BellDiagonalState,
                                     binary_entropy, clamp_positive,
                                     concurrence, distill_step,
                                     distill_to_target, eof,
                                     singlet_fraction, twirl_to_bell_diagonal,
                                     twirl_to_werner,
                                     werner_step_fidelity,
                                     x_state_singlet_fraction)
from covertqnet.errors import NotDistillable, StateNotPositive
from covertqnet.vacuum import amplified_state, correlation_integrals, \
    DetectorConfig

PHI_PLUS = BELL_VECTORS[0]


def bell_density(which=0):
    v = BELL_VECTORS[which]
    return np.outer(v, v.conj())


# -- independent oracle: fully entangled fraction -----------------------------

MAGIC = np.array([
    [1, 0, 0, 1],
    [1j, 0, 0, -1j],
    [0, 1j, 1j, 0],
    [0, 1, -1, 0],
], dtype=complex) / math.sqrt(2)


def fef_magic_basis(rho):
    """Largest eigenvalue of Re(rho) in the magic basis.

    Maximally entangled states are exactly the real unit combinations of
    the magic basis, so the maximal overlap is a symmetric eigenproblem.
    """
    m = MAGIC.conj() @ rho @ MAGIC.T
    return float(np.linalg.eigvalsh(0.5 * (m.real + m.real.T))[-1])


def fef_brute_force(rho, steps=40):
    """Grid search over one local unitary; coarse but optimizer-free."""
    best = 0.0
    for a in np.linspace(0, math.pi, steps):
        ca, sa = math.cos(a), math.sin(a)
        for b in np.linspace(0, 2 * math.pi, steps, endpoint=False):
            eb = np.exp(1j * b)
            for c in np.linspace(0, 2 * math.pi, steps, endpoint=False):
                ec = np.exp(1j * c)
                v = np.array([ca, eb * sa, -ec * sa, eb * ec * ca]) \
                    / math.sqrt(2)
                best = max(best, float(np.vdot(v, rho @ v).real))
    return best


def eq13_state(d, ell, n, lam2, sigma=1e-5):
    cfg = DetectorConfig(coupling_sq=lam2, gap=d / sigma, width=sigma,
                         separation=ell * sigma, iterations=n)
    J = correlation_integrals(cfg, 1e-10)
    return J, amplified_state(J, n, lam2)


# -- clamping ------------------------------------------------------------

def test_clamp_accepts_exact_states():
    rho = bell_density()
    out = clamp_positive(rho, 1e-8)
    assert np.allclose(out, rho, atol=1e-14)


def test_clamp_repairs_small_negativity():
    rho = bell_density()
    rho = rho - 1e-9 * np.diag([1.0, -1.0, -1.0, 1.0])
    out = clamp_positive(rho, 1e-6)
    assert np.linalg.eigvalsh(out)[0] >= -1e-15
    assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)


def test_clamp_rejects_large_negativity():
    rho = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
    with pytest.raises(StateNotPositive):
        clamp_positive(rho, 1e-3)


# -- singlet fraction -------------------------------------------------------

def test_singlet_fraction_bell_state(rng):
    assert singlet_fraction(bell_density(), rng=rng) == pytest.approx(
        1.0, abs=1e-9)


def test_singlet_fraction_maximally_mixed(rng):
    assert singlet_fraction(np.eye(4) / 4.0, rng=rng) == pytest.approx(
        0.25, abs=1e-9)


def test_singlet_fraction_matches_x_state_closed_form(rng):
    J, st = eq13_state(d=1.0, ell=0.5, n=500, lam2=0.01)
    rho = clamp_positive(st.to_matrix(), st.psd_slack)
    closed = x_state_singlet_fraction(
        rho[0, 0].real, rho[1, 1].real, rho[2, 2].real, rho[3, 3].real,
        rho[0, 3], rho[1, 2])
    opt = singlet_fraction(st.to_matrix(), psd_slack=st.psd_slack, rng=rng)
    assert opt == pytest.approx(closed, abs=1e-8)
    # and both against the coarse brute-force grid
    assert opt >= fef_brute_force(rho, steps=24) - 1e-6


@pytest.mark.parametrize("seed", range(12))
def test_singlet_fraction_matches_magic_basis_oracle(seed):
    rng = np.random.default_rng(seed)
    rho = random_density_2q(rng)
    opt = singlet_fraction(rho, rng=rng)
    assert opt == pytest.approx(fef_magic_basis(rho), abs=1e-7)


def test_singlet_fraction_local_unitary_invariance(rng):
    rho = random_density_2q(rng)
    base = singlet_fraction(rho, rng=rng)
    for _ in range(4):
        ua = _random_unitary(rng)
        ub = _random_unitary(rng)
        u = np.kron(ua, ub)
        rotated = u @ rho @ u.conj().T
        assert singlet_fraction(rotated, rng=rng) == pytest.approx(
            base, abs=1e-8)


def _random_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_singlet_fraction_range(rng):
    for seed in range(5):
        rho = random_density_2q(np.random.default_rng(seed))
        f = singlet_fraction(rho, rng=rng)
        assert 0.25 - 1e-9 <= f <= 1.0


# -- concurrence and EOF ------------------------------------------------------

def test_concurrence_bell_and_product():
    assert concurrence(bell_density()) == pytest.approx(1.0, abs=1e-12)
    product = np.zeros((4, 4), dtype=complex)
    product[0, 0] = 1.0
    assert concurrence(product) == 0.0


def test_concurrence_bell_diagonal_closed_form():
    p = (0.75, 0.25 / 3, 0.25 / 3, 0.25 / 3)
    rho = BellDiagonalState(p).to_matrix()
    assert concurrence(rho) == pytest.approx(0.5, abs=1e-12)
    # closed form 2 p_max - 1 for Bell-diagonal states with p_max > 1/2
    for p_max in (0.6, 0.8, 0.95):
        w = BellDiagonalState.werner(p_max)
        assert concurrence(w.to_matrix()) == pytest.approx(
            2 * p_max - 1, abs=1e-12)


def test_concurrence_local_unitary_invariance(rng):
    rho = random_density_2q(rng)
    base = concurrence(rho)
    u = np.kron(_random_unitary(rng), _random_unitary(rng))
    assert concurrence(u @ rho @ u.conj().T) == pytest.approx(base,
                                                              abs=1e-10)


def test_eof_endpoints_and_derived_value():
    assert eof(np.diag([1.0, 0, 0, 0]).astype(complex)) == 0.0
    assert eof(bell_density()) == pytest.approx(1.0, abs=1e-12)
    # independent evaluation of h((1 + sqrt(1 - 1/4)) / 2)
    x = (1.0 + math.sqrt(0.75)) / 2.0
    expected = -x * math.log2(x) - (1 - x) * math.log2(1 - x)
    rho = BellDiagonalState((0.75, 0.25 / 3, 0.25 / 3, 0.25 / 3)).to_matrix()
    assert eof(rho) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.3545789026652699, abs=1e-12)


def test_eof_zero_iff_concurrence_zero(rng):
    for seed in range(20):
        rho = random_density_2q(np.random.default_rng(seed))
        c = concurrence(rho)
        e = eof(rho)
        assert (e == 0.0) == (c == 0.0)
        if c > 0:
            assert e > 0


def test_binary_entropy_edges():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == 1.0


# -- twirl ----------------------------------------------------------------

def test_twirl_bell_state():
    out = twirl_to_bell_diagonal(bell_density())
    assert out.p[0] == pytest.approx(1.0, abs=1e-9)


def test_twirl_maximally_mixed():
    out = twirl_to_bell_diagonal(np.eye(4) / 4)
    assert np.allclose(out.p, 0.25, atol=1e-9)


def test_twirl_preserves_singlet_fraction_on_extraction_states(rng):
    J, st = eq13_state(d=1.0, ell=0.8, n=400, lam2=0.01)
    f = singlet_fraction(st.to_matrix(), psd_slack=st.psd_slack, rng=rng)
    out = twirl_to_bell_diagonal(st.to_matrix(), psd_slack=st.psd_slack,
                                 rng=rng)
    assert out.p[0] == pytest.approx(f, abs=1e-7)
    raw = 0.5 + 400 * 0.01 * (abs(J.j2) - J.j1)
    # clamping the unphysical first-order corner shifts F at O((n lam2)^2)
    assert out.p[0] == pytest.approx(raw, abs=10 * (400 * 0.01) ** 2 * 0.01)


def test_twirl_never_increases_concurrence():
    for seed in range(1000):
        rho = random_density_2q(np.random.default_rng(seed))
        before = concurrence(rho)
        after_p = twirl_to_bell_diagonal(rho).p
        after = max(0.0, 2.0 * max(after_p) - 1.0)
        assert after <= before + 1e-8


def test_twirl_to_werner_puts_fraction_first(rng):
    rho = random_density_2q(rng)
    w = twirl_to_werner(rho, rng=rng)
    assert w.p[0] == pytest.approx(singlet_fraction(rho, rng=rng), abs=1e-8)
    assert w.p[1] == w.p[2] == w.p[3]


# -- distillation --------------------------------------------------------

def test_distill_step_fixed_points():
    for f in (0.5, 1.0):
        w = BellDiagonalState.werner(f)
        _, out = distill_step(w, w)
        assert out.p[0] == pytest.approx(f, abs=1e-12)
    assert werner_step_fidelity(0.5) == pytest.approx(0.5, abs=1e-12)
    assert werner_step_fidelity(1.0) == pytest.approx(1.0, abs=1e-12)


def test_distill_step_werner_075():
    w = BellDiagonalState.werner(0.75)
    prob, out = distill_step(w, w)
    assert out.p[0] == pytest.approx(41.0 / 52.0, abs=1e-12)
    assert prob == pytest.approx(13.0 / 18.0, abs=1e-12)


def test_distill_step_matches_two_copy_density_oracle():
    rng = np.random.default_rng(9)
    for _ in range(8):
        pa = rng.dirichlet(np.ones(4))
        pb = rng.dirichlet(np.ones(4))
        p_o, w_o = _dejmps_oracle(pa, pb)
        p_m, out = distill_step(BellDiagonalState(tuple(pa)),
                                BellDiagonalState(tuple(pb)))
        assert p_m == pytest.approx(p_o, abs=1e-10)
        assert np.allclose(out.p, w_o, atol=1e-10)


def test_distill_map_strictly_increasing_on_open_interval():
    grid = np.linspace(0.5, 1.0, 13)[1:-1]  # 11 interior points
    out = [werner_step_fidelity(f) for f in grid]
    assert all(o > f for f, o in zip(grid, out))
    assert all(b > a for a, b in zip(out, out[1:]))


def test_distill_to_target_cases():
    trace = distill_to_target(0.9, 0.89)
    assert trace.rounds == 0 and trace.pairs_consumed == 1

    trace = distill_to_target(0.51, 0.6)
    f, rounds = 0.51, 0
    while f < 0.6:
        f = werner_step_fidelity(f)
        rounds += 1
    assert trace.rounds == rounds
    assert trace.pairs_consumed == 2 ** rounds
    assert trace.fidelities[-1] == pytest.approx(f, abs=1e-12)

    with pytest.raises(NotDistillable):
        distill_to_target(0.5, 0.9)
    with pytest.raises(ValueError):
        distill_to_target(0.75, 1.0)


def test_distill_expected_pairs_accounting():
    trace = distill_to_target(0.75, 0.9)
    expected = 1.0
    for p in trace.success_probs:
        expected *= 2.0 / p
    assert trace.expected_pairs == pytest.approx(expected, rel=1e-12)
    assert trace.expected_pairs >= trace.pairs_consumed


def test_distill_trace_json_roundtrip():
    import json
    doc = json.loads(distill_to_target(0.8, 0.95).to_json())
    assert set(doc) == {"rounds", "pairs_consumed", "expected_pairs",
                        "fidelity", "success_prob"}
    assert len(doc["fidelity"]) == doc["rounds"] + 1


# explicit DEJMPS oracle: local sqrt(iX) rotations, bilateral CNOT,
# coincidence postselection on the second pair
def _dejmps_oracle(pa, pb):
    I2 = np.eye(2)
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    ua = (I2 - 1j * X) / math.sqrt(2)
    ub = (I2 + 1j * X) / math.sqrt(2)

    def kron(*ms):
        out = np.array([[1.0 + 0j]])
        for m in ms:
            out = np.kron(out, m)
        return out

    def cnot(n, c, t):
        u = np.zeros((2 ** n, 2 ** n), dtype=complex)
        for i in range(2 ** n):
            j = i ^ (1 << (n - 1 - t)) if (i >> (n - 1 - c)) & 1 else i
            u[j, i] = 1
        return u

    rho1 = sum(w * np.outer(v, v.conj()) for w, v in zip(pa, BELL_VECTORS))
    rho2 = sum(w * np.outer(v, v.conj()) for w, v in zip(pb, BELL_VECTORS))
    rho = np.kron(rho1, rho2)  # qubits A1 B1 A2 B2
    rot = kron(ua, ub, ua, ub)
    rho = rot @ rho @ rot.conj().T
    cn = cnot(4, 0, 2) @ cnot(4, 1, 3)
    rho = cn @ rho @ cn.conj().T
    out = np.zeros((4, 4), dtype=complex)
    p_succ = 0.0
    for meas in (0, 3):  # equal outcomes on (A2, B2)
        proj = np.zeros((4, 4))
        proj[meas, meas] = 1.0
        sub = np.kron(np.eye(4), proj) @ rho @ np.kron(np.eye(4), proj)
        p_succ += np.trace(sub).real
        out += np.einsum("ikjk->ij", sub.reshape(4, 4, 4, 4))
    out /= p_succ
    return p_succ, np.array([np.vdot(v, out @ v).real for v in BELL_VECTORS])
