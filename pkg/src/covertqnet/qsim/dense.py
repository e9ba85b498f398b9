"""Dense state-vector backend plus small density-matrix utilities.

Qubit 0 is the most significant bit of the amplitude index, so tensor
products read left to right.  Gate application goes through the compiled
kernels when available.  The density-matrix helpers are plain numpy; they
exist for protocol simulations on mixed resources, which stay below a
dozen qubits.
"""

import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import CapExceeded, DimensionMismatch, UnsupportedOnBackend

MAX_DENSE_QUBITS = 22
_DET_TOL = 1e-12

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
GATES_1Q = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
}


@dataclass
class MeasurementRecord:
    """Outcome of one single-qubit measurement.

    basis is "Z", "X", "Y" or an equatorial angle in radians; was_random is
    False when the Born probability was 0 or 1 within tolerance.
    """

    qubit: int
    basis: object
    outcome: int
    was_random: bool


def _equatorial_angle(basis):
    """Map a basis descriptor to an equatorial angle, or None for Z."""
    if isinstance(basis, str):
        b = basis.upper()
        if b == "Z":
            return None
        if b == "X":
            return 0.0
        if b == "Y":
            return 0.5 * math.pi
        raise ValueError(f"unknown basis {basis!r}")
    return float(basis)


class DenseState:
    """Pure state of up to MAX_DENSE_QUBITS qubits."""

    def __init__(self, qubit_count, amplitudes=None):
        if qubit_count < 1 or qubit_count > MAX_DENSE_QUBITS:
            raise CapExceeded(
                f"dense backend supports 1..{MAX_DENSE_QUBITS} qubits, "
                f"got {qubit_count}")
        self.n = qubit_count
        if amplitudes is None:
            self.v = np.zeros(1 << qubit_count, dtype=complex)
            self.v[0] = 1.0
        else:
            v = np.ascontiguousarray(amplitudes, dtype=complex)
            if v.shape != (1 << qubit_count,):
                raise DimensionMismatch(
                    f"need {1 << qubit_count} amplitudes, got {v.shape}")
            self.v = v

    @classmethod
    def from_amplitudes(cls, amplitudes):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        n = int(round(math.log2(amplitudes.size)))
        if 1 << n != amplitudes.size:
            raise DimensionMismatch("amplitude count is not a power of two")
        return cls(n, amplitudes)

    @classmethod
    def plus_states(cls, qubit_count):
        v = np.full(1 << qubit_count, (1.0 / math.sqrt(2)) ** qubit_count,
                    dtype=complex)
        return cls(qubit_count, v)

    def copy(self):
        return DenseState(self.n, self.v.copy())

    def norm(self):
        return float(np.linalg.norm(self.v))

    def _check_targets(self, targets):
        if len(set(targets)) != len(targets):
            raise ValueError("gate targets must be distinct")
        for q in targets:
            if not 0 <= q < self.n:
                raise ValueError(f"qubit {q} out of range for n={self.n}")

    def apply(self, gate, *targets, angle=None):
        """Apply a named gate in place; returns self for chaining."""
        g = gate.upper()
        self._check_targets(targets)
        if g in ("X", "Y", "H"):
            (q,) = targets
            u = GATES_1Q[g]
            kernels.apply_1q(self.v, self.n, q, u[0, 0], u[0, 1],
                             u[1, 0], u[1, 1])
        elif g == "Z":
            (q,) = targets
            kernels.apply_diag1q(self.v, self.n, q, 1.0, -1.0)
        elif g == "S":
            (q,) = targets
            kernels.apply_diag1q(self.v, self.n, q, 1.0, 1j)
        elif g == "T":
            (q,) = targets
            kernels.apply_diag1q(self.v, self.n, q, 1.0,
                                 np.exp(1j * math.pi / 4))
        elif g == "RZ":
            (q,) = targets
            if angle is None:
                raise ValueError("RZ needs an angle")
            kernels.apply_diag1q(self.v, self.n, q,
                                 np.exp(-0.5j * angle), np.exp(0.5j * angle))
        elif g == "PHASE":
            (q,) = targets
            if angle is None:
                raise ValueError("PHASE needs an angle")
            kernels.apply_diag1q(self.v, self.n, q, 1.0, np.exp(1j * angle))
        elif g == "CNOT":
            c, t = targets
            kernels.apply_cnot(self.v, self.n, c, t)
        elif g == "CZ":
            a, b = targets
            mask = (1 << (self.n - 1 - a)) | (1 << (self.n - 1 - b))
            kernels.apply_phase_mask(self.v, self.n, mask, -1.0)
        elif g == "CCZ":
            a, b, c = targets
            mask = ((1 << (self.n - 1 - a)) | (1 << (self.n - 1 - b))
                    | (1 << (self.n - 1 - c)))
            kernels.apply_phase_mask(self.v, self.n, mask, -1.0)
        else:
            raise ValueError(f"unknown gate {gate!r}")
        return self

    def apply_unitary(self, u, q):
        """Apply an arbitrary 2x2 unitary to one qubit."""
        u = np.asarray(u, dtype=complex)
        kernels.apply_1q(self.v, self.n, q, u[0, 0], u[0, 1], u[1, 0],
                         u[1, 1])
        return self

    def probability_one(self, qubit, basis="Z"):
        """Born probability of outcome 1 in the given basis."""
        angle = _equatorial_angle(basis)
        if angle is None:
            return kernels.z_prob(self.v, self.n, qubit)
        work = self.copy()
        work._enter_equatorial(qubit, angle)
        return kernels.z_prob(work.v, work.n, qubit)

    def _enter_equatorial(self, qubit, angle):
        # map |+_angle> -> |0>: apply H . P(-angle)
        kernels.apply_diag1q(self.v, self.n, qubit, 1.0, np.exp(-1j * angle))
        u = GATES_1Q["H"]
        kernels.apply_1q(self.v, self.n, qubit, u[0, 0], u[0, 1], u[1, 0],
                         u[1, 1])

    def _leave_equatorial(self, qubit, angle):
        u = GATES_1Q["H"]
        kernels.apply_1q(self.v, self.n, qubit, u[0, 0], u[0, 1], u[1, 0],
                         u[1, 1])
        kernels.apply_diag1q(self.v, self.n, qubit, 1.0, np.exp(1j * angle))

    def measure(self, qubit, basis="Z", rng=None, force=None):
        """Measure one qubit; collapses in place and returns a record.

        force=0/1 projects onto that outcome instead of sampling (the
        caller owns the probability bookkeeping in that case).
        """
        angle = _equatorial_angle(basis)
        if angle is not None:
            self._enter_equatorial(qubit, angle)
        p1 = kernels.z_prob(self.v, self.n, qubit)
        if force is not None:
            outcome = int(force)
            was_random = _DET_TOL < p1 < 1.0 - _DET_TOL
        elif p1 < _DET_TOL:
            outcome, was_random = 0, False
        elif p1 > 1.0 - _DET_TOL:
            outcome, was_random = 1, False
        else:
            if rng is None:
                raise ValueError("random outcome requires an rng")
            outcome = int(rng.random() < p1)
            was_random = True
        kept = kernels.project_z(self.v, self.n, qubit, outcome)
        if kept <= 0.0:
            raise ValueError("projected onto a zero-probability branch")
        self.v /= math.sqrt(kept)
        if angle is not None:
            self._leave_equatorial(qubit, angle)
        return MeasurementRecord(qubit=qubit, basis=basis, outcome=outcome,
                                 was_random=was_random)

    def to_density(self):
        return np.outer(self.v, self.v.conj())


# ---------------------------------------------------------------------------
# density-matrix utilities (numpy; small systems only)


def _qubit_count_of(obj):
    size = obj.shape[0]
    n = int(round(math.log2(size)))
    if 1 << n != size:
        raise DimensionMismatch("operand size is not a power of two")
    return n


def embed_operator(op, targets, n):
    """Expand an operator on `targets` to the full n-qubit space."""
    op = np.asarray(op, dtype=complex)
    k = len(targets)
    if op.shape != (1 << k, 1 << k):
        raise DimensionMismatch("operator size does not match target count")
    others = [q for q in range(n) if q not in targets]
    perm = list(targets) + others
    # operator acting as op on targets, identity elsewhere, in permuted order
    full = np.kron(op, np.eye(1 << len(others), dtype=complex))
    t = full.reshape([2] * (2 * n))
    inv = np.argsort(perm)
    axes = [int(inv[q]) for q in range(n)]
    t = t.transpose(axes + [a + n for a in axes])
    return t.reshape(1 << n, 1 << n)


def apply_unitary_density(rho, u, targets, n):
    full = embed_operator(u, targets, n)
    return full @ rho @ full.conj().T


def partial_trace(rho, keep, n=None):
    """Reduced density operator on the `keep` qubits (in ascending order)."""
    rho = np.asarray(rho, dtype=complex)
    if n is None:
        n = _qubit_count_of(rho)
    keep = sorted(keep)
    if not keep:
        raise ValueError("keep set must be nonempty")
    t = rho.reshape([2] * (2 * n))
    traced = [q for q in range(n) if q not in keep]
    for q in sorted(traced, reverse=True):
        t = np.trace(t, axis1=q, axis2=q + (t.ndim // 2))
    k = len(keep)
    return t.reshape(1 << k, 1 << k)


def fidelity(a, b):
    """Uhlmann fidelity (squared-overlap convention) of states or densities."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    na = _qubit_count_of(a)
    nb = _qubit_count_of(b)
    if na != nb:
        raise DimensionMismatch(f"qubit counts differ: {na} vs {nb}")
    if a.ndim == 1 and b.ndim == 1:
        return float(abs(np.vdot(a, b)) ** 2)
    if a.ndim == 1:
        return float(np.vdot(a, b @ a).real)
    if b.ndim == 1:
        return float(np.vdot(b, a @ b).real)
    vals, vecs = np.linalg.eigh(0.5 * (a + a.conj().T))
    sq = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.conj().T
    inner = sq @ b @ sq
    ivals = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(np.sum(np.sqrt(np.clip(ivals, 0.0, None))) ** 2)
