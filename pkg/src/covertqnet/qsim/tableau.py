"""Stabilizer tableau backend for Clifford circuits.

Binary symplectic tableau with n destabilizer rows, n stabilizer rows and
one scratch row, each row a signed Pauli.  All gate updates are O(n) column
operations; measurement and Pauli-expectation queries use the standard
row-multiplication bookkeeping.
"""

import numpy as np

from ..errors import UnsupportedOnBackend
from .dense import MeasurementRecord

_CLIFFORD_GATES = {"X", "Z", "H", "S", "CZ", "CNOT"}


class StabilizerTableau:
    """Stabilizer state of n qubits, initialized to |0...0>."""

    def __init__(self, n):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = n
        rows = 2 * n + 1  # last row is scratch space
        self.x = np.zeros((rows, n), dtype=np.uint8)
        self.z = np.zeros((rows, n), dtype=np.uint8)
        self.r = np.zeros(rows, dtype=np.uint8)
        idx = np.arange(n)
        self.x[idx, idx] = 1          # destabilizers X_i
        self.z[n + idx, idx] = 1      # stabilizers Z_i

    def copy(self):
        t = StabilizerTableau.__new__(StabilizerTableau)
        t.n = self.n
        t.x = self.x.copy()
        t.z = self.z.copy()
        t.r = self.r.copy()
        return t

    # -- gates ------------------------------------------------------------

    def apply(self, gate, *targets, angle=None):
        g = gate.upper()
        if g not in _CLIFFORD_GATES:
            raise UnsupportedOnBackend(
                f"{gate} is not available on the tableau backend")
        if g == "H":
            (q,) = targets
            self.r ^= self.x[:, q] & self.z[:, q]
            self.x[:, q], self.z[:, q] = (self.z[:, q].copy(),
                                          self.x[:, q].copy())
        elif g == "S":
            (q,) = targets
            self.r ^= self.x[:, q] & self.z[:, q]
            self.z[:, q] ^= self.x[:, q]
        elif g == "X":
            (q,) = targets
            self.r ^= self.z[:, q]
        elif g == "Z":
            (q,) = targets
            self.r ^= self.x[:, q]
        elif g == "CNOT":
            c, t = targets
            self.r ^= (self.x[:, c] & self.z[:, t]
                       & (self.x[:, t] ^ self.z[:, c] ^ 1))
            self.x[:, t] ^= self.x[:, c]
            self.z[:, c] ^= self.z[:, t]
        elif g == "CZ":
            c, t = targets
            self.apply("H", t)
            self.apply("CNOT", c, t)
            self.apply("H", t)
        return self

    # -- row algebra --------------------------------------------------------

    def _rowsum(self, h, i):
        """Row h <- row i * row h with exact sign tracking."""
        xi = self.x[i].astype(np.int8)
        zi = self.z[i].astype(np.int8)
        xh = self.x[h].astype(np.int8)
        zh = self.z[h].astype(np.int8)
        # exponent of the imaginary unit produced per column
        g = (xi & zi) * (zh - xh) \
            + (xi & (zi ^ 1)) * (zh * (2 * xh - 1)) \
            + ((xi ^ 1) & zi) * (xh * (1 - 2 * zh))
        phase = (2 * int(self.r[h]) + 2 * int(self.r[i]) + int(g.sum())) % 4
        self.r[h] = phase // 2
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def _anticommutes(self, row, px, pz):
        return int((self.x[row] & pz).sum() + (self.z[row] & px).sum()) & 1

    # -- measurement ----------------------------------------------------------

    def measure(self, qubit, basis="Z", rng=None):
        """Measure a Pauli basis on one qubit; collapses the tableau."""
        b = basis.upper() if isinstance(basis, str) else None
        if b == "Z":
            return self._measure_z(qubit, rng)
        if b == "X":
            self.apply("H", qubit)
            rec = self._measure_z(qubit, rng)
            self.apply("H", qubit)
            return MeasurementRecord(qubit, "X", rec.outcome, rec.was_random)
        if b == "Y":
            for _ in range(3):     # S^3 = S dagger
                self.apply("S", qubit)
            self.apply("H", qubit)
            rec = self._measure_z(qubit, rng)
            self.apply("H", qubit)
            self.apply("S", qubit)
            return MeasurementRecord(qubit, "Y", rec.outcome, rec.was_random)
        raise UnsupportedOnBackend(
            f"tableau backend measures Pauli bases only, got {basis!r}")

    def _measure_z(self, q, rng):
        n = self.n
        stab = np.nonzero(self.x[n:2 * n, q])[0]
        if stab.size:
            p = int(stab[0]) + n
            for i in range(2 * n):
                if i != p and self.x[i, q]:
                    self._rowsum(i, p)
            self.x[p - n] = self.x[p]
            self.z[p - n] = self.z[p]
            self.r[p - n] = self.r[p]
            self.x[p] = 0
            self.z[p] = 0
            self.z[p, q] = 1
            if rng is None:
                raise ValueError("random outcome requires an rng")
            outcome = int(rng.random() < 0.5)
            self.r[p] = outcome
            return MeasurementRecord(q, "Z", outcome, True)
        # deterministic: accumulate the matching stabilizers in scratch
        s = 2 * n
        self.x[s] = 0
        self.z[s] = 0
        self.r[s] = 0
        for i in range(n):
            if self.x[i, q]:
                self._rowsum(s, i + n)
        return MeasurementRecord(q, "Z", int(self.r[s]), False)

    # -- queries ----------------------------------------------------------

    def expectation_pauli(self, px, pz, negative=False):
        """Expectation of a signed Pauli: +1, -1 or 0 (random).

        px, pz are length-n bit arrays; a (1, 1) column means Y.  The sign
        convention matches the tableau rows: `negative` multiplies by -1.
        """
        px = np.asarray(px, dtype=np.uint8)
        pz = np.asarray(pz, dtype=np.uint8)
        n = self.n
        for i in range(n, 2 * n):
            if self._anticommutes(i, px, pz):
                return 0
        s = 2 * n
        self.x[s] = 0
        self.z[s] = 0
        self.r[s] = 0
        for i in range(n):
            if self._anticommutes(i, px, pz):
                self._rowsum(s, i + n)
        if not (np.array_equal(self.x[s], px)
                and np.array_equal(self.z[s], pz)):
            raise AssertionError("Pauli commutes but is not in the group")
        sign = int(self.r[s]) ^ int(negative)
        return -1 if sign else 1

    def stabilizer_rows(self):
        """(x bits, z bits, sign bit) for each of the n stabilizers."""
        n = self.n
        return [(self.x[n + i].copy(), self.z[n + i].copy(),
                 int(self.r[n + i])) for i in range(n)]

    def to_statevector(self, max_qubits=14, seed=0):
        """Materialize as a dense vector by stabilizer-group projection."""
        from .dense import DenseState

        if self.n > max_qubits:
            raise UnsupportedOnBackend(
                f"statevector export capped at {max_qubits} qubits")
        dim = 1 << self.n
        rng = np.random.default_rng(seed)
        for _ in range(8):
            v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            for px, pz, rbit in self.stabilizer_rows():
                pv = _apply_pauli_vector(v, px, pz, self.n)
                if rbit:
                    pv = -pv
                v = 0.5 * (v + pv)
            norm = np.linalg.norm(v)
            if norm > 1e-6:
                return DenseState(self.n, v / norm)
        raise AssertionError("projector product vanished on 8 seeds")


def _apply_pauli_vector(v, px, pz, n):
    """Apply a Pauli row (Y where both bits set) to a dense vector."""
    out = v.copy()
    idx = np.arange(out.size)
    flip = 0
    for q in range(n):
        if px[q]:
            flip |= 1 << (n - 1 - q)
    phase = np.ones(out.size, dtype=complex)
    for q in range(n):
        bit = (idx >> (n - 1 - q)) & 1
        if px[q] and pz[q]:          # Y = [[0,-i],[i,0]]
            phase = phase * np.where(bit, -1j, 1j)
        elif pz[q]:
            phase = phase * np.where(bit, -1.0, 1.0)
    # amplitude at index i comes from i^flip, with the phase of the source
    out = v[idx ^ flip] * phase[idx ^ flip]
    return out
