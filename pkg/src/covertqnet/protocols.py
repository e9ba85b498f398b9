"""Covert teleportation suite.

Each protocol consumes BellResources exactly once, runs its circuit on a
pure-state fast path when everything in play is pure, or on a small density
matrix otherwise, and logs every classical message in a Transcript.
Correction bits are always transmitted, identity corrections included, so
transcript lengths never depend on the data being moved.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .entanglement import BELL_VECTORS
from .errors import (CapExceeded, EndpointMismatch, ResourceDepleted,
                     TopologyError)
from .qsim import dense

_BELL_PHI_P = BELL_VECTORS[0]

# Bell outcomes indexed by correction bits (z, x): apply Z^z X^x to repair
_BELL_ORDER = {(0, 0): 0, (1, 0): 1, (0, 1): 2, (1, 1): 3}

_X = dense.GATES_1Q["X"]
_Z = dense.GATES_1Q["Z"]


@dataclass
class Message:
    seq: int
    sender: str
    receiver: str
    bits: tuple
    purpose: str


@dataclass
class Transcript:
    """Ordered log of covert classical messages and consumed Bell pairs."""

    messages: list = field(default_factory=list)
    bell_pairs_consumed: int = 0

    @property
    def covert_bits(self):
        return sum(len(m.bits) for m in self.messages)

    def send(self, sender, receiver, bits, purpose):
        self.messages.append(Message(seq=len(self.messages), sender=sender,
                                     receiver=receiver,
                                     bits=tuple(int(b) for b in bits),
                                     purpose=purpose))

    def extend(self, other):
        """Absorb another transcript, renumbering its messages."""
        for m in other.messages:
            self.send(m.sender, m.receiver, m.bits, m.purpose)
        self.bell_pairs_consumed += other.bell_pairs_consumed

    def to_json_lines(self):
        lines = []
        for m in self.messages:
            lines.append(json.dumps(
                {"seq": m.seq, "from": m.sender, "to": m.receiver,
                 "bits": list(m.bits), "purpose": m.purpose},
                sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class BellResource:
    """A shared two-qubit state, usable exactly once.

    `state` is a 4x4 density matrix or None for an exact Bell pair;
    `fidelity` is the singlet fraction the producer certified.
    """

    endpoints: tuple
    fidelity: float
    provenance: str
    state: object = None
    consumed: bool = False

    PROVENANCES = ("vacuum_extracted", "distilled", "ideal")

    def __post_init__(self):
        if self.endpoints[0] == self.endpoints[1]:
            raise EndpointMismatch("resource endpoints must be distinct")
        if self.provenance not in self.PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @classmethod
    def ideal(cls, a, b):
        return cls(endpoints=(a, b), fidelity=1.0, provenance="ideal")

    @classmethod
    def werner(cls, a, b, fidelity, provenance="distilled"):
        rest = (1.0 - fidelity) / 3.0
        state = sum(w * np.outer(v, v.conj()) for w, v in
                    zip((fidelity, rest, rest, rest), BELL_VECTORS))
        return cls(endpoints=(a, b), fidelity=fidelity,
                   provenance=provenance, state=state)

    def is_pure_ideal(self):
        return self.state is None

    def density(self):
        if self.state is None:
            return np.outer(_BELL_PHI_P, _BELL_PHI_P.conj())
        return np.asarray(self.state, dtype=complex)

    def consume(self):
        if self.consumed:
            raise ResourceDepleted(
                f"resource {self.endpoints} already consumed")
        self.consumed = True

    def oriented(self, first):
        """Same resource with `first` as the left endpoint.

        Swapping the endpoint order exchanges the two tensor factors.
        """
        if self.endpoints[0] == first:
            return self
        if self.endpoints[1] != first:
            raise EndpointMismatch(
                f"{first} is not an endpoint of {self.endpoints}")
        state = self.state
        if state is not None:
            swap = np.zeros((4, 4))
            swap[0, 0] = swap[3, 3] = swap[1, 2] = swap[2, 1] = 1.0
            state = swap @ state @ swap
        out = BellResource(endpoints=(self.endpoints[1], self.endpoints[0]),
                           fidelity=self.fidelity,
                           provenance=self.provenance, state=state)
        out.consumed = self.consumed
        # share the consumed flag through the original
        out._source = self
        return out


def _consume(resource):
    src = getattr(resource, "_source", None)
    (src or resource).consume()
    resource.consumed = True


def _as_density(state):
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    return state


def _bell_probabilities_vec(v, n, q0, q1):
    """Overlap vectors with each Bell state on (q0, q1); returns per-outcome
    (probability, reduced vector on the remaining qubits)."""
    t = v.reshape([2] * n)
    t = np.moveaxis(t, (q0, q1), (0, 1)).reshape(4, -1)
    outcomes = []
    for bv in BELL_VECTORS:
        w = bv.conj() @ t
        outcomes.append((float(np.vdot(w, w).real), w))
    return outcomes


def _bell_measure_density(rho, n, q0, q1, rng, transcript_bits=None):
    """Bell measurement on two qubits of an n-qubit density matrix.

    Returns (z, x, reduced density on the remaining qubits).
    """
    probs = []
    projected = []
    for bv in BELL_VECTORS:
        proj = dense.embed_operator(np.outer(bv, bv.conj()), [q0, q1], n)
        sub = proj @ rho @ proj
        probs.append(max(np.trace(sub).real, 0.0))
        projected.append(sub)
    probs = np.array(probs)
    probs /= probs.sum()
    k = int(rng.choice(4, p=probs))
    keep = [q for q in range(n) if q not in (q0, q1)]
    reduced = dense.partial_trace(projected[k], keep, n)
    reduced /= np.trace(reduced).real
    z, x = [(zz, xx) for (zz, xx), idx in _BELL_ORDER.items()
            if idx == k][0]
    return z, x, reduced


def _correction(z, x):
    c = np.eye(2, dtype=complex)
    if x:
        c = _X @ c
    if z:
        c = _Z @ c
    return c


def teleport_state(input_state, resource, rng):
    """Teleport one qubit through a Bell resource.

    Two covert bits travel from the sender endpoint to the receiver; with
    an exact resource the output equals the input exactly.
    """
    _consume(resource)
    sender, receiver = resource.endpoints
    transcript = Transcript(bell_pairs_consumed=1)
    inp = np.asarray(input_state, dtype=complex)

    if inp.ndim == 1 and resource.is_pure_ideal():
        v = np.kron(inp, _BELL_PHI_P)
        outcomes = _bell_probabilities_vec(v, 3, 0, 1)
        probs = np.array([p for p, _ in outcomes])
        probs /= probs.sum()
        k = int(rng.choice(4, p=probs))
        (z, x) = [zx for zx, idx in _BELL_ORDER.items() if idx == k][0]
        w = outcomes[k][1]
        out = _correction(z, x) @ (w / np.linalg.norm(w))
    else:
        rho = np.kron(_as_density(inp), resource.density())
        z, x, red = _bell_measure_density(rho, 3, 0, 1, rng)
        c = _correction(z, x)
        out = c @ red @ c.conj().T

    transcript.send(sender, receiver, (z, x), "teleport_correction")
    return out, transcript


def teleport_cnot(control_state, target_state, resource, rng):
    """Gate-teleport a CNOT between the two resource endpoints.

    One forward bit (sender to receiver) and one backward bit; the joint
    output is ordered (control, target).
    """
    _consume(resource)
    sender, receiver = resource.endpoints
    transcript = Transcript(bell_pairs_consumed=1)

    ctl = np.asarray(control_state, dtype=complex)
    tgt = np.asarray(target_state, dtype=complex)
    pure = ctl.ndim == 1 and tgt.ndim == 1 and resource.is_pure_ideal()

    if pure:
        st = dense.DenseState(4, np.kron(np.kron(ctl, _BELL_PHI_P), tgt))
        st.apply("CNOT", 0, 1)
        a = st.measure(1, basis="Z", rng=rng).outcome
        if a:
            st.apply("X", 2)
        st.apply("CNOT", 2, 3)
        b = st.measure(2, basis="X", rng=rng).outcome
        if b:
            st.apply("Z", 0)
        # qubits 1 and 2 are collapsed, so (0, 3) factors out
        out = _extract_pure_factor(st.v, 4, keep=(0, 3))
    else:
        rho = np.kron(np.kron(_as_density(ctl), resource.density()),
                      _as_density(tgt))
        rho = dense.apply_unitary_density(rho, _cnot_u(), [0, 1], 4)
        a, rho = _measure_density(rho, 4, 1, "Z", rng)
        if a:
            rho = dense.apply_unitary_density(rho, _X, [2], 4)
        rho = dense.apply_unitary_density(rho, _cnot_u(), [2, 3], 4)
        b, rho = _measure_density(rho, 4, 2, "X", rng)
        if b:
            rho = dense.apply_unitary_density(rho, _Z, [0], 4)
        out = dense.partial_trace(rho, [0, 3], 4)
        out /= np.trace(out).real

    transcript.send(sender, receiver, (a,), "cnot_forward")
    transcript.send(receiver, sender, (b,), "cnot_backward")
    return out, transcript


def _cnot_u():
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = u[1, 1] = u[2, 3] = u[3, 2] = 1.0
    return u


def _measure_density(rho, n, qubit, basis, rng):
    """Projective single-qubit measurement on a density matrix."""
    if basis == "Z":
        u = np.eye(2, dtype=complex)
    elif basis == "X":
        u = dense.GATES_1Q["H"]
    else:
        raise ValueError(f"unsupported density measurement basis {basis!r}")
    # rotate so the basis becomes computational
    rho = dense.apply_unitary_density(rho, u.conj().T, [qubit], n)
    p0 = np.zeros((2, 2), dtype=complex)
    p0[0, 0] = 1.0
    p1 = np.zeros((2, 2), dtype=complex)
    p1[1, 1] = 1.0
    proj0 = dense.embed_operator(p0, [qubit], n)
    prob0 = max((proj0 @ rho).trace().real, 0.0)
    outcome = int(rng.random() >= prob0)
    proj = dense.embed_operator(p1 if outcome else p0, [qubit], n)
    rho = proj @ rho @ proj
    rho /= np.trace(rho).real
    rho = dense.apply_unitary_density(rho, u, [qubit], n)
    return outcome, rho


def _extract_pure_factor(v, n, keep):
    """Pull the pure state of `keep` qubits out of a product-form vector."""
    t = v.reshape([2] * n)
    others = [q for q in range(n) if q not in keep]
    t = np.moveaxis(t, keep, range(len(keep)))
    flat = t.reshape(1 << len(keep), -1)
    # collapsed qubits make this a product: every column is proportional
    # to the kept factor, so take the best-conditioned one
    norms = np.linalg.norm(flat, axis=0)
    col = int(np.argmax(norms))
    out = flat[:, col]
    return out / np.linalg.norm(out)


def one_bit_teleport(kind, input_state, rng, parties=("alice", "bob")):
    """One-bit teleportation primitive; a single covert bit either way.

    kind "X": ancilla |+>, CNOT ancilla->input, Z-measure, X correction.
    kind "Z": ancilla |0>, CNOT input->ancilla, X-measure, Z correction.
    """
    k = kind.upper()[0]
    if k not in ("X", "Z"):
        raise ValueError(f"unknown primitive kind {kind!r}")
    transcript = Transcript()
    inp = np.asarray(input_state, dtype=complex)
    pure = inp.ndim == 1

    if pure:
        if k == "X":
            st = dense.DenseState(2, np.kron(inp, np.array([1, 1]) / math.sqrt(2)))
            st.apply("CNOT", 1, 0)
            m = st.measure(0, basis="Z", rng=rng).outcome
            if m:
                st.apply("X", 1)
            out = _extract_pure_factor(st.v, 2, keep=(1,))
        else:
            st = dense.DenseState(2, np.kron(inp, np.array([1, 0], dtype=complex)))
            st.apply("CNOT", 0, 1)
            m = st.measure(0, basis="X", rng=rng).outcome
            if m:
                st.apply("Z", 1)
            out = _extract_pure_factor(st.v, 2, keep=(1,))
    else:
        if k == "X":
            anc = np.full((2, 2), 0.5, dtype=complex)
            rho = np.kron(_as_density(inp), anc)
            rho = dense.apply_unitary_density(rho, _cnot_u(),
                                              [1, 0], 2)
            m, rho = _measure_density(rho, 2, 0, "Z", rng)
            if m:
                rho = dense.apply_unitary_density(rho, _X, [1], 2)
        else:
            anc = np.zeros((2, 2), dtype=complex)
            anc[0, 0] = 1.0
            rho = np.kron(_as_density(inp), anc)
            rho = dense.apply_unitary_density(rho, _cnot_u(), [0, 1], 2)
            m, rho = _measure_density(rho, 2, 0, "X", rng)
            if m:
                rho = dense.apply_unitary_density(rho, _Z, [1], 2)
        out = dense.partial_trace(rho, [1], 2)
        out /= np.trace(out).real

    transcript.send(parties[0], parties[1], (m,),
                    f"one_bit_{k.lower()}_correction")
    return out, transcript


def entanglement_swap(a, b, rng):
    """Swap two pairs sharing a middle node into one end-to-end pair.

    Bell measurement at the middle node, two covert bits to the far end,
    Pauli repair there.
    """
    from . import entanglement

    shared = set(a.endpoints) & set(b.endpoints)
    if len(shared) != 1:
        raise EndpointMismatch(
            f"resources {a.endpoints} and {b.endpoints} must share exactly "
            "one node")
    mid = shared.pop()
    a = a.oriented(first=[e for e in a.endpoints if e != mid][0])
    b = b.oriented(first=mid)
    left, right = a.endpoints[0], b.endpoints[1]

    _consume(a)
    _consume(b)
    transcript = Transcript(bell_pairs_consumed=2)

    if a.is_pure_ideal() and b.is_pure_ideal():
        # exact pairs swap to an exact pair for every outcome
        z, x = int(rng.random() < 0.5), int(rng.random() < 0.5)
        out = BellResource.ideal(left, right)
    else:
        rho = np.kron(a.density(), b.density())
        z, x, red = _bell_measure_density(rho, 4, 1, 2, rng)
        c = dense.embed_operator(_correction(z, x), [1], 2)
        red = c @ red @ c.conj().T
        fid = entanglement.singlet_fraction(red)
        out = BellResource(endpoints=(left, right), fidelity=fid,
                           provenance="distilled", state=red)

    transcript.send(mid, right, (z, x), "swap_correction")
    return out, transcript


@dataclass
class MultipartiteResource:
    """A k-party shared state produced by merging Bell pairs."""

    parties: tuple
    state: object
    consumed: bool = False

    def consume(self):
        if self.consumed:
            raise ResourceDepleted(f"resource {self.parties} already consumed")
        self.consumed = True


MAX_GHZ_PARTIES = 8


def build_ghz_from_bell(k, resources, rng):
    """Merge k-1 Bell pairs spanning k parties into one GHZ-type resource.

    The pairs must form a spanning tree over the parties; each merge sends
    one covert bit from the merge node to the newly attached party.
    """
    resources = list(resources)
    if len(resources) != k - 1:
        raise TopologyError(f"need {k - 1} resources for {k} parties, "
                            f"got {len(resources)}")
    if k > MAX_GHZ_PARTIES:
        raise CapExceeded(f"GHZ construction capped at {MAX_GHZ_PARTIES} "
                          "parties")
    parties = set()
    for r in resources:
        parties.update(r.endpoints)
    if len(parties) != k:
        raise TopologyError(
            f"resources span {len(parties)} parties, expected {k}")

    transcript = Transcript()
    if k == 2:
        r = resources[0]
        _consume(r)
        transcript.bell_pairs_consumed = 1
        return (MultipartiteResource(parties=tuple(r.endpoints),
                                     state=r.density()), transcript)

    first = resources[0]
    _consume(first)
    transcript.bell_pairs_consumed = 1
    absorbed = list(first.endpoints)
    rho = first.density()
    remaining = resources[1:]

    while remaining:
        pick = None
        for r in remaining:
            inside = [e for e in r.endpoints if e in absorbed]
            outside = [e for e in r.endpoints if e not in absorbed]
            if len(inside) == 1 and len(outside) == 1:
                pick = (r, inside[0], outside[0])
                break
            if len(inside) == 2:
                raise TopologyError("resources contain a cycle")
        if pick is None:
            raise TopologyError("resources do not connect the parties")
        r, u, w = pick
        remaining.remove(r)
        r = r.oriented(first=u)
        _consume(r)
        transcript.bell_pairs_consumed += 1

        m = len(absorbed)
        rho = np.kron(rho, r.density())     # qubits: absorbed..., pu, pw
        n = m + 2
        rho = dense.apply_unitary_density(rho, _cnot_u(),
                                          [absorbed.index(u), m], n)
        outcome, rho = _measure_density(rho, n, m, "Z", rng)
        keep = [q for q in range(n) if q != m]
        rho = dense.partial_trace(rho, keep, n)
        rho /= np.trace(rho).real
        n -= 1
        if outcome:
            rho = dense.apply_unitary_density(rho, _X, [n - 1], n)
        transcript.send(u, w, (outcome,), "ghz_merge")
        absorbed.append(w)

    return MultipartiteResource(parties=tuple(absorbed), state=rho), transcript


def ghz_vector(k):
    v = np.zeros(1 << k, dtype=complex)
    v[0] = v[-1] = 1.0 / math.sqrt(2.0)
    return v
