"""Delegated blind computation between a client and a quantum server.

Stage 1: the client prepares each site qubit as (|0> + e^{i theta}|1>)/sqrt2
with theta drawn from the eight octant angles, and teleports it to the
server, which entangles everything into the brickwork layout (or the
rectangular-cluster fallback when the column count does not admit bricks).
Stage 2 walks the sites in column order; per site the client sends a masked
angle delta = phi' + theta + pi*r (three bits), the server measures in the
equatorial delta basis and returns the raw outcome (one bit), and the
client strips the r mask.

Outcome sampling detail: a run draws one uniform per site from a substream
keyed by (seed, site) and thresholds it against the probability of the
*corrected* outcome, then hands the server the remasked raw bit.  The
per-message law is untouched, but a blind run and a direct run sharing a
seed then produce identical corrected outcomes, which makes paired-seed
comparisons exact instead of statistical.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AlreadyMeasured, FlowViolation
from .graphs import brickwork_graph
from .protocols import BellResource, Transcript, teleport_state
from .qsim import DenseState

OCTANT = math.pi / 4.0
TWO_PI = 2.0 * math.pi


def octant_angle(k):
    return (int(k) % 8) * OCTANT


def angle_octant(angle, tol=1e-9):
    """Octant index of an angle; rejects non-octant angles."""
    k = angle / OCTANT
    rk = round(k)
    if abs(k - rk) > tol:
        raise ValueError(f"angle {angle!r} is not an octant multiple")
    return int(rk) % 8


@dataclass
class ClientSecrets:
    """Per-site hiding angles and mask bits, plus the real pattern angles."""

    theta_octants: np.ndarray
    r_bits: np.ndarray
    phi_octants: np.ndarray

    @classmethod
    def sample(cls, phi_octants, rng):
        phi = np.asarray(phi_octants, dtype=int)
        return cls(theta_octants=rng.integers(0, 8, size=phi.shape),
                   r_bits=rng.integers(0, 2, size=phi.shape),
                   phi_octants=phi)

    def theta(self, x, y):
        return octant_angle(self.theta_octants[x - 1, y - 1])

    def r(self, x, y):
        return int(self.r_bits[x - 1, y - 1])

    def phi(self, x, y):
        return octant_angle(self.phi_octants[x - 1, y - 1])


def client_prepare(x, y, secrets, rng=None):
    """The site qubit (|0> + e^{i theta}|1>)/sqrt(2)."""
    theta = secrets.theta(x, y)
    return np.array([1.0, np.exp(1j * theta)], dtype=complex) / math.sqrt(2)


def client_delta(phi_prime, theta, r):
    """Masked measurement angle phi' + theta + pi*r, reduced into [0, 2pi)."""
    delta = (phi_prime + theta + math.pi * (r & 1)) % TWO_PI
    return delta


def client_correct(outcome, r):
    """Strip the pi-flip mask from the raw server outcome."""
    return int(outcome) ^ (int(r) & 1)


def _measured_before(site, other):
    """Column-major order predicate: was `site` measured before `other`?"""
    return site[0] < other[0] or (site[0] == other[0] and site[1] < other[1])


def adapt_phi(phi, x, y, outcomes, graph, n, m):
    """Measurement-angle adaptation from the layout's column flow.

    The flow maps each site one column to the right; the X dependency of
    (x, y) is its left neighbor's outcome and the Z dependencies are the
    sites whose flow image is adjacent to (x, y).
    """
    def vid(cx, cy):
        return (cx - 1) * m + (cy - 1)

    sx = 0
    if x > 1:
        dep = (x - 1, y)
        if dep not in outcomes:
            raise FlowViolation(f"X dependency {dep} of ({x}, {y}) unmeasured")
        sx = outcomes[dep]

    sz = 0
    neighbor_ids = graph.neighbors(vid(x, y))
    for nid in neighbor_ids:
        a, b = nid // m + 1, nid % m + 1
        k = (a - 1, b)
        if k == (x, y) or k[0] < 1:
            continue
        if k not in outcomes:
            if _measured_before(k, (x, y)):
                raise FlowViolation(
                    f"Z dependency {k} of ({x}, {y}) unmeasured")
            raise FlowViolation(
                f"Z dependency {k} of ({x}, {y}) violates the column flow")
        sz ^= outcomes[k]

    phi_prime = ((-phi if sx else phi) + math.pi * sz) % TWO_PI
    return phi_prime


class ServerState:
    """Server-side register: one qubit per site, entangled per the layout."""

    def __init__(self, n, m, qubit_vectors, graph):
        self.n = n
        self.m = m
        self.graph = graph
        self.measured = {}
        amps = np.array([1.0], dtype=complex)
        for v in qubit_vectors:
            amps = np.kron(amps, v)
        self.state = DenseState(n * m, amps)
        for u, v in graph.sorted_edges():
            self.state.apply("CZ", u, v)

    def qubit_of(self, site):
        x, y = site
        return (x - 1) * self.m + (y - 1)

    def probability_one(self, site, delta):
        return self.state.probability_one(self.qubit_of(site), basis=delta)


def server_measure(site, delta, server_state, rng=None, force=None):
    """Measure one site in the equatorial delta basis; returns the raw bit."""
    if site in server_state.measured:
        raise AlreadyMeasured(f"site {site} was already measured")
    rec = server_state.state.measure(server_state.qubit_of(site),
                                     basis=delta, rng=rng, force=force)
    server_state.measured[site] = rec.outcome
    return rec.outcome


@dataclass
class SiteRecord:
    x: int
    y: int
    delta_octant: int
    outcome: int
    corrected: int


@dataclass
class BlindTranscript:
    """Per-site exchange record plus the underlying message log."""

    sites: list = field(default_factory=list)
    messages: Transcript = field(default_factory=Transcript)
    layout: str = ""

    @property
    def covert_bits(self):
        return self.messages.covert_bits

    def to_json_lines(self):
        return self.messages.to_json_lines()


def _site_stream(seed, x, y):
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(2, x, y)))


def _sites_column_major(n, m):
    for x in range(1, n + 1):
        for y in range(1, m + 1):
            yield x, y


def run_blind_computation(phi_octants, seed):
    """Execute both protocol stages; returns corrected outcomes and a
    BlindTranscript whose layout field records the graph actually used."""
    raw = np.asarray(phi_octants)
    if not np.issubdtype(raw.dtype, np.integer):
        if not np.allclose(raw, np.round(raw), atol=1e-12):
            raise ValueError("blind runs accept octant integers only; use "
                             "run_direct_mbqc for arbitrary angles")
    phi = np.round(raw).astype(int)
    n, m = phi.shape
    secrets = ClientSecrets.sample(
        phi, np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(0,))))
    teleport_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(1,)))

    transcript = BlindTranscript()
    qubit_vectors = []
    for x, y in _sites_column_major(n, m):
        psi = client_prepare(x, y, secrets)
        out, tr = teleport_state(psi, BellResource.ideal("client", "server"),
                                 teleport_rng)
        transcript.messages.extend(tr)
        qubit_vectors.append(out)

    graph = brickwork_graph(n, m)
    transcript.layout = graph.tag
    server = ServerState(n, m, qubit_vectors, graph)

    outcomes = {}
    corrected = np.zeros((n, m), dtype=int)
    for x, y in _sites_column_major(n, m):
        phi_xy = secrets.phi(x, y)
        phi_p = adapt_phi(phi_xy, x, y, outcomes, graph, n, m)
        theta = secrets.theta(x, y)
        r = secrets.r(x, y)
        delta = client_delta(phi_p, theta, r)
        k_delta = angle_octant(delta)
        transcript.messages.send(
            "client", "server",
            ((k_delta >> 2) & 1, (k_delta >> 1) & 1, k_delta & 1),
            "measurement_angle")

        p_b1 = server.probability_one((x, y), delta)
        p_s1 = 1.0 - p_b1 if r else p_b1
        u = _site_stream(seed, x, y).random()
        s = int(u < p_s1)
        b = s ^ r
        server_measure((x, y), delta, server, force=b)
        transcript.messages.send("server", "client", (b,), "raw_outcome")

        assert client_correct(b, r) == s
        outcomes[(x, y)] = s
        corrected[x - 1, y - 1] = s
        transcript.sites.append(SiteRecord(x, y, k_delta, b, s))

    return corrected, transcript


def run_direct_mbqc(phi_angles, seed):
    """Unblinded reference run of the same pattern on the same layout.

    Accepts arbitrary real angles; shares the per-site sampling streams
    with run_blind_computation so paired seeds line up exactly.
    """
    phi = np.asarray(phi_angles, dtype=float)
    n, m = phi.shape
    graph = brickwork_graph(n, m)
    plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)
    server = ServerState(n, m, [plus] * (n * m), graph)

    outcomes = {}
    out = np.zeros((n, m), dtype=int)
    for x, y in _sites_column_major(n, m):
        phi_p = adapt_phi(phi[x - 1, y - 1], x, y, outcomes, graph, n, m)
        p1 = server.probability_one((x, y), phi_p)
        u = _site_stream(seed, x, y).random()
        s = int(u < p1)
        server_measure((x, y), phi_p, server, force=s)
        outcomes[(x, y)] = s
        out[x - 1, y - 1] = s
    return out, graph.tag


# ---------------------------------------------------------------------------
# run description files


def load_run_description(path):
    """Read {n, m, phi_table, seed}; phi_table holds octant integers."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    n, m = int(doc["n"]), int(doc["m"])
    phi = np.asarray(doc["phi_table"], dtype=int)
    if phi.shape != (n, m):
        raise ValueError(
            f"phi_table shape {phi.shape} does not match n={n}, m={m}")
    return {"n": n, "m": m, "phi_table": phi, "seed": int(doc["seed"])}


def save_run_description(path, n, m, phi_table, seed):
    doc = {"schema_version": 1, "n": n, "m": m,
           "phi_table": np.asarray(phi_table, dtype=int).tolist(),
           "seed": seed}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")
