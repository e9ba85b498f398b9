"""Vacuum-extraction channel for a pair of two-level detectors.

Two inertial detectors with Gaussian switching windows couple weakly to the
field vacuum; after tracing the field out, the pair is left in an X-form
two-qubit state built from three correlation integrals.  Iterating the
extract-and-reset cycle n times multiplies the perturbation by n, which is
how a minute correlation is amplified into a distillable resource.

Everything here is computed in dimensionless variables: with window width
sigma, gap delta and separation L (c = 1, so L is a light-travel time in
seconds), the integrals depend only on d = sigma*delta and ell = L/sigma.
The integrands are smooth apart from the sin(ell*x) oscillation, which the
adaptive Gauss-Kronrod driver handles by seeding panels at the half-period
scale pi/ell.
"""

import heapq
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NonConvergence, PerturbativeBreakdown

DEFAULT_TOL = 1e-10

# adaptive-quadrature budgets; exceeding either signals pathological inputs
MAX_INITIAL_PANELS = 16384
MAX_SPLITS = 4096


@dataclass(frozen=True)
class DetectorConfig:
    """Physical parameters of one extraction link.

    coupling_sq  dimensionless squared coupling of each detector
    gap          detector energy gap as an angular frequency, 1/s
    width        Gaussian window width sigma, s
    separation   detector distance L in light-seconds (c = 1)
    iterations   number of extract-and-reset cycles n
    """

    coupling_sq: float
    gap: float
    width: float
    separation: float
    iterations: int

    def __post_init__(self):
        if self.coupling_sq <= 0:
            raise ValueError("coupling_sq must be positive")
        if self.coupling_sq > 0.1:
            warnings.warn("coupling_sq above 0.1 strains the perturbative "
                          "regime", stacklevel=2)
        if self.width <= 0:
            raise ValueError("width must be positive")
        if self.separation < 0:
            raise ValueError("separation must be nonnegative")
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")

    def replace(self, **kw):
        d = dict(coupling_sq=self.coupling_sq, gap=self.gap, width=self.width,
                 separation=self.separation, iterations=self.iterations)
        d.update(kw)
        return DetectorConfig(**d)


@dataclass(frozen=True)
class CorrelationIntegrals:
    """The three window-weighted vacuum correlation integrals.

    j1 drives the local excitation probability and is nonnegative; j2 and
    j3 carry the cross-detector coherences.  quadrature_error is the summed
    |K15 - G7| bound over the final panel set, guaranteed <= the tolerance
    the producing call was given.
    """

    j1: float
    j2: complex
    j3: complex
    quadrature_error: float


@dataclass
class TwoQubitXState:
    """Two-qubit state with support on the diagonal and anti-diagonal only.

    Populations (a1, a2, b2, b1) sit on |00>, |01>, |10>, |11>; c1 is the
    upper-right |00><11| entry and c2 the |01><10| entry.  psd_slack records
    how negative an eigenvalue may legitimately be for states assembled from
    a first-order perturbation (the measures layer clamps within it).
    """

    a1: float
    a2: float
    b2: float
    b1: float
    c1: complex
    c2: complex
    psd_slack: float = 0.0

    def validate(self, atol=1e-12):
        tr = self.a1 + self.a2 + self.b2 + self.b1
        if abs(tr - 1.0) > atol:
            raise ValueError(f"trace {tr!r} != 1")
        if abs(self.c1) ** 2 > self.a1 * self.b1 + self.psd_slack:
            raise ValueError("|c1|^2 exceeds a1*b1 beyond the positivity slack")
        if abs(self.c2) ** 2 > self.a2 * self.b2 + self.psd_slack:
            raise ValueError("|c2|^2 exceeds a2*b2 beyond the positivity slack")
        return self

    def to_matrix(self):
        """Assemble the 4x4 density matrix; Hermitian by construction."""
        m = np.zeros((4, 4), dtype=complex)
        m[0, 0] = self.a1
        m[1, 1] = self.a2
        m[2, 2] = self.b2
        m[3, 3] = self.b1
        m[0, 3] = self.c1
        m[3, 0] = np.conj(self.c1)
        m[1, 2] = self.c2
        m[2, 1] = np.conj(self.c2)
        return m


def window_fourier(omega, width):
    """Fourier transform of the Gaussian switching window.

    Returns width*sqrt(pi)*exp(-(width*omega)^2 / 4); strictly positive and
    even in omega.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    omega = np.asarray(omega, dtype=float)
    out = width * math.sqrt(math.pi) * np.exp(-0.25 * (width * omega) ** 2)
    return float(out) if out.ndim == 0 else out


def _adaptive_gk(which, d, ell, x_max, tol):
    """Adaptive GK15 integration of integrand `which` on [0, x_max].

    Returns (value, error_bound).  Splits the worst panel until the summed
    error estimate is below tol; raises NonConvergence when the panel or
    split budget is exhausted.
    """
    oscillatory = which != 0 and ell > 1.0
    if oscillatory:
        n0 = int(math.ceil(x_max * ell / math.pi))
        if n0 > MAX_INITIAL_PANELS:
            raise NonConvergence(
                f"{n0} oscillation panels needed on [0, {x_max:.3g}] "
                f"(ell={ell:.3g}); exceeds budget {MAX_INITIAL_PANELS}")
        n0 = max(n0, 8)
    else:
        n0 = 8
    edges = np.linspace(0.0, x_max, n0 + 1)
    a = edges[:-1].copy()
    b = edges[1:].copy()
    k15, g7 = kernels.gk15_panels(which, a, b, d, ell)
    errs = np.abs(k15 - g7)

    heap = []
    for i in range(n0):
        heapq.heappush(heap, (-errs[i], i, a[i], b[i], k15[i]))
    total_err = float(errs.sum())
    total_val = complex(k15.sum())
    counter = n0

    splits = 0
    while total_err > tol:
        if splits >= MAX_SPLITS:
            raise NonConvergence(
                f"error bound {total_err:.3e} still above tol {tol:.3e} "
                f"after {splits} panel splits")
        neg_err, _, pa, pb, pval = heapq.heappop(heap)
        mid = 0.5 * (pa + pb)
        na = np.array([pa, mid])
        nb = np.array([mid, pb])
        nk, ng = kernels.gk15_panels(which, na, nb, d, ell)
        nerr = np.abs(nk - ng)
        total_err += float(nerr.sum()) - (-neg_err)
        total_val += complex(nk.sum()) - pval
        for i in range(2):
            heapq.heappush(heap, (-nerr[i], counter, na[i], nb[i], nk[i]))
            counter += 1
        splits += 1
    return total_val, total_err


def correlation_integrals(config, tol=DEFAULT_TOL):
    """Evaluate the three correlation integrals for one detector config.

    The integrals are functions of (gap*width, separation/width) only; the
    result is dimensionless.  Raises NonConvergence if the adaptive scheme
    cannot certify the requested absolute tolerance.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    d = config.gap * config.width
    ell = config.separation / config.width
    # truncate where exp(-x^2/2) falls two decades below tol
    w_cut = math.sqrt(2.0 * math.log(100.0 / tol)) + 1.0
    x_max = d + w_cut

    v1, e1 = _adaptive_gk(0, d, ell, x_max, tol)
    v2, e2 = _adaptive_gk(1, d, ell, x_max, tol)
    v3, e3 = _adaptive_gk(2, d, ell, x_max, tol)
    j1 = max(v1.real, 0.0)
    return CorrelationIntegrals(j1=j1, j2=complex(v2), j3=complex(v3),
                                quadrature_error=max(e1, e2, e3))


def amplified_state(J, n, coupling_sq):
    """X-form state of the detector pair after n extraction cycles.

    First order in the squared coupling: populations shift by n*coupling_sq
    times the correlation integrals while the trace stays exactly 1.  Raises
    PerturbativeBreakdown when n*coupling_sq*j1 >= 0.5, where first order
    stops being meaningful.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    eff = n * coupling_sq
    if eff * J.j1 >= 0.5:
        raise PerturbativeBreakdown(
            f"n*coupling_sq*j1 = {eff * J.j1:.3g} >= 0.5")
    state = TwoQubitXState(
        a1=1.0 - 2.0 * eff * J.j1,
        a2=eff * J.j1,
        b2=eff * J.j1,
        b1=0.0,
        c1=-eff * np.conj(J.j2),
        c2=eff * J.j3,
        psd_slack=10.0 * eff * eff,
    )
    return state.validate()


@dataclass
class SweepRow:
    """One (separation, iterations) point of a distance sweep."""

    L_seconds: float
    n: int
    F: float = math.nan
    EOF: float = math.nan
    j1: float = math.nan
    j2: complex = complex(math.nan, math.nan)
    j3: complex = complex(math.nan, math.nan)
    quad_err: float = math.nan
    error: str | None = None


def sweep_distance(config_template, L_grid, n_list, tol=DEFAULT_TOL):
    """Sweep separation and iteration count; rows come back in grid order.

    A NonConvergence or PerturbativeBreakdown on one row is recorded in the
    row's `error` field instead of aborting the sweep.
    """
    from . import entanglement

    L_grid = list(L_grid)
    n_list = list(n_list)
    if not L_grid or not n_list:
        raise ValueError("grids must be nonempty")

    rows = []
    for L in L_grid:
        cfg = config_template.replace(separation=L)
        try:
            J = correlation_integrals(cfg, tol)
        except NonConvergence as exc:
            for n in n_list:
                rows.append(SweepRow(L_seconds=L, n=n, error=str(exc)))
            continue
        for n in n_list:
            row = SweepRow(L_seconds=L, n=n, j1=J.j1, j2=J.j2, j3=J.j3,
                           quad_err=J.quadrature_error)
            try:
                state = amplified_state(J, n, cfg.coupling_sq)
                rho = state.to_matrix()
                row.F = entanglement.singlet_fraction(
                    rho, psd_slack=state.psd_slack,
                    rng=np.random.default_rng(0))
                row.EOF = entanglement.eof(rho, psd_slack=state.psd_slack)
            except PerturbativeBreakdown as exc:
                row.error = str(exc)
            rows.append(row)
    return rows


SWEEP_CSV_HEADER = "L_seconds,n,F,EOF,j1,j2_re,j2_im,j3_re,j3_im,quad_err"
SWEEP_SCHEMA_VERSION = 1


def format_sweep_csv(rows):
    """Render sweep rows as CSV text, floats at 17 significant digits."""
    lines = [f"# schema_version={SWEEP_SCHEMA_VERSION}", SWEEP_CSV_HEADER]
    for r in rows:
        vals = [r.L_seconds, float(r.n), r.F, r.EOF, r.j1,
                r.j2.real, r.j2.imag, r.j3.real, r.j3.imag, r.quad_err]
        lines.append(",".join(f"{v:.17g}" for v in vals))
    return "\n".join(lines) + "\n"


def write_sweep_csv(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_sweep_csv(rows))
