"""Pure-numpy implementations of the hot kernels.

Same call signatures as the compiled modules (_quadcore, _densecore); the
package selects one implementation at import time.  State vectors are flat
complex128 arrays of length 2**n with qubit 0 the most significant bit.
"""

import numpy as np

# 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1].
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# 15 ascending nodes; Gauss weights are nonzero on the odd Kronrod nodes
# and the centre.
GK_NODES = np.concatenate([-_XGK, [0.0], _XGK[::-1]])
GK_WEIGHTS_K = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
GK_WEIGHTS_G = np.zeros(15)
GK_WEIGHTS_G[[1, 3, 5]] = _WG[:3]
GK_WEIGHTS_G[7] = _WG[3]
GK_WEIGHTS_G[[9, 11, 13]] = _WG[2::-1]

_INV_4PI = 1.0 / (4.0 * np.pi)


def _integrand(which, x, d, ell):
    """Dimensionless correlation integrands.

    which=0: x exp(-(x+d)^2/2) / 4pi                       (real)
    which=1: exp(-(x^2+d^2)/2) e^{i ell (d-x)} sin(ell x)/ell / 4pi
    which=2: exp(-(x+d)^2/2)   e^{i ell (d-x)} sin(ell x)/ell / 4pi
    where sin(ell x)/ell degenerates to x at ell = 0.
    """
    if which == 0:
        return (x * np.exp(-0.5 * (x + d) ** 2) * _INV_4PI).astype(complex)
    if ell == 0.0:
        osc = x.astype(complex)
    else:
        osc = np.exp(1j * ell * (d - x)) * (np.sin(ell * x) / ell)
    if which == 1:
        env = np.exp(-0.5 * (x * x + d * d))
    else:
        env = np.exp(-0.5 * (x + d) ** 2)
    return env * osc * _INV_4PI


def gk15_panels(which, a, b, d, ell):
    """Evaluate Gauss-Kronrod 15(7) sums on a batch of panels [a_i, b_i].

    Returns (k15, g7) complex arrays; |k15 - g7| is the per-panel error
    estimate used by the adaptive driver.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * GK_NODES[None, :]
    f = _integrand(which, x, d, ell)
    k15 = h * (f @ GK_WEIGHTS_K)
    g7 = h * (f @ GK_WEIGHTS_G)
    return k15, g7


# ---------------------------------------------------------------------------
# dense state-vector kernels


def apply_1q(v, n, q, u00, u01, u10, u11):
    """Apply a single-qubit unitary in place to flat state vector v."""
    view = v.reshape(1 << q, 2, -1)
    x0 = view[:, 0, :].copy()
    x1 = view[:, 1, :]
    view[:, 0, :] = u00 * x0 + u01 * x1
    view[:, 1, :] = u10 * x0 + u11 * x1


def apply_diag1q(v, n, q, d0, d1):
    view = v.reshape(1 << q, 2, -1)
    if d0 != 1.0:
        view[:, 0, :] *= d0
    if d1 != 1.0:
        view[:, 1, :] *= d1


def apply_cnot(v, n, c, t):
    view = v.reshape([2] * n)
    idx = [slice(None)] * n
    idx[c] = 1
    sub = view[tuple(idx)]
    # target axis shifts left by one if it followed the collapsed control axis
    ta = t if t < c else t - 1
    sub0 = np.take(sub, 0, axis=ta).copy()
    sl0 = [slice(None)] * (n - 1)
    sl1 = [slice(None)] * (n - 1)
    sl0[ta] = 0
    sl1[ta] = 1
    sub[tuple(sl0)] = sub[tuple(sl1)]
    sub[tuple(sl1)] = sub0


def apply_phase_mask(v, n, mask, phase):
    """Multiply by `phase` every amplitude whose index has all mask bits set."""
    idx = np.arange(v.shape[0])
    v[(idx & mask) == mask] *= phase


def z_prob(v, n, q):
    """Probability that qubit q reads 1 in the computational basis."""
    view = v.reshape(1 << q, 2, -1)
    return float(np.sum(np.abs(view[:, 1, :]) ** 2))


def project_z(v, n, q, outcome):
    """Zero out the branch with qubit q != outcome; return kept norm^2."""
    view = v.reshape(1 << q, 2, -1)
    view[:, 1 - outcome, :] = 0.0
    return float(np.sum(np.abs(view[:, outcome, :]) ** 2))
