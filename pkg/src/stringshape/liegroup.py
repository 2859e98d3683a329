"""Small-matrix SO(3)/SE(3) kernel and a 4th-order Magnus integrator.

Twists are 6-vectors ordered [angular; linear].  Poses are 4x4 homogeneous
matrices.  The backbone frame field T(s) satisfies T'(s) = T(s) @ hat6(eta(s))
with eta(s) = [u(s); e3], where u is the local curvature and e3 the unit
tangent, so the integrator below is written for right-multiplied systems.
"""

from __future__ import annotations

import numpy as np

E3 = np.array([0.0, 0.0, 1.0])

# Switch point for the small-rotation Taylor branches of exp/Rodrigues.  The
# 4-term series is exact to double precision below this angle, and the trig
# branch above it avoids the 1-cos cancellation via the half-angle form.
SMALL_ANGLE = 1e-4


def hat(v):
    """3-vector -> skew-symmetric matrix, hat(v) @ w == cross(v, w)."""
    v = np.asarray(v, dtype=float)
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def vee(m):
    """Inverse of hat."""
    m = np.asarray(m, dtype=float)
    return np.array([m[2, 1], m[0, 2], m[1, 0]])


def hat6(t):
    """Twist -> 4x4 se(3) matrix (angular block top-left, linear top-right)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros((4, 4))
    out[:3, :3] = hat(t[:3])
    out[:3, 3] = t[3:]
    return out


def vee6(m):
    """Inverse of hat6."""
    m = np.asarray(m, dtype=float)
    return np.array([m[2, 1], m[0, 2], m[1, 0], m[0, 3], m[1, 3], m[2, 3]])


def ad(t):
    """Adjoint representation of a twist: ad(a) @ b is the se(3) bracket [a, b]."""
    t = np.asarray(t, dtype=float)
    w, v = hat(t[:3]), hat(t[3:])
    out = np.zeros((6, 6))
    out[:3, :3] = w
    out[3:, 3:] = w
    out[3:, :3] = v
    return out


def _rot_coeffs(theta):
    """(sin t/t, (1-cos t)/t^2, (t-sin t)/t^3) with Taylor branches near zero."""
    if theta < SMALL_ANGLE:
        t2 = theta * theta
        a = 1.0 - t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0))
        b = 0.5 * (1.0 - t2 / 12.0 * (1.0 - t2 / 30.0 * (1.0 - t2 / 56.0)))
        c = (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0))) / 6.0
        return a, b, c
    s = np.sin(theta)
    half = np.sin(0.5 * theta)
    b = 2.0 * half * half / (theta * theta)   # (1-cos)/theta^2 without cancellation
    return s / theta, b, (theta - s) / theta**3


def exp_so3(w):
    """Rodrigues rotation from a rotation vector."""
    w = np.asarray(w, dtype=float)
    theta = np.linalg.norm(w)
    a, b, _ = _rot_coeffs(theta)
    wh = hat(w)
    return np.eye(3) + a * wh + b * (wh @ wh)


def exp_se3(psi):
    """Exponential map se(3) -> SE(3), returned as a 4x4 homogeneous matrix."""
    psi = np.asarray(psi, dtype=float)
    w, v = psi[:3], psi[3:]
    theta = np.linalg.norm(w)
    a, b, c = _rot_coeffs(theta)
    wh = hat(w)
    wh2 = wh @ wh
    rot = np.eye(3) + a * wh + b * wh2
    vmat = np.eye(3) + b * wh + c * wh2
    out = np.eye(4)
    out[:3, :3] = rot
    out[:3, 3] = vmat @ v
    return out


def inv_pose(pose):
    """Inverse of a homogeneous transform without a general 4x4 solve."""
    rot = pose[:3, :3]
    out = np.eye(4)
    out[:3, :3] = rot.T
    out[:3, 3] = -rot.T @ pose[:3, 3]
    return out


def adjoint(pose):
    """Ad(T): transforms twists between frames, [omega; v] ordering."""
    rot = pose[:3, :3]
    out = np.zeros((6, 6))
    out[:3, :3] = rot
    out[3:, 3:] = rot
    out[3:, :3] = hat(pose[:3, 3]) @ rot
    return out


def dexp_se3(psi, dpsi, tol=1e-17, max_terms=60):
    """Right-trivialized differential of exp at psi applied to dpsi.

    Evaluates sum_k (-1)^k/(k+1)! ad(psi)^k @ dpsi, so that
    d/de exp(psi + e*dpsi)|_0 = exp_se3(psi) @ hat6(dexp_se3(psi, dpsi)).
    Accepts dpsi of shape (6,) or (6, k); the series is summed until the
    next term falls below tol relative to the accumulated norm.
    """
    dpsi = np.asarray(dpsi, dtype=float)
    a = ad(psi)
    term = dpsi.copy()
    out = dpsi.copy()
    scale = max(np.abs(out).max(), 1.0)
    for k in range(1, max_terms):
        term = (a @ term) / -(k + 1)
        out = out + term
        tmax = np.abs(term).max()
        scale = max(scale, np.abs(out).max())
        if tmax < tol * scale:
            break
    return out


# Gauss-Legendre collocation points (offsets within a step of size h).
_GL_LO = 0.5 - np.sqrt(3.0) / 6.0
_GL_HI = 0.5 + np.sqrt(3.0) / 6.0
_BRACKET = np.sqrt(3.0) / 12.0


def magnus_step(curvature_fn, s0, h):
    """4th-order Magnus element Psi for one step of T' = T hat6([u; e3]).

    Two-point collocation: Psi = (h/2)(eta1 + eta2) + (sqrt(3) h^2/12)[eta1, eta2]
    with eta_j sampled at the Gauss-Legendre points of [s0, s0+h].  The bracket
    order follows the right-multiplied convention of the backbone ODE; the
    reversed order drops the scheme to second order.
    """
    if h <= 0:
        raise ValueError("step size must be positive")
    e1 = np.concatenate([np.asarray(curvature_fn(s0 + _GL_LO * h), dtype=float), E3])
    e2 = np.concatenate([np.asarray(curvature_fn(s0 + _GL_HI * h), dtype=float), E3])
    return 0.5 * h * (e1 + e2) + (_BRACKET * h * h) * (ad(e1) @ e2)


def integrate_backbone(curvature_fn, length, n_steps, base=None):
    """Product-of-exponentials integration of the backbone frame field.

    Returns an (n_steps+1, 4, 4) array of poses on the uniform arc-length grid
    covering [0, length], with poses[0] equal to base (identity by default).
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    h = length / n_steps
    pose = np.eye(4) if base is None else np.asarray(base, dtype=float).copy()
    out = np.empty((n_steps + 1, 4, 4))
    out[0] = pose
    for i in range(n_steps):
        pose = pose @ exp_se3(magnus_step(curvature_fn, i * h, h))
        out[i + 1] = pose
    return out
