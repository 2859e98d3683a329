"""String/tendon length models, sensing Jacobians, and shape reconstruction.

Measurements are path lengths (or length changes) of strings routed along the
backbone; a sensor array may also expose composite channels that sum several
member strings with signs, as happens for capstan-coupled actuation tendon
pairs.  Reconstruction solves lengths(c) = measured for the modal coefficients:
exactly for linear-class arrays (constant-pitch paths, torsion-free basis,
where the configuration-space Jacobian is constant) and by damped Gauss-Newton
otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import liegroup
from .liegroup import E3
from .modal import curvature
from .routing import ConstantPitch, path_velocity, tangential_margin


class NotRealizableError(ValueError):
    """A string path develops a cusp at this configuration."""

    def __init__(self, margin, string_index=None):
        self.margin = margin
        self.string_index = string_index
        where = "" if string_index is None else f" (string {string_index})"
        super().__init__(f"string path not realizable{where}: min tangential rate {margin:.3e} <= 0")


class SingularDesignError(RuntimeError):
    """Configuration-space Jacobian is rank deficient for this array."""


class SolverError(RuntimeError):
    """Iterative reconstruction failed; carries the best iterate found."""

    def __init__(self, message, best_c=None, residual_norm=None):
        super().__init__(message)
        self.best_c = best_c
        self.residual_norm = residual_norm


class Reference(Enum):
    ABSOLUTE = "absolute"
    DELTA_FROM_STRAIGHT = "delta_from_straight"


@dataclass(frozen=True)
class Composite:
    """Signed sum of member string length(-change)s read as one channel."""

    members: tuple
    signs: tuple

    def __post_init__(self):
        if len(self.members) != len(self.signs) or not self.members:
            raise ValueError("members and signs must be non-empty and equal length")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")


@dataclass(frozen=True)
class SensorArray:
    strings: tuple
    composites: tuple = ()
    quadrature_points: int = 80

    def __post_init__(self):
        object.__setattr__(self, "strings", tuple(self.strings))
        object.__setattr__(self, "composites", tuple(self.composites))
        consumed = [i for comp in self.composites for i in comp.members]
        if len(consumed) != len(set(consumed)):
            raise ValueError("composite members must be disjoint")
        if any(i < 0 or i >= len(self.strings) for i in consumed):
            raise ValueError("composite member index out of range")
        if self.p < 1:
            raise ValueError("array must expose at least one channel")

    @property
    def _consumed(self):
        return {i for comp in self.composites for i in comp.members}

    @property
    def direct_indices(self):
        """Strings that appear as their own measurement channel, in order."""
        consumed = self._consumed
        return tuple(i for i in range(len(self.strings)) if i not in consumed)

    @property
    def p(self):
        """Number of measurement channels."""
        return len(self.direct_indices) + len(self.composites)

    def reduce(self, per_string):
        """Fold per-string values/rows into measurement channels."""
        per_string = np.asarray(per_string, dtype=float)
        direct = [per_string[i] for i in self.direct_indices]
        comps = [
            sum(sgn * per_string[i] for sgn, i in zip(comp.signs, comp.members))
            for comp in self.composites
        ]
        return np.array(direct + comps)

    def is_linear_class(self, basis):
        """Constant J_lc: every path constant-pitch and no torsion columns."""
        return (not basis.has_torsion) and all(
            isinstance(s.path, ConstantPitch) for s in self.strings
        )


def _span_grid(spec, basis, n_quad):
    lo, hi = spec.span(basis.length)
    return np.linspace(lo, hi, n_quad)


def _exact_string(spec, basis):
    """Constant-pitch paths on a torsion-free basis integrate in closed form:
    the tangential rate is 1 + r_y u_x - r_x u_y, affine in c."""
    return isinstance(spec.path, ConstantPitch) and not basis.has_torsion


def string_length(spec, basis, c, n_quad=80):
    """Path length of one string at configuration c.

    Uses the exact affine integral for constant-pitch strings on torsion-free
    bases and the composite trapezoid rule otherwise.  Raises
    NotRealizableError when the tangential rate crosses zero anywhere on the
    check grid.
    """
    s = _span_grid(spec, basis, max(n_quad, 2))
    margin = float(tangential_margin(spec.path, basis, c, s).min())
    if margin <= 0.0:
        raise NotRealizableError(margin)
    if _exact_string(spec, basis):
        lo, hi = spec.span(basis.length)
        integ = basis.integral(lo, hi)
        row = spec.path.r_y * integ[0] - spec.path.r_x * integ[1]
        return float(hi - lo + row @ basis.check_coeffs(c))
    w = path_velocity(spec.path, basis, c, s)
    return float(np.trapezoid(np.linalg.norm(w, axis=1), s))


def lengths(array, basis, c, reference=Reference.DELTA_FROM_STRAIGHT):
    """Measurement vector (p,) for configuration c."""
    c = basis.check_coeffs(c)
    per_string = []
    for i, spec in enumerate(array.strings):
        try:
            per_string.append(string_length(spec, basis, c, array.quadrature_points))
        except NotRealizableError as err:
            raise NotRealizableError(err.margin, string_index=i) from None
    vals = array.reduce(per_string)
    if reference is Reference.DELTA_FROM_STRAIGHT:
        straight = array.reduce(
            [string_length(spec, basis, np.zeros(basis.m), array.quadrature_points)
             for spec in array.strings]
        )
        vals = vals - straight
    return vals


def _jacobian_row(spec, basis, c, n_quad):
    """d(length)/dc for one string: (r x w'/|w'|)^T Phi integrated over the span
    (exact for constant-pitch/torsion-free strings, trapezoid otherwise)."""
    if _exact_string(spec, basis):
        lo, hi = spec.span(basis.length)
        integ = basis.integral(lo, hi)
        return spec.path.r_y * integ[0] - spec.path.r_x * integ[1]
    s = _span_grid(spec, basis, n_quad)
    w = path_velocity(spec.path, basis, c, s)
    wn = w / np.linalg.norm(w, axis=1, keepdims=True)
    r = spec.path.radial(s)
    phi = basis.matrix(s)                          # (n, 3, m)
    integrand = np.einsum("ni,nij->nj", np.cross(r, wn), phi)
    return np.trapezoid(integrand, s, axis=0)


def config_jacobian(array, basis, c):
    """J_lc (p, m): sensitivity of measurement channels to modal coefficients."""
    c = basis.check_coeffs(c)
    rows = [_jacobian_row(spec, basis, c, array.quadrature_points) for spec in array.strings]
    return array.reduce(rows)


def linear_model(array, basis):
    """(lengths_at_straight, constant J_lc) for a linear-class array.

    For such arrays lengths(c) = lengths(0) + J_lc @ c holds exactly; the
    Jacobian rows are exact basis integrals rather than quadrature.
    """
    if not array.is_linear_class(basis):
        raise ValueError("array is not linear-class (needs constant pitch and no torsion)")
    rows = []
    base_len = []
    for spec in array.strings:
        lo, hi = spec.span(basis.length)
        integ = basis.integral(lo, hi)             # (3, m)
        r_x, r_y = spec.path.r_x, spec.path.r_y
        rows.append(r_y * integ[0] - r_x * integ[1])
        base_len.append(hi - lo)
    return array.reduce(base_len), array.reduce(rows)


def body_jacobian(basis, c, s, n_steps=100):
    """J_xc (6, m): body twist of the frame at arc length s per unit dc.

    Accumulates Ad(exp(-Psi_j)) chains with exact per-step dPsi/dc across the
    Magnus elements covering [0, s].
    """
    return body_jacobian_multi(basis, c, [s], n_steps_total=n_steps, span=s)[0]


def body_jacobian_multi(basis, c, s_list, n_steps_total=100, span=None):
    """J_xc at several arc lengths in one integration pass.

    Every s in s_list must land on the integration grid of n_steps_total steps
    over [0, span] (span defaults to the basis length); values are snapped to
    the nearest node within half a step.
    """
    c = basis.check_coeffs(c)
    span = basis.length if span is None else span
    h = span / n_steps_total
    targets = {}
    for s in s_list:
        k = int(round(s / h))
        if abs(k * h - s) > 0.5 * h + 1e-12 or k < 0 or k > n_steps_total:
            raise ValueError(f"arc length {s} not on the integration grid")
        targets.setdefault(k, []).append(s)
    out = {}
    jac = np.zeros((6, basis.m))
    if 0 in targets:
        out[0] = jac.copy()
    sq3h2 = np.sqrt(3.0) * h * h / 12.0
    glo, ghi = liegroup._GL_LO * h, liegroup._GL_HI * h
    for i in range(n_steps_total):
        s0 = i * h
        p1 = basis.matrix(s0 + glo)
        p2 = basis.matrix(s0 + ghi)
        e1 = np.concatenate([p1 @ c, E3])
        e2 = np.concatenate([p2 @ c, E3])
        ad1, ad2 = liegroup.ad(e1), liegroup.ad(e2)
        psi = 0.5 * h * (e1 + e2) + sq3h2 * (ad1 @ e2)
        d1 = np.zeros((6, basis.m))
        d1[:3] = p1
        d2 = np.zeros((6, basis.m))
        d2[:3] = p2
        dpsi = 0.5 * h * (d1 + d2) + sq3h2 * (ad1 @ d2 - ad2 @ d1)
        step = liegroup.exp_se3(psi)
        jac = liegroup.adjoint(liegroup.inv_pose(step)) @ jac + liegroup.dexp_se3(psi, dpsi)
        if (i + 1) in targets:
            out[i + 1] = jac.copy()
    return [out[int(round(s / h))] for s in s_list]


@dataclass
class ShapeSolution:
    c: np.ndarray
    iterations: int
    residual_norm: float
    aleph_config: float
    linear: bool


def _aleph(a):
    sv = np.linalg.svd(a, compute_uv=False)
    return float(sv[-1] ** 2 / sv[0]) if sv[0] > 0 else 0.0


def solve_shape(array, basis, measured, reference=Reference.DELTA_FROM_STRAIGHT,
                initial=None, max_iter=100, step_tol=1e-10):
    """Recover modal coefficients from a measurement vector.

    Linear-class arrays are solved through the constant-Jacobian model in one
    least-squares step; everything else runs damped Gauss-Newton with a
    backtracking line search on the residual norm.
    """
    measured = np.asarray(measured, dtype=float)
    if measured.shape != (array.p,):
        raise ValueError(f"expected {array.p} measurements, got {measured.shape}")
    if array.p < basis.m:
        raise ValueError(f"underdetermined: p={array.p} channels < m={basis.m} coefficients")

    if array.is_linear_class(basis):
        base, jac = linear_model(array, basis)
        aleph = _aleph(jac)
        sv = np.linalg.svd(jac, compute_uv=False)
        if sv[-1] < 1e-12 * sv[0]:
            raise SingularDesignError(
                f"configuration-space Jacobian is singular (sigma ratio {sv[-1] / sv[0]:.2e})")
        rhs = measured - base if reference is Reference.ABSOLUTE else measured
        c = np.linalg.lstsq(jac, rhs, rcond=None)[0]
        resid = jac @ c - rhs
        return ShapeSolution(c, 1, float(np.linalg.norm(resid)), aleph, True)

    c = np.zeros(basis.m) if initial is None else basis.check_coeffs(np.asarray(initial, dtype=float)).copy()

    def residual(cc):
        return lengths(array, basis, cc, reference) - measured

    res = residual(c)
    rnorm = np.linalg.norm(res)
    best_c, best_r = c.copy(), rnorm
    aleph = 0.0
    for it in range(1, max_iter + 1):
        jac = config_jacobian(array, basis, c)
        sv = np.linalg.svd(jac, compute_uv=False)
        if sv[-1] < 1e-12 * sv[0]:
            raise SingularDesignError(
                f"configuration-space Jacobian is singular at iterate {it} "
                f"(sigma ratio {sv[-1] / sv[0]:.2e})")
        aleph = float(sv[-1] ** 2 / sv[0])
        step = np.linalg.lstsq(jac, -res, rcond=None)[0]
        # Backtracking: halve until the residual norm decreases (<= 20 times).
        alpha = 1.0
        for _ in range(20):
            trial = c + alpha * step
            try:
                res_t = residual(trial)
            except NotRealizableError:
                alpha *= 0.5
                continue
            rn_t = np.linalg.norm(res_t)
            if rn_t < rnorm:
                break
            alpha *= 0.5
        else:
            # No descent; report stagnation at the best point seen.
            return ShapeSolution(best_c, it, float(best_r), aleph, False)
        c, res, rnorm = trial, res_t, rn_t
        if rnorm < best_r:
            best_c, best_r = c.copy(), rnorm
        if np.linalg.norm(alpha * step) <= step_tol:
            return ShapeSolution(c, it, float(rnorm), aleph, False)
    raise SolverError(f"no convergence after {max_iter} iterations "
                      f"(residual {best_r:.3e})", best_c=best_c, residual_norm=float(best_r))


def forward_kinematics(basis, c, s_query, n_steps=100):
    """Poses at the requested arc lengths (k, 4, 4), base frame at identity.

    Integration runs segment by segment so that every query point is an exact
    step boundary; step counts are apportioned by segment length.
    """
    c = basis.check_coeffs(c)
    s_query = np.atleast_1d(np.asarray(s_query, dtype=float))
    if np.any(s_query < -1e-12) or np.any(s_query > basis.length + 1e-12):
        raise ValueError("query arc length outside [0, L]")
    order = np.argsort(s_query)
    fn = lambda s: curvature(basis, c, s)
    pose = np.eye(4)
    out = np.empty((len(s_query), 4, 4))
    s_prev = 0.0
    for idx in order:
        seg = s_query[idx] - s_prev
        if seg > 1e-14:
            n = max(1, int(np.ceil(n_steps * seg / basis.length)))
            h = seg / n
            for i in range(n):
                pose = pose @ liegroup.exp_se3(
                    liegroup.magnus_step(fn, s_prev + i * h, h))
            s_prev = s_query[idx]
        out[idx] = pose
    return out
