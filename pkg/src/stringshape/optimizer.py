"""Routing-design search: planar anchor-placement landscapes with peak
refinement, and brute-force enumeration over discrete anchors and helix twist
rates ranked by the workspace-averaged sensitivity index.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .modal import ModalBasis
from .routing import ConstantPitch, Helical, Mount, StringSpec
from .sensing import SensorArray, body_jacobian_multi
from .sensitivity import twist_scaling

PLANAR_REFERENCE_RADIUS = 0.25   # fixed end-anchored tendon, radius in units of L
PLANAR_GRID_STEP = 0.004
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def improvement_beta(candidate, baseline):
    """Signed percent improvement of an index over a baseline design."""
    if baseline <= 0.0:
        raise ValueError("baseline index must be positive")
    return 100.0 * (candidate - baseline) / baseline


# ---------------------------------------------------------------------------
# Planar case: three strings, y-only second-order basis, normalized L = 1.
# ---------------------------------------------------------------------------

def planar_basis():
    return ModalBasis(y=(0, 1, 2), length=1.0)


def _planar_rows(anchors):
    """Closed-form integral rows of [T0, T1, T2] over [0, a], a in units of L."""
    a = np.asarray(anchors, dtype=float)
    return np.stack([a, a * a - a, 8.0 * a**3 / 3.0 - 4.0 * a * a + a], axis=-1)


def planar_config_jacobian(radii, anchors):
    """Constant J_lc for planar constant-pitch strings (rows -r_i * int phi)."""
    rows = _planar_rows(anchors)
    return -np.asarray(radii, dtype=float)[:, None] * rows


def _sym3_eigvals(a):
    """Eigenvalues of stacked symmetric 3x3 matrices, ascending, closed form."""
    a = np.asarray(a, dtype=float)
    p1 = a[..., 0, 1] ** 2 + a[..., 0, 2] ** 2 + a[..., 1, 2] ** 2
    q = np.trace(a, axis1=-2, axis2=-1) / 3.0
    d = a[..., (0, 1, 2), (0, 1, 2)] - q[..., None]
    p2 = (d**2).sum(axis=-1) + 2.0 * p1
    p = np.sqrt(np.maximum(p2 / 6.0, 0.0))
    safe = np.where(p > 0, p, 1.0)
    b = (a - q[..., None, None] * np.eye(3)) / safe[..., None, None]
    det_b = (
        b[..., 0, 0] * (b[..., 1, 1] * b[..., 2, 2] - b[..., 1, 2] * b[..., 2, 1])
        - b[..., 0, 1] * (b[..., 1, 0] * b[..., 2, 2] - b[..., 1, 2] * b[..., 2, 0])
        + b[..., 0, 2] * (b[..., 1, 0] * b[..., 2, 1] - b[..., 1, 1] * b[..., 2, 0])
    )
    phi = np.arccos(np.clip(det_b / 2.0, -1.0, 1.0)) / 3.0
    lam_hi = q + 2.0 * p * np.cos(phi)
    lam_lo = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    lam_mid = 3.0 * q - lam_hi - lam_lo
    return np.stack([lam_lo, lam_mid, lam_hi], axis=-1)


def _config_index_grid(radii, axis):
    """aleph(J_lc) over the (a1, a2) anchor grid, vectorized."""
    a1, a2 = np.meshgrid(axis, axis, indexing="ij")
    rows = _planar_rows(np.stack([a1, a2, np.ones_like(a1)], axis=-1))  # (n,n,3,3)
    jac = -np.asarray(radii, dtype=float)[:, None] * rows
    gram = np.einsum("...ki,...kj->...ij", jac, jac)
    lam = np.clip(_sym3_eigvals(gram), 0.0, None)
    sig = np.sqrt(lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(sig[..., 2] > 0, sig[..., 0] ** 2 / sig[..., 2], 0.0)
    return out


def _full_index_grid(radii, axis, gram_samples):
    """Mean aleph of the length->twist map over samples, on the anchor grid.

    gram_samples holds (S J_xc)^T (S J_xc) per workspace sample; with
    B = S J_xc J_lc^-1 the squared singular values of B are the eigenvalues
    of J_lc^-T gram J_lc^-1, so each grid point costs one 3x3 inverse plus a
    batch of closed-form symmetric eigensolves.
    """
    a1, a2 = np.meshgrid(axis, axis, indexing="ij")
    rows = _planar_rows(np.stack([a1, a2, np.ones_like(a1)], axis=-1))
    jac = -np.asarray(radii, dtype=float)[:, None] * rows           # (n,n,3,3)
    det = np.linalg.det(jac)
    ok = np.abs(det) > 1e-300
    inv = np.zeros_like(jac)
    inv[ok] = np.linalg.inv(jac[ok])
    k = np.einsum("...ji,sjk,...kl->...sil", inv, gram_samples, inv)
    lam = np.clip(_sym3_eigvals(k), 0.0, None)                       # (n,n,S,3)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(lam[..., 2] > 0, lam[..., 0] / np.sqrt(lam[..., 2]), 0.0)
    out = vals.mean(axis=-1)
    out[~ok] = 0.0
    return out


def planar_sample_grams(samples, c_l, basis=None, n_steps=100):
    """(S J_xc(L))^T (S J_xc(L)) per workspace configuration."""
    basis = planar_basis() if basis is None else basis
    scale = twist_scaling(c_l)
    configs = getattr(samples, "configs", samples)
    grams = []
    for c in configs:
        jxc = scale[:, None] * body_jacobian_multi(basis, c, [basis.length],
                                                   n_steps_total=n_steps)[0]
        grams.append(jxc.T @ jxc)
    return np.array(grams)


@dataclass(frozen=True)
class Peak:
    anchors: tuple
    value: float


def _local_maxima(values):
    """Indices of strict interior local maxima on a 2-D grid."""
    v = values
    core = v[1:-1, 1:-1]
    mask = np.ones_like(core, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            mask &= core > v[1 + di:v.shape[0] - 1 + di, 1 + dj:v.shape[1] - 1 + dj]
    ii, jj = np.nonzero(mask)
    return list(zip(ii + 1, jj + 1))


def _golden_refine(fn, x0, lo, hi, span, rounds=3, tol=1e-5):
    """Coordinate-wise golden-section ascent around x0 (bounded)."""
    x = np.array(x0, dtype=float)
    for _ in range(rounds):
        for k in range(len(x)):
            a = max(lo, x[k] - span)
            b = min(hi, x[k] + span)

            def g(t):
                y = x.copy()
                y[k] = t
                return fn(y)

            c1 = b - GOLDEN * (b - a)
            c2 = a + GOLDEN * (b - a)
            f1, f2 = g(c1), g(c2)
            while b - a > tol:
                if f1 < f2:
                    a, c1, f1 = c1, c2, f2
                    c2 = a + GOLDEN * (b - a)
                    f2 = g(c2)
                else:
                    b, c2, f2 = c2, c1, f1
                    c1 = b - GOLDEN * (b - a)
                    f1 = g(c1)
            x[k] = 0.5 * (a + b)
        span *= 0.25
    return x, fn(x)


def planar_peak_search(r1, r2, objective="config", gram_samples=None,
                       grid_step=PLANAR_GRID_STEP, refine=True, return_grid=False):
    """Locate all local maxima of the planar anchor-placement landscape.

    Radii are in units of the segment length; the third string is pinned at
    radius 0.25 and the end disk.  objective="config" maximizes aleph(J_lc);
    "full" maximizes the workspace mean of the length->twist index at the tip
    and requires gram_samples from planar_sample_grams.
    """
    radii = np.array([r1, r2, PLANAR_REFERENCE_RADIUS])
    axis = np.arange(grid_step, 1.0, grid_step)
    if objective == "config":
        values = _config_index_grid(radii, axis)

        def point(x):
            jac = planar_config_jacobian(radii, [x[0], x[1], 1.0])
            sv = np.linalg.svd(jac, compute_uv=False)
            return sv[-1] ** 2 / sv[0] if sv[0] > 0 else 0.0
    elif objective == "full":
        if gram_samples is None:
            raise ValueError("objective='full' needs gram_samples")
        values = _full_index_grid(radii, axis, gram_samples)

        def point(x):
            jac = planar_config_jacobian(radii, [x[0], x[1], 1.0])
            if abs(np.linalg.det(jac)) < 1e-300:
                return 0.0
            inv = np.linalg.inv(jac)
            k = np.einsum("ji,sjk,kl->sil", inv, gram_samples, inv)
            lam = np.clip(_sym3_eigvals(k), 0.0, None)
            return float(np.where(lam[:, 2] > 0, lam[:, 0] / np.sqrt(lam[:, 2]), 0.0).mean())
    else:
        raise ValueError("objective must be 'config' or 'full'")

    peaks = []
    for i, j in _local_maxima(values):
        x0 = (axis[i], axis[j])
        if refine:
            x, v = _golden_refine(point, x0, grid_step, 1.0 - grid_step, 2 * grid_step)
        else:
            x, v = np.array(x0), values[i, j]
        peaks.append(Peak(anchors=(float(x[0]), float(x[1])), value=float(v)))
    peaks.sort(key=lambda p: -p.value)
    if return_grid:
        return peaks, axis, values
    return peaks


def planar_baseline_index(r1, r2, objective="config", gram_samples=None):
    """Index of the evenly spaced design (anchors L/3, 2L/3, L), same radii."""
    radii = np.array([r1, r2, PLANAR_REFERENCE_RADIUS])
    jac = planar_config_jacobian(radii, [1.0 / 3.0, 2.0 / 3.0, 1.0])
    if objective == "config":
        sv = np.linalg.svd(jac, compute_uv=False)
        return float(sv[-1] ** 2 / sv[0])
    inv = np.linalg.inv(jac)
    k = np.einsum("ji,sjk,kl->sil", inv, gram_samples, inv)
    lam = np.clip(_sym3_eigvals(k), 0.0, None)
    return float(np.where(lam[:, 2] > 0, lam[:, 0] / np.sqrt(lam[:, 2]), 0.0).mean())


def optimal_planar_anchors(p, radii=None, grid_step=None):
    """Anchor set maximizing aleph(J_lc) for p strings, first pinned at (0.25, L).

    Used by the reconstruction convergence study; free radii default to
    alternating +-0.25 (row signs do not affect singular values).  Returns
    (radii, anchors) in units of L.
    """
    if radii is None:
        radii = [PLANAR_REFERENCE_RADIUS] + [
            PLANAR_REFERENCE_RADIUS * (-1.0) ** i for i in range(1, p)]
    radii = np.asarray(radii, dtype=float)
    if p == 1:
        return radii, np.array([1.0])
    if grid_step is None:
        grid_step = {2: 0.002, 3: 0.01, 4: 0.04}.get(p, 0.05)
    axis = np.arange(grid_step, 1.0, grid_step)
    grids = np.meshgrid(*([axis] * (p - 1)), indexing="ij")
    anchors = np.stack([np.ones_like(grids[0])] + list(grids), axis=-1)  # (..., p)
    # rows of the degree-(p-1) integral matrix, batched
    a = anchors
    rows = np.stack([a, a * a - a, 8.0 * a**3 / 3.0 - 4.0 * a * a + a,
                     0.5 * ((2 * a - 1.0) ** 4 - 1.5 * (2 * a - 1.0) ** 2 + 0.5)][:p], axis=-1)
    jac = -radii[:, None] * rows
    sv = np.linalg.svd(jac, compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(sv[..., 0] > 0, sv[..., -1] ** 2 / sv[..., 0], 0.0)
    flat = int(np.argmax(vals))
    idx = np.unravel_index(flat, vals.shape)
    best = [axis[k] for k in idx]

    def point(x):
        anch = np.concatenate([[1.0], x])
        rws = np.stack([anch, anch * anch - anch,
                        8.0 * anch**3 / 3.0 - 4.0 * anch * anch + anch,
                        0.5 * ((2 * anch - 1.0) ** 4 - 1.5 * (2 * anch - 1.0) ** 2 + 0.5)][:p],
                       axis=-1)
        s = np.linalg.svd(-radii[:, None] * rws, compute_uv=False)
        return s[-1] ** 2 / s[0] if s[0] > 0 else 0.0

    refined, _ = _golden_refine(point, best, grid_step, 1.0 - grid_step, 2 * grid_step)
    return radii, np.concatenate([[1.0], refined])


# ---------------------------------------------------------------------------
# Brute-force search over discrete anchors and shared helix twist rates.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DesignedString:
    """String whose anchor disk (and the shared twist rate) the search picks."""

    kind: str                      # "helical" | "constant_pitch"
    r_s: float = 0.0               # helical path radius
    alpha: float = 0.0             # helical phase offset (rad)
    r_x: float = 0.0               # constant-pitch offsets
    r_y: float = 0.0
    mount: Mount = Mount.BASE

    def path(self, omega):
        if self.kind == "helical":
            return Helical(r_s=self.r_s, omega=omega, alpha=self.alpha)
        if self.kind == "constant_pitch":
            return ConstantPitch(r_x=self.r_x, r_y=self.r_y)
        raise ValueError(f"unknown designed-string kind {self.kind!r}")


@dataclass(frozen=True)
class DesignSpace:
    """Enumeration of routing designs for a fixed robot skeleton.

    Designed strings take their anchors from anchor_disks (disk index k sits
    at arc length k*L/n_disks); the helix twist rate is shared by all designed
    strings and swept over twist_rates, with omega = n_omega * hole_angle
    per subsegment length.  Fixed strings (e.g. actuation tendons) and
    composite channels are appended after the designed strings.
    """

    basis: ModalBasis
    designed: tuple
    fixed: tuple = ()
    composites: tuple = ()
    anchor_disks: tuple = ()
    n_disks: int = 10
    twist_rates: tuple = (0,)
    hole_angle: float = 2.0 * np.pi / 32.0
    s_objectives: tuple = ()
    c_l: float = 1.0
    epsilon: float = 1e-7
    quadrature_points: int = 80

    @property
    def size(self):
        return len(self.anchor_disks) ** len(self.designed) * len(self.twist_rates)

    def omega_of(self, n_omega):
        return n_omega * self.hole_angle / (self.basis.length / self.n_disks)

    def array_for(self, anchors, n_omega):
        """SensorArray for one candidate design (anchors are disk indices)."""
        length = self.basis.length
        specs = []
        for disk, ds in zip(anchors, self.designed):
            specs.append(StringSpec(path=ds.path(self.omega_of(n_omega)),
                                    s_anchor=disk * length / self.n_disks,
                                    mount=ds.mount))
        specs.extend(self.fixed)
        return SensorArray(strings=tuple(specs), composites=self.composites,
                           quadrature_points=self.quadrature_points)


@dataclass
class SearchResult:
    anchors: np.ndarray        # (n_designs, n_designed) disk indices
    n_omega: np.ndarray        # (n_designs,)
    aleph_config: np.ndarray   # (n_designs,) straight-configuration index
    aleph_g: np.ndarray        # (n_designs, n_objectives)
    singular: np.ndarray       # (n_designs,) bool
    s_objectives: tuple
    order: np.ndarray          # ranking by the requested objective

    def best(self, objective_index=0):
        i = int(self.order[0]) if self.order is not None else int(
            np.argmax(np.where(self.singular, -np.inf, self.aleph_g[:, objective_index])))
        return i

    def report(self, index, characteristic_length):
        from .sensitivity import DesignReport

        return DesignReport(
            aleph_config=float(self.aleph_config[index]),
            aleph_full={float(s): float(v)
                        for s, v in zip(self.s_objectives, self.aleph_g[index])},
            characteristic_length=characteristic_length,
            singular=bool(self.singular[index]),
        )


def _grid_nodes(space, per_disk):
    n = space.n_disks * per_disk
    sg = np.linspace(0.0, space.basis.length, n + 1)
    disk_nodes = np.arange(0, n + 1, per_disk)
    return sg, disk_nodes


def _cumulative_rows(space, c, sg, disk_nodes):
    """Cumulative J_lc row integrals at disk nodes for every string variant.

    Returns (designed_rows[n_omega][string][disk] -> (m,), fixed_rows (k, m)).
    Tip-mounted strings read cum[end] - cum[anchor].
    """
    basis = space.basis
    phi = basis.matrix(sg)                     # (n, 3, m)
    u = phi @ basis.check_coeffs(c)
    ds = np.diff(sg)[:, None]
    e3 = np.array([0.0, 0.0, 1.0])

    def cum_rows(path):
        r = path.radial(sg)
        rp = path.radial_deriv(sg)
        w = e3[None, :] - np.cross(r, u) + rp
        wn = w / np.linalg.norm(w, axis=1, keepdims=True)
        g = np.einsum("ni,nij->nj", np.cross(r, wn), phi)
        cum = np.concatenate([np.zeros((1, basis.m)),
                              np.cumsum(0.5 * (g[1:] + g[:-1]) * ds, axis=0)])
        return cum

    def exact_cum(path):
        # constant-pitch strings on torsion-free bases integrate exactly
        rows = np.zeros((len(disk_nodes), basis.m))
        for k, node in enumerate(disk_nodes):
            integ = basis.integral(0.0, sg[node])
            rows[k] = path.r_y * integ[0] - path.r_x * integ[1]
        return rows

    def rows_at_disks(path):
        if isinstance(path, ConstantPitch) and not basis.has_torsion:
            return exact_cum(path)
        return cum_rows(path)[disk_nodes]

    designed = np.zeros((len(space.twist_rates), len(space.designed),
                         len(disk_nodes), basis.m))
    for iw, n_om in enumerate(space.twist_rates):
        omega = space.omega_of(n_om)
        for i, dstr in enumerate(space.designed):
            at_disks = rows_at_disks(dstr.path(omega))
            if dstr.mount is Mount.TIP:
                at_disks = at_disks[-1] - at_disks
            designed[iw, i] = at_disks
    fixed = np.zeros((len(space.fixed), basis.m))
    for i, spec in enumerate(space.fixed):
        lo, hi = spec.span(basis.length)
        if isinstance(spec.path, ConstantPitch) and not basis.has_torsion:
            integ = basis.integral(lo, hi)
            fixed[i] = spec.path.r_y * integ[0] - spec.path.r_x * integ[1]
        else:
            cum = cum_rows(spec.path)
            lo_i = int(round(lo / basis.length * (len(sg) - 1)))
            hi_i = int(round(hi / basis.length * (len(sg) - 1)))
            fixed[i] = cum[hi_i] - cum[lo_i]
    return designed, fixed


def _reduce_rows(space, string_rows):
    """Apply composite folding to stacked per-string rows (..., n_strings, m)."""
    direct = [i for i in range(string_rows.shape[-2])
              if i not in {j for comp in space.composites for j in comp.members}]
    parts = [string_rows[..., i, :] for i in direct]
    for comp in space.composites:
        acc = sum(sgn * string_rows[..., i, :] for sgn, i in zip(comp.signs, comp.members))
        parts.append(acc)
    return np.stack(parts, axis=-2)


def _evaluate_chunk(payload):
    """Evaluate one contiguous block of designs; pure function of its inputs."""
    (space, anc, iws, des_rows, fix_rows, des0, fix0, jxc) = payload
    m = space.basis.m
    n_designed = len(space.designed)
    n_strings = n_designed + len(space.fixed)
    n_samp = des_rows.shape[0]
    nd = len(anc)
    # straight-configuration screen
    rows0 = np.zeros((nd, n_strings, m))
    for i in range(n_designed):
        rows0[:, i, :] = des0[iws, i, anc[:, i], :]
    rows0[:, n_designed:, :] = fix0[None]
    sv0 = np.linalg.svd(_reduce_rows(space, rows0), compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        a0 = np.where(sv0[:, 0] > 0, sv0[:, -1] ** 2 / sv0[:, 0], 0.0)
    bad = a0 < space.epsilon
    # per-sample Jacobians
    rows = np.zeros((nd, n_samp, n_strings, m))
    for i in range(n_designed):
        rows[:, :, i, :] = des_rows[:, iws, i, anc[:, i], :].transpose(1, 0, 2)
    rows[:, :, n_designed:, :] = fix_rows[None]
    jlc = _reduce_rows(space, rows)
    u_m, s_m, vt_m = np.linalg.svd(jlc, full_matrices=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        a_s = np.where(s_m[..., 0] > 0, s_m[..., -1] ** 2 / s_m[..., 0], 0.0)
    bad |= a_s.mean(axis=1) < space.epsilon
    inv_s = np.divide(1.0, s_m, out=np.zeros_like(s_m),
                      where=s_m > 1e-12 * s_m[..., :1])
    pinv = np.einsum("...ji,...j,...kj->...ik", vt_m, inv_s, u_m)
    ag = np.zeros((nd, len(space.s_objectives)))
    for k, s_obj in enumerate(space.s_objectives):
        b = jxc[s_obj][None] @ pinv
        sv = np.linalg.svd(b, compute_uv=False)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(sv[..., 0] > 0, sv[..., -1] ** 2 / sv[..., 0], 0.0)
        ag[:, k] = vals.mean(axis=1)
    return a0, ag, bad


def brute_force_search(space, samples, objective_index=-1, chunk=400,
                       n_steps=100, per_disk=30, cap=1_000_000, jobs=1):
    """Evaluate every design in the space and rank by a chosen objective.

    A design is marked singular when aleph(J_lc) falls below space.epsilon at
    the straight configuration or in the workspace mean (the filter the
    routing studies use); the workspace-averaged length->twist index is
    computed at each objective arc length.  Evaluation order is the
    lexicographic enumeration of candidate tuples; chunks may be evaluated by
    jobs > 1 worker processes, with a deterministic ordered merge, so results
    do not depend on the worker count.
    """
    if space.size > cap:
        raise ValueError(f"design space size {space.size} exceeds cap {cap}")
    configs = getattr(samples, "configs", np.asarray(samples))
    if len(configs) == 0:
        raise ValueError("empty workspace sample set")
    basis = space.basis
    m = basis.m
    n_strings = len(space.designed) + len(space.fixed)
    p = n_strings - sum(len(c.members) for c in space.composites) + len(space.composites)
    if p < m:
        raise ValueError("fewer measurement channels than basis columns")

    sg, disk_nodes = _grid_nodes(space, per_disk)
    scale = twist_scaling(space.c_l)

    # Design-independent: body Jacobians at the objective arc lengths.
    jxc = {s: [] for s in space.s_objectives}
    for c in configs:
        mats = body_jacobian_multi(basis, c, list(space.s_objectives), n_steps_total=n_steps)
        for s, mat in zip(space.s_objectives, mats):
            jxc[s].append(scale[:, None] * mat)
    jxc = {s: np.array(v) for s, v in jxc.items()}

    # Per-sample cumulative rows for every string variant.
    des_rows = []
    fix_rows = []
    for c in configs:
        d, f = _cumulative_rows(space, c, sg, disk_nodes)
        des_rows.append(d)
        fix_rows.append(f)
    des_rows = np.array(des_rows)      # (S, n_omega, n_designed, n_disks+1, m)
    fix_rows = np.array(fix_rows)      # (S, n_fixed, m)
    des0, fix0 = _cumulative_rows(space, np.zeros(m), sg, disk_nodes)

    anchor_sets = [space.anchor_disks] * len(space.designed)
    combos = np.array(list(itertools.product(*anchor_sets, range(len(space.twist_rates)))))
    anchors = combos[:, :-1]
    iw = combos[:, -1]
    n_designs = len(combos)

    payloads = [
        (space, anchors[c0:c0 + chunk], iw[c0:c0 + chunk],
         des_rows, fix_rows, des0, fix0, jxc)
        for c0 in range(0, n_designs, chunk)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_chunk, payloads))
    else:
        results = [_evaluate_chunk(pl) for pl in payloads]

    aleph_cfg = np.concatenate([r[0] for r in results])
    aleph_g = np.concatenate([r[1] for r in results])
    singular = np.concatenate([r[2] for r in results])

    key = np.where(singular, -np.inf, aleph_g[:, objective_index])
    order = np.argsort(-key, kind="stable")
    return SearchResult(anchors=anchors, n_omega=np.array(space.twist_rates)[iw],
                        aleph_config=aleph_cfg, aleph_g=aleph_g, singular=singular,
                        s_objectives=tuple(space.s_objectives), order=order)
