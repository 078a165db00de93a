"""Regularized inversion of loop-loop induction soundings.

Recovers a conductivity (or relative permeability) profile from a
complex response vector by a damped Gauss-Newton iteration whose step is
regularized through a truncated SVD, or a truncated GSVD when a
difference-operator penalty is selected.  The minimal-norm variants
additionally project the iterate onto the complement of the Jacobian's
null space, pulling the solution toward a model profile x_bar:

    GN         x+ = x + alpha*q
    MNGN       x+ = x + alpha*q -       P (x - x_bar)
    MNGN2_A    x+ = x + alpha*(q -      P (x - x_bar))
    MNGN2_AB   x+ = x + alpha*q - beta* P (x - x_bar)
    MNGN2_ABD  as MNGN2_AB with beta adapted across iterations

Step lengths come from an Armijo backtracking search on the full update,
so every accepted iterate decreases the residual.  The MNGN projection
term is known to be able to spoil convergence; here that surfaces as an
early stop with reason "line_search_failed" rather than a residual
increase.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import hankel
from ._core import kernels
from .constants import MU0
from .earthmodel import GeometryElement, LayeredEarth, ResponseSet
from .forward import _ORIENTATION_RULES, _model_arrays, apparent_conductivity

ARMIJO_C = 1e-4
ARMIJO_BACKTRACK = 0.5
ARMIJO_MAX_HALVINGS = 30

METHODS = ("GN", "MNGN", "MNGN2_A", "MNGN2_AB", "MNGN2_ABD")
COMPONENTS = ("Q", "P", "complex")


class InversionError(ValueError):
    pass


@dataclass(frozen=True)
class Regularizer:
    """Penalty operator for the step/solution seminorm."""

    kind: str = "identity"   # identity | d1 | d2

    def matrix(self, dim: int) -> np.ndarray:
        if self.kind == "identity":
            return np.eye(dim)
        if self.kind == "d1":
            if dim < 2:
                raise InversionError("d1 needs at least 2 unknowns")
            L = np.zeros((dim - 1, dim))
            idx = np.arange(dim - 1)
            L[idx, idx] = -1.0
            L[idx, idx + 1] = 1.0
            return L
        if self.kind == "d2":
            if dim < 3:
                raise InversionError("d2 needs at least 3 unknowns")
            L = np.zeros((dim - 2, dim))
            idx = np.arange(dim - 2)
            L[idx, idx] = 1.0
            L[idx, idx + 1] = -2.0
            L[idx, idx + 2] = 1.0
            return L
        raise InversionError(f"unknown regularizer {self.kind!r}")


@dataclass(frozen=True)
class InversionOptions:
    method: str = "GN"
    component: str = "complex"       # which data block enters the residual
    mode: str = "sigma"              # invert sigma or mu (other one fixed)
    regularizer: Regularizer = Regularizer("identity")
    rank: int | None = None          # fixed truncation; None -> discrepancy
    noise_level: float = 0.0         # relative noise estimate eta
    safety: float = 1.0              # discrepancy safety factor
    max_iterations: int = 30
    step_tol: float = 1e-8
    residual_tol: float = 1e-12
    x_bar: float | Sequence | None = None  # model profile (None -> zero)
    jacobian: str = "analytic"       # analytic | fd
    fd_rel_step: float = 1e-6

    def __post_init__(self):
        if self.method not in METHODS:
            raise InversionError(f"unknown method {self.method!r}")
        if self.component not in COMPONENTS:
            raise InversionError(f"unknown component {self.component!r}")
        if self.mode not in ("sigma", "mu"):
            raise InversionError("mode must be 'sigma' or 'mu'")
        if self.rank is not None and self.rank < 1:
            raise InversionError("rank must be >= 1")
        if self.step_tol <= 0 or self.residual_tol <= 0:
            raise InversionError("tolerances must be positive")


@dataclass
class InversionResult:
    x: np.ndarray
    model: LayeredEarth
    residual_history: list
    step_norms: list
    ranks: list
    alphas: list
    betas: list
    converged: bool
    reason: str
    stationarity: float | None = None
    options: InversionOptions = field(default=None)

    @property
    def iterations(self) -> int:
        return len(self.step_norms)

    def to_dict(self) -> dict:
        return {
            "final_model": list(map(float, self.x)),
            "residual_history": list(map(float, self.residual_history)),
            "step_norms": list(map(float, self.step_norms)),
            "ranks": list(map(int, self.ranks)),
            "alphas": list(map(float, self.alphas)),
            "betas": list(map(float, self.betas)),
            "iterations": self.iterations,
            "converged": self.converged,
            "reason": self.reason,
            "stationarity": self.stationarity,
        }


# ---------------------------------------------------------------------------
# Residual/Jacobian assembly
# ---------------------------------------------------------------------------

def realify(values: np.ndarray, component: str) -> np.ndarray:
    """Complex data to the real residual space: Re and Im stacked for
    'complex', the single block otherwise."""
    values = np.asarray(values)
    if component == "Q":
        return values.imag.astype(float)
    if component == "P":
        return values.real.astype(float)
    return np.concatenate([values.real, values.imag]).astype(float)


class InversionProblem:
    """Couples a data vector with the forward model on a fixed layering.

    The unknown vector x is the per-layer conductivity (mode 'sigma') or
    relative permeability (mode 'mu'); the other quantity stays at the
    base model's values, exactly.
    """

    def __init__(self, elements: Sequence, data: np.ndarray,
                 base_model: LayeredEarth, opts: InversionOptions):
        self.elements = tuple(GeometryElement(*e) for e in elements)
        if not self.elements:
            raise InversionError("geometry must contain at least one "
                                 "measurement")
        self.data = np.asarray(data, dtype=complex)
        if self.data.shape != (len(self.elements),):
            raise InversionError("data length must match geometry")
        self.base_model = base_model
        self.opts = opts
        self.b_real = realify(self.data, opts.component)

    @property
    def dim(self) -> int:
        return self.base_model.n_layers

    def model_of(self, x: np.ndarray) -> LayeredEarth | None:
        """Validated model for the final iterate, or None when the
        unconstrained iteration left the physical domain (negative
        conductivities are reported, never clamped)."""
        try:
            if self.opts.mode == "sigma":
                return self.base_model.with_sigma(x)
            return self.base_model.with_mu_r(x)
        except Exception:
            return None

    def _arrays_of(self, x: np.ndarray):
        # raw arrays: intermediate iterates may be unphysical and must
        # still be evaluated (no positivity transform)
        sigma0, mu0, d = _model_arrays(self.base_model)
        if self.opts.mode == "sigma":
            return np.asarray(x, dtype=float), mu0, d
        return sigma0, np.asarray(x, dtype=float) * MU0, d

    def forward_complex(self, x: np.ndarray) -> np.ndarray:
        sigma, mu, d = self._arrays_of(x)
        out = np.empty(len(self.elements), dtype=complex)
        for i, el in enumerate(self.elements):
            order, rho_pow, lam_pow = _ORIENTATION_RULES[el.orientation]
            omega = 2 * math.pi * el.frequency
            nodes, wts = hankel.transform_weights(order, el.spacing)
            refl = kernels.reflection(nodes, sigma, mu, d, omega)
            vals = np.exp(-2.0 * nodes * el.height) * nodes**lam_pow * refl
            out[i] = -(el.spacing**rho_pow) * np.dot(wts, vals)
        return out

    def residual(self, x: np.ndarray) -> np.ndarray:
        return realify(self.forward_complex(x) - self.data,
                       self.opts.component)

    def jacobian_complex(self, x: np.ndarray) -> np.ndarray:
        if self.opts.jacobian == "fd":
            return self._jacobian_fd(x)
        sigma, mu, d = self._arrays_of(x)
        J = np.empty((len(self.elements), self.dim), dtype=complex)
        for i, el in enumerate(self.elements):
            order, rho_pow, lam_pow = _ORIENTATION_RULES[el.orientation]
            omega = 2 * math.pi * el.frequency
            nodes, wts = hankel.transform_weights(order, el.spacing)
            _, dr_ds, dr_dm = kernels.reflection_gradients(
                nodes, sigma, mu, d, omega)
            factor = (-(el.spacing**rho_pow) * wts
                      * np.exp(-2.0 * nodes * el.height) * nodes**lam_pow)
            if self.opts.mode == "sigma":
                J[i] = dr_ds @ factor
            else:
                J[i] = (dr_dm @ factor) * MU0
        return J

    def _jacobian_fd(self, x: np.ndarray) -> np.ndarray:
        floor = (1e-9 if self.opts.mode == "sigma" else 1e-9)
        J = np.empty((len(self.elements), self.dim), dtype=complex)
        for k in range(self.dim):
            h = max(self.opts.fd_rel_step * abs(x[k]), floor)
            up, dn = x.copy(), x.copy()
            up[k] += h
            dn[k] -= h
            J[:, k] = (self.forward_complex(up)
                       - self.forward_complex(dn)) / (2 * h)
        return J

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        J = self.jacobian_complex(x)
        if self.opts.component == "Q":
            return J.imag.copy()
        if self.opts.component == "P":
            return J.real.copy()
        return np.vstack([J.real, J.imag])

    def x_bar_vector(self) -> np.ndarray:
        xb = self.opts.x_bar
        if xb is None:
            return np.zeros(self.dim)
        if np.isscalar(xb):
            return np.full(self.dim, float(xb))
        xb = np.asarray(xb, dtype=float)
        if xb.shape != (self.dim,):
            raise InversionError("x_bar length must match the unknowns")
        return xb

    def initial_guess(self) -> np.ndarray:
        if self.opts.mode == "mu":
            return np.ones(self.dim)
        sig = []
        for el, b in zip(self.elements, self.data):
            omega = 2 * math.pi * el.frequency
            sig.append(apparent_conductivity(b.imag, omega, el.spacing))
        mean = float(np.mean(sig))
        return np.full(self.dim, mean if mean > 0 else 1e-3)


# ---------------------------------------------------------------------------
# Linear algebra: T(G)SVD steps and null-space projectors
# ---------------------------------------------------------------------------

def _numerical_rank(s: np.ndarray, shape) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    tol = max(shape) * np.finfo(float).eps * s[0]
    return int(np.sum(s > tol))

def tsvd_step(J: np.ndarray, r: np.ndarray, ell: int) -> np.ndarray:
    """Gauss-Newton step minimizing ||J q + r|| with J replaced by its
    rank-ell truncation."""
    U, s, Vt = np.linalg.svd(J, full_matrices=False)
    nrank = _numerical_rank(s, J.shape)
    if ell > nrank:
        warnings.warn(f"truncation rank {ell} exceeds numerical rank "
                      f"{nrank}; clamping")
        ell = max(nrank, 1)
    coeff = (U[:, :ell].T @ r) / s[:ell]
    return -(Vt[:ell].T @ coeff)


def gsvd(A: np.ndarray, L: np.ndarray):
    """Generalized SVD of the pair (A, L):

        A = U diag(c) Z,   L = V diag(s) Z,   c^2 + s^2 = 1 columnwise,

    with Z invertible and c ascending (generalized values c/s ascending).
    Requires rank([A; L]) = n.
    """
    m, n = A.shape
    p = L.shape[0]
    if L.shape[1] != n:
        raise InversionError("regularizer width must match the unknowns")
    Q, R = np.linalg.qr(np.vstack([A, L]))
    Q1, Q2 = Q[:m], Q[m:]
    V, svals, Wt = np.linalg.svd(Q2, full_matrices=True)
    # diag entries of the p x n sine matrix, padded with zeros (pure-A
    # directions, infinite generalized value)
    s_full = np.zeros(n)
    s_full[:min(p, n)] = svals
    B = Q1 @ Wt.T
    c_full = np.sqrt(np.clip(1.0 - s_full**2, 0.0, None))
    # refine c from the actual column norms (more accurate for c ~ 1)
    norms = np.linalg.norm(B, axis=0)
    c_full = np.where(s_full < 0.7, norms, c_full)
    U = np.zeros((m, n))
    nz = c_full > n * np.finfo(float).eps
    U[:, nz] = B[:, nz] / c_full[nz]
    Z = Wt @ R
    return U, V, Z, c_full, s_full


def tgsvd_step(J: np.ndarray, r: np.ndarray, L: np.ndarray,
               ell: int) -> np.ndarray:
    """Gauss-Newton step regularized by truncation in the (J, L)
    generalized basis, keeping the ell largest generalized values."""
    n = J.shape[1]
    U, V, Z, c, s = gsvd(J, L)
    order = np.argsort(np.where(s > 0, c / np.maximum(s, 1e-300), np.inf))
    usable = int(np.sum(c > n * np.finfo(float).eps))
    if ell > usable:
        warnings.warn(f"truncation rank {ell} exceeds usable rank {usable};"
                      " clamping")
        ell = max(usable, 1)
    kept = order[n - ell:]
    y = np.zeros(n)
    y[kept] = -(U[:, kept].T @ r) / c[kept]
    return np.linalg.solve(Z, y)


def null_projector(J: np.ndarray, drop_tol: float | None = None):
    """Orthogonal projector onto the numerical null space of J, as the
    matrix V2 V2^T."""
    _, s, Vt = np.linalg.svd(J, full_matrices=True)
    smax = s[0] if s.size else 0.0
    if drop_tol is None:
        drop_tol = max(J.shape) * np.finfo(float).eps * smax
    keep = np.sum(s > drop_tol)
    V2 = Vt[keep:].T
    return V2 @ V2.T


def gsvd_null_projector(J: np.ndarray, L: np.ndarray) -> np.ndarray:
    """Oblique projector onto the null space of J adapted to the L
    seminorm, built from the GSVD basis (idempotent, annihilated by J)."""
    n = J.shape[1]
    _, _, Z, c, _ = gsvd(J, L)
    null = c <= n * np.finfo(float).eps
    if not null.any():
        return np.zeros((n, n))
    X = np.linalg.inv(Z)
    return X[:, null] @ Z[null, :]


def discrepancy_rank(J: np.ndarray, r: np.ndarray, eta: float,
                     bnorm: float, safety: float = 1.0) -> int:
    """Smallest truncation rank whose linearized residual reaches the
    noise floor safety*eta*||b||; falls back to the full numerical rank
    when no rank qualifies."""
    U, s, _ = np.linalg.svd(J, full_matrices=False)
    nrank = _numerical_rank(s, J.shape)
    if nrank == 0:
        return 1
    beta = U.T @ r
    res2 = float(r @ r)
    target = safety * eta * bnorm
    for ell in range(1, nrank + 1):
        res2 -= beta[ell - 1] ** 2
        if math.sqrt(max(res2, 0.0)) <= target:
            return ell
    if eta > 0:
        warnings.warn("discrepancy level not reachable; using full rank")
    return nrank


# ---------------------------------------------------------------------------
# Iteration driver
# ---------------------------------------------------------------------------

def _line_search(problem, x, phi0, slope, make_candidate):
    """Armijo backtracking on the full update map alpha -> x(alpha).

    Returns (alpha, x_new, r_new) or None.  Uses the sufficient-decrease
    rule with the directional slope when it is negative, plain decrease
    otherwise (the projection term need not be a descent direction).
    """
    alpha = 1.0
    for _ in range(ARMIJO_MAX_HALVINGS + 1):
        xc = make_candidate(alpha)
        rc = problem.residual(xc)
        phic = 0.5 * float(rc @ rc)
        if slope < 0:
            ok = phic <= phi0 + ARMIJO_C * alpha * slope
        else:
            ok = phic < phi0
        if ok:
            return alpha, xc, rc
        alpha *= ARMIJO_BACKTRACK
    return None


def _solve_step(J, r, L, ell, identity_reg):
    if identity_reg:
        return tsvd_step(J, r, ell)
    return tgsvd_step(J, r, L, ell)


def _projector(J, L, identity_reg):
    if identity_reg:
        return null_projector(J)
    return gsvd_null_projector(J, L)


def iterate(problem: InversionProblem,
            x0: np.ndarray | None = None) -> InversionResult:
    """Run the configured Gauss-Newton/MNGN iteration on a problem."""
    opts = problem.opts
    identity_reg = opts.regularizer.kind == "identity"
    L = opts.regularizer.matrix(problem.dim)
    x = np.asarray(x0, dtype=float).copy() if x0 is not None \
        else problem.initial_guess()
    if x.shape != (problem.dim,):
        raise InversionError("x0 length must match the unknowns")
    x_bar = problem.x_bar_vector()
    bnorm = float(np.linalg.norm(problem.b_real))
    target = opts.safety * opts.noise_level * bnorm

    r = problem.residual(x)
    hist = [float(np.linalg.norm(r))]
    steps, ranks, alphas, betas = [], [], [], []
    beta_adaptive = 1.0
    converged = False
    reason = "max_iterations"
    J = None

    for _ in range(opts.max_iterations):
        if hist[-1] <= opts.residual_tol:
            converged, reason = True, "residual_tolerance"
            break
        if opts.noise_level > 0 and hist[-1] <= target:
            converged, reason = True, "discrepancy"
            break
        J = problem.jacobian(x)
        ell = opts.rank or discrepancy_rank(J, r, opts.noise_level, bnorm,
                                            opts.safety)
        q = _solve_step(J, r, L, ell, identity_reg)
        phi0 = 0.5 * float(r @ r)
        slope = float((J @ q) @ r)

        method = opts.method
        if method == "GN":
            hit = _line_search(problem, x, phi0, slope,
                               lambda a: x + a * q)
            beta_used = 0.0
        else:
            P = _projector(J, L, identity_reg)
            v = P @ (x - x_bar)
            if method == "MNGN":
                hit = _line_search(problem, x, phi0, slope,
                                   lambda a: x + a * q - v)
                beta_used = 1.0
            elif method == "MNGN2_A":
                hit = _line_search(problem, x, phi0, slope,
                                   lambda a: x + a * (q - v))
                beta_used = None  # alpha reported; beta tied to it
            else:
                # MNGN2_AB / MNGN2_ABD: pick beta by a bounded sweep down
                # to the pure GN step, backtracking alpha at each trial.
                beta_start = beta_adaptive if method == "MNGN2_ABD" else 1.0
                trials = [beta_start]
                while trials[-1] > 1e-6:
                    trials.append(trials[-1] / 2.0)
                trials.append(0.0)
                hit = None
                beta_used = beta_start
                for beta_try in trials:
                    hit = _line_search(
                        problem, x, phi0, slope,
                        lambda a, b=beta_try: x + a * q - b * v)
                    if hit is not None:
                        beta_used = beta_try
                        break
                if method == "MNGN2_ABD" and hit is not None:
                    # adapt across iterations: expand on clean success,
                    # shrink after in-iteration reductions
                    alpha_hit = hit[0]
                    if alpha_hit == 1.0 and beta_used == beta_adaptive:
                        beta_adaptive = min(1.0, 2.0 * beta_adaptive)
                    else:
                        beta_adaptive = max(beta_used, 1e-6)

        if hit is None:
            reason = "line_search_failed"
            break
        alpha, x_new, r_new = hit
        step_norm = float(np.linalg.norm(x_new - x))
        x, r = x_new, r_new
        hist.append(float(np.linalg.norm(r)))
        steps.append(step_norm)
        ranks.append(int(ell))
        alphas.append(float(alpha))
        betas.append(float(alpha if beta_used is None else beta_used))
        if step_norm <= opts.step_tol * max(1.0, float(np.linalg.norm(x))):
            converged, reason = True, "step_tolerance"
            break
    else:
        # loop exhausted without break: check the final iterate's residual
        if hist[-1] <= opts.residual_tol:
            converged, reason = True, "residual_tolerance"
        elif opts.noise_level > 0 and hist[-1] <= target:
            converged, reason = True, "discrepancy"

    stationarity = None
    if opts.method != "GN":
        Jf = problem.jacobian(x)
        Pf = _projector(Jf, L, identity_reg)
        xnorm = float(np.linalg.norm(x))
        if xnorm > 0:
            stationarity = float(
                np.linalg.norm(Pf @ (x - x_bar)) / xnorm)

    return InversionResult(
        x=x, model=problem.model_of(x), residual_history=hist,
        step_norms=steps, ranks=ranks, alphas=alphas, betas=betas,
        converged=converged, reason=reason, stationarity=stationarity,
        options=opts)


def invert(elements, data, base_model: LayeredEarth,
           opts: InversionOptions | None = None,
           x0=None) -> InversionResult:
    opts = opts or InversionOptions()
    problem = InversionProblem(elements, data, base_model, opts)
    return iterate(problem, x0)


def invert_section(columns: Sequence[ResponseSet], base_model: LayeredEarth,
                   opts: InversionOptions | None = None) -> list:
    """Independent 1-D inversions of successive data columns sharing one
    geometry.  Per-column failures are collected, not fatal."""
    opts = opts or InversionOptions()
    results = []
    elements = None
    for idx, col in enumerate(columns):
        if elements is None:
            elements = col.elements
        elif col.elements != elements:
            raise InversionError(
                f"column {idx} geometry differs from the first column")
        try:
            results.append(invert(col.elements, col.values, base_model,
                                  opts))
        except (InversionError, hankel.QuadratureError) as exc:
            results.append(exc)
    return results


# ---------------------------------------------------------------------------
# Synthetic noise
# ---------------------------------------------------------------------------

def add_noise(data: ResponseSet, level: float, seed: int) -> ResponseSet:
    """Reproducible relative perturbation: b + level*||b||*w/||w|| with w
    standard normal on the realified vector, so the relative perturbation
    equals level exactly."""
    if level < 0:
        raise ValueError("noise level must be non-negative")
    if level == 0:
        return ResponseSet(data.values, data.elements, data.geometry)
    rng = np.random.default_rng(seed)
    b = np.concatenate([data.values.real, data.values.imag])
    w = rng.standard_normal(b.size)
    b_noisy = b + level * np.linalg.norm(b) * w / np.linalg.norm(w)
    m = len(data)
    values = b_noisy[:m] + 1j * b_noisy[m:]
    return ResponseSet(values, data.elements, data.geometry)
