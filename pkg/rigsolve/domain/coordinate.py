"""
Box-constrained coordinate descent for the rig-fitting objective

    1/2 ||f(w) - b||^2 + alpha * 1'w  [+ rho/2 ||w - anchor||^2]   over 0 <= w <= 1.

f is affine in every single weight, so each coordinate step is a 1-D quadratic
with a closed-form clamped minimiser.

coordinate_descent carries the 3n residual; gram_descent takes the same steps on
precomputed inner products, for subproblems that are solved many times.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from rigsolve.domain.rig import (
    ModelLike,
    check_weights,
    controller_gradient,
    corrective_coefficients,
    evaluate_rig,
    unwrap_model,
)

# (rho, anchor) for the proximal term; anchor is a full local vector in the kernel
Prox = Tuple[float, np.ndarray]


def clamped_minimizer(g: np.ndarray, b_minus_c: np.ndarray, alpha: float, rho: float = 0.0, anchor: float = 0.0) -> float:
    """argmin over t in [0, 1] of 1/2||c + t g - b||^2 + alpha t + rho/2 (t - anchor)^2."""
    denom = float(g @ g) + rho
    if denom <= 0.0:
        return 0.0
    t = (float(g @ b_minus_c) - alpha + rho * anchor) / denom
    return min(max(t, 0.0), 1.0)


def coordinate_update(
    model: ModelLike,
    target: np.ndarray,
    w: np.ndarray,
    i: int,
    alpha: float,
    prox: Optional[Tuple[float, float]] = None,
) -> float:
    """Exact minimiser of the objective in coordinate i with the others held fixed."""
    base = unwrap_model(model)
    w = check_weights(base, w)
    g = controller_gradient(base, w, i)
    w0 = w.copy()
    w0[i] = 0.0
    c = evaluate_rig(base, w0)
    rho, anchor = prox if prox is not None else (0.0, 0.0)
    return clamped_minimizer(g, np.asarray(target) - c, alpha, rho, anchor)


def _penalty(w: np.ndarray, alpha: float, prox: Optional[Prox]) -> float:
    value = alpha * float(w.sum())
    if prox is not None:
        rho, anchor = prox
        diff = w - anchor
        value += 0.5 * rho * float(diff @ diff)
    return value


def objective(residual: np.ndarray, w: np.ndarray, alpha: float, prox: Optional[Prox] = None) -> float:
    return 0.5 * float(residual @ residual) + _penalty(w, alpha, prox)


@dataclass
class SweepOutcome:
    w: np.ndarray
    sweeps: int
    converged: bool
    # objective after every full sweep, starting with the initial point
    trace: List[float] = field(default_factory=list)
    residual: Optional[np.ndarray] = None
    # 1/2 ||f(w) - b||^2 at the returned w
    fit: float = 0.0


def coordinate_descent(
    model: ModelLike,
    target: np.ndarray,
    w0: np.ndarray,
    alpha: float,
    max_sweeps: int,
    tol: float,
    prox: Optional[Prox] = None,
    rng: Optional[np.random.Generator] = None,
    on_update: Optional[Callable[[int, float], None]] = None,
) -> SweepOutcome:
    """
    Cyclic sweeps of coordinate_update, kept cheap by carrying the residual
    r = f(w) - b and using c - b = r - w_i g.

    Stops once the largest coordinate change of a sweep is below `tol`.
    `rng` shuffles the order of every sweep; `on_update(i, objective)` is called
    after every single coordinate step.
    """
    base = unwrap_model(model)
    w = check_weights(base, w0).copy()
    target = np.asarray(target, dtype=np.float64)
    m = base.m
    rho, anchor = prox if prox is not None else (0.0, None)

    residual = evaluate_rig(base, w) - target
    # squared column norms are exact gradients' norms for controllers without correctives
    plain_norms = np.einsum("ij,ij->j", base.basis, base.basis)
    has_terms = [base.terms_of(i).size > 0 for i in range(m)]

    outcome = SweepOutcome(w=w, sweeps=0, converged=False)
    outcome.trace.append(objective(residual, w, alpha, prox))

    order = np.arange(m)
    for sweep in range(1, max_sweeps + 1):
        if rng is not None:
            order = rng.permutation(m)
        max_change = 0.0
        for i in order:
            g = controller_gradient(base, w, i) if has_terms[i] else base.basis[:, i]
            gg = float(g @ g) if has_terms[i] else plain_norms[i]
            denom = gg + rho
            if denom <= 0.0:
                t = 0.0
            else:
                a_i = anchor[i] if anchor is not None else 0.0
                t = (gg * w[i] - float(g @ residual) - alpha + rho * a_i) / denom
                t = min(max(t, 0.0), 1.0)
            step = t - w[i]
            if step != 0.0:
                residual += step * g
                w[i] = t
                max_change = max(max_change, abs(step))
            if on_update is not None:
                on_update(int(i), objective(residual, w, alpha, prox))

        outcome.sweeps = sweep
        outcome.trace.append(objective(residual, w, alpha, prox))
        if max_change < tol:
            outcome.converged = True
            break

    outcome.w = w
    outcome.residual = residual
    outcome.fit = 0.5 * float(residual @ residual)
    return outcome


# ==================== GRAM FORM ====================

class GramSystem:
    """
    Inner products of the augmented basis A = [B | C^T], where the rows of C are the
    corrective offsets, so that f(w) = b0 + A a(w) with a(w) = [w; corrective
    coefficients].

    A coordinate step only needs g'r and g'g, and g = A e for a short coefficient
    vector e. Carrying v = A'r instead of r makes every step independent of the
    vertex count; the (m + T)^2 Gram matrix is built once per rig.
    """

    def __init__(self, model: ModelLike):
        base = unwrap_model(model)
        self.model = base
        self.m = base.m
        offsets = base.corrective_offsets
        basis_t = np.ascontiguousarray(base.basis.T)
        self._projector = np.vstack([basis_t, offsets])
        self.gram = self._projector @ self._projector.T

        self.terms = [base.terms_of(i) for i in range(self.m)]
        # per controller: padded ids of its terms, the Gram rows it touches and their block
        self.partners = []
        self.columns = []
        self.rows = []
        self.blocks = []
        for i, terms in enumerate(self.terms):
            cols = np.concatenate([[i], self.m + terms]).astype(np.intp)
            self.partners.append(base.padded_ids[terms])
            self.columns.append(cols)
            self.rows.append(np.ascontiguousarray(self.gram[cols]))
            self.blocks.append(self.gram[np.ix_(cols, cols)])

    def project(self, target) -> Tuple[np.ndarray, float]:
        """(A'(b0 - b), ||b0 - b||^2): everything a target contributes to the sweeps."""
        d = self.model.neutral - np.asarray(target, dtype=np.float64)
        return self._projector @ d, float(d @ d)

    def coefficients(self, w: np.ndarray) -> np.ndarray:
        return np.concatenate([w, corrective_coefficients(self.model, w)])


def gram_descent(
    system: GramSystem,
    projection: Tuple[np.ndarray, float],
    w0: np.ndarray,
    alpha: float,
    max_sweeps: int,
    tol: float,
    prox: Optional[Prox] = None,
    rng: Optional[np.random.Generator] = None,
) -> SweepOutcome:
    """coordinate_descent with identical steps, carried on v = A'r and ||r||^2 instead of r."""
    h, dd = projection
    w = check_weights(system.model, w0).copy()
    m = system.m
    rho, anchor = prox if prox is not None else (0.0, None)
    gram = system.gram

    a = system.coefficients(w)
    ga = gram @ a
    v = h + ga
    rr = dd + 2.0 * float(a @ h) + float(a @ ga)
    # trailing 1.0 is the sentinel slot of the padded corrective ids
    w_ext = np.append(w, 1.0)

    outcome = SweepOutcome(w=w, sweeps=0, converged=False)
    outcome.trace.append(0.5 * rr + _penalty(w, alpha, prox))

    order = np.arange(m)
    for sweep in range(1, max_sweeps + 1):
        if rng is not None:
            order = rng.permutation(m)
        max_change = 0.0
        for i in order:
            with_terms = system.terms[i].size > 0
            if with_terms:
                w_ext[i] = 1.0
                e = np.concatenate([[1.0], w_ext[system.partners[i]].prod(axis=1)])
                w_ext[i] = w[i]
                gr = float(e @ v[system.columns[i]])
                gg = float(e @ system.blocks[i] @ e)
            else:
                gr = float(v[i])
                gg = float(gram[i, i])
            denom = gg + rho
            if denom <= 0.0:
                t = 0.0
            else:
                a_i = anchor[i] if anchor is not None else 0.0
                t = (gg * w[i] - gr - alpha + rho * a_i) / denom
                t = min(max(t, 0.0), 1.0)
            step = t - w[i]
            if step != 0.0:
                v += step * (e @ system.rows[i]) if with_terms else step * gram[i]
                rr += step * (2.0 * gr + step * gg)
                w[i] = t
                w_ext[i] = t
                max_change = max(max_change, abs(step))

        outcome.sweeps = sweep
        outcome.trace.append(0.5 * rr + _penalty(w, alpha, prox))
        if max_change < tol:
            outcome.converged = True
            break

    outcome.w = w
    outcome.fit = 0.5 * max(rr, 0.0)
    return outcome
