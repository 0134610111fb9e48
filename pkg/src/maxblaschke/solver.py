"""Homotopy solver for maximal Blaschke products with prescribed critical sets.

Given a critical set ``C`` of total mass ``m`` containing 0 with multiplicity
``N``, the extremal product has degree ``m + 1`` and the form

    B(z) = eta * z^(N+1) * prod_k (z - b_k) / (1 - conj(b_k) z),

so the unknowns are the ``m - N`` free zeros ``b_k``.  The defining equations
say the critical numerator polynomial ``Q`` vanishes at each prescribed
nonzero point to its multiplicity.  The solver follows the path ``C(t) = t C``
from the collapsed state ``B_0 = z^(m+1)`` at ``t = 0``, correcting with a
damped Newton iteration at each step; ``Q`` and its derivatives with respect
to ``b_k`` and ``conj(b_k)`` are evaluated as short Taylor jets in factored
form, and the conjugate-linear structure is handled by assembling the real
``2(m-N)``-dimensional system.  The unimodular factor is set last so that
``B^(N+1)(0) > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .blaschke import (
    CriticalSet,
    FiniteBlaschke,
    compose,
    critical_numerator_coeffs,
    critical_points,
    derivative,
    derivative_at_origin_order,
    evaluate,
)
from .disk import DiskAutomorphism, RiemannMapSpec, riemann_map_apply, \
    riemann_map_derivative, riemann_map_invert
from .errors import InputError, NumericalError
from .roots import polynomial_roots


@dataclass(frozen=True)
class HomotopyConfig:
    """Knobs for the path-following solve."""

    steps: int = 32
    newton_tol: float = 1e-12
    max_newton_iters: int = 50
    step_halving_limit: int = 8
    roundtrip_tol: float = 1e-8


@dataclass
class SolveReport:
    """Outcome of a solve: the product plus convergence diagnostics.

    ``homotopy_trace`` holds one ``(t, residual, newton_iters)`` triple per
    accepted path step; ``residual_norm`` is the final max-norm of the
    scale-normalized critical-numerator conditions; ``roundtrip_error`` is the
    largest pseudo-hyperbolic distance between the requested critical set and
    the one recovered from the solution.
    """

    solution: FiniteBlaschke
    residual_norm: float
    roundtrip_error: float
    functional_value: float
    homotopy_trace: list = field(default_factory=list)


# ----------------------------------------------------------------------
# jet arithmetic: a jet is the array [f(c), f'(c)/1!, ..., f^(K)(c)/K!]

def _jet_mul(a, b, K):
    return np.convolve(a, b)[: K + 1]


def _jet_prod_chain(jets, K):
    """Prefix and suffix products of a list of jets."""
    one = np.zeros(K + 1, dtype=complex)
    one[0] = 1.0
    prefix = [one]
    for j in jets:
        prefix.append(_jet_mul(prefix[-1], j, K))
    suffix = [one]
    for j in reversed(jets):
        suffix.append(_jet_mul(suffix[-1], j, K))
    suffix.reverse()
    return prefix, suffix


def _conditions_at(zeros, c, K):
    """Jets of Q and its Wirtinger derivatives at ``c``, truncated at order K.

    Returns ``(q, dq, dqbar, scale)`` where ``q`` has length K+1, ``dq`` and
    ``dqbar`` map zero-index -> jet, and ``scale`` bounds the accumulated
    magnitude for noise-floor estimates.
    """
    d = len(zeros)
    jets = []
    for a in zeros:
        jets.append(
            np.array(
                [(c - a) * (1 - np.conj(a) * c), 1 - 2 * np.conj(a) * c + abs(a) ** 2,
                 -np.conj(a)][: K + 1],
                dtype=complex,
            )
        )
    prefix, suffix = _jet_prod_chain(jets, K)
    w = np.array([1.0 - abs(a) ** 2 for a in zeros])
    q = np.zeros(K + 1, dtype=complex)
    for k in range(d):
        q += w[k] * _jet_mul(prefix[k], suffix[k + 1], K)
    scale = float(np.sum(w * np.abs([_jet_mul(prefix[k], suffix[k + 1], K)[0]
                                     for k in range(d)]))) + 1.0
    dq, dqbar = {}, {}
    for l in range(d):
        u = _jet_mul(prefix[l], suffix[l + 1], K)  # prod_{j != l} P_j
        reduced = jets[:l] + jets[l + 1:]
        rpre, rsuf = _jet_prod_chain(reduced, K)
        s = np.zeros(K + 1, dtype=complex)
        wk = [w[j] for j in range(d) if j != l]
        for k in range(d - 1):
            s += wk[k] * _jet_mul(rpre[k], rsuf[k + 1], K)
        a = zeros[l]
        lin = np.array([1 - np.conj(a) * c, -np.conj(a)][: K + 1], dtype=complex)
        lin = np.pad(lin, (0, K + 1 - len(lin)))
        dq[l] = -np.conj(a) * u - _jet_mul(lin, s, K)
        quad = np.array([(c - a) * c, 2 * c - a, 1.0][: K + 1], dtype=complex)
        quad = np.pad(quad, (0, K + 1 - len(quad)))
        dqbar[l] = -a * u - _jet_mul(quad, s, K)
    return q, dq, dqbar, scale


def _q_coefficient_scale(zeros):
    """Max coefficient magnitude of the critical numerator polynomial."""
    return float(np.max(np.abs(critical_numerator_coeffs(zeros))))


def _assemble(free, n_origin, targets):
    """Residual and Wirtinger Jacobian blocks for the current free zeros."""
    zeros = [0j] * n_origin + list(free)
    n = len(free)
    rows = sum(k for _, k in targets)
    R = np.zeros(rows, dtype=complex)
    A = np.zeros((rows, n), dtype=complex)
    Bm = np.zeros((rows, n), dtype=complex)
    row = 0
    for c, k in targets:
        q, dq, dqbar, _ = _conditions_at(zeros, c, k - 1)
        R[row: row + k] = q[:k]
        for l in range(n):
            A[row: row + k, l] = dq[n_origin + l][:k]
            Bm[row: row + k, l] = dqbar[n_origin + l][:k]
        row += k
    return R, A, Bm


def _newton(free, n_origin, targets, cfg, scale):
    """Damped Newton on the free zeros; returns (free, iters, residual)."""
    n = len(free)
    for it in range(1, cfg.max_newton_iters + 1):
        R, A, Bm = _assemble(free, n_origin, targets)
        res = float(np.max(np.abs(R))) / scale if len(R) else 0.0
        if res <= cfg.newton_tol:
            return free, it, res
        J = np.block(
            [
                [(A + Bm).real, -(A - Bm).imag],
                [(A + Bm).imag, (A - Bm).real],
            ]
        )
        rhs = -np.concatenate([R.real, R.imag])
        try:
            step = np.linalg.solve(J, rhs)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(J, rhs, rcond=None)
        delta = step[:n] + 1j * step[n:]
        for alpha in (1.0, 0.5, 0.25, 0.125, 0.0625):
            trial = free + alpha * delta
            if np.any(np.abs(trial) >= 1.0):
                continue  # a zero escaped the closed disk: shrink the step
            Rt, _, _ = _assemble(trial, n_origin, targets)
            if np.max(np.abs(Rt)) <= (1 - 0.25 * alpha) * np.max(np.abs(R)):
                free = trial
                break
        else:
            raise NumericalError("Newton step rejected (no admissible damping)")
    R, _, _ = _assemble(free, n_origin, targets)
    res = float(np.max(np.abs(R))) / scale
    if res <= cfg.newton_tol:
        return free, cfg.max_newton_iters, res
    raise NumericalError("Newton did not converge")


def _collapsed_predictor(order, targets, total):
    """Asymptotic free zeros near the collapsed state.

    For small targets, ``B`` behaves like the polynomial ``p`` with
    ``p'(z) = (m+1) z^order prod (z - c_i)^{k_i}`` and ``p(0) = 0``; the
    nonzero roots of ``p`` start the first Newton correction (the labeled
    Jacobian is singular at the exactly collapsed state, so the solver never
    starts there).
    """
    dp_core = np.array([float(total + 1)], dtype=complex)
    for c, k in targets:
        for _ in range(k):
            dp_core = np.convolve(dp_core, np.array([1.0, -c]))
    # integrating z^order * dp_core and stripping z^(order+1) divides each
    # descending coefficient by its resulting power
    deg_core = len(dp_core) - 1
    divisors = np.arange(deg_core + order + 1, order, -1)
    return polynomial_roots(dp_core / divisors)


def solve_maximal(
    C: CriticalSet, cfg: HomotopyConfig | None = None, schedule=None
) -> SolveReport:
    """Compute the maximal Blaschke product with critical set ``C``.

    Parameters
    ----------
    C : CriticalSet
    cfg : HomotopyConfig, optional
    schedule : callable, optional
        Maps ``t`` in (0, 1] to per-entry scale factors for the path
        ``C(t)``; defaults to the radial path ``t * C``.  Alternative
        schedules reach the same product along different paths and exist for
        cross-validation.

    Returns
    -------
    SolveReport

    Raises
    ------
    NumericalError
        On homotopy breakdown, Newton failure, zero escape that persists
        through step halving, or a failed critical-set round trip.
    """
    cfg = cfg or HomotopyConfig()
    m = C.total
    n_origin = C.origin_multiplicity + 1
    entries = C.nonzero_entries()
    n_free = m - (n_origin - 1)

    trace = []
    if n_free == 0:
        free = np.array([], dtype=complex)
        trace.append((1.0, 0.0, 0))
    else:
        if schedule is None:
            schedule = lambda t: [t] * len(entries)

        def targets_at(t):
            factors = schedule(t)
            return [(f * c, k) for f, (c, k) in zip(factors, entries)]

        free = None
        free_prev = None
        t = 0.0
        t_prev = 0.0
        dt = 1.0 / cfg.steps
        halvings = 0
        while t < 1.0:
            t_next = min(1.0, t + dt)
            targets = targets_at(t_next)
            # Predictors, in order of preference: secant extrapolation from
            # the last two accepted states, the last state unchanged, and --
            # early in the deformation, where the Jacobian is nearly
            # singular -- the collapsed-state asymptotic.
            candidates = []
            if free is not None:
                if free_prev is not None and t > t_prev:
                    slope = (free - free_prev) / (t - t_prev)
                    candidates.append(free + slope * (t_next - t))
                candidates.append(free)
                if t_next <= 0.25:
                    candidates.append(
                        _collapsed_predictor(n_origin - 1, targets, m)
                    )
            else:
                candidates.append(_collapsed_predictor(n_origin - 1, targets, m))
            accepted = None
            for predictor in candidates:
                predictor = np.asarray(predictor, dtype=complex)
                if np.any(np.abs(predictor) >= 1.0):
                    continue  # escaped the disk: useless starting point
                scale = _q_coefficient_scale(
                    [0j] * n_origin + list(predictor)
                )
                try:
                    accepted = _newton(predictor, n_origin, targets, cfg, scale)
                except NumericalError:
                    continue
                break
            if accepted is None:
                dt *= 0.5
                halvings += 1
                if halvings > cfg.step_halving_limit:
                    raise NumericalError(
                        f"homotopy breakdown near t = {t_next:.6f}"
                    )
                continue
            nxt, iters, res = accepted
            free_prev, t_prev = free, t
            free, t = nxt, t_next
            halvings = 0
            dt = min(2 * dt, 1.0 / cfg.steps)
            trace.append((t, res, iters))

    g0 = complex(np.prod(-free)) if len(free) else 1.0 + 0j
    if abs(g0) == 0:
        raise NumericalError("degenerate solution: a free zero collapsed to 0")
    eta = np.conj(g0) / abs(g0)
    solution = FiniteBlaschke(zeros=(0j,) * n_origin + tuple(free), eta=eta)

    order = n_origin - 1
    functional = derivative_at_origin_order(solution, order)
    recovered = critical_points(solution)
    roundtrip = recovered.match(C) if C.total else 0.0
    if roundtrip > cfg.roundtrip_tol:
        raise NumericalError(
            f"critical-set round trip off by {roundtrip:.3e}"
        )
    return SolveReport(
        solution=solution,
        residual_norm=trace[-1][1] if trace else 0.0,
        roundtrip_error=roundtrip,
        functional_value=functional,
        homotopy_trace=trace,
    )


def _automorphism_as_blaschke(T: DiskAutomorphism) -> FiniteBlaschke:
    # eta (c - z)/(1 - conj(c) z) = (-eta) (z - c)/(1 - conj(c) z)
    return FiniteBlaschke(zeros=(T.center,), eta=-T.rotation)


def solve_maximal_normalized(
    C: CriticalSet, T: DiskAutomorphism, cfg: HomotopyConfig | None = None
) -> SolveReport:
    """Solve for ``C`` and replace the extremal normalization by ``T o B``.

    The returned report carries the postcomposed product (same critical set)
    while the diagnostics, including the functional value, refer to the
    underlying normalized solve.
    """
    base = solve_maximal(C, cfg)
    composite = compose(_automorphism_as_blaschke(T), base.solution)
    return SolveReport(
        solution=composite,
        residual_norm=base.residual_norm,
        roundtrip_error=base.roundtrip_error,
        functional_value=base.functional_value,
        homotopy_trace=list(base.homotopy_trace),
    )


@dataclass
class TruncationResult:
    """Solves along nested prefixes of a point sequence.

    ``sup_differences[i]`` is the maximum modulus of ``B_i - B_{i+1}`` over
    the circle of radius 1/2 (which bounds the difference on the closed disk
    of that radius, both being holomorphic).
    """

    reports: list
    sup_differences: list

    @property
    def functionals(self):
        return [r.functional_value for r in self.reports]


def truncation_sequence(
    points, n_max: int, cfg: HomotopyConfig | None = None, samples: int = 1024
) -> TruncationResult:
    """Solve for each prefix of ``points`` up to length ``n_max``.

    Functional values are verified non-increasing along the nesting (a larger
    prescribed critical set can only shrink the extremal derivative); a rise
    beyond rounding slack raises.
    """
    points = list(points)
    if n_max > len(points):
        raise InputError("n_max exceeds the number of supplied points")
    reports = []
    for n in range(n_max + 1):
        reports.append(solve_maximal(CriticalSet.from_points(points[:n]), cfg))
    for a, b in zip(reports, reports[1:]):
        if b.functional_value > a.functional_value + 1e-10:
            raise NumericalError(
                "functional increased along a nested prefix"
            )
    ring = 0.5 * np.exp(2j * np.pi * np.arange(samples) / samples)
    sups = []
    for a, b in zip(reports, reports[1:]):
        sups.append(
            float(np.max(np.abs(evaluate(a.solution, ring) - evaluate(b.solution, ring))))
        )
    return TruncationResult(reports=reports, sup_differences=sups)


@dataclass
class TransplantResult:
    """Maximal product for a critical set living in a mapped domain.

    The extremal for the domain is ``B o psi`` where ``psi`` maps the domain
    onto the unit disk and ``B`` solves the transported critical set.
    """

    report: SolveReport
    map_spec: RiemannMapSpec
    disk_critical_set: CriticalSet

    def __call__(self, z):
        return evaluate(self.report.solution, riemann_map_apply(self.map_spec, z))

    def derivative(self, z):
        inner = riemann_map_apply(self.map_spec, z)
        return derivative(self.report.solution, inner) * riemann_map_derivative(
            self.map_spec, z
        )

    def domain_critical_points(self):
        """Critical points of the composite, expressed in the domain."""
        recovered = critical_points(self.report.solution)
        return [
            (riemann_map_invert(self.map_spec, p), m)
            for p, m in recovered.entries
        ]


def transplant(
    domain_points, spec: RiemannMapSpec, cfg: HomotopyConfig | None = None
) -> TransplantResult:
    """Solve the extremal problem for critical points in a mapped domain."""
    images = [riemann_map_apply(spec, p) for p in domain_points]
    disk_set = CriticalSet.from_points(images)
    report = solve_maximal(disk_set, cfg)
    return TransplantResult(
        report=report, map_spec=spec, disk_critical_set=disk_set
    )
