"""Invariant splittings and cone propagation along periodic symbol orbits.

Given a normalised matrix family and a periodic word x, the partial
products A(x, n) form a cocycle over the cyclic shift.  When all forward
products stay bounded the singular subspaces of long products converge
to a splitting C^d = V(x) + W(x): V carries the directions whose image
never collapses, W the uniformly exponentially contracted ones.  This
module estimates the fast dimension from singular-value growth
exponents, builds the finite-horizon splitting (push-forward of the
top singular subspace at horizon 2n, bottom singular subspace at
horizon n), measures how invariant the result is, and propagates cone
fields around the orbit to certify spectral-radius lower bounds.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .bounds import product_of_word
from .extremal import EuclideanNorm

__all__ = [
    "AmbiguousExponentsError",
    "cocycle_product",
    "detect_p",
    "SplittingResult",
    "finite_splitting",
    "SplittingDiagnostics",
    "splitting_residuals",
    "ConeParams",
    "cone_margin",
    "cone_contains",
    "ConePropagationReport",
    "cone_propagation_check",
    "LowerBoundCertificate",
    "certify_lower",
]

# |theta| below this counts as a zero growth exponent (per symbol)
THETA_ZERO_THRESHOLD = 0.02 * math.log(2.0)


class AmbiguousExponentsError(ValueError):
    """Some growth exponent sits too close to the zero/negative boundary."""


def cocycle_product(mset, x, n, start=0):
    """The n-step product A(T^start x, n) along a periodic word."""
    if n < 0:
        raise ValueError("n must be non-negative")
    word = tuple(x.symbol(start + i) for i in range(n))
    return product_of_word(mset, word)


def _theta_slopes(mset, x, horizon):
    """Least-squares growth rates of cumulative log singular values.

    Sampled at n = r, 2r, ..., horizon (r the period), which keeps the
    intra-period oscillation out of the fit.
    """
    r = x.period
    ns = list(range(r, horizon + 1, r))
    d = mset.d
    rows = []
    for n in ns:
        sv = linalg.singular_values(cocycle_product(mset, x, n))
        with np.errstate(divide="ignore"):
            rows.append(np.cumsum(np.log(sv)))
    table = np.array(rows)  # (len(ns), d)
    thetas = []
    for ell in range(d):
        col = table[:, ell]
        if not np.all(np.isfinite(col)):
            thetas.append(-math.inf)
            continue
        slope = np.polyfit(ns, col, 1)[0]
        thetas.append(float(slope))
    return ns, thetas


def detect_p(mset, x, horizon, threshold=THETA_ZERO_THRESHOLD):
    """Count the non-decaying singular directions along the orbit.

    Returns ``(p, theta_estimates)`` where ``theta_estimates[ell-1]`` is
    the fitted growth rate of the product of the top ``ell`` singular
    values per symbol.  Exponents inside ``[threshold, 2*threshold)`` in
    magnitude are refused as ambiguous rather than silently classified.
    """
    x.validate_for(mset)
    r = x.period
    if horizon < 4 * r:
        raise ValueError("horizon must be at least 4 periods (%d), got %d" % (4 * r, horizon))
    _, thetas = _theta_slopes(mset, x, horizon)
    ambiguous = [
        ell + 1
        for ell, th in enumerate(thetas)
        if math.isfinite(th) and threshold <= abs(th) < 2 * threshold
    ]
    if ambiguous:
        raise AmbiguousExponentsError(
            "growth exponents at levels %s are within 2x of the zero threshold" % ambiguous
        )
    zero = [abs(th) < threshold if math.isfinite(th) else False for th in thetas]
    p = 0
    while p < len(zero) and zero[p]:
        p += 1
    if any(zero[p:]):
        raise AmbiguousExponentsError(
            "zero exponents reappear after a decaying level: %s" % (thetas,)
        )
    return p, thetas


@dataclass
class SplittingResult:
    """Finite-horizon splitting at one phase of a periodic orbit."""

    p: int
    n: int
    V: linalg.Subspace
    W: linalg.Subspace
    pair: linalg.ProjectionPair
    phase: int = 0


# direct sums with a smaller principal angle than this fail the construction
SPLITTING_ANGLE_TOL = 1e-8


def finite_splitting(mset, x, p, n, phase=0):
    """Splitting at horizon n: push-forward of the slow singular data.

    V is the image under the n-step backward-started product of the
    top-p right singular subspace at horizon 2n; W is the bottom
    (d - p) right singular subspace of the forward n-step product.
    """
    x.validate_for(mset)
    if n < 1:
        raise ValueError("n must be at least 1")
    d = mset.d
    if not 0 < p <= d:
        raise ValueError("p must lie in 1..%d" % d)
    back = phase - n  # start of T^{-n} x relative to the cycle
    two_step = cocycle_product(mset, x, 2 * n, start=back)
    top, _ = linalg.right_singular_subspaces(two_step, p)
    push = cocycle_product(mset, x, n, start=back)
    V = linalg.Subspace.from_spanning(push @ top.basis)
    if V.dim != p:
        raise linalg.DegenerateSplittingError(
            "push-forward collapsed the fast subspace (rank %d < %d)" % (V.dim, p)
        )
    forward = cocycle_product(mset, x, n, start=phase)
    _, W = linalg.right_singular_subspaces(forward, p)
    if linalg.smallest_principal_angle(V, W) < SPLITTING_ANGLE_TOL:
        raise linalg.DegenerateSplittingError(
            "splitting degenerate: principal angle below %.1e" % SPLITTING_ANGLE_TOL
        )
    pair = linalg.projection_from_pair(V, W)
    return SplittingResult(p=p, n=n, V=V, W=W, pair=pair, phase=phase)


@dataclass
class SplittingDiagnostics:
    invariance_residual: float
    delta_hat: float
    xi_hat: float
    contraction_r2: float
    cauchy_rate: float
    cauchy_r2: float
    cauchy_constant: float
    commutation_residual: float
    horizon: int
    contraction_table: list = field(default_factory=list)
    cauchy_table: list = field(default_factory=list)


def _loglinear_fit(ns, values, floor=1e-13):
    pairs = [(n, v) for n, v in zip(ns, values) if v > floor]
    if len(pairs) < 2:
        return math.nan, math.nan, math.nan
    xs = np.array([p[0] for p in pairs], dtype=float)
    ys = np.log([p[1] for p in pairs])
    slope, intercept = np.polyfit(xs, ys, 1)
    fitted = slope * xs + intercept
    ss_res = float(np.sum((ys - fitted) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(math.exp(slope)), r2, float(math.exp(intercept))


def splitting_residuals(mset, x, result, n_max):
    """Quantify how close a finite-horizon splitting is to invariant.

    Per-phase splittings are rebuilt at horizon ``n_max`` (the deeper the
    horizon, the smaller the residuals, which shrink like the contraction
    ratio to the n-th power).  Reported quantities:

    * invariance residual: worst Grassmannian distance between the
      pushed-forward fast space and the fast space at the next phase;
    * delta_hat: smallest expansion of unit fast vectors over n <= n_max;
    * xi_hat: fitted per-symbol contraction ratio on the slow space, with
      its log-linear fit quality;
    * Cauchy rate of the horizon-n fast spaces, fitted the same way;
    * commutation residual of the projections with the cocycle step.
    """
    x.validate_for(mset)
    r = x.period
    p = result.p
    phases = [finite_splitting(mset, x, p, n_max, phase=k) for k in range(r)]

    invariance = 0.0
    commutation = 0.0
    for k in range(r):
        A = mset.matrices[x.symbol(k)]
        pushed = linalg.Subspace.from_spanning(A @ phases[k].V.basis)
        nxt = phases[(k + 1) % r]
        invariance = max(invariance, linalg.grassmann_distance(pushed, nxt.V))
        comm = A @ phases[k].pair.P - nxt.pair.P @ A
        commutation = max(commutation, float(np.linalg.norm(comm, 2)))

    V0 = phases[0].V
    W0 = phases[0].W
    delta_hat = math.inf
    for n in range(1, n_max + 1):
        M = cocycle_product(mset, x, n)
        sv = np.linalg.svd(M @ V0.basis, compute_uv=False)
        delta_hat = min(delta_hat, float(sv[-1]))

    ns = list(range(r, n_max + 1, r))
    contraction = []
    for n in ns:
        M = cocycle_product(mset, x, n)
        contraction.append(float(np.linalg.norm(M @ W0.basis, 2)))
    xi_hat, xi_r2, _ = _loglinear_fit(ns, contraction)

    cauchy_ns, cauchy_vals = [], []
    for n in ns:
        if n + r > n_max:
            break
        Vn = finite_splitting(mset, x, p, n).V
        Vnr = finite_splitting(mset, x, p, n + r).V
        cauchy_ns.append(n)
        cauchy_vals.append(linalg.grassmann_distance(Vn, Vnr))
    cauchy_rate, cauchy_r2, cauchy_C = _loglinear_fit(cauchy_ns, cauchy_vals)

    return SplittingDiagnostics(
        invariance_residual=invariance,
        delta_hat=delta_hat,
        xi_hat=xi_hat,
        contraction_r2=xi_r2,
        cauchy_rate=cauchy_rate,
        cauchy_r2=cauchy_r2,
        cauchy_constant=cauchy_C,
        commutation_residual=commutation,
        horizon=n_max,
        contraction_table=list(zip(ns, contraction)),
        cauchy_table=list(zip(cauchy_ns, cauchy_vals)),
    )


@dataclass
class ConeParams:
    """A cone field along an orbit: aperture, projections, and the norm."""

    theta: float
    projections: list  # ProjectionPair per phase
    norm: object = field(default_factory=EuclideanNorm)

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise ValueError("theta must lie in (0, 1]")

    def pair(self, position):
        return self.projections[position % len(self.projections)]


def cone_params_from_splitting(mset, x, theta, norm=None, horizon=24):
    """Build the per-phase projection family for a cone field."""
    pairs = []
    p = None
    for k in range(x.period):
        if p is None:
            p, _ = detect_p(mset, x, max(4 * x.period, horizon))
        pairs.append(finite_splitting(mset, x, p, horizon, phase=k).pair)
    return ConeParams(theta=theta, projections=pairs, norm=norm or EuclideanNorm())


def cone_margin(params, position, v):
    """theta * |||P v||| - |||Q v|||; non-negative means membership."""
    pair = params.pair(position)
    v = np.asarray(v, dtype=complex)
    nrm = params.norm.vector_norm
    return params.theta * nrm(pair.P @ v) - nrm(pair.complement() @ v)


def cone_contains(params, position, v):
    margin = cone_margin(params, position, v)
    return margin >= 0.0, margin


@dataclass
class ConePropagationReport:
    ok: bool
    laps: int
    block: int
    theta0: float
    xi_hat: float
    k1_hat: float
    aperture_trace: list  # certified apertures, inflated constants
    worst_membership_slack: float
    worst_norm_slack: float
    measured_aperture_ratio: float = math.nan  # worst observed per-block shrink
    failures: list = field(default_factory=list)


def _cone_test_vectors(pair, theta, norm):
    """Deterministic vectors inside the cone of aperture theta."""
    vecs = []
    nrm = norm.vector_norm
    for pv in pair.V.basis.T:
        npv = nrm(pv)
        vecs.append(pv / npv)
        for qv in pair.W.basis.T:
            nqv = nrm(qv)
            for tau in (0.5, 1.0 - 1e-9):
                for phase in (1.0, -1.0, 1j):
                    t = tau * theta * npv / nqv
                    vecs.append((pv + t * phase * qv) / npv)
    return vecs


def cone_propagation_check(mset, x, params, N, laps, diagnostics=None, tol=1e-9):
    """Push cone vectors through N-step blocks and check cone contraction.

    The contraction property: a vector in the cone of aperture theta is
    mapped, after N steps, into the cone of aperture K1 * xi^N * theta
    at the shifted phase, losing at most a (theta + K1 * xi^N * theta)
    fraction of its norm.  K1 and xi are fitted from the splitting
    diagnostics and inflated by 10% before the inequalities are
    asserted; any violation is reported with the offending vector and
    position rather than raised.
    """
    x.validate_for(mset)
    if diagnostics is None:
        result = finite_splitting(mset, x, detect_p(mset, x, max(4 * x.period, 4 * N))[0], 24)
        diagnostics = splitting_residuals(mset, x, result, 24)
    xi = diagnostics.xi_hat * 1.1
    norm = params.norm
    m_q = max(
        norm.matrix_norm(np.asarray(pair.complement())) for pair in params.projections
    )
    # contraction prefactor in the chosen norm, fitted on the slow space
    c_hat = 0.0
    W0 = params.pair(0).W
    for n, _ in diagnostics.contraction_table:
        M = cocycle_product(mset, x, n)
        sup_w = max(
            norm.vector_norm(M @ w) / norm.vector_norm(w) for w in W0.basis.T
        )
        c_hat = max(c_hat, sup_w / (diagnostics.xi_hat**n))
    k1 = 1.1 * 2.0 * c_hat * m_q

    theta = params.theta
    shrink = k1 * xi**N
    report = ConePropagationReport(
        ok=True,
        laps=laps,
        block=N,
        theta0=theta,
        xi_hat=xi,
        k1_hat=k1,
        aperture_trace=[theta],
        worst_membership_slack=math.inf,
        worst_norm_slack=math.inf,
    )
    if shrink >= 1.0:
        report.ok = False
        report.failures.append(
            ("aperture", 0, "K1 * xi^N = %.3g does not contract" % shrink)
        )
        return report

    report.aperture_trace = [theta * shrink**j for j in range(laps + 1)]
    vectors = _cone_test_vectors(params.pair(0), theta, norm)
    measured_ratio = 0.0
    for vec_index, v0 in enumerate(vectors):
        v = np.asarray(v0, dtype=complex)
        theta_j = theta
        pos = 0
        pair0 = params.pair(0)
        tau_prev = norm.vector_norm(pair0.complement() @ v) / max(
            norm.vector_norm(pair0.P @ v), 1e-300
        )
        for lap in range(laps):
            M = cocycle_product(mset, x, N, start=pos)
            w = M @ v
            theta_next = shrink * theta_j
            pair = params.pair(pos + N)
            p_norm = norm.vector_norm(pair.P @ w)
            q_norm = norm.vector_norm(pair.complement() @ w)
            margin = theta_next * p_norm - q_norm
            slack = margin / max(norm.vector_norm(w), 1e-300)
            report.worst_membership_slack = min(report.worst_membership_slack, slack)
            if slack < -tol:
                report.ok = False
                report.failures.append(("membership", (vec_index, lap), slack))
            bound = (1.0 - theta_j - shrink * theta_j) * norm.vector_norm(v)
            norm_slack = norm.vector_norm(w) - bound
            report.worst_norm_slack = min(report.worst_norm_slack, norm_slack)
            if norm_slack < -tol:
                report.ok = False
                report.failures.append(("norm", (vec_index, lap), norm_slack))
            tau = q_norm / max(p_norm, 1e-300)
            if tau_prev > 1e-14:
                measured_ratio = max(measured_ratio, tau / tau_prev)
            tau_prev = tau
            v = w
            theta_j = theta_next
            pos += N
    report.measured_aperture_ratio = measured_ratio
    return report


@dataclass
class LowerBoundCertificate:
    """A spectral-radius lower bound witnessed by a single word.

    ``value`` equals ``rho(A_w)^(1/|w|)``, reproducible from the word
    alone.  The Gelfand trace ``||A_w^k||^(1/(k |w|))`` is recorded for
    k = 1..8 as a cross-check that the value is approached from above.
    """

    word: tuple
    value: float
    gelfand: list
    norm_trace: list
    vacuous: bool = False


def certify_lower(mset, word, powers=8):
    word = mset.check_word(word)
    if len(word) == 0:
        raise ValueError("word must be nonempty")
    P = product_of_word(mset, word)
    n = len(word)
    rho = linalg.spectral_radius(P)
    value = rho ** (1.0 / n)
    gelfand, norms = [], []
    Q = np.eye(mset.d, dtype=complex)
    for k in range(1, powers + 1):
        Q = Q @ P
        nk = float(np.linalg.norm(Q, 2))
        norms.append(nk)
        gelfand.append(nk ** (1.0 / (k * n)))
    return LowerBoundCertificate(
        word=word,
        value=value,
        gelfand=gelfand,
        norm_trace=norms,
        vacuous=(rho == 0.0),
    )
