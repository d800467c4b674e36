"""Upper and lower bound sequences for the joint spectral radius.

For a finite set A of d x d matrices the joint spectral radius is

    jsr(A) = lim_n  max{ ||A_w||^(1/n) : |w| = n },

independent of the norm.  Two computable sequences bracket it: the
normed upper values (decreasing limit by submultiplicativity) and the
spectral-radius lower values, whose supremum equals jsr(A) by the
Berger-Wang formula.  This module enumerates products exactly up to a
multiplication budget, assembles the resulting sandwich enclosure,
prunes the word tree in a Gripenberg-style best-first search, and fits
an empirical convergence rate to the gap.
"""

import heapq
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import linalg

__all__ = [
    "BudgetExceededError",
    "BudgetCounter",
    "InternalInvariantError",
    "MatrixSet",
    "Word",
    "product_of_word",
    "LevelBound",
    "rho_plus_n",
    "rho_minus_n",
    "BoundsRow",
    "BoundsReport",
    "sandwich",
    "PrunedBounds",
    "pruned_bounds",
    "RateFit",
    "fit_rate",
]

DEFAULT_BUDGET = 20_000_000
BUDGET_ENV = "JSRKIT_BUDGET"

# relative tie window for reporting near-maximal words
TIE_RTOL = 1e-12


class BudgetExceededError(RuntimeError):
    """Enumeration would exceed the configured multiplication budget."""

    def __init__(self, needed, limit, detail=""):
        self.needed = needed
        self.limit = limit
        message = (
            "enumeration needs %d matrix multiplications, budget is %d "
            "(set %s to raise it)" % (needed, limit, BUDGET_ENV)
        )
        if detail:
            message += "; " + detail
        super().__init__(message)


class InternalInvariantError(RuntimeError):
    """An internal consistency check failed; results are not trustworthy."""


class BudgetCounter:
    """Counts matrix multiplications against a hard cap.

    The default cap is ``DEFAULT_BUDGET`` unless the ``JSRKIT_BUDGET``
    environment variable overrides it.
    """

    def __init__(self, limit=None):
        if limit is None:
            env = os.environ.get(BUDGET_ENV)
            limit = int(env) if env else DEFAULT_BUDGET
        self.limit = int(limit)
        self.used = 0

    def charge(self, count):
        if self.used + count > self.limit:
            raise BudgetExceededError(self.used + count, self.limit)
        self.used += count


Word = tuple  # finite sequences of indices into a MatrixSet


class MatrixSet:
    """A finite ordered family of d x d complex matrices with labels."""

    def __init__(self, matrices, labels=None):
        mats = [linalg.as_matrix(A) for A in matrices]
        if not mats:
            raise ValueError("matrix set must be nonempty")
        d = mats[0].shape[0]
        for i, A in enumerate(mats):
            if A.shape != (d, d):
                raise linalg.DimensionError(
                    "matrix %d has shape %r, expected (%d, %d)" % (i, A.shape, d, d)
                )
        for A in mats:
            A.setflags(write=False)
        self.matrices = mats
        self.d = d
        if labels is None:
            labels = [str(i) for i in range(len(mats))]
        if len(labels) != len(mats):
            raise ValueError("need one label per matrix")
        self.labels = [str(s) for s in labels]

    def __len__(self):
        return len(self.matrices)

    def __getitem__(self, i):
        return self.matrices[i]

    def stack(self):
        return np.stack(self.matrices)

    def scaled(self, factor):
        """A new set with every matrix multiplied by ``factor``."""
        return MatrixSet([factor * A for A in self.matrices], labels=self.labels)

    def check_word(self, word):
        word = tuple(int(i) for i in word)
        m = len(self)
        for i in word:
            if not 0 <= i < m:
                raise IndexError("word index %d out of range for a %d-matrix set" % (i, m))
        return word

    def product(self, word):
        """Product along a word, rightmost factor applied first.

        Index position 1 of the word acts first: the result is
        ``A[w_n] @ ... @ A[w_1]``.  The empty word gives the identity.
        """
        word = self.check_word(word)
        P = np.eye(self.d, dtype=complex)
        for i in word:
            P = self.matrices[i] @ P
        return P


def product_of_word(mset, word):
    return mset.product(word)


def _word_of_index(index, n, m):
    """Digits of ``index`` base ``m``, most significant first (= w_1)."""
    digits = [0] * n
    for k in range(n - 1, -1, -1):
        index, digits[k] = divmod(index, m)
    return tuple(digits)


def _chunked(total, workers):
    """Contiguous chunk boundaries; the partition depends only on sizes."""
    workers = max(1, int(workers))
    return np.array_split(np.arange(total), min(workers, total) or 1)


def _extend_level(stack, P, counter, workers):
    """All one-symbol extensions of the products in ``P``.

    Index order is preserved so that numeric order equals lexicographic
    order on words: child ``i*m + j`` appends symbol ``j`` to word ``i``.
    The per-element results do not depend on the chunking, so any worker
    count yields bit-identical output.
    """
    m, d = stack.shape[0], stack.shape[1]
    counter.charge(len(P) * m)

    def block(idx):
        return np.einsum("jab,ibc->ijac", stack, P[idx])

    chunks = _chunked(len(P), workers)
    if len(chunks) == 1:
        out = block(chunks[0])
        return out.reshape(len(P) * m, d, d)
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(block, chunks))
    return np.concatenate(parts).reshape(len(P) * m, d, d)


def _iter_levels(mset, n_max, counter, workers=1):
    """Yield ``(n, P_n)`` for n = 1..n_max, P_n indexed lexicographically."""
    stack = mset.stack()
    P = np.eye(mset.d, dtype=complex)[None]
    for n in range(1, n_max + 1):
        P = _extend_level(stack, P, counter, workers)
        yield n, P


def _batched_map(fn, P, workers):
    chunks = _chunked(len(P), workers)
    if len(chunks) == 1:
        return fn(P[chunks[0]])
    with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
        parts = list(pool.map(lambda idx: fn(P[idx]), chunks))
    return np.concatenate(parts)


def _euclidean_norms(P, workers):
    return _batched_map(lambda Q: np.linalg.svd(Q, compute_uv=False)[:, 0], P, workers)


def _spectral_radii(P, workers):
    return _batched_map(lambda Q: np.abs(np.linalg.eigvals(Q)).max(axis=1), P, workers)


def _matrix_norms(P, norm, workers):
    if norm is None or norm == "euclidean" or getattr(norm, "kind", None) == "euclidean":
        return _euclidean_norms(P, workers)
    if hasattr(norm, "matrix_norms_batch"):
        return norm.matrix_norms_batch(P, workers=workers)
    return np.array([norm.matrix_norm(M) for M in P])


@dataclass(frozen=True)
class LevelBound:
    """A per-length bound value with its lexicographically first argmax word."""

    value: float
    word: tuple
    ties: tuple = ()


def _level_bound(values, n, m, nth_root_of, ties):
    top = int(np.argmax(values))  # first occurrence = lexicographically least word
    value = float(nth_root_of(values[top]))
    word = _word_of_index(top, n, m)
    tie_words = ()
    if ties:
        cutoff = values[top] * (1.0 - TIE_RTOL)
        idx = np.nonzero(values >= cutoff)[0]
        tie_words = tuple(_word_of_index(int(i), n, m) for i in idx)
    return LevelBound(value, word, tie_words)


def rho_plus_n(mset, n, norm=None, budget=None, workers=1, ties=False):
    """Largest ``||A_w||^(1/n)`` over all words of length ``n``.

    The maximum is exact for the Euclidean norm; adapted norms evaluate
    their operator norm by the deterministic search documented in
    :mod:`jsrkit.extremal`.  Ties are broken towards the
    lexicographically smallest word.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    counter = budget if isinstance(budget, BudgetCounter) else BudgetCounter(budget)
    for level, P in _iter_levels(mset, n, counter, workers):
        if level == n:
            values = _matrix_norms(P, norm, workers)
            return _level_bound(values, n, len(mset), lambda v: v ** (1.0 / n), ties)


def rho_minus_n(mset, n, budget=None, workers=1, ties=False):
    """Largest ``rho(A_w)^(1/n)`` over all words of length ``n``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    counter = budget if isinstance(budget, BudgetCounter) else BudgetCounter(budget)
    for level, P in _iter_levels(mset, n, counter, workers):
        if level == n:
            values = _spectral_radii(P, workers)
            return _level_bound(values, n, len(mset), lambda v: v ** (1.0 / n), ties)


@dataclass(frozen=True)
class BoundsRow:
    n: int
    rho_plus: float
    rho_minus: float
    best_lower: float
    best_upper: float
    gap: float
    word_plus: tuple
    word_minus: tuple


@dataclass
class BoundsReport:
    """Per-length bound values together with the running enclosure."""

    rows: list
    norm_label: str = "euclidean"
    truncated: bool = False
    fitted_rate: float = None

    def best_lower(self):
        return self.rows[-1].best_lower if self.rows else 0.0

    def best_upper(self):
        return self.rows[-1].best_upper if self.rows else math.inf

    def gaps(self):
        return [(row.n, row.gap) for row in self.rows]


def sandwich(mset, N, norm=None, budget=None, workers=1):
    """Bound rows for n = 1..N with running best lower/upper values.

    The enclosure ``best_lower <= jsr(A) <= best_upper`` holds for every
    row; the two running bounds are checked against each other and an
    :class:`InternalInvariantError` is raised if they ever cross beyond
    roundoff.  Exhausting the multiplication budget truncates the report
    (flagged) rather than raising.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    counter = budget if isinstance(budget, BudgetCounter) else BudgetCounter(budget)
    label = "euclidean" if norm is None else getattr(norm, "label", str(norm))
    report = BoundsReport(rows=[], norm_label=label)
    best_lower, best_upper = 0.0, math.inf
    m = len(mset)
    try:
        for n, P in _iter_levels(mset, N, counter, workers):
            plus = _level_bound(_matrix_norms(P, norm, workers), n, m, lambda v: v ** (1.0 / n), False)
            minus = _level_bound(_spectral_radii(P, workers), n, m, lambda v: v ** (1.0 / n), False)
            best_lower = max(best_lower, minus.value)
            best_upper = min(best_upper, plus.value)
            gap = best_upper - best_lower
            if gap < -1e-9 * max(1.0, best_upper):
                raise InternalInvariantError(
                    "lower bound %.17g exceeds upper bound %.17g at n=%d"
                    % (best_lower, best_upper, n)
                )
            report.rows.append(
                BoundsRow(n, plus.value, minus.value, best_lower, best_upper, gap, plus.word, minus.word)
            )
    except BudgetExceededError:
        report.truncated = True
    return report


@dataclass
class PrunedBounds:
    lower: float
    upper: float
    conclusive: bool
    expanded: int
    deepest: int


def pruned_bounds(mset, delta, max_depth=40, budget=None):
    """Best-first word-tree search for an enclosure of width ``delta``.

    A branch ``w`` stays alive while ``||A_w||^(1/|w|)`` exceeds
    ``lower * (1 - delta/4)``.  The reported upper bound is the largest
    normalised norm over the final frontier, which is sound because
    every long product factors through frontier words.  Hitting
    ``max_depth`` or the budget before the gap closes yields an
    inconclusive result (flag, not an exception).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    counter = budget if isinstance(budget, BudgetCounter) else BudgetCounter(budget)
    m = len(mset)

    lower = 0.0
    retired_max = 0.0
    heap = []  # (-normalised norm, word, product)
    expanded = 0
    deepest = 1

    counter.charge(m)
    for j in range(m):
        P = mset.matrices[j]
        s = float(np.linalg.norm(P, 2))
        lower = max(lower, linalg.spectral_radius(P))
        heapq.heappush(heap, (-s, (j,), P))

    def current_upper():
        alive = -heap[0][0] if heap else 0.0
        return max(alive, retired_max)

    conclusive = False
    while heap:
        upper = current_upper()
        if upper - lower <= delta:
            conclusive = True
            break
        neg_s, word, P = heapq.heappop(heap)
        depth = len(word)
        if depth >= max_depth:
            retired_max = max(retired_max, -neg_s)
            continue
        expanded += 1
        try:
            counter.charge(m)
        except BudgetExceededError:
            retired_max = max(retired_max, -neg_s)
            break
        keep_threshold = lower * (1.0 - delta / 4.0)
        for j in range(m):
            Pc = mset.matrices[j] @ P
            wc = word + (j,)
            deepest = max(deepest, len(wc))
            sc = float(np.linalg.norm(Pc, 2)) ** (1.0 / len(wc))
            lower = max(lower, linalg.spectral_radius(Pc) ** (1.0 / len(wc)))
            if sc <= keep_threshold:
                retired_max = max(retired_max, sc)
            else:
                heapq.heappush(heap, (-sc, wc, Pc))

    upper = current_upper()
    if not heap and not conclusive:
        conclusive = upper - lower <= delta
    return PrunedBounds(lower, max(upper, lower), conclusive or upper - lower <= delta, expanded, deepest)


@dataclass(frozen=True)
class RateFit:
    """Fitted decay exponent of the gap column, or a convergence flag."""

    r_hat: float
    r_squared: float
    converged: bool = False


# gaps at or below this are treated as numerically converged, not fitted
GAP_FLOOR = 1e-13


def fit_rate(report, tail_fraction=0.5):
    """Least-squares slope of log(gap) against log(n) over the tail rows.

    ``r_hat`` is minus the slope, so gap ~ n**(-r_hat).  If any tail gap
    has already collapsed below ``GAP_FLOOR`` the fit is skipped and the
    result carries ``converged=True`` instead.
    """
    if not 0.0 < tail_fraction < 1.0:
        raise ValueError("tail_fraction must lie in (0, 1)")
    rows = report.rows
    k = max(1, math.ceil(len(rows) * tail_fraction))
    tail = rows[-k:]
    if len(tail) < 6:
        raise ValueError("need at least 6 rows in the fitted tail, have %d" % len(tail))
    gaps = np.array([row.gap for row in tail], dtype=float)
    if np.any(gaps <= GAP_FLOOR):
        return RateFit(r_hat=math.nan, r_squared=math.nan, converged=True)
    x = np.log([row.n for row in tail])
    y = np.log(gaps)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(r_hat=float(-slope), r_squared=r2)
