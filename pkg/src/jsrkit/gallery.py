"""Small matrix families and rotation fixtures used by demos and tests."""

from fractions import Fraction

from .bounds import MatrixSet

__all__ = [
    "antidiagonal_pair",
    "rank_one_pair",
    "golden_rotation_convergents",
]


def antidiagonal_pair():
    """Two antidiagonal 2x2 matrices whose lower sequence oscillates.

    The length-2 alternating product is diag(2, 1/2), so the
    spectral-radius lower values hit sqrt(2) at every even length but
    collapse back to 1 at odd lengths: the lower sequence has a limit
    superior that is not a limit.  The joint spectral radius is sqrt(2).
    """
    return MatrixSet(
        [[[0, 2], [0.5, 0]], [[0, 1], [1, 0]]],
        labels=["double-swap", "swap"],
    )


def rank_one_pair():
    """A rank-one pair whose Euclidean upper gap decays like 1/n.

    Every length-n product equals 2^(n-1) times one of the two
    generators, so the Euclidean upper values are 2^(1 + 1/(2n)) while
    the lower sequence is exactly 2 from length 1: the generic upper
    bound converges only at rate 1/n even though the lower bound is
    immediately sharp.
    """
    return MatrixSet(
        [[[2, 2], [0, 0]], [[1, 1], [1, 1]]],
        labels=["upper-rank-one", "ones"],
    )


def golden_rotation_convergents(count=11):
    """Continued-fraction convergents of the inverse golden ratio.

    Returns ratios of consecutive Fibonacci numbers starting at 1/2, so
    the denominators run through 2, 3, 5, 8, 13, ...  Twelve terms reach
    denominator 377, plenty for exact factor dictionaries at the window
    widths the orbit-distance computations use.
    """
    fib = [1, 1]
    while len(fib) < count + 2:
        fib.append(fib[-1] + fib[-2])
    return [Fraction(fib[i], fib[i + 1]) for i in range(1, count + 1)]
