"""Slow, obviously-correct reference implementations used only by the tests."""
import math
from fractions import Fraction

import numpy as np


def lz76_textbook(seq):
    """Phrase count by direct substring search.

    A phrase starting at ``i`` grows while ``seq[i:i+l]`` already appears
    somewhere in ``seq[:i+l-1]`` (the copy may overlap itself); one more
    symbol closes it. A phrase cut short by the end still counts.
    """
    s = list(seq)
    n = len(s)
    count, i = 0, 0
    while i < n:
        l = 1
        while i + l <= n and _occurs(s[i:i + l], s[:i + l - 1]):
            l += 1
        count += 1
        i += l
    return count


def _occurs(needle, hay):
    k = len(needle)
    return any(hay[j:j + k] == needle for j in range(len(hay) - k + 1))


def stationary_exact(rho):
    """Solve pi (rho - I) = 0, sum(pi) = 1 by least squares."""
    n = rho.shape[0]
    a = np.vstack([(rho - np.eye(n)).T, np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    return np.linalg.lstsq(a, b, rcond=None)[0]


def normal_cdf(x, mean=0.0, sd=1.0):
    return 0.5 * (1.0 + math.erf((x - mean) / (sd * math.sqrt(2.0))))


def duration_probability(k, mean=2.0, sd=1.0):
    """P(duration == 2**-k) for z ~ N(mean, sd) conditioned on z > 0."""
    lo = max(k, 0)
    if k < 0:
        return 0.0
    mass = normal_cdf(k + 1, mean, sd) - normal_cdf(lo, mean, sd)
    return mass / (1.0 - normal_cdf(0.0, mean, sd))


def normalize_exact(durations, theta):
    total = sum(Fraction(d) for d in durations)
    if total <= theta:
        return [Fraction(d) for d in durations]
    return [Fraction(d) / total * theta for d in durations]
