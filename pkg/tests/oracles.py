"""Independent reference computations used to derive frozen test values."""
from itertools import product
from math import comb

from enlab.epicat import all_representatives, canonical_key


def composition_count(m: int) -> int:
    """Two-level trees of homological degree m: sum over r_1 + r_2 = m of C(r_2, r_1)."""
    return sum(comb(m - a, a) for a in range(m + 1) if a <= m - a)


def fibonacci(k: int) -> int:
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def brute_hom_count(t, s) -> int:
    """Hom-set size from exhaustive search over all level maps."""
    return len({canonical_key(h) for h in all_representatives(t, s)})


def brute_surjections(a: int, b: int) -> list:
    out = []
    for f in product(range(b + 1), repeat=a + 1):
        if all(x <= y for x, y in zip(f, f[1:])) and set(f) == set(range(b + 1)):
            out.append(f)
    return out


def dfs_labels_by_recursion(t):
    """Edge labels by recursive descent (a second implementation)."""
    labels = {}
    counter = [0]

    def visit(j, i):
        counter[0] += 1
        labels[(j, i)] = counter[0]
        if j < t.n:
            for c in range(t.size(j + 1)):
                if t.f(j + 1)[c] == i:
                    visit(j + 1, c)

    for i in range(t.size(1)):
        visit(1, i)
    return labels
