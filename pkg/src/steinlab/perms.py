"""Permutations of {1..n} in one-line notation and their running-sup profiles.

Composition is (a*b)(x) = a(b(x)): ``compose(sigma, t)`` applies t first.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

from .topo import perm_sign


def compose(a, b) -> tuple[int, ...]:
    return tuple(a[x - 1] for x in b)


def transposition(n: int, i: int, j: int) -> tuple[int, ...]:
    w = list(range(1, n + 1))
    w[i - 1], w[j - 1] = j, i
    return tuple(w)


def sign(word) -> int:
    return perm_sign(word)


def running_sup(word) -> tuple[int, ...]:
    out, m = [], 0
    for v in word:
        m = max(m, v)
        out.append(m)
    return tuple(out)


@dataclass(frozen=True)
class PermProfile:
    word: tuple[int, ...]
    s: tuple[int, ...]
    good: bool
    x: int | None = None
    y: int | None = None

    @property
    def n(self) -> int:
        return len(self.word)

    @property
    def sign(self) -> int:
        return perm_sign(self.word)

    @property
    def eps(self) -> tuple[int, ...] | None:
        """For good permutations, eps_k = s(k) - k for k < n."""
        if not self.good:
            return None
        return tuple(self.s[k - 1] - k for k in range(1, self.n))


def classify_perm(word) -> PermProfile:
    word = tuple(word)
    n = len(word)
    if sorted(word) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {word}")
    s = running_sup(word)
    good = all(s[k - 1] in (k, k + 1) for k in range(1, n + 1))
    if good:
        return PermProfile(word, s, True)
    x = max(x for x in range(2, n) if s[x - 2] > x)
    y = min(y for y in range(x + 1, n + 1) if s[y - 1] == y)
    return PermProfile(word, s, False, x, y)


def sigma_eps(eps) -> tuple[int, ...]:
    """(1 2)^e1 (2 3)^e2 ... (n-1 n)^e_{n-1}."""
    n = len(eps) + 1
    w = tuple(range(1, n + 1))
    for k, e in enumerate(eps, start=1):
        if e:
            w = compose(w, transposition(n, k, k + 1))
    return w


def good_perms(n: int) -> list[tuple[int, ...]]:
    return [sigma_eps(e) for e in product((0, 1), repeat=n - 1)]


def bad_perms(n: int) -> list[tuple[int, ...]]:
    return [w for w in permutations(range(1, n + 1)) if not classify_perm(w).good]


def bad_involution(p: PermProfile) -> PermProfile:
    """sigma composed with the transposition (x y), applied first."""
    if p.good:
        raise ValueError("the involution is defined on bad permutations only")
    return classify_perm(compose(p.word, transposition(p.n, p.x, p.y)))


def check_involution(n: int) -> dict:
    """Exhaustive check of the bad-permutation involution on S_n."""
    bad = [classify_perm(w) for w in permutations(range(1, n + 1))]
    bad = [p for p in bad if not p.good]
    ok = {"count": len(bad), "bad": True, "involution": True, "fixed_point_free": True, "s_preserving": True, "sign_reversing": True}
    for p in bad:
        q = bad_involution(p)
        ok["bad"] &= not q.good
        ok["involution"] &= bad_involution(q).word == p.word
        ok["fixed_point_free"] &= q.word != p.word
        ok["s_preserving"] &= q.s == p.s
        ok["sign_reversing"] &= q.sign == -p.sign
    return ok
