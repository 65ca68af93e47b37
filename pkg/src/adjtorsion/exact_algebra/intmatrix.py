"""Integer matrices: Smith normal form and integer linear systems."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

IntMatrix = list[list[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if not a:
        return []
    if len(a[0]) != len(b):
        raise ValueError(f"cannot multiply {len(a)}x{len(a[0])} by {len(b)}x{len(b[0]) if b else 0}")
    cols = list(zip(*b)) if b else []
    if not b:
        return [[] for _ in a]
    return [[sum(x * y for x, y in zip(r, c)) for c in cols] for r in a]


def matvec(a: IntMatrix, v: Sequence[int]) -> list[int]:
    return [sum(x * y for x, y in zip(r, v)) for r in a]


def int_det(a: IntMatrix) -> int:
    """Bareiss determinant of a square integer matrix."""
    n = len(a)
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        p = next((i for i in range(k, n) if m[i][k]), None)
        if p is None:
            return 0
        if p != k:
            m[k], m[p] = m[p], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


@dataclass
class SmithForm:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)

    def __iter__(self):
        return iter((self.U, self.D, self.V))


def smith_normal_form(a: IntMatrix) -> SmithForm:
    """U, D, V with U @ a @ V == D diagonal, d_1 | d_2 | ..., U and V unimodular."""
    n = len(a)
    m = len(a[0]) if n else 0
    d = [list(map(int, r)) for r in a]
    u = identity(n)
    v = identity(m)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):  # row dst += k * row src
        d[dst] = [x + k * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):  # col dst += k * col src
        for r in d:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    t = 0
    while t < min(n, m):
        # smallest non-zero entry of the remaining block becomes the pivot
        nz = [(abs(d[i][j]), i, j) for i in range(t, n) for j in range(t, m) if d[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, n):
                if d[i][t]:
                    q = d[i][t] // d[t][t]
                    add_row(t, i, -q)
                    if d[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, m):
                if d[t][j]:
                    q = d[t][j] // d[t][t]
                    add_col(t, j, -q)
                    if d[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                # enforce divisibility of the rest of the block
                bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, m) if d[i][j] % d[t][t]), None)
                if bad is None:
                    break
                add_row(bad[0], t, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return SmithForm(u, d, v)


@dataclass
class IntegerSolution:
    particular: list[int]
    kernel: list[list[int]]


def solve_integer(a: IntMatrix, b: Sequence[int]) -> IntegerSolution | None:
    """All integer solutions of a x = b as particular + Z-span(kernel), or None if there are none."""
    n = len(a)
    m = len(a[0]) if n else 0
    if len(b) != n:
        raise ValueError("right-hand side length does not match the row count")
    snf = smith_normal_form(a)
    c = matvec(snf.U, b)
    y = [0] * m
    diag = snf.diagonal
    for i in range(n):
        di = diag[i] if i < len(diag) else 0
        if di:
            if c[i] % di:
                return None
            y[i] = c[i] // di
        elif c[i]:
            return None
    x = matvec(snf.V, y)
    r = snf.rank
    kernel = [[snf.V[row][j] for row in range(m)] for j in range(r, m)]
    return IntegerSolution(x, kernel)
