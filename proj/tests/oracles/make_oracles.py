"""Independent dense reference values frozen into the C++ tests.

Run: python3 tests/oracles/make_oracles.py
Everything here is assembled from scratch with numpy (dense matrices, SVD
null spaces, least-squares pseudo-inverses) and mpmath quadrature; nothing is
shared with the C++ library.
"""
import numpy as np
import mpmath as mp

np.set_printoptions(precision=17)
TAU = 2 * np.pi


def harmonic_means():
    mp.mp.dps = 30
    coeffs = {
        "1+0.5*sin(2*pi*y1)": lambda y: 1 + 0.5 * mp.sin(2 * mp.pi * y),
        "2+cos(2*pi*y1)": lambda y: 2 + mp.cos(2 * mp.pi * y),
        "exp(0.5*sin(2*pi*y1))": lambda y: mp.exp(0.5 * mp.sin(2 * mp.pi * y)),
    }
    for name, a in coeffs.items():
        val = 1 / mp.quad(lambda y: 1 / a(y), [0, 0.25, 0.5, 0.75, 1])
        print(f"harmonic mean {name}: {mp.nstr(val, 17)}")


def torus_operator(a11, a12, a22, N):
    h = 1.0 / N
    M = N * N
    L = np.zeros((M, M))
    idx = lambda i, j: (i % N) * N + (j % N)
    for i in range(N):
        for j in range(N):
            p = idx(i, j)
            for (aa, di, dj) in ((a11, 1, 0), (a22, 0, 1)):
                c = aa[i, j] / h**2
                L[p, p] += 2 * c
                L[p, idx(i + di, j + dj)] -= c
                L[p, idx(i - di, j - dj)] -= c
            c = a12[i, j] / (2 * h**2)
            for si in (1, -1):
                for sj in (1, -1):
                    L[p, idx(i + si, j + sj)] -= c * si * sj
    return L


def dx(f, axis, N):
    return (np.roll(f, -1, axis) - np.roll(f, 1, axis)) * N / 2


def expression_case(N=16):
    y1, y2 = np.meshgrid(np.arange(N) / N, np.arange(N) / N, indexing="ij")
    a11 = 1.5 + 0.5 * np.sin(TAU * y2)
    a22 = 1.5 + 0.5 * np.sin(TAU * y1)
    a12 = 0.2 * np.sin(TAU * (y1 + y2))
    L = torus_operator(a11, a12, a22, N)
    _, _, vt = np.linalg.svd(L.T)
    r = vt[-1]
    r = r / (r.sum() / N**2)
    r = r.reshape(N, N)
    A = {(0, 0): a11, (0, 1): a12, (1, 0): a12, (1, 1): a22}
    pinv = np.linalg.pinv(L)
    abar = np.zeros((2, 2))
    v = {}
    for k in range(2):
        for l in range(2):
            abar[k, l] = (A[k, l] * r).mean()
            sol = pinv @ (A[k, l] - abar[k, l]).ravel()
            sol -= sol.mean()
            v[k, l] = sol.reshape(N, N)
    c = np.zeros((2, 2, 2))
    for k in range(2):
        for l in range(2):
            for j in range(2):
                c[k, l, j] = sum((A[i, j] * r * dx(v[k, l], i, N)).mean() for i in range(2))
    print("expression N=16: r[0,0] =", repr(r[0, 0]), " r[3,5] =", repr(r[3, 5]))
    print("abar =", repr(abar))
    print("c111 =", repr(c[0, 0, 0]), " c122 =", repr(c[0, 1, 1]), " c221 =", repr(c[1, 1, 0]))
    print("v11[2,7] =", repr(v[0, 0][2, 7]), " v12[5,1] =", repr(v[0, 1][5, 1]))


def box_dense(coef, f, g, K):
    """coef(i, j) -> (a11, a12, a22) at box node; f, g functions of (x1, x2)."""
    h = 1.0 / K
    n = K + 1
    U = np.zeros((n, n))
    inner = [(i, j) for i in range(1, K) for j in range(1, K)]
    num = {p: q for q, p in enumerate(inner)}
    M = np.zeros((len(inner), len(inner)))
    b = np.zeros(len(inner))
    for i in range(n):
        for j in range(n):
            if i in (0, K) or j in (0, K):
                U[i, j] = g(i * h, j * h)
    for (i, j), row in num.items():
        a11, a12, a22 = coef(i, j)
        b[row] = f(i * h, j * h)
        terms = [((i, j), 2 * a11 / h**2 + 2 * a22 / h**2),
                 ((i + 1, j), -a11 / h**2), ((i - 1, j), -a11 / h**2),
                 ((i, j + 1), -a22 / h**2), ((i, j - 1), -a22 / h**2)]
        for si in (1, -1):
            for sj in (1, -1):
                terms.append(((i + si, j + sj), -a12 * si * sj / (2 * h**2)))
        for q, w in terms:
            if q in num:
                M[row, num[q]] += w
            else:
                b[row] -= w * U[q]
    x = np.linalg.solve(M, b)
    for (i, j), row in num.items():
        U[i, j] = x[row]
    return U


def dirichlet_cases():
    K = 16
    U = box_dense(lambda i, j: (1.0, 0.0, 1.0), lambda x, y: 1.0, lambda x, y: 0.0, K)
    print("z (A=I, h=1, 16 cells): center =", repr(U[8, 8]), " (4,8) =", repr(U[4, 8]))
    # oscillatory: torus coefficient of the expression case, cells_per_period 8, 1/eps = 2
    cpp = 8

    def coef(i, j):
        y1, y2 = (i % cpp) / cpp, (j % cpp) / cpp
        return (1.5 + 0.5 * np.sin(TAU * y2), 0.2 * np.sin(TAU * (y1 + y2)), 1.5 + 0.5 * np.sin(TAU * y1))

    U = box_dense(coef, lambda x, y: 1.0 + x, lambda x, y: x * y, 2 * cpp)
    print("oscillatory (1/eps=2, 8 cells/period, f=1+x1, g=x1 x2): center =", repr(U[8, 8]), " (3,11) =", repr(U[3, 11]))


if __name__ == "__main__":
    harmonic_means()
    expression_case()
    dirichlet_cases()
