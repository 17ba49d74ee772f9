"""Acceptance criteria 1-10.

Each test draws its instances from fixed seeds, measures every quantity
independently of the certificates (LAPACK norms and singular values from
numpy, numerical radii from the package solver at its stated tolerance) and
records one PASS/FAIL line, printed again in the terminal summary.
"""

import math
import time
import zlib

import numpy as np
import pytest

from bpb import correct
from bpb.harness import brute_force_norm, brute_force_radius, gen_instance
from bpb.isometry import conjugate_transport, transitive_isometry
from bpb.linalg import class_check, numerical_radius, operator_norm, quadratic_value, schatten_norm

RESULTS = []
SLACK = 1e-9
NU_SOLVER_TOL = 2e-3


def opn(A):
    return float(np.linalg.norm(A, 2))


def sp(A, p):
    s = np.linalg.svd(A, compute_uv=False)
    return float(s[0]) if p == math.inf else float(np.sum(s ** p) ** (1.0 / p))


def instances(tag, n, classes, epsilons, dims, mode):
    """(i, cls, dim, eps, T, x0) for n instances per class, reproducibly."""
    rng = np.random.default_rng(zlib.crc32(tag.encode()))
    for cls in classes:
        for i in range(n):
            eps = epsilons[i % len(epsilons)]
            dim = int(rng.integers(dims[0], dims[1] + 1))
            seed = int(rng.integers(2**63))
            T, x0 = gen_instance(cls, dim, eps, mode, seed)
            yield i, cls, dim, eps, T, x0


class Tally:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.total = 0
        self.failures = []
        self.t0 = time.perf_counter()

    def check(self, label, *conds):
        self.total += 1
        bad = [name for name, ok in conds if not ok]
        if bad:
            self.failures.append((label, bad))

    def finish(self):
        dt = time.perf_counter() - self.t0
        status = "PASS" if not self.failures else "FAIL"
        line = (f"criterion {self.number:>2}: {status}  {self.title}  "
                f"[{self.total - len(self.failures)}/{self.total} ok, {dt:.1f}s]")
        if self.failures:
            line += f"  first failure: {self.failures[0]}"
        print(line)
        RESULTS.append(line)
        assert not self.failures, line


NORM_CLASSES = ["positive", "selfadjoint", "normal", "general"]
NORM_EPS = [0.5, 0.2, 0.05]


def test_criterion_01_norm_correctors():
    t = Tally(1, "norm correctors, 500/class, dims 2-30")
    for i, cls, dim, eps, T, x0 in instances("c1", 500, NORM_CLASSES, NORM_EPS, (2, 30), "norm"):
        S, x1, cert = correct(T, x0, eps, "norm", cls)
        att = quadratic_value(S, x1).real if cls == "positive" else np.linalg.norm(S @ x1)
        t.check((cls, i, dim, eps),
                ("attains at x1", abs(att - 1.0) <= 1e-7 and abs(opn(S) - 1.0) <= 1e-7),
                ("||S - T|| < eps", opn(S - T) < eps + SLACK),
                ("||x0 - x1|| < 4 sqrt(eps)", np.linalg.norm(x0 - x1) < 4 * math.sqrt(eps) + SLACK),
                ("class", class_check(S, cls, 1e-8)),
                ("certificate", cert.ok))
    t.finish()


def test_criterion_02_norm_exact_point():
    t = Tally(2, "norm correctors with exact point, ||S - T|| < 3 eps")
    for i, cls, dim, eps, T, x0 in instances("c1", 500, NORM_CLASSES, NORM_EPS, (2, 30), "norm"):
        S, x1, cert = correct(T, x0, eps, "norm", cls, exact=True)
        t.check((cls, i, dim, eps),
                ("attains at x0", abs(np.linalg.norm(S @ x0) - 1.0) <= 1e-7 and abs(opn(S) - 1.0) <= 1e-7),
                ("||S - T|| < 3 eps", opn(S - T) < 3 * eps + SLACK),
                ("class", class_check(S, cls, 1e-8)),
                ("certificate", cert.ok))
    t.finish()


def test_criterion_03_schatten_norm():
    t = Tally(3, "Schatten estimate, 200 instances, p in {1, 2, 4}")
    ps = [1, 2, 4]
    for i, cls, dim, eps, T, x0 in instances("c3", 200, ["general"], NORM_EPS, (2, 12), "norm"):
        p = ps[i % 3]
        M = sp(T, p)
        S, _, cert = correct(T, x0, eps, "norm", "schatten", p=p, M=M)
        d = sp(S - T, p)
        bound = 2 * eps * M + (1 + 2 * eps) * M * 4 * math.sqrt(eps)
        t.check((p, i, dim, eps),
                ("sigma_p bound", d < bound + SLACK),
                ("monotone", sp(S - T, math.inf) <= d + 1e-12 and sp(S - T, 4) <= sp(S - T, 1) + 1e-12),
                ("attains at x0", abs(np.linalg.norm(S @ x0) - 1.0) <= 1e-7),
                ("certificate", cert.ok))
    t.finish()


NU_EPS = [0.3, 0.1, 0.03]


def test_criterion_04_unitary_nu():
    t = Tally(4, "unitary nu, 500 instances")
    for i, cls, dim, eps, T, x0 in instances("c4", 500, ["unitary"], NU_EPS, (2, 30), "nu"):
        S, x1, cert = correct(T, x0, eps, "nu", "unitary")
        n = S.shape[0]
        t.check((i, dim, eps),
                ("x1 = x0", np.array_equal(x1, x0)),
                ("|<S x0, x0>| = 1", abs(abs(quadratic_value(S, x0)) - 1.0) <= 1e-10),
                ("||S - T|| < eps", opn(S - T) < eps + SLACK),
                ("unitary", opn(S.conj().T @ S - np.eye(n)) <= 1e-9),
                ("certificate", cert.ok))
    t.finish()


def test_criterion_05_selfadjoint_nu():
    t = Tally(5, "self-adjoint nu, 500 instances")
    for i, cls, dim, eps, T, x0 in instances("c5", 500, ["selfadjoint"], NU_EPS, (2, 30), "nu"):
        S, x1, cert = correct(T, x0, eps, "nu", "selfadjoint")
        nu = numerical_radius(S)[0]
        chain = cert.extras["|e^(i theta) - 1|"][0]
        t.check((i, dim, eps),
                ("self-adjoint", opn(S - S.conj().T) <= 1e-10),
                ("nu(S) = 1", abs(nu - 1.0) <= NU_SOLVER_TOL),
                ("|<S x1, x1>| = 1", abs(abs(quadratic_value(S, x1)) - 1.0) <= NU_SOLVER_TOL),
                ("||S - T|| < 9 eps", opn(S - T) < 9 * eps + SLACK),
                ("||x1 - x0|| < eps", np.linalg.norm(x1 - x0) < eps + SLACK),
                ("|e^(i theta) - 1| < 4 eps", chain < 4 * eps + SLACK),
                ("certificate", cert.ok))
    t.finish()


def normal_bounds(eps):
    s = math.sqrt(2 * eps)
    q = (2 * eps) ** 0.25
    point = s + q
    op = (s + 2 * q) / (1 - s) + 2 * s
    return point, op


def test_criterion_06_normal_nu():
    t = Tally(6, "normal nu, 300 instances")
    for i, cls, dim, eps, T, x0 in instances("c6", 300, ["normal"], NU_EPS, (2, 30), "nu"):
        S, x1, cert = correct(T, x0, eps, "nu", "normal")
        point, op = normal_bounds(eps)
        t.check((i, dim, eps),
                ("point", np.linalg.norm(x1 - x0) <= point + SLACK),
                ("op", opn(S - T) <= op + SLACK),
                ("normal", opn(S @ S.conj().T - S.conj().T @ S) <= 1e-8),
                ("contraction", opn(S) <= 1 + 1e-9),
                ("nu(S) = 1", abs(numerical_radius(S)[0] - 1.0) <= NU_SOLVER_TOL),
                ("|<S x1, x1>| = 1", abs(abs(quadratic_value(S, x1)) - 1.0) <= NU_SOLVER_TOL),
                ("certificate", cert.ok))
    t.finish()


def test_criterion_07_normal_schatten_nu():
    t = Tally(7, "normal Schatten nu, 100 instances, p in {1, 2}")
    for i, cls, dim, eps, T, x0 in instances("c7", 100, ["normal"], NU_EPS, (2, 20), "nu"):
        p = 1 + i % 2
        M = sp(T, p)
        S, x1, cert = correct(T, x0, eps, "nu", "normal", p=p, M=M)
        s = math.sqrt(2 * eps)
        rot = (s + 2 * (2 * eps) ** 0.25) / (1 - s) + s
        bound = rot * M / (1 - s) + M * s / (1 - s)
        t.check((p, i, dim, eps),
                ("sigma_p bound", sp(S - T, p) <= bound + SLACK),
                ("certificate", cert.ok and cert.schatten_bound is not None))
    t.finish()


def test_criterion_08_nu_transfer():
    t = Tally(8, "nu corrections moved to x0, |<S x0, x0>| = 1")
    setups = [("general", None, (2, 8)), ("positive", None, (2, 20)), ("schatten", 2, (2, 8)),
              ("selfadjoint", None, (2, 20)), ("antisymmetric", None, (2, 20)), ("normal", None, (2, 20))]
    for cls, p, dims in setups:
        for i, _, dim, eps, T, x0 in instances("c8" + cls, 60, [cls], NU_EPS, dims, "nu"):
            S, x1, cert = correct(T, x0, eps, "nu", cls, p=p, exact=True)
            if cls in ("selfadjoint", "antisymmetric"):
                base, point = 9 * eps, eps
            elif cls == "normal":
                point, base = normal_bounds(eps)
            else:
                base, point = eps, eps
            bound = base + 2 * point * 2
            t.check((cls, i, dim, eps),
                    ("|<S x0, x0>| = 1", abs(abs(quadratic_value(S, x0)) - 1.0) <= 1e-6),
                    ("nu(S) = 1", abs(numerical_radius(S)[0] - 1.0) <= 1e-6),
                    ("||S - T|| < composed bound", opn(S - T) < bound + SLACK),
                    ("certificate", cert.ok))
    t.finish()


def test_criterion_09_isometry_microsuite():
    t = Tally(9, "transitive isometry and conjugation, 10^4 triples, dims 2-20")
    rng = np.random.default_rng(9)
    for i in range(10_000):
        n = int(rng.integers(2, 21))
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        x /= np.linalg.norm(x)
        kind = i % 4
        if kind == 0:  # unrelated
            y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        elif kind == 1:  # nearby
            y = x + 10.0 ** rng.uniform(-8, 0) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        elif kind == 2:  # unimodular multiple, including -x
            y = (-1.0 if i % 8 == 2 else np.exp(1j * rng.uniform(0, 2 * np.pi))) * x
        else:  # nearly antipodal
            y = -x + 1e-3 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        y /= np.linalg.norm(y)
        T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        R = transitive_isometry(x, y)
        C = conjugate_transport(T, x, y)
        d = float(np.linalg.norm(x - y))
        nT = opn(T)
        t.check((i, n, kind),
                ("Rx = y", np.linalg.norm(R @ x - y) <= 1e-10),
                ("||R - Id|| = ||x - y||", abs(opn(R - np.eye(n)) - d) <= 1e-8),
                ("||R(T) - T|| bound", opn(C - T) <= 2 * d * nT + 1e-8),
                ("norm invariance", abs(operator_norm(C) - operator_norm(T)) <= 1e-10 * nT),
                ("nu invariance", abs(numerical_radius(C)[0] - numerical_radius(T)[0]) <= NU_SOLVER_TOL))
    t.finish()


def test_criterion_10_foundations():
    t = Tally(10, "norm vs nu, Schatten Hoelder/monotonicity, brute-force oracles")
    rng = np.random.default_rng(10)
    for i in range(1000):
        n = int(rng.integers(2, 11))
        T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        nrm, nu = operator_norm(T), numerical_radius(T)[0]
        t.check(("nu", i, n), ("||T|| <= 2 nu", nrm <= 2 * nu + 1e-6), ("nu <= ||T||", nu <= nrm + 1e-6))
    for i in range(1000):
        n = int(rng.integers(2, 11))
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        B = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        r, s = rng.uniform(2, 8, size=2)  # keeps 1/q = 1/r + 1/s at q >= 1
        q = 1.0 / (1.0 / r + 1.0 / s)
        lo, hi = sorted((r, s))
        holder = schatten_norm(A @ B, q) <= schatten_norm(A, r) * schatten_norm(B, s) + 1e-9
        t.check(("schatten", i, n),
                ("Hoelder", holder),
                ("monotone", schatten_norm(A, hi) <= schatten_norm(A, lo) + 1e-9
                 and schatten_norm(A, math.inf) <= schatten_norm(A, hi) + 1e-9))
    for i in range(200):
        n = 2 + i % 2
        T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        t.check(("oracle", i, n),
                ("norm", abs(brute_force_norm(T) - operator_norm(T)) <= 1e-3),
                ("nu", abs(brute_force_radius(T) - numerical_radius(T)[0]) <= 1e-3))
    t.finish()
