"""Instance generation, brute-force oracles and experiment sweeps."""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import asdict, dataclass, field
import io
import json
import math
import os
import time
import zlib

import numpy as np
from scipy import optimize, special
from scipy.stats import qmc

from . import kernels
from .correct import MODES, correct
from .errors import BPBError, DimTooLarge, InvalidEpsilon
from .linalg import (
    OperatorClass,
    adjoint,
    normalize,
    numerical_radius,
    operator_norm,
    quadratic_value,
    svd,
)
from .nu import default_eta

CSV_COLUMNS = ("mode", "class", "dim", "epsilon", "trials", "pass", "fail",
               "max_residual", "max_bound_ratio", "ms")
MARGIN = 0.9  # x0 uses at most 90% of the allowed attainment gap


# --- instances ------------------------------------------------------------

def make_rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def trial_seed(seed, cell, trial):
    """Per-trial substream, independent of execution order."""
    key = zlib.crc32(repr(cell).encode())
    return np.random.SeedSequence([int(seed) & (2 ** 64 - 1), key, int(trial)])


def _gaussian(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)


def _haar_unitary(rng, n):
    Q, R = np.linalg.qr(_gaussian(rng, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_matrix(cls, dim, rng):
    """Unnormalised random member of ``cls``."""
    cls = OperatorClass.parse(cls)
    A = _gaussian(rng, dim)
    if cls is OperatorClass.UNITARY:
        return _haar_unitary(rng, dim)
    if cls is OperatorClass.SELF_ADJOINT:
        return 0.5 * (A + adjoint(A))
    if cls is OperatorClass.ANTI_SYMMETRIC:
        return 0.5j * (A + adjoint(A))
    if cls is OperatorClass.POSITIVE:
        return adjoint(A) @ A
    if cls is OperatorClass.NORMAL:
        U = _haar_unitary(rng, dim)
        lam = (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) / math.sqrt(2.0)
        return (U * lam) @ adjoint(U)
    return A


def attainment_threshold(mode, cls, eps, eta=None):
    cls = OperatorClass.parse(cls)
    if mode == "norm":
        return 1.0 - eps * eps / 4.0
    if cls is OperatorClass.UNITARY:
        return 1.0 - eps * eps / 2.0
    if cls is OperatorClass.NORMAL:
        return 1.0 - eps
    return 1.0 - min(eps, (eta or default_eta)(eps))


def attainment_value(T, x, mode):
    if mode == "norm":
        return float(np.linalg.norm(T @ x))
    return float(abs(quadratic_value(T, x)))


def gen_instance(cls, dim, epsilon, mode, seed, eta=None):
    """Random ``(T, x0)`` of class ``cls`` normalised for ``mode`` with x0
    almost attaining: ``x0 = normalize(x* + delta v)`` for an exact witness
    x* and the largest ``delta`` (found by bisection) keeping the attainment
    gap within 90% of what the corrector allows."""
    cls = OperatorClass.parse(cls)
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not 0.0 < epsilon < 1.0:
        raise InvalidEpsilon(f"epsilon must lie in (0, 1), got {epsilon!r}")
    rng = make_rng(seed)
    T = random_matrix(cls, dim, rng)
    if mode == "norm":
        T = T / operator_norm(T)
        x_star = svd(T)[2][:, 0]
    else:
        nu, x_star = numerical_radius(T)
        T = T / nu
    if cls in (OperatorClass.SELF_ADJOINT, OperatorClass.POSITIVE):
        T = 0.5 * (T + adjoint(T))
    elif cls is OperatorClass.ANTI_SYMMETRIC:
        T = 0.5 * (T - adjoint(T))
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v = v / np.linalg.norm(v)
    budget = MARGIN * (1.0 - attainment_threshold(mode, cls, epsilon, eta))
    gap = lambda d: 1.0 - attainment_value(T, normalize(x_star + d * v), mode)
    lo, hi = 0.0, 4.0
    if gap(hi) <= budget:
        lo = hi
    else:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if gap(mid) <= budget:
                lo = mid
            else:
                hi = mid
    return T, normalize(x_star + lo * v)


# --- brute-force oracles ----------------------------------------------------

def _sphere_points(dim, density):
    if dim == 1:
        return np.ones((1, 1), dtype=np.complex128)
    if dim == 2:
        psi = np.linspace(0.0, 0.5 * math.pi, density)
        phi = np.linspace(0.0, 2.0 * math.pi, density, endpoint=False)
        P, F = np.meshgrid(psi, phi, indexing="ij")
        return np.stack([np.cos(P).ravel() + 0j, (np.exp(1j * F) * np.sin(P)).ravel()], axis=1)
    count = density * density
    sob = qmc.Sobol(2 * dim, scramble=True, seed=0)
    u = sob.random_base2(max(1, math.ceil(math.log2(count))))[:count]
    g = special.ndtri(u)
    z = g[:, :dim] + 1j * g[:, dim:]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _brute_force(T, density, mode):
    T = np.asarray(T, dtype=np.complex128)
    n = T.shape[0]
    if n > 3:
        raise DimTooLarge(f"brute-force oracles are limited to dim <= 3, got {n}")
    X = _sphere_points(n, density)
    kmode = 0 if mode == "nu" else 1
    best, idx = kernels.points_max(T, X, kmode)
    x = X[idx]

    def neg(u):
        z = u[:n] + 1j * u[n:]
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return 0.0
        return -attainment_value(T, z / nz, mode)

    u0 = np.concatenate([x.real, x.imag])
    res = optimize.minimize(neg, u0, method="BFGS", options={"gtol": 1e-12})
    return float(max(best, -res.fun))


def brute_force_norm(T, grid_density=1000):
    """max ||Tx|| over a deterministic sphere grid plus local refinement."""
    return _brute_force(T, grid_density, "norm")


def brute_force_radius(T, grid_density=1000):
    """max |<Tx, x>| over a deterministic sphere grid plus local refinement."""
    return _brute_force(T, grid_density, "nu")


# --- experiments ------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    classes: tuple
    dims: tuple
    epsilons: tuple
    trials_per_cell: int
    seed: int = 0
    mode: str = "norm"
    exact_point: bool = False
    schatten_p: float | None = None
    record_timing: bool = True
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(OperatorClass.parse(c) for c in self.classes))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if self.trials_per_cell < 1:
            raise ValueError("trials_per_cell must be >= 1")
        if any(d < 2 for d in self.dims):
            raise ValueError("dims must be >= 2")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        for e in self.epsilons:
            if not 0.0 < e < 1.0:
                raise InvalidEpsilon(f"epsilon {e!r} outside (0, 1)")
            if self.mode == "nu" and OperatorClass.NORMAL in self.classes and not e < 0.5:
                raise InvalidEpsilon(f"normal nu cells need epsilon < 1/2, got {e!r}")

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "class" in d and "classes" not in d:
            d["classes"] = [d.pop("class")]
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self):
        d = asdict(self)
        d["classes"] = [c.value for c in self.classes]
        d["dims"], d["epsilons"] = list(self.dims), list(self.epsilons)
        return d


@dataclass
class CellResult:
    mode: str
    cls: str
    dim: int
    epsilon: float
    trials: int
    passed: int
    failed: int
    max_residual: float
    max_bound_ratio: float
    ms: float
    theoretical_bound: float = 0.0
    max_distance: float = 0.0
    reasons: dict = field(default_factory=dict)

    def csv_row(self):
        return [self.mode, self.cls, self.dim, repr(self.epsilon), self.trials, self.passed,
                self.failed, repr(self.max_residual), repr(self.max_bound_ratio), repr(self.ms)]


@dataclass
class Report:
    config: dict
    rows: list = field(default_factory=list)

    @property
    def passed(self):
        return sum(r.passed for r in self.rows)

    @property
    def failed(self):
        return sum(r.failed for r in self.rows)

    @property
    def ok(self):
        return self.failed == 0

    def to_dict(self):
        return {"config": self.config, "rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, d):
        return cls(dict(d["config"]), [CellResult(**r) for r in d["rows"]])


def _bound_ratio(cert):
    ratios = [cert.bound_ratio]
    if cert.schatten_bound:
        ratios.append(cert.schatten_distance / cert.schatten_bound)
    return max(ratios)


def run_cell(cfg, cls, dim, eps):
    cell = (cfg.mode, cls.value, dim, eps)
    t0 = time.perf_counter()
    passed = failed = 0
    max_res = max_ratio = max_dist = 0.0
    bound = 0.0
    reasons = {}
    for trial in range(cfg.trials_per_cell):
        seed = trial_seed(cfg.seed, cell, trial)
        try:
            T, x0 = gen_instance(cls, dim, eps, cfg.mode, seed)
            _, _, cert = correct(T, x0, eps, cfg.mode, cls, p=cfg.schatten_p, exact=cfg.exact_point)
        except BPBError as exc:
            failed += 1
            reasons[exc.code] = reasons.get(exc.code, 0) + 1
            continue
        bad = cert.failures()
        max_res = max(max_res, cert.attainment_residual)
        max_ratio = max(max_ratio, _bound_ratio(cert))
        max_dist = max(max_dist, cert.op_distance)
        bound = max(bound, cert.theoretical_bound)
        if bad:
            failed += 1
            for name in bad:
                key = f"certificate:{name}"
                reasons[key] = reasons.get(key, 0) + 1
        else:
            passed += 1
    ms = (time.perf_counter() - t0) * 1e3 if cfg.record_timing else 0.0
    return CellResult(cfg.mode, cls.value, dim, eps, cfg.trials_per_cell, passed, failed,
                      max_res, max_ratio, ms, bound, max_dist, dict(sorted(reasons.items())))


def _run_cell_args(args):
    return run_cell(*args)


def run_experiment(cfg):
    """Run every (class, dim, epsilon) cell; rows come out in config order
    and do not depend on ``cfg.workers``."""
    cells = [(cfg, c, d, e) for c in cfg.classes for d in cfg.dims for e in cfg.epsilons]
    if cfg.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_run_cell_args, cells))
    else:
        rows = [run_cell(*c) for c in cells]
    return Report(cfg.to_dict(), rows)


def load_config(path):
    with open(path) as fh:
        d = json.load(fh)
    if "BPB_SEED" in os.environ:
        d["seed"] = int(os.environ["BPB_SEED"])
    return ExperimentConfig.from_dict(d)


def report_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in report.rows:
        w.writerow(r.csv_row())
    return buf.getvalue()


def emit_report(report, path, fmt=None):
    if fmt is None:
        fmt = "json" if str(path).endswith(".json") else "csv"
    if fmt == "csv":
        text = report_csv(report)
    elif fmt == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    else:
        raise ValueError(f"format must be json or csv, got {fmt!r}")
    with open(path, "w") as fh:
        fh.write(text)
    return path


def parse_report(text):
    return Report.from_dict(json.loads(text))


def plotdata(report):
    """(epsilon, theoretical_bound, observed_max_distance) per class, with
    the maxima taken over dimensions."""
    acc = {}
    for r in report.rows:
        key = (r.cls, r.epsilon)
        bound, dist = acc.get(key, (0.0, 0.0))
        acc[key] = (max(bound, r.theoretical_bound), max(dist, r.max_distance))
    out = {}
    for (cls, eps), (bound, dist) in sorted(acc.items()):
        out.setdefault(cls, []).append([eps, bound, dist])
    return out


def emit_plotdata(report, path):
    with open(path, "w") as fh:
        json.dump(plotdata(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
