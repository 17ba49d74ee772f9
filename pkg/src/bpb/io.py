"""Matrix JSON: ``{"dim": n, "entries": [[[re, im], ...], ...]}`` row-major,
vectors ``{"dim": n, "entries": [[re, im], ...]}``.

Floats are written with ``repr`` precision, so a write/read cycle is
bit-exact.
"""

import json
import math

import numpy as np

from .errors import InvalidMatrix


def _pair(z):
    re, im = float(z.real), float(z.imag)
    if not (math.isfinite(re) and math.isfinite(im)):
        raise InvalidMatrix("non-finite entry")
    return [re, im]


def _complex(pair):
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise InvalidMatrix(f"entry must be a [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def matrix_to_json(T):
    T = np.asarray(T, dtype=np.complex128)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {T.shape}")
    return {"dim": int(T.shape[0]), "entries": [[_pair(z) for z in row] for row in T]}


def vector_to_json(x):
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1:
        raise InvalidMatrix(f"expected a vector, got shape {x.shape}")
    return {"dim": int(x.shape[0]), "entries": [_pair(z) for z in x]}


def matrix_from_json(d):
    try:
        n = int(d["dim"])
        rows = d["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMatrix(f"not a matrix object: {exc}") from None
    if len(rows) != n or any(len(r) != n for r in rows):
        raise InvalidMatrix(f"entries do not form a {n}x{n} array")
    return np.array([[_complex(z) for z in r] for r in rows], dtype=np.complex128).reshape(n, n)


def vector_from_json(d):
    try:
        n = int(d["dim"])
        entries = d["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidMatrix(f"not a vector object: {exc}") from None
    if len(entries) != n:
        raise InvalidMatrix(f"expected {n} entries, got {len(entries)}")
    return np.array([_complex(z) for z in entries], dtype=np.complex128)


def spectral_to_json(E):
    return {
        "dim": E.dim,
        "grouping_tol": E.grouping_tol,
        "points": [{"eigenvalue": _pair(complex(lam)), "projection": matrix_to_json(P)}
                   for lam, P in E.points],
    }


def dump(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, allow_nan=False)
        fh.write("\n")


def load(path):
    with open(path) as fh:
        return json.load(fh)


def read_matrix(path):
    return matrix_from_json(load(path))


def read_vector(path):
    return vector_from_json(load(path))


def write_matrix(T, path):
    dump(matrix_to_json(T), path)


def write_vector(x, path):
    dump(vector_to_json(x), path)
