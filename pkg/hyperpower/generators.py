# hyperpower/generators.py
"""
Seeded test matrices.

All randomness comes from ``numpy.random.Generator(PCG64(seed))`` and is drawn
in a fixed order, so the same (kind, n, seed, parameters) always produce a
bit-identical matrix.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from django.conf import settings

from . import dense
from .dense import Matrix

logger = logging.getLogger(__name__)

SEED_MAX = 2 ** 64 - 1


class GeneratorKind(str, Enum):
    SPD = "spd"
    DIAG_DOMINANT = "diag-dominant"
    HILBERT = "hilbert"
    TWO_EIG = "two-eig"
    RANDOM_COMPLEX = "random-complex"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class GeneratorSpec:
    kind: GeneratorKind
    n: int
    seed: int = 0
    eig_a: float = 2.0
    eig_b: float = 5.0
    allow_degenerate: bool = False
    complex_: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", GeneratorKind(self.kind))
        if self.n < 1:
            raise ValueError("n must be at least 1, got %r" % (self.n,))
        if not 0 <= self.seed <= SEED_MAX:
            raise ValueError("seed must be an unsigned 64-bit integer, got %r" % (self.seed,))
        if self.kind is GeneratorKind.TWO_EIG:
            if self.n < 2:
                raise ValueError("two-eig needs n >= 2, got %d" % self.n)
            if not (math.isfinite(self.eig_a) and math.isfinite(self.eig_b)):
                raise ValueError("two-eig eigenvalues must be finite")
            if self.eig_a == self.eig_b and not self.allow_degenerate:
                raise ValueError("two-eig with a == b (%g) is a multiple of the identity; "
                                 "pass allow_degenerate to build it anyway" % self.eig_a)


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _symmetrize(m):
    return 0.5 * (m + m.T)


def _spd(n, rng):
    b = rng.uniform(-1.0, 1.0, size=(n, n))
    return _symmetrize(b.T @ b + n * np.eye(n))


def _diag_dominant(n, rng):
    m = rng.uniform(-1.0, 1.0, size=(n, n))
    off = np.sum(np.abs(m), axis=1) - np.abs(np.diag(m))
    m[np.diag_indices(n)] = off + 1.0
    return m


def _hilbert(n):
    warn_n = getattr(settings, "HYPERPOWER_HILBERT_WARN_N", 12)
    if n > warn_n:
        logger.warning("Hilbert matrix of order %d is numerically singular beyond n=%d", n, warn_n)
    idx = np.arange(1, n + 1, dtype=np.float64)
    return 1.0 / (idx[:, None] + idx[None, :] - 1.0)


def _two_eig(n, rng, a, b):
    q, _ = np.linalg.qr(rng.uniform(-1.0, 1.0, size=(n, n)))
    half = n // 2
    lams = np.concatenate([np.full(half, a), np.full(n - half, b)])
    return _symmetrize((q * lams) @ q.T)


def _random_complex(n, rng):
    re = rng.uniform(-1.0, 1.0, size=(n, n))
    im = rng.uniform(-1.0, 1.0, size=(n, n))
    return re + 1j * im + n * np.eye(n)


def _symmetric(n, rng):
    b = rng.uniform(-1.0, 1.0, size=(n, n))
    return _symmetrize(b) + n * np.eye(n)


def generate_matrix(spec: GeneratorSpec) -> Matrix:
    kind, n = spec.kind, spec.n
    rng = _rng(spec.seed)
    if kind is GeneratorKind.SPD:
        m = _spd(n, rng)
    elif kind is GeneratorKind.DIAG_DOMINANT:
        m = _diag_dominant(n, rng)
    elif kind is GeneratorKind.HILBERT:
        m = _hilbert(n)
    elif kind is GeneratorKind.TWO_EIG:
        m = _two_eig(n, rng, spec.eig_a, spec.eig_b)
    elif kind is GeneratorKind.RANDOM_COMPLEX:
        m = _random_complex(n, rng)
    else:
        m = _symmetric(n, rng)
    logger.debug("Generated %s n=%d seed=%d", kind.value, n, spec.seed)
    return dense.as_matrix(m, complex_=spec.complex_)
