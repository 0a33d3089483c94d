"""Seeded random instance generators used by batch runs and the test suite.

Distributions are fixed so reported pass rates reproduce per seed: matrix
entries are i.i.d. standard complex normal (real and imaginary parts
N(0, 1/2)), hermitian instances are symmetrized as (G + G*)/2, and normal
instances are Haar conjugations of random complex diagonals.
"""

from __future__ import annotations

import numpy as np

from .spectra import generator, haar_unitary

__all__ = [
    "random_hermitian",
    "random_matrix",
    "random_normal",
    "random_scalar",
]


def random_matrix(n: int, seed: int | np.random.Generator) -> np.ndarray:
    rng = generator(seed)
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)


def random_scalar(seed: int | np.random.Generator) -> complex:
    rng = generator(seed)
    return complex(rng.standard_normal(), rng.standard_normal()) / np.sqrt(2.0)


def random_hermitian(n: int, seed: int | np.random.Generator) -> np.ndarray:
    g = random_matrix(n, generator(seed))
    return (g + g.conj().T) / 2.0


def random_normal(n: int, seed: int | np.random.Generator) -> np.ndarray:
    """Random normal matrix: U diag(lambda) U* with Haar U, CN(0,1) lambda."""
    rng = generator(seed)
    lam = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    u = haar_unitary(n, rng)
    return u @ np.diag(lam) @ u.conj().T
