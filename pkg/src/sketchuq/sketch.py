"""Sketching schemes and realised sketch draws.

Sampling draws (UNIF, LEV) are stored as a list of row indices and applied by
gathering rows; Gaussian draws are stored as a dense r x n matrix. Sampled
rows are never rescaled: the sketched solution is invariant to a global
scale of S, and the unweighted samplers are what the diagnostic experiment
uses.

Row indices are 0-based.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, InvalidInput, InvalidSketchDim
from .seeding import Seed, make_rng


class SchemeKind(str, enum.Enum):
    UNIF = "unif"
    LEV = "lev"
    NORM = "norm"
    # S = I_n; a degenerate scheme used to check that excess terms vanish
    IDENTITY = "identity"

    @property
    def is_sampling(self) -> bool:
        return self in (SchemeKind.UNIF, SchemeKind.LEV, SchemeKind.IDENTITY)


@dataclass(frozen=True)
class SketchScheme:
    kind: SchemeKind
    r: int

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if int(self.r) < 1:
            raise InvalidSketchDim(f"sketch dimension must be >= 1, got {self.r}")
        object.__setattr__(self, "r", int(self.r))

    @classmethod
    def parse(cls, kind: str, r: int) -> "SketchScheme":
        try:
            return cls(SchemeKind(kind.lower()), r)
        except ValueError as exc:
            if isinstance(exc, InvalidSketchDim):
                raise
            choices = ", ".join(k.value for k in SchemeKind)
            raise InvalidInput(f"unknown scheme {kind!r}; choose one of {choices}") from None


@dataclass(frozen=True, eq=False)
class SketchDraw:
    """One realised sketching operator S in R^{r x n}.

    Exactly one of ``rows`` and ``matrix`` is set.
    """

    scheme: SketchScheme | None
    seed: Seed | None
    n: int
    rows: np.ndarray | None = None
    matrix: np.ndarray | None = None

    @property
    def r(self) -> int:
        return self.rows.size if self.rows is not None else self.matrix.shape[0]

    @classmethod
    def selector(cls, rows, n: int) -> "SketchDraw":
        rows = np.asarray(rows, dtype=np.intp).reshape(-1)
        if rows.size == 0 or rows.min() < 0 or rows.max() >= n:
            raise InvalidInput(f"row indices must lie in [0, {n})")
        return cls(None, None, n, rows=rows)

    @classmethod
    def dense(cls, S) -> "SketchDraw":
        S = linalg.as_matrix(S, "S")
        return cls(None, None, S.shape[1], matrix=S)

    @classmethod
    def identity(cls, n: int) -> "SketchDraw":
        return cls(SketchScheme(SchemeKind.IDENTITY, n), None, n, rows=np.arange(n))

    def materialize(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        S = np.zeros((self.rows.size, self.n))
        S[np.arange(self.rows.size), self.rows] = 1.0
        return S

    def apply(self, M):
        return apply_sketch(self, M)

    def gram(self) -> np.ndarray:
        """S S^T, shape (r, r)."""
        if self.rows is not None:
            return (self.rows[:, None] == self.rows[None, :]).astype(np.float64)
        return self.matrix @ self.matrix.T

    def scatter(self, A: np.ndarray) -> np.ndarray:
        """A S for A of shape (k, r), returned as (k, n)."""
        if self.matrix is not None:
            return A @ self.matrix
        out = np.zeros((A.shape[0], self.n))
        np.add.at(out.T, self.rows, A.T)
        return out

    def rmatvec(self, v: np.ndarray) -> np.ndarray:
        """S^T v."""
        if self.matrix is not None:
            return self.matrix.T @ v
        out = np.zeros(self.n)
        np.add.at(out, self.rows, v)
        return out


def draw_sketch(scheme: SketchScheme, data, seed: Seed) -> SketchDraw:
    """Realise ``scheme`` against the design in ``data``.

    UNIF draws r indices uniformly with replacement, LEV draws them with
    probability l_i / p where l are the leverage scores, NORM fills an r x n
    matrix with standard normals.
    """
    n = data.n
    if scheme.r > n:
        raise InvalidSketchDim(f"sketch dimension r={scheme.r} exceeds n={n}")
    kind = scheme.kind
    if kind is SchemeKind.IDENTITY:
        if scheme.r != n:
            raise InvalidSketchDim(f"identity scheme needs r = n = {n}, got {scheme.r}")
        return SketchDraw(scheme, seed, n, rows=np.arange(n))
    rng = make_rng(seed)
    if kind is SchemeKind.UNIF:
        rows = rng.integers(0, n, size=scheme.r)
        return SketchDraw(scheme, seed, n, rows=rows.astype(np.intp))
    if kind is SchemeKind.LEV:
        probs = sampling_probabilities(data)
        rows = rng.choice(n, size=scheme.r, replace=True, p=probs)
        return SketchDraw(scheme, seed, n, rows=rows.astype(np.intp))
    S = rng.standard_normal((scheme.r, n))
    return SketchDraw(scheme, seed, n, matrix=S)


def sampling_probabilities(data) -> np.ndarray:
    """Leverage-score sampling distribution l_i / p."""
    lev = data.leverage
    return lev / lev.sum()


def apply_sketch(draw: SketchDraw, M):
    """S M for a matrix or vector M whose leading dimension is n."""
    M = np.asarray(M, dtype=np.float64)
    if M.shape[0] != draw.n:
        raise DimensionMismatch(f"sketch expects leading dimension {draw.n}, got {M.shape[0]}")
    if draw.rows is not None:
        return M[draw.rows]
    return draw.matrix @ M
