"""Seeded generators for every hypothesis class.

Randomness comes from a counter-based SplitMix64 stream implemented on
``numpy.uint64`` arrays, so one call produces the draws of many trials at
once while each trial's numbers depend only on its own seed.  Normal
variates use Box-Muller on 53-bit uniforms.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .blockops import BlockMatrix, ppt_test
from .errors import UsageError

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

CLASSES = ("psd", "ppt", "sector", "density", "hermitian", "general")
ALPHA_CAP = 1.45
MAX_DIM = 64
PPT_FACTORS = 3
REJECTION_TRIES = 2000
WELL_CONDITIONED_SHIFT = 0.1

_U = np.uint64


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 output function on a ``uint64`` array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> _U(30))) * _U(MIX1)
    z = (z ^ (z >> _U(27))) * _U(MIX2)
    return z ^ (z >> _U(31))


def derive_trial_seed(master_seed, trial_index):
    """Per-trial seed: ``mix64(master ^ (GOLDEN * index))``.

    Injective in the index for a fixed master seed (both steps are
    bijections on 64-bit words).  Accepts scalars or integer arrays.
    """
    idx = np.asarray(trial_index, dtype=np.uint64)
    master = np.asarray(int(master_seed) & MASK64, dtype=np.uint64)
    out = mix64(np.atleast_1d(master ^ (idx * _U(GOLDEN))))
    return int(out[0]) if np.ndim(trial_index) == 0 else out.reshape(np.shape(trial_index))


class Stream:
    """SplitMix64 streams for a vector of seeds, advanced in lockstep.

    Word ``c`` of the stream for seed ``s`` is ``mix64(s + (c + 1) * GOLDEN)``,
    exactly the sequence of the reference SplitMix64 generator seeded with ``s``.
    """

    def __init__(self, seeds):
        self.seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
        self.pos = 0

    def words(self, count: int) -> np.ndarray:
        ctr = np.arange(self.pos + 1, self.pos + count + 1, dtype=np.uint64)
        self.pos += count
        return mix64(self.seeds[:, None] + ctr[None, :] * _U(GOLDEN))

    def uniforms(self, count: int) -> np.ndarray:
        """Uniforms on ``[0, 1)`` with 53 random bits."""
        return (self.words(count) >> _U(11)).astype(np.float64) * 2.0 ** -53

    def complex_normals(self, shape: tuple[int, ...]) -> np.ndarray:
        """Standard complex normals (``E|z|^2 = 1``), shape ``(T, *shape)``."""
        size = int(np.prod(shape))
        u = self.uniforms(2 * size).reshape(-1, size, 2)
        radius = np.sqrt(-2.0 * np.log1p(-u[..., 0]))
        angle = 2.0 * math.pi * u[..., 1]
        z = (radius * np.cos(angle) + 1j * radius * np.sin(angle)) / math.sqrt(2.0)
        return z.reshape((-1,) + tuple(shape))


@dataclass(frozen=True)
class GenSpec:
    cls: str
    n: int
    k: int
    alpha: float = 0.0
    seed: int = 0
    scale: float = 1.0
    well_conditioned: bool = False
    ppt_rejection: bool = False

    def __post_init__(self):
        if self.cls not in CLASSES:
            raise UsageError(f"unknown class {self.cls!r}; expected one of {', '.join(CLASSES)}")
        for name in ("n", "k"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise UsageError(f"{name} must be a positive integer, got {v!r}")
        if self.n * self.k > MAX_DIM:
            raise UsageError(f"n*k = {self.n * self.k} exceeds {MAX_DIM}")
        if not (isinstance(self.alpha, (int, float)) and 0.0 <= self.alpha <= ALPHA_CAP):
            raise UsageError(f"alpha must lie in [0, {ALPHA_CAP}], got {self.alpha!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) \
                or not 0 <= self.seed <= MASK64:
            raise UsageError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not (isinstance(self.scale, (int, float)) and math.isfinite(self.scale)
                and self.scale > 0):
            raise UsageError(f"scale must be a positive real, got {self.scale!r}")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "seed", int(self.seed))

    def replace(self, **changes) -> "GenSpec":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "class": self.cls, "n": self.n, "k": self.k, "alpha": self.alpha,
            "seed": self.seed, "scale": self.scale,
            "well_conditioned": self.well_conditioned, "ppt_rejection": self.ppt_rejection,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenSpec":
        d = dict(d)
        known = {"class", "n", "k", "alpha", "seed", "scale", "well_conditioned", "ppt_rejection"}
        extra = set(d) - known
        if extra:
            raise UsageError(f"unknown GenSpec fields: {sorted(extra)}")
        if "class" not in d:
            raise UsageError("GenSpec requires a 'class' field")
        return cls(cls=d.pop("class"), **d)


def _gram(stream: Stream, dim: int) -> np.ndarray:
    g = stream.complex_normals((dim, dim))
    return linalg.dagger(g) @ g


def _sector(stream: Stream, dim: int, alpha: float) -> np.ndarray:
    eye = linalg.identity(dim)
    r = _gram(stream, dim) / dim + WELL_CONDITIONED_SHIFT * eye
    if alpha == 0.0:
        return r
    r_half = linalg.sqrtm_psd(r)
    k = stream.complex_normals((dim, dim))
    s = linalg.hermitian_part(k)
    radius = np.max(np.abs(np.linalg.eigvalsh(s)), axis=-1)
    s = s / radius[:, None, None]
    return r_half @ (eye + 1j * math.tan(alpha) * s) @ r_half


def _ppt_separable(stream: Stream, n: int, k: int) -> np.ndarray:
    out = 0
    for _ in range(PPT_FACTORS):
        b = _gram(stream, n)
        c = _gram(stream, k)
        out = out + linalg.kron(b, c)
    return out


def _ppt_rejection(stream: Stream, n: int, k: int) -> np.ndarray:
    """Draw Gram matrices per seed until one has positive partial transpose."""
    out = []
    for seed in stream.seeds:
        sub = Stream([seed])
        for _ in range(REJECTION_TRIES):
            cand = _gram(sub, n * k)[0]
            if ppt_test(BlockMatrix(n, k, cand)).ppt:
                out.append(cand)
                break
        else:
            raise UsageError(f"no PPT draw within {REJECTION_TRIES} tries (n={n}, k={k})")
    return np.stack(out)


def sample(spec: GenSpec, seeds) -> np.ndarray:
    """Draws of ``spec``'s class for each seed, shape ``(len(seeds), nk, nk)``.

    ``spec.seed`` is ignored; each row depends only on its own seed.
    """
    stream = Stream(seeds)
    n, k, dim = spec.n, spec.k, spec.n * spec.k
    if spec.cls in ("psd", "density"):
        mat = _gram(stream, dim)
        if spec.well_conditioned:
            mat = mat + WELL_CONDITIONED_SHIFT * linalg.identity(dim)
        if spec.cls == "density":
            return mat / linalg.trace(mat).real[:, None, None]
    elif spec.cls == "ppt":
        mat = _ppt_rejection(stream, n, k) if spec.ppt_rejection else _ppt_separable(stream, n, k)
    elif spec.cls == "sector":
        mat = _sector(stream, dim, spec.alpha)
    elif spec.cls == "hermitian":
        mat = linalg.hermitian_part(stream.complex_normals((dim, dim)))
    else:
        mat = stream.complex_normals((dim, dim))
    return mat * spec.scale


def generate(spec: GenSpec) -> BlockMatrix:
    """One draw, seeded directly by ``spec.seed``."""
    return BlockMatrix(spec.n, spec.k, sample(spec, [spec.seed])[0])


def generate_trials(spec: GenSpec, indices) -> BlockMatrix:
    """Stacked draws for trial ``indices`` under master seed ``spec.seed``."""
    seeds = derive_trial_seed(spec.seed, np.asarray(indices, dtype=np.uint64))
    return BlockMatrix(spec.n, spec.k, sample(spec, np.atleast_1d(seeds)))
