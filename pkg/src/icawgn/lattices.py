"""Classic lattices with exact nearest-point decoders and a seeded Monte Carlo
harness for their error probability over unconstrained AWGN.

Decoders follow the classic constructions (Conway & Sloane): coordinate-wise
rounding for the integer lattice, the even-sum rounding correction for D_n,
the two-coset D_8 decomposition for E_8, and the two rectangular sublattices
of the hexagonal lattice.  By the geometric uniformity of lattices every
Voronoi cell is congruent, so the simulation transmits the zero point only
and still estimates the average error probability exactly.
"""

import dataclasses
import math
import re
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import stats as _stats

from .bounds import delta_star
from .dispersion import DB_PER_NAT

__all__ = [
    "LatticeSpec",
    "SimEstimate",
    "ScaleSearchResult",
    "UnsupportedLatticeError",
    "RESERVED_NAMES",
    "builtin",
    "decode",
    "clopper_pearson",
    "simulate_error_prob",
    "find_scale_for_error",
]

_SQRT3 = math.sqrt(3.0)

# Named in the comparison literature but decoded externally; kept reserved so
# result files cannot silently confuse them with supported constructions.
RESERVED_NAMES = frozenset({"BW16", "Leech24", "S127", "LDLC"})

_CHUNK_SCALARS = 1 << 21  # ~16 MB of noise per chunk


class UnsupportedLatticeError(ValueError):
    """A reserved or non-builtin lattice without an exact decoder."""


@dataclass(frozen=True, eq=False)
class LatticeSpec:
    """A named lattice: row-basis generator, positive scale multiplier.

    The constellation is {scale * (c @ generator) : c integer row vector};
    its NLD is -(1/n) ln|det generator| - ln scale.
    """

    name: str
    dim: int
    generator: np.ndarray = field(repr=False)
    scale: float = 1.0

    def __post_init__(self):
        gen = np.asarray(self.generator, dtype=float)
        object.__setattr__(self, "generator", gen)
        if gen.shape != (self.dim, self.dim):
            raise ValueError(f"generator must be {self.dim}x{self.dim}, got {gen.shape}")
        if abs(np.linalg.det(gen)) <= 0.0:
            raise ValueError("generator must be nonsingular")
        if not (self.scale > 0.0):
            raise ValueError(f"scale must be > 0, got {self.scale}")

    @property
    def log_det(self) -> float:
        return float(np.linalg.slogdet(self.generator)[1])

    @property
    def nld(self) -> float:
        """Normalized log density of the scaled lattice, nats per dimension."""
        return 0.0 - self.log_det / self.dim - math.log(self.scale)


class DecodedPoint(NamedTuple):
    coeffs: np.ndarray
    point: np.ndarray


@dataclass(frozen=True)
class SimEstimate:
    """Monte Carlo error-probability estimate with a two-sided 95%
    Clopper-Pearson interval and full reproducibility metadata."""

    trials: int
    errors: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: object
    streams: int

    @property
    def stderr(self) -> float:
        return math.sqrt(self.p_hat * (1.0 - self.p_hat) / self.trials)

    def to_record(self, spec: LatticeSpec, sigma2: float) -> dict:
        return {
            "lattice": spec.name,
            "n": spec.dim,
            "delta": spec.nld,
            "sigma2": sigma2,
            "trials": self.trials,
            "errors": self.errors,
            "p_hat": self.p_hat,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "seed": self.seed,
            "streams": self.streams,
        }


@dataclass(frozen=True)
class ScaleSearchResult:
    """Outcome of the stochastic scale search: the accepted scale, the NLD and
    dB gap it implies, and the refined estimate at that scale."""

    scale: float
    delta: float
    gap_db: float
    estimate: SimEstimate
    probes: int


_ZN_RE = re.compile(r"^Z(?:n\((\d+)\)|(\d+))$")


def builtin(name: str) -> LatticeSpec:
    """The standard generator for a named lattice.

    Accepts Z1, Zn(k) or Zk, A2 (hexagonal), D4 (checkerboard), E8 (even
    coordinate system).  Reserved comparison lattices raise
    :class:`UnsupportedLatticeError`; unknown names raise ValueError.
    """
    if name in RESERVED_NAMES:
        raise UnsupportedLatticeError(
            f"{name} is name-reserved but has no exact decoder here")
    m = _ZN_RE.match(name)
    if m:
        k = int(m.group(1) or m.group(2))
        if k < 1:
            raise ValueError(f"integer lattice dimension must be >= 1, got {k}")
        return LatticeSpec(name=f"Z{k}", dim=k, generator=np.eye(k))
    if name == "A2":
        return LatticeSpec(name="A2", dim=2,
                           generator=np.array([[1.0, 0.0], [0.5, _SQRT3 / 2.0]]))
    if name == "D4":
        return LatticeSpec(name="D4", dim=4, generator=np.array([
            [-1.0, -1.0, 0.0, 0.0],
            [1.0, -1.0, 0.0, 0.0],
            [0.0, 1.0, -1.0, 0.0],
            [0.0, 0.0, 1.0, -1.0],
        ]))
    if name == "E8":
        half = np.full(8, 0.5)
        gen = np.zeros((8, 8))
        gen[0, 0] = 2.0
        for i in range(1, 7):
            gen[i, i - 1] = -1.0
            gen[i, i] = 1.0
        gen[7] = half
        return LatticeSpec(name="E8", dim=8, generator=gen)
    raise ValueError(f"unknown lattice name {name!r}")


def _family(spec: LatticeSpec) -> str:
    if _ZN_RE.match(spec.name):
        return "zn"
    if spec.name in ("A2", "D4", "E8"):
        return spec.name.lower()
    raise UnsupportedLatticeError(
        f"no exact decoder for lattice {spec.name!r} (builtins only)")


def _round_half_down(x: np.ndarray) -> np.ndarray:
    # Nearest integer; exact halves go to the smaller integer, which is the
    # lexicographically smallest tied coefficient vector for Z^n.
    return np.ceil(x - 0.5)


def _dn_candidates(y: np.ndarray) -> list[np.ndarray]:
    """Even-sum integer vectors that can be nearest to y: the rounded vector
    plus every single-coordinate flip toward the second-nearest integer."""
    f = _round_half_down(y)
    cands = []
    if int(f.sum()) % 2 == 0:
        cands.append(f)
    for k in range(len(y)):
        resid = y[k] - f[k]
        steps = (1.0, -1.0) if resid == 0.0 else ((1.0,) if resid > 0 else (-1.0,))
        for s in steps:
            g = f.copy()
            g[k] += s
            if int(g.sum()) % 2 == 0:
                cands.append(g)
    return cands


def _candidate_points(family: str, y: np.ndarray) -> np.ndarray:
    if family == "zn":
        return _round_half_down(y)[None, :]
    if family == "d4":
        return np.array(_dn_candidates(y))
    if family == "e8":
        ints = _dn_candidates(y)
        halves = [c + 0.5 for c in _dn_candidates(y - 0.5)]
        return np.array(ints + halves)
    if family == "a2":
        out = []
        for di in (0.0, 0.5):
            dj = di * _SQRT3
            for i in (math.floor(y[0] - di), math.ceil(y[0] - di)):
                for j in (math.floor((y[1] - dj) / _SQRT3), math.ceil((y[1] - dj) / _SQRT3)):
                    out.append(np.array([i + di, j * _SQRT3 + dj]))
        return np.array(out)
    raise AssertionError(family)


def decode(spec: LatticeSpec, y) -> DecodedPoint:
    """Exact nearest lattice point to y, with its integer coefficient vector.

    Equidistant candidates are resolved toward the lexicographically
    smallest coefficient vector.
    """
    fam = _family(spec)
    y = np.asarray(y, dtype=float)
    if y.shape != (spec.dim,):
        raise ValueError(f"input must have shape ({spec.dim},), got {y.shape}")
    base = y / spec.scale
    cands = _candidate_points(fam, base)
    d2 = ((cands - base) ** 2).sum(axis=1)
    tied = cands[d2 <= d2.min() + 1e-12]
    ginv = np.linalg.inv(spec.generator)
    coeff_rows = np.rint(tied @ ginv).astype(np.int64)
    best = min(range(len(tied)), key=lambda i: tuple(coeff_rows[i]))
    coeffs = coeff_rows[best]
    point = (coeffs @ spec.generator) * spec.scale
    return DecodedPoint(coeffs=coeffs, point=point)


# ---------------------------------------------------------------------------
# Vectorized error counting (zero point transmitted; ties have probability 0)

def _dn_nearest_batch(y: np.ndarray) -> np.ndarray:
    f = np.rint(y)
    odd = (f.sum(axis=1).astype(np.int64) & 1).astype(bool)
    if np.any(odd):
        g = f[odd]
        d = y[odd] - g
        k = np.argmax(np.abs(d), axis=1)
        rows = np.arange(g.shape[0])
        g[rows, k] += np.where(d[rows, k] >= 0.0, 1.0, -1.0)
        f[odd] = g
    return f


def _count_errors(family: str, z: np.ndarray) -> int:
    if family == "zn":
        return int(np.count_nonzero(np.any(np.rint(z) != 0.0, axis=1)))
    if family == "d4":
        f = _dn_nearest_batch(z)
        return int(np.count_nonzero(np.any(f != 0.0, axis=1)))
    if family == "e8":
        a = _dn_nearest_batch(z)
        b = _dn_nearest_batch(z - 0.5) + 0.5
        da = ((z - a) ** 2).sum(axis=1)
        db = ((z - b) ** 2).sum(axis=1)
        # Only the integer coset contains the zero point.
        correct = (da <= db) & np.all(a == 0.0, axis=1)
        return int(np.count_nonzero(~correct))
    if family == "a2":
        i0 = np.rint(z[:, 0])
        j0 = np.rint(z[:, 1] / _SQRT3)
        d0 = (z[:, 0] - i0) ** 2 + (z[:, 1] - j0 * _SQRT3) ** 2
        i1 = np.rint(z[:, 0] - 0.5) + 0.5
        j1 = np.rint((z[:, 1] - _SQRT3 / 2.0) / _SQRT3) * _SQRT3 + _SQRT3 / 2.0
        d1 = (z[:, 0] - i1) ** 2 + (z[:, 1] - j1) ** 2
        correct = (d0 <= d1) & (i0 == 0.0) & (j0 == 0.0)
        return int(np.count_nonzero(~correct))
    raise AssertionError(family)


def clopper_pearson(errors: int, trials: int, confidence: float = 0.95):
    """Two-sided exact binomial (Clopper-Pearson) confidence interval."""
    if trials < 1 or not (0 <= errors <= trials):
        raise ValueError(f"invalid counts: {errors}/{trials}")
    alpha = 1.0 - confidence
    lo = 0.0 if errors == 0 else float(_stats.beta.ppf(alpha / 2.0, errors, trials - errors + 1))
    hi = 1.0 if errors == trials else float(_stats.beta.ppf(1.0 - alpha / 2.0, errors + 1, trials - errors))
    return lo, hi


def simulate_error_prob(spec: LatticeSpec, sigma2: float, trials: int, seed,
                        streams: int = 1) -> SimEstimate:
    """Estimate the lattice error probability over AWGN with variance sigma2.

    Draws Z ~ N(0, sigma2 I) and counts decodes away from the transmitted
    zero point.  Work splits across ``streams`` independent substreams
    spawned deterministically from ``seed``; identical (seed, streams)
    reproduce the error count exactly regardless of chunking.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if streams < 1:
        raise ValueError(f"streams must be >= 1, got {streams}")
    if not (sigma2 > 0.0):
        raise ValueError(f"noise variance must be > 0, got {sigma2}")
    fam = _family(spec)
    sigma = math.sqrt(sigma2)
    children = np.random.SeedSequence(seed).spawn(streams)
    per = trials // streams
    extra = trials % streams
    chunk_rows = max(1, _CHUNK_SCALARS // spec.dim)
    errors = 0
    for i, child in enumerate(children):
        todo = per + (1 if i < extra else 0)
        rng = np.random.default_rng(child)
        while todo > 0:
            m = min(chunk_rows, todo)
            z = rng.standard_normal((m, spec.dim)) * (sigma / spec.scale)
            errors += _count_errors(fam, z)
            todo -= m
    lo, hi = clopper_pearson(errors, trials)
    return SimEstimate(trials=trials, errors=errors, p_hat=errors / trials,
                       ci_low=lo, ci_high=hi, seed=seed, streams=streams)


def find_scale_for_error(spec: LatticeSpec, eps: float, sigma2: float,
                         trials_per_probe: int, seed, streams: int = 1,
                         max_probes: int = 60) -> ScaleSearchResult:
    """Stochastic bisection for the scale at which the lattice hits error
    probability eps over noise variance sigma2.

    A probe is accepted when its Clopper-Pearson interval contains eps;
    the accepted scale is then re-estimated once with 4x the probe trials.
    The error probability is strictly decreasing in the scale, so geometric
    bisection on the probe means converges.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    if trials_per_probe < 1:
        raise ValueError(f"trials_per_probe must be >= 1, got {trials_per_probe}")
    probes = 0

    def probe(s: float, trials: int) -> SimEstimate:
        nonlocal probes
        probes += 1
        return simulate_error_prob(dataclasses.replace(spec, scale=s), sigma2,
                                   trials, seed=[seed, probes], streams=streams)

    def finish(s: float) -> ScaleSearchResult:
        scaled = dataclasses.replace(spec, scale=s)
        est = probe(s, 4 * trials_per_probe)
        return ScaleSearchResult(scale=s, delta=scaled.nld,
                                 gap_db=DB_PER_NAT * (delta_star(sigma2) - scaled.nld),
                                 estimate=est, probes=probes)

    # Start at the capacity-matched scale (NLD = delta*), where errors are
    # plentiful, and expand geometrically to bracket the target.
    s_lo = math.exp(-spec.log_det / spec.dim - delta_star(sigma2))
    e_lo = probe(s_lo, trials_per_probe)
    while e_lo.p_hat <= eps and probes < max_probes:
        if e_lo.ci_low <= eps <= e_lo.ci_high:
            return finish(s_lo)
        s_lo /= 2.0
        e_lo = probe(s_lo, trials_per_probe)
    s_hi = 2.0 * s_lo
    e_hi = probe(s_hi, trials_per_probe)
    while e_hi.p_hat >= eps and probes < max_probes:
        if e_hi.ci_low <= eps <= e_hi.ci_high:
            return finish(s_hi)
        s_hi *= 2.0
        e_hi = probe(s_hi, trials_per_probe)
    while probes < max_probes:
        s_mid = math.sqrt(s_lo * s_hi)
        est = probe(s_mid, trials_per_probe)
        if est.ci_low <= eps <= est.ci_high:
            return finish(s_mid)
        if est.p_hat > eps:
            s_lo = s_mid
        else:
            s_hi = s_mid
    raise ArithmeticError(
        f"scale search did not converge after {probes} probes "
        f"(bracket [{s_lo:.6g}, {s_hi:.6g}]); raise trials_per_probe")
