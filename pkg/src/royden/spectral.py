"""Dirichlet pencil, spectra, heat semigroup and the capacity-eigenvalue link.

The quadratic form restricted to interior-supported functions has matrix
A (weighted degrees plus killing on the diagonal, minus the weights);
together with the diagonal mass matrix M = diag(m) it forms the pencil
A v = lambda M v. Everything else here is spectral calculus on that
pencil: the heat semigroup exp(-t M^(-1) A), its trace, and two checks
that tie the spectrum to capacities:

  * a spectral gap lambda0 > 0 with delta = min m > 0 bounds every
    capacity below by delta * lambda0;
  * the sup-norm constant C = (min cap)^(-1/2) bounds the n-th
    eigenvalue below by 1 / (C^2 * m(remaining vertices)) once n
    vertices are struck from the section, and makes the semigroup
    ultracontractive with constant C (2 e t)^(-1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .energy import energy, energy_matrix
from .errors import (
    DimensionCap,
    EmptyInterior,
    InvalidParameter,
    NegativeTime,
)
from .graph import Section, VertexFn, check_bound
from .numerics import DENSE_CAP, SymOperator, dense_eigh
from .potential import sup_norm_constant

DENSE_SHORTCUT = 512  # below this size the dense path beats Lanczos outright


@dataclass(frozen=True)
class Pencil:
    operator: SymOperator
    mass: np.ndarray  # diagonal of M, aligned with interior
    interior: np.ndarray
    section: Section


def assemble_pencil(s: Section) -> Pencil:
    """Interior energy matrix and mass diagonal of the section."""
    inter = s.interior
    if len(inter) == 0:
        raise EmptyInterior("every vertex is masked")
    return Pencil(
        operator=energy_matrix(s, inter),
        mass=s.m[inter].copy(),
        interior=inter,
        section=s,
    )


@dataclass(frozen=True)
class SpectralResult:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns, M-orthonormal, rows follow interior
    interior: np.ndarray
    section: Section
    measure_total: float
    method: str  # "dense" | "lanczos"

    def eigenfunction(self, i: int) -> VertexFn:
        values = np.zeros(self.section.n)
        values[self.interior] = self.eigenvectors[:, i]
        return VertexFn(self.section, values)


def spectrum(s: Section, k: int | None = None) -> SpectralResult:
    """Eigenvalues of the Dirichlet pencil, ascending.

    Full dense solve by default (sizes above the dense cap are refused);
    with k given, large sections fall back to a shift-invert Lanczos run
    for the k smallest pairs.
    """
    pencil = assemble_pencil(s)
    ni = len(pencil.interior)
    total = float(np.sum(pencil.mass))

    if k is not None:
        if not 1 <= k <= ni:
            raise InvalidParameter(f"k must be in 1..{ni}, got {k}")
    dense_wanted = k is None or ni <= DENSE_SHORTCUT or k >= ni - 1
    if dense_wanted:
        if ni <= DENSE_CAP:
            sol = dense_eigh(pencil.operator.dense(), pencil.mass)
            w, V = sol.eigenvalues, sol.eigenvectors
            if k is not None:
                w, V = w[:k], V[:, :k]
            return SpectralResult(
                eigenvalues=w,
                eigenvectors=V,
                interior=pencil.interior,
                section=s,
                measure_total=total,
                method="dense",
            )
        if k is None or k >= ni:
            raise DimensionCap(
                f"dense spectrum of size {ni} above cap {DENSE_CAP}; pass k for a partial solve"
            )
    # Lanczos fallback, deterministic start vector
    v0 = np.ones(ni) / math.sqrt(ni)
    w, V = eigsh(
        pencil.operator.matrix,
        k=k,
        M=sp.diags(pencil.mass).tocsc(),
        sigma=0,
        which="LM",
        v0=v0,
    )
    order = np.argsort(w)
    return SpectralResult(
        eigenvalues=w[order],
        eigenvectors=V[:, order],
        interior=pencil.interior,
        section=s,
        measure_total=total,
        method="lanczos",
    )


# ---------------------------------------------------------------------------
# capacity -> eigenvalue bounds


@dataclass(frozen=True)
class BoundRow:
    n: int
    removed_vertex: int | None
    remaining_mass: float
    bound: float
    eigenvalue: float
    slack: float


@dataclass(frozen=True)
class EigenvalueBoundsReport:
    rows: tuple
    passed: bool
    C: float
    min_cap: float
    enumeration: tuple  # interior vertex indices in removal order


def eigenvalue_bounds_check(
    s: Section, enumeration="measure-decreasing", rel_tol: float = 1e-10, threads: int = 1
) -> EigenvalueBoundsReport:
    """Check 1/(C^2 m(X minus first n vertices)) <= lambda_(n+1) for all n.

    enumeration is either "measure-decreasing" (greedy removal of heavy
    vertices first, the order that sharpens the bound fastest) or an
    explicit permutation of the interior vertices.
    """
    spec = spectrum(s)
    inter = spec.interior
    ni = len(inter)
    order_pos = _resolve_enumeration(s, inter, enumeration)
    masses = s.m[inter][order_pos]
    total = float(np.sum(s.m[inter]))

    const = sup_norm_constant(s, rel_tol=rel_tol, threads=threads)
    C2 = const.C**2

    rows = []
    passed = True
    remaining = total
    for n in range(ni):
        lam = float(spec.eigenvalues[n])
        bound = 1.0 / (C2 * remaining)
        slack = lam - bound
        if slack < -1e-9 * max(1.0, abs(lam)):
            passed = False
        rows.append(
            BoundRow(
                n=n,
                removed_vertex=int(inter[order_pos[n - 1]]) if n > 0 else None,
                remaining_mass=remaining,
                bound=bound,
                eigenvalue=lam,
                slack=slack,
            )
        )
        remaining -= float(masses[n])
    return EigenvalueBoundsReport(
        rows=tuple(rows),
        passed=passed,
        C=const.C,
        min_cap=const.min_cap,
        enumeration=tuple(int(inter[p]) for p in order_pos),
    )


def _resolve_enumeration(s: Section, inter: np.ndarray, enumeration) -> np.ndarray:
    if isinstance(enumeration, str):
        if enumeration != "measure-decreasing":
            raise InvalidParameter(f"unknown enumeration {enumeration!r}")
        return np.argsort(-s.m[inter], kind="stable")
    order = [s.index_of(v) for v in enumeration]
    if sorted(order) != sorted(int(v) for v in inter):
        raise InvalidParameter("enumeration must be a permutation of the interior vertices")
    pos_of = {int(v): i for i, v in enumerate(inter)}
    return np.array([pos_of[v] for v in order], dtype=int)


# ---------------------------------------------------------------------------
# heat semigroup


def _dense_spectrum(s: Section) -> SpectralResult:
    spec = spectrum(s)
    if spec.method != "dense":
        raise DimensionCap("heat calculus needs the dense spectrum")
    return spec


def heat_apply(s: Section, t: float, f: VertexFn) -> VertexFn:
    """exp(-t L) f through the dense eigendecomposition, L = M^(-1) A.

    The semigroup acts on interior values; the result vanishes on the
    mask. t = 0 returns f unchanged.
    """
    check_bound(s, f)
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    if t == 0:
        return VertexFn(s, f.values.copy())
    spec = _dense_spectrum(s)
    inter = spec.interior
    coeff = spec.eigenvectors.T @ (s.m[inter] * f.values[inter])
    out = np.zeros(s.n)
    out[inter] = spec.eigenvectors @ (np.exp(-t * spec.eigenvalues) * coeff)
    return VertexFn(s, out)


def heat_trace(s: Section, t: float) -> float:
    """Sum of exp(-t lambda_i) over the Dirichlet spectrum."""
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    spec = _dense_spectrum(s)
    return float(np.sum(np.exp(-t * spec.eigenvalues)))


@dataclass(frozen=True)
class UltracontractivityReport:
    t: float
    C: float
    prefactor: float  # C * (2 e t)^(-1/2)
    max_ratio: float
    passed: bool
    trials: int
    seed: int


def ultracontractivity_check(
    s: Section, t: float, trials: int = 50, seed: int = 0, rel_tol: float = 1e-10
) -> UltracontractivityReport:
    """Verify ||exp(-t L) f||_inf <= C (2 e t)^(-1/2) ||f||_M on random f.

    C is the sup-norm constant of the section; the prefactor comes from
    sup_lambda lambda exp(-2 t lambda) = 1/(2 e t).
    """
    if t < 0:
        raise NegativeTime(f"t must be >= 0, got {t}")
    if t == 0:
        raise InvalidParameter("the bound degenerates at t = 0; use t > 0")
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    spec = _dense_spectrum(s)
    inter = spec.interior
    mass = s.m[inter]
    const = sup_norm_constant(s, rel_tol=rel_tol)
    prefactor = const.C / math.sqrt(2.0 * math.e * t)
    decay = np.exp(-t * spec.eigenvalues)
    rng = np.random.default_rng(seed)
    max_ratio = 0.0
    for _ in range(trials):
        f = rng.standard_normal(len(inter))
        norm_m = math.sqrt(float(np.dot(mass, f * f)))
        if norm_m == 0.0:
            continue
        coeff = spec.eigenvectors.T @ (mass * f)
        heated = spec.eigenvectors @ (decay * coeff)
        ratio = float(np.max(np.abs(heated))) / (prefactor * norm_m)
        max_ratio = max(max_ratio, ratio)
    return UltracontractivityReport(
        t=t,
        C=const.C,
        prefactor=prefactor,
        max_ratio=max_ratio,
        passed=bool(max_ratio <= 1.0 + 1e-9),
        trials=trials,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# spectral gap criterion


@dataclass(frozen=True)
class SpectralGapReport:
    applicable: bool
    lambda0: float
    delta: float  # min interior mass
    sup_bound_constant: float  # 1/(delta * lambda0), for ||f||_inf^2 <= const * energy
    cap_lower_bound: float  # delta * lambda0
    verified: bool
    max_ratio: float
    trials: int
    seed: int


def spectral_gap_criterion(s: Section, trials: int = 32, seed: int = 0) -> SpectralGapReport:
    """Certify ||f||_inf^2 <= (delta lambda0)^(-1) energy(f) from a gap.

    Needs lambda0 > 0 (automatic with a mask or killing term; an
    unmasked killing-free section has lambda0 = 0 and the criterion does
    not apply) and delta = min interior m > 0. Exports the capacity
    bound cap(x) >= delta * lambda0 for every interior x.
    """
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    pencil = assemble_pencil(s)
    ni = len(pencil.interior)
    if ni <= DENSE_CAP:
        lam0 = float(dense_eigh(pencil.operator.dense(), pencil.mass).eigenvalues[0])
    else:
        from .potential import _lambda0

        lam0 = _lambda0(s)
    delta = float(np.min(pencil.mass))
    scale = float(np.max(s.weighted_degree + s.c, initial=1.0))
    applicable = lam0 > 1e-10 * max(scale, 1.0) and delta > 0
    if not applicable:
        return SpectralGapReport(
            applicable=False,
            lambda0=lam0,
            delta=delta,
            sup_bound_constant=math.inf,
            cap_lower_bound=0.0,
            verified=False,
            max_ratio=math.nan,
            trials=trials,
            seed=seed,
        )
    const = 1.0 / (delta * lam0)
    rng = np.random.default_rng(seed)
    max_ratio = 0.0
    for _ in range(trials):
        vec = np.zeros(s.n)
        vec[pencil.interior] = rng.standard_normal(ni)
        f = VertexFn(s, vec)
        q = energy(s, f).value
        if q == 0.0:
            continue
        ratio = f.sup_norm**2 / (const * q)
        max_ratio = max(max_ratio, ratio)
    return SpectralGapReport(
        applicable=True,
        lambda0=lam0,
        delta=delta,
        sup_bound_constant=const,
        cap_lower_bound=delta * lam0,
        verified=bool(max_ratio <= 1.0 + 1e-9),
        max_ratio=max_ratio,
        trials=trials,
        seed=seed,
    )
