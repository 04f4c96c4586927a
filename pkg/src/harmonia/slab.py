"""Harmonic functions on slabs G x Z for a finite graph G.

Two consecutive slices determine a harmonic function on G x Z: with L the
Laplacian of G, the slice above ``b`` (with ``a`` below it) is
``(L + 2I) b - a``. Stacking the pair gives the transfer matrix
``A = [[L+2I, -I], [I, 0]]`` whose inverse is ``[[0, I], [-I, L+2I]]``.

Slice dynamics, Jordan identities, covering and every labeling here are exact
integer computations. Eigenvalues of A are floating point and certified by
residuals.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .graph import FiniteGraph, laplacian, slab_neighbors
from .labeling import DuplicateLabel, PartialLabeling, check_harmonic, full_interior

Slice = tuple  # tuple[int, ...], one value per vertex of G

EIG_TOL = 1e-9


class EigensolveFailed(RuntimeError):
    pass


class NotInjective(ValueError):
    def __init__(self, collision: DuplicateLabel):
        self.collision = collision
        super().__init__(str(collision))


def _matmul(M: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(m * x for m, x in zip(row, v) if m) for row in M]


@dataclass(frozen=True)
class TransferMatrix:
    graph: FiniteGraph
    shifted: tuple[tuple[int, ...], ...]  # L + 2I
    matrix: tuple[tuple[int, ...], ...]
    inverse: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.graph.n

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    def apply(self, u: Sequence[int], power: int = 1) -> list[int]:
        """``A**power @ u`` exactly (negative powers use the integer inverse)."""
        M = self.matrix if power >= 0 else self.inverse
        u = list(u)
        for _ in range(abs(power)):
            u = _matmul(M, u)
        return u


def transfer(g: FiniteGraph) -> TransferMatrix:
    n = g.n
    L = laplacian(g)
    S = [[L[i][j] + (2 if i == j else 0) for j in range(n)] for i in range(n)]
    eye = [[int(i == j) for j in range(n)] for i in range(n)]
    zero = [[0] * n for _ in range(n)]
    neg = [[-x for x in row] for row in eye]
    A = [S[i] + neg[i] for i in range(n)] + [eye[i] + zero[i] for i in range(n)]
    Ainv = [zero[i] + eye[i] for i in range(n)] + [neg[i] + S[i] for i in range(n)]
    t = TransferMatrix(g, tuple(map(tuple, S)), tuple(map(tuple, A)), tuple(map(tuple, Ainv)))
    prod = [[sum(A[i][k] * Ainv[k][j] for k in range(2 * n)) for j in range(2 * n)] for i in range(2 * n)]
    assert prod == [[int(i == j) for j in range(2 * n)] for i in range(2 * n)]
    return t


def next_slice(t: TransferMatrix, upper: Sequence[int], lower: Sequence[int]) -> Slice:
    return tuple(s - a for s, a in zip(_matmul(t.shifted, upper), lower))


def step_slices(t: TransferMatrix, b: Sequence[int], a: Sequence[int], k: int) -> list[Slice]:
    """Slices ``u_0, u_1, ..., u_k`` (or ``u_0, u_-1, ..., u_k`` for k < 0).

    ``a`` is slice 0 and ``b`` is slice 1 of the unique harmonic extension.
    """
    if len(a) != t.n or len(b) != t.n:
        raise ValueError(f"slices must have length {t.n}")
    a, b = tuple(a), tuple(b)
    out = [a]
    if k > 0:
        out.append(b)
        lo, hi = a, b
        for _ in range(k - 1):
            lo, hi = hi, next_slice(t, hi, lo)
            out.append(hi)
    elif k < 0:
        # going down: u_{j-1} = (L+2I) u_j - u_{j+1}
        hi, lo = b, a
        for _ in range(-k):
            hi, lo = lo, next_slice(t, lo, hi)
            out.append(lo)
    return out


def slice_window(t: TransferMatrix, b: Sequence[int], a: Sequence[int], lo: int, hi: int) -> dict[int, Slice]:
    """Slices with indices in ``[lo, hi]`` (lo <= 0 < 1 <= hi)."""
    up = step_slices(t, b, a, hi) if hi >= 1 else [tuple(a)]
    down = step_slices(t, b, a, lo) if lo < 0 else [tuple(a)]
    out = {j: s for j, s in enumerate(up)}
    out.update({-j: s for j, s in enumerate(down)})
    return {j: out[j] for j in range(lo, hi + 1)}


# ---------------------------------------------------------------------------
# Spectrum of A
# ---------------------------------------------------------------------------


def lambda_pair(mu: float) -> tuple[float, float]:
    """Roots of ``lambda + 1/lambda - 2 = mu``, larger first."""
    s = mu + 2.0
    root = math.sqrt(max(s * s - 4.0, 0.0))
    big = (s + root) / 2.0
    return big, 1.0 / big


@dataclass
class SpectralPair:
    mu: float
    lam: float
    lam_inv: float
    residual: float  # max residual of the two A-eigenvectors


@dataclass
class JordanBlock:
    component: list[int]
    eigenvector: list[int]  # (v; v)
    extended: list[int]  # (v; 0)
    identity_holds: bool  # A (v;0) == (v;0) + (v;v), exactly


@dataclass
class SpectralReport:
    mu: list[float]
    mu_residuals: list[float]
    pairs: list[SpectralPair]
    jordan: list[JordanBlock]
    eigenvalues: list[float]  # the 2n eigenvalues of A from the pairing, sorted
    numeric_eigenvalues: list[complex]  # direct eigensolve of A, sorted
    contributions: dict | None = None

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "mu_residuals": self.mu_residuals,
            "pairs": [vars(p) for p in self.pairs],
            "jordan": [vars(j) for j in self.jordan],
            "eigenvalues": self.eigenvalues,
            "numeric_eigenvalues": [[z.real, z.imag] for z in self.numeric_eigenvalues],
            "contributions": self.contributions,
        }


def laplacian_spectrum(g: FiniteGraph) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Eigenpairs of L from a symmetric eigensolve, certified by residuals."""
    if g.n == 0:
        return np.zeros(0), np.zeros((0, 0)), []
    L = np.array(laplacian(g), dtype=float)
    mu, vecs = np.linalg.eigh(L)
    res = [float(np.linalg.norm(L @ vecs[:, i] - mu[i] * vecs[:, i])) for i in range(g.n)]
    if max(res) >= EIG_TOL:
        raise EigensolveFailed(f"Laplacian residual {max(res):.3e} exceeds {EIG_TOL}")
    return mu, vecs, res


def _jordan_blocks(t: TransferMatrix) -> list[JordanBlock]:
    n = t.n
    blocks = []
    for comp in t.graph.components():
        v = [int(i in comp) for i in range(n)]
        eig = v + v
        ext = v + [0] * n
        lhs = t.apply(ext)
        holds = lhs == [e + x for e, x in zip(ext, eig)] and t.apply(eig) == eig
        blocks.append(JordanBlock(comp, eig, ext, holds))
    return blocks


def _basis(t: TransferMatrix, mu: np.ndarray, vecs: np.ndarray, jordan: list[JordanBlock]):
    """Columns of the Jordan basis of A with their eigenvalues (1 for the Jordan pairs)."""
    cols, lams = [], []
    for i, m in enumerate(mu):
        if m <= 1e-8:
            continue
        a = vecs[:, i]
        for lam in lambda_pair(float(m)):
            cols.append(np.concatenate([lam * a, a]))
            lams.append(lam)
    for block in jordan:
        cols += [np.array(block.eigenvector, float), np.array(block.extended, float)]
        lams += [1.0, 1.0]
    return np.array(cols).T, lams


def spectral_pairing(g: FiniteGraph, seed: Sequence[int] | None = None) -> SpectralReport:
    """Eigenvalues of A via the Laplacian spectrum, with residual certification.

    Each eigenvalue ``mu > 0`` of L yields the pair ``lambda, 1/lambda`` with
    eigenvectors ``(lambda a; a)`` and ``(a/lambda; a)``; ``mu = 0`` yields one
    2x2 Jordan block at 1 per connected component. ``seed`` (two stacked
    slices, upper first) adds its dominant-eigenvalue contributions.
    """
    t = transfer(g)
    mu, vecs, res = laplacian_spectrum(g)
    A = t.as_array()
    pairs = []
    for i, m in enumerate(mu):
        if m <= 1e-8:
            continue
        a = vecs[:, i]
        r = 0.0
        lam, lam_inv = lambda_pair(float(m))
        for x in (lam, lam_inv):
            w = np.concatenate([x * a, a])
            r = max(r, float(np.linalg.norm(A @ w - x * w) / np.linalg.norm(w)))
        if r >= EIG_TOL:
            raise EigensolveFailed(f"transfer-matrix residual {r:.3e} for mu={m}")
        pairs.append(SpectralPair(float(m), lam, lam_inv, r))
    jordan = _jordan_blocks(t)
    eigenvalues = sorted([p.lam for p in pairs] + [p.lam_inv for p in pairs] + [1.0] * (2 * len(jordan)))
    numeric = sorted(np.linalg.eigvals(A).tolist(), key=lambda z: (z.real, z.imag)) if g.n else []
    report = SpectralReport(
        [float(m) for m in mu], res, pairs, jordan, eigenvalues, [complex(z) for z in numeric]
    )
    if seed is not None:
        report.contributions = contributions(t, seed, mu, vecs, jordan)
    return report


def contributions(t: TransferMatrix, u: Sequence[int], mu=None, vecs=None, jordan=None) -> dict:
    """Per-coordinate contributions of the extreme eigenvalues to ``u``.

    Decomposes ``u`` in the Jordan basis and, for the largest eigenvalue > 1
    and the smallest eigenvalue < 1 with a nonzero coefficient, sums the
    contributions of all basis vectors sharing that eigenvalue coordinate by
    coordinate.
    """
    if mu is None:
        mu, vecs, _ = laplacian_spectrum(t.graph)
        jordan = _jordan_blocks(t)
    B, lams = _basis(t, mu, vecs, jordan)
    coef = np.linalg.solve(B, np.array(u, dtype=float))
    scale = max(1.0, float(np.max(np.abs(u))))

    def group(select):
        live = [i for i, lam in enumerate(lams) if select(lam) and abs(coef[i]) > 1e-9 * scale]
        if not live:
            return None, None
        target = max(lams[i] for i in live) if select(2.0) else min(lams[i] for i in live)
        same = [i for i in live if abs(lams[i] - target) < 1e-9]
        contrib = sum(coef[i] * B[:, i] for i in same)
        return target, [float(x) for x in contrib]

    lam_top, top = group(lambda lam: lam > 1 + 1e-9)
    lam_bottom, bottom = group(lambda lam: lam < 1 - 1e-9)
    return {
        "coefficients": [float(c) for c in coef],
        "basis_eigenvalues": [float(x) for x in lams],
        "dominant_eigenvalue": lam_top,
        "dominant_contribution": top,
        "decaying_eigenvalue": lam_bottom,
        "decaying_contribution": bottom,
    }


def is_eigenvector(t: TransferMatrix, w: Sequence[float], lam: float, tol: float = 1e-8) -> bool:
    w = np.asarray(w, dtype=float)
    norm = np.linalg.norm(w)
    if norm == 0:
        return False
    return float(np.linalg.norm(t.as_array() @ w - lam * w) / norm) < tol


def reversal_check(t: TransferMatrix, x: Sequence[float], y: Sequence[float], lam: float, tol: float = 1e-8) -> bool:
    """Whether swapping the two slices of a lambda-eigenvector gives a 1/lambda-eigenvector."""
    if not is_eigenvector(t, list(x) + list(y), lam, tol):
        raise ValueError(f"(x; y) is not an eigenvector of A for lambda={lam}")
    return is_eigenvector(t, list(y) + list(x), 1.0 / lam, tol)


# ---------------------------------------------------------------------------
# Density
# ---------------------------------------------------------------------------


@dataclass
class DensityEstimate:
    window: int  # K: slices -K..K were sampled
    bound: int  # M = max |value| seen
    count: int  # distinct values in [-M, M]
    ratio: float  # count / (2M + 1)
    trend: list[tuple[int, float]] = field(default_factory=list)  # (K', ratio at K')

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "bound": str(self.bound),
            "count": self.count,
            "ratio": self.ratio,
            "trend": [list(x) for x in self.trend],
        }


def _density(values: set[int]) -> tuple[int, int, float]:
    M = max((abs(v) for v in values), default=0)
    # math on big ints: ratio via Fraction to stay finite for huge M
    return M, len(values), float(Fraction(len(values), 2 * M + 1))


def line_values(t: TransferMatrix, b: Sequence[int], a: Sequence[int], j: int, K: int) -> dict[int, int]:
    """Values along line ``j`` on slices ``-K..K``."""
    return {k: s[j] for k, s in slice_window(t, b, a, -K, K).items()}


def line_density(t: TransferMatrix, b: Sequence[int], a: Sequence[int], j: int, K: int) -> DensityEstimate:
    if K < 1:
        raise ValueError("window must be >= 1")
    vals = line_values(t, b, a, j, K)
    trend = []
    k = 1
    while True:
        k = min(k, K)
        _, _, r = _density({v for i, v in vals.items() if -k <= i <= k})
        trend.append((k, r))
        if k == K:
            break
        k *= 2
    M, count, ratio = _density(set(vals.values()))
    return DensityEstimate(K, M, count, ratio, trend)


# ---------------------------------------------------------------------------
# Arithmetic progressions covering Z
# ---------------------------------------------------------------------------


class ArithmeticProgression(NamedTuple):
    offset: int
    stride: int

    def __contains__(self, k: object) -> bool:
        return (k - self.offset) % self.stride == 0  # type: ignore[operator]


@dataclass
class CoverResult:
    covers: bool
    lcm: int
    witness: int | None  # an integer in [1, D] missed by every progression
    density: Fraction  # exact density of the union
    density_bound: Fraction | None  # 1 - 1/D when not covering

    def to_dict(self) -> dict:
        return {
            "covers": self.covers,
            "lcm": self.lcm,
            "witness": self.witness,
            "density": str(self.density),
            "density_bound": None if self.density_bound is None else str(self.density_bound),
        }


def ap_cover(aps: Sequence[ArithmeticProgression]) -> CoverResult:
    """Decide whether the progressions cover Z by sieving one period of length lcm."""
    aps = [ArithmeticProgression(int(a), int(d)) for a, d in aps]
    if any(d == 0 for _, d in aps):
        raise ValueError("strides must be nonzero")
    if not aps:
        return CoverResult(False, 1, 1, Fraction(0), Fraction(0))
    D = math.lcm(*(abs(d) for _, d in aps))
    hit = np.zeros(D, dtype=bool)  # hit[r] <=> residue r mod D is covered
    for a, d in aps:
        hit[a % abs(d) :: abs(d)] = True
    covered = int(hit.sum())
    density = Fraction(covered, D)
    if covered == D:
        return CoverResult(True, D, None, density, None)
    # residue 0 stands for k = D in 1..D
    witness = min(int(r) or D for r in np.flatnonzero(~hit))
    return CoverResult(False, D, witness, density, 1 - Fraction(1, D))


# ---------------------------------------------------------------------------
# Verdict for G x Z
# ---------------------------------------------------------------------------


@dataclass
class Verdict:
    exists: bool
    reason: str
    labeling: PartialLabeling | None = None
    window: int = 0


def edgeless_slab_labeling(d: int, window: int) -> PartialLabeling:
    """``phi(a, z) = a + d*z`` on ``d`` disjoint copies of Z, for |z| <= window."""
    lab = PartialLabeling()
    for z in range(-window, window + 1):
        for a in range(d):
            lab.insert((a, z), a + d * z)
    return lab


def verdict(g: FiniteGraph, window: int = 5) -> Verdict:
    if g.edges:
        return Verdict(
            False,
            f"G has {len(g.edges)} edge(s): a slab over a finite graph with an edge "
            "admits no harmonic labeling",
        )
    if g.n == 0:
        return Verdict(False, "G has no vertices; the slab is empty")
    lab = edgeless_slab_labeling(g.n, window)
    nbrs = slab_neighbors(g)
    bad = check_harmonic(lab, full_interior(lab, nbrs), nbrs)
    assert not bad and lab.is_consistent()
    return Verdict(True, f"G is edgeless: phi(a, z) = a + {g.n}*z", lab, window)


# ---------------------------------------------------------------------------
# The ladder Z x K2
# ---------------------------------------------------------------------------


class LadderStep(NamedTuple):
    k: int
    a: int
    b: int
    running_max: int
    side: str  # where the running max sits: "a" or "b"


def normalize_ladder_seed(a0: int, a1: int, b0: int, b1: int) -> tuple[tuple[int, int, int, int], bool, bool]:
    """Reflect and/or swap lines so the seed maximum sits at ``a1``.

    Returns ``((a0, a1, b0, b1), reversed, swapped)``.
    """
    vals = {"a0": a0, "a1": a1, "b0": b0, "b1": b1}
    top = max(vals, key=vals.get)
    rev = top.endswith("0")
    swap = top.startswith("b")
    if rev:
        a0, a1, b0, b1 = a1, a0, b1, b0
    if swap:
        a0, a1, b0, b1 = b0, b1, a0, a1
    return (a0, a1, b0, b1), rev, swap


def ladder_growth_demo(seed: Sequence[int], steps: int = 50) -> list[LadderStep]:
    """Iterate the ladder from a seed ``(a0, a1, b0, b1)`` of distinct values.

    After normalization the running maximum grows by at least 3 per slice;
    a smaller increment raises AssertionError naming the slice.
    """
    a0, a1, b0, b1 = seed
    if len({a0, a1, b0, b1}) != 4:
        raise ValueError("seed values must be pairwise distinct")
    (a0, a1, b0, b1), _, _ = normalize_ladder_seed(a0, a1, b0, b1)
    a, b = [a0, a1], [b0, b1]
    trace = [LadderStep(0, a0, b0, max(a0, b0), "a" if a0 > b0 else "b")]
    run = max(a0, a1, b0, b1)
    trace.append(LadderStep(1, a1, b1, run, "a"))
    for k in range(2, steps + 1):
        a.append(3 * a[-1] - b[-1] - a[-2])
        b.append(3 * b[-1] - a[-2] - b[-2])
        top = max(a[-1], b[-1])
        if top < run + 3:
            raise AssertionError(f"slice {k}: max {top} < previous running max {run} + 3")
        run = top
        trace.append(LadderStep(k, a[-1], b[-1], run, "a" if a[-1] > b[-1] else "b"))
    return trace


def ladder_basis(K: int) -> tuple[dict[int, int], dict[int, int]]:
    """Integer solutions of ``s[k+1] = 4 s[k] - s[k-1]`` on ``-K..K``:
    ``t`` with t0=2, t1=4 (even) and ``u`` with u0=0, u1=1 (odd)."""
    def run(s0, s1):
        s = {0: s0, 1: s1}
        for k in range(1, K):
            s[k + 1] = 4 * s[k] - s[k - 1]
        for k in range(0, -K, -1):
            s[k - 1] = 4 * s[k] - s[k + 1]
        return {k: s[k] for k in range(-K, K + 1)}

    return run(2, 4), run(0, 1)


def ladder_function(params: Sequence[int], K: int) -> dict[tuple[int, int], int]:
    """``a(k) = alpha u_k + beta t_k + c + d k`` on line 0 and
    ``b(k) = -alpha u_k - beta t_k + c + d k`` on line 1."""
    alpha, beta, c, d = params
    t, u = ladder_basis(K + 1)
    out = {}
    for k in range(-K, K + 1):
        wave = alpha * u[k] + beta * t[k]
        out[(0, k)] = wave + c + d * k
        out[(1, k)] = -wave + c + d * k
    return out


LADDER = FiniteGraph.complete(2)


def ladder_injective(params: Sequence[int], K: int) -> PartialLabeling:
    """Harmonic function on the ladder window ``|k| <= K``; raises NotInjective on a collision."""
    if K < 1:
        raise ValueError("window must be >= 1")
    values = ladder_function(params, K)
    lab = PartialLabeling()
    try:
        for v, x in values.items():
            lab.insert(v, x)
    except DuplicateLabel as exc:
        raise NotInjective(exc) from None
    nbrs = slab_neighbors(LADDER)
    # slab vertices are (line, slice); values are stored the same way
    bad = check_harmonic(lab, full_interior(lab, nbrs), nbrs)
    assert not bad, bad[:3]
    return lab


def _rank(x: int) -> int:
    # position of x in 0, 1, -1, 2, -2, ...
    return 2 * x - 1 if x > 0 else -2 * x


def scan_ladder_params(K: int = 30, span: int = 2) -> tuple[int, int, int, int]:
    """First parameters whose values on the window ``|k| <= K`` are all distinct.

    Candidates are ordered by max |entry|, then sum |entry|, then entrywise in
    the order 0, 1, -1, 2, -2. Distinctness is decided by a plain set count.
    """
    rng = range(-span, span + 1)
    order = sorted(
        itertools.product(rng, repeat=4),
        key=lambda p: (max(map(abs, p)), sum(map(abs, p)), tuple(map(_rank, p))),
    )
    for params in order:
        vals = list(ladder_function(params, K).values())
        if len(set(vals)) == len(vals):
            return params
    raise ValueError("no injective parameters in range")


DEFAULT_LADDER_PARAMS = (0, 1, 0, 1)  # first hit of scan_ladder_params(30, 2)


def trace_csv(rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "a_k", "b_k"])
    for k, a, b, *_ in rows:
        w.writerow([k, str(a), str(b)])
    return buf.getvalue()
