"""Classical-distribution generation complexity.

A classical bipartite state is a probability matrix P. The number of
seed qubits needed to generate it is ceil(log2) of the psd-rank of P,
the smallest r admitting r x r Hermitian psd families {C_x}, {D_y} with
tr(C_x D_y) = P(x, y). Exact psd-rank is intractable in general, so this
module provides a certified lower bound, a multi-start local solver that
searches for witnesses, a synthesis step that turns a witness into an
explicit generating purification, and the reverse Gram extraction that
reads a witness back off any purification. Nonnegative-rank heuristics
cover the randomized (classical-seed) complexity for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import FactorizationMismatch, InvalidInput, NotNormalized, NotPsd
from .linalg import (
    RegisterState,
    absorbed_schmidt_vectors,
    hermitize,
    matrix_rank,
    psd_sqrt,
    require_hermitian,
)

#: Entries of a distribution below this are clamped to exact zeros.
ZERO_CLAMP = 1e-14


@dataclass(frozen=True)
class DistMatrix:
    """Probability matrix: n x m, entries >= 0, summing to 1 within 1e-10."""

    n: int
    m: int
    p: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=float)
        if arr.shape != (self.n, self.m) or self.n < 1 or self.m < 1:
            raise InvalidInput(f"distribution shape {arr.shape} does not match "
                               f"{self.n} x {self.m}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInput("distribution contains non-finite entries")
        if arr.min() < 0.0:
            raise InvalidInput("distribution contains negative entries")
        total = float(arr.sum())
        if abs(total - 1.0) > 1e-10:
            raise NotNormalized(f"distribution sums to {total!r}, not 1")
        object.__setattr__(self, "p", arr)


def validate_dist(p, renormalize: bool = False) -> DistMatrix:
    """Validate a raw matrix as a probability distribution.

    Entries below ZERO_CLAMP (including roundoff negatives down to -1e-12)
    are clamped to zero. A total deviating from 1 by more than 1e-8 raises
    NotNormalized unless ``renormalize`` is set; the accepted matrix is
    always rescaled to sum exactly to 1.
    """
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInput("distribution must be a nonempty 2-D matrix")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("distribution contains non-finite entries")
    low = float(arr.min())
    if low < -1e-12:
        i, j = np.unravel_index(int(np.argmin(arr)), arr.shape)
        raise InvalidInput(f"negative entry {arr[i, j]!r} at row {i}, column {j}")
    arr = arr.copy()
    arr[arr < ZERO_CLAMP] = 0.0
    total = float(arr.sum())
    if total <= 0.0:
        raise InvalidInput("distribution is identically zero")
    if abs(total - 1.0) > 1e-8 and not renormalize:
        raise NotNormalized(
            f"distribution sums to {total!r}; pass renormalize=True to rescale"
        )
    arr = arr / total
    return DistMatrix(arr.shape[0], arr.shape[1], arr)


def psd_rank_lower_bound(p: DistMatrix) -> int:
    """Certified lower bound ceil(sqrt(rank(P))) on the psd-rank.

    tr(C_x D_y) is bilinear in the r^2-dimensional vectorizations of the
    factors, so rank(P) <= r^2 for any size-r psd factorization.
    """
    if not isinstance(p, DistMatrix):
        raise InvalidInput("expected a DistMatrix")
    if float(p.p.sum()) <= 0.0:
        raise InvalidInput("distribution is identically zero")
    r = matrix_rank(p.p)
    return math.isqrt(r - 1) + 1 if r >= 1 else 1


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the factorization searches; one seed drives all randomness."""

    starts: int = 16
    max_iters: int = 5000
    grad_tol: float = 1e-10
    tol: float = 1e-7
    seed: int = 0


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True)
class PsdFactorization:
    """Families {C_x}, {D_y} of r x r Hermitian psd matrices with the
    Frobenius residual of [tr(C_x D_y) - P(x, y)] against their target.
    """

    r: int
    cs: tuple[np.ndarray, ...]
    ds: tuple[np.ndarray, ...]
    residual: float

    def __post_init__(self):
        if self.r < 1:
            raise InvalidInput("factorization size r must be positive")
        cs = tuple(
            require_hermitian(c, name=f"C[{x}]") for x, c in enumerate(self.cs)
        )
        ds = tuple(
            require_hermitian(d, name=f"D[{y}]") for y, d in enumerate(self.ds)
        )
        for fam, tag in ((cs, "C"), (ds, "D")):
            for idx, mat in enumerate(fam):
                if mat.shape != (self.r, self.r):
                    raise InvalidInput(f"{tag}[{idx}] has shape {mat.shape}, "
                                       f"expected {(self.r, self.r)}")
                low = float(np.linalg.eigvalsh(mat)[0])
                if low < -1e-10:
                    raise NotPsd(f"{tag}[{idx}] has eigenvalue {low:.3e}")
        if self.residual < 0.0 or not math.isfinite(self.residual):
            raise InvalidInput("residual must be finite and nonnegative")
        object.__setattr__(self, "cs", cs)
        object.__setattr__(self, "ds", ds)

    @property
    def n(self) -> int:
        return len(self.cs)

    @property
    def m(self) -> int:
        return len(self.ds)

    def trace_products(self) -> np.ndarray:
        """The bilinear form t[x, y] = tr(C_x D_y), real nonnegative."""
        c = np.stack(self.cs)
        d = np.stack(self.ds)
        return np.einsum("xab,yba->xy", c, d).real


@dataclass(frozen=True)
class RankReport:
    """Bracketing [lower, upper] for a rank quantity; ``certified`` only
    when the bracket is tight. ``witness`` realizes the upper bound.
    """

    lower: int
    upper: int
    status: str
    witness: PsdFactorization | None = None

    def __post_init__(self):
        if self.lower < 1 or self.upper < self.lower:
            raise InvalidInput("rank bracket must satisfy 1 <= lower <= upper")
        if self.status not in ("certified", "heuristic"):
            raise InvalidInput(f"unknown status {self.status!r}")
        if self.status == "certified" and self.lower != self.upper:
            raise InvalidInput("certified reports require lower == upper")


def _grams(e: np.ndarray) -> np.ndarray:
    # C_x = E_x^dag E_x, psd Hermitian by construction.
    return np.einsum("xba,xbc->xac", e.conj(), e)


def _trace_form(c: np.ndarray, d: np.ndarray) -> np.ndarray:
    return np.einsum("xab,yba->xy", c, d).real


def _objective(P: np.ndarray, e: np.ndarray, f: np.ndarray) -> float:
    diff = _trace_form(_grams(e), _grams(f)) - P
    return float((diff * diff).sum())


def _ray_step(resid: np.ndarray, z: np.ndarray, grad: np.ndarray,
              other: np.ndarray) -> float:
    """Exact minimizer of the objective along z - eta * grad.

    With the other side fixed, each Gram matrix is quadratic in eta, so
    the objective is a quartic polynomial in eta; its derivative is a
    cubic whose best nonnegative real root seeds the backtracking search.
    """
    # C(eta) = C0 - eta * (G^dag Z + Z^dag G) + eta^2 * G^dag G
    c1 = -np.einsum("xba,xbc->xac", grad.conj(), z) - np.einsum(
        "xba,xbc->xac", z.conj(), grad
    )
    c2 = np.einsum("xba,xbc->xac", grad.conj(), grad)
    t1 = _trace_form(c1, other)
    t2 = _trace_form(c2, other)
    # L(eta) = sum (resid + eta t1 + eta^2 t2)^2
    a = 2.0 * float((resid * t1).sum())
    b = 2.0 * (float((t1 * t1).sum()) + 2.0 * float((resid * t2).sum()))
    c = 6.0 * float((t1 * t2).sum())
    d = 4.0 * float((t2 * t2).sum())
    candidates = []
    if d > 0.0:
        roots = np.roots([d, c, b, a])
        candidates = [float(r.real) for r in roots
                      if abs(r.imag) < 1e-10 * max(1.0, abs(r.real)) and r.real > 0.0]
    elif b > 0.0:
        candidates = [-a / b] if -a / b > 0.0 else []
    if not candidates:
        return 0.0

    def along(eta: float) -> float:
        v = resid + eta * t1 + eta * eta * t2
        return float((v * v).sum())

    return min(candidates, key=along)


def _backtrack(z, grad, gnorm2, value, evaluate, eta0):
    """Armijo backtracking from eta0; returns (new_z, new_value) or None."""
    eta = eta0
    while eta > 1e-20:
        trial = z - eta * grad
        trial_val = evaluate(trial)
        if trial_val <= value - 1e-4 * eta * gnorm2:
            return trial, trial_val
        eta *= 0.5
    return None


def _descend(
    P: np.ndarray, e0: np.ndarray, f0: np.ndarray, cfg: SolverConfig
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Alternating gradient descent with backtracking on the parameterized
    objective sum (tr(E_x^dag E_x F_y^dag F_y) - P)^2.

    Each side's backtracking starts from the exact minimizer along its
    gradient ray (a cubic-root computation), so flat quartic valleys do
    not starve the step size. Returns the final factors and the objective
    value after every iteration; the recorded sequence is non-increasing
    because only improving steps are accepted.
    """
    e = e0.astype(np.complex128).copy()
    f = f0.astype(np.complex128).copy()
    history = [_objective(P, e, f)]
    stall = 0

    for _ in range(cfg.max_iters):
        c = _grams(e)
        d = _grams(f)
        t = _trace_form(c, d)

        # Exact minimization along the global scaling direction.
        num = float((t * P).sum())
        den = float((t * t).sum())
        if den > 0.0 and num > 0.0:
            gamma = (num / den) ** 0.25
            e *= gamma
            f *= gamma
            c = _grams(e)
            d = _grams(f)
            t = _trace_form(c, d)

        resid = t - P
        value = float((resid * resid).sum())

        grad_e = 4.0 * np.einsum("xy,xab,ybc->xac", resid, e, d)
        gnorm2_e = float(np.vdot(grad_e, grad_e).real)
        if gnorm2_e > 0.0:
            eta0 = _ray_step(resid, e, grad_e, d) or value / gnorm2_e
            hit = _backtrack(e, grad_e, gnorm2_e, value,
                             lambda z: _objective_with_d(P, z, d), eta0)
            if hit is not None:
                e, value = hit

        c = _grams(e)
        t = _trace_form(c, d)
        resid = t - P
        value = float((resid * resid).sum())

        grad_f = 4.0 * np.einsum("xy,yab,xbc->yac", resid, f, c)
        gnorm2_f = float(np.vdot(grad_f, grad_f).real)
        if gnorm2_f > 0.0:
            resid_t = resid.T
            eta0 = _ray_step(resid_t, f, grad_f, c) or value / gnorm2_f
            hit = _backtrack(f, grad_f, gnorm2_f, value,
                             lambda z: _objective_with_c(P, c, z), eta0)
            if hit is not None:
                f, value = hit

        prev = history[-1]
        history.append(value)
        if math.sqrt(gnorm2_e + gnorm2_f) < cfg.grad_tol:
            break
        if value < 1e-24:
            break
        if prev - value <= 1e-16 * max(value, 1e-30):
            stall += 1
            if stall >= 25:
                break
        else:
            stall = 0
    return e, f, history


def _objective_with_d(P: np.ndarray, e: np.ndarray, d: np.ndarray) -> float:
    diff = _trace_form(_grams(e), d) - P
    return float((diff * diff).sum())


def _objective_with_c(P: np.ndarray, c: np.ndarray, f: np.ndarray) -> float:
    diff = _trace_form(c, _grams(f)) - P
    return float((diff * diff).sum())


def _random_start(
    rng: np.random.Generator, n: int, m: int, r: int
) -> tuple[np.ndarray, np.ndarray]:
    scale = (1.0 / (n * m)) ** 0.25 / math.sqrt(r)
    e = scale * (rng.standard_normal((n, r, r)) + 1j * rng.standard_normal((n, r, r)))
    f = scale * (rng.standard_normal((m, r, r)) + 1j * rng.standard_normal((m, r, r)))
    return e, f


def _diagonal_exact_start(P: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray] | None:
    """Exact factorization available whenever r >= min(n, m): one side gets
    basis projectors, the other diagonal probability rows/columns.
    """
    n, m = P.shape
    if m <= n and r >= m:
        e = np.zeros((n, r, r), dtype=np.complex128)
        f = np.zeros((m, r, r), dtype=np.complex128)
        for x in range(n):
            e[x, :m, :m] = np.diag(np.sqrt(P[x, :]))
        for y in range(m):
            f[y, y, y] = 1.0
        return e, f
    if n < m and r >= n:
        e = np.zeros((n, r, r), dtype=np.complex128)
        f = np.zeros((m, r, r), dtype=np.complex128)
        for x in range(n):
            e[x, x, x] = 1.0
        for y in range(m):
            f[y, :n, :n] = np.diag(np.sqrt(P[:, y]))
        return e, f
    return None


def _diag_start_from_nonneg(
    w: np.ndarray, h: np.ndarray, r: int
) -> tuple[np.ndarray, np.ndarray]:
    """Turn a nonnegative factorization P ~ W H into diagonal psd factors."""
    n = w.shape[0]
    m = h.shape[1]
    e = np.zeros((n, r, r), dtype=np.complex128)
    f = np.zeros((m, r, r), dtype=np.complex128)
    k = min(r, w.shape[1])
    for x in range(n):
        e[x, :k, :k] = np.diag(np.sqrt(w[x, :k]))
    for y in range(m):
        f[y, :k, :k] = np.diag(np.sqrt(h[:k, y]))
    return e, f


def psd_fit(
    p: DistMatrix,
    r: int,
    cfg: SolverConfig | None = None,
    inits: Iterable[tuple[np.ndarray, np.ndarray]] = (),
) -> PsdFactorization:
    """Best size-r psd factorization found by seeded multi-start descent.

    Parameterizing C_x = E_x^dag E_x and D_y = F_y^dag F_y keeps the
    factors psd without any projection; each start runs alternating
    gradient descent with backtracking line search. Two deterministic
    warm starts precede the ``cfg.starts`` random ones: the exact diagonal
    construction (available whenever r >= min(n, m)) and a diagonal lift
    of a nonnegative factorization. Deterministic given ``cfg.seed``; ties
    between starts go to the lowest start index. ``inits`` supplies extra
    starting points, tried first.
    """
    if not isinstance(p, DistMatrix):
        raise InvalidInput("expected a DistMatrix")
    if r < 1:
        raise InvalidInput("factorization size r must be positive")
    cfg = cfg or DEFAULT_CONFIG
    P = p.p
    n, m = P.shape
    zero_rows = np.where(P.sum(axis=1) <= 0.0)[0]
    zero_cols = np.where(P.sum(axis=0) <= 0.0)[0]

    rng = np.random.default_rng(cfg.seed)
    starts = [(np.array(e0, dtype=np.complex128), np.array(f0, dtype=np.complex128))
              for e0, f0 in inits]
    exact = _diagonal_exact_start(P, r)
    if exact is not None:
        starts.append(exact)
    w, h, _ = _nonneg_fit(
        P, r, rng=np.random.default_rng(cfg.seed ^ 0x9E3779B9),
        starts=2, iters=400, tol=cfg.tol,
    )
    starts.append(_diag_start_from_nonneg(w, h, r))
    starts.extend(_random_start(rng, n, m, r) for _ in range(cfg.starts))

    best_val = math.inf
    best_e = best_f = None
    for e0, f0 in starts:
        # Zero rows/columns impose no constraint; pin their factors to zero.
        e0 = e0.copy()
        f0 = f0.copy()
        e0[zero_rows] = 0.0
        f0[zero_cols] = 0.0
        e, f, history = _descend(P, e0, f0, cfg)
        if history[-1] < best_val:
            best_val = history[-1]
            best_e, best_f = e, f
        if best_val < 1e-24:
            break

    cs = tuple(hermitize(best_e[x].conj().T @ best_e[x]) for x in range(n))
    ds = tuple(hermitize(best_f[y].conj().T @ best_f[y]) for y in range(m))
    t = _trace_form(np.stack(cs), np.stack(ds))
    residual = float(np.linalg.norm(t - P))
    return PsdFactorization(r=r, cs=cs, ds=ds, residual=residual)


def psd_rank_search(p: DistMatrix, cfg: SolverConfig | None = None) -> RankReport:
    """Bracket the psd-rank of P between the certified lower bound and the
    smallest size at which the solver finds a witness.

    Sizes are tried upward from the lower bound; a size succeeds when the
    residual drops below ``cfg.tol``. Warm starts derived from a
    nonnegative factorization are added at every size, and the exact
    diagonal construction guarantees success at r = min(n, m). The report
    is certified only when the first success equals the lower bound; the
    generation complexity in seed qubits is ceil(log2(upper)).
    """
    cfg = cfg or DEFAULT_CONFIG
    lower = psd_rank_lower_bound(p)
    rmax = min(p.n, p.m)
    fact = None
    for r in range(lower, rmax + 1):
        fact = psd_fit(p, r, cfg)
        if fact.residual < cfg.tol:
            status = "certified" if r == lower else "heuristic"
            return RankReport(lower=lower, upper=r, status=status, witness=fact)
    # Only reachable when cfg.tol is below roundoff: the diagonal witness at
    # min(n, m) is exact up to machine precision, so report it as the upper.
    status = "certified" if rmax == lower else "heuristic"
    return RankReport(lower=lower, upper=rmax, status=status, witness=fact)


def _nonneg_fit(
    P: np.ndarray,
    r: int,
    rng: np.random.Generator,
    starts: int,
    iters: int,
    tol: float,
    inits: Sequence[tuple[np.ndarray, np.ndarray]] = (),
) -> tuple[np.ndarray, np.ndarray, float]:
    """Multiplicative-update nonnegative factorization P ~ W H.

    Lee-Seung updates for the Frobenius objective; monotone, so the best
    start wins. Returns (W, H, Frobenius residual).
    """
    n, m = P.shape
    eps = 1e-12
    best = (None, None, math.inf)
    trials = list(inits)
    mean = max(float(P.mean()), eps)
    for _ in range(starts):
        w0 = rng.uniform(0.1, 1.0, size=(n, r)) * math.sqrt(mean / r)
        h0 = rng.uniform(0.1, 1.0, size=(r, m)) * math.sqrt(mean / r)
        trials.append((w0, h0))
    for w0, h0 in trials:
        w = np.asarray(w0, dtype=float).copy()
        h = np.asarray(h0, dtype=float).copy()
        resid = float(np.linalg.norm(P - w @ h))
        for _ in range(iters):
            w *= (P @ h.T) / (w @ (h @ h.T) + eps)
            h *= (w.T @ P) / ((w.T @ w) @ h + eps)
            new_resid = float(np.linalg.norm(P - w @ h))
            if new_resid < tol * 0.1 or resid - new_resid < 1e-15:
                resid = new_resid
                break
            resid = new_resid
        if resid < best[2]:
            best = (w, h, resid)
        if best[2] < tol * 0.1:
            break
    return best  # type: ignore[return-value]


def nonneg_rank_bounds(p: DistMatrix, cfg: SolverConfig | None = None) -> RankReport:
    """Bracket the nonnegative rank of P.

    The lower bound is rank(P). The upper bound is the smallest size at
    which multiplicative updates reach the tolerance, capped at min(n, m)
    where the trivial factorization is exact. Matrices of rank <= 2 have
    nonnegative rank equal to rank, so those reports are certified
    outright. The randomized generation complexity in seed bits is
    ceil(log2(upper)).
    """
    if not isinstance(p, DistMatrix):
        raise InvalidInput("expected a DistMatrix")
    cfg = cfg or DEFAULT_CONFIG
    P = p.p
    n, m = P.shape
    lower = matrix_rank(P)
    rmax = min(n, m)
    rng = np.random.default_rng(cfg.seed)

    def witness_from(w: np.ndarray, h: np.ndarray, r: int) -> PsdFactorization:
        e, f = _diag_start_from_nonneg(w, h, r)
        cs = tuple(hermitize(e[x].conj().T @ e[x]) for x in range(n))
        ds = tuple(hermitize(f[y].conj().T @ f[y]) for y in range(m))
        t = _trace_form(np.stack(cs), np.stack(ds))
        return PsdFactorization(r=r, cs=cs, ds=ds,
                                residual=float(np.linalg.norm(t - P)))

    upper = None
    witness = None
    for r in range(max(lower, 1), rmax + 1):
        inits: list[tuple[np.ndarray, np.ndarray]] = []
        if r == 1:
            # Exact for genuinely rank-1 nonnegative matrices.
            rows = P.sum(axis=1, keepdims=True)
            cols = P.sum(axis=0, keepdims=True)
            inits.append((rows, cols / max(float(P.sum()), 1e-300)))
        if r >= rmax:
            # P = P @ I (or I @ P) is always an exact witness at min(n, m).
            inits.append((P.copy(), np.eye(m)) if m <= n else (np.eye(n), P.copy()))
        w, h, resid = _nonneg_fit(P, r, rng=rng, starts=cfg.starts,
                                  iters=2000, tol=cfg.tol, inits=inits)
        if resid < cfg.tol:
            upper = r
            witness = witness_from(w, h, r)
            break
        if lower <= 2:
            # rank <= 2 nonnegative matrices have nonnegative rank == rank;
            # certification does not depend on the heuristic succeeding.
            break
    if lower <= 2:
        return RankReport(lower=lower, upper=lower, status="certified",
                          witness=witness)
    if upper is None:  # unreachable: the trivial witness is exact at rmax
        upper = rmax
    status = "certified" if upper == lower else "heuristic"
    return RankReport(lower=lower, upper=upper, status=status, witness=witness)


def synth_from_psd(p: DistMatrix, f: PsdFactorization) -> RegisterState:
    """Generating purification of the classical state of P from a psd witness.

    Builds the pure state on registers (A, A', A1 | B, B', B1), dims
    (n, n, r, m, m, r), whose reduction to (A, B) is exactly the classical
    state with diagonal tr(C_x D_y). Columns of sqrt(C_x^T) feed the
    Alice aux block and columns of sqrt(D_y) the Bob aux block, so the
    Schmidt rank across the Alice|Bob cut is at most r.
    """
    if not isinstance(p, DistMatrix):
        raise InvalidInput("expected a DistMatrix")
    if f.n != p.n or f.m != p.m:
        raise InvalidInput(f"factorization is {f.n} x {f.m}, distribution "
                           f"is {p.n} x {p.m}")
    if f.residual > 1e-7:
        raise FactorizationMismatch(
            f"residual {f.residual:.3e} exceeds 1e-7; refusing to synthesize"
        )
    n, m, r = p.n, p.m, f.r
    v = np.stack([psd_sqrt(c.T) for c in f.cs])  # v[x, :, i] = i-th column
    w = np.stack([psd_sqrt(d) for d in f.ds])
    block = np.einsum("xai,ybi->xayb", v, w)
    amps = np.zeros((n, n, r, m, m, r), dtype=np.complex128)
    for x in range(n):
        for y in range(m):
            amps[x, x, :, y, y, :] = block[x, :, y, :]
    flat = amps.reshape(-1)
    norm = float(np.linalg.norm(flat))
    if norm <= 0.0:
        raise FactorizationMismatch("factorization synthesizes the zero vector")
    return RegisterState(
        flat / norm,
        dims=(n, n, r, m, m, r),
        sides=("A", "A", "A", "B", "B", "B"),
        names=("A", "A'", "A1", "B", "B'", "B1"),
    )


def gram_extract(state: RegisterState) -> PsdFactorization:
    """Read a psd factorization off a purification.

    The first register on each side is the computational one; the rest of
    that side is its aux block. With coefficient-absorbed Schmidt vectors
    v_x^i (the aux slice of the i-th left vector at computational index x)
    and w_y^i on the right, the Gram families C_x(j, i) = <v_x^j|v_x^i>
    and D_y(i, j) = <w_y^j|w_y^i> are psd and reproduce the
    computational-basis outcome probabilities as tr(C_x D_y).
    """
    norm = state.norm()
    if abs(norm - 1.0) > 1e-9:
        raise NotNormalized(f"state norm {norm!r} deviates from 1 beyond 1e-9")
    a_regs = state.registers_on("A")
    b_regs = state.registers_on("B")
    if not a_regs or not b_regs:
        raise InvalidInput("state must have registers on both sides")
    n = state.dims[a_regs[0]]
    m = state.dims[b_regs[0]]
    ka = state.side_dim("A") // n
    kb = state.side_dim("B") // m

    left, right = absorbed_schmidt_vectors(state)
    r = left.shape[1]
    vl = left.reshape(n, ka, r)
    wr = right.reshape(m, kb, r)
    cs = tuple(hermitize(vl[x].conj().T @ vl[x]) for x in range(n))
    ds = tuple(hermitize((wr[y].conj().T @ wr[y]).T) for y in range(m))

    tensor = state.amps.reshape(state.dims)
    order = a_regs + b_regs
    probs = np.abs(np.transpose(tensor, order).reshape(n, ka, m, kb)) ** 2
    measured = probs.sum(axis=(1, 3))
    t = _trace_form(np.stack(cs), np.stack(ds))
    residual = float(np.linalg.norm(t - measured))
    return PsdFactorization(r=r, cs=cs, ds=ds, residual=residual)
