"""Pure-state analysis for bipartite generation complexity.

A normalized bipartite pure state is summarized by its amplitude matrix
(the ``vec_inv`` image) and its Schmidt decomposition. The approximate
rank of the amplitude matrix and the approximate Schmidt rank of the
state determine how many seed qubits are needed to generate the state
within a fidelity target, and the optimal approximant is an explicit
truncation of the Schmidt sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotNormalized
from .linalg import (
    DensityMatrix,
    RegisterState,
    as_complex_array,
    ceil_log2,
    density_from_pure,
    rank_from_singulars,
    svd,
)

#: Additive slack, in favor of the smaller rank, applied to every
#: cumulative-weight threshold comparison. Keeps exact ties deterministic
#: under roundoff.
RANK_SLACK = 1e-12


@dataclass(frozen=True)
class PureState:
    """Normalized pure state on A (x) B, amplitude index ``x * dim_b + y``."""

    dim_a: int
    dim_b: int
    amps: np.ndarray

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise InvalidInput("state dimensions must be positive")
        vec = as_complex_array(self.amps, "state vector").reshape(-1)
        if vec.size != self.dim_a * self.dim_b:
            raise InvalidInput(
                f"amplitude length {vec.size} does not match "
                f"{self.dim_a} x {self.dim_b}"
            )
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-10:
            raise NotNormalized(f"state norm {norm!r} deviates from 1 beyond 1e-10")
        object.__setattr__(self, "amps", vec)

    def to_density(self) -> DensityMatrix:
        return density_from_pure(self.amps, self.dim_a, self.dim_b)

    def to_registers(self) -> RegisterState:
        return RegisterState(
            self.amps, (self.dim_a, self.dim_b), ("A", "B"), ("A", "B")
        )


@dataclass(frozen=True)
class SchmidtForm:
    """Schmidt data: probabilities ``coeffs`` (descending, sum 1) and
    orthonormal vector families ``left`` (dim_a x r) and ``right``
    (dim_b x r); the state equals sum_i sqrt(coeffs[i]) left_i (x) right_i.
    """

    coeffs: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.coeffs.size)


def vec_inv(psi: PureState) -> np.ndarray:
    """Amplitude matrix of a state: entry (x, y) is the amplitude of |x>|y>.

    The Frobenius norm of the result equals the state norm.
    """
    return psi.amps.reshape(psi.dim_a, psi.dim_b).copy()


def state_from_matrix(a) -> PureState:
    """Inverse of :func:`vec_inv`: wrap a unit-Frobenius-norm matrix."""
    arr = as_complex_array(a, "amplitude matrix")
    if arr.ndim != 2:
        raise InvalidInput("amplitude matrix must be 2-D")
    return PureState(arr.shape[0], arr.shape[1], arr.reshape(-1))


def tensor_product(psi: PureState, theta: PureState) -> PureState:
    """Joint state psi (x) theta on the combined cut (A, A1)|(B, B1)."""
    m = np.kron(vec_inv(psi), vec_inv(theta))
    return PureState(psi.dim_a * theta.dim_a, psi.dim_b * theta.dim_b, m.reshape(-1))


def schmidt_decompose(psi: PureState) -> SchmidtForm:
    """Schmidt decomposition with a canonical phase convention.

    Coefficients are the squared singular values of the amplitude matrix,
    truncated at the relative zero threshold. Degenerate coefficients keep
    the SVD's ordering; each left vector is rotated so its
    largest-magnitude entry is real positive, with the compensating phase
    on the right vector, so decompositions are reproducible.
    """
    res = svd(vec_inv(psi))
    r = res.rank
    sing = res.singulars[:r]
    left = res.left[:, :r].copy()
    right = res.right[:, :r].conj().copy()
    for i in range(r):
        k = int(np.argmax(np.abs(left[:, i])))
        pivot = left[k, i]
        phase = pivot / abs(pivot)
        left[:, i] *= phase.conjugate()
        right[:, i] *= phase
    return SchmidtForm(coeffs=sing**2, left=left, right=right)


def _min_terms(cum: np.ndarray, target: float) -> int:
    """Minimal k with cum[k-1] >= target - RANK_SLACK, capped at len(cum)."""
    if target - RANK_SLACK <= 0.0:
        return 0
    idx = int(np.searchsorted(cum, target - RANK_SLACK, side="left"))
    return min(idx + 1, cum.size)


def rank_eps(a, eps: float) -> int:
    """Smallest rank of a matrix within squared Frobenius distance eps of ``a``.

    Requires ``a`` to have unit Frobenius norm (within 1e-9). Equals the
    minimal k whose leading cumulative squared singular values reach
    1 - eps; the best approximant of that rank is the truncated SVD.
    """
    arr = as_complex_array(a, "rank_eps input")
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInput("rank_eps expects a nonempty 2-D matrix")
    if eps < 0.0:
        raise InvalidInput("eps must be nonnegative")
    fro = float(np.linalg.norm(arr))
    if abs(fro - 1.0) > 1e-9:
        raise NotNormalized(f"Frobenius norm {fro!r} deviates from 1 beyond 1e-9")
    s = np.linalg.svd(arr, compute_uv=False)
    cum = np.cumsum(s**2)
    k = _min_terms(cum, 1.0 - eps)
    # A matrix is a zero-distance approximant of itself, so never exceed rank.
    return min(k, rank_from_singulars(s)) if k else 0


def srank_eps(psi: PureState, eps: float) -> int:
    """Approximate Schmidt rank: the smallest Schmidt rank among states
    within fidelity 1 - eps of ``psi``.

    Equals the minimal r' whose leading Schmidt coefficients sum to at
    least (1 - eps)^2, and coincides with
    ``rank_eps(vec_inv(psi), 2*eps - eps**2)``. Returns 0 for eps >= 1
    (the empty protocol suffices).
    """
    if eps < 0.0:
        raise InvalidInput("eps must be nonnegative")
    coeffs = schmidt_decompose(psi).coeffs
    cum = np.cumsum(coeffs)
    k = _min_terms(cum, (1.0 - eps) ** 2)
    return min(k, coeffs.size) if k else 0


def q_eps(psi: PureState, eps: float) -> int:
    """Seed qubits needed to generate ``psi`` within fidelity 1 - eps.

    ceil(log2) of the approximate Schmidt rank. Mixed approximants give no
    advantage over pure ones, so this single number is the generation
    complexity of the state at accuracy eps.
    """
    return ceil_log2(srank_eps(psi, eps))


def build_approximant(psi: PureState, eps: float) -> tuple[PureState, float]:
    """Best low-Schmidt-rank approximant of ``psi`` at accuracy ``eps``.

    Truncates the Schmidt sum to r' = srank_eps(psi, eps) terms and
    renormalizes. Returns ``(phi, fid)`` where fid = |<psi|phi>| equals
    the square root of the retained coefficient mass and is >= 1 - eps.
    For eps >= 1 the single leading term is kept.
    """
    form = schmidt_decompose(psi)
    cum = np.cumsum(form.coeffs)
    r = _min_terms(cum, (1.0 - eps) ** 2)
    r = max(min(r, form.rank), 1)
    weights = np.sqrt(form.coeffs[:r] / float(cum[r - 1]))
    mat = (form.left[:, :r] * weights) @ form.right[:, :r].T
    phi = PureState(psi.dim_a, psi.dim_b, mat.reshape(-1))
    fid = float(abs(np.vdot(psi.amps, phi.amps)))
    return phi, fid
