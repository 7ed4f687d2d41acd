"""Small dense linear algebra, qubit states and averaging over the Bloch sphere.

Operators are plain ``numpy`` complex arrays. ``PureState`` and ``DensityMatrix``
wrap an array and validate it once at construction; after that they are treated
as immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

STRUCT_TOL = 1e-12
POSITIVITY_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


def dag(a: np.ndarray) -> np.ndarray:
    return np.conjugate(np.swapaxes(a, -1, -2))


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors), left to right."""
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def frobenius_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def is_unitary(u: np.ndarray, tol: float = STRUCT_TOL) -> bool:
    u = np.asarray(u)
    return frobenius_distance(dag(u) @ u, np.eye(u.shape[0])) < tol


def _n_qubits(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector on 1 to 3 qubits."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = _n_qubits(amps.size)
        if n not in (1, 2, 3):
            raise ValueError(f"unsupported number of qubits: {n}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > STRUCT_TOL:
            raise ValueError(f"state is not normalized (norm={norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, vec: Iterable[complex] | np.ndarray) -> "PureState":
        v = np.array(vec, dtype=complex).reshape(-1)
        return cls(v / np.linalg.norm(v))

    @property
    def n_qubits(self) -> int:
        return _n_qubits(self.amplitudes.size)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector())

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def equal_up_to_phase(self, other: "PureState", tol: float = STRUCT_TOL) -> bool:
        """Compare after removing the phase of this state's largest amplitude."""
        a, b = self.amplitudes, other.amplitudes
        if a.shape != b.shape:
            return False
        k = int(np.argmax(np.abs(a)))
        if abs(b[k]) < 1e-300:
            return False
        a = a * np.conj(a[k]) / abs(a[k])
        b = b * np.conj(b[k]) / abs(b[k])
        return float(np.linalg.norm(a - b)) < tol


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive, unit-trace matrix on one or two qubits.

    ``check=False`` skips validation; used for intermediate results that are
    known to be valid up to roundoff (e.g. partial traces of valid states).
    """

    matrix: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density matrix must be square")
        n = _n_qubits(m.shape[0])
        if n not in (1, 2):
            raise ValueError(f"unsupported number of qubits: {n}")
        if self.check:
            if frobenius_distance(m, dag(m)) > STRUCT_TOL:
                raise ValueError("density matrix is not Hermitian")
            if abs(np.trace(m) - 1.0) > STRUCT_TOL:
                raise ValueError(f"density matrix trace is {np.trace(m)!r}")
            if np.linalg.eigvalsh(m).min() < -POSITIVITY_TOL:
                raise ValueError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self) -> int:
        return _n_qubits(self.matrix.shape[0])

    @classmethod
    def maximally_mixed(cls, n_qubits: int = 1) -> "DensityMatrix":
        d = 2**n_qubits
        return cls(np.eye(d, dtype=complex) / d)

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def mix(self, other: "DensityMatrix", weight: float) -> "DensityMatrix":
        """Convex combination ``weight * self + (1 - weight) * other``."""
        return DensityMatrix(weight * self.matrix + (1 - weight) * other.matrix)

    def evolve(self, u: np.ndarray) -> "DensityMatrix":
        return DensityMatrix(u @ self.matrix @ dag(u), check=False)


@dataclass(frozen=True)
class SphereAngles:
    """Point on the Bloch sphere, plus an optional third Euler angle ``chi``.

    ``chi`` selects the element of SU(2) above the point (θ, φ); it does not
    change the state ``U|0>`` but does change operators such as ``U ⊗ U`` acting
    on ``|00>`` and ``|11>``.
    """

    theta: float
    phi: float
    chi: float = 0.0

    def __post_init__(self) -> None:
        if not -1e-12 <= self.theta <= np.pi + 1e-12:
            raise ValueError(f"theta out of range: {self.theta}")
        if not 0.0 <= self.phi < 2 * np.pi + 1e-12:
            raise ValueError(f"phi out of range: {self.phi}")

    @classmethod
    def from_direction(cls, v: Sequence[float]) -> "SphereAngles":
        x, y, z = (float(c) for c in v)
        r = np.sqrt(x * x + y * y + z * z)
        if abs(r - 1.0) > STRUCT_TOL:
            raise ValueError("direction is not a unit vector")
        theta = float(np.arccos(np.clip(z, -1.0, 1.0)))
        phi = float(np.arctan2(y, x)) % (2 * np.pi)
        return cls(theta, phi)

    def direction(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])


def _su2_entries(theta, phi, chi):
    a = np.cos(np.asarray(theta) / 2) * np.exp(-0.5j * np.asarray(phi) + 1j * np.asarray(chi))
    b = np.sin(np.asarray(theta) / 2) * np.exp(0.5j * np.asarray(phi) + 1j * np.asarray(chi))
    return a, b


def u_omega(omega: SphereAngles) -> np.ndarray:
    """SU(2) matrix with ``U|0>`` pointing along ``omega``.

    U = R(θ, φ) · exp(iχσ_z), so U|0> = e^{i(χ-φ/2)} (cos θ/2 |0> + e^{iφ} sin θ/2 |1>).
    """
    return u_omega_batch(np.array([omega.theta]), np.array([omega.phi]), np.array([omega.chi]))[0]


def u_omega_batch(theta: np.ndarray, phi: np.ndarray, chi: np.ndarray | float = 0.0) -> np.ndarray:
    """Vectorized ``u_omega``; returns shape (n, 2, 2)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    chi = np.broadcast_to(np.asarray(chi, dtype=float), theta.shape)
    a, b = _su2_entries(theta, phi, chi)
    u = np.empty(theta.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = a
    u[..., 1, 0] = b
    u[..., 0, 1] = -np.conj(b)
    u[..., 1, 1] = np.conj(a)
    return u


def bloch_state(direction: Sequence[float]) -> PureState:
    """Qubit state whose Bloch vector is ``direction``."""
    return PureState(u_omega(SphereAngles.from_direction(direction)) @ KET0)


def bloch_vector(rho: DensityMatrix | PureState) -> np.ndarray:
    m = rho.projector() if isinstance(rho, PureState) else rho.matrix
    if m.shape != (2, 2):
        raise ValueError("bloch_vector needs a single-qubit state")
    return np.array([np.trace(m @ s).real for s in PAULIS])


def from_bloch_vector(v: Sequence[float]) -> DensityMatrix:
    x, y, z = v
    return DensityMatrix((I2 + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z) / 2)


def fidelity_to_pure(rho: DensityMatrix | np.ndarray, psi: PureState) -> float:
    """``<psi|rho|psi>``."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    v = psi.amplitudes
    if m.shape != (v.size, v.size):
        raise ValueError(f"dimension mismatch: {m.shape} vs state of size {v.size}")
    val = np.vdot(v, m @ v)
    if abs(val.imag) > STRUCT_TOL:
        raise ValueError("fidelity has a non-negligible imaginary part; is rho Hermitian?")
    return float(val.real)


def partial_trace(
    rho: DensityMatrix | PureState | np.ndarray, keep: Sequence[int], n_qubits: int | None = None
) -> DensityMatrix:
    """Reduced state on the qubits listed in ``keep`` (qubit 0 is leftmost in kron order).

    Accepts a density matrix, a pure state (treated as its projector) or a raw
    square matrix on up to three qubits.
    """
    if isinstance(rho, PureState):
        n = rho.n_qubits
        psi = rho.amplitudes.reshape((2,) * n)
        return _reduce_pure(psi, n, keep)
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    n = n_qubits if n_qubits is not None else _n_qubits(m.shape[0])
    keep = _check_keep(keep, n)
    t = m.reshape((2,) * (2 * n))
    drop = [q for q in range(n) if q not in keep]
    # trace out from the highest index so earlier axis numbers stay valid
    for k, q in enumerate(sorted(drop, reverse=True)):
        remaining = n - k
        t = np.trace(t, axis1=q, axis2=q + remaining)
    d = 2 ** len(keep)
    out = t.reshape(d, d)
    out = _reorder(out, sorted(keep), list(keep))
    return DensityMatrix(out, check=False)


def _check_keep(keep: Sequence[int], n: int) -> list[int]:
    keep = [int(k) for k in keep]
    if not keep:
        raise ValueError("keep must be non-empty")
    if len(set(keep)) != len(keep) or any(not 0 <= k < n for k in keep):
        raise ValueError(f"invalid keep set {keep} for {n} qubits")
    if len(keep) == n:
        raise ValueError("keep must be a strict subset of the qubits")
    return keep


def _reduce_pure(psi: np.ndarray, n: int, keep: Sequence[int]) -> DensityMatrix:
    keep = _check_keep(keep, n)
    drop = [q for q in range(n) if q not in keep]
    mat = np.transpose(psi, keep + drop).reshape(2 ** len(keep), -1)
    return DensityMatrix(mat @ dag(mat), check=False)


def _reorder(m: np.ndarray, have: list[int], want: list[int]) -> np.ndarray:
    if have == want:
        return m
    k = len(have)
    perm = [have.index(q) for q in want]
    t = m.reshape((2,) * (2 * k))
    t = np.transpose(t, perm + [p + k for p in perm])
    return t.reshape(2**k, 2**k)


def embed_single_qubit(op: np.ndarray, target: int, n_qubits: int) -> np.ndarray:
    ops = [op if q == target else I2 for q in range(n_qubits)]
    return kron(*ops)


# --- random states -----------------------------------------------------------

def haar_angles(rng: np.random.Generator, size: int | None = None, with_chi: bool = False):
    """Haar-distributed sphere point(s): cos θ ~ U[-1, 1], φ ~ U[0, 2π).

    With ``with_chi`` the third Euler angle is drawn uniformly as well, which
    makes ``u_omega`` Haar-distributed on SU(2).
    """
    n = 1 if size is None else size
    cos_t = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2 * np.pi, n)
    chi = rng.uniform(0.0, 2 * np.pi, n) if with_chi else np.zeros(n)
    theta = np.arccos(cos_t)
    if size is None:
        return SphereAngles(float(theta[0]), float(phi[0]), float(chi[0]))
    return theta, phi, chi


def haar_state(rng: np.random.Generator) -> PureState:
    return PureState(u_omega(haar_angles(rng)) @ KET0)


def haar_kets(rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` Haar-random qubit kets as an array of shape (size, 2)."""
    theta, phi, _ = haar_angles(rng, size)
    return u_omega_batch(theta, phi)[..., :, 0]


def haar_unitary(rng: np.random.Generator) -> np.ndarray:
    return u_omega(haar_angles(rng, with_chi=True))


# --- quadrature ---------------------------------------------------------------

@dataclass(frozen=True)
class SphereRule:
    """Product rule: Gauss-Legendre in cos θ times an equispaced grid in φ (and χ).

    Integrates spherical polynomials of degree ``<= order`` exactly, normalized so
    that the constant 1 integrates to 1.
    """

    order: int = 8
    su2: bool = False

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ValueError("quadrature order must be at least 2")

    def nodes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        n_theta = self.order // 2 + 1
        n_phi = self.order + 1
        x, w = np.polynomial.legendre.leggauss(n_theta)
        phis = 2 * np.pi * np.arange(n_phi) / n_phi
        chis = 2 * np.pi * np.arange(n_phi) / n_phi if self.su2 else np.zeros(1)
        tt, pp, cc = np.meshgrid(np.arccos(x), phis, chis, indexing="ij")
        ww = np.broadcast_to(w[:, None, None] / 2, tt.shape) / (n_phi * len(chis))
        return tt.ravel(), pp.ravel(), cc.ravel(), ww.ravel()

    def integrate(self, f: Callable[[SphereAngles], object]):
        total = None
        for t, p, c, w in zip(*self.nodes()):
            val = w * np.asarray(f(SphereAngles(float(t), float(p), float(c))))
            total = val if total is None else total + val
        return total


def sphere_quadrature(f: Callable[[SphereAngles], object], order: int = 8):
    """Normalized average ``(1/4π) ∫ f dΩ`` over the sphere; ``f`` may return arrays."""
    return SphereRule(order).integrate(f)


def su2_quadrature(f: Callable[[SphereAngles], object], order: int = 8):
    """Haar average over SU(2), parametrized by ``SphereAngles`` including ``chi``."""
    return SphereRule(order, su2=True).integrate(f)
