"""Informationally complete measurement families.

Two schemes are provided:

* ``mub_family`` -- the ``d + 1`` mutually unbiased bases for prime ``d``.
* ``pauli_family`` -- eigenbases of the ``d**2 - 1`` generalized Pauli
  (Gell-Mann) operators, available in every dimension.

A basis stores its states as the columns of a unitary matrix, so the
outcome probabilities of a pure state ``psi`` are ``|V^dagger psi|**2``.
"""
import json
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError, UnsupportedDimensionError
from .linalg import check_hermitian, hermitize

MUB = "mub"
PAULI = "pauli"
SCHEMES = (MUB, PAULI)

_DEGENERACY_TOL = 1e-9
_ZERO_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """``d`` orthonormal states, column ``i`` of ``vectors`` being the ``i``-th outcome."""

    vectors: np.ndarray
    label: str

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise InvalidInputError(f"basis {self.label!r} must be a square matrix")
        if np.linalg.norm(v.conj().T @ v - np.eye(v.shape[0])) > 1e-10:
            raise InvalidInputError(f"basis {self.label!r} is not orthonormal")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self):
        return self.vectors.shape[0]

    @property
    def states(self):
        return [self.vectors[:, i] for i in range(self.dim)]

    def projectors(self):
        """Array of shape ``(d, d, d)``; ``[i]`` is ``|psi_i><psi_i|``."""
        v = self.vectors
        return np.einsum("ki,li->ikl", v, v.conj())

    def probabilities(self, psi):
        """Born probabilities ``|<psi_i|psi>|**2`` for a pure state."""
        return np.abs(self.vectors.conj().T @ np.asarray(psi)) ** 2


@dataclass(frozen=True, eq=False)
class MeasurementFamily:
    scheme: str
    bases: tuple

    @property
    def dim(self):
        return self.bases[0].dim

    def __len__(self):
        return len(self.bases)

    def __getitem__(self, index):
        return self.bases[index]

    def to_json(self):
        """Serialize as JSON; amplitudes are ``[re, im]`` pairs, ``states[i][k]`` is row ``k`` of state ``i``."""
        payload = {
            "scheme": self.scheme,
            "dim": self.dim,
            "bases": [
                {
                    "label": b.label,
                    "states": [[[float(a.real), float(a.imag)] for a in s] for s in b.states],
                }
                for b in self.bases
            ],
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text)
        bases = []
        for entry in payload["bases"]:
            states = np.array(entry["states"], dtype=float)
            vectors = (states[..., 0] + 1j * states[..., 1]).T
            bases.append(MeasurementBasis(vectors, entry["label"]))
        return cls(payload["scheme"], tuple(bases))


def is_prime(n):
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n ** 0.5) + 1))


def mub_family(d):
    """Complete set of ``d + 1`` mutually unbiased bases for prime ``d``.

    For odd ``d`` basis ``b`` holds the vectors with components
    ``omega**(b k**2 + j k) / sqrt(d)``; for ``d = 2`` the Z, X and Y
    eigenbases are returned.
    """
    if not is_prime(d):
        raise UnsupportedDimensionError(
            f"complete MUB sets are only constructed for prime d, got {d}; "
            "use the generalized Pauli scheme (pauli_family) instead"
        )
    if d == 2:
        s = 1 / np.sqrt(2)
        vecs = [
            np.eye(2, dtype=complex),
            np.array([[s, s], [s, -s]], dtype=complex),
            np.array([[s, s], [1j * s, -1j * s]], dtype=complex),
        ]
    else:
        k = np.arange(d)
        omega = np.exp(2j * np.pi / d)
        vecs = [np.eye(d, dtype=complex)]
        for b in range(d):
            # exponents reduced mod d before exponentiation to limit phase error
            expo = (b * k[:, None] ** 2 + k[:, None] * k[None, :]) % d
            vecs.append(omega ** expo / np.sqrt(d))
    bases = tuple(MeasurementBasis(v, f"{MUB}:{i}") for i, v in enumerate(vecs))
    return MeasurementFamily(MUB, bases)


def generalized_pauli_operators(d):
    """The ``d**2 - 1`` traceless Hermitian operators with ``tr(A_a A_b) = 2 delta_ab``.

    Order: for each pair ``j < k`` the symmetric ``u_jk`` followed by the
    antisymmetric ``v_jk``, then the diagonal ``w_1 ... w_{d-1}``. For ``d = 2``
    this is ``(sigma_x, sigma_y, sigma_z)``.
    """
    if int(d) != d or d < 2:
        raise UnsupportedDimensionError(f"dimension must be an integer >= 2, got {d}")
    ops = []
    for j in range(d):
        for k in range(j + 1, d):
            u = np.zeros((d, d), dtype=complex)
            u[j, k] = u[k, j] = 1
            v = np.zeros((d, d), dtype=complex)
            v[j, k] = -1j
            v[k, j] = 1j
            ops.extend((u, v))
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1
        diag[l] = -l
        ops.append(np.sqrt(2 / (l * (l + 1))) * np.diag(diag).astype(complex))
    return ops


def _canonical_phase(vec):
    idx = np.flatnonzero(np.abs(vec) > 1e-10)[0]
    return vec * (abs(vec[idx]) / vec[idx])


def _snap(vec):
    # flush roundoff so that e.g. exact |2> is returned verbatim
    re = np.where(np.abs(vec.real) < _ZERO_TOL, 0.0, vec.real)
    im = np.where(np.abs(vec.imag) < _ZERO_TOL, 0.0, vec.imag)
    return re + 1j * im


def eigenbasis_of(op, label="op"):
    """Deterministic orthonormal eigenbasis of a Hermitian operator.

    States are ordered by ascending eigenvalue. Inside a degenerate eigenspace
    the basis is built by Gram-Schmidt on the projections of ``|0>, |1>, ...``,
    so computational basis vectors lying in the eigenspace come back
    verbatim, in index order. Each vector's first nonzero amplitude is made
    real positive.
    """
    op = check_hermitian(op, "operator")
    d = op.shape[0]
    values, vectors = np.linalg.eigh(hermitize(op))
    columns = []
    start = 0
    while start < d:
        stop = start + 1
        while stop < d and values[stop] - values[start] < _DEGENERACY_TOL:
            stop += 1
        block = vectors[:, start:stop]
        if stop - start == 1:
            columns.append(_canonical_phase(block[:, 0]))
        else:
            proj = block @ block.conj().T
            found = []
            for i in range(d):
                cand = proj[:, i].copy()
                for f in found:
                    cand -= np.vdot(f, cand) * f
                norm = np.linalg.norm(cand)
                if norm > 1e-8:
                    found.append(cand / norm)
                if len(found) == stop - start:
                    break
            columns.extend(_canonical_phase(f) for f in found)
        start = stop
    basis = np.column_stack([_snap(c) for c in columns])
    # re-orthonormalize after snapping; the change is at the 1e-12 level
    q, r = np.linalg.qr(basis)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return MeasurementBasis(_snap(q), label)


def pauli_family(d):
    """Eigenbases of all generalized Pauli operators, one basis per operator."""
    bases = tuple(
        eigenbasis_of(op, f"{PAULI}:{i}") for i, op in enumerate(generalized_pauli_operators(d))
    )
    return MeasurementFamily(PAULI, bases)


def make_family(scheme, d):
    if scheme == MUB:
        return mub_family(d)
    if scheme == PAULI:
        return pauli_family(d)
    raise InvalidInputError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


def _real_vector(h):
    d = h.shape[0]
    iu = np.triu_indices(d, 1)
    return np.concatenate([np.diag(h).real, h[iu].real, h[iu].imag])


def is_informationally_complete(fam):
    """True iff the projectors of ``fam`` span all ``d x d`` Hermitian matrices."""
    bases = fam.bases if isinstance(fam, MeasurementFamily) else tuple(fam)
    d = bases[0].dim
    rows = [_real_vector(p) for b in bases for p in b.projectors()]
    return int(np.linalg.matrix_rank(np.array(rows), tol=1e-9)) == d * d
