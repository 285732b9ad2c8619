"""Phase-free Pauli operators and Clifford gates as binary symplectic tableaux.

Paulis are stored as a pair of packed bitsets (Python ints): bit ``q`` of
``x_bits`` / ``z_bits`` is the X / Z component on qubit ``q`` (0-based).
Signs and phases are never represented; everything this package computes
(commutators, outcome flips, syndromes) is insensitive to them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DimensionError, ValidationError

# 2-bit single-qubit code: bit 0 = X component, bit 1 = Z component.
LETTER_TO_CODE = {"I": 0, "X": 1, "Z": 2, "Y": 3}
CODE_TO_LETTER = "IXZY"


def parity(v: int) -> int:
    return v.bit_count() & 1


@dataclass(frozen=True)
class PauliOperator:
    """A Pauli operator on ``num_qubits`` qubits modulo phases."""

    num_qubits: int
    x_bits: int = 0
    z_bits: int = 0

    def __post_init__(self):
        if self.num_qubits < 0:
            raise DimensionError("num_qubits must be non-negative")
        limit = 1 << self.num_qubits
        if not (0 <= self.x_bits < limit and 0 <= self.z_bits < limit):
            raise DimensionError(
                f"bitsets do not fit in {self.num_qubits} qubits")

    @classmethod
    def identity(cls, num_qubits: int) -> PauliOperator:
        return cls(num_qubits)

    @classmethod
    def single(cls, num_qubits: int, qubit: int, letter: str) -> PauliOperator:
        """``letter`` on 0-based ``qubit``, identity elsewhere."""
        if not 0 <= qubit < num_qubits:
            raise DimensionError(f"qubit {qubit} out of range for {num_qubits} qubits")
        code = LETTER_TO_CODE[letter.upper()]
        return cls(num_qubits, (code & 1) << qubit, (code >> 1) << qubit)

    @classmethod
    def from_letters(cls, letters: str) -> PauliOperator:
        """Dense form, e.g. ``"XIZY"`` (``_`` is accepted for identity)."""
        x = z = 0
        for q, ch in enumerate(letters):
            code = LETTER_TO_CODE["I" if ch == "_" else ch.upper()]
            x |= (code & 1) << q
            z |= (code >> 1) << q
        return cls(len(letters), x, z)

    @classmethod
    def from_sparse(cls, num_qubits: int, terms: Iterable[tuple[int, str]]) -> PauliOperator:
        """Build from ``(qubit, letter)`` pairs with 0-based qubits; repeats multiply."""
        x = z = 0
        for q, letter in terms:
            if not 0 <= q < num_qubits:
                raise DimensionError(f"qubit {q} out of range for {num_qubits} qubits")
            code = LETTER_TO_CODE[letter.upper()]
            x ^= (code & 1) << q
            z ^= (code >> 1) << q
        return cls(num_qubits, x, z)

    @property
    def support_mask(self) -> int:
        return self.x_bits | self.z_bits

    @property
    def weight(self) -> int:
        return self.support_mask.bit_count()

    def is_identity(self) -> bool:
        return not (self.x_bits or self.z_bits)

    def letter(self, qubit: int) -> str:
        return CODE_TO_LETTER[((self.x_bits >> qubit) & 1) | (((self.z_bits >> qubit) & 1) << 1)]

    def support(self) -> list[int]:
        m = self.support_mask
        return [q for q in range(self.num_qubits) if (m >> q) & 1]

    def x_vector(self) -> tuple[int, ...]:
        return tuple((self.x_bits >> q) & 1 for q in range(self.num_qubits))

    def z_vector(self) -> tuple[int, ...]:
        return tuple((self.z_bits >> q) & 1 for q in range(self.num_qubits))

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)

    def __str__(self) -> str:
        return "".join(self.letter(q) for q in range(self.num_qubits))


def _check_sizes(a: PauliOperator, b: PauliOperator) -> None:
    if a.num_qubits != b.num_qubits:
        raise DimensionError(
            f"size mismatch: {a.num_qubits} vs {b.num_qubits} qubits")


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Group product in the phase quotient (componentwise XOR)."""
    _check_sizes(a, b)
    return PauliOperator(a.num_qubits, a.x_bits ^ b.x_bits, a.z_bits ^ b.z_bits)


def commutator(a: PauliOperator, b: PauliOperator) -> int:
    """Symplectic form: 0 if ``a`` and ``b`` commute, 1 if they anticommute."""
    _check_sizes(a, b)
    return parity((a.x_bits & b.z_bits) ^ (a.z_bits & b.x_bits))


@dataclass(frozen=True)
class CliffordTableau:
    """Phase-free Clifford on ``arity`` qubits.

    ``images`` holds the images of X_1..X_w followed by Z_1..Z_w, each a
    ``PauliOperator`` on ``arity`` qubits.
    """

    arity: int
    images: tuple[PauliOperator, ...]

    def __post_init__(self):
        if len(self.images) != 2 * self.arity:
            raise ValidationError(
                f"tableau of arity {self.arity} needs {2 * self.arity} images, got {len(self.images)}")
        for img in self.images:
            if img.num_qubits != self.arity:
                raise ValidationError("tableau image has the wrong number of qubits")

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> CliffordTableau:
        """Parse ``2w`` bit strings of length ``2w`` (x bits then z bits); validated."""
        if len(rows) % 2:
            raise ValidationError("tableau needs an even number of rows")
        w = len(rows) // 2
        images = []
        for row in rows:
            if len(row) != 2 * w or set(row) - {"0", "1"}:
                raise ValidationError(f"bad tableau row {row!r}")
            x = sum(int(ch) << q for q, ch in enumerate(row[:w]))
            z = sum(int(ch) << q for q, ch in enumerate(row[w:]))
            images.append(PauliOperator(w, x, z))
        tab = cls(w, tuple(images))
        tab.validate()
        return tab

    def rows(self) -> list[str]:
        return ["".join(str(b) for b in img.x_vector() + img.z_vector()) for img in self.images]

    def is_symplectic(self) -> bool:
        w = self.arity
        for i in range(2 * w):
            for j in range(i + 1, 2 * w):
                expected = 1 if j == i + w else 0
                if commutator(self.images[i], self.images[j]) != expected:
                    return False
        return True

    def validate(self) -> None:
        if not self.is_symplectic():
            raise ValidationError("tableau is not symplectic")

    def apply_local(self, x: int, z: int) -> tuple[int, int]:
        """Image of the local Pauli with bitsets ``(x, z)`` on the ``arity`` qubits."""
        w = self.arity
        ox = oz = 0
        for k in range(w):
            if (x >> k) & 1:
                img = self.images[k]
                ox ^= img.x_bits
                oz ^= img.z_bits
            if (z >> k) & 1:
                img = self.images[w + k]
                ox ^= img.x_bits
                oz ^= img.z_bits
        return ox, oz

    @cached_property
    def local_table(self) -> tuple[tuple[int, int], ...]:
        """Lookup ``index -> (x, z)`` with index = x | z << arity."""
        w = self.arity
        return tuple(self.apply_local(i & ((1 << w) - 1), i >> w) for i in range(1 << (2 * w)))

    def compose(self, first: CliffordTableau) -> CliffordTableau:
        """Tableau of applying ``first`` then ``self``."""
        if first.arity != self.arity:
            raise DimensionError("arity mismatch")
        return CliffordTableau(self.arity, tuple(
            PauliOperator(self.arity, *self.apply_local(img.x_bits, img.z_bits))
            for img in first.images))

    def __str__(self) -> str:
        return " ".join(self.rows())


def conjugate(tableau: CliffordTableau, p: PauliOperator, support: Sequence[int]) -> PauliOperator:
    """Conjugate ``p`` by ``tableau`` acting on the 0-based qubits ``support``."""
    w = tableau.arity
    if len(support) != w:
        raise ValidationError(f"support has {len(support)} qubits, tableau has arity {w}")
    if len(set(support)) != w:
        raise ValidationError(f"duplicate qubit in support {tuple(support)}")
    for q in support:
        if not 0 <= q < p.num_qubits:
            raise ValidationError(f"support qubit {q} out of range for {p.num_qubits} qubits")
    lx = lz = 0
    mask = 0
    for k, q in enumerate(support):
        lx |= ((p.x_bits >> q) & 1) << k
        lz |= ((p.z_bits >> q) & 1) << k
        mask |= 1 << q
    ox, oz = tableau.apply_local(lx, lz)
    x = p.x_bits & ~mask
    z = p.z_bits & ~mask
    for k, q in enumerate(support):
        x |= ((ox >> k) & 1) << q
        z |= ((oz >> k) & 1) << q
    return PauliOperator(p.num_qubits, x, z)


def invert(tableau: CliffordTableau) -> CliffordTableau:
    """Group inverse of a symplectic tableau.

    For symplectic images r_i, the preimage of a basis element e_k is
    sum_j [r_partner(j), e_k] e_j where partner swaps X_q and Z_q.
    """
    tableau.validate()
    w = tableau.arity
    imgs = tableau.images
    out = []
    for k in range(2 * w):
        ek = PauliOperator(w, 1 << k, 0) if k < w else PauliOperator(w, 0, 1 << (k - w))
        x = z = 0
        for j in range(2 * w):
            partner = j + w if j < w else j - w
            if commutator(imgs[partner], ek):
                if j < w:
                    x |= 1 << j
                else:
                    z |= 1 << (j - w)
        out.append(PauliOperator(w, x, z))
    return CliffordTableau(w, tuple(out))


def identity_tableau(arity: int) -> CliffordTableau:
    return CliffordTableau(arity, tuple(
        [PauliOperator(arity, 1 << q, 0) for q in range(arity)]
        + [PauliOperator(arity, 0, 1 << q) for q in range(arity)]))


def _tab(*letters: str) -> CliffordTableau:
    return CliffordTableau(len(letters[0]), tuple(PauliOperator.from_letters(s) for s in letters))


# Images listed as X_1..X_w, Z_1..Z_w. Pauli gates and S/S-dagger differ from
# their partners only by signs, so they share tableaux.
NAMED_GATES: dict[str, CliffordTableau] = {
    "H": _tab("Z", "X"),
    "S": _tab("Y", "Z"),
    "SDG": _tab("Y", "Z"),
    "X": identity_tableau(1),
    "Y": identity_tableau(1),
    "Z": identity_tableau(1),
    "CX": _tab("XX", "IX", "ZI", "ZZ"),
    "CZ": _tab("XZ", "ZX", "ZI", "IZ"),
    "SWAP": _tab("IX", "XI", "IZ", "ZI"),
}

GATE_ARITY = {name: tab.arity for name, tab in NAMED_GATES.items()}
