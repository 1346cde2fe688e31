"""k-wise uniform hash families over GF(2^t) and the Meka-Zuckerman combiner.

A hash family [n] -> [p] (p a power of two) consists of all polynomials
of degree < k over GF(2^t) with 2^t > max(n, p); a member is evaluated
at the field element whose bit pattern is the domain point, and the low
log2(p) bits of the result are the output.  Interpolation makes the
family exactly k-wise uniform.  Sign vectors in {-1,+1}^n are the p = 2
case.  The combiner x = G(f, z^1..z^p) sets x_i = z^{f(i)}_i.
"""

from dataclasses import dataclass
import itertools
import math

import numpy as np

from .errors import (
    EnumerationLimitError,
    FieldSizeError,
    InvalidInputError,
    InvalidParameterError,
    UnsupportedDegreeError,
)

# lowest-weight irreducible polynomials over GF(2), bit-encoded with the
# leading x^t term; degrees 1..16 are re-verified by trial division at
# construction, higher degrees are trusted from the table
IRREDUCIBLE = {
    1: 0x3, 2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x83, 8: 0x11B,
    9: 0x203, 10: 0x409, 11: 0x805, 12: 0x1009, 13: 0x201B, 14: 0x4021,
    15: 0x8003, 16: 0x1002B, 17: 0x20009, 18: 0x40009, 19: 0x80027,
    20: 0x100009, 21: 0x200005, 22: 0x400003, 23: 0x800021, 24: 0x100001B,
    25: 0x2000009, 26: 0x400001B, 27: 0x8000027, 28: 0x10000003,
    29: 0x20000005, 30: 0x40000003, 31: 0x80000009, 32: 0x10000008D,
}

_TRIAL_DIVISION_MAX_DEGREE = 16


def _poly_mul(a, b):
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _poly_mod(a, modulus):
    dm = modulus.bit_length() - 1
    while a.bit_length() - 1 >= dm:
        a ^= modulus << (a.bit_length() - 1 - dm)
    return a


def _trial_division_irreducible(f):
    t = f.bit_length() - 1
    for g in range(2, 1 << (t // 2 + 1)):
        if g.bit_length() - 1 >= 1 and _poly_mod(f, g) == 0:
            return False
    return True


@dataclass(frozen=True)
class BinaryField:
    """GF(2^t) with a fixed tabulated modulus; elements are ints in [0, 2^t)."""

    t: int
    modulus: int

    @property
    def order(self):
        return 1 << self.t

    def mul(self, a, b):
        return _poly_mod(_poly_mul(a, b), self.modulus)

    def pow(self, a, e):
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, self.order - 2)


def make_field(t):
    """GF(2^t) for 1 <= t <= 32, with a deterministic tabulated modulus."""
    if t not in IRREDUCIBLE:
        raise UnsupportedDegreeError(f"no tabulated modulus for degree {t} (need 1..32)")
    modulus = IRREDUCIBLE[t]
    if t <= _TRIAL_DIVISION_MAX_DEGREE and not _trial_division_irreducible(modulus):
        raise UnsupportedDegreeError(f"tabulated modulus for degree {t} is reducible")
    return BinaryField(t=t, modulus=modulus)


def minimal_field(n, p):
    """Smallest tabulated field with 2^t > max(n, p)."""
    need = max(n, p)
    t = max(1, need.bit_length())
    if (1 << t) <= need:
        t += 1
    return make_field(t)


@dataclass(frozen=True)
class HashFamily:
    """All degree-(k-1) polynomials over `field`, truncated to log2(p) bits."""

    n: int
    p: int
    k: int
    field: BinaryField

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise InvalidParameterError("need n >= 1 and k >= 1")
        if self.p < 2 or self.p & (self.p - 1):
            raise InvalidParameterError(f"range size must be a power of 2 >= 2, got {self.p}")
        if self.field.order <= max(self.n, self.p):
            raise FieldSizeError(
                f"field 2^{self.field.t} too small for n={self.n}, p={self.p}"
            )

    @property
    def size(self):
        return 1 << (self.field.t * self.k)

    @property
    def out_bits(self):
        return self.p.bit_length() - 1

    def coefficients(self, index):
        """Member `index` as k field elements, constant term first."""
        if not 0 <= index < self.size:
            raise InvalidInputError(f"member index {index} out of range")
        mask = self.field.order - 1
        return tuple((index >> (j * self.field.t)) & mask for j in range(self.k))

    def evaluate(self, index, x):
        """f_index(x) in [p] for a domain point x in [0, n)."""
        if not 0 <= x < self.n:
            raise InvalidInputError(f"domain point {x} out of range [0, {self.n})")
        coeffs = self.coefficients(index)
        acc = 0
        for c in reversed(coeffs):
            acc = self.field.mul(acc, x) ^ c
        return acc & (self.p - 1)

    def table(self, index):
        """All n outputs of member `index` as a tuple."""
        return tuple(self.evaluate(index, x) for x in range(self.n))


def make_hash_family(n, p, k, field=None):
    """k-wise uniform hash family [n] -> [p]; field defaults to the minimal one."""
    if field is None:
        field = minimal_field(n, p)
    return HashFamily(n=n, p=p, k=k, field=field)


@dataclass(frozen=True)
class KWiseVectorFamily:
    """k-wise uniform sign vectors in {-1,+1}^n (range-2 hash family)."""

    hashes: HashFamily

    @property
    def n(self):
        return self.hashes.n

    @property
    def k(self):
        return self.hashes.k

    @property
    def size(self):
        return self.hashes.size

    def member(self, index):
        """Member `index` as an int8 array of +-1 (bit b -> (-1)^b)."""
        bits = self.hashes.table(index)
        return np.array([1 - 2 * b for b in bits], dtype=np.int8)


def make_kwise_vectors(n, k):
    return KWiseVectorFamily(make_hash_family(n, 2, k))


def mz_generate(f_table, blocks):
    """Combine p sign blocks: output coordinate i is blocks[f_table[i]][i]."""
    blocks = [np.asarray(b) for b in blocks]
    n = len(f_table)
    for b in blocks:
        if b.shape != (n,):
            raise InvalidInputError(f"block length {b.shape} != coordinate count {n}")
    if any(not 0 <= j < len(blocks) for j in f_table):
        raise InvalidInputError("hash output exceeds the number of blocks")
    out = np.empty(n, dtype=np.int8)
    for i, j in enumerate(f_table):
        out[i] = blocks[j][i]
    return out


@dataclass(frozen=True)
class SeedIndex:
    hash_index: int
    block_indices: tuple


_GOLDEN = 0.6180339887498949


def _lattice_multiplier(size, salt):
    """Odd golden-ratio lattice multiplier for a power-of-two component size."""
    frac = (_GOLDEN ** (salt + 1)) % 1.0
    return max(1, (int(size * frac) % size) | 1)


# cardinalities past this many bits are reported as inf instead of being
# materialized as integers (the block count p can reach 2^31)
_CARDINALITY_BIT_CAP = 4096


class SeedSpace:
    """Lexicographic enumeration of (f, z^1, ..., z^p) seed tuples.

    Iteration order is the hash index (major) followed by the block
    indices.  When `budget` is smaller than the cardinality, iteration
    yields a deterministic rank-1 lattice subsample instead: sample i
    takes component index (i * K_c) mod size_c with a fixed odd
    multiplier K_c per component.  A plain stride on the flat index
    would alias with the mixed-radix layout (all block indices 0);
    distinct multipliers keep every component equidistributed.

    For very large p the exact cardinality would not even fit in memory;
    it is then reported as inf, explicit SeedIndex tuples are
    unavailable, and samples must be read through lattice_sign.
    """

    def __init__(self, hashes, vectors, p, budget=None):
        self.hashes = hashes
        self.vectors = vectors
        self.p = int(p)
        bits = self.p * max(vectors.size.bit_length(), 1) + hashes.size.bit_length()
        if bits <= _CARDINALITY_BIT_CAP:
            self.cardinality = hashes.size * vectors.size**self.p
        else:
            self.cardinality = math.inf
        self.budget = budget
        self.budgeted = budget is not None and budget < self.cardinality

    @property
    def seeds_used(self):
        return self.budget if self.budgeted else self.cardinality

    def seed_at(self, flat_index):
        block_part, hash_index = (
            flat_index % self.vectors.size**self.p,
            flat_index // self.vectors.size**self.p,
        )
        blocks = []
        for _ in range(self.p):
            block_part, low = divmod(block_part, self.vectors.size)
            blocks.append(low)
        return SeedIndex(hash_index=hash_index, block_indices=tuple(reversed(blocks)))

    def _hash_multiplier(self):
        return _lattice_multiplier(self.hashes.size, 0)

    def _block_multiplier(self, j):
        return _lattice_multiplier(self.vectors.size, 1 + (j % 64))

    def subsample_at(self, i):
        """Lattice sample i as an explicit SeedIndex (small p only)."""
        hash_index = (i * self._hash_multiplier()) % self.hashes.size
        blocks = tuple(
            (i * self._block_multiplier(j) + j) % self.vectors.size
            for j in range(self.p)
        )
        return SeedIndex(hash_index=hash_index, block_indices=blocks)

    def lattice_sign(self, i, coord):
        """Sign of combiner output at `coord` for lattice sample i.

        Evaluates only the one block the coordinate routes to, so it
        works for any p; agrees with subsample_at + mz_generate.
        """
        hash_index = (i * self._hash_multiplier()) % self.hashes.size
        j = self.hashes.evaluate(hash_index, coord)
        z_index = (i * self._block_multiplier(j) + j) % self.vectors.size
        return 1 - 2 * self.vectors.hashes.evaluate(z_index, coord)

    def __iter__(self):
        if not self.budgeted:
            if self.cardinality is math.inf:
                raise EnumerationLimitError("seed space too large to enumerate")
            size = self.vectors.size
            for hash_index in range(self.hashes.size):
                for combo in itertools.product(range(size), repeat=self.p):
                    yield SeedIndex(hash_index=hash_index, block_indices=combo)
        else:
            for i in range(self.budget):
                yield self.subsample_at(i)

    def realize(self, seed):
        """(f table, list of sign blocks) for a SeedIndex."""
        f_table = self.hashes.table(seed.hash_index)
        blocks = [self.vectors.member(j) for j in seed.block_indices]
        return f_table, blocks


def seed_space(hashes, vectors, p, budget=None):
    return SeedSpace(hashes, vectors, p, budget)


def sign_subspace_basis(vectors, coords):
    """GF(2) basis of the bit patterns the family takes on `coords`.

    A member's sign at coordinate c is (-1)^(bit_c), and bit_c is a
    GF(2)-linear function of the member index (field addition is xor and
    evaluation is linear in the polynomial coefficients).  The patterns
    on any coordinate subset therefore form a linear subspace, spanned
    by the patterns of the single-bit-index members; the family is
    uniform on that subspace.  Returns row-reduced masks, bit j of a
    mask corresponding to coords[j].
    """
    coords = list(coords)
    if any(not 0 <= c < vectors.n for c in coords):
        raise InvalidInputError(f"coordinates out of range [0, {vectors.n})")
    hashes = vectors.hashes
    masks = []
    for b in range(hashes.field.t * hashes.k):
        member = 1 << b
        mask = 0
        for j, c in enumerate(coords):
            mask |= hashes.evaluate(member, c) << j
        masks.append(mask)
    # Gaussian elimination over GF(2)
    basis = []
    for mask in masks:
        for row in basis:
            mask = min(mask, mask ^ row)
        if mask:
            basis.append(mask)
            basis.sort(reverse=True)
    return basis


def enumerate_subspace(basis_masks, width):
    """All 2^r subspace members as a sign matrix of shape (2^r, width)."""
    r = len(basis_masks)
    points = np.zeros(1 << r, dtype=np.int64)
    count = 1
    for mask in basis_masks:
        points[count : 2 * count] = points[:count] ^ mask
        count *= 2
    bits = (points[:, None] >> np.arange(width)[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def table_multiplicities(family, points):
    """Multiplicity of every output table a hash family takes on `points`.

    Returns {tuple of outputs: member count}; the counts sum to
    family.size.  Pairwise families (k = 2) use a closed form: the
    constant coefficient only contributes its low output bits, so the
    enumeration is 2^t * p instead of 2^2t.
    """
    points = list(points)
    tables = {}
    if family.k == 2:
        mask = family.p - 1
        base_mult = family.field.order // family.p
        for c1 in range(family.field.order):
            g = tuple(family.field.mul(c1, x) & mask for x in points)
            for c0m in range(family.p):
                tab = tuple(c0m ^ v for v in g)
                tables[tab] = tables.get(tab, 0) + base_mult
        return tables
    if family.size > (1 << 20):
        raise EnumerationLimitError(
            f"cannot enumerate hash family of size {family.size} for table counts"
        )
    for idx in range(family.size):
        tab = tuple(family.evaluate(idx, x) for x in points)
        tables[tab] = tables.get(tab, 0) + 1
    return tables


def exhaustive_marginal_counts(family, points):
    """Integer counts of every output tuple on `points` over the whole family.

    `family` may be a HashFamily or a KWiseVectorFamily (counted in hash
    outputs either way).  Exact k-wise uniformity at |points| <= k means
    every count equals size / p^|points|.
    """
    if isinstance(family, KWiseVectorFamily):
        hashes = family.hashes
    else:
        hashes = family
    counts = {}
    for idx in range(hashes.size):
        key = tuple(hashes.evaluate(idx, x) for x in points)
        counts[key] = counts.get(key, 0) + 1
    return counts


def is_exactly_kwise_uniform(family, k):
    """Exhaustively check k-wise uniformity with integer counts (no tolerance)."""
    hashes = family.hashes if isinstance(family, KWiseVectorFamily) else family
    expected, rem = divmod(hashes.size, hashes.p**k)
    if rem:
        return False
    tables = [hashes.table(idx) for idx in range(hashes.size)]
    for points in itertools.combinations(range(hashes.n), min(k, hashes.n)):
        counts = {}
        for table in tables:
            key = tuple(table[x] for x in points)
            counts[key] = counts.get(key, 0) + 1
        want = hashes.size // hashes.p ** len(points)
        if len(counts) != hashes.p ** len(points):
            return False
        if any(c != want for c in counts.values()):
            return False
    return True
