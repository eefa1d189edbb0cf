"""Set partitions of {1, ..., n}: the lattice join, Moebius inversion on
intervals, and classical joint cumulants obtained from a moment oracle.

Partitions are stored canonically (elements sorted inside each block,
blocks sorted by their minima) so that equality and hashing behave.
"""

from __future__ import annotations

import dataclasses
import functools
import itertools
import math
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .caps import check_cap
from .permutations import Permutation


@dataclasses.dataclass(frozen=True)
class SetPartition:
    """A partition of {1, ..., n} into disjoint non-empty blocks.

    >>> SetPartition.from_blocks(4, [(3, 4), (2, 1)]).blocks
    ((1, 2), (3, 4))
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        covered = sorted(a for block in self.blocks for a in block)
        if covered != list(range(1, self.n + 1)):
            raise ValueError(f"blocks do not partition [1,{self.n}]: {self.blocks}")
        for block in self.blocks:
            if not block or list(block) != sorted(block):
                raise ValueError(f"non-canonical block {block}")
        if list(self.blocks) != sorted(self.blocks, key=lambda b: b[0]):
            raise ValueError("blocks not sorted by minima")

    @staticmethod
    def from_blocks(n: int, blocks: Iterable[Iterable[int]]) -> "SetPartition":
        canon = tuple(sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0] if b else 0))
        return SetPartition(n, canon)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    def norm(self) -> int:
        """n minus the number of blocks; the partition analogue of length."""
        return self.n - self.num_blocks

    def block_of(self, a: int) -> tuple[int, ...]:
        for block in self.blocks:
            if a in block:
                return block
        raise ValueError(f"{a} not in [1,{self.n}]")

    def as_labels(self) -> tuple[int, ...]:
        """Block index of each point, e.g. (0, 0, 1) for {{1,2},{3}}."""
        label = [0] * self.n
        for k, block in enumerate(self.blocks):
            for a in block:
                label[a - 1] = k
        return tuple(label)

    def to_json(self) -> dict:
        return {"n": self.n, "blocks": [list(b) for b in self.blocks]}


def from_json(data: dict) -> SetPartition:
    return SetPartition.from_blocks(data["n"], data["blocks"])


def singletons(n: int) -> SetPartition:
    """The discrete partition, bottom of the lattice."""
    return SetPartition.from_blocks(n, [(i,) for i in range(1, n + 1)])


def one_block(n: int) -> SetPartition:
    """The full partition 1_n, top of the lattice."""
    return SetPartition.from_blocks(n, [tuple(range(1, n + 1))])


def two_block_split(m: int, n: int) -> SetPartition:
    """The partition of [1, m+n] into the front interval [1,m] and the rest."""
    return SetPartition.from_blocks(
        m + n, [tuple(range(1, m + 1)), tuple(range(m + 1, m + n + 1))]
    )


def leq(a: SetPartition, b: SetPartition) -> bool:
    """True iff a refines b (every a-block sits inside some b-block)."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")
    labels = b.as_labels()
    return all(len({labels[x - 1] for x in block}) == 1 for block in a.blocks)


def join(a: SetPartition, b: SetPartition) -> SetPartition:
    """Least upper bound in the partition lattice, by union-find closure.

    >>> j = join(SetPartition.from_blocks(4, [(1, 2), (3, 4)]),
    ...          SetPartition.from_blocks(4, [(2, 3), (1,), (4,)]))
    >>> j.blocks
    ((1, 2, 3, 4),)
    """
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} vs {b.n}")
    parent = list(range(a.n + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[ry] = rx

    for part in (a, b):
        for block in part.blocks:
            for x, y in zip(block, block[1:]):
                union(x, y)
    groups: dict[int, list[int]] = {}
    for x in range(1, a.n + 1):
        groups.setdefault(find(x), []).append(x)
    return SetPartition.from_blocks(a.n, groups.values())


def is_pi_invariant(a: SetPartition, p: Permutation) -> bool:
    """True iff p maps every block of a onto itself."""
    if a.n != p.size:
        raise ValueError(f"size mismatch: {a.n} vs {p.size}")
    labels = a.as_labels()
    return all(labels[p(i) - 1] == labels[i - 1] for i in range(1, a.n + 1))


def orbit_partition(p: Permutation) -> SetPartition:
    """The cycles of p, viewed as a partition."""
    return SetPartition.from_blocks(p.size, p.cycles())


def augmented_norm(a: SetPartition, p: Permutation) -> int:
    """2*norm(a) - length(p) for a p-invariant partition a.

    This combined weight is what makes the two-variable triangle
    inequality work; it is only defined on invariant partitions.
    """
    if not is_pi_invariant(a, p):
        raise ValueError("partition is not invariant under the permutation")
    return 2 * a.norm() - p.length()


def mobius_to_top(c: SetPartition) -> int:
    """Moebius value of the interval from c to the one-block partition.

    Equals (-1)**(k-1) * (k-1)! where k is the number of blocks of c.
    """
    k = c.num_blocks
    return (-1) ** (k - 1) * math.factorial(k - 1)


def enumerate_partitions(n: int) -> Iterator[SetPartition]:
    """All partitions of [1,n] (Bell(n) of them), via restricted growth strings.

    >>> sum(1 for _ in enumerate_partitions(3))
    5
    """
    check_cap("PARTITION_CAP", n, f"enumerating all partitions of [1,{n}]")
    if n == 0:
        yield SetPartition(0, ())
        return
    for labels in _restricted_growth(n):
        blocks: dict[int, list[int]] = {}
        for i, lab in enumerate(labels, start=1):
            blocks.setdefault(lab, []).append(i)
        yield SetPartition.from_blocks(n, blocks.values())


def _restricted_growth(n: int) -> Iterator[tuple[int, ...]]:
    labels = [0] * n

    def rec(i: int, maxlab: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(labels)
            return
        for lab in range(maxlab + 2):
            labels[i] = lab
            yield from rec(i + 1, max(maxlab, lab))

    yield from rec(1, 0) if n > 0 else iter(())


def enumerate_pi_invariant(p: Permutation) -> Iterator[SetPartition]:
    """All p-invariant partitions, one per partition of the cycle set of p.

    A block of an invariant partition is a union of whole cycles, so
    invariant partitions of [1,n] correspond bijectively to set
    partitions of the cycles; we enumerate those (never all of P(n)).

    >>> from .permutations import from_cycles
    >>> len(list(enumerate_pi_invariant(from_cycles(3, [(1, 2, 3)]))))
    1
    """
    cycles = p.cycles()
    check_cap("PARTITION_CAP", len(cycles), "enumerating invariant partitions")
    for grouping in enumerate_partitions(len(cycles)):
        blocks = [
            tuple(sorted(a for ci in group for a in cycles[ci - 1]))
            for group in grouping.blocks
        ]
        yield SetPartition.from_blocks(p.size, blocks)


def interval_partitions(c: SetPartition, a: SetPartition) -> Iterator[SetPartition]:
    """All d with c <= d <= a, enumerated blockwise inside each a-block."""
    if not leq(c, a):
        raise ValueError("lower partition does not refine the upper one")
    per_block: list[list[list[tuple[int, ...]]]] = []
    for block in a.blocks:
        sub = [cb for cb in c.blocks if cb[0] in block]
        choices = []
        for grouping in enumerate_partitions(len(sub)):
            choices.append(
                [tuple(sorted(x for i in g for x in sub[i - 1])) for g in grouping.blocks]
            )
        per_block.append(choices)
    for combo in itertools.product(*per_block):
        yield SetPartition.from_blocks(a.n, [b for part in combo for b in part])


def _interval_profile(c: SetPartition, a: SetPartition) -> tuple[int, ...]:
    """How many c-blocks each a-block contains, as a sorted tuple."""
    labels = a.as_labels()
    counts: dict[int, int] = {}
    for block in c.blocks:
        lab = labels[block[0] - 1]
        counts[lab] = counts.get(lab, 0) + 1
    return tuple(sorted(counts.values()))


@functools.lru_cache(maxsize=None)
def _mobius_profile(profile: tuple[int, ...]) -> int:
    # Defining recursion mu(bottom, top) = -sum over proper d of mu(bottom, d)
    # on the interval, which is a product of partition lattices P(k).  The
    # profile (the multiset of k's) determines the value, which keeps the
    # recursion polynomial in practice.
    if all(k == 1 for k in profile):
        return 1
    total = 0
    per_factor = [
        [_interval_profile(singletons(k), d) for d in enumerate_partitions(k)]
        for k in profile
    ]
    for combo in itertools.product(*per_factor):
        sub = tuple(sorted(x for prof in combo for x in prof))
        if all(k == 1 for k in sub):  # combo == top of the interval
            continue
        total += _mobius_profile(sub)
    return -total


def mobius_interval(c: SetPartition, a: SetPartition) -> int:
    """Moebius function of the interval [c, a] in the partition lattice.

    Computed by the defining recursion (mu(c,c) = 1 and the sum of mu
    over [c, d] vanishing for c < d), memoised on the interval profile.

    >>> mobius_interval(singletons(4), one_block(4))
    -6
    """
    if not leq(c, a):
        raise ValueError("lower partition does not refine the upper one")
    return _mobius_profile(_interval_profile(c, a))


MomentOracle = Callable[[tuple[int, ...]], Fraction]


def partitioned_moment(moment: MomentOracle, c: SetPartition) -> Fraction:
    """Product over blocks of the oracle moment of that block."""
    out = Fraction(1)
    for block in c.blocks:
        out *= moment(block)
    return out


def cumulant_from_moments(moment: MomentOracle, r: int):
    """Classical joint cumulant k_r(a_1, ..., a_r) by Moebius inversion.

    ``moment(indices)`` must return the expectation of the product of the
    observables with the given (sorted, 1-based) indices; it is called on
    every block of every partition of [1,r].
    """
    check_cap("MOMENT_CAP", r, f"cumulant of order {r}")
    total = None
    for c in enumerate_partitions(r):
        term = mobius_to_top(c) * partitioned_moment(moment, c)
        total = term if total is None else total + term
    return total


def joins_to_top_with(tau: SetPartition, marker: SetPartition) -> bool:
    """True iff tau joined with the marker partition is the one-block partition."""
    return join(tau, marker).num_blocks == 1
