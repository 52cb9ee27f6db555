"""Level structures: the well-ordered stages a universe hierarchy is indexed by.

Three structures ship with the kernel. All of them share one encoding, a
``(block, offset)`` pair read as ``ω·block + offset``, and one lexicographic
order, so a single code path serves every structure:

    NAT               0 < 1 < 2 < ...
    OMEGA_PLUS_ONE    0 < 1 < 2 < ... < ω
    OMEGA_PLUS_OMEGA  0 < 1 < 2 < ... < ω < ω+1 < ω+2 < ...
"""
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from kernel import core


class StructureId(Enum):
    """The level structure a kernel session runs with."""

    NAT = "nat"
    OMEGA_PLUS_ONE = "omega1"
    OMEGA_PLUS_OMEGA = "omega-omega"

    @classmethod
    def from_flag(cls, flag: str) -> "StructureId":
        """
        Resolve a command-line spelling (``nat``, ``omega1``, ``omega-omega``).

        Args:
            flag: The value given to ``--levels`` or ``TTFL_LEVELS``

        Returns:
            The matching structure id

        Raises:
            ValueError: If the spelling is unknown
        """
        for member in cls:
            if member.value == flag:
                return member
        choices = ", ".join(member.value for member in cls)
        raise ValueError(f"unknown level structure '{flag}' (choose from {choices})")


class LevelError(ValueError):
    """A level outside its structure, or two levels from different structures."""


@dataclass(frozen=True)
class Level:
    """An element of a level structure, ``ω·block + offset``."""

    structure: StructureId
    block: int
    offset: int

    def __post_init__(self):
        if self.block < 0 or self.offset < 0:
            raise LevelError(f"negative level component ({self.block}, {self.offset})")
        if self.structure is StructureId.NAT and self.block != 0:
            raise LevelError("the nat structure has no transfinite levels")
        if self.block > 1:
            raise LevelError("levels stop below ω·2")
        if self.structure is StructureId.OMEGA_PLUS_ONE and self.block == 1 and self.offset != 0:
            raise LevelError("ω is the greatest level of omega1")

    @property
    def is_finite(self) -> bool:
        return self.block == 0

    def __str__(self) -> str:
        if self.block == 0:
            return str(self.offset)
        if self.structure is StructureId.OMEGA_PLUS_ONE:
            return "ω"
        return f"ω+{self.offset}"


@dataclass(frozen=True)
class LtEvidence:
    """
    Proof-irrelevant token recording that ``lower < upper`` holds.

    Tokens carry no derivation: two tokens for the same pair compare equal.
    """

    lower: Level
    upper: Level

    def compose(self, inner: "LtEvidence") -> "LtEvidence":
        """
        Compose ``self : j < k`` after ``inner : i < j`` into ``i < k``.

        Args:
            inner: Evidence whose upper level is this token's lower level

        Returns:
            Evidence for ``inner.lower < self.upper``
        """
        if inner.upper != self.lower:
            raise LevelError(f"cannot compose {self.lower} < {self.upper} after {inner.lower} < {inner.upper}")
        return LtEvidence(inner.lower, self.upper)


def _same_structure(i: Level, j: Level):
    if i.structure is not j.structure:
        raise LevelError(f"levels from different structures: {i.structure.value} and {j.structure.value}")


def rank(i: Level) -> Tuple[int, int]:
    """
    Embed a level into the lexicographic order on pairs of naturals.

    ``lt(i, j)`` holds exactly when ``rank(i) < rank(j)``, so every structure
    inherits well-foundedness from that order.
    """
    return (i.block, i.offset)


def lt(i: Level, j: Level) -> bool:
    """Decide ``i < j``."""
    _same_structure(i, j)
    return rank(i) < rank(j)


def sup(i: Level, j: Level) -> Level:
    """
    Least upper bound of two levels.

    Every shipped structure is trichotomous, so the supremum is the greater
    of the two.
    """
    _same_structure(i, j)
    return j if lt(i, j) else i


def lt_witness(i: Level, j: Level) -> Optional[LtEvidence]:
    """
    Manufacture evidence for ``i < j``.

    Returns:
        A token when the order holds, None otherwise
    """
    if lt(i, j):
        return LtEvidence(i, j)
    return None


class LevelStructure:
    """Structure-bound level operations: literals, successor, enumeration."""

    def __init__(self, structure_id: StructureId):
        """
        Initialize a level structure.

        Args:
            structure_id: Which of the shipped structures to expose
        """
        self.id = structure_id

    @property
    def has_omega(self) -> bool:
        return self.id is not StructureId.NAT

    @property
    def saturating(self) -> bool:
        """True when the successor of the greatest level is itself (omega1)."""
        return self.id is StructureId.OMEGA_PLUS_ONE

    def level(self, block: int, offset: int) -> Level:
        return Level(self.id, block, offset)

    def zero(self) -> Level:
        return Level(self.id, 0, 0)

    def fin(self, n: int) -> Level:
        return Level(self.id, 0, n)

    def omega(self) -> Level:
        if not self.has_omega:
            raise LevelError("ω is not a level of the nat structure")
        return Level(self.id, 1, 0)

    def succ(self, i: Level) -> Level:
        """Successor level; saturates at ω under omega1."""
        if self.saturating and i.block == 1:
            return i
        return Level(self.id, i.block, i.offset + 1)

    def above(self, i: Level) -> Optional[Level]:
        """The least level strictly above ``i``, or None at the top."""
        following = self.succ(i)
        return following if lt(i, following) else None

    def bootstrap(self) -> Tuple[Level, Level, LtEvidence]:
        """
        The bootstrapping data every structure provides.

        Returns:
            ``(l0, l1, evidence of l0 < l1)`` with ``l0 = 0`` and ``l1 = 1``
        """
        l0, l1 = self.fin(0), self.fin(1)
        return l0, l1, LtEvidence(l0, l1)

    def enumerate(self, bound: int = 10) -> List[Level]:
        """
        Every level of rank at most ``(1, bound)``, ascending.

        The nat structure stops at ``bound``; omega1 adds ω; omega-omega adds
        ``ω+0 .. ω+bound``.
        """
        levels = [self.fin(n) for n in range(bound + 1)]
        if self.id is StructureId.OMEGA_PLUS_ONE:
            levels.append(self.omega())
        elif self.id is StructureId.OMEGA_PLUS_OMEGA:
            levels.extend(Level(self.id, 1, n) for n in range(bound + 1))
        return levels

    def __repr__(self) -> str:
        return f"LevelStructure({self.id.value})"


_STRUCTURES: Dict[StructureId, LevelStructure] = {sid: LevelStructure(sid) for sid in StructureId}


def get_structure(structure_id: StructureId) -> LevelStructure:
    """Shared, immutable structure instance for an id."""
    return _STRUCTURES[structure_id]


def bootstrap(structure_id: StructureId) -> Tuple[Level, Level, LtEvidence]:
    return get_structure(structure_id).bootstrap()


def to_internal_nf(i: Level) -> core.Term:
    """
    Read a level back as the internal literal denoting it.

    Finite levels become ``lsuc`` chains over ``lzero``; the ω-block becomes
    ``lsuc`` chains over ``lomega``.
    """
    term: core.Term = core.LOmega() if i.block == 1 else core.LZero()
    for _ in range(i.offset):
        term = core.LSuc(term)
    return term
