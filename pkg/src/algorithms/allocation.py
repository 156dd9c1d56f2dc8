"""
Enumeration of message-allocation schemes.

Private subchannels have a fixed role: receiver-only subchannels always
carry the confidential message and eavesdropper-only subchannels are
discarded. Common subchannels where the eavesdropper is at least as
strong can only carry the multicast message. The remaining common
subchannels are free, and every way of splitting them between the two
messages is one scheme.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, Iterator, Tuple

from ..errors import IndexOutOfRange
from .gsvd import TIE_TOL, GsvdFactors, SubchannelPartition
from .rates import MessageAllocation

logger = logging.getLogger(__name__)

RULE_RECEIVER_PRIVATE = "receiver_private_to_confidential"
RULE_EAVESDROPPER_PRIVATE = "eavesdropper_private_discarded"
RULE_WEAK_COMMON = "weak_common_to_multicast"
RULE_FREE_CONFIDENTIAL = "free_common_to_confidential"
RULE_FREE_MULTICAST = "free_common_to_multicast"


@dataclass(frozen=True)
class SchemeSet:
    """
    Ordered list of allocation schemes.

    ``ids`` are stable identifiers assigned at enumeration and survive
    removals; ``provenance`` maps each subchannel of a scheme to the rule
    that placed it.
    """

    schemes: Tuple[MessageAllocation, ...]
    ids: Tuple[int, ...]
    provenance: Tuple[Dict[int, str], ...]

    def __len__(self) -> int:
        return len(self.schemes)

    def __iter__(self) -> Iterator[Tuple[int, MessageAllocation]]:
        return iter(zip(self.ids, self.schemes))

    @property
    def is_empty(self) -> bool:
        return not self.schemes

    def position_of(self, scheme_id: int) -> int:
        try:
            return self.ids.index(scheme_id)
        except ValueError:
            raise IndexOutOfRange(f"scheme id {scheme_id} is not in the set") from None

    def by_id(self, scheme_id: int) -> MessageAllocation:
        return self.schemes[self.position_of(scheme_id)]


def free_subchannels(f: GsvdFactors, part: SubchannelPartition) -> Tuple[int, ...]:
    """Common subchannels where the authorized receiver is strictly stronger."""
    c_sq, d_sq = f.c_sq, f.d_sq
    return tuple(i for i in part.cc if c_sq[i] - d_sq[i] > TIE_TOL)


def enumerate_schemes(f: GsvdFactors, part: SubchannelPartition) -> SchemeSet:
    """
    List every allocation of the free common subchannels.

    Scheme k assigns free subchannel j (in ascending index order) to the
    confidential message when bit j of k is set, otherwise to the
    multicast message. The set therefore has 2^F schemes for F free
    subchannels.

    Args:
        f: Decomposition result
        part: Subchannel partition of ``f``

    Returns:
        SchemeSet with ids 0..2^F - 1
    """
    free = free_subchannels(f, part)
    weak = tuple(i for i in part.cc if i not in free)

    schemes, provenance = [], []
    for mask in range(2 ** len(free)):
        rules = {i: RULE_RECEIVER_PRIVATE for i in part.pc1}
        rules.update({i: RULE_EAVESDROPPER_PRIVATE for i in part.pc2})
        rules.update({i: RULE_WEAK_COMMON for i in weak})
        to_conf = [i for bit, i in enumerate(free) if mask >> bit & 1]
        to_mult = [i for bit, i in enumerate(free) if not mask >> bit & 1]
        rules.update({i: RULE_FREE_CONFIDENTIAL for i in to_conf})
        rules.update({i: RULE_FREE_MULTICAST for i in to_mult})

        alloc = MessageAllocation(
            gamma0=tuple(sorted(weak + tuple(to_mult))),
            gammac=tuple(sorted(part.pc1 + tuple(to_conf))),
            discarded=tuple(part.pc2),
        )
        alloc.validate(f.q)
        schemes.append(alloc)
        provenance.append(rules)

    logger.debug("enumerated %d schemes over %d free subchannels", len(schemes), len(free))
    return SchemeSet(
        schemes=tuple(schemes),
        ids=tuple(range(len(schemes))),
        provenance=tuple(provenance),
    )


def remove_scheme(schemes: SchemeSet, k: int) -> SchemeSet:
    """
    Drop the scheme at position ``k``; remaining schemes keep their order and ids.

    Raises:
        IndexOutOfRange: If ``k`` is not a valid position
    """
    if not 0 <= k < len(schemes):
        raise IndexOutOfRange(f"scheme position {k} out of range for {len(schemes)} schemes")
    keep = [i for i in range(len(schemes)) if i != k]
    return replace(
        schemes,
        schemes=tuple(schemes.schemes[i] for i in keep),
        ids=tuple(schemes.ids[i] for i in keep),
        provenance=tuple(schemes.provenance[i] for i in keep),
    )


def confidential_only(f: GsvdFactors, part: SubchannelPartition) -> MessageAllocation:
    """Allocation that carries no multicast traffic: every useful subchannel is confidential."""
    free = free_subchannels(f, part)
    gammac = tuple(sorted(part.pc1 + free))
    discarded = tuple(sorted(i for i in range(f.q) if i not in gammac))
    return MessageAllocation(gamma0=(), gammac=gammac, discarded=discarded)


def multicast_only(part: SubchannelPartition) -> MessageAllocation:
    """Allocation that spends every common subchannel on the multicast message."""
    return MessageAllocation(
        gamma0=tuple(part.cc),
        gammac=(),
        discarded=tuple(sorted(part.pc1 + part.pc2)),
    )
