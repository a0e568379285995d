"""Building and verifying complete per-coin transfer histories.

A coin's history partitions every committed block since its deposit into
inclusions (the coin moved) and exclusions (proof the slot was empty).  The
verifier walks that partition: deposit first, then each spend must prove
inclusion, chain its parent link to the previous inclusion, and carry a
signature recovering to the previous owner; every other block must prove
the slot empty.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional

from . import smt
from .core import Address, IncludedTx, Keyring
from .errors import EmptyCandidates, MalformedSignature, MissingRoot
from .smt import SmtConfig


class Reason(Enum):
    """Machine-readable rejection reasons for history verification."""

    PARTITION_OVERLAP = "PartitionOverlap"
    PARTITION_GAP = "PartitionGap"
    BAD_DEPOSIT_PROOF = "BadDepositProof"
    BAD_INCLUSION_PROOF = "BadInclusionProof"
    BROKEN_PARENT_LINK = "BrokenParentLink"
    BAD_SIGNATURE = "BadSignature"
    BAD_EXCLUSION_PROOF = "BadExclusionProof"


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: Optional[Reason] = None
    detail: str = ""

    def __bool__(self):
        return self.accepted


ACCEPT = Verdict(True)


def reject(reason: Reason, detail: str = "") -> Verdict:
    return Verdict(False, reason, detail)


@dataclass
class RootView:
    """Read-only snapshot of the committed roots on the root chain."""

    roots: Dict[int, bytes]
    _blocks: Optional[List[int]] = field(default=None, repr=False, compare=False)

    @property
    def blocks(self) -> List[int]:
        if self._blocks is None:
            self._blocks = sorted(self.roots)
        return self._blocks

    @property
    def head(self) -> int:
        return max(self.roots) if self.roots else 0


@dataclass
class CoinHistory:
    """Everything a receiver needs to audit one coin since its deposit."""

    slot: int
    deposit_block: int
    incl: Dict[int, IncludedTx] = field(default_factory=dict)
    excl: Dict[int, IncludedTx] = field(default_factory=dict)

    def last_inclusion(self) -> IncludedTx:
        return self.incl[max(self.incl)]

    # -- canonical encodings (binary and JSON) --

    def encode(self, config: SmtConfig) -> bytes:
        out = [self.slot.to_bytes(8, "big"), self.deposit_block.to_bytes(8, "big")]
        for entries in (self.incl, self.excl):
            out.append(len(entries).to_bytes(4, "big"))
            for blk in sorted(entries):
                enc = entries[blk].encode(config)
                out.append(len(enc).to_bytes(4, "big"))
                out.append(enc)
        return b"".join(out)

    @classmethod
    def decode(cls, data: bytes, config: SmtConfig) -> "CoinHistory":
        slot = int.from_bytes(data[0:8], "big")
        deposit_block = int.from_bytes(data[8:16], "big")
        pos = 16
        maps = []
        for _ in range(2):
            count = int.from_bytes(data[pos:pos + 4], "big")
            pos += 4
            entries = {}
            for _ in range(count):
                n = int.from_bytes(data[pos:pos + 4], "big")
                pos += 4
                itx = IncludedTx.decode(data[pos:pos + n], config)
                pos += n
                entries[itx.blk_number] = itx
            maps.append(entries)
        return cls(slot, deposit_block, maps[0], maps[1])

    def to_json(self, config: SmtConfig) -> str:
        def enc(entries):
            return {str(b): itx.encode(config).hex() for b, itx in sorted(entries.items())}

        return json.dumps(
            {
                "slot": self.slot,
                "deposit_block": self.deposit_block,
                "incl": enc(self.incl),
                "excl": enc(self.excl),
            }
        )

    @classmethod
    def from_json(cls, s: str, config: SmtConfig) -> "CoinHistory":
        obj = json.loads(s)

        def dec(entries):
            return {
                int(b): IncludedTx.decode(bytes.fromhex(h), config)
                for b, h in entries.items()
            }

        return cls(obj["slot"], obj["deposit_block"], dec(obj["incl"]), dec(obj["excl"]))


def verify_history(
    history: CoinHistory,
    view: RootView,
    deposit_owner: Address,
    keyring: Keyring,
    config: SmtConfig,
) -> Verdict:
    """Audit a coin history against the committed roots.

    Returns ACCEPT or a reject verdict with a reason code.  A view that
    cannot cover the claimed blocks raises MissingRoot instead: the caller
    must distinguish "unverifiable" from "fraudulent".
    """
    slot = history.slot
    claimed = set(history.incl) | set(history.excl)
    for blk in claimed | {history.deposit_block}:
        if blk not in view.roots:
            raise MissingRoot(f"no committed root for block {blk}")

    overlap = set(history.incl) & set(history.excl)
    if overlap:
        return reject(Reason.PARTITION_OVERLAP, f"blocks {sorted(overlap)}")
    required = {b for b in view.roots if b >= history.deposit_block}
    if claimed != required:
        missing = sorted(required - claimed)
        extra = sorted(claimed - required)
        return reject(Reason.PARTITION_GAP, f"missing={missing} extra={extra}")

    # deposit transaction
    dep = history.incl.get(history.deposit_block)
    if dep is None or dep.tx is None:
        return reject(Reason.BAD_DEPOSIT_PROOF, "deposit block not an inclusion")
    if dep.tx.slot != slot or dep.tx.parent_block != 0:
        return reject(Reason.BAD_DEPOSIT_PROOF, "deposit tx malformed")
    if dep.tx.new_owner != deposit_owner:
        return reject(Reason.BAD_DEPOSIT_PROOF, "deposit owner mismatch")
    if not _check_proof(slot, dep, dep.tx.hash(), view, config):
        return reject(Reason.BAD_DEPOSIT_PROOF, "deposit proof invalid")

    last_block = history.deposit_block
    last_owner = deposit_owner

    for blk in sorted(history.incl):
        if blk == history.deposit_block:
            continue
        itx = history.incl[blk]
        if itx.tx is None or itx.tx.slot != slot or itx.blk_number != blk:
            return reject(Reason.BAD_INCLUSION_PROOF, f"block {blk}: malformed entry")
        if not _check_proof(slot, itx, itx.tx.hash(), view, config):
            return reject(Reason.BAD_INCLUSION_PROOF, f"block {blk}: proof invalid")
        # reject double spends: each spend must chain the previous inclusion
        if itx.tx.parent_block != last_block:
            return reject(
                Reason.BROKEN_PARENT_LINK,
                f"block {blk}: parent {itx.tx.parent_block} != last inclusion {last_block}",
            )
        # accept spends only with valid signatures
        try:
            sender = keyring.recover(itx.tx.hash(), itx.tx.signature)
        except MalformedSignature:
            return reject(Reason.BAD_SIGNATURE, f"block {blk}: malformed signature")
        if sender != last_owner:
            return reject(Reason.BAD_SIGNATURE, f"block {blk}: signer is not the owner")
        last_block = blk
        last_owner = itx.tx.new_owner

    for blk in sorted(history.excl):
        itx = history.excl[blk]
        if itx.tx is not None or itx.blk_number != blk:
            return reject(Reason.BAD_EXCLUSION_PROOF, f"block {blk}: not an exclusion")
        if not _check_proof(slot, itx, config.default_leaf, view, config):
            return reject(Reason.BAD_EXCLUSION_PROOF, f"block {blk}: proof invalid")

    return ACCEPT


def _check_proof(slot, itx: IncludedTx, leaf: bytes, view: RootView, config: SmtConfig) -> bool:
    try:
        proof = smt.as_full(itx.proof, config)
        return smt.verify(slot, leaf, proof, view.roots[itx.blk_number], config)
    except Exception:
        return False


WitnessSource = Callable[[int, int], IncludedTx]


def build_history(
    slot: int,
    deposit_block: int,
    view: RootView,
    witness: WitnessSource,
) -> CoinHistory:
    """Assemble the full history for a slot from a witness-data service.

    WitnessUnavailable from the source propagates: withheld data is never
    papered over.
    """
    history = CoinHistory(slot=slot, deposit_block=deposit_block)
    for blk in view.blocks:
        if blk < deposit_block:
            continue
        itx = witness(slot, blk)
        if itx.is_exclusion:
            history.excl[blk] = itx
        else:
            history.incl[blk] = itx
    return history


def extend_history(
    history: CoinHistory,
    view: RootView,
    witness: WitnessSource,
) -> CoinHistory:
    """Fill in witnesses for committed blocks the history does not cover yet.

    Histories always cover a contiguous block range, so only blocks past the
    highest covered one need fetching.
    """
    covered = set(history.incl) | set(history.excl)
    start = max(covered) if covered else history.deposit_block - 1
    blocks = view.blocks
    for blk in blocks[bisect.bisect_right(blocks, start):]:
        if blk < history.deposit_block or blk in covered:
            continue
        itx = witness(history.slot, blk)
        if itx.is_exclusion:
            history.excl[blk] = itx
        else:
            history.incl[blk] = itx
    return history


def valid_tip(history: CoinHistory, keyring: Keyring) -> IncludedTx:
    """Last inclusion on the coin's valid ownership chain.

    Walks from the deposit, at each step following only correctly signed
    children of the current tip; among same-parent siblings the earliest
    inclusion wins.  Fraudulent inclusions a wallet picked up while syncing
    (double spends, forged spends) are skipped, so the tip is what the
    wallet can legitimately spend or exit with.
    """
    tip = history.incl[history.deposit_block]
    owner = tip.tx.new_owner
    while True:
        candidates = []
        for itx in history.incl.values():
            if itx.tx is None or itx.tx.is_deposit:
                continue
            if itx.tx.parent_block != tip.blk_number or itx.blk_number <= tip.blk_number:
                continue
            try:
                if keyring.recover(itx.tx.hash(), itx.tx.signature) != owner:
                    continue
            except MalformedSignature:
                continue
            candidates.append(itx)
        if not candidates:
            return tip
        tip = earliest_owner_filter(candidates)
        owner = tip.tx.new_owner


def earliest_owner_filter(candidates: List[IncludedTx]) -> IncludedTx:
    """Among same-parent spends, the earliest inclusion is the real one;
    every later sibling is a double spend."""
    if not candidates:
        raise EmptyCandidates("no candidate transactions")
    return min(candidates, key=lambda itx: itx.blk_number)
