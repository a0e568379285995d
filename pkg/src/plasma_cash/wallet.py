"""Client-side coin management and root-chain watching.

A wallet stores a verified history for every coin it owns, signs outgoing
transfers, audits incoming histories before accepting them, and scans the
root-chain event log to challenge fraudulent exits of its coins.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

from .core import Address, IncludedTx, Keyring, Signer, Transaction
from .errors import NotOwned, PlasmaError
from .history import (
    CoinHistory,
    RootView,
    Verdict,
    WitnessSource,
    extend_history,
    valid_tip,
    verify_history,
)
from .rootchain import PlasmaContract
from .smt import SmtConfig


@dataclass
class WalletPolicy:
    auto_challenge: bool = True


@dataclass
class ChallengeAction:
    """One attempted challenge, with its outcome."""

    kind: str  # "after" | "between" | "before"
    slot: int
    ok: bool
    error: Optional[str] = None


class Wallet:
    def __init__(
        self,
        signer: Signer,
        keyring: Keyring,
        contract: PlasmaContract,
        policy: Optional[WalletPolicy] = None,
    ):
        self.signer = signer
        self.keyring = keyring
        self.contract = contract
        self.config: SmtConfig = contract.config
        self.policy = policy or WalletPolicy()
        self.coins: Dict[int, CoinHistory] = {}
        self._event_cursor = 0
        self._before_challenged: set = set()

    @property
    def address(self) -> Address:
        return self.signer.address

    # -- ownership bookkeeping --

    def owns(self, slot: int) -> bool:
        return slot in self.coins

    def register_deposit(self, slot: int, deposit_block: int, itx: IncludedTx):
        """Record a coin this wallet just deposited on the root chain."""
        self.coins[slot] = CoinHistory(
            slot=slot, deposit_block=deposit_block, incl={deposit_block: itx}
        )

    def last_inclusion(self, slot: int) -> IncludedTx:
        """Last inclusion on the coin's valid ownership chain; fraudulent
        inclusions picked up while syncing are skipped."""
        if slot not in self.coins:
            raise NotOwned(f"slot {slot}")
        return valid_tip(self.coins[slot], self.keyring)

    def sync(self, slot: int, witness: WitnessSource, view: Optional[RootView] = None):
        """Pull witnesses for any committed blocks the stored history lacks.
        Propagates WitnessUnavailable if the operator withholds data."""
        if slot not in self.coins:
            raise NotOwned(f"slot {slot}")
        extend_history(self.coins[slot], view or self.contract.root_view(), witness)

    def release(self, slot: int) -> CoinHistory:
        """Hand the coin's history over after a transfer is included."""
        if slot not in self.coins:
            raise NotOwned(f"slot {slot}")
        return self.coins.pop(slot)

    # -- transfers --

    def send_coin(self, slot: int, new_owner: Address) -> Transaction:
        if slot not in self.coins:
            raise NotOwned(f"slot {slot}")
        parent = self.last_inclusion(slot)
        tx = Transaction(slot=slot, parent_block=parent.blk_number, new_owner=new_owner)
        return Transaction(
            slot=tx.slot,
            parent_block=tx.parent_block,
            new_owner=tx.new_owner,
            signature=Keyring.sign(self.signer, tx.hash()),
        )

    def receive_coin(self, history: CoinHistory, view: RootView) -> Verdict:
        """Audit an incoming coin; store the history only when it is valid,
        ends at this wallet, and contains no earlier same-parent spend."""
        coin = self.contract.coins.get(history.slot)
        if coin is None:
            return Verdict(False, None, "coin unknown to the root chain")
        deposit_owner = self._depositor(history.slot)
        verdict = verify_history(history, view, deposit_owner, self.keyring, self.config)
        if not verdict:
            return verdict
        last = history.last_inclusion()
        if last.tx.new_owner != self.address:
            return Verdict(False, None, "history does not end at this wallet")
        # earliest-owner rule: among same-parent spends, only the first is
        # acceptable (a verified partitioned history cannot contain a later
        # sibling, but the check guards histories assembled elsewhere)
        by_parent: Dict[int, List[IncludedTx]] = {}
        for itx in history.incl.values():
            if not itx.tx.is_deposit:
                by_parent.setdefault(itx.tx.parent_block, []).append(itx)
        for siblings in by_parent.values():
            earliest = min(siblings, key=lambda i: i.blk_number)
            if last in siblings and earliest is not last:
                return Verdict(False, None, "a same-parent earlier spend exists")
        self.coins[history.slot] = history
        return Verdict(True)

    def _depositor(self, slot: int) -> Address:
        """Depositor recorded at minting, which survives later ownership
        changes on the coin record."""
        return self.contract.coins[slot].depositor

    # -- watching and challenging --

    def watch_and_challenge(self) -> List[ChallengeAction]:
        """Scan new root-chain events; challenge any active exit of a coin
        this wallet owns.  Non-interactive moves are preferred over the
        bonded interactive one."""
        actions: List[ChallengeAction] = []
        events = self.contract.events[self._event_cursor:]
        self._event_cursor = len(self.contract.events)
        if not self.policy.auto_challenge:
            return actions
        for event in events:
            if event.kind != "ExitStarted":
                continue
            slot = event.data["slot"]
            if not self.owns(slot):
                continue
            ex = self.contract.exits.get(slot)
            if ex is None or ex.exitor == self.address:
                continue
            action = self._challenge_exit(slot, ex)
            if action is not None:
                actions.append(action)
        return actions

    def _challenge_exit(self, slot: int, ex) -> Optional[ChallengeAction]:
        history = self.coins[slot]
        exit_block = ex.exit_block
        parent_block = ex.parent_block

        # a direct spend of the exit tx cancels it outright
        after = self._find_spend(history, parent=exit_block, signer=ex.exitor, lo=exit_block)
        if after is not None:
            return self._attempt(
                "after", slot, lambda: self.contract.challenge_after(self.address, slot, after)
            )
        # a same-parent spend strictly between parent and exit proves a double spend
        if parent_block is not None:
            between = self._find_spend(
                history,
                parent=parent_block,
                signer=ex.parent_tx.tx.new_owner,
                lo=parent_block,
                hi=exit_block,
            )
            if between is not None:
                return self._attempt(
                    "between",
                    slot,
                    lambda: self.contract.challenge_between(self.address, slot, between),
                )
        # otherwise stake a bonded claim that the coin's history is invalid
        mine = self.last_inclusion(slot)
        boundary = parent_block if parent_block is not None else exit_block
        if mine.blk_number < boundary and slot not in self._before_challenged:
            self._before_challenged.add(slot)
            return self._attempt(
                "before",
                slot,
                lambda: self.contract.challenge_before(
                    self.address, slot, mine, self.contract.params.bond_amount
                ),
            )
        return None

    def _find_spend(self, history, parent: int, signer: Address, lo: int, hi=None):
        """Inclusion in the stored history spending ``parent`` and signed by
        ``signer``, with block number in (lo, hi)."""
        from .errors import MalformedSignature

        for itx in sorted(history.incl.values(), key=lambda i: i.blk_number):
            if itx.tx is None or itx.tx.is_deposit or itx.tx.parent_block != parent:
                continue
            if itx.blk_number <= lo or (hi is not None and itx.blk_number >= hi):
                continue
            try:
                if self.keyring.recover(itx.tx.hash(), itx.tx.signature) != signer:
                    continue
            except MalformedSignature:
                continue
            return itx
        return None

    def _attempt(self, kind: str, slot: int, op) -> ChallengeAction:
        try:
            op()
            return ChallengeAction(kind=kind, slot=slot, ok=True)
        except PlasmaError as exc:
            return ChallengeAction(kind=kind, slot=slot, ok=False, error=exc.code)
