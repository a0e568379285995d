"""Simulated main-chain settlement contract.

Holds deposited coin value and committed block roots, and arbitrates the
exit game: exits with bonds, the three challenge moves (a direct spend
after the exit, a same-parent spend between parent and exit, and bonded
interactive challenges from deeper history), finalization after a maturity
period, and withdrawal.

Every state change appends a structured event; the JSON-lines event log is
the interface wallet watchers consume.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

from . import smt
from .core import Address, IncludedTx, Keyring, make_deposit_tx, PlasmaBlock
from .errors import (
    BadProof,
    BadSignature,
    CoinNotExitable,
    InsufficientBalance,
    MalformedSignature,
    NoActiveExit,
    NoSuchChallenge,
    NotBefore,
    NotBetween,
    NotDirectSpend,
    NotDirectSpendOfChallenge,
    NotExited,
    NotMature,
    NotNewOwner,
    NotOperator,
    NotOwner,
    NotSameParent,
    ParentMismatch,
    UnknownCoin,
    WrongBond,
)
from .history import RootView
from .smt import SmtConfig


class CoinState(Enum):
    DEPOSITED = "DEPOSITED"
    EXITING = "EXITING"
    EXITED = "EXITED"
    WITHDRAWN = "WITHDRAWN"


@dataclass
class CoinRecord:
    slot: int
    owner: Address  # depositor, replaced by the exitor on successful exit
    depositor: Address  # fixed at minting; owner changes, this does not
    denomination: int
    state: CoinState
    deposit_block: int


@dataclass
class PendingChallenge:
    challenge_id: int
    challenger: Address
    tx: IncludedTx
    bond: int
    answered: bool = False


@dataclass
class Exit:
    slot: int
    exitor: Address
    parent_tx: Optional[IncludedTx]
    exit_tx: IncludedTx
    bond: int
    created_at: int
    challenges: List[PendingChallenge] = field(default_factory=list)

    @property
    def exit_block(self) -> int:
        return self.exit_tx.blk_number

    @property
    def parent_block(self) -> Optional[int]:
        return self.parent_tx.blk_number if self.parent_tx is not None else None


@dataclass(frozen=True)
class ChainParams:
    maturity_period: int = 20
    bond_amount: int = 100
    child_block_interval: int = 1000
    smt_depth: int = 64

    @property
    def smt_config(self) -> SmtConfig:
        return SmtConfig(depth=self.smt_depth)


@dataclass
class Event:
    kind: str
    data: dict

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, **self.data}, sort_keys=True)


def _itx_data(itx: IncludedTx, config: SmtConfig) -> dict:
    """Full witness payload for the event log (a challenge reveals it)."""
    return {
        "blk_number": itx.blk_number,
        "tx": itx.tx.encode().hex() if itx.tx is not None else None,
        "proof": smt.as_full(itx.proof, config).to_bytes().hex(),
    }


class PlasmaContract:
    """Single-owner state machine; all mutations go through its methods."""

    def __init__(
        self,
        operator: Address,
        keyring: Keyring,
        params: ChainParams = ChainParams(),
        initial_balances: Optional[Dict[Address, int]] = None,
    ):
        self.operator = operator
        self.keyring = keyring
        self.params = params
        self.config = params.smt_config
        self.roots: Dict[int, bytes] = {}
        self.current_block = 0
        self.coins: Dict[int, CoinRecord] = {}
        self.exits: Dict[int, Exit] = {}
        self.balances: Dict[Address, int] = dict(initial_balances or {})
        self.clock = 0
        self.value_escrow = 0
        self.bond_escrow = 0
        self.events: List[Event] = []
        self._next_slot = 0
        self._next_challenge_id = 0
        self._view: Optional[RootView] = None

    # -- plumbing --

    def _emit(self, kind: str, **data):
        self.events.append(Event(kind, data))

    def event_log_json(self) -> str:
        return "\n".join(e.to_json() for e in self.events)

    def balance_of(self, addr: Address) -> int:
        return self.balances.get(addr, 0)

    def _debit(self, addr: Address, amount: int):
        if self.balance_of(addr) < amount:
            raise InsufficientBalance(f"{addr} holds {self.balance_of(addr)}, needs {amount}")
        self.balances[addr] = self.balance_of(addr) - amount

    def _credit(self, addr: Address, amount: int):
        self.balances[addr] = self.balance_of(addr) + amount

    def total_value(self) -> int:
        """Conserved quantity: account balances plus both escrows."""
        return sum(self.balances.values()) + self.value_escrow + self.bond_escrow

    def root_view(self) -> RootView:
        # roots is append-only, so a stale copy is detected by length alone
        view = self._view
        if view is None or len(view.roots) != len(self.roots):
            view = self._view = RootView(roots=dict(self.roots))
        return view

    def advance_time(self, dt: int = 1):
        self.clock += dt

    @property
    def next_operator_block(self) -> int:
        interval = self.params.child_block_interval
        return (self.current_block // interval + 1) * interval

    def _verify_itx(self, slot: int, itx: IncludedTx) -> bool:
        root = self.roots.get(itx.blk_number)
        if root is None:
            return False
        leaf = self.config.default_leaf if itx.tx is None else itx.tx.hash()
        try:
            return smt.verify(slot, leaf, smt.as_full(itx.proof, self.config), root, self.config)
        except Exception:
            return False

    # -- deposits and block commitments --

    def deposit(self, depositor: Address, denomination: int):
        """Lock value, mint a coin, and append its one-transaction block."""
        if denomination <= 0:
            raise ValueError("denomination must be positive")
        self._debit(depositor, denomination)
        self.value_escrow += denomination

        slot = self._next_slot
        self._next_slot += 1
        number = self.current_block + 1
        if number % self.params.child_block_interval == 0:
            number += 1  # interval numbers belong to operator blocks
        self.current_block = number

        tx = make_deposit_tx(slot, depositor)
        block = PlasmaBlock.build(number, {slot: tx}, self.config)
        self.roots[number] = block.root
        self.coins[slot] = CoinRecord(
            slot=slot,
            owner=depositor,
            depositor=depositor,
            denomination=denomination,
            state=CoinState.DEPOSITED,
            deposit_block=number,
        )
        self._emit(
            "Deposit",
            slot=slot,
            depositor=depositor.hex,
            denomination=denomination,
            block=number,
        )
        return slot, number, block

    def submit_block(self, caller: Address, root: bytes) -> int:
        if caller != self.operator:
            raise NotOperator("only the registered operator commits roots")
        number = self.next_operator_block
        self.roots[number] = root
        self.current_block = number
        self._emit("BlockSubmitted", block=number, root=root.hex())
        return number

    # -- exits --

    def start_exit(
        self,
        caller: Address,
        slot: int,
        parent_tx: Optional[IncludedTx],
        exit_tx: IncludedTx,
        bond: int,
    ) -> int:
        coin = self.coins.get(slot)
        if coin is None:
            raise UnknownCoin(f"slot {slot}")
        if coin.state is not CoinState.DEPOSITED:
            raise CoinNotExitable(f"coin is {coin.state.value}")
        if bond != self.params.bond_amount:
            raise WrongBond(f"bond must be {self.params.bond_amount}")
        if exit_tx.tx is None or exit_tx.tx.slot != slot:
            raise BadProof("exit transaction missing or for another slot")
        if caller != exit_tx.tx.new_owner:
            raise NotNewOwner("only the recipient of the exit tx may exit")

        if parent_tx is None:
            # deposit-exit: the coin was never transferred
            if exit_tx.blk_number != coin.deposit_block or not exit_tx.tx.is_deposit:
                raise ParentMismatch("deposit-exit must use the deposit transaction")
            if not self._verify_itx(slot, exit_tx):
                raise BadProof("deposit inclusion proof invalid")
        else:
            if parent_tx.tx is None or parent_tx.tx.slot != slot:
                raise BadProof("parent transaction missing or for another slot")
            if exit_tx.tx.parent_block != parent_tx.blk_number:
                raise ParentMismatch(
                    f"exit tx parent {exit_tx.tx.parent_block} != parent block {parent_tx.blk_number}"
                )
            if exit_tx.blk_number <= parent_tx.blk_number:
                raise ParentMismatch("exit tx must come after its parent")
            if not self._verify_itx(slot, parent_tx):
                raise BadProof("parent inclusion proof invalid")
            if not self._verify_itx(slot, exit_tx):
                raise BadProof("exit inclusion proof invalid")
            try:
                signer = self.keyring.recover(exit_tx.tx.hash(), exit_tx.tx.signature)
            except MalformedSignature as exc:
                raise BadSignature(str(exc))
            if signer != parent_tx.tx.new_owner:
                raise BadSignature("exit tx not signed by the parent tx recipient")

        self._debit(caller, bond)
        self.bond_escrow += bond
        self.exits[slot] = Exit(
            slot=slot,
            exitor=caller,
            parent_tx=parent_tx,
            exit_tx=exit_tx,
            bond=bond,
            created_at=self.clock,
        )
        coin.state = CoinState.EXITING
        self._emit(
            "ExitStarted",
            slot=slot,
            exitor=caller.hex,
            exit_block=exit_tx.blk_number,
            parent_block=parent_tx.blk_number if parent_tx else None,
            bond=bond,
        )
        return slot

    def _active_exit(self, slot: int) -> Exit:
        ex = self.exits.get(slot)
        if ex is None:
            raise NoActiveExit(f"no active exit for slot {slot}")
        return ex

    def _cancel_exit(self, slot: int, beneficiary: Address, kind: str, revealed: IncludedTx):
        """Non-interactive challenge won: slash the exit bond, reopen the coin."""
        ex = self.exits.pop(slot)
        self.coins[slot].state = CoinState.DEPOSITED
        self.bond_escrow -= ex.bond
        self._credit(beneficiary, ex.bond)
        # pending interactive challenge bonds go back to their challengers
        for ch in ex.challenges:
            if not ch.answered:
                self.bond_escrow -= ch.bond
                self._credit(ch.challenger, ch.bond)
        self._emit(
            kind,
            slot=slot,
            challenger=beneficiary.hex,
            witness=_itx_data(revealed, self.config),
        )
        self._emit("ExitCancelled", slot=slot, exitor=ex.exitor.hex)

    def challenge_after(self, challenger: Address, slot: int, spend: IncludedTx):
        """Cancel an exit of a spent coin with a direct spend of the exit tx."""
        ex = self._active_exit(slot)
        if spend.tx is None or spend.tx.slot != slot:
            raise BadProof("challenge transaction missing or for another slot")
        if not self._verify_itx(slot, spend):
            raise BadProof("challenge inclusion proof invalid")
        # only a child of the exit tx counts: deeper descendants assume the
        # validity of their ancestors
        if spend.tx.parent_block != ex.exit_block or spend.blk_number <= ex.exit_block:
            raise NotDirectSpend("challenge must directly spend the exit transaction")
        try:
            signer = self.keyring.recover(spend.tx.hash(), spend.tx.signature)
        except MalformedSignature as exc:
            raise BadSignature(str(exc))
        if signer != ex.exitor:
            raise BadSignature("challenge spend not signed by the exitor")
        self._cancel_exit(slot, challenger, "ChallengedAfter", spend)

    def challenge_between(self, challenger: Address, slot: int, spend: IncludedTx):
        """Cancel a double-spend exit with the earlier same-parent spend."""
        ex = self._active_exit(slot)
        if ex.parent_tx is None:
            raise NotSameParent("deposit-exit has no parent to double-spend")
        if spend.tx is None or spend.tx.slot != slot:
            raise BadProof("challenge transaction missing or for another slot")
        if not self._verify_itx(slot, spend):
            raise BadProof("challenge inclusion proof invalid")
        if spend.tx.parent_block != ex.parent_tx.blk_number:
            raise NotSameParent("challenge does not spend the exit's parent")
        if not (ex.parent_tx.blk_number < spend.blk_number < ex.exit_block):
            raise NotBetween("challenge must sit between parent and exit blocks")
        try:
            signer = self.keyring.recover(spend.tx.hash(), spend.tx.signature)
        except MalformedSignature as exc:
            raise BadSignature(str(exc))
        if signer != ex.parent_tx.tx.new_owner:
            raise BadSignature("challenge spend not signed by the parent tx recipient")
        self._cancel_exit(slot, challenger, "ChallengedBetween", spend)

    def challenge_before(self, challenger: Address, slot: int, tx: IncludedTx, bond: int) -> int:
        """Bonded interactive claim that the exit's history is invalid."""
        ex = self._active_exit(slot)
        if bond != self.params.bond_amount:
            raise WrongBond(f"bond must be {self.params.bond_amount}")
        if tx.tx is None or tx.tx.slot != slot:
            raise BadProof("challenge transaction missing or for another slot")
        if not self._verify_itx(slot, tx):
            raise BadProof("challenge inclusion proof invalid")
        boundary = ex.parent_tx.blk_number if ex.parent_tx is not None else ex.exit_block
        if tx.blk_number >= boundary:
            raise NotBefore("challenge must precede the exit's parent block")
        self._debit(challenger, bond)
        self.bond_escrow += bond
        challenge_id = self._next_challenge_id
        self._next_challenge_id += 1
        ex.challenges.append(
            PendingChallenge(challenge_id=challenge_id, challenger=challenger, tx=tx, bond=bond)
        )
        self._emit(
            "ChallengedBefore",
            slot=slot,
            challenge_id=challenge_id,
            challenger=challenger.hex,
            challenge_block=tx.blk_number,
            bond=bond,
        )
        return challenge_id

    def respond_challenge_before(
        self, responder: Address, slot: int, challenge_id: int, response: IncludedTx
    ):
        """Dismiss an interactive challenge with a direct spend of its tx."""
        ex = self._active_exit(slot)
        challenge = next(
            (c for c in ex.challenges if c.challenge_id == challenge_id and not c.answered),
            None,
        )
        if challenge is None:
            raise NoSuchChallenge(f"no unanswered challenge {challenge_id} on slot {slot}")
        if response.tx is None or response.tx.slot != slot:
            raise BadProof("response transaction missing or for another slot")
        if not self._verify_itx(slot, response):
            raise BadProof("response inclusion proof invalid")
        if response.tx.parent_block != challenge.tx.blk_number:
            raise NotDirectSpendOfChallenge("response must spend the challenge tx")
        if response.blk_number > ex.exit_block:
            raise NotDirectSpendOfChallenge("response must not come after the exit block")
        try:
            signer = self.keyring.recover(response.tx.hash(), response.tx.signature)
        except MalformedSignature as exc:
            raise BadSignature(str(exc))
        if signer != challenge.tx.tx.new_owner:
            raise BadSignature("response not signed by the challenged tx recipient")
        challenge.answered = True
        self.bond_escrow -= challenge.bond
        self._credit(responder, challenge.bond)
        self._emit(
            "ChallengeResponded",
            slot=slot,
            challenge_id=challenge_id,
            responder=responder.hex,
            witness=_itx_data(response, self.config),
        )

    def finalize_exit(self, slot: int, now: Optional[int] = None) -> str:
        """Settle a matured exit: finalize, or cancel if any interactive
        challenge went unanswered."""
        ex = self._active_exit(slot)
        now = self.clock if now is None else now
        if now < ex.created_at + self.params.maturity_period:
            raise NotMature(
                f"exit matures at {ex.created_at + self.params.maturity_period}, now {now}"
            )
        unanswered = [c for c in ex.challenges if not c.answered]
        coin = self.coins[slot]
        del self.exits[slot]
        if not unanswered:
            coin.state = CoinState.EXITED
            coin.owner = ex.exitor
            self.bond_escrow -= ex.bond
            self._credit(ex.exitor, ex.bond)
            self._emit("ExitFinalized", slot=slot, exitor=ex.exitor.hex)
            return "Finalized"
        # exit bond split equally among unanswered challengers, remainder to
        # the earliest; their challenge bonds come back
        coin.state = CoinState.DEPOSITED
        self.bond_escrow -= ex.bond
        share = ex.bond // len(unanswered)
        remainder = ex.bond - share * len(unanswered)
        for i, ch in enumerate(unanswered):
            self._credit(ch.challenger, share + (remainder if i == 0 else 0))
            self.bond_escrow -= ch.bond
            self._credit(ch.challenger, ch.bond)
        self._emit(
            "ExitCancelled",
            slot=slot,
            exitor=ex.exitor.hex,
            challengers=[c.challenger.hex for c in unanswered],
        )
        return "CancelledByChallenge"

    def withdraw(self, caller: Address, slot: int) -> int:
        coin = self.coins.get(slot)
        if coin is None:
            raise UnknownCoin(f"slot {slot}")
        if coin.state is not CoinState.EXITED:
            raise NotExited(f"coin is {coin.state.value}")
        if caller != coin.owner:
            raise NotOwner("only the coin's owner may withdraw")
        coin.state = CoinState.WITHDRAWN
        self.value_escrow -= coin.denomination
        self._credit(caller, coin.denomination)
        self._emit("Withdrawn", slot=slot, owner=caller.hex, denomination=coin.denomination)
        return coin.denomination
