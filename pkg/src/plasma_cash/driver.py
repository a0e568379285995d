"""Glue layer wiring contract, operator, and wallets into one simulated
deployment, plus the ground-truth shadow ledger scenarios assert against.

The shadow ledger replays the operator's raw block data (not the published
proofs) and tracks each coin's true owner; contract outcomes are compared
against it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .core import Address, IncludedTx, Keyring, PlasmaBlock, Transaction
from .errors import MalformedSignature, NotOwned, PlasmaError
from .history import Verdict, valid_tip
from .operator_node import OperatorMode, PlasmaOperator, TxReceipt
from .rootchain import ChainParams, PlasmaContract
from .wallet import Wallet, WalletPolicy


class ShadowLedger:
    """True ownership per slot, replayed from raw block data."""

    def __init__(self, keyring: Keyring):
        self.keyring = keyring
        # slot -> (owner, last inclusion block)
        self.owners: Dict[int, Tuple[Address, int]] = {}

    def on_deposit(self, slot: int, owner: Address, block_number: int):
        self.owners[slot] = (owner, block_number)

    def on_block(self, block: PlasmaBlock):
        for slot, tx in block.txs.items():
            known = self.owners.get(slot)
            if known is None:
                continue
            owner, last_block = known
            if tx.parent_block != last_block:
                continue  # double spend or forged chain: no effect on truth
            try:
                signer = self.keyring.recover(tx.hash(), tx.signature)
            except MalformedSignature:
                continue
            if signer != owner:
                continue
            self.owners[slot] = (tx.new_owner, block.number)

    def true_owner(self, slot: int) -> Address:
        return self.owners[slot][0]


@dataclass
class Simulation:
    """One contract + one operator + named wallets, driven step by step."""

    params: ChainParams = field(default_factory=ChainParams)
    operator_mode: OperatorMode = OperatorMode.HONEST
    initial_balance: int = 10_000

    def __post_init__(self):
        self.keyring = Keyring()
        self.operator_signer = self.keyring.new_signer("operator")
        self.contract = PlasmaContract(
            operator=self.operator_signer.address,
            keyring=self.keyring,
            params=self.params,
        )
        self.operator = PlasmaOperator(
            address=self.operator_signer.address,
            keyring=self.keyring,
            config=self.params.smt_config,
            mode=self.operator_mode,
        )
        self.contract.balances[self.operator_signer.address] = self.initial_balance
        self.wallets: Dict[str, Wallet] = {}
        self.ledger = ShadowLedger(self.keyring)

    # -- actors --

    def actor(self, name: str, auto_challenge: bool = True) -> Wallet:
        if name not in self.wallets:
            signer = self.keyring.new_signer(name)
            self.wallets[name] = Wallet(
                signer,
                self.keyring,
                self.contract,
                WalletPolicy(auto_challenge=auto_challenge),
            )
            self.contract.balances[signer.address] = self.initial_balance
        return self.wallets[name]

    def address(self, name: str) -> Address:
        return self.actor(name).address

    def balances_snapshot(self) -> Dict[str, int]:
        snap = {name: self.contract.balance_of(w.address) for name, w in self.wallets.items()}
        snap["operator"] = self.contract.balance_of(self.operator_signer.address)
        return snap

    # -- chain actions --

    def deposit(self, name: str, denomination: int) -> int:
        wallet = self.actor(name)
        slot, number, block = self.contract.deposit(wallet.address, denomination)
        self.operator.observe_deposit(block)
        wallet.register_deposit(slot, number, block.prove(slot))
        self.ledger.on_deposit(slot, wallet.address, number)
        return slot

    def commit_block(self) -> PlasmaBlock:
        number = self.contract.next_operator_block
        block = self.operator.produce_block(number)
        self.contract.submit_block(self.operator.address, block.root)
        self.ledger.on_block(block)
        return block

    def transfer(self, sender: str, slot: int, receiver: str) -> Tuple[Transaction, TxReceipt]:
        tx = self.actor(sender).send_coin(slot, self.address(receiver))
        return tx, self.operator.submit_tx(tx)

    def deliver(self, sender: str, slot: int, receiver: str) -> Verdict:
        """After inclusion: sender completes the history and hands it over."""
        src = self.actor(sender)
        dst = self.actor(receiver)
        src.sync(slot, self.operator.get_witness)
        history = src.release(slot)
        verdict = dst.receive_coin(history, self.contract.root_view())
        if not verdict:
            src.coins[slot] = history  # receiver refused; sender keeps the coin
        return verdict

    def start_exit(self, name: str, slot: int):
        """Exit with the wallet's last valid inclusion and its parent."""
        wallet = self.actor(name)
        if not wallet.owns(slot):
            raise NotOwned(f"{name} does not hold slot {slot}")
        history = wallet.coins[slot]
        exit_tx = valid_tip(history, self.keyring)
        parent_tx = None if exit_tx.tx.is_deposit else history.incl[exit_tx.tx.parent_block]
        self.contract.start_exit(
            wallet.address, slot, parent_tx, exit_tx, self.params.bond_amount
        )

    def exit_with(self, name: str, slot: int, parent_tx: Optional[IncludedTx], exit_tx: IncludedTx):
        """Exit with explicit witnesses (used by attackers and scripted runs)."""
        self.contract.start_exit(
            self.address(name), slot, parent_tx, exit_tx, self.params.bond_amount
        )

    def run_watchers(self, names: Optional[List[str]] = None):
        """Each wallet syncs its coins (best effort) and challenges any
        fraudulent exits it can prove wrong."""
        actions = []
        view = self.contract.root_view()
        for name in names if names is not None else list(self.wallets):
            wallet = self.actor(name)
            for slot in list(wallet.coins):
                try:
                    wallet.sync(slot, self.operator.get_witness, view)
                except PlasmaError:
                    pass  # withheld witnesses cannot block watching
            actions.extend(wallet.watch_and_challenge())
        return actions

    def advance_time(self, dt: int = 1):
        self.contract.advance_time(dt)

    def finalize(self, slot: int) -> str:
        return self.contract.finalize_exit(slot)

    def withdraw(self, name: str, slot: int) -> int:
        wallet = self.actor(name)
        amount = self.contract.withdraw(wallet.address, slot)
        wallet.coins.pop(slot, None)
        return amount

    # -- convenience queries --

    def event_kinds(self) -> List[str]:
        return [e.kind for e in self.contract.events]

    def event_trace(self) -> List[dict]:
        import json

        return [json.loads(e.to_json()) for e in self.contract.events]
