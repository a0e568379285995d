"""Deterministic simulator of a non-fungible-coin plasma chain: sparse
Merkle commitments, verifiable coin histories, and the on-chain exit and
challenge game that keeps funds safe under a Byzantine block producer."""

from .core import (
    Address,
    IncludedTx,
    Keyring,
    PlasmaBlock,
    Signer,
    Transaction,
    make_deposit_tx,
    make_transfer_tx,
    tx_hash,
)
from .driver import Simulation
from .history import (
    CoinHistory,
    Reason,
    RootView,
    Verdict,
    build_history,
    earliest_owner_filter,
    valid_tip,
    verify_history,
)
from .operator_node import OperatorMode, PlasmaOperator, TxReceipt
from .rootchain import ChainParams, CoinRecord, CoinState, Exit, PlasmaContract
from .scenarios import SCENARIOS, ScenarioReport, fuzz, run
from .smt import (
    DEFAULT_LEAF,
    CompactProof,
    Proof,
    SmtConfig,
    SparseMerkleTree,
    compact,
    expand,
    verify,
)
from .wallet import Wallet, WalletPolicy

__version__ = "0.1.0"
