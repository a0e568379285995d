"""Block producer: transaction validation, modes, witness service."""

import random

import pytest

from plasma_cash.core import Keyring, PlasmaBlock, Transaction, make_deposit_tx, make_transfer_tx
from plasma_cash.errors import UnknownBlock, WitnessUnavailable, WrongMode
from plasma_cash.operator_node import OperatorMode, PlasmaOperator
from plasma_cash.smt import SmtConfig, SparseMerkleTree

CONFIG = SmtConfig(depth=16)


def make_operator(mode=OperatorMode.HONEST):
    keyring = Keyring()
    op_signer = keyring.new_signer("operator")
    operator = PlasmaOperator(op_signer.address, keyring, CONFIG, mode)
    return keyring, operator


def seed_deposit(keyring, operator, slot=0):
    owner = keyring.new_signer("alice")
    block = PlasmaBlock.build(1, {slot: make_deposit_tx(slot, owner.address)}, CONFIG)
    operator.observe_deposit(block)
    return owner


def test_honest_accepts_valid_spend():
    keyring, operator = make_operator()
    alice = seed_deposit(keyring, operator)
    bob = keyring.new_signer("bob")
    receipt = operator.submit_tx(make_transfer_tx(alice, 0, 1, bob.address))
    assert receipt.accepted
    block = operator.produce_block(1000)
    assert 0 in block.txs and block.txs[0].new_owner == bob.address


def test_honest_rejections():
    keyring, operator = make_operator()
    alice = seed_deposit(keyring, operator)
    bob = keyring.new_signer("bob")
    mallory = keyring.new_signer("mallory")

    assert operator.submit_tx(make_transfer_tx(alice, 5, 1, bob.address)).reason == "unknown coin"
    assert (
        operator.submit_tx(make_transfer_tx(alice, 0, 7, bob.address)).reason
        == "parent is not the last inclusion block"
    )
    assert (
        operator.submit_tx(make_transfer_tx(mallory, 0, 1, mallory.address)).reason
        == "signer does not own the coin"
    )
    broken = Transaction(0, 1, bob.address, b"\x00" * 5)
    assert operator.submit_tx(broken).reason == "malformed signature"

    assert operator.submit_tx(make_transfer_tx(alice, 0, 1, bob.address)).accepted
    # a second same-block spend conflicts regardless of validity
    assert (
        operator.submit_tx(make_transfer_tx(alice, 0, 1, mallory.address)).reason
        == "slot already spent this block"
    )


def test_ownership_advances_with_blocks():
    keyring, operator = make_operator()
    alice = seed_deposit(keyring, operator)
    bob = keyring.new_signer("bob")
    operator.submit_tx(make_transfer_tx(alice, 0, 1, bob.address))
    operator.produce_block(1000)
    # Alice's coin is gone; Bob spends from the new inclusion block
    assert not operator.submit_tx(make_transfer_tx(alice, 0, 1, bob.address)).accepted
    assert operator.submit_tx(make_transfer_tx(bob, 0, 1000, alice.address)).accepted


def test_double_spend_mode_skips_ownership_checks():
    keyring, operator = make_operator(OperatorMode.INCLUDE_DOUBLE_SPEND)
    seed_deposit(keyring, operator)
    mallory = keyring.new_signer("mallory")
    receipt = operator.submit_tx(make_transfer_tx(mallory, 0, 1, mallory.address))
    assert receipt.accepted


def test_forged_tx_mode_gates_raw_injection():
    keyring, operator = make_operator(OperatorMode.INCLUDE_FORGED_TX)
    seed_deposit(keyring, operator)
    mallory = keyring.new_signer("mallory")
    forged = make_transfer_tx(mallory, 0, 1, mallory.address)
    # the normal intake still refuses it; injection bypasses validation
    assert not operator.submit_tx(forged).accepted
    operator.inject_raw_tx(forged)
    assert operator.produce_block(1000).txs[0] == forged

    _, honest = make_operator()
    with pytest.raises(WrongMode):
        honest.inject_raw_tx(forged)


def test_empty_block_root_is_defaults_chain():
    _, operator = make_operator()
    block = operator.produce_block(1000)
    assert block.root == CONFIG.defaults[CONFIG.depth]


def test_block_root_matches_independent_tree_rebuild():
    keyring = Keyring()
    op_signer = keyring.new_signer("operator")
    config = SmtConfig(depth=64)
    operator = PlasmaOperator(op_signer.address, keyring, config)
    alice = keyring.new_signer("alice")
    rng = random.Random(0)
    slots = set()
    while len(slots) < 2378:
        slots.add(rng.getrandbits(64))
    for slot in slots:
        block = PlasmaBlock.build(1, {slot: make_deposit_tx(slot, alice.address)}, config)
        operator.observe_deposit(block)
    txs = {s: make_transfer_tx(alice, s, 1, alice.address) for s in slots}
    for tx in txs.values():
        assert operator.submit_tx(tx).accepted
    block = operator.produce_block(1000)
    oracle = SparseMerkleTree(config, {s: tx.hash() for s, tx in txs.items()})
    assert block.root == oracle.root


def test_witness_service_round_trip():
    keyring, operator = make_operator()
    alice = seed_deposit(keyring, operator)
    bob = keyring.new_signer("bob")
    operator.submit_tx(make_transfer_tx(alice, 0, 1, bob.address))
    operator.produce_block(1000)
    incl = operator.get_witness(0, 1000)
    assert incl.tx is not None and incl.tx.new_owner == bob.address
    assert operator.get_witness(5, 1000).is_exclusion
    with pytest.raises(UnknownBlock):
        operator.get_witness(0, 2000)


def test_withholding_is_targeted():
    keyring, operator = make_operator(OperatorMode.WITHHOLD_WITNESS)
    alice = seed_deposit(keyring, operator)
    operator.submit_tx(make_transfer_tx(alice, 0, 1, alice.address))
    operator.produce_block(1000)
    operator.withhold(0, 1000)
    with pytest.raises(WitnessUnavailable):
        operator.get_witness(0, 1000)
    # other slots and blocks still served
    assert operator.get_witness(1, 1000).is_exclusion
    assert operator.get_witness(0, 1).tx is not None

    _, honest = make_operator()
    with pytest.raises(WrongMode):
        honest.withhold(0, 1000)
