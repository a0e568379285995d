"""Canonical transaction, block, and identity types.

Serialization is fixed-width big-endian, fields in declaration order, so
encodings are bit-exact across machines and usable as golden fixtures.
Signatures use a deterministic in-process scheme -- sig = address || MAC --
kept behind the same sign/recover contract a real recoverable-ECDSA
implementation would satisfy.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Dict, Optional, Union

from . import smt
from .errors import MalformedSignature
from .smt import CompactProof, Proof, SmtConfig, SparseMerkleTree

ADDRESS_SIZE = 20
SIG_SIZE = ADDRESS_SIZE + 32  # embedded address + 32-byte binding MAC


@dataclass(frozen=True, order=True)
class Address:
    """20-byte account identifier on the root chain."""

    id: bytes

    def __post_init__(self):
        if len(self.id) != ADDRESS_SIZE:
            raise ValueError("address must be 20 bytes")

    @property
    def hex(self) -> str:
        return self.id.hex()

    @classmethod
    def from_hex(cls, s: str) -> "Address":
        return cls(bytes.fromhex(s))

    def __repr__(self):
        return f"Address({self.id.hex()[:8]}…)"


@dataclass(frozen=True)
class Transaction:
    """Coin transfer: (slot, parentBlock, newOwner, signature).

    Deposit transactions carry parent_block = 0 and an empty signature.
    """

    slot: int
    parent_block: int
    new_owner: Address
    signature: bytes = b""

    def hash(self) -> bytes:
        """Digest of (slot, parent_block, new_owner); the signature signs
        this digest and is therefore excluded from it."""
        return hashlib.sha256(
            self.slot.to_bytes(8, "big")
            + self.parent_block.to_bytes(8, "big")
            + self.new_owner.id
        ).digest()

    def encode(self) -> bytes:
        return (
            self.slot.to_bytes(8, "big")
            + self.parent_block.to_bytes(8, "big")
            + self.new_owner.id
            + self.signature
        )

    @classmethod
    def decode(cls, data: bytes) -> "Transaction":
        if len(data) < 36:
            raise ValueError("transaction encoding shorter than fixed fields")
        return cls(
            slot=int.from_bytes(data[0:8], "big"),
            parent_block=int.from_bytes(data[8:16], "big"),
            new_owner=Address(data[16:36]),
            signature=data[36:],
        )

    @property
    def is_deposit(self) -> bool:
        return self.parent_block == 0


def tx_hash(tx: Transaction) -> bytes:
    return tx.hash()


def make_deposit_tx(slot: int, depositor: Address) -> Transaction:
    return Transaction(slot=slot, parent_block=0, new_owner=depositor, signature=b"")


def make_transfer_tx(signer: "Signer", slot: int, parent_block: int, new_owner: Address) -> Transaction:
    """Signed spend: the previous owner hands the slot to ``new_owner``."""
    unsigned = Transaction(slot=slot, parent_block=parent_block, new_owner=new_owner)
    return Transaction(
        slot=slot,
        parent_block=parent_block,
        new_owner=new_owner,
        signature=Keyring.sign(signer, unsigned.hash()),
    )


@dataclass(frozen=True)
class IncludedTx:
    """A transaction plus its (non-)inclusion witness for one block.

    ``tx is None`` marks an exclusion entry: the proof commits the slot to
    the empty-slot marker in that block.
    """

    tx: Optional[Transaction]
    blk_number: int
    proof: Union[Proof, CompactProof]

    @property
    def is_exclusion(self) -> bool:
        return self.tx is None

    def encode(self, config: SmtConfig) -> bytes:
        tx_bytes = b"" if self.tx is None else self.tx.encode()
        proof = smt.as_full(self.proof, config)
        return (
            self.blk_number.to_bytes(8, "big")
            + len(tx_bytes).to_bytes(4, "big")
            + tx_bytes
            + proof.to_bytes()
        )

    @classmethod
    def decode(cls, data: bytes, config: SmtConfig) -> "IncludedTx":
        blk = int.from_bytes(data[0:8], "big")
        n = int.from_bytes(data[8:12], "big")
        tx = Transaction.decode(data[12:12 + n]) if n else None
        proof = Proof.from_bytes(data[12 + n:], config)
        return cls(tx, blk, proof)


@dataclass
class PlasmaBlock:
    """One plasmachain block: at most one transaction per slot, plus the
    SMT root over the slot -> txHash map."""

    number: int
    txs: Dict[int, Transaction]
    root: bytes
    tree: SparseMerkleTree = field(repr=False, compare=False, default=None)

    @classmethod
    def build(cls, number: int, txs: Dict[int, Transaction], config: SmtConfig) -> "PlasmaBlock":
        tree = SparseMerkleTree(config, {slot: tx.hash() for slot, tx in txs.items()})
        return cls(number=number, txs=dict(txs), root=tree.root, tree=tree)

    def prove(self, slot: int) -> IncludedTx:
        """Inclusion witness when the slot is spent here, exclusion otherwise."""
        proof = self.tree.prove(slot)
        return IncludedTx(self.txs.get(slot), self.number, proof)

    def encode(self) -> bytes:
        out = [self.number.to_bytes(8, "big"), len(self.txs).to_bytes(4, "big")]
        for slot in sorted(self.txs):
            enc = self.txs[slot].encode()
            out.append(len(enc).to_bytes(4, "big"))
            out.append(enc)
        out.append(self.root)
        return b"".join(out)

    @classmethod
    def decode(cls, data: bytes) -> "PlasmaBlock":
        number = int.from_bytes(data[0:8], "big")
        count = int.from_bytes(data[8:12], "big")
        pos = 12
        txs = {}
        for _ in range(count):
            n = int.from_bytes(data[pos:pos + 4], "big")
            pos += 4
            tx = Transaction.decode(data[pos:pos + n])
            pos += n
            txs[tx.slot] = tx
        root = data[pos:pos + 32]
        return cls(number=number, txs=txs, root=root)


@dataclass(frozen=True)
class Signer:
    """Keypair handle: public address plus scheme-specific secret."""

    address: Address
    secret: bytes


class Keyring:
    """Deterministic signature scheme with address recovery.

    sign(s, h) = s.address || SHA256(secret || h).  Recovery checks the MAC
    against the registered secret for the embedded address; a signature that
    does not bind to the digest recovers to a pseudorandom non-matching
    address, mirroring how ecrecover yields garbage for a bad signature.
    """

    def __init__(self):
        self._secrets: Dict[Address, bytes] = {}

    def new_signer(self, seed) -> Signer:
        if isinstance(seed, str):
            seed = seed.encode()
        secret = hashlib.sha256(b"secret:" + seed).digest()
        address = Address(hashlib.sha256(b"address:" + seed).digest()[:ADDRESS_SIZE])
        signer = Signer(address=address, secret=secret)
        self._secrets[address] = secret
        return signer

    @staticmethod
    def sign(signer: Signer, digest: bytes) -> bytes:
        return signer.address.id + hashlib.sha256(signer.secret + digest).digest()

    def recover(self, digest: bytes, sig: bytes) -> Address:
        if len(sig) != SIG_SIZE:
            raise MalformedSignature(f"signature must be {SIG_SIZE} bytes, got {len(sig)}")
        claimed = Address(sig[:ADDRESS_SIZE])
        secret = self._secrets.get(claimed)
        if secret is not None and sig[ADDRESS_SIZE:] == hashlib.sha256(secret + digest).digest():
            return claimed
        # invalid binding: derive a garbage address deterministically
        return Address(hashlib.sha256(b"unrecoverable:" + sig + digest).digest()[:ADDRESS_SIZE])
