"""Message substrate between clients and servers.

Two interchangeable backends (in-process queues, TCP sockets) carry the same
bit-exact frame format, and every delivery is recorded by an audit log so the
non-collusion invariant (no server-to-server traffic, except the single RND
seed frame) can be checked after a run.

Frame layout, big-endian throughout:

    magic   4 bytes  'KPSI'
    version 1 byte   0x01
    type    1 byte   0x01 share-vector | 0x02 encoded-vector | 0x03 rnd-seed | 0x04 control
    sender  2 bytes  client index, or 0xFFF0 / 0xFFF1 (servers), 0xFFFE (oracle)
    vec_len 4 bytes  element count
    payload vec_len elements: 2-byte byte-length prefix + that many magnitude bytes
"""

from __future__ import annotations

import queue
import socket
import struct
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import FramingError, ProtocolError, TransportError

MAGIC = b"KPSI"
VERSION = 1

MSG_SHARE_VECTOR = 0x01
MSG_ENCODED_VECTOR = 0x02
MSG_RND_SEED = 0x03
MSG_CONTROL = 0x04

SERVER_0 = 0xFFF0
SERVER_1 = 0xFFF1
ORACLE = 0xFFFE

_HEADER = struct.Struct(">4sBBHI")

DEFAULT_TIMEOUT = 30.0


@dataclass(frozen=True)
class Frame:
    msg_type: int
    sender_id: int
    elements: tuple[int, ...]


def encode_frame(frame: Frame) -> bytes:
    parts = [_HEADER.pack(MAGIC, VERSION, frame.msg_type, frame.sender_id, len(frame.elements))]
    for v in frame.elements:
        if v < 0:
            raise ProtocolError(f"cannot encode negative element {v}")
        mag = v.to_bytes(max(1, (v.bit_length() + 7) // 8), "big")
        if len(mag) > 0xFFFF:
            raise ProtocolError("element magnitude exceeds the 2-byte length prefix")
        parts.append(len(mag).to_bytes(2, "big"))
        parts.append(mag)
    return b"".join(parts)


def decode_frame(data: bytes) -> Frame:
    if len(data) < _HEADER.size:
        raise FramingError("truncated header", len(data))
    magic, version, msg_type, sender_id, vec_len = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FramingError(f"bad magic {magic!r}", 0)
    if version != VERSION:
        raise FramingError(f"unknown version {version}", 4)
    off = _HEADER.size
    elements = []
    for _ in range(vec_len):
        if off + 2 > len(data):
            raise FramingError("truncated element length prefix", off)
        length = int.from_bytes(data[off : off + 2], "big")
        off += 2
        if off + length > len(data):
            raise FramingError("truncated element payload", off)
        elements.append(int.from_bytes(data[off : off + length], "big"))
        off += length
    if off != len(data):
        raise FramingError("trailing bytes after payload", off)
    return Frame(msg_type=msg_type, sender_id=sender_id, elements=tuple(elements))


@dataclass(frozen=True)
class AuditEntry:
    sender_id: int
    receiver_id: int
    msg_type: int
    size_bytes: int
    wire: bytes | None = None


class AuditLog:
    """Synchronized record of every delivered frame."""

    def __init__(self, capture_bytes: bool = False):
        self._entries: list[AuditEntry] = []
        self._lock = threading.Lock()
        self._capture = capture_bytes

    def record(self, sender_id: int, receiver_id: int, msg_type: int, size_bytes: int,
               wire: bytes | None = None) -> None:
        with self._lock:
            self._entries.append(
                AuditEntry(sender_id, receiver_id, msg_type, size_bytes,
                           wire if self._capture else None)
            )

    def entries(self) -> list[AuditEntry]:
        with self._lock:
            return list(self._entries)

    def server_to_server(self) -> list[AuditEntry]:
        servers = {SERVER_0, SERVER_1}
        return [e for e in self.entries() if e.sender_id in servers and e.receiver_id in servers]

    def forbidden_edges(self, allow_rnd_seed: bool) -> list[AuditEntry]:
        """Server-to-server frames beyond what the scheme permits.

        Kaleido-RND allows exactly one seed frame S0 -> S1; everything else
        between servers is a collusion-channel violation.
        """
        s2s = self.server_to_server()
        if not allow_rnd_seed:
            return s2s
        allowed = [
            e
            for e in s2s
            if e.msg_type == MSG_RND_SEED and e.sender_id == SERVER_0 and e.receiver_id == SERVER_1
        ]
        extras = [e for e in s2s if e not in allowed]
        if len(allowed) > 1:
            extras.extend(allowed[1:])
        return extras

    def count(self, msg_type: int | None = None) -> int:
        return sum(1 for e in self.entries() if msg_type is None or e.msg_type == msg_type)

    def total_bytes(self, msg_type: int | None = None) -> int:
        return sum(e.size_bytes for e in self.entries() if msg_type is None or e.msg_type == msg_type)


class Endpoint:
    """One party's handle onto a transport: send frames, receive own inbox."""

    def __init__(self, party_id: int, backend: "TransportBackend"):
        self.party_id = party_id
        self._backend = backend

    def send(self, receiver_id: int, frame: Frame) -> None:
        self._backend.deliver(self.party_id, receiver_id, frame)

    def receive(self, timeout: float | None = None) -> Frame:
        return self._backend.collect(self.party_id, timeout)


class TransportBackend:
    """Interface shared by the in-process and TCP backends."""

    def __init__(self, audit: AuditLog | None = None, timeout: float = DEFAULT_TIMEOUT):
        self.audit = audit if audit is not None else AuditLog()
        self.timeout = timeout

    def endpoint(self, party_id: int) -> Endpoint:
        raise NotImplementedError

    def deliver(self, sender_id: int, receiver_id: int, frame: Frame) -> None:
        raise NotImplementedError

    def collect(self, party_id: int, timeout: float | None) -> Frame:
        raise NotImplementedError

    def close(self) -> None:
        pass


class InProcessBackend(TransportBackend):
    """Queues in one process; frames still pass through the byte codec so the
    audited sizes and streams match the TCP backend bit for bit."""

    def __init__(self, party_ids: Iterable[int], audit: AuditLog | None = None,
                 timeout: float = DEFAULT_TIMEOUT):
        super().__init__(audit, timeout)
        self._inboxes: dict[int, queue.Queue] = {pid: queue.Queue() for pid in party_ids}

    def endpoint(self, party_id: int) -> Endpoint:
        if party_id not in self._inboxes:
            raise TransportError(f"unknown party id {party_id}")
        return Endpoint(party_id, self)

    def deliver(self, sender_id: int, receiver_id: int, frame: Frame) -> None:
        try:
            inbox = self._inboxes[receiver_id]
        except KeyError:
            raise TransportError(f"no such receiver {receiver_id}") from None
        wire = encode_frame(frame)
        self.audit.record(sender_id, receiver_id, frame.msg_type, len(wire), wire)
        inbox.put(wire)

    def collect(self, party_id: int, timeout: float | None) -> Frame:
        try:
            wire = self._inboxes[party_id].get(timeout=timeout if timeout is not None else self.timeout)
        except queue.Empty:
            raise TransportError(f"party {party_id}: timed out waiting for a frame") from None
        return decode_frame(wire)


class TcpBackend(TransportBackend):
    """Localhost TCP sockets, one connection per (sender, receiver) pair.

    Each party gets a listening socket; an accept thread per party reads
    length-delimited frames off every inbound connection into the inbox.
    """

    def __init__(self, party_ids: Iterable[int], audit: AuditLog | None = None,
                 timeout: float = DEFAULT_TIMEOUT, host: str = "127.0.0.1"):
        super().__init__(audit, timeout)
        self._host = host
        self._inboxes: dict[int, queue.Queue] = {}
        self._listeners: dict[int, socket.socket] = {}
        self._addresses: dict[int, tuple[str, int]] = {}
        self._conns: dict[tuple[int, int], socket.socket] = {}
        self._conn_lock = threading.Lock()
        self._closing = threading.Event()
        self._threads: list[threading.Thread] = []
        for pid in party_ids:
            self._inboxes[pid] = queue.Queue()
            srv = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
            srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            srv.bind((host, 0))
            srv.listen()
            self._listeners[pid] = srv
            self._addresses[pid] = srv.getsockname()
            t = threading.Thread(target=self._accept_loop, args=(pid, srv), daemon=True)
            t.start()
            self._threads.append(t)

    def _accept_loop(self, party_id: int, srv: socket.socket) -> None:
        while not self._closing.is_set():
            try:
                conn, _ = srv.accept()
            except OSError:
                return
            t = threading.Thread(target=self._reader_loop, args=(party_id, conn), daemon=True)
            t.start()
            self._threads.append(t)

    def _reader_loop(self, party_id: int, conn: socket.socket) -> None:
        fh = conn.makefile("rb")
        try:
            while True:
                prefix = fh.read(4)
                if len(prefix) < 4:
                    return
                length = int.from_bytes(prefix, "big")
                wire = fh.read(length)
                if len(wire) < length:
                    return
                frame = decode_frame(wire)
                self.audit.record(frame.sender_id, party_id, frame.msg_type, len(wire), wire)
                self._inboxes[party_id].put(wire)
        finally:
            fh.close()
            conn.close()

    def endpoint(self, party_id: int) -> Endpoint:
        if party_id not in self._inboxes:
            raise TransportError(f"unknown party id {party_id}")
        return Endpoint(party_id, self)

    def _connection(self, sender_id: int, receiver_id: int) -> socket.socket:
        key = (sender_id, receiver_id)
        with self._conn_lock:
            conn = self._conns.get(key)
            if conn is None:
                addr = self._addresses.get(receiver_id)
                if addr is None:
                    raise TransportError(f"no such receiver {receiver_id}")
                try:
                    conn = socket.create_connection(addr, timeout=self.timeout)
                except OSError as exc:
                    raise TransportError(f"cannot connect to {addr[0]}:{addr[1]}: {exc}") from exc
                self._conns[key] = conn
            return conn

    def deliver(self, sender_id: int, receiver_id: int, frame: Frame) -> None:
        wire = encode_frame(frame)
        conn = self._connection(sender_id, receiver_id)
        try:
            conn.sendall(len(wire).to_bytes(4, "big") + wire)
        except OSError as exc:
            addr = self._addresses.get(receiver_id, ("?", 0))
            raise TransportError(f"send to {addr[0]}:{addr[1]} failed: {exc}") from exc

    def collect(self, party_id: int, timeout: float | None) -> Frame:
        try:
            wire = self._inboxes[party_id].get(timeout=timeout if timeout is not None else self.timeout)
        except queue.Empty:
            raise TransportError(f"party {party_id}: timed out waiting for a frame") from None
        return decode_frame(wire)

    def close(self) -> None:
        self._closing.set()
        for srv in self._listeners.values():
            srv.close()
        with self._conn_lock:
            for conn in self._conns.values():
                conn.close()
            self._conns.clear()
