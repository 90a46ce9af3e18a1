"""TCP broker: dispatches one task per idle worker, collects results.

All broker state is owned by a single dispatcher thread fed by an event
queue; accept and per-connection reader threads only enqueue events.
Execution is at-least-once with first-result-wins deduplication, so
evaluators must be idempotent.
"""

import logging
import queue
import socket
import threading
import time
import uuid

from . import protocol
from .executors import TaskError

log = logging.getLogger(__name__)


class BrokerError(Exception):
    pass


class _Conn:
    def __init__(self, sock, addr):
        self.sock = sock
        self.addr = addr
        self.worker_id = None
        self.connected_at = time.monotonic()
        self.in_flight = None  # task_id or None
        self.last_heartbeat = time.monotonic()
        self.send_lock = threading.Lock()

    def send(self, message):
        with self.send_lock:
            protocol.write_frame(self.sock, message)


class _Batch:
    def __init__(self, payloads):
        self.payloads = payloads
        self.results = [None] * len(payloads)
        self.done_ids = set()
        self.failed = {}  # task_id -> error string (latest attempt)
        self.todo = list(range(len(payloads)))
        self.finished = threading.Event()
        self.error = None
        self.started = time.monotonic()
        self.last_worker_seen = time.monotonic()


class Broker:
    """One batch at a time; see run_batch."""

    def __init__(
        self,
        bind_address=("127.0.0.1", 0),
        heartbeat_interval=2.0,
        liveness=3,
        idle_timeout=300.0,
        max_frame=protocol.DEFAULT_MAX_FRAME,
        max_task_failures=3,
    ):
        self.bind_address = tuple(bind_address)
        self.heartbeat_interval = heartbeat_interval
        self.liveness = liveness
        self.idle_timeout = idle_timeout
        self.max_frame = max_frame
        self.max_task_failures = max_task_failures
        self._events = queue.Queue()
        self._batches = queue.Queue()
        self._conns = set()
        self._batch = None
        self._listener = None
        self._threads = []
        self._stopping = threading.Event()

    # -- lifecycle ---------------------------------------------------------

    def start(self):
        self._listener = socket.create_server(self.bind_address)
        self._listener.settimeout(0.2)
        self._threads = [
            threading.Thread(target=self._accept_loop, daemon=True, name="broker-accept"),
            threading.Thread(target=self._dispatch_loop, daemon=True, name="broker-dispatch"),
            threading.Thread(target=self._tick_loop, daemon=True, name="broker-tick"),
        ]
        for t in self._threads:
            t.start()
        return self

    @property
    def address(self):
        return self._listener.getsockname()

    def stop(self):
        self._stopping.set()
        self._events.put(("stop", None, None))
        for t in self._threads:
            t.join(timeout=5)
        try:
            self._listener.close()
        except OSError:
            pass

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()

    # -- public batch API --------------------------------------------------

    def run_batch(self, payloads, timeout=None):
        """Submit payloads, block until all results arrive (task order)."""
        batch = _Batch(list(payloads))
        if not batch.payloads:
            return []
        self._events.put(("batch", batch, None))
        if not batch.finished.wait(timeout):
            raise BrokerError("batch timed out")
        if batch.error is not None:
            raise batch.error
        return batch.results

    # -- threads -----------------------------------------------------------

    def _accept_loop(self):
        while not self._stopping.is_set():
            try:
                sock, addr = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                return
            conn = _Conn(sock, addr)
            threading.Thread(
                target=self._reader_loop, args=(conn,), daemon=True,
                name=f"broker-read-{addr}",
            ).start()

    def _reader_loop(self, conn):
        try:
            while True:
                msg = protocol.read_frame(conn.sock, self.max_frame)
                if msg is None:
                    break
                self._events.put(("msg", conn, msg))
        except (protocol.ProtocolError, OSError) as exc:
            log.debug("connection %s dropped: %s", conn.addr, exc)
        self._events.put(("closed", conn, None))

    def _tick_loop(self):
        while not self._stopping.is_set():
            time.sleep(self.heartbeat_interval / 2.0)
            self._events.put(("tick", None, None))

    def _dispatch_loop(self):
        while True:
            kind, conn, msg = self._events.get()
            if kind == "stop":
                self._shutdown_conns()
                return
            if kind == "batch":
                self._on_batch(conn)
            elif kind == "msg":
                self._on_message(conn, msg)
            elif kind == "closed":
                self._on_closed(conn)
            elif kind == "tick":
                self._on_tick()

    # -- event handlers (dispatcher thread only) ---------------------------

    def _on_batch(self, batch):
        if self._batch is not None and not self._batch.finished.is_set():
            batch.error = BrokerError("another batch is already running")
            batch.finished.set()
            return
        self._batch = batch
        batch.last_worker_seen = time.monotonic()
        self._assign_idle()

    def _on_message(self, conn, msg):
        conn.last_heartbeat = time.monotonic()
        mtype = msg["type"]
        if mtype == "HELLO":
            conn.worker_id = msg.get("worker_id") or uuid.uuid4().hex
            self._conns.add(conn)
            self._assign_idle()
        elif mtype == "PING":
            self._safe_send(conn, protocol.pong(msg.get("worker_id", "")))
        elif mtype == "RESULT":
            self._on_result(conn, msg)
        else:
            log.warning("unexpected %s from worker %s; closing", mtype, conn.worker_id)
            self._drop(conn)

    def _on_result(self, conn, msg):
        tid = msg.get("task_id")
        if conn.in_flight == tid:
            conn.in_flight = None
        batch = self._batch
        if batch is None or batch.finished.is_set():
            return
        if not isinstance(tid, int) or not (0 <= tid < len(batch.payloads)):
            return
        if tid in batch.done_ids:
            # duplicate from a reassignment race: first result wins
            self._assign_idle()
            return
        if msg.get("ok"):
            batch.results[tid] = msg.get("value")
            batch.done_ids.add(tid)
        else:
            batch.failed[tid] = msg.get("error", "evaluation failed")
            attempts = batch.failed_count = getattr(batch, "failed_count", {})
            attempts[tid] = attempts.get(tid, 0) + 1
            if attempts[tid] >= self.max_task_failures:
                batch.error = TaskError(tid, batch.failed[tid])
                batch.finished.set()
                self._batch = None
                return
            batch.todo.append(tid)
        if len(batch.done_ids) == len(batch.payloads):
            batch.finished.set()
            self._batch = None
        else:
            self._assign_idle()

    def _on_closed(self, conn):
        self._drop(conn)

    def _on_tick(self):
        now = time.monotonic()
        deadline = self.liveness * self.heartbeat_interval
        for conn in [c for c in self._conns if now - c.last_heartbeat > deadline]:
            log.warning("worker %s missed heartbeats; dropping", conn.worker_id)
            self._drop(conn)
        batch = self._batch
        if batch is not None and not batch.finished.is_set():
            if self._conns:
                batch.last_worker_seen = now
            elif now - batch.last_worker_seen > self.idle_timeout:
                batch.error = BrokerError(
                    f"no workers connected for {self.idle_timeout:g}s; batch abandoned"
                )
                batch.finished.set()
                self._batch = None

    # -- helpers (dispatcher thread only) ----------------------------------

    def _assign_idle(self):
        batch = self._batch
        if batch is None or batch.finished.is_set():
            return
        for conn in list(self._conns):
            if conn.in_flight is not None:
                continue
            tid = self._next_task(batch)
            if tid is None:
                return
            conn.in_flight = tid
            if not self._safe_send(conn, protocol.task(tid, batch.payloads[tid])):
                batch.todo.insert(0, tid)
                conn.in_flight = None
                self._drop(conn)

    def _next_task(self, batch):
        while batch.todo:
            tid = batch.todo.pop(0)
            if tid not in batch.done_ids:
                return tid
        return None

    def _drop(self, conn):
        self._conns.discard(conn)
        if conn.in_flight is not None and self._batch is not None:
            self._batch.todo.insert(0, conn.in_flight)
            conn.in_flight = None
        try:
            conn.sock.close()
        except OSError:
            pass
        self._assign_idle()

    def _safe_send(self, conn, message):
        try:
            conn.send(message)
            return True
        except OSError:
            return False

    def _shutdown_conns(self):
        for conn in list(self._conns):
            self._safe_send(conn, protocol.fin())
            try:
                conn.sock.close()
            except OSError:
                pass
        self._conns.clear()


def broker_serve(bind_address, batch_source, **kwargs):
    """Run a broker, pulling batches from an iterable of payload lists.

    Yields each batch's results; mainly a convenience for scripted use —
    jobs drive the Broker object directly.
    """
    with Broker(bind_address, **kwargs) as broker:
        for payloads in batch_source:
            yield broker.run_batch(payloads)
