"""Worker side of the broker fabric: evaluate one task at a time."""

import logging
import socket
import threading
import time
import uuid

from . import protocol

log = logging.getLogger(__name__)


def worker_run(
    connect_address,
    evaluator,
    heartbeat_interval=2.0,
    stop_event=None,
    reconnect_base=1.0,
    reconnect_cap=30.0,
    max_frame=protocol.DEFAULT_MAX_FRAME,
    worker_id=None,
    on_connect=None,
):
    """Serve tasks from a broker until FIN (or stop_event).

    Reconnects with bounded exponential backoff on connection loss; an
    evaluator exception becomes a failed RESULT, never a worker crash.
    """
    worker_id = worker_id or uuid.uuid4().hex[:12]
    stop_event = stop_event or threading.Event()
    backoff = reconnect_base
    while not stop_event.is_set():
        try:
            sock = socket.create_connection(connect_address, timeout=10)
        except OSError:
            if stop_event.wait(min(backoff, reconnect_cap)):
                return
            backoff = min(backoff * 2.0, reconnect_cap)
            continue
        backoff = reconnect_base
        if on_connect is not None:
            on_connect(sock)
        try:
            if _serve_connection(
                sock, evaluator, worker_id, heartbeat_interval, stop_event, max_frame
            ):
                return  # clean FIN
        except (OSError, protocol.ProtocolError) as exc:
            log.debug("worker %s lost connection: %s", worker_id, exc)
        finally:
            try:
                sock.close()
            except OSError:
                pass


def _serve_connection(sock, evaluator, worker_id, heartbeat_interval, stop_event, max_frame):
    send_lock = threading.Lock()

    def send(message):
        with send_lock:
            protocol.write_frame(sock, message)

    send(protocol.hello(worker_id))

    hb_stop = threading.Event()

    def heartbeat():
        while not hb_stop.wait(heartbeat_interval):
            try:
                send(protocol.ping(worker_id))
            except OSError:
                return

    hb = threading.Thread(target=heartbeat, daemon=True, name=f"worker-hb-{worker_id}")
    hb.start()
    try:
        while not stop_event.is_set():
            msg = protocol.read_frame(sock, max_frame)
            if msg is None:
                return False
            mtype = msg["type"]
            if mtype == "FIN":
                return True
            if mtype == "PONG":
                continue
            if mtype == "TASK":
                tid = msg["task_id"]
                try:
                    value = evaluator(msg["payload"])
                    send(protocol.result(tid, True, value=value))
                except Exception as exc:
                    send(protocol.result(tid, False, error=f"{type(exc).__name__}: {exc}"))
            else:
                raise protocol.ProtocolError(f"unexpected {mtype} from broker")
        return False
    finally:
        hb_stop.set()


class WorkerThread:
    """A worker_run loop on a thread, with an abrupt kill() for testing
    fault tolerance."""

    def __init__(self, connect_address, evaluator, **kwargs):
        self.stop_event = threading.Event()
        self._address = connect_address
        self._evaluator = evaluator
        self._kwargs = kwargs
        self._sock_holder = []
        self.thread = threading.Thread(target=self._run, daemon=True)

    def _run(self):
        worker_run(
            self._address, self._wrapped_evaluator,
            stop_event=self.stop_event, on_connect=self._sock_holder.append,
            **self._kwargs,
        )

    def _wrapped_evaluator(self, payload):
        if self.stop_event.is_set():
            raise OSError("worker killed")
        return self._evaluator(payload)

    def start(self):
        self.thread.start()
        return self

    def kill(self):
        """Simulate a crash: sever the connection immediately."""
        self.stop_event.set()
        while self._sock_holder:
            sock = self._sock_holder.pop()
            try:
                sock.shutdown(1)  # SHUT_WR silences further RESULT sends
                sock.close()
            except OSError:
                pass

    stop = kill

    def join(self, timeout=None):
        self.thread.join(timeout)
