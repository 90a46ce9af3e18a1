"""Order-preserving parallel map/reduce over candidate evaluations."""

from concurrent.futures import ThreadPoolExecutor


class TaskError(Exception):
    """Raised by pmap when a task ultimately fails on every executor."""

    def __init__(self, index, message):
        super().__init__(f"task {index} failed: {message}")
        self.index = index
        self.message = message


def pmap(tasks, eval_fn, executor=None):
    """Map eval_fn over tasks; results come back in task order.

    eval_fn must be pure and idempotent: the broker executor may run a
    task more than once and keeps only the first result.
    """
    tasks = list(tasks)
    executor = executor or SerialExecutor()
    return executor.map(eval_fn, tasks)


def reduce(results, combiner, init):
    """Left fold in task order. Use an associative combiner if the result
    must not depend on how work was distributed."""
    acc = init
    for r in results:
        acc = combiner(acc, r)
    return acc


class SerialExecutor:
    """In-thread reference executor; every other executor must match it."""

    def map(self, eval_fn, tasks):
        out = []
        for i, t in enumerate(tasks):
            try:
                out.append(eval_fn(t))
            except Exception as exc:
                raise TaskError(i, str(exc)) from exc
        return out


class PoolExecutor:
    """Concurrent in-process pool; shares only immutable inputs."""

    def __init__(self, workers):
        if workers < 1:
            raise ValueError("pool size must be >= 1")
        self.workers = workers

    def map(self, eval_fn, tasks):
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            futures = [pool.submit(eval_fn, t) for t in tasks]
            out = []
            for i, f in enumerate(futures):
                try:
                    out.append(f.result())
                except Exception as exc:
                    raise TaskError(i, str(exc)) from exc
            return out


class BrokerExecutor:
    """Ships task payloads to a running Broker's worker pool.

    Payloads must be JSON-serializable; eval_fn is not called here — the
    connected workers own the evaluation function, which must agree with
    eval_fn for the pmap-equals-serial-map contract to hold.
    """

    wants_serializable = True

    def __init__(self, broker):
        self.broker = broker

    def map(self, eval_fn, tasks):
        return self.broker.run_batch(tasks)


def parse_executor(text):
    """Build an executor from a CLI spec: serial | pool:N | broker:HOST:PORT.

    broker specs return the (host, port) tuple; the caller owns broker
    startup because the broker must outlive one batch.
    """
    if text == "serial":
        return SerialExecutor()
    if text.startswith("pool:"):
        return PoolExecutor(int(text.split(":", 1)[1]))
    if text.startswith("broker:"):
        host, port = text.split(":", 2)[1:]
        return ("broker", host, int(port))
    raise ValueError(f"unknown executor spec: {text!r}")
