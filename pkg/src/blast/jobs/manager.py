"""Job lifecycle management: submit, start, cancel, restart, stream.

Each running job owns one runner thread; all mutations of a JobRecord go
through its per-job lock, and every mutation is on disk before the call
returns. Cancellation is cooperative at generation boundaries so the
checkpoint stays consistent.
"""

import logging
import queue
import threading
import time
from pathlib import Path

from ..learn import (
    FitEvaluator,
    GaConfig,
    GaDriver,
    NmConfig,
    TwoStageDriver,
    nsga2,
    nelder_mead,
    random_search,
)
from ..objective import hierarchical_comparator
from ..parallel import Broker, BrokerExecutor, PoolExecutor, SerialExecutor
from ..trainset import cross_validate
from .config import (
    ConfigError,
    build_dataset,
    build_external_evaluators,
    build_space,
    parse_config,
    split_dataset,
)
from .store import IllegalTransition, JobStore, UnknownJob

log = logging.getLogger(__name__)

CHECKPOINTED = ("ga", "hoga", "two_stage")


class _RunHandle:
    def __init__(self):
        self.thread = None
        self.stop_event = threading.Event()
        self.subscribers = set()
        self.lock = threading.Lock()


class JobManager:
    def __init__(self, home, executor_override=None):
        self.home = Path(home)
        self.home.mkdir(parents=True, exist_ok=True)
        self.store = JobStore(self.home)
        self.executor_override = executor_override
        self._handles = {}
        self._job_locks = {}
        self._lock = threading.Lock()

    def _job_lock(self, job_id):
        with self._lock:
            return self._job_locks.setdefault(job_id, threading.RLock())

    # -- API operations ----------------------------------------------------

    def submit(self, config_doc):
        """Validate and persist a new job (status created)."""
        cfg = parse_config(config_doc)
        try:
            space = build_space(cfg)
            dataset = build_dataset(cfg, self.home)
        except ConfigError:
            raise
        except FileNotFoundError as exc:
            raise ConfigError([("data", f"unreadable data file: {exc}")]) from exc
        except ValueError as exc:
            raise ConfigError([("data", str(exc))]) from exc
        del space, dataset
        return self.store.create(config_doc)

    def get(self, job_id):
        return self.store.read_record(job_id)

    def list(self):
        return self.store.list_records()

    def result(self, job_id):
        self.store.read_record(job_id)  # raises UnknownJob
        return self.store.read_result(job_id)

    def start(self, job_id):
        with self._job_lock(job_id):
            record = self.store.read_record(job_id)
            record = self.store.transition(record, "running")
            self._launch(record, resume=False)
            return record

    def restart(self, job_id):
        """Resume from the latest checkpoint, or from scratch if none."""
        with self._job_lock(job_id):
            record = self.store.read_record(job_id)
            record = self.store.transition(record, "running")
            self._launch(record, resume=True)
            return record

    def cancel(self, job_id, wait=True):
        """Cooperative stop at the next generation boundary."""
        with self._job_lock(job_id):
            record = self.store.read_record(job_id)
            if record.status != "running":
                raise IllegalTransition(
                    f"job {job_id}: cannot cancel a {record.status} job"
                )
            handle = self._handles.get(job_id)
            if handle is None:
                # stale running state (e.g. process died); repair to failed
                record.error = "runner disappeared"
                return self.store.transition(record, "failed")
            handle.stop_event.set()
        if wait and handle.thread is not None:
            handle.thread.join()
        return self.store.read_record(job_id)

    def wait(self, job_id, timeout=None):
        handle = self._handles.get(job_id)
        if handle is not None and handle.thread is not None:
            handle.thread.join(timeout)
        return self.store.read_record(job_id)

    # -- progress streaming ------------------------------------------------

    def stream_events(self, job_id):
        """Replay persisted events, then follow live ones; the stream ends
        when the job reaches a terminal status."""
        record = self.store.read_record(job_id)
        handle = self._handles.get(job_id)
        q = None
        if handle is not None:
            with handle.lock:
                past = self.store.read_events(job_id)
                record = self.store.read_record(job_id)
                if record.status == "running":
                    q = queue.Queue()
                    handle.subscribers.add(q)
        else:
            past = self.store.read_events(job_id)
        yield from past
        if q is None:
            return
        try:
            while True:
                item = q.get()
                if item is None:
                    return
                yield item
        finally:
            with handle.lock:
                handle.subscribers.discard(q)

    def _publish(self, handle, job_id, event):
        with handle.lock:
            self.store.append_event(job_id, event)
            for q in handle.subscribers:
                q.put(event)

    def _close_stream(self, handle):
        with handle.lock:
            for q in handle.subscribers:
                q.put(None)

    # -- runner ------------------------------------------------------------

    def _launch(self, record, resume):
        handle = _RunHandle()
        self._handles[record.job_id] = handle
        handle.thread = threading.Thread(
            target=self._run_job, args=(record.job_id, handle, resume),
            daemon=True, name=f"job-{record.job_id}",
        )
        handle.thread.start()

    def _run_job(self, job_id, handle, resume):
        broker = None
        try:
            record = self.store.read_record(job_id)
            cfg = parse_config(record.config)
            space = build_space(cfg)
            dataset = build_dataset(cfg, self.home)
            train, holdout = split_dataset(cfg, dataset)
            externals = build_external_evaluators(cfg, self.home)
            executor, broker = self._make_executor(cfg)
            evaluator = FitEvaluator(space, train, executor, externals)

            state = None
            if resume:
                try:
                    cp = self.store.read_checkpoint(job_id)
                except ValueError:
                    log.warning("job %s: corrupt checkpoint, restarting from scratch", job_id)
                    self._publish(handle, job_id, _warn_event(job_id, "corrupt checkpoint; restarting from scratch"))
                    cp = None
                if cp is not None and cp.get("strategy") == cfg.strategy:
                    state = cp.get("state")
            if state is None:
                self.store.clear_events(job_id)

            outcome = self._run_strategy(
                cfg, space, evaluator, job_id, handle, state
            )
            record = self.store.read_record(job_id)
            if outcome is None or handle.stop_event.is_set() and not outcome.get("finished"):
                self.store.transition(record, "cancelled")
            else:
                result = outcome["result"]
                report = cross_validate(space, result.best.params, holdout, externals)
                payload = {
                    "learn_result": result.to_dict(),
                    "cross_validation": report.to_dict(),
                }
                if "front" in outcome:
                    payload["front"] = outcome["front"]
                self.store.write_result(job_id, payload)
                record.progress = (result.history or [None])[-1]
                self.store.transition(record, "completed")
        except Exception as exc:
            log.exception("job %s failed", job_id)
            try:
                record = self.store.read_record(job_id)
                record.error = f"{type(exc).__name__}: {exc}"
                self.store.transition(record, "failed")
            except Exception:
                pass
        finally:
            if broker is not None:
                broker.stop()
            self._close_stream(handle)

    def _make_executor(self, cfg):
        choice = self.executor_override or (
            cfg.executor if cfg.executor != "pool" else f"pool:{cfg.executor_n}"
        )
        if isinstance(choice, str) and choice.startswith("pool:"):
            return PoolExecutor(int(choice.split(":", 1)[1])), None
        if choice == "serial":
            return SerialExecutor(), None
        if choice == "broker" or (isinstance(choice, str) and choice.startswith("broker:")):
            if ":" in choice and choice != "broker":
                host, port = choice.split(":", 2)[1:]
            else:
                host, port = cfg.executor_bind.rsplit(":", 1)
            broker = Broker((host, int(port))).start()
            return BrokerExecutor(broker), broker
        if hasattr(choice, "map"):
            return choice, None
        raise ValueError(f"unknown executor: {choice!r}")

    def _run_strategy(self, cfg, space, evaluator, job_id, handle, state):
        """Run the configured learner; returns {result, finished} or None
        when cancelled before any result exists."""
        stop = handle.stop_event.is_set
        seed = cfg.seed
        params = dict(cfg.strategy_params)

        def emit(entry, extra=None):
            event = {
                "job_id": job_id,
                "iteration": entry["iteration"],
                "best_objective": _json_num(entry["best_objective"]),
                "mean_objective": _json_num(entry["mean_objective"]),
                "evaluations": entry["evaluations"],
                "timestamp": time.time(),
            }
            if extra:
                event.update(extra)
            record = self.store.read_record(job_id)
            record.progress = event
            self.store.write_record(record)
            self._publish(handle, job_id, event)

        if cfg.strategy == "random":
            result = random_search(space, evaluator, int(params.get("n", 100)), seed)
            emit(result.history[-1])
            return {"result": result, "finished": True}

        if cfg.strategy in ("ga", "hoga"):
            comparator = (
                hierarchical_comparator(cfg.level_tolerances)
                if cfg.strategy == "hoga"
                else None
            )
            ga_cfg = GaConfig(**_ga_params(params, seed))
            driver = GaDriver(space, evaluator, ga_cfg, comparator)
            if state is not None:
                driver.load_state(state)

            def progress(entry):
                self.store.write_checkpoint(
                    job_id, {"strategy": cfg.strategy, "state": driver.state_dict()}
                )
                extra = None
                if cfg.strategy == "hoga" and driver.best is not None:
                    extra = {"best_levels": driver.best.level_objectives}
                emit(entry, extra)

            result = driver.run(progress, stop)
            return {"result": result, "finished": driver.done}

        if cfg.strategy == "two_stage":
            comparator = None
            ga_cfg = GaConfig(**_ga_params(params, seed, drop=("local", "top_k", "n")))
            local_cfg = NmConfig(**params.get("local", {}))
            driver = TwoStageDriver(
                space, evaluator, ga_cfg, local_cfg, int(params.get("top_k", 1)), comparator
            )
            if state is not None:
                driver.load_state(state)

            def progress(entry):
                self.store.write_checkpoint(
                    job_id, {"strategy": "two_stage", "state": driver.state_dict()}
                )
                emit(entry)

            result = driver.run(progress, stop)
            return {"result": result, "finished": driver.stage == "done"}

        if cfg.strategy == "nelder_mead":
            x0 = 0.5 * (space.default_lows() + space.default_highs())
            nm_cfg = NmConfig(**{k: v for k, v in params.items() if k in NmConfig.__dataclass_fields__})
            result = nelder_mead(space, evaluator, x0, nm_cfg, should_stop=stop)
            for entry in result.history:
                emit(entry)
            return {"result": result, "finished": not handle.stop_event.is_set()}

        if cfg.strategy == "nsga2":
            ga_cfg = GaConfig(**_ga_params(params, seed))
            front_holder = []

            def progress(gen, population):
                import math

                best = min(
                    (sum(c.level_objectives.values()) for c in population if c.feasible),
                    default=math.inf,
                )
                emit(
                    {
                        "iteration": gen,
                        "best_objective": best,
                        "mean_objective": best,
                        "evaluations": gen * ga_cfg.population,
                    },
                    extra={"front_size": len(population)},
                )

            front = nsga2(space, evaluator, ga_cfg, progress=progress, should_stop=stop)
            from ..learn import LearnResult

            best = front[0]
            result = LearnResult(best, [], ga_cfg.population * ga_cfg.generations)
            return {
                "result": result,
                "finished": not handle.stop_event.is_set(),
                "front": [c.to_dict() for c in front],
            }

        raise ValueError(f"unknown strategy: {cfg.strategy!r}")


def _ga_params(params, seed, drop=()):
    out = {
        k: v
        for k, v in params.items()
        if k in GaConfig.__dataclass_fields__ and k not in drop
    }
    out.setdefault("seed", seed)
    return out


def _json_num(x):
    import math

    return None if x is None or not math.isfinite(x) else x


def _warn_event(job_id, message):
    return {
        "job_id": job_id,
        "iteration": 0,
        "best_objective": None,
        "mean_objective": None,
        "evaluations": 0,
        "timestamp": time.time(),
        "warning": message,
    }
