import asyncio
import pickle
import signal
import uuid
from abc import ABC, abstractmethod
from asyncio import Future
from dataclasses import dataclass
from enum import Enum, auto
from multiprocessing import Event, Process, Queue
from multiprocessing.synchronize import Event as EventType
from queue import Empty
from typing import Optional

from filtered_lrd.logger import logging

logger = logging.getLogger(__name__)

# seconds between liveness checks while a queue is idle
_POLL_INTERVAL = 0.5
_JOIN_TIMEOUT = 5.0


class WorkerState(Enum):
    IDLE = auto()
    RUNNING = auto()
    STOPPED = auto()


@dataclass
class Channels:
    """
    Queues and the stop flag shared between a controller and its worker process.
    """

    tasks: Queue
    replies: Queue
    stop_event: EventType


@dataclass
class Envelope[I]:
    id: str
    payload: I


@dataclass
class Reply[O]:
    id: str
    payload: Optional[O] = None
    error: Optional[BaseException] = None


def _portable(error: BaseException) -> BaseException:
    """
    The error itself when it survives pickling, else a RuntimeError with its text.
    """
    try:
        pickle.loads(pickle.dumps(error))
    except Exception:
        return RuntimeError(f"{type(error).__name__}: {error}")
    return error


class BaseWorker[I, O](ABC):
    """
    Runs in the child process. Every envelope gets exactly one reply, carrying either
    the result or the exception raised while computing it; a failing task does not
    stop the worker.
    """

    def __init__(self):
        self._state = WorkerState.IDLE
        self._channels: Optional[Channels] = None
        self.processed = 0

    @property
    def state(self) -> WorkerState:
        return self._state

    def attach(self, channels: Channels) -> None:
        self._channels = channels

    def initialize(self) -> None:  # noqa: B027
        """Per-process setup, called once before the loop starts."""

    def run_worker(self) -> None:
        """Entry point for the worker process"""
        signal.signal(signal.SIGTERM, lambda sig, frame: self.stop())
        self.initialize()
        self.run_loop()

    def run_loop(self) -> None:
        assert self._channels is not None
        channels = self._channels
        self._state = WorkerState.RUNNING
        try:
            while not channels.stop_event.is_set():
                try:
                    envelope: Optional[Envelope[I]] = channels.tasks.get(timeout=_POLL_INTERVAL)
                except Empty:
                    continue
                if envelope is None:
                    break
                channels.replies.put(self._answer(envelope))
        finally:
            self._state = WorkerState.STOPPED
            logger.debug("Worker finished after %d tasks", self.processed)

    def _answer(self, envelope: Envelope[I]) -> Reply[O]:
        try:
            result = self.process_message(envelope.payload)
        except Exception as e:
            logger.exception("Task %s failed", envelope.id)
            return Reply(id=envelope.id, error=_portable(e))
        finally:
            self.processed += 1
        return Reply(id=envelope.id, payload=result)

    def stop(self) -> None:
        if self._channels is not None:
            self._channels.stop_event.set()

    @abstractmethod
    def process_message(self, message: I) -> O:
        """Process a single input message and return result"""


class BaseController[I, O]:
    """
    Owns one worker process. `request` sends a message and awaits the reply that
    carries the same correlation ID.
    """

    _worker: BaseWorker[I, O]
    _process: Optional[Process]
    _channels: Channels
    _pending: dict[str, Future[O]]
    _reply_task: Optional[asyncio.Task]

    def __init__(self, worker: BaseWorker[I, O]):
        self._worker = worker
        self._process = None
        self._channels = Channels(tasks=Queue(), replies=Queue(), stop_event=Event())
        self._pending = {}
        self._reply_task = None

    @property
    def in_flight(self) -> int:
        return len(self._pending)

    def start(self) -> None:
        """Start the worker process. Needs a running event loop."""
        self._worker.attach(self._channels)
        self._process = Process(target=self._worker.run_worker, daemon=True)
        self._process.start()
        logger.debug("Started worker process %s", self._process.pid)
        self._reply_task = asyncio.get_running_loop().create_task(self._collect_replies())

    def _fail_pending(self, error: BaseException) -> None:
        for future in self._pending.values():
            if not future.done():
                future.set_exception(error)
        self._pending.clear()

    async def _collect_replies(self) -> None:
        loop = asyncio.get_running_loop()
        while True:
            try:
                reply: Reply[O] = await loop.run_in_executor(
                    None, self._channels.replies.get, True, _POLL_INTERVAL
                )
            except Empty:
                if self._channels.stop_event.is_set():
                    break
                if self._process is not None and not self._process.is_alive():
                    self._fail_pending(
                        RuntimeError(f"Worker process exited with code {self._process.exitcode}")
                    )
                    break
                continue
            except Exception as e:
                logger.exception("Error collecting replies")
                self._fail_pending(e)
                break

            future = self._pending.pop(reply.id, None)
            if future is None or future.done():
                continue
            if reply.error is not None:
                future.set_exception(reply.error)
            else:
                future.set_result(reply.payload)

    def stop(self) -> None:
        self._channels.stop_event.set()
        if self._process is not None and self._process.is_alive():
            self._channels.tasks.put(None)
            self._process.join(timeout=_JOIN_TIMEOUT)
            if self._process.is_alive():
                self._process.terminate()
        if self._reply_task:
            self._reply_task.cancel()
        logger.debug("Stopped worker process")

    async def request(self, message: I) -> O:
        """Send a message and wait for its reply asynchronously"""
        msg_id = str(uuid.uuid4())
        future: Future[O] = asyncio.get_running_loop().create_future()
        self._pending[msg_id] = future
        try:
            self._channels.tasks.put(Envelope(id=msg_id, payload=message))
            return await future
        except BaseException:
            self._pending.pop(msg_id, None)
            raise
