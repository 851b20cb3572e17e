import asyncio
from collections.abc import Sequence
from types import TracebackType
from typing import Optional

from filtered_lrd.background_worker import BaseController, BaseWorker
from filtered_lrd.errors import ContractError
from filtered_lrd.experiments.messages import ReplicateOutcome, ReplicateTask
from filtered_lrd.experiments.pipeline import compute_replicate
from filtered_lrd.logger import logging

logger = logging.getLogger(__name__)


def run_task(task: ReplicateTask) -> ReplicateOutcome:
    raw, normalized = compute_replicate(task.cfg, task.replicate, task.radius_index)
    return ReplicateOutcome(
        replicate=task.replicate,
        radius_index=task.radius_index,
        raw=raw,
        normalized=normalized,
    )


class ReplicateWorker(BaseWorker[ReplicateTask, ReplicateOutcome]):
    def process_message(self, message: ReplicateTask) -> ReplicateOutcome:
        return run_task(message)


class ReplicatePool:
    """
    Runs replicate tasks on `threads` worker processes, or inline when threads == 1.

    Outcomes come back in task order whatever the worker count.
    """

    threads: int
    _controllers: list[BaseController[ReplicateTask, ReplicateOutcome]]

    def __init__(self, threads: int = 1):
        if threads < 1:
            raise ContractError(f"threads must be >= 1, got {threads}")
        self.threads = threads
        self._controllers = []

    def __enter__(self) -> "ReplicatePool":
        return self

    def __exit__(
        self,
        exc_type: Optional[type[BaseException]],
        exc_val: Optional[BaseException],
        exc_tb: Optional[TracebackType],
    ) -> None:
        self.stop()

    def stop(self) -> None:
        for controller in self._controllers:
            controller.stop()
        self._controllers = []

    async def _map_async(self, tasks: Sequence[ReplicateTask]) -> list[ReplicateOutcome]:
        count = min(self.threads, len(tasks))
        self._controllers = [BaseController(ReplicateWorker()) for _ in range(count)]
        for controller in self._controllers:
            controller.start()
        logger.info("Started %d replicate workers", count)
        try:
            return list(
                await asyncio.gather(
                    *(
                        self._controllers[i % count].request(task)
                        for i, task in enumerate(tasks)
                    )
                )
            )
        finally:
            self.stop()

    def map(self, tasks: Sequence[ReplicateTask]) -> list[ReplicateOutcome]:
        if not tasks:
            return []
        if self.threads == 1:
            return [run_task(task) for task in tasks]
        return asyncio.run(self._map_async(tasks))
