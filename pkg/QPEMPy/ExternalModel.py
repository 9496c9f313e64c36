"""
Module for evaluating an external executable through the line protocol: one CSV line of x coordinates
per point on stdin, one number per line on stdout, same order.
"""
import logging
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence, Union

import numpy as np

from .CoreTypes import ParameterError, ProtocolError

logger = logging.getLogger(__name__)


def format_request(x: np.ndarray) -> str:
    return "".join(",".join(f"{v:.17g}" for v in row) + "\n" for row in np.atleast_2d(x))


class ExternalModel:
    """
    Callable model backed by a subprocess. Each call splits the rows into contiguous slices, runs one
    process per slice (up to `workers` at a time) and reassembles the outputs in input order.
    """

    def __init__(self, command: Union[str, Sequence[str]], timeout: float = 60.0, workers: int = 1,
                 batch_size: Union[None, int] = None):

        # Assertion list
        if not command:
            raise ParameterError("External model command must not be empty.")
        if timeout <= 0:
            raise ParameterError(f"External model timeout must be positive, got {timeout}.")
        if workers < 1:
            raise ParameterError(f"Worker count must be at least 1, got {workers}.")
        if batch_size is not None and batch_size < 1:
            raise ParameterError(f"Batch size must be at least 1, got {batch_size}.")

        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.workers = workers
        self.batch_size = batch_size

    def _slices(self, count: int) -> list:
        if count == 0:
            return []
        size = self.batch_size or -(-count // self.workers)
        return [(start, min(start + size, count)) for start in range(0, count, size)]

    def _run_slice(self, x: np.ndarray, start: int, stop: int) -> np.ndarray:
        try:
            result = subprocess.run(
                self.command, input=format_request(x[start:stop]), capture_output=True, text=True,
                timeout=self.timeout
            )
        except subprocess.TimeoutExpired as err:
            raise ProtocolError(
                f"External model timed out after {self.timeout}s; outputs missing for point indices "
                f"{start}..{stop - 1}.", index=start
            ) from err
        except OSError as err:
            raise ProtocolError(f"Could not start external model {self.command[0]!r}: {err}", index=start) from err

        lines = [line for line in result.stdout.splitlines() if line.strip()]
        values = []
        for offset, line in enumerate(lines[:stop - start]):
            try:
                values.append(float(line))
            except ValueError as err:
                raise ProtocolError(
                    f"Malformed output {line.strip()!r} for point index {start + offset}.", index=start + offset
                ) from err

        received = start + len(values)
        if result.returncode != 0 or received < stop:
            missing = f"outputs missing for point indices {received}..{stop - 1}" if received < stop else "all outputs received"
            stderr = result.stderr.strip().splitlines()[-1:] if result.stderr else []
            raise ProtocolError(
                f"External model exited with status {result.returncode}; {missing}"
                + (f" ({stderr[0]})" if stderr else "") + ".", index=received
            )
        if len(lines) > stop - start:
            raise ProtocolError(
                f"External model returned {len(lines)} lines for {stop - start} points starting at index {start}.",
                index=start
            )
        return np.asarray(values, dtype=float)

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[0] == 0:
            return np.empty(0)
        slices = self._slices(x.shape[0])
        logger.info("Evaluating %d points with %s in %d slices", x.shape[0], self.command[0], len(slices))

        if self.workers == 1 or len(slices) == 1:
            parts = [self._run_slice(x, start, stop) for start, stop in slices]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                parts = list(pool.map(lambda bounds: self._run_slice(x, *bounds), slices))
        return np.concatenate(parts) if parts else np.empty(0)


def external_model(command: Union[str, Sequence[str]], timeout: float = 60.0, workers: int = 1,
                   batch_size: Union[None, int] = None) -> ExternalModel:
    return ExternalModel(command, timeout, workers, batch_size)
