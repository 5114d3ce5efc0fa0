"""
VerifyEngine - runs registered acceptance criteria and gathers their reports.

Criteria fan out over a thread pool; results are gathered in registry order and
golden values are applied afterwards, serially, so the summary never depends on
scheduling.

Author: openergodic contributors
"""

import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from openergodic.engine.core.report import InequalityReport, worst
from openergodic.utils.config import RunConfig
from openergodic.utils.errors import GoldenMissingError
from openergodic.utils.golden import GoldenStore

SUITES = ('core', 'full', 'empty')


@dataclass
class CheckContext:
    """What a criterion gets to run with."""
    config: RunConfig
    rng: np.random.Generator
    suite: str
    n_jobs: int = 1

    @property
    def full(self) -> bool:
        return self.suite == 'full'


@dataclass
class Outcome:
    """Reports of one criterion plus values to freeze or compare as goldens."""
    reports: List[InequalityReport]
    goldens: List[Tuple[str, float, str]] = field(default_factory=list)
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass
class Criterion:
    key: str
    title: str
    run: Callable[[CheckContext], Outcome]
    suites: Tuple[str, ...] = ('core', 'full')


@dataclass
class CriterionResult:
    criterion: str
    title: str
    report: InequalityReport
    seconds: Optional[float]
    passed: bool
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data = self.report.to_dict()
        return {
            'criterion': self.criterion,
            'title': self.title,
            'pass': self.passed,
            'lhs': data['lhs'],
            'rhs': data['rhs'],
            'margin': data['margin'],
            'seconds': self.seconds,
            'params': {**data['params'], **self.extra},
        }


class VerifyEngine:
    """
    Orchestrates one acceptance suite.
    Criteria with the same registry position always get the same random stream,
    whichever suite selects them.
    """

    def __init__(self, registry: Sequence[Criterion], config: RunConfig, timings: bool = False,
                 max_workers: Optional[int] = None):
        self.registry = list(registry)
        self.config = config
        self.timings = timings
        self.max_workers = max_workers or config.n_jobs

        # Engine state
        self.running = False
        self.suite = None
        self.completed = 0
        self.failed = 0
        self.total = 0
        self._lock = threading.Lock()

        # Interface callbacks
        self.event_callbacks = []

        logging.info(f"VerifyEngine initialized with {len(self.registry)} criteria")

    # ===================== CALLBACKS =====================

    def register_event_callback(self, callback: Callable[[str, Dict], None]):
        """Register a callback for events (criterion started/finished, suite finished)."""
        self.event_callbacks.append(callback)
        logging.info(f"Registered event callback: {getattr(callback, '__name__', callback)}")

    def unregister_event_callback(self, callback):
        if callback in self.event_callbacks:
            self.event_callbacks.remove(callback)

    def _notify_event(self, event_type: str, data: Dict[str, Any]):
        for callback in self.event_callbacks:
            try:
                callback(event_type, data)
            except Exception as e:
                logging.error(f"Error in event callback {getattr(callback, '__name__', callback)}: {e}")

    # ===================== RUNNING =====================

    def select(self, suite: str) -> List[Tuple[int, Criterion]]:
        if suite not in SUITES:
            raise ValueError(f"Suite must be one of {SUITES}, got {suite!r}")
        return [(i, c) for i, c in enumerate(self.registry) if suite in c.suites]

    def _run_one(self, criterion: Criterion, seed: np.random.SeedSequence,
                 suite: str) -> Tuple[Outcome, float]:
        self._notify_event('criterion_started', {'criterion': criterion.key})
        logging.info(f"Criterion {criterion.key} ({criterion.title}) started")
        context = CheckContext(self.config, np.random.default_rng(seed), suite, n_jobs=self.config.n_jobs)
        start = time.perf_counter()
        try:
            outcome = criterion.run(context)
        except GoldenMissingError:
            raise
        except Exception as e:
            logging.error(f"Criterion {criterion.key} raised {type(e).__name__}: {e}")
            outcome = Outcome([InequalityReport(criterion.key, float('nan'), float('nan'))],
                              params={'error': f"{type(e).__name__}: {e}"})
        seconds = time.perf_counter() - start
        with self._lock:
            self.completed += 1
        logging.info(f"Criterion {criterion.key} finished in {seconds:.2f} s")
        return outcome, seconds

    def run(self, suite: str) -> List[CriterionResult]:
        """
        Run every criterion tagged with suite.
        :param suite: str, one of core, full, empty
        :return: results in registry order
        """
        selected = self.select(suite)
        seeds = np.random.SeedSequence(self.config.seed).spawn(len(self.registry))
        golden = GoldenStore(self.config.golden_path, self.config.golden_mode)

        self.running, self.suite = True, suite
        self.completed = self.failed = 0
        self.total = len(selected)
        logging.info(f"Running suite {suite} with {self.total} criteria (seed {self.config.seed})")

        try:
            with ThreadPoolExecutor(max_workers=max(1, self.max_workers)) as executor:
                futures = [executor.submit(self._run_one, c, seeds[i], suite) for i, c in selected]
                # gather in submission order
                outcomes = [future.result() for future in futures]
        finally:
            self.running = False

        results = []
        for (_, criterion), (outcome, seconds) in zip(selected, outcomes):
            reports = list(outcome.reports)
            for key, value, comparison in outcome.goldens:
                checked = golden.apply(key, value, comparison)
                if checked is not None:
                    reports.append(checked)
            summary = worst(criterion.key, reports)
            passed = bool(reports) and all(r.passed for r in reports)
            self.failed += not passed
            result = CriterionResult(criterion.key, criterion.title, summary,
                                     round(seconds, 6) if self.timings else None, passed, dict(outcome.params))
            results.append(result)
            self._notify_event('criterion_finished', {'criterion': criterion.key, 'pass': passed})
        golden.save()

        self._notify_event('suite_finished', self.get_status())
        logging.info(f"Suite {suite}: {self.total - self.failed}/{self.total} criteria passed")
        return results

    def get_status(self) -> Dict[str, Any]:
        """Current engine status."""
        return {
            'running': self.running,
            'suite': self.suite,
            'completed': self.completed,
            'failed': self.failed,
            'total': self.total,
            'golden_mode': self.config.golden_mode,
        }
