"""Worker pool for independent (sample, theta, energy-batch) tasks."""

from typing import Any, Callable, Iterable, List, Optional

from joblib import Parallel, delayed

from idslab.core.config import Settings, settings as default_settings


def run_tasks(
    fn: Callable[..., Any],
    tasks: Iterable[Any],
    workers: Optional[int] = None,
    config: Optional[Settings] = None,
) -> List[Any]:
    """
    Apply ``fn`` to every task and return the results in task order.

    Ordering is what keeps reductions bitwise reproducible for any worker count.
    ``workers=None`` falls back to ``config.WORKERS``.
    """
    tasks = list(tasks)
    n_jobs = (config or default_settings).WORKERS if workers is None else workers
    if n_jobs == 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    return Parallel(n_jobs=n_jobs)(delayed(fn)(task) for task in tasks)
