"""
Worker-pool and random-stream utilities.

.. include:: ../include/links.rst
"""
import zlib
import multiprocessing as mp

from IPython import embed

import numpy as np

try:
    from tqdm import tqdm
except:
    tqdm = None


def parallel_map(func, tasks, cores=1, progress=False, desc=None):
    """
    Apply a function to a list of tasks, optionally using a pool of
    workers.

    Results are always returned in task order.  How the work is split into
    tasks is left to the caller; as long as the split does not depend on
    the number of cores, the results are identical for any number of cores.

    Args:
        func (callable):
            Function applied to each task.  Must be picklable (i.e., defined
            at module level, or a :obj:`functools.partial` of such a
            function) when ``cores > 1``.
        tasks (:obj:`list`):
            Task arguments; each is passed as the single argument to
            ``func``.
        cores (:obj:`int`, optional):
            Number of worker processes.  If 1 or less, the tasks are
            executed serially in the calling process.
        progress (:obj:`bool`, optional):
            Show a progress bar (requires ``tqdm``).
        desc (:obj:`str`, optional):
            Progress bar label.

    Returns:
        :obj:`list`: The result of each task.
    """
    _tasks = list(tasks)
    show = progress and tqdm is not None
    ncores = min(int(cores), len(_tasks))
    if ncores <= 1:
        it = map(func, _tasks)
        if show:
            it = tqdm(it, total=len(_tasks), desc=desc)
        return list(it)

    with mp.Pool(ncores) as pool:
        it = pool.imap(func, _tasks)
        if show:
            it = tqdm(it, total=len(_tasks), desc=desc)
        return list(it)


def substream(seed, name):
    """
    Construct an independent random number generator for a named purpose.

    All randomness in a run flows from a single seed; each consumer (e.g.,
    ``'phantom'`` or ``'noise'``) draws from its own stream, so adding
    draws to one consumer does not change the numbers drawn by another.

    Args:
        seed (:obj:`int`):
            Base seed.  If None, the stream is seeded from fresh system
            entropy.
        name (:obj:`str`):
            Stream name.

    Returns:
        `numpy.random.Generator`_: Generator for the named stream.
    """
    key = zlib.crc32(name.encode('utf-8'))
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key,)))

