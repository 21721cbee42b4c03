import logging
from concurrent.futures import ThreadPoolExecutor, as_completed

from tqdm import tqdm


def ordered_map(fn, items, jobs=1, desc=None, show_progress=False):
    """Apply ``fn`` to every item with up to ``jobs`` workers.

    Results are gathered as they complete and re-ordered by input index, so
    the returned list never depends on the number of workers.
    """
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) <= 1:
        iterator = tqdm(items, desc=desc, disable=not show_progress)
        return [fn(item) for item in iterator]

    results = {}
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {pool.submit(fn, item): idx for idx, item in enumerate(items)}
        for future in tqdm(as_completed(futures), total=len(futures), desc=desc,
                           disable=not show_progress):
            results[futures[future]] = future.result()

    indices = sorted(results.keys())
    if len(indices) != len(items):
        logger = logging.getLogger("mvqa_core.parallel")
        logger.warning("Gathered {} of {} results".format(len(indices), len(items)))
    return [results[i] for i in indices]
