"""
Counter-based random substreams.

Every random draw in the toolkit comes from a Generator derived from a master
seed and an integer key, e.g. (replicate, namespace, b, m). Streams for
different keys are independent, so results never depend on which worker
evaluates which cell or in what order.
"""
import numpy as np

# Namespaces of the cell keys used by the engines and the simulation lab
IMPUTE_FIRST = 1
BOOT_AFTER_IMPUTE = 2
BOOT_FIRST = 3
IMPUTE_AFTER_BOOT = 4
GENERATE_DATA = 5
CALIBRATE = 6
REPLICATE = 7


def derive_stream(seed, *key):
    """
    Generator for one cell.

    Args:
        seed (int): Nonnegative master seed
        *key (int): Nonnegative integers naming the cell

    Returns:
        numpy.random.Generator: Philox-backed generator for the cell
    """
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def generate_seed():
    """Fresh 63-bit seed from OS entropy, for runs started without --seed."""
    state = np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0]
    return int(state >> np.uint64(1))
