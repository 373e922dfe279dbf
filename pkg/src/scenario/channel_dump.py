"""
Channel-set dump files for bit-exact replay of a solve.

A dump is a NumPy ``.npz`` archive holding the three channel arrays as
little-endian complex128 (pairs of float64), the group sizes, the dimensions
and the (seed, realization) that produced it.
"""

from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np

from system.errors import ConfigurationError, InvalidInputError
from system.types import ChannelSet
from utils.logging import info_print

DUMP_FORMAT_VERSION = 1
_LE_COMPLEX = np.dtype("<c16")


def save_channels(path: Union[str, Path], ch: ChannelSet, seed: int = -1,
                  realization: int = 0) -> Path:
    """Write ``ch`` to ``path`` (``.npz`` is appended if missing) and return the final path"""
    path = Path(path)
    if path.suffix != ".npz":
        path = path.with_name(path.name + ".npz")
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path,
             format_version=np.array(DUMP_FORMAT_VERSION),
             dims=np.array([ch.n, ch.m, ch.num_groups, ch.num_users], dtype="<i8"),
             group_sizes=np.array(ch.group_sizes, dtype="<i8"),
             seed=np.array(seed, dtype="<i8"),
             realization=np.array(realization, dtype="<i8"),
             h_ts=ch.h_ts.astype(_LE_COMPLEX),
             h_direct=ch.h_direct.astype(_LE_COMPLEX),
             h_irs=ch.h_irs.astype(_LE_COMPLEX))
    info_print(f"wrote channel dump {path} (N={ch.n}, M={ch.m}, K={ch.num_users})")
    return path


def load_channels(path: Union[str, Path]) -> Tuple[ChannelSet, Dict[str, Any]]:
    """Read a dump written by save_channels; returns the channel set and its metadata"""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"channel dump not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as data:
            version = int(data["format_version"])
            if version != DUMP_FORMAT_VERSION:
                raise ConfigurationError(f"unsupported channel dump version {version} in {path}")
            n, m, num_groups, num_users = (int(v) for v in data["dims"])
            ch = ChannelSet(data["h_ts"], data["h_direct"], data["h_irs"],
                            tuple(int(k) for k in data["group_sizes"]))
            meta = {"seed": int(data["seed"]), "realization": int(data["realization"])}
    except (OSError, ValueError, KeyError) as e:
        raise ConfigurationError(f"cannot read channel dump {path}: {e}") from e
    if (ch.n, ch.m, ch.num_groups, ch.num_users) != (n, m, num_groups, num_users):
        raise InvalidInputError(f"channel dump {path} has inconsistent dimensions")
    return ch, meta
