import os
import tempfile
from pathlib import Path
from typing import Iterable, Tuple, Union

PathLike = Union[str, Path]


def _stage(path: Path, data: bytes) -> str:
    """Write `data` to a temporary file next to `path` and return its name."""
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp_path = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "wb") as tmp:
            tmp.write(data)
        # mkstemp creates 0600; give the file the mode open() would
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp_path, 0o666 & ~umask)
    except BaseException:
        os.unlink(tmp_path)
        raise
    return tmp_path


def _as_bytes(data: Union[bytes, str]) -> bytes:
    return data.encode("utf-8") if isinstance(data, str) else data


def atomic_write(path: PathLike, data: Union[bytes, str]) -> None:
    """
    Write a file so that readers see either the old content or the new one.
    :param path: Destination file.
    :param data: Bytes, or text encoded as UTF-8.
    """
    atomic_write_all([(path, data)])


def atomic_write_all(files: Iterable[Tuple[PathLike, Union[bytes, str]]]) -> None:
    """
    Write several files, staging all of them before any destination is replaced.
    When staging fails no destination has been touched and no temporary file is left.
    """
    staged = []
    try:
        for path, data in files:
            path = Path(path)
            staged.append((_stage(path, _as_bytes(data)), path))
    except BaseException:
        for tmp_path, _ in staged:
            os.unlink(tmp_path)
        raise
    for index, (tmp_path, path) in enumerate(staged):
        try:
            os.replace(tmp_path, path)
        except BaseException:
            for leftover, _ in staged[index:]:
                if os.path.exists(leftover):
                    os.unlink(leftover)
            raise
