"""Download, validate and cache published counterexample archives."""

from __future__ import annotations

import os
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urljoin

from . import oracle
from .engine import CounterexampleSet
from .graph import Graph6Error, graph6_decode
from .oracle import RamseyParams

DEFAULT_ARCHIVE_URL = "https://users.cecs.anu.edu.au/~bdm/data/"
CACHE_ENV = "RAMSEY_OVE_CACHE"


class FetchError(RuntimeError):
    """The archive could not be downloaded."""


class ArchiveValidationError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}" if lineno else message)


@dataclass(frozen=True)
class ArchiveSpec:
    name: str
    s: int
    t: int
    order: int
    filename: str
    expected_count: int

    @property
    def params(self) -> RamseyParams:
        return RamseyParams(self.s, self.t)


ARCHIVES = {
    "r46_35": ArchiveSpec("r46_35", 4, 6, 35, "r46_35some.g6", 37),
    "r55_42": ArchiveSpec("r55_42", 5, 5, 42, "r55_42some.g6", 656),
}


def cache_dir(override: str | os.PathLike | None = None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "ramsey_ove"


def cached_path(spec: ArchiveSpec, cache: str | os.PathLike | None = None) -> Path:
    return cache_dir(cache) / spec.filename


def validate_lines(spec: ArchiveSpec, lines: list[str]) -> None:
    """Check count, order and the counterexample property of every line."""
    graphs = []
    for lineno, line in enumerate(lines, start=1):
        try:
            g = graph6_decode(line, lineno)
        except Graph6Error as exc:
            raise ArchiveValidationError(str(exc).split(": ", 1)[-1], lineno) from exc
        if g.order != spec.order:
            raise ArchiveValidationError(f"graph has order {g.order}, expected {spec.order}", lineno)
        if not oracle.is_counterexample(g, spec.params):
            raise ArchiveValidationError(
                f"graph is not an R({spec.s},{spec.t}) counterexample", lineno
            )
        graphs.append(g)
    if len(graphs) != spec.expected_count:
        raise ArchiveValidationError(
            f"{spec.filename} has {len(graphs)} graphs, expected {spec.expected_count}"
        )


def fetch_archive(
    spec: ArchiveSpec,
    base_url: str = DEFAULT_ARCHIVE_URL,
    cache: str | os.PathLike | None = None,
    timeout: float = 60.0,
) -> Path:
    """Download ``spec`` into the cache; nothing is written unless validation passes."""
    url = urljoin(base_url if base_url.endswith("/") else base_url + "/", spec.filename)
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            payload = resp.read()
    except (urllib.error.URLError, OSError, ValueError) as exc:
        raise FetchError(f"could not download {url}: {exc}") from exc
    text = payload.decode("ascii", errors="replace")
    lines = [line for line in text.splitlines() if line.strip()]
    validate_lines(spec, lines)
    target = cached_path(spec, cache)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".partial-")
    try:
        with os.fdopen(fd, "w", encoding="ascii") as fh:
            fh.write("".join(line.strip() + "\n" for line in lines))
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return target


def load_archive(spec: ArchiveSpec, cache: str | os.PathLike | None = None, verify: bool = True) -> CounterexampleSet:
    path = cached_path(spec, cache)
    if not path.exists():
        raise FileNotFoundError(
            f"{path} not found; run `ramsey-ove fetch --archive {spec.name}` or copy the file there"
        )
    lines = [line for line in path.read_text(encoding="ascii").splitlines() if line.strip()]
    graphs = [graph6_decode(line, n) for n, line in enumerate(lines, start=1)]
    return CounterexampleSet(spec.params, spec.order, graphs, verify=verify)
