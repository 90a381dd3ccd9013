"""Prototype corpus: descriptive paragraphs grounding novel role design.

Corpus files are plain text: two front-matter lines (name:, source:),
a blank line, then the paragraph. Descriptions shorter than 200
characters carry too little signal and are rejected. The core pipeline
never touches the network; fetch_prototype() is an optional helper that
populates a corpus directory from a public encyclopedia API in the same
format.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Union

MIN_DESCRIPTION = 200


class CorpusError(Exception):
    pass


class PrototypeSource(Enum):
    WIKIPEDIA = "wikipedia-corpus"
    MONSTER = "monster-corpus"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Prototype:
    name: str
    description: str
    source: PrototypeSource = PrototypeSource.CUSTOM


def parse_corpus_file(text: str, where: str = "<corpus>") -> Prototype:
    lines = text.splitlines()
    header = {}
    body_start = None
    for i, line in enumerate(lines):
        if not line.strip():
            body_start = i + 1
            break
        if ":" not in line:
            raise CorpusError(f"{where}: malformed front-matter line {i + 1}: {line!r}")
        key, _, value = line.partition(":")
        header[key.strip().lower()] = value.strip()
    if body_start is None:
        raise CorpusError(f"{where}: missing blank line after front-matter")
    if "name" not in header or not header["name"]:
        raise CorpusError(f"{where}: front-matter needs a name")
    try:
        source = PrototypeSource(header.get("source", "custom"))
    except ValueError:
        raise CorpusError(f"{where}: unknown source {header.get('source')!r}") from None
    description = "\n".join(lines[body_start:]).strip()
    if len(description) < MIN_DESCRIPTION:
        raise CorpusError(
            f"{where}: description has {len(description)} characters, need {MIN_DESCRIPTION}"
        )
    return Prototype(header["name"], description, source)


def load_prototypes(path: Union[str, Path]) -> List[Prototype]:
    directory = Path(path)
    if not directory.is_dir():
        raise CorpusError(f"corpus directory {directory} does not exist")
    protos = []
    for file in sorted(directory.glob("*.txt")):
        protos.append(parse_corpus_file(file.read_text(encoding="utf-8"), str(file)))
    return protos


def write_corpus_file(directory: Union[str, Path], proto: Prototype) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    slug = "".join(c if c.isalnum() else "_" for c in proto.name.lower()).strip("_")
    path = directory / f"{slug}.txt"
    path.write_text(
        f"name: {proto.name}\nsource: {proto.source.value}\n\n{proto.description}\n",
        encoding="utf-8",
    )
    return path


def fetch_prototype(title: str, directory: Union[str, Path],
                    endpoint: str = "https://en.wikipedia.org/api/rest_v1/page/summary/") -> Path:
    """Fetch one encyclopedia summary into the corpus format. Optional
    plumbing; the pipeline itself only reads local files."""
    import requests

    resp = requests.get(endpoint + title.replace(" ", "_"), timeout=30)
    resp.raise_for_status()
    data = resp.json()
    description = data.get("extract", "")
    if len(description) < MIN_DESCRIPTION:
        raise CorpusError(f"summary for {title!r} is too short ({len(description)} chars)")
    proto = Prototype(data.get("title", title), description, PrototypeSource.WIKIPEDIA)
    return write_corpus_file(directory, proto)
