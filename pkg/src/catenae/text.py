"""Corpus ingestion: tokenization, sentence segmentation, context windows,
and external annotation files (entity roles, relation spans, modification
pairs, synonyms).

No linguistic analysis happens here.  Syntactic roles, relation spans and
modification pairs are *ingested* from annotation files, never inferred.

Annotation TSV format (one record per line, ``#`` starts a comment)::

    ent\t<sentence_index>\t<entity_id>\t<s|o|x>
    rel\t<label>\t<token_start>\t<token_end>
    mod\t<head_term>\t<dependent_term>

Synonym TSV format::

    term\tsyn1,syn2,...

Corpora are either a directory of UTF-8 ``.txt`` files (doc_id = filename
stem) or a JSON-lines file with ``{"id": ..., "text": ...}`` records.
"""

from __future__ import annotations

import json
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from .errors import DataError, ParameterError, ParseError, ValidationError

# The closed vocabulary of rhetorical relation labels accepted in
# annotation files.
RELATION_LABELS = frozenset({
    "attribution", "background", "cause-result", "comparison", "condition",
    "consequence", "contrast", "elaboration", "enablement", "evaluation",
    "explanation", "manner-means", "summary", "temporal", "topic-comment",
})

ROLES = frozenset({"s", "o", "x"})

_DATA_DIR = Path(__file__).parent / "data"

_WORD_RE = re.compile(r"\S+")

# Characters treated as closing/opening clutter around a sentence terminal.
_CLOSERS = "\"')]}»’”"
_OPENERS = "\"'([{«‘“"
_TERMINALS = ".!?"


def default_stopwords() -> frozenset[str]:
    """Stopword list shipped with the package (one word per line)."""
    return load_wordlist(_DATA_DIR / "stopwords.txt")


def default_abbreviations() -> frozenset[str]:
    """Abbreviation list shipped with the package, used by the sentence splitter."""
    return load_wordlist(_DATA_DIR / "abbreviations.txt")


def load_wordlist(path: str | Path) -> frozenset[str]:
    """Load a lowercased one-entry-per-line word list; ``#`` starts a comment."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


@dataclass(frozen=True)
class TokenizeConfig:
    """Controls normalization and filtering during tokenization.

    ``stopwords=None`` disables removal entirely; pass a set to filter.
    ``stemmer`` is an optional hook applied after the built-in
    normalization (none is shipped; the default pipeline does not stem).
    """

    stopwords: frozenset[str] | None = None
    abbreviations: frozenset[str] = field(default_factory=default_abbreviations)
    stemmer: object | None = None  # Callable[[str], str]

    def normalize(self, surface: str) -> str:
        norm = _strip_punct(surface.lower())
        if norm and self.stemmer is not None:
            norm = self.stemmer(norm)
        return norm


@dataclass(frozen=True)
class Token:
    """One word token.

    ``position`` is the token's index among *all* normalized word tokens of
    the document (the raw position).  When a stopword filter is active the
    retained tokens keep their raw positions, so positions stay strictly
    increasing but may have gaps; without filtering they are contiguous.
    """

    surface: str
    normalized: str
    position: int
    sentence_index: int = 0


@dataclass(frozen=True)
class Document:
    """A tokenized document with its sentence segmentation.

    ``sentences`` holds ``(start, end)`` half-open index ranges that
    partition ``tokens``.
    """

    doc_id: str
    tokens: tuple[Token, ...]
    sentences: tuple[tuple[int, int], ...]

    def sentence_tokens(self, index: int) -> tuple[Token, ...]:
        start, end = self.sentences[index]
        return self.tokens[start:end]

    @property
    def terms(self) -> tuple[str, ...]:
        return tuple(t.normalized for t in self.tokens)


@dataclass(frozen=True)
class AnnotationSet:
    """Externally supplied structure for one document.

    ``entity_mentions`` are ``(sentence_index, entity_id, role)`` with role
    in ``{s, o, x}``; ``relation_spans`` are ``(label, token_start,
    token_end)`` over document token positions; ``modifications`` are
    ``(head_term, dependent_term)`` pairs used to orient word-graph edges;
    ``synonyms`` maps a normalized term to its synonyms in file order.
    """

    entity_mentions: tuple[tuple[int, str, str], ...] = ()
    relation_spans: tuple[tuple[str, int, int], ...] = ()
    modifications: tuple[tuple[str, str], ...] = ()
    synonyms: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for sent, entity, role in self.entity_mentions:
            if role not in ROLES:
                raise ValidationError(f"role {role!r} for entity {entity!r} not in {{s, o, x}}")
            if sent < 0:
                raise ValidationError(f"negative sentence index {sent} for entity {entity!r}")
        for label, start, end in self.relation_spans:
            if label not in RELATION_LABELS:
                raise ValidationError(f"unknown relation label {label!r}")
            if start < 0 or start > end:
                raise ValidationError(f"bad relation span ({start}, {end}) for {label!r}")


def _strip_punct(chunk: str) -> str:
    """Strip leading/trailing Unicode punctuation and symbols from a chunk."""
    start, end = 0, len(chunk)
    while start < end and unicodedata.category(chunk[start])[0] in "PS":
        start += 1
    while end > start and unicodedata.category(chunk[end - 1])[0] in "PS":
        end -= 1
    return chunk[start:end]


def tokenize(raw_text: str, config: TokenizeConfig | None = None) -> tuple[Token, ...]:
    """Split ``raw_text`` into normalized word tokens.

    Chunks are whitespace-separated; normalization lowercases and strips
    surrounding punctuation.  Chunks that normalize to nothing (pure
    punctuation) are dropped.  Stopword removal, when configured, drops
    tokens but preserves raw positions.
    """
    config = config or TokenizeConfig()
    tokens: list[Token] = []
    position = 0
    for match in _WORD_RE.finditer(raw_text):
        surface = match.group()
        normalized = config.normalize(surface)
        if not normalized:
            continue
        if config.stopwords is not None and normalized in config.stopwords:
            position += 1
            continue
        tokens.append(Token(surface=surface, normalized=normalized, position=position))
        position += 1
    return tuple(tokens)


def decode_text(data: bytes, encoding: str = "utf-8") -> str:
    """Decode raw bytes, reporting the byte offset of any failure."""
    try:
        return data.decode(encoding)
    except UnicodeDecodeError as exc:
        raise DataError(
            f"invalid {encoding} input: {exc.reason} at byte offset {exc.start}"
        ) from exc


def _ends_sentence(chunk: str) -> bool:
    core = chunk.rstrip(_CLOSERS)
    return bool(core) and core[-1] in _TERMINALS


def _starts_capital(chunk: str) -> bool:
    core = chunk.lstrip(_OPENERS)
    return bool(core) and core[0].isupper()


def segment_sentences(
    tokens: Sequence[Token],
    raw_text: str,
    abbreviations: frozenset[str] | None = None,
) -> tuple[tuple[int, int], ...]:
    """Compute sentence ranges over ``tokens``.

    A sentence ends at a chunk whose terminal character is one of ``.!?``
    when the next chunk begins with a capital (or at end of text), unless
    the chunk is a known abbreviation.  Returns half-open ``(start, end)``
    ranges into the token list; degenerate input yields one sentence.
    """
    if abbreviations is None:
        abbreviations = default_abbreviations()
    if not tokens:
        return ()

    # Re-scan the raw chunks so punctuation-only chunks (dropped during
    # tokenization) can still terminate a sentence.
    chunks = _WORD_RE.findall(raw_text)
    sentence_of_position: dict[int, int] = {}
    sentence = 0
    position = 0
    assigned_any = False
    for i, chunk in enumerate(chunks):
        if _strip_punct(chunk.lower()):
            sentence_of_position[position] = sentence
            position += 1
            assigned_any = True
        if not assigned_any:
            continue
        if not _ends_sentence(chunk):
            continue
        if chunk.lower() in abbreviations:
            continue
        if i + 1 == len(chunks) or _starts_capital(chunks[i + 1]):
            sentence += 1
            assigned_any = False

    ranges: list[tuple[int, int]] = []
    start = 0
    current = sentence_of_position.get(tokens[0].position, 0)
    for idx, token in enumerate(tokens):
        sid = sentence_of_position.get(token.position, current)
        if sid != current:
            ranges.append((start, idx))
            start = idx
            current = sid
    ranges.append((start, len(tokens)))
    return tuple(ranges)


def make_document(doc_id: str, raw_text: str, config: TokenizeConfig | None = None) -> Document:
    """Tokenize and segment ``raw_text`` into a :class:`Document`."""
    config = config or TokenizeConfig()
    tokens = tokenize(raw_text, config)
    ranges = segment_sentences(tokens, raw_text, config.abbreviations)
    assigned = []
    for sid, (start, end) in enumerate(ranges):
        for token in tokens[start:end]:
            assigned.append(replace(token, sentence_index=sid))
    return Document(doc_id=doc_id, tokens=tuple(assigned), sentences=ranges)


def filter_stopwords(tokens: Sequence[Token], stopwords: frozenset[str]) -> tuple[Token, ...]:
    """Filtered view of a token sequence; raw positions are preserved."""
    return tuple(t for t in tokens if t.normalized not in stopwords)


def extract_windows(doc: Document, window_size: int) -> Counter:
    """Multiset of ordered co-occurrence pairs within a fixed window.

    For a token at position ``i``, pairs it with every later token at a
    position in ``(i, i + window_size)``.  Windows never cross sentence
    boundaries.
    """
    if window_size < 2:
        raise ParameterError(f"window_size must be >= 2, got {window_size}")
    pairs: Counter = Counter()
    for start, end in doc.sentences:
        sentence = doc.tokens[start:end]
        for i, left in enumerate(sentence):
            for right in sentence[i + 1:]:
                if right.position - left.position >= window_size:
                    break
                pairs[(left.normalized, right.normalized)] += 1
    return pairs


def load_annotations(path: str | Path, doc: Document | None = None) -> AnnotationSet:
    """Parse an annotation TSV; validate against ``doc`` bounds when given."""
    path = Path(path)
    mentions: list[tuple[int, str, str]] = []
    spans: list[tuple[str, int, int]] = []
    mods: list[tuple[str, str]] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        kind = fields[0]
        if kind == "ent":
            if len(fields) != 4:
                raise ParseError("ent record needs 4 fields", str(path), lineno)
            try:
                sent = int(fields[1])
            except ValueError:
                raise ParseError(f"bad sentence index {fields[1]!r}", str(path), lineno) from None
            if fields[3] not in ROLES:
                raise ValidationError(f"{path}:{lineno}: role {fields[3]!r} not in {{s, o, x}}")
            mentions.append((sent, fields[2], fields[3]))
        elif kind == "rel":
            if len(fields) != 4:
                raise ParseError("rel record needs 4 fields", str(path), lineno)
            label = fields[1]
            if label not in RELATION_LABELS:
                raise ValidationError(f"{path}:{lineno}: unknown relation label {label!r}")
            try:
                start, end = int(fields[2]), int(fields[3])
            except ValueError:
                raise ParseError(f"bad token span {fields[2]!r}..{fields[3]!r}", str(path), lineno) from None
            if start > end or start < 0:
                raise ValidationError(f"{path}:{lineno}: span reversed or negative: {start}..{end}")
            if doc is not None and end >= len(doc.tokens):
                raise ValidationError(
                    f"{path}:{lineno}: span {start}..{end} outside document of {len(doc.tokens)} tokens"
                )
            spans.append((label, start, end))
        elif kind == "mod":
            if len(fields) != 3:
                raise ParseError("mod record needs 3 fields", str(path), lineno)
            mods.append((fields[1], fields[2]))
        else:
            raise ParseError(f"unknown record type {kind!r}", str(path), lineno)
    return AnnotationSet(
        entity_mentions=tuple(mentions),
        relation_spans=tuple(spans),
        modifications=tuple(mods),
    )


def load_synonyms(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Parse a synonym TSV (``term\tsyn1,syn2,...``) preserving file order."""
    path = Path(path)
    synonyms: dict[str, tuple[str, ...]] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ParseError("synonym record needs 2 tab-separated fields", str(path), lineno)
        term = fields[0].lower()
        syns = tuple(s.strip().lower() for s in fields[1].split(",") if s.strip())
        if not syns:
            raise ParseError(f"no synonyms listed for {term!r}", str(path), lineno)
        synonyms[term] = syns
    return synonyms


def iter_corpus_texts(path: str | Path) -> Iterator[tuple[str, str]]:
    """Yield ``(doc_id, raw_text)`` from a corpus directory or JSON-lines file."""
    path = Path(path)
    if path.is_dir():
        for txt in sorted(path.glob("*.txt")):
            yield txt.stem, decode_text(txt.read_bytes())
    elif path.is_file():
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", str(path), lineno) from exc
            if not isinstance(record, dict) or "id" not in record or "text" not in record:
                raise ParseError("record needs 'id' and 'text' fields", str(path), lineno)
            yield str(record["id"]), str(record["text"])
    else:
        raise DataError(f"corpus path does not exist: {path}")


def load_corpus(path: str | Path, config: TokenizeConfig | None = None) -> list[Document]:
    """Load and tokenize every document under ``path``; doc_ids must be unique."""
    docs: list[Document] = []
    seen: set[str] = set()
    for doc_id, text in iter_corpus_texts(path):
        if doc_id in seen:
            raise DataError(f"duplicate doc_id {doc_id!r} in corpus {path}")
        seen.add(doc_id)
        docs.append(make_document(doc_id, text, config))
    return docs
