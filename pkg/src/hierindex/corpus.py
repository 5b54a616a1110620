"""Corpus ingestion, text preprocessing and TF-IDF assembly."""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from nltk.stem.porter import PorterStemmer

log = logging.getLogger(__name__)

LAYOUTS = ("newsgroups", "flat")
TOKEN_RE = re.compile(r"[a-z]+")

_stemmer = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


class CorpusError(ValueError):
    pass


def default_stopwords() -> frozenset[str]:
    text = resources.files("hierindex").joinpath("stopwords.txt").read_text()
    return frozenset(w.strip() for w in text.split() if w.strip())


def read_stopwords(path: str | Path) -> frozenset[str]:
    return frozenset(w.strip().lower() for w in Path(path).read_text().split() if w.strip())


@dataclass(frozen=True)
class RawDocument:
    id: str
    text: str
    label: str | None = None


@dataclass
class PreprocessConfig:
    min_df: int = 2
    max_df_frac: float = 0.5
    min_token_len: int = 2
    strip_headers: bool = True
    stopwords: frozenset[str] = field(default_factory=default_stopwords)

    def to_dict(self) -> dict:
        return {
            "min_df": self.min_df,
            "max_df_frac": self.max_df_frac,
            "min_token_len": self.min_token_len,
            "strip_headers": self.strip_headers,
            "stopwords": sorted(self.stopwords),
            "tf": "raw-count",
            "idf": "ln(N/df)",
            "stemmer": "porter-original",
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PreprocessConfig":
        return cls(
            min_df=d["min_df"],
            max_df_frac=d["max_df_frac"],
            min_token_len=d["min_token_len"],
            strip_headers=d["strip_headers"],
            stopwords=frozenset(d["stopwords"]),
        )


@dataclass
class IngestReport:
    """Problems met while loading and vectorizing a corpus."""

    skipped: list[tuple[str, str]] = field(default_factory=list)
    empty_docs: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def warn(self, msg: str) -> None:
        log.warning(msg)
        self.warnings.append(msg)


@dataclass
class Vocabulary:
    terms: list[str]
    doc_freq: np.ndarray
    n_docs: int

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def idf(self) -> np.ndarray:
        return np.log(self.n_docs / self.doc_freq.astype(float))


@dataclass
class TfIdfMatrix:
    """Terms x documents weight matrix (CSC) with column ids."""

    weights: sp.csc_matrix
    column_ids: list[str]

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape


def load_corpus(path: str | Path, layout: str = "newsgroups",
                report: IngestReport | None = None) -> list[RawDocument]:
    """Read one document per file below ``path``.

    With the newsgroups layout every file sits in a directory named after
    its class and that name becomes the label. Files are visited in
    lexicographic path order. Files that cannot be read or look binary are
    skipped and listed in ``report``.
    """
    if layout not in LAYOUTS:
        raise ValueError(f"unknown corpus layout {layout!r}")
    root = Path(path)
    if not root.is_dir():
        raise CorpusError(f"corpus directory not readable: {root}")
    report = report if report is not None else IngestReport()
    docs = []
    for f in sorted(p for p in root.rglob("*") if p.is_file()):
        rel = f.relative_to(root).as_posix()
        try:
            raw = f.read_bytes()
        except OSError as e:
            report.skipped.append((rel, str(e)))
            report.warn(f"skipping unreadable file {rel}: {e}")
            continue
        if b"\x00" in raw:
            report.skipped.append((rel, "binary content"))
            report.warn(f"skipping undecodable file {rel}")
            continue
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            text = raw.decode("latin-1")
        label = None
        if layout == "newsgroups":
            label = f.parent.name if f.parent != root else None
        docs.append(RawDocument(id=rel, text=text, label=label))
    if not docs:
        report.warn(f"no documents found under {root}")
    return docs


def strip_header(text: str) -> str:
    """Drop header lines up to the first blank line (mail/news convention)."""
    lines = text.splitlines()
    for i, line in enumerate(lines):
        if not line.strip():
            return "\n".join(lines[i + 1:])
    return text


@lru_cache(maxsize=200_000)
def stem(token: str) -> str:
    return _stemmer.stem(token)


def preprocess(doc: RawDocument | str, config: PreprocessConfig | None = None) -> list[str]:
    config = config or PreprocessConfig()
    if isinstance(doc, RawDocument):
        text = doc.text
        if config.strip_headers:
            text = strip_header(text)
    else:
        text = doc
    stop = config.stopwords
    return [stem(t) for t in TOKEN_RE.findall(text.lower())
            if len(t) >= config.min_token_len and t not in stop]


def build_matrix(docs: Sequence[RawDocument], config: PreprocessConfig | None = None,
                 report: IngestReport | None = None) -> tuple[Vocabulary, TfIdfMatrix]:
    """TF-IDF with raw counts and ``ln(N/df)``, pruned by document frequency."""
    config = config or PreprocessConfig()
    if len(docs) < 2:
        raise CorpusError("need at least 2 documents to build a matrix")
    counts = [Counter(preprocess(d, config)) for d in docs]
    return _assemble(counts, [d.id for d in docs], config, report)


def _assemble(counts: list[Counter], ids: list[str], config: PreprocessConfig,
              report: IngestReport | None) -> tuple[Vocabulary, TfIdfMatrix]:
    report = report if report is not None else IngestReport()
    n = len(counts)
    df = Counter()
    for c in counts:
        df.update(c.keys())
    if not df:
        raise CorpusError("every document is empty after preprocessing")
    max_df = config.max_df_frac * n
    terms = sorted(t for t, f in df.items() if f >= config.min_df and f <= max_df)
    if not terms:
        raise CorpusError(
            f"vocabulary empty after pruning (min_df={config.min_df}, "
            f"max_df_frac={config.max_df_frac}, {len(df)} raw terms)")
    vocab = Vocabulary(terms, np.array([df[t] for t in terms], dtype=np.int64), n)
    idf = vocab.idf
    rows, cols, vals = [], [], []
    for j, c in enumerate(counts):
        hit = False
        for t, tf in c.items():
            i = vocab.index.get(t)
            if i is not None:
                rows.append(i)
                cols.append(j)
                vals.append(tf * idf[i])
                hit = True
        if not hit:
            report.empty_docs.append(ids[j])
            report.warn(f"document {ids[j]} has no vocabulary terms; kept as a zero column")
    w = sp.csc_matrix((vals, (rows, cols)), shape=(len(terms), n), dtype=float)
    w.eliminate_zeros()
    w.sort_indices()
    return vocab, TfIdfMatrix(w, list(ids))


def query_weights(tokens: Iterable[str], vocab: Vocabulary) -> np.ndarray:
    """Dense TF-IDF vector of a token stream over a fixed vocabulary.

    Out-of-vocabulary tokens are dropped.
    """
    q = np.zeros(len(vocab))
    idf = vocab.idf
    for t, tf in Counter(tokens).items():
        i = vocab.index.get(t)
        if i is not None:
            q[i] = tf * idf[i]
    return q


def is_known(tokens: Iterable[str], vocab: Vocabulary) -> bool:
    return any(t in vocab.index for t in tokens)
