"""Locate a local copy of the 20 Newsgroups corpus for the acceptance run.

Looked up in order:

1. ``$HIERINDEX_20NG`` pointing at a directory that holds
   ``20news-bydate-train/`` and ``20news-bydate-test/``, or at a single
   newsgroups-layout directory (split 60/40 per group with a fixed seed);
2. a scikit-learn download cache, if scikit-learn is installed and the
   archive is already on disk.

Nothing is downloaded.
"""

from __future__ import annotations

import os
from collections import defaultdict
from pathlib import Path

import numpy as np

from hierindex.corpus import RawDocument, load_corpus

ENV = "HIERINDEX_20NG"


class CorpusUnavailable(RuntimeError):
    pass


def _split(docs, seed=42, train_frac=0.6):
    by_label = defaultdict(list)
    for d in docs:
        by_label[d.label].append(d)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for label in sorted(by_label):
        group = by_label[label]
        order = rng.permutation(len(group))
        cut = int(round(train_frac * len(group)))
        train += [group[i] for i in sorted(order[:cut])]
        test += [group[i] for i in sorted(order[cut:])]
    return train, test


def _from_directory(root: Path):
    tr, te = root / "20news-bydate-train", root / "20news-bydate-test"
    if tr.is_dir() and te.is_dir():
        return load_corpus(tr), load_corpus(te)
    docs = load_corpus(root)
    if not docs:
        raise CorpusUnavailable(f"{root} holds no newsgroup documents")
    return _split(docs)


def _from_sklearn():
    try:
        from sklearn.datasets import fetch_20newsgroups
    except ImportError:
        return None
    out = []
    for subset in ("train", "test"):
        try:
            data = fetch_20newsgroups(subset=subset, download_if_missing=False, shuffle=False)
        except (OSError, IOError):
            return None
        names = data.target_names
        out.append([RawDocument(id=f"{names[t]}/{subset}{i:05d}", text=text, label=names[t])
                    for i, (text, t) in enumerate(zip(data.data, data.target))])
    return tuple(out)


def load_newsgroups():
    """(train, test) lists of labelled documents, or CorpusUnavailable."""
    path = os.environ.get(ENV)
    if path:
        return _from_directory(Path(path))
    found = _from_sklearn()
    if found:
        return found
    raise CorpusUnavailable(
        f"20 Newsgroups not found: set {ENV} to a directory with 20news-bydate-train/ "
        "and 20news-bydate-test/, or populate the scikit-learn data cache")


def balanced_subset(docs, per_class: int, seed: int = 42):
    """``per_class`` documents from every label, in id order."""
    by_label = defaultdict(list)
    for d in docs:
        by_label[d.label].append(d)
    rng = np.random.default_rng(seed)
    out = []
    for label in sorted(by_label):
        group = sorted(by_label[label], key=lambda d: d.id)
        take = rng.choice(len(group), size=min(per_class, len(group)), replace=False)
        out += [group[i] for i in sorted(take)]
    return out
