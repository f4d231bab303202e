"""Regenerate the shipped 30-document synthetic corpus.

Run from the repository root::

    python3 tests/data/make_corpus30.py

Output is deterministic (fixed seed); the generated files under
``tests/data/corpus30`` are committed so the test suite never depends on
running this script.
"""

from __future__ import annotations

import random
from pathlib import Path

ROOT = Path(__file__).parent / "corpus30"

PEOPLE = ["alice", "miller", "captain", "scholar", "gardener", "weaver", "smith", "herald"]
PLACES = ["bridge", "tower", "market", "orchard", "harbor", "forest", "mill", "chapel"]
VERBS = ["visited", "greeted", "watched", "followed", "helped", "avoided", "praised", "warned"]
TAILS = ["at dawn", "after the storm", "before sunset", "in early spring", "without delay"]

RELATION_LABELS = [
    "attribution", "background", "cause-result", "comparison", "condition",
    "consequence", "contrast", "elaboration", "enablement", "evaluation",
    "explanation", "manner-means", "summary", "temporal", "topic-comment",
]

# Phrase material for the compositionality pipelines: both the originals
# and their synonym-substituted variants must occur with real contexts.
PHRASE_SENTENCES = [
    "The old mill creaked beside the quiet water.",
    "Tourists photographed the old mill during harvest.",
    "The ancient mill creaked beside the gray cliffs.",
    "Nobody repaired the ancient mill after the flood.",
    "Masons rebuilt the stone bridge over the gorge.",
    "Lanterns lit the stone bridge every evening.",
    "Moss covered the rock bridge near the falls.",
    "Children crossed the rock bridge on their way home.",
]


def sentence(rng: random.Random) -> tuple[str, str, str, str]:
    subj = rng.choice(PEOPLE)
    obj = rng.choice([p for p in PEOPLE if p != subj])
    place = rng.choice(PLACES)
    verb = rng.choice(VERBS)
    tail = rng.choice(TAILS)
    words = f"The {subj} {verb} the {obj} near the {place} {tail}."
    return words, subj, obj, place


def main() -> None:
    rng = random.Random(7)
    docs_dir = ROOT / "docs"
    ann_dir = ROOT / "annotations"
    docs_dir.mkdir(parents=True, exist_ok=True)
    ann_dir.mkdir(parents=True, exist_ok=True)

    phrase_pool = list(PHRASE_SENTENCES)
    rng.shuffle(phrase_pool)

    for i in range(30):
        doc_id = f"doc{i:02d}"
        n_sent = rng.randint(4, 8)
        lines = []
        mentions = []  # (sentence_index, entity, role)
        token_count = 0
        sent_token_counts = []
        # chain one entity through consecutive sentences for coherent texture
        chained = rng.choice(PEOPLE)
        for s in range(n_sent):
            if phrase_pool and rng.random() < 0.35:
                text = phrase_pool.pop()
                subj = obj = place = None
            else:
                text, subj, obj, place = sentence(rng)
                if rng.random() < 0.6:
                    if obj == chained:
                        obj = rng.choice([p for p in PEOPLE if p != chained])
                    subj = chained
                    words = text.split()
                    words[1], words[4] = chained, obj
                    text = " ".join(words)
            n_tokens = len(text.split())
            sent_token_counts.append(n_tokens)
            token_count += n_tokens
            lines.append(text)
            if subj is not None:
                mentions.append((s, subj, "s"))
                mentions.append((s, obj, "o"))
                mentions.append((s, place, "x"))

        (docs_dir / f"{doc_id}.txt").write_text(" ".join(lines) + "\n", encoding="utf-8")

        ann_lines = ["# generated annotations"]
        for s, entity, role in mentions:
            ann_lines.append(f"ent\t{s}\t{entity}\t{role}")
        for _ in range(rng.randint(1, 3)):
            label = rng.choice(RELATION_LABELS)
            start = rng.randrange(0, max(1, token_count - 4))
            end = min(token_count - 1, start + rng.randint(1, 4))
            ann_lines.append(f"rel\t{label}\t{start}\t{end}")
        # modification pairs for the directed word graph
        ann_lines.append("mod\tmill\told")
        ann_lines.append("mod\tbridge\tstone")
        (ann_dir / f"{doc_id}.tsv").write_text("\n".join(ann_lines) + "\n", encoding="utf-8")

    (ROOT / "synonyms.tsv").write_text(
        "old\tancient\nstone\trock\n", encoding="utf-8"
    )
    (ROOT / "identity_synonyms.tsv").write_text(
        "old\told\nmill\tmill\nstone\tstone\nbridge\tbridge\n", encoding="utf-8"
    )
    (ROOT / "phrases.txt").write_text("old mill\nstone bridge\n", encoding="utf-8")
    (ROOT / "queries.tsv").write_text(
        "q1\tmiller tower\nq2\told mill\nq3\tstone bridge harbor\n", encoding="utf-8"
    )

    # qrels: grade 2 when every query term occurs, 1 when at least one does
    queries = {
        "q1": {"miller", "tower"},
        "q2": {"old", "mill"},
        "q3": {"stone", "bridge", "harbor"},
    }
    qrels_lines = []
    for i in range(30):
        doc_id = f"doc{i:02d}"
        words = set(
            w.strip(".").lower()
            for w in (docs_dir / f"{doc_id}.txt").read_text(encoding="utf-8").split()
        )
        for qid in sorted(queries):
            terms = queries[qid]
            overlap = len(terms & words)
            if overlap == len(terms):
                qrels_lines.append(f"{qid} 0 {doc_id} 2")
            elif overlap > 0:
                qrels_lines.append(f"{qid} 0 {doc_id} 1")
    (ROOT / "qrels.txt").write_text("\n".join(qrels_lines) + "\n", encoding="utf-8")
    print(f"wrote corpus under {ROOT}")


if __name__ == "__main__":
    main()
