"""Shared fixtures: a small medical graph, embeddings, and corpus builders."""

from __future__ import annotations

import hashlib
import io
import json
import random

import pytest

from kgaug.embeddings import load_embeddings
from kgaug.kg import load_kg

MED_ENTITIES = """\
# entity<TAB>category
pneumonia\tdisease
influenza\tdisease
bronchitis\tdisease
asthma\tdisease
respiratory syndrome\tdisease
gastroenteritis\tdisease
fever\tsymptom
cough\tsymptom
headache\tsymptom
diarrhea\tsymptom
sore throat\tsymptom
nausea\tsymptom
fatigue\tsymptom
wheezing\tsymptom
amoxicillin\tdrug
ibuprofen\tdrug
oseltamivir\tdrug
salbutamol\tdrug
ct\ttest
blood routine examination\ttest
x ray\ttest
spirometry\ttest
"""

MED_TRIPLES = """\
pneumonia\thasSymptom\tfever
pneumonia\thasSymptom\tcough
pneumonia\thasSymptom\tfatigue
influenza\thasSymptom\tfever
influenza\thasSymptom\theadache
influenza\thasSymptom\tfatigue
bronchitis\thasSymptom\tcough
bronchitis\thasSymptom\twheezing
asthma\thasSymptom\twheezing
asthma\thasSymptom\tcough
respiratory syndrome\thasSymptom\tfever
respiratory syndrome\thasSymptom\tsore throat
respiratory syndrome\thasSymptom\tdiarrhea
gastroenteritis\thasSymptom\tdiarrhea
gastroenteritis\thasSymptom\tnausea
gastroenteritis\thasSymptom\tfever
pneumonia\ttreatedBy\tamoxicillin
influenza\ttreatedBy\toseltamivir
bronchitis\ttreatedBy\tamoxicillin
asthma\ttreatedBy\tsalbutamol
gastroenteritis\ttreatedBy\tibuprofen
pneumonia\tdiagnosedBy\tct
pneumonia\tdiagnosedBy\tblood routine examination
influenza\tdiagnosedBy\tblood routine examination
bronchitis\tdiagnosedBy\tx ray
asthma\tdiagnosedBy\tspirometry
"""

# scour is a near-synonym of diarrhea (cosine 0.95 >= 0.9); queasy sits at
# 0.85 against nausea and must stay unmatched at the default threshold
MED_EMBEDDINGS = """\
diarrhea 1 0 0 0 0 0
nausea 0 1 0 0 0 0
fever 0 0 0 0 1 0
scour 0.95 0 0.31224989991991987 0 0 0
queasy 0 0.85 0 0.5267826876426369 0 0
dinner 0 0 0 0 0 1
"""


@pytest.fixture(scope="session")
def medkg():
    return load_kg(io.StringIO(MED_ENTITIES), io.StringIO(MED_TRIPLES))


@pytest.fixture(scope="session")
def med_table():
    return load_embeddings(io.StringIO(MED_EMBEDDINGS))


@pytest.fixture
def med_files(tmp_path):
    """Write the medical fixture inputs to disk for CLI-level tests."""
    entities = tmp_path / "entities.tsv"
    triples = tmp_path / "triples.tsv"
    embeddings = tmp_path / "embeddings.txt"
    entities.write_text(MED_ENTITIES, encoding="utf-8")
    triples.write_text(MED_TRIPLES, encoding="utf-8")
    embeddings.write_text(MED_EMBEDDINGS, encoding="utf-8")
    return {"entities": entities, "triples": triples, "embeddings": embeddings}


def make_corpus() -> list[dict]:
    """Twelve origins, two labels, four expression patterns, one mention each.

    Every origin's mention has a rich enough neighborhood for five graph-view
    samples plus three training-view donors, so pooled candidates always reach
    the per-origin budget.
    """
    diseases = ["pneumonia", "influenza", "bronchitis", "asthma", "respiratory syndrome", "gastroenteritis"]
    symptoms = ["fever", "cough", "headache", "diarrhea", "sore throat", "nausea"]
    rows = []
    for i, name in enumerate(diseases):
        if i < 3:
            text = f"what is {name}"
        else:
            text = f"tell me about {name} in detail"
        rows.append({"id": f"d{i}", "text": text, "label": "definition"})
    for i, name in enumerate(symptoms):
        if i < 3:
            text = f"how do I relieve {name} at home"
        else:
            text = f"any quick remedy for {name} ?"
        rows.append({"id": f"s{i}", "text": text, "label": "treatment"})
    return rows


def make_pair_corpus() -> list[dict]:
    """Origins whose texts localize a disease plus one of its symptoms."""
    combos = [
        ("pneumonia", "fever"),
        ("pneumonia", "cough"),
        ("influenza", "headache"),
        ("influenza", "fatigue"),
        ("bronchitis", "wheezing"),
        ("asthma", "cough"),
        ("respiratory syndrome", "sore throat"),
        ("gastroenteritis", "nausea"),
        ("gastroenteritis", "diarrhea"),
        ("respiratory syndrome", "diarrhea"),
    ]
    rows = []
    for i, (disease, symptom) in enumerate(combos):
        rows.append(
            {
                "id": f"p{i}",
                "text": f"my {symptom} will not stop , could it be {disease} ?",
                "label": "diagnosis",
            }
        )
    return rows


def write_jsonl(rows: list[dict], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False))
            fh.write("\n")


def stable_prob(aug_id: str) -> float:
    """Deterministic pseudo-confidence in [0, 1] for fixture scoring."""
    digest = hashlib.sha256(aug_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big") / 0xFFFFFFFF


def write_fixture_confidences(aug_path, conf_path) -> int:
    n = 0
    with open(aug_path, "r", encoding="utf-8") as fh, open(conf_path, "w", encoding="utf-8", newline="\n") as out:
        for line in fh:
            if not line.strip():
                continue
            aug_id = json.loads(line)["augId"]
            out.write(json.dumps({"augId": aug_id, "probTrueLabel": round(stable_prob(aug_id), 6)}))
            out.write("\n")
            n += 1
    return n


def random_kg_sources(rng: random.Random, n_entities: int, n_triples: int, n_categories: int, n_relations: int = 4):
    """Random graph inputs as (entities_text, triples_text)."""
    categories = [f"cat{c}" for c in range(n_categories)]
    lines = []
    for i in range(n_entities):
        # the first n_categories entities pin one entity per category
        cat = categories[i] if i < n_categories else rng.choice(categories)
        lines.append(f"e{i}\t{cat}")
    entity_text = "\n".join(lines) + "\n"

    triples = set()
    attempts = 0
    while len(triples) < n_triples and attempts < n_triples * 20:
        attempts += 1
        h = rng.randrange(n_entities)
        t = rng.randrange(n_entities)
        if h == t:
            continue
        triples.add((f"e{h}", f"rel{rng.randrange(n_relations)}", f"e{t}"))
    triple_text = "\n".join("\t".join(t) for t in sorted(triples)) + "\n"
    return entity_text, triple_text
