import json

import pytest

RECORDS = {
    "planted": {
        "paper_id": "planted",
        "metadata": {"title": "Symptom survey."},
        "abstract": [{"text": "Fever and cough are the symptoms."}],
        "body_text": [{"text": "Additional discussion follows here."}],
    },
    "noise1": {
        "paper_id": "noise1",
        "metadata": {"title": "Orbital mechanics"},
        "abstract": [{"text": "Satellites orbit planets."}],
        "body_text": [{"text": "Eccentric trajectories dominate."}],
    },
    "noise2": {
        "paper_id": "noise2",
        "metadata": {"title": "Bread baking"},
        "abstract": [],
        "body_text": [{"text": "Dough rises overnight slowly."}],
    },
}

LEXICON = {
    "keywords": ["structure", "symptoms"],
    "mapping": {
        "structure": ["structure", "constituents", "composition"],
        "symptoms": ["symptoms", "effects", "diseases"],
    },
}


@pytest.fixture
def corpus_dir(tmp_path):
    directory = tmp_path / "corpus"
    directory.mkdir()
    for name, record in RECORDS.items():
        (directory / f"{name}.json").write_text(json.dumps(record), encoding="utf-8")
    return directory


@pytest.fixture
def index_file(tmp_path, corpus_dir):
    from cov19ir.corpus import ChunkPolicy, load_corpus, write_chunk_index

    path = tmp_path / "index.jsonl"
    write_chunk_index(load_corpus(corpus_dir, ChunkPolicy(32, 8)), path)
    return path


@pytest.fixture
def lexicon_file(tmp_path):
    path = tmp_path / "lexicon.json"
    path.write_text(json.dumps(LEXICON), encoding="utf-8")
    return path


@pytest.fixture
def queries_file(tmp_path):
    path = tmp_path / "queries.txt"
    path.write_text("What are the symptoms?\nWhat is the structure?\n", encoding="utf-8")
    return path
