"""Smoke tests for the wordgeom Python module."""

import json
import math
import os

import pytest

import wordgeom


@pytest.fixture()
def toy_embedding(tmp_path):
    path = tmp_path / "toy.glove"
    path.write_text(
        "man 1 0 0.2\n"
        "woman -1 0.1 0.1\n"
        "king 0.8 0.5 -0.1\n"
        "queen -0.7 0.6 0\n"
        "nurse -0.6 0.2 0.4\n"
        "engineer 0.7 0.1 0.3\n"
    )
    return wordgeom.load_embedding(str(path), format="glove-text")


def test_load_and_lookup(toy_embedding):
    assert len(toy_embedding) == 6
    assert toy_embedding.dim == 3
    assert "king" in toy_embedding
    assert "prince" not in toy_embedding
    assert toy_embedding.vector("man") == [1.0, 0.0, 0.2]
    with pytest.raises(KeyError):
        toy_embedding.vector("prince")


def test_save_round_trip(toy_embedding, tmp_path):
    out = tmp_path / "round.bin"
    wordgeom.save_embedding(toy_embedding, str(out), format="word2vec-binary")
    back = wordgeom.load_embedding(str(out), format="word2vec-binary")
    assert back.tokens == toy_embedding.tokens


def test_geometry(toy_embedding):
    emb = wordgeom.normalize(toy_embedding)
    assert emb.normalized
    assert wordgeom.analogy(emb, "man", "woman", "king") == "queen"

    neighbors = wordgeom.nearest_neighbors(emb, emb.vector("king"), count=2,
                                           exclude=["king"])
    assert len(neighbors) == 2
    assert all(-1.0 <= c <= 1.0 for _, c in neighbors)

    assert wordgeom.cosine([1, 0], [0, 1]) == 0.0


def test_dimension_and_projection(toy_embedding):
    emb = wordgeom.normalize(toy_embedding)
    gender = wordgeom.build_dimension(
        emb, [("man", "woman"), ("he", "she")], name="gender")
    assert gender.name == "gender"
    assert len(gender.pairs_used) == 1  # he/she not in the toy vocabulary
    assert len(gender.pairs_skipped) == 1
    assert math.isclose(sum(v * v for v in gender.vector), 1.0, rel_tol=1e-9)

    assert wordgeom.project(emb, "engineer", gender) > 0
    assert wordgeom.project(emb, "nurse", gender) < 0

    projections = wordgeom.project_all(emb, gender)
    assert len(projections) == len(emb)

    cos, degrees = wordgeom.dimension_angle(gender, gender)
    assert math.isclose(cos, 1.0, rel_tol=1e-12)
    assert degrees == pytest.approx(0.0, abs=1e-6)

    ve = wordgeom.variance_explained(emb, gender)
    top = wordgeom.top_component_variance(emb)
    assert 0.0 <= ve <= top + 1e-6


def test_training_is_deterministic(tmp_path):
    corpus_path = tmp_path / "corpus.txt"
    lines = []
    for i in range(400):
        topic = "x" if i % 2 else "y"
        lines.append(" ".join(f"{topic}{(i * 7 + j) % 10}" for j in range(8)))
    corpus_path.write_text("\n".join(lines) + "\n")
    corpus = wordgeom.load_plain_corpus(str(corpus_path))
    assert corpus.record_count == 400

    config = wordgeom.TrainingConfig()
    config.dim = 16
    config.window = 3
    config.epochs = 2
    config.min_count = 1
    config.seed = 12
    config.workers = 1

    first = wordgeom.train(corpus, config)
    second = wordgeom.train(corpus, config)
    assert first.input.tokens == second.input.tokens
    assert first.input.vector("x1") == second.input.vector("x1")
    assert first.epoch_loss == second.epoch_loss
    assert first.context.dim == config.dim


def test_bootstrap_ci_with_stub_statistic(tmp_path):
    corpus_path = tmp_path / "ci_corpus.txt"
    corpus_path.write_text("\n".join("a b c d" for _ in range(50)) + "\n")
    corpus = wordgeom.load_plain_corpus(str(corpus_path))

    plan = wordgeom.ResamplingPlan.parse(json.dumps({
        "mode": "bootstrap",
        "replicates": 20,
        "level": 0.90,
        "base_seed": 5,
        "trainer": {"dim": 8, "window": 2, "epochs": 1, "min_count": 1},
        "statistic": {"kind": "constant", "value": 2.5},
    }))
    ci = wordgeom.bootstrap_ci(corpus, plan)
    assert ci["estimate"] == 2.5
    assert ci["lower"] == 2.5
    assert ci["upper"] == 2.5
    assert len(ci["replicate_values"]) == 20
    assert ci["failures"] == []


def test_welch_and_pearson():
    t, df, p = wordgeom.welch_t_test([1, 2, 3, 4, 5], [2, 4, 6, 8, 10])
    assert t == pytest.approx(-1.8973665961010275, rel=1e-12)
    assert df == pytest.approx(6.25 / 1.0625, rel=1e-12)
    assert 0.0 < p < 1.0
    assert wordgeom.pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)


def test_shipped_dimension_specs():
    data_dir = os.environ.get("WORDGEOM_DATA_DIR")
    if not data_dir:
        pytest.skip("WORDGEOM_DATA_DIR not set")
    for name in ("gender", "class", "race"):
        with open(os.path.join(data_dir, "dimensions", f"{name}.json")) as fh:
            spec = json.load(fh)
        assert spec["name"] == name
        assert all(len(pair) == 2 for pair in spec["pairs"])
