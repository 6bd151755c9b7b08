import pytest
import torch

from pomo.selection import select_by_threshold, select_top_n
from pomo.selector_model import (
    SelModelConfig,
    SelTrainConfig,
    SelectorModel,
    build_sel_vocab,
    evaluate_selector,
    predict_selection,
    score_claims,
    selector_meta,
    train_selector,
)
from pomo.synthetic import synthetic_selection_dataset
from pomo.vocab import SEL_SPECIALS

from helpers import make_instance


def tiny_sel_config(**overrides):
    base = dict(vocab_size=512, embedding_dim=16, hidden_size=16, num_layers=1)
    base.update(overrides)
    return SelModelConfig(**base)


def untrained_model(instances, seed=0, **overrides):
    torch.manual_seed(seed)
    config = tiny_sel_config(**overrides)
    vocab = build_sel_vocab(instances, size=config.vocab_size)
    return SelectorModel(config, vocab)


def test_config_validation():
    with pytest.raises(ValueError):
        tiny_sel_config(vocab_size=0)
    with pytest.raises(ValueError):
        tiny_sel_config(tau=0.0)
    with pytest.raises(ValueError):
        tiny_sel_config(tau=1.0)
    with pytest.raises(ValueError):
        tiny_sel_config(top_n=-1)
    assert tiny_sel_config(tau=0.5, top_n=0).top_n == 0


def test_build_sel_vocab_covers_context_and_claims():
    instances = [
        make_instance(
            [("occupation", "novelist", True)],
            prev_sentence="before words",
            sent_with_slot="Ada <pm-slot> spoke",
        )
    ]
    vocab = build_sel_vocab(instances, size=64)
    for token in ("before", "words", "Ada", "spoke", "occupation", "novelist"):
        assert vocab.id_of(token) != vocab.unk_id
    for special in SEL_SPECIALS:
        assert vocab.id_of(special) < len(SEL_SPECIALS)


def test_score_claims_shape_and_range():
    instances = synthetic_selection_dataset(4, seed=0)
    model = untrained_model(instances)
    scores = score_claims(model, instances[0])
    assert len(scores) == len(instances[0].claims) == 6
    for s in scores:
        assert 0.0 <= s <= 1.0
    empty = make_instance([], inst_id="nyt-e-0")
    assert score_claims(model, empty) == []


def test_score_claims_is_deterministic():
    instances = synthetic_selection_dataset(4, seed=0)
    model = untrained_model(instances, dropout_keep=0.5, num_layers=2)
    assert score_claims(model, instances[0]) == score_claims(model, instances[0])


def test_predict_selection_matches_selection_rules():
    instances = synthetic_selection_dataset(4, seed=1)
    model = untrained_model(instances, tau=0.5, top_n=2)
    for inst in instances:
        scores = score_claims(model, inst)
        assert predict_selection(model, inst, "classifier") == select_by_threshold(scores, 0.5)
        assert predict_selection(model, inst, "ranker") == select_top_n(scores, 2)
    with pytest.raises(ValueError):
        predict_selection(model, instances[0], "argmax")


def test_train_selector_validates_inputs():
    data = synthetic_selection_dataset(8, seed=2)
    with pytest.raises(ValueError):
        train_selector([], data, tiny_sel_config())
    with pytest.raises(ValueError):
        train_selector(data, [], tiny_sel_config())
    irrelevant = [
        make_instance([("occupation", "novelist", False)], inst_id=f"nyt-i-{i}")
        for i in range(4)
    ]
    with pytest.raises(ValueError):
        train_selector(irrelevant, data, tiny_sel_config())


def test_train_selector_log_and_best_state():
    data = synthetic_selection_dataset(60, seed=3)
    train, valid = data[:48], data[48:]
    config = tiny_sel_config()
    train_config = SelTrainConfig(learning_rate=0.2, batch_size=16, epochs=4, seed=0)
    model, log = train_selector(train, valid, config, train_config)
    assert len(log) == 4
    for entry in log:
        assert set(entry) == {
            "epoch", "train_loss", "valid_precision", "valid_recall", "valid_f1",
        }
    assert [e["epoch"] for e in log] == [1, 2, 3, 4]
    # loss should move downward from a cold start
    assert min(e["train_loss"] for e in log[1:]) < log[0]["train_loss"]
    # the restored parameters reproduce the best validation F1
    p, r, f1 = evaluate_selector(model, valid, train_config.mode)
    assert f1 == pytest.approx(max(e["valid_f1"] for e in log))


def test_train_selector_is_seed_deterministic():
    data = synthetic_selection_dataset(24, seed=4)
    config = tiny_sel_config()
    train_config = SelTrainConfig(learning_rate=0.1, batch_size=8, epochs=2, seed=5)
    model_a, log_a = train_selector(data[:16], data[16:], config, train_config)
    model_b, log_b = train_selector(data[:16], data[16:], config, train_config)
    assert log_a == log_b
    state_a, state_b = model_a.state_dict(), model_b.state_dict()
    assert set(state_a) == set(state_b)
    for name in state_a:
        assert torch.equal(state_a[name], state_b[name])


def test_selector_meta_round_trip():
    instances = synthetic_selection_dataset(4, seed=0)
    config = tiny_sel_config()
    vocab = build_sel_vocab(instances, size=config.vocab_size)
    meta = selector_meta(config, SelTrainConfig(), vocab)
    assert meta["kind"] == "selector"
    assert meta["config"]["hidden_size"] == 16
    assert meta["train_config"]["mode"] == "ranker"
    assert meta["vocab_sha256"] == vocab.sha256()
