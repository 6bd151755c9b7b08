import pytest
import torch

from pomo.genmodel import (
    AdditiveAttention,
    GenModelConfig,
    RecurrentGenModel,
    TransformerGenModel,
    build_model,
    collate,
    config_from_meta,
    copy_distribution,
    encode_instance,
    gen_model_meta,
)
from pomo.linearize import build_gen_vocab
from pomo.vocab import GEN_SPECIALS, Vocabulary

from helpers import make_instance


def tiny_config(**overrides):
    base = dict(
        architecture="bilstm_concat",
        vocab_size=64,
        max_input_len=60,
        max_output_len=8,
        batch_size=4,
        embedding_dim=8,
        hidden_size=8,
        num_layers=1,
        dropout_keep=1.0,
        tf_heads=2,
        tf_blocks=2,
        tf_d_model=8,
        tf_ff_dim=16,
        total_steps=2,
        eval_every=1,
    )
    base.update(overrides)
    return GenModelConfig(**base)


def sample_instances():
    return [
        make_instance(
            [("occupation", "novelist", True), ("award", "major prize", False)],
            inst_id="nyt-a-0",
            prev_sentence="She arrived early .",
            sent_with_slot="Ada Example <pm-slot> spoke .",
            pm_target="the famous novelist",
        ),
        make_instance(
            [("position held", "chancellor", True)],
            inst_id="cnn-b-1",
            prev_sentence="",
            sent_with_slot="Bo Sample <pm-slot> left .",
            pm_target="the chancellor",
        ),
    ]


def small_vocab(instances, config):
    return build_gen_vocab(instances, size=config.vocab_size, source=config.claim_source)


def test_config_validation():
    with pytest.raises(ValueError):
        tiny_config(architecture="nonsense")
    with pytest.raises(ValueError):
        tiny_config(hidden_size=0)
    with pytest.raises(ValueError):
        tiny_config(aux_aggregation="max")
    e2e = tiny_config(architecture="e2e_claim_select", use_copy=True, claim_source="all")
    assert e2e.use_copy is False
    assert e2e.claim_source == "e2e"


def test_meta_round_trip():
    config = tiny_config(architecture="tri_encoder")
    vocab = Vocabulary.build([["a"]], size=16, specials=GEN_SPECIALS)
    meta = gen_model_meta(config, vocab)
    assert meta["vocab_sha256"] == vocab.sha256()
    assert config_from_meta(meta) == config


def test_encode_instance_oov_bookkeeping():
    config = tiny_config()
    inst = make_instance(
        [("k", "zzz yyy zzz", True)],
        prev_sentence="",
        sent_with_slot="Ada <pm-slot> spoke yyy .",
        pm_target="zzz www",
    )
    # vocabulary that knows none of zzz/yyy/www
    vocab = Vocabulary.build(
        [["Ada", "<pm-slot>", "spoke", ".", "k"]], size=16, specials=GEN_SPECIALS
    )
    enc = encode_instance(inst, vocab, config)
    # first-appearance order over the linearized input: yyy (context) then zzz
    assert enc.oov_tokens == ["yyy", "zzz"]
    yyy_ext = len(vocab)
    zzz_ext = len(vocab) + 1
    assert enc.src_ext.count(yyy_ext) == 2  # context + claim value occurrence
    assert enc.src_ext.count(zzz_ext) == 2
    # target: zzz is copyable (ext id), www is not in the input -> unk
    assert enc.tgt_ext == [zzz_ext, vocab.unk_id]
    assert enc.tgt_ids == [vocab.unk_id, vocab.unk_id]


def test_encode_instance_without_copy_keeps_unk():
    config = tiny_config(use_copy=False)
    inst = make_instance([("k", "zzz", True)], pm_target="zzz")
    vocab = Vocabulary.build([["Ada"]], size=12, specials=GEN_SPECIALS)
    enc = encode_instance(inst, vocab, config)
    assert enc.oov_tokens == []
    assert enc.src_ext == enc.src_ids
    assert enc.tgt_ext == enc.tgt_ids


def test_encode_truncates_target():
    config = tiny_config(max_output_len=3)
    inst = make_instance([("k", "v", True)], pm_target="a b c d e f")
    vocab = Vocabulary.build([["a", "b", "c"]], size=16, specials=GEN_SPECIALS)
    enc = encode_instance(inst, vocab, config)
    assert len(enc.tgt_ids) == 2  # room for eos at max_output_len


def test_collate_masks_and_claims():
    config = tiny_config()
    instances = sample_instances()
    vocab = small_vocab(instances, config)
    encoded = [encode_instance(i, vocab, config) for i in instances]
    batch = collate(encoded, vocab, config)
    assert batch.src_ids.shape == batch.src_ext.shape == batch.src_mask.shape
    assert batch.src_mask[0].sum() == len(encoded[0].src_ids)
    assert batch.src_mask[1].sum() == len(encoded[1].src_ids)
    # claim span positions agree with the linearization
    for row, enc in enumerate(encoded):
        for c, (start, end) in enumerate(enc.lin.claim_spans):
            expected = torch.zeros(batch.src_ids.size(1), dtype=torch.bool)
            expected[start:end] = True
            assert torch.equal(batch.claim_pos_mask[row, c], expected)
    assert batch.claim_valid.tolist() == [[True, True], [True, False]]
    assert batch.claim_labels.tolist() == [[1.0, 0.0], [1.0, 0.0]]
    # teacher forcing layout
    assert batch.tgt_in[0, 0].item() == vocab.bos_id
    assert batch.tgt_out[0, batch.tgt_mask[0].sum() - 1].item() == vocab.eos_id


def test_collate_rejects_empty():
    config = tiny_config()
    vocab = Vocabulary.build([["a"]], size=12, specials=GEN_SPECIALS)
    with pytest.raises(ValueError):
        collate([], vocab, config)


def test_copy_distribution_hand_values():
    # V=2, one step: gen = [1, 0], attention split over two positions
    # holding ids 0 and 1, p_gen = 0.5.
    gen = torch.tensor([[[1.0, 0.0]]])
    attn = torch.tensor([[[0.5, 0.5]]])
    ext = torch.tensor([[0, 1]])
    p_gen = torch.tensor([[[0.5]]])
    probs = copy_distribution(gen, attn, ext, p_gen, n_extra=0)
    assert probs[0, 0].tolist() == pytest.approx([0.75, 0.25])

    # OOV position: second slot holds extended id 2
    ext2 = torch.tensor([[0, 2]])
    probs2 = copy_distribution(gen, attn, ext2, p_gen, n_extra=1)
    assert probs2[0, 0].tolist() == pytest.approx([0.75, 0.0, 0.25])
    assert probs2.sum().item() == pytest.approx(1.0)


def test_copy_distribution_accumulates_repeated_tokens():
    gen = torch.tensor([[[0.0, 1.0]]])
    attn = torch.tensor([[[0.25, 0.75]]])
    ext = torch.tensor([[1, 1]])
    p_gen = torch.tensor([[[0.5]]])
    probs = copy_distribution(gen, attn, ext, p_gen, n_extra=0)
    assert probs[0, 0].tolist() == pytest.approx([0.0, 1.0])


def test_additive_attention_masking():
    torch.manual_seed(0)
    attn = AdditiveAttention(4, 4, 4)
    query = torch.randn(2, 3, 4)
    keys = torch.randn(2, 5, 4)
    mask = torch.tensor(
        [[True, True, False, False, False], [False, False, False, False, False]]
    )
    context, weights = attn(query, keys, mask)
    sums = weights.sum(dim=-1)
    assert torch.allclose(sums[0], torch.ones(3), atol=1e-6)
    assert torch.all(weights[0, :, 2:] == 0)
    # fully-masked row: zero weights, zero context, and finite gradients
    assert torch.all(weights[1] == 0)
    assert torch.all(context[1] == 0)
    loss = context.sum() + weights.sum()
    loss.backward()
    for p in attn.parameters():
        assert torch.isfinite(p.grad).all()


@pytest.mark.parametrize(
    "arch", ["bilstm_concat", "tri_encoder", "e2e_claim_select", "transformer_concat"]
)
def test_forward_shapes_and_normalization(arch):
    torch.manual_seed(0)
    config = tiny_config(architecture=arch)
    instances = sample_instances()
    vocab = small_vocab(instances, config)
    encoded = [encode_instance(i, vocab, config) for i in instances]
    batch = collate(encoded, vocab, config)
    model = build_model(config, vocab)
    model.eval()
    with torch.no_grad():
        output = model.forward_teacher(batch)
    steps = batch.tgt_in.size(1)
    width = len(vocab) + batch.n_extra
    assert output.log_probs.shape == (2, steps, width)
    sums = output.log_probs.exp().sum(dim=-1)
    assert torch.allclose(sums, torch.ones_like(sums), atol=1e-4)
    assert torch.isfinite(output.log_probs).all()


def test_e2e_attention_restricted_to_claim_spans():
    torch.manual_seed(1)
    config = tiny_config(architecture="e2e_claim_select")
    instances = sample_instances()
    vocab = small_vocab(instances, config)
    encoded = [encode_instance(i, vocab, config) for i in instances]
    batch = collate(encoded, vocab, config)
    model = build_model(config, vocab)
    model.eval()
    with torch.no_grad():
        output = model.forward_teacher(batch)
    allowed = batch.claim_pos_mask.any(dim=1)  # (B,S)
    outside = output.attention * (~allowed).unsqueeze(1).float()
    assert outside.abs().max().item() == 0.0
    inside = (output.attention * allowed.unsqueeze(1).float()).sum(dim=-1)
    assert torch.allclose(inside, torch.ones_like(inside), atol=1e-5)


def test_tri_encoder_group_attention():
    torch.manual_seed(2)
    config = tiny_config(architecture="tri_encoder")
    instances = sample_instances()
    vocab = small_vocab(instances, config)
    encoded = [encode_instance(i, vocab, config) for i in instances]
    batch = collate(encoded, vocab, config)
    model = build_model(config, vocab)
    model.eval()
    with torch.no_grad():
        output = model.forward_teacher(batch)
    assert set(output.group_attention) == {"claims", "prev", "curr"}
    # instance 1 has an empty previous sentence: its prev attention is zero
    prev_weights = output.group_attention["prev"]
    assert torch.all(prev_weights[1] == 0)
    assert torch.allclose(
        prev_weights[0].sum(dim=-1), torch.ones(prev_weights.size(1)), atol=1e-5
    )


@pytest.mark.parametrize(
    "arch", ["bilstm_concat", "tri_encoder", "e2e_claim_select", "transformer_concat"]
)
def test_decode_step_matches_teacher_forcing(arch):
    torch.manual_seed(3)
    config = tiny_config(architecture=arch)
    instances = sample_instances()
    vocab = small_vocab(instances, config)
    encoded = [encode_instance(i, vocab, config) for i in instances]
    batch = collate(encoded, vocab, config)
    model = build_model(config, vocab)
    model.eval()
    with torch.no_grad():
        teacher = model.forward_teacher(batch)
        cache = model.encode(batch)
        state = model.init_state(cache)
        for t in range(batch.tgt_in.size(1)):
            step_logp, state = model.decode_step(batch.tgt_in[:, t], state, cache)
            assert torch.allclose(step_logp, teacher.log_probs[:, t], atol=1e-5)


def test_recurrent_model_rejects_transformer_config():
    config = tiny_config(architecture="transformer_concat")
    vocab = Vocabulary.build([["a"]], size=12, specials=GEN_SPECIALS)
    with pytest.raises(ValueError):
        RecurrentGenModel(config, vocab)
    with pytest.raises(ValueError):
        TransformerGenModel(tiny_config(), vocab)


def test_gradients_flow_through_copy():
    torch.manual_seed(4)
    config = tiny_config()
    instances = sample_instances()
    vocab = small_vocab(instances, config)
    encoded = [encode_instance(i, vocab, config) for i in instances]
    batch = collate(encoded, vocab, config)
    model = build_model(config, vocab)
    output = model.forward_teacher(batch)
    loss = -output.log_probs.mean()
    loss.backward()
    grads = [p.grad for p in model.parameters() if p.grad is not None]
    assert grads
    for g in grads:
        assert torch.isfinite(g).all()
