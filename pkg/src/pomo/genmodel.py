"""Sequence-to-sequence post-modifier generators.

Four architectures: a BiLSTM encoder over the concatenated input, a
transformer over the same input, a tri-encoder with separate encoders and
attentions per input group, and an end-to-end variant whose decoder attends
only to claim tokens and emits soft claim-selection probabilities.

All decoders emit, per step, a probability distribution over the vocabulary
extended with the input's out-of-vocabulary tokens (pointer-generator copy),
except the end-to-end variant, which never copies.
"""

import math
from dataclasses import dataclass, asdict, field

import torch
from torch import nn

from .dataset import PomoInstance
from .linearize import LinearizedInput, linearize, target_tokens
from .vocab import Vocabulary

ARCHITECTURES = ("bilstm_concat", "transformer_concat", "tri_encoder", "e2e_claim_select")
TRI_GROUPS = ("claims", "prev", "curr")

_MASK_VALUE = -1e9


@dataclass(frozen=True)
class GenModelConfig:
    architecture: str = "bilstm_concat"
    vocab_size: int = 50_000
    max_input_len: int = 500
    max_output_len: int = 30
    batch_size: int = 32
    claim_source: str = "all"
    use_copy: bool = True
    # recurrent path
    embedding_dim: int = 500
    hidden_size: int = 512
    num_layers: int = 2
    dropout_keep: float = 0.7
    learning_rate: float = 1.0
    # transformer path
    tf_heads: int = 4
    tf_blocks: int = 4
    tf_d_model: int = 64
    tf_ff_dim: int = 256
    tf_lr_factor: float = 2.0
    tf_warmup: int = 4000
    label_smoothing: float = 0.1
    # end-to-end claim selection
    aux_weight: float = 1.0
    aux_aggregation: str = "mean"
    # schedule
    total_steps: int = 150_000
    eval_every: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        dims = (
            self.vocab_size, self.max_input_len, self.max_output_len, self.batch_size,
            self.embedding_dim, self.hidden_size, self.num_layers,
            self.tf_heads, self.tf_blocks, self.tf_d_model, self.tf_ff_dim,
        )
        if min(dims) <= 0:
            raise ValueError("model dimensions must be positive")
        if self.aux_weight < 0:
            raise ValueError("aux_weight must be non-negative")
        if self.aux_aggregation not in ("mean", "sum"):
            raise ValueError(f"unknown aux aggregation {self.aux_aggregation!r}")
        if self.architecture == "e2e_claim_select":
            # The end-to-end variant never copies and always sees all claims.
            object.__setattr__(self, "use_copy", False)
            object.__setattr__(self, "claim_source", "e2e")


@dataclass
class EncodedInstance:
    """One instance prepared for batching (ids, spans, copy bookkeeping)."""

    instance_id: str
    lin: LinearizedInput
    src_ids: list
    src_ext: list
    oov_tokens: list
    tgt_ids: list  # base-vocab target ids (unk for OOV)
    tgt_ext: list  # copy-extended target ids
    tgt_text: str


def encode_instance(
    inst: PomoInstance,
    vocab: Vocabulary,
    config: GenModelConfig,
    scores=None,
) -> EncodedInstance:
    lin = linearize(inst, source=config.claim_source, max_input_len=config.max_input_len, scores=scores)
    src_ids = []
    src_ext = []
    oov_tokens = []
    oov_index = {}
    for tok in lin.tokens:
        idx = vocab.id_of(tok)
        src_ids.append(idx)
        if idx == vocab.unk_id and config.use_copy:
            if tok not in oov_index:
                oov_index[tok] = len(vocab) + len(oov_tokens)
                oov_tokens.append(tok)
            src_ext.append(oov_index[tok])
        else:
            src_ext.append(idx)
    tgt_toks = target_tokens(inst)[: config.max_output_len - 1]
    tgt_ids = vocab.encode(tgt_toks)
    tgt_ext = [
        oov_index.get(tok, idx) if idx == vocab.unk_id else idx
        for tok, idx in zip(tgt_toks, tgt_ids)
    ]
    return EncodedInstance(
        instance_id=inst.id,
        lin=lin,
        src_ids=src_ids,
        src_ext=src_ext,
        oov_tokens=oov_tokens,
        tgt_ids=tgt_ids,
        tgt_ext=tgt_ext,
        tgt_text=inst.pm_target,
    )


@dataclass
class GenBatch:
    src_ids: torch.Tensor  # (B,S) base-vocab ids
    src_ext: torch.Tensor  # (B,S) copy-extended ids
    src_mask: torch.Tensor  # (B,S) bool, true at real tokens
    src_lengths: torch.Tensor  # (B,)
    groups: dict  # group name -> (ids, ext, mask, lengths); tri only
    claim_pos_mask: torch.Tensor  # (B,C,S) bool, claim spans in src
    claim_labels: torch.Tensor  # (B,C) float relevance
    claim_valid: torch.Tensor  # (B,C) bool
    tgt_in: torch.Tensor  # (B,T) bos + target base ids
    tgt_out: torch.Tensor  # (B,T) target ids (+eos); extended when copying
    tgt_mask: torch.Tensor  # (B,T) bool
    n_extra: int  # copy-extension width of this batch
    oov_lists: list  # per-row OOV surface tokens
    instance_ids: list


def _pad_rows(rows: list, pad: int) -> torch.Tensor:
    width = max((len(r) for r in rows), default=0)
    width = max(width, 1)
    out = torch.full((len(rows), width), pad, dtype=torch.long)
    for i, row in enumerate(rows):
        if row:
            out[i, : len(row)] = torch.tensor(row, dtype=torch.long)
    return out


def collate(encoded: list, vocab: Vocabulary, config: GenModelConfig) -> GenBatch:
    if not encoded:
        raise ValueError("cannot collate an empty batch")
    for enc in encoded:
        if not enc.src_ids:
            raise ValueError(f"instance {enc.instance_id}: empty linearized input")
    pad = vocab.pad_id
    src_ids = _pad_rows([e.src_ids for e in encoded], pad)
    src_ext = _pad_rows([e.src_ext for e in encoded], pad)
    lengths = torch.tensor([len(e.src_ids) for e in encoded], dtype=torch.long)
    src_mask = torch.arange(src_ids.size(1)).unsqueeze(0) < lengths.unsqueeze(1)

    n_claims = max((len(e.lin.claim_spans) for e in encoded), default=0)
    claim_pos = torch.zeros(len(encoded), max(n_claims, 1), src_ids.size(1), dtype=torch.bool)
    claim_labels = torch.zeros(len(encoded), max(n_claims, 1))
    claim_valid = torch.zeros(len(encoded), max(n_claims, 1), dtype=torch.bool)
    for i, enc in enumerate(encoded):
        for c, (start, end) in enumerate(enc.lin.claim_spans):
            claim_pos[i, c, start:end] = True
            claim_labels[i, c] = float(enc.lin.claim_relevant[c])
            claim_valid[i, c] = True

    groups = {}
    if config.architecture == "tri_encoder":
        for name in TRI_GROUPS:
            ids_rows, ext_rows = [], []
            for enc in encoded:
                idx = _group_indices(enc.lin, name)
                ids_rows.append([enc.src_ids[j] for j in idx])
                ext_rows.append([enc.src_ext[j] for j in idx])
            g_ids = _pad_rows(ids_rows, pad)
            g_ext = _pad_rows(ext_rows, pad)
            g_len = torch.tensor([len(r) for r in ids_rows], dtype=torch.long)
            g_mask = torch.arange(g_ids.size(1)).unsqueeze(0) < g_len.unsqueeze(1)
            groups[name] = (g_ids, g_ext, g_mask, g_len)

    bos, eos = vocab.bos_id, vocab.eos_id
    tgt_in = _pad_rows([[bos] + e.tgt_ids for e in encoded], pad)
    out_rows = [
        (e.tgt_ext if config.use_copy else e.tgt_ids) + [eos] for e in encoded
    ]
    tgt_out = _pad_rows(out_rows, pad)
    tgt_len = torch.tensor([len(r) for r in out_rows], dtype=torch.long)
    tgt_mask = torch.arange(tgt_out.size(1)).unsqueeze(0) < tgt_len.unsqueeze(1)

    n_extra = max((len(e.oov_tokens) for e in encoded), default=0) if config.use_copy else 0
    return GenBatch(
        src_ids=src_ids,
        src_ext=src_ext,
        src_mask=src_mask,
        src_lengths=lengths,
        groups=groups,
        claim_pos_mask=claim_pos,
        claim_labels=claim_labels,
        claim_valid=claim_valid,
        tgt_in=tgt_in,
        tgt_out=tgt_out,
        tgt_mask=tgt_mask,
        n_extra=n_extra,
        oov_lists=[e.oov_tokens for e in encoded],
        instance_ids=[e.instance_id for e in encoded],
    )


def _group_indices(lin: LinearizedInput, name: str) -> list:
    if name == "prev":
        return list(range(*lin.prev_span))
    if name == "curr":
        return list(range(*lin.curr_span))
    idx = []
    for start, end in lin.claim_spans:
        idx.extend(range(start, end))
    return idx


class AdditiveAttention(nn.Module):
    def __init__(self, query_dim: int, key_dim: int, attn_dim: int):
        super().__init__()
        self.w_query = nn.Linear(query_dim, attn_dim, bias=False)
        self.w_key = nn.Linear(key_dim, attn_dim, bias=False)
        self.score = nn.Linear(attn_dim, 1, bias=False)

    def forward(self, query: torch.Tensor, keys: torch.Tensor, mask: torch.Tensor):
        """query (B,T,Dq), keys (B,S,Dk), mask (B,S) → context (B,T,Dk),
        weights (B,T,S). Rows with an empty mask get zero context."""
        scores = self.score(
            torch.tanh(self.w_query(query).unsqueeze(2) + self.w_key(keys).unsqueeze(1))
        ).squeeze(-1)
        scores = scores.masked_fill(~mask.unsqueeze(1), _MASK_VALUE)
        weights = torch.softmax(scores, dim=-1)
        weights = weights * mask.unsqueeze(1).to(weights.dtype)
        context = torch.bmm(weights, keys)
        return context, weights


class BiLSTMEncoder(nn.Module):
    def __init__(self, config: GenModelConfig, embedding: nn.Embedding):
        super().__init__()
        if config.hidden_size % 2:
            raise ValueError("hidden_size must be even for a bidirectional encoder")
        self.embedding = embedding
        dropout = 1.0 - config.dropout_keep if config.num_layers > 1 else 0.0
        self.lstm = nn.LSTM(
            config.embedding_dim,
            config.hidden_size // 2,
            num_layers=config.num_layers,
            batch_first=True,
            bidirectional=True,
            dropout=dropout,
        )

    def forward(self, ids: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        emb = self.embedding(ids)
        packed = nn.utils.rnn.pack_padded_sequence(
            emb, lengths.clamp(min=1).cpu(), batch_first=True, enforce_sorted=False
        )
        out, _ = self.lstm(packed)
        states, _ = nn.utils.rnn.pad_packed_sequence(
            out, batch_first=True, total_length=ids.size(1)
        )
        return states


def _scatter_copy(weights: torch.Tensor, ext_ids: torch.Tensor, width: int) -> torch.Tensor:
    """Sum attention weights into an extended-vocabulary distribution."""
    batch, steps, _ = weights.shape
    out = torch.zeros(batch, steps, width, dtype=weights.dtype, device=weights.device)
    index = ext_ids.unsqueeze(1).expand(batch, steps, ext_ids.size(1))
    out.scatter_add_(2, index, weights)
    return out


def copy_distribution(
    gen_dist: torch.Tensor,
    attention: torch.Tensor,
    ext_ids: torch.Tensor,
    p_gen: torch.Tensor,
    n_extra: int,
) -> torch.Tensor:
    """P(w) = p_gen·gen(w) + (1−p_gen)·Σ attention over positions holding w.

    gen_dist (B,T,V), attention (B,T,S), ext_ids (B,S), p_gen (B,T,1).
    """
    width = gen_dist.size(-1) + n_extra
    if n_extra:
        pad = torch.zeros(
            *gen_dist.shape[:-1], n_extra, dtype=gen_dist.dtype, device=gen_dist.device
        )
        gen_dist = torch.cat([gen_dist, pad], dim=-1)
    copy = _scatter_copy(attention, ext_ids, width)
    return p_gen * gen_dist + (1.0 - p_gen) * copy


@dataclass
class GenForwardOutput:
    log_probs: torch.Tensor  # (B,T,V+extra)
    attention: torch.Tensor  # (B,T,S) over the concatenated input (tri: claims group)
    group_attention: dict = field(default_factory=dict)  # tri only


class _EncoderCache:
    """Per-batch encoder states reused across decoder steps."""

    def __init__(self, batch: GenBatch):
        self.batch = batch
        self.states = None  # (B,S,H) or dict for tri
        self.attn_mask = None  # (B,S) positions the decoder may attend to


class RecurrentGenModel(nn.Module):
    """BiLSTM encoder-decoder covering the concat, tri-encoder, and
    end-to-end architectures."""

    def __init__(self, config: GenModelConfig, vocab: Vocabulary):
        super().__init__()
        if config.architecture == "transformer_concat":
            raise ValueError("RecurrentGenModel does not implement the transformer")
        self.config = config
        self.vocab = vocab
        hidden = config.hidden_size
        self.embedding = nn.Embedding(len(vocab), config.embedding_dim, padding_idx=vocab.pad_id)
        if config.architecture == "tri_encoder":
            self.encoders = nn.ModuleDict(
                {name: BiLSTMEncoder(config, self.embedding) for name in TRI_GROUPS}
            )
            self.attentions = nn.ModuleDict(
                {name: AdditiveAttention(hidden, hidden, hidden) for name in TRI_GROUPS}
            )
            context_dim = 3 * hidden
        else:
            self.encoder = BiLSTMEncoder(config, self.embedding)
            self.attention = AdditiveAttention(hidden, hidden, hidden)
            context_dim = hidden
        dropout = 1.0 - config.dropout_keep if config.num_layers > 1 else 0.0
        self.decoder = nn.LSTM(
            config.embedding_dim,
            hidden,
            num_layers=config.num_layers,
            batch_first=True,
            dropout=dropout,
        )
        self.combine = nn.Linear(hidden + context_dim, hidden)
        self.out = nn.Linear(hidden, len(vocab))
        if config.use_copy:
            self.p_gen = nn.Linear(hidden + context_dim + config.embedding_dim, 1)

    # -- encoding ---------------------------------------------------------
    def encode(self, batch: GenBatch) -> _EncoderCache:
        cache = _EncoderCache(batch)
        if self.config.architecture == "tri_encoder":
            cache.states = {
                name: self.encoders[name](batch.groups[name][0], batch.groups[name][3])
                for name in TRI_GROUPS
            }
        else:
            cache.states = self.encoder(batch.src_ids, batch.src_lengths)
            if self.config.architecture == "e2e_claim_select":
                cache.attn_mask = batch.claim_pos_mask.any(dim=1)
            else:
                cache.attn_mask = batch.src_mask
        return cache

    # -- decoding ---------------------------------------------------------
    def _mix(self, dec_out: torch.Tensor, emb_in: torch.Tensor, cache: _EncoderCache):
        """Attention, vocabulary softmax, and the copy mixture for decoder
        states dec_out (B,T,H) produced from inputs embedded as emb_in."""
        batch = cache.batch
        group_attention = {}
        if self.config.architecture == "tri_encoder":
            contexts = []
            for name in TRI_GROUPS:
                ctx, weights = self.attentions[name](
                    dec_out, cache.states[name], batch.groups[name][2]
                )
                contexts.append(ctx)
                group_attention[name] = weights
            context = torch.cat(contexts, dim=-1)
            attention = group_attention["claims"]
        else:
            context, attention = self.attention(dec_out, cache.states, cache.attn_mask)
        combined = torch.tanh(self.combine(torch.cat([dec_out, context], dim=-1)))
        gen_dist = torch.softmax(self.out(combined), dim=-1)
        if self.config.use_copy:
            p_gen = torch.sigmoid(
                self.p_gen(torch.cat([dec_out, context, emb_in], dim=-1))
            )
            if self.config.architecture == "tri_encoder":
                probs = self._tri_copy(gen_dist, group_attention, p_gen, batch)
            else:
                probs = copy_distribution(
                    gen_dist, attention, batch.src_ext, p_gen, batch.n_extra
                )
        else:
            probs = gen_dist
        log_probs = torch.log(probs + 1e-12)
        return GenForwardOutput(
            log_probs=log_probs, attention=attention, group_attention=group_attention
        )

    def _tri_copy(self, gen_dist, group_attention, p_gen, batch: GenBatch):
        """Copy mass split evenly across the non-empty input groups."""
        width = gen_dist.size(-1) + batch.n_extra
        present = []
        scattered = []
        for name in TRI_GROUPS:
            _, g_ext, g_mask, _ = batch.groups[name]
            present.append(g_mask.any(dim=1))
            scattered.append(_scatter_copy(group_attention[name], g_ext, width))
        denom = (
            torch.stack(present, dim=1).sum(dim=1).clamp(min=1).to(gen_dist.dtype)
        ).view(-1, 1, 1)
        copy = sum(
            s * p.to(gen_dist.dtype).view(-1, 1, 1) for s, p in zip(scattered, present)
        ) / denom
        if batch.n_extra:
            pad = torch.zeros(
                *gen_dist.shape[:-1], batch.n_extra,
                dtype=gen_dist.dtype, device=gen_dist.device,
            )
            gen_dist = torch.cat([gen_dist, pad], dim=-1)
        return p_gen * gen_dist + (1.0 - p_gen) * copy

    def forward_teacher(self, batch: GenBatch) -> GenForwardOutput:
        cache = self.encode(batch)
        emb_in = self.embedding(batch.tgt_in)
        dec_out, _ = self.decoder(emb_in)
        return self._mix(dec_out, emb_in, cache)

    def init_state(self, cache: _EncoderCache):
        rows = cache.batch.src_ids.size(0)
        shape = (self.config.num_layers, rows, self.config.hidden_size)
        zeros = torch.zeros(shape, dtype=self.embedding.weight.dtype)
        return (zeros, zeros.clone())

    def decode_step(self, prev_ids: torch.Tensor, state, cache: _EncoderCache):
        emb_in = self.embedding(prev_ids).unsqueeze(1)
        dec_out, state = self.decoder(emb_in, state)
        output = self._mix(dec_out, emb_in, cache)
        return output.log_probs.squeeze(1), state


class PositionalEncoding(nn.Module):
    def __init__(self, d_model: int, max_len: int):
        super().__init__()
        position = torch.arange(max_len).unsqueeze(1).float()
        div = torch.exp(torch.arange(0, d_model, 2).float() * (-math.log(10000.0) / d_model))
        table = torch.zeros(max_len, d_model)
        table[:, 0::2] = torch.sin(position * div)
        table[:, 1::2] = torch.cos(position * div[: d_model // 2])
        self.register_buffer("table", table)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.table[: x.size(1)].to(x.dtype)


class TransformerEncoderBlock(nn.Module):
    def __init__(self, d_model: int, heads: int, ff_dim: int):
        super().__init__()
        self.attn = nn.MultiheadAttention(d_model, heads, batch_first=True)
        self.norm1 = nn.LayerNorm(d_model)
        self.norm2 = nn.LayerNorm(d_model)
        self.ff = nn.Sequential(nn.Linear(d_model, ff_dim), nn.ReLU(), nn.Linear(ff_dim, d_model))

    def forward(self, x: torch.Tensor, pad_mask: torch.Tensor) -> torch.Tensor:
        attended, _ = self.attn(x, x, x, key_padding_mask=pad_mask, need_weights=False)
        x = self.norm1(x + attended)
        return self.norm2(x + self.ff(x))


class TransformerDecoderBlock(nn.Module):
    def __init__(self, d_model: int, heads: int, ff_dim: int):
        super().__init__()
        self.self_attn = nn.MultiheadAttention(d_model, heads, batch_first=True)
        self.cross_attn = nn.MultiheadAttention(d_model, heads, batch_first=True)
        self.norm1 = nn.LayerNorm(d_model)
        self.norm2 = nn.LayerNorm(d_model)
        self.norm3 = nn.LayerNorm(d_model)
        self.ff = nn.Sequential(nn.Linear(d_model, ff_dim), nn.ReLU(), nn.Linear(ff_dim, d_model))

    def forward(self, x, memory, causal_mask, memory_pad_mask, need_weights=False):
        attended, _ = self.self_attn(x, x, x, attn_mask=causal_mask, need_weights=False)
        x = self.norm1(x + attended)
        crossed, weights = self.cross_attn(
            x, memory, memory,
            key_padding_mask=memory_pad_mask,
            need_weights=need_weights,
            average_attn_weights=True,
        )
        x = self.norm2(x + crossed)
        return self.norm3(x + self.ff(x)), weights


class TransformerGenModel(nn.Module):
    def __init__(self, config: GenModelConfig, vocab: Vocabulary):
        super().__init__()
        if config.architecture != "transformer_concat":
            raise ValueError("TransformerGenModel implements transformer_concat only")
        self.config = config
        self.vocab = vocab
        d = config.tf_d_model
        self.embedding = nn.Embedding(len(vocab), d, padding_idx=vocab.pad_id)
        self.positional = PositionalEncoding(d, max(config.max_input_len, config.max_output_len) + 2)
        self.encoder_blocks = nn.ModuleList(
            TransformerEncoderBlock(d, config.tf_heads, config.tf_ff_dim)
            for _ in range(config.tf_blocks)
        )
        self.decoder_blocks = nn.ModuleList(
            TransformerDecoderBlock(d, config.tf_heads, config.tf_ff_dim)
            for _ in range(config.tf_blocks)
        )
        self.out = nn.Linear(d, len(vocab))
        if config.use_copy:
            self.p_gen = nn.Linear(d, 1)
        self.scale = math.sqrt(d)

    def encode(self, batch: GenBatch) -> _EncoderCache:
        cache = _EncoderCache(batch)
        x = self.positional(self.embedding(batch.src_ids) * self.scale)
        pad_mask = ~batch.src_mask
        for block in self.encoder_blocks:
            x = block(x, pad_mask)
        cache.states = x
        cache.attn_mask = batch.src_mask
        return cache

    def _decode(self, tgt_in: torch.Tensor, cache: _EncoderCache):
        steps = tgt_in.size(1)
        x = self.positional(self.embedding(tgt_in) * self.scale)
        causal = torch.triu(
            torch.full((steps, steps), float("-inf"), dtype=x.dtype), diagonal=1
        )
        pad_mask = ~cache.batch.src_mask
        weights = None
        for i, block in enumerate(self.decoder_blocks):
            last = i == len(self.decoder_blocks) - 1
            x, w = block(x, cache.states, causal, pad_mask, need_weights=last)
            if last:
                weights = w
        gen_dist = torch.softmax(self.out(x), dim=-1)
        if self.config.use_copy:
            p_gen = torch.sigmoid(self.p_gen(x))
            probs = copy_distribution(
                gen_dist, weights, cache.batch.src_ext, p_gen, cache.batch.n_extra
            )
        else:
            probs = gen_dist
        return GenForwardOutput(log_probs=torch.log(probs + 1e-12), attention=weights)

    def forward_teacher(self, batch: GenBatch) -> GenForwardOutput:
        cache = self.encode(batch)
        return self._decode(batch.tgt_in, cache)

    def init_state(self, cache: _EncoderCache):
        rows = cache.batch.src_ids.size(0)
        return torch.empty(rows, 0, dtype=torch.long)

    def decode_step(self, prev_ids: torch.Tensor, state, cache: _EncoderCache):
        prefix = torch.cat([state, prev_ids.unsqueeze(1)], dim=1)
        output = self._decode(prefix, cache)
        return output.log_probs[:, -1, :], prefix


def build_model(config: GenModelConfig, vocab: Vocabulary) -> nn.Module:
    if config.architecture == "transformer_concat":
        return TransformerGenModel(config, vocab)
    return RecurrentGenModel(config, vocab)


def gen_model_meta(config: GenModelConfig, vocab: Vocabulary) -> dict:
    return {"kind": "generator", "config": asdict(config), "vocab_sha256": vocab.sha256()}


def config_from_meta(meta: dict) -> GenModelConfig:
    return GenModelConfig(**meta["config"])
