"""Neural claim scorer: two recurrent encoders over context and claim text,
concatenated final states, and a sigmoid relevance score per claim."""

import copy
import logging
import random
from dataclasses import dataclass, asdict

import torch
from torch import nn

from .dataset import PomoInstance
from .selection import (
    evaluate_selection_corpus,
    gold_selection,
    select_by_threshold,
    select_top_n,
)
from .vocab import SEL_SPECIALS, Vocabulary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SelModelConfig:
    vocab_size: int = 50_000
    embedding_dim: int = 100
    hidden_size: int = 256
    num_layers: int = 2
    dropout_keep: float = 0.5
    tau: float = 0.37
    top_n: int = 2

    def __post_init__(self):
        if min(self.vocab_size, self.embedding_dim, self.hidden_size, self.num_layers) <= 0:
            raise ValueError("model dimensions must be positive")
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must be in (0,1), got {self.tau}")
        if self.top_n < 0:
            raise ValueError(f"top_n must be non-negative, got {self.top_n}")


@dataclass(frozen=True)
class SelTrainConfig:
    learning_rate: float = 0.1
    batch_size: int = 32
    epochs: int = 20
    seed: int = 0
    mode: str = "ranker"  # validation selection rule: "ranker" or "classifier"


def context_tokens(instance: PomoInstance) -> list:
    return (instance.prev_sentence + " " + instance.sent_with_slot).split()


def claim_tokens(key: str, value: str) -> list:
    return (key + " " + value).split()


def build_sel_vocab(train: list, size: int = 50_000) -> Vocabulary:
    def streams():
        for inst in train:
            yield context_tokens(inst)
            for claim in inst.claims:
                yield claim_tokens(claim.key, claim.value)

    return Vocabulary.build(streams(), size=size, specials=SEL_SPECIALS)


def _init_forget_bias(lstm: nn.LSTM, value: float = 2.0) -> None:
    """Positive forget-gate bias so cell states accumulate by default."""
    for name, param in lstm.named_parameters():
        if "bias" in name:
            hidden = param.size(0) // 4
            with torch.no_grad():
                param[hidden : 2 * hidden].fill_(value)


class SelectorModel(nn.Module):
    def __init__(self, config: SelModelConfig, vocab: Vocabulary):
        super().__init__()
        self.config = config
        self.vocab = vocab
        dropout = 1.0 - config.dropout_keep if config.num_layers > 1 else 0.0
        self.embedding = nn.Embedding(len(vocab), config.embedding_dim, padding_idx=vocab.pad_id)
        self.context_encoder = nn.LSTM(
            config.embedding_dim,
            config.hidden_size,
            num_layers=config.num_layers,
            batch_first=True,
            dropout=dropout,
        )
        self.claim_encoder = nn.LSTM(
            config.embedding_dim,
            config.hidden_size,
            num_layers=config.num_layers,
            batch_first=True,
            dropout=dropout,
        )
        _init_forget_bias(self.context_encoder)
        _init_forget_bias(self.claim_encoder)
        # The fully-connected layer sees the two final states plus their
        # elementwise product and difference; without the interaction terms
        # the score would be additive in context and claim, ranking claims
        # identically under every context.
        self.out = nn.Linear(4 * config.hidden_size, 1)

    def _encode(self, encoder: nn.LSTM, ids: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        """Top-layer hidden state at each sequence's last real token."""
        outputs, _ = encoder(self.embedding(ids))
        index = (lengths - 1).clamp(min=0).view(-1, 1, 1).expand(-1, 1, outputs.size(-1))
        return outputs.gather(1, index).squeeze(1)

    def forward(self, ctx_ids, ctx_lens, claim_ids, claim_lens) -> torch.Tensor:
        """Relevance logits, one per (context, claim) row."""
        ctx = self._encode(self.context_encoder, ctx_ids, ctx_lens)
        clm = self._encode(self.claim_encoder, claim_ids, claim_lens)
        features = torch.cat([ctx, clm, ctx * clm, (ctx - clm).abs()], dim=-1)
        return self.out(features).squeeze(-1)


def _pad_batch(sequences: list, pad_id: int) -> tuple:
    lengths = torch.tensor([max(len(s), 1) for s in sequences], dtype=torch.long)
    width = int(lengths.max())
    ids = torch.full((len(sequences), width), pad_id, dtype=torch.long)
    for row, seq in enumerate(sequences):
        ids[row, : len(seq)] = torch.tensor(seq, dtype=torch.long)
    return ids, lengths


def score_claims(model: SelectorModel, instance: PomoInstance) -> list:
    """One sigmoid score per claim, deterministic in eval mode."""
    if not instance.claims:
        return []
    vocab = model.vocab
    ctx = vocab.encode(context_tokens(instance))
    claims = [vocab.encode(claim_tokens(c.key, c.value)) for c in instance.claims]
    model.eval()
    with torch.no_grad():
        ctx_ids, ctx_lens = _pad_batch([ctx] * len(claims), vocab.pad_id)
        claim_ids, claim_lens = _pad_batch(claims, vocab.pad_id)
        logits = model(ctx_ids, ctx_lens, claim_ids, claim_lens)
        return torch.sigmoid(logits).tolist()


def predict_selection(model: SelectorModel, instance: PomoInstance, mode: str) -> set:
    scores = score_claims(model, instance)
    if mode == "classifier":
        return select_by_threshold(scores, model.config.tau)
    if mode == "ranker":
        return select_top_n(scores, model.config.top_n)
    raise ValueError(f"unknown selection mode {mode!r}")


def evaluate_selector(model: SelectorModel, instances: list, mode: str) -> tuple:
    preds = [predict_selection(model, inst, mode) for inst in instances]
    golds = [gold_selection(inst) for inst in instances]
    return evaluate_selection_corpus(preds, golds)


def train_selector(
    train: list,
    valid: list,
    config: SelModelConfig = SelModelConfig(),
    train_config: SelTrainConfig = SelTrainConfig(),
    vocab: Vocabulary = None,
) -> tuple:
    """Train with BCE against the relevance flags; return (model, log).

    The returned parameters are those of the epoch with the best validation
    F1 under train_config.mode selection.
    """
    if not train or not valid:
        raise ValueError("train and valid sets must be non-empty")
    if not any(c.relevant for inst in train for c in inst.claims):
        raise ValueError("training set has no relevant claims to learn from")

    torch.manual_seed(train_config.seed)
    torch.set_num_threads(1)
    if vocab is None:
        vocab = build_sel_vocab(train, size=config.vocab_size)
    model = SelectorModel(config, vocab)

    rows = []
    for inst in train:
        ctx = vocab.encode(context_tokens(inst))
        for claim in inst.claims:
            rows.append((ctx, vocab.encode(claim_tokens(claim.key, claim.value)), claim.relevant))

    rng = random.Random(train_config.seed)
    optimizer = torch.optim.SGD(model.parameters(), lr=train_config.learning_rate)
    loss_fn = nn.BCEWithLogitsLoss()
    log = []
    best_f1 = -1.0
    best_state = None
    for epoch in range(train_config.epochs):
        model.train()
        rng.shuffle(rows)
        total_loss = 0.0
        for start in range(0, len(rows), train_config.batch_size):
            batch = rows[start : start + train_config.batch_size]
            ctx_ids, ctx_lens = _pad_batch([r[0] for r in batch], vocab.pad_id)
            claim_ids, claim_lens = _pad_batch([r[1] for r in batch], vocab.pad_id)
            labels = torch.tensor([float(r[2]) for r in batch])
            optimizer.zero_grad()
            logits = model(ctx_ids, ctx_lens, claim_ids, claim_lens)
            loss = loss_fn(logits, labels)
            loss.backward()
            optimizer.step()
            total_loss += float(loss.detach()) * len(batch)
        p, r, f1 = evaluate_selector(model, valid, train_config.mode)
        entry = {
            "epoch": epoch + 1,
            "train_loss": total_loss / len(rows),
            "valid_precision": p,
            "valid_recall": r,
            "valid_f1": f1,
        }
        log.append(entry)
        logger.info(
            "epoch %d: loss %.4f, valid F1 %.4f", entry["epoch"], entry["train_loss"], f1
        )
        if f1 > best_f1:
            best_f1 = f1
            best_state = copy.deepcopy(model.state_dict())
    if best_state is not None:
        model.load_state_dict(best_state)
    return model, log


def selector_meta(config: SelModelConfig, train_config: SelTrainConfig, vocab: Vocabulary) -> dict:
    return {
        "kind": "selector",
        "config": asdict(config),
        "train_config": asdict(train_config),
        "vocab_sha256": vocab.sha256(),
    }
