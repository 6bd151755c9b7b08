"""Generator training: teacher-forced losses, schedules, checkpoint-on-F1."""

import copy
import logging
import random
from dataclasses import dataclass

import torch
from torch.nn import functional as F

from .decode import greedy_decode
from .genmodel import (
    GenBatch,
    GenModelConfig,
    build_model,
    collate,
    encode_instance,
)
from .linearize import build_gen_vocab
from .metrics import corpus_bow_prf
from .vocab import Vocabulary

logger = logging.getLogger(__name__)


def nll_loss(log_probs: torch.Tensor, tgt_out: torch.Tensor, tgt_mask: torch.Tensor) -> torch.Tensor:
    """Mean negative log-likelihood over real target positions."""
    gold = log_probs.gather(-1, tgt_out.unsqueeze(-1)).squeeze(-1)
    mask = tgt_mask.to(log_probs.dtype)
    return -(gold * mask).sum() / mask.sum().clamp(min=1)


def smoothed_nll_loss(
    log_probs: torch.Tensor,
    tgt_out: torch.Tensor,
    tgt_mask: torch.Tensor,
    epsilon: float,
    base_vocab: int,
) -> torch.Tensor:
    """Label-smoothed NLL: ε of the target mass spread over the base vocab."""
    gold = log_probs.gather(-1, tgt_out.unsqueeze(-1)).squeeze(-1)
    uniform = log_probs[..., :base_vocab].mean(dim=-1)
    per_token = -((1.0 - epsilon) * gold + epsilon * uniform)
    mask = tgt_mask.to(log_probs.dtype)
    return (per_token * mask).sum() / mask.sum().clamp(min=1)


def claim_selection_scores(
    attention: torch.Tensor,
    batch: GenBatch,
    aggregation: str = "mean",
) -> torch.Tensor:
    """Per-claim pre-sigmoid scores: attention mass inside each claim span,
    aggregated over real decoder steps."""
    span_mass = torch.einsum(
        "bts,bcs->btc", attention, batch.claim_pos_mask.to(attention.dtype)
    )
    step_mask = batch.tgt_mask.to(attention.dtype).unsqueeze(-1)
    total = (span_mass * step_mask).sum(dim=1)
    if aggregation == "mean":
        return total / step_mask.sum(dim=1).clamp(min=1)
    if aggregation == "sum":
        return total
    raise ValueError(f"unknown aux aggregation {aggregation!r}")


def claim_attention_aux_loss(
    attention: torch.Tensor,
    batch: GenBatch,
    aggregation: str = "mean",
) -> torch.Tensor:
    """Mean BCE between soft claim-selection probabilities and relevance."""
    valid = batch.claim_valid.to(attention.dtype)
    if valid.sum() == 0:
        return torch.zeros((), dtype=attention.dtype)
    scores = claim_selection_scores(attention, batch, aggregation)
    bce = F.binary_cross_entropy_with_logits(
        scores, batch.claim_labels.to(attention.dtype), reduction="none"
    )
    return (bce * valid).sum() / valid.sum()


def batch_loss(model, batch: GenBatch, config: GenModelConfig) -> torch.Tensor:
    output = model.forward_teacher(batch)
    if config.architecture == "transformer_concat" and config.label_smoothing > 0:
        loss = smoothed_nll_loss(
            output.log_probs, batch.tgt_out, batch.tgt_mask,
            config.label_smoothing, len(model.vocab),
        )
    else:
        loss = nll_loss(output.log_probs, batch.tgt_out, batch.tgt_mask)
    if config.architecture == "e2e_claim_select" and config.aux_weight > 0:
        loss = loss + config.aux_weight * claim_attention_aux_loss(
            output.attention, batch, config.aux_aggregation
        )
    return loss


def noam_lr(step: int, d_model: int, factor: float, warmup: int) -> float:
    return factor * d_model ** -0.5 * min(step ** -0.5, step * warmup ** -1.5)


@dataclass
class GenTrainResult:
    model: object
    vocab: Vocabulary
    log: list
    best_step: int
    best_f1: float


def evaluate_generator(model, vocab, config: GenModelConfig, instances, scores_map=None) -> tuple:
    """Bag-of-words P/R/F1 of greedy decodes against the gold targets."""
    preds = greedy_decode(model, vocab, config, instances, scores_map=scores_map)
    refs = [inst.pm_target for inst in instances]
    return corpus_bow_prf(preds, refs)


def train_generator(
    train: list,
    valid: list,
    config: GenModelConfig,
    vocab: Vocabulary = None,
    scores_map=None,
) -> GenTrainResult:
    """Teacher-forced training; returns the parameters of the evaluation
    with the best validation bag-of-words F1."""
    if not train:
        raise ValueError("training set is empty")
    if not valid:
        raise ValueError("validation set is empty")
    torch.manual_seed(config.seed)
    torch.set_num_threads(1)
    if vocab is None:
        vocab = build_gen_vocab(train, size=config.vocab_size, source=config.claim_source)
    model = build_model(config, vocab)

    encoded = [
        encode_instance(
            inst, vocab, config,
            scores=scores_map.get(inst.id) if scores_map else None,
        )
        for inst in train
    ]

    if config.architecture == "transformer_concat":
        optimizer = torch.optim.Adam(model.parameters(), lr=1.0, betas=(0.9, 0.98), eps=1e-9)
    else:
        optimizer = torch.optim.SGD(model.parameters(), lr=config.learning_rate)

    rng = random.Random(config.seed)
    order = list(range(len(encoded)))
    rng.shuffle(order)
    cursor = 0

    log = []
    best_f1 = -1.0
    best_step = 0
    best_state = None
    running_loss = 0.0
    since_eval = 0
    for step in range(1, config.total_steps + 1):
        rows = []
        for _ in range(min(config.batch_size, len(encoded))):
            if cursor == len(order):
                rng.shuffle(order)
                cursor = 0
            rows.append(encoded[order[cursor]])
            cursor += 1
        batch = collate(rows, vocab, config)
        if config.architecture == "transformer_concat":
            lr = noam_lr(step, config.tf_d_model, config.tf_lr_factor, config.tf_warmup)
            for group in optimizer.param_groups:
                group["lr"] = lr
        model.train()
        optimizer.zero_grad()
        loss = batch_loss(model, batch, config)
        loss.backward()
        optimizer.step()
        running_loss += float(loss.detach())
        since_eval += 1

        if step % config.eval_every == 0 or step == config.total_steps:
            p, r, f1 = evaluate_generator(model, vocab, config, valid, scores_map=scores_map)
            entry = {
                "step": step,
                "train_loss": running_loss / max(since_eval, 1),
                "valid_precision": p,
                "valid_recall": r,
                "valid_f1": f1,
            }
            log.append(entry)
            logger.info("step %d: loss %.4f, valid F1 %.4f", step, entry["train_loss"], f1)
            running_loss = 0.0
            since_eval = 0
            if f1 > best_f1:
                best_f1 = f1
                best_step = step
                best_state = copy.deepcopy(model.state_dict())
            if step == config.total_steps:
                break
    if best_state is not None:
        model.load_state_dict(best_state)
    return GenTrainResult(model=model, vocab=vocab, log=log, best_step=best_step, best_f1=best_f1)


def e2e_claim_probs(model, vocab, config: GenModelConfig, instances: list) -> list:
    """Teacher-forced soft claim-selection probabilities per instance.

    Returns one (probs, labels) pair per instance, aligned with the claims
    included in its linearization.
    """
    results = []
    model.eval()
    with torch.no_grad():
        for inst in instances:
            batch = collate([encode_instance(inst, vocab, config)], vocab, config)
            output = model.forward_teacher(batch)
            scores = claim_selection_scores(output.attention, batch, config.aux_aggregation)
            probs = torch.sigmoid(scores)[0]
            valid = batch.claim_valid[0]
            n = int(valid.sum())
            results.append((probs[:n].tolist(), batch.claim_labels[0, :n].tolist()))
    return results
