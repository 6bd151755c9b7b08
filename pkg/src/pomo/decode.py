"""Greedy and beam decoding for the generation models."""

from dataclasses import dataclass

import torch

from .genmodel import GenModelConfig, collate, encode_instance
from .vocab import Vocabulary


@dataclass(frozen=True)
class DecodeResult:
    tokens: tuple
    mode: str


def _resolve_token(idx: int, vocab: Vocabulary, oov_tokens: list) -> str:
    if idx < len(vocab):
        return vocab.token_of(idx)
    return oov_tokens[idx - len(vocab)]


def _feed_id(idx: int, vocab: Vocabulary) -> int:
    """Extended-vocabulary ids are fed back to the decoder as unk."""
    return idx if idx < len(vocab) else vocab.unk_id


def greedy_decode(
    model,
    vocab: Vocabulary,
    config: GenModelConfig,
    instances: list,
    scores_map=None,
    max_output_len: int = None,
) -> list:
    """Batched greedy decoding; returns one prediction string per instance."""
    cap = max_output_len or config.max_output_len
    predictions = []
    model.eval()
    with torch.no_grad():
        for start in range(0, len(instances), config.batch_size):
            chunk = instances[start : start + config.batch_size]
            encoded = [
                encode_instance(
                    inst, vocab, config,
                    scores=scores_map.get(inst.id) if scores_map else None,
                )
                for inst in chunk
            ]
            batch = collate(encoded, vocab, config)
            cache = model.encode(batch)
            state = model.init_state(cache)
            prev = torch.full((len(chunk),), vocab.bos_id, dtype=torch.long)
            finished = torch.zeros(len(chunk), dtype=torch.bool)
            rows = [[] for _ in chunk]
            for _ in range(cap):
                log_probs, state = model.decode_step(prev, state, cache)
                next_ids = log_probs.argmax(dim=-1)
                for i, idx in enumerate(next_ids.tolist()):
                    if finished[i]:
                        continue
                    if idx == vocab.eos_id:
                        finished[i] = True
                    else:
                        rows[i].append(_resolve_token(idx, vocab, batch.oov_lists[i]))
                if bool(finished.all()):
                    break
                prev = torch.tensor(
                    [_feed_id(idx, vocab) for idx in next_ids.tolist()], dtype=torch.long
                )
            predictions.extend(" ".join(row) for row in rows)
    return predictions


def beam_decode(
    model,
    vocab: Vocabulary,
    config: GenModelConfig,
    instance,
    width: int = 5,
    scores_map=None,
    max_output_len: int = None,
) -> DecodeResult:
    """Beam search over one instance; beams are ranked by total log-probability."""
    cap = max_output_len or config.max_output_len
    model.eval()
    with torch.no_grad():
        scores = scores_map.get(instance.id) if scores_map else None
        encoded = encode_instance(instance, vocab, config, scores=scores)
        batch = collate([encoded] * width, vocab, config)
        cache = model.encode(batch)
        state = model.init_state(cache)
        # Beams: (tokens, feed_ids, logprob, finished); start identical, so
        # only the first is live on the first step.
        beams = [([], vocab.bos_id, 0.0, False)]
        for _ in range(cap):
            if all(b[3] for b in beams):
                break
            prev = torch.tensor(
                [b[1] for b in beams] + [vocab.bos_id] * (width - len(beams)),
                dtype=torch.long,
            )
            log_probs, new_state = model.decode_step(prev, state, cache)
            top = torch.topk(log_probs, k=min(width, log_probs.size(-1)), dim=-1)
            candidates = []
            for i, beam in enumerate(beams):
                tokens, _, logprob, finished = beam
                if finished:
                    candidates.append((logprob, len(candidates), tokens, None, True, i))
                    continue
                for logp, idx in zip(top.values[i].tolist(), top.indices[i].tolist()):
                    candidates.append((logprob + logp, len(candidates), tokens, idx, False, i))
            candidates.sort(key=lambda c: (-c[0], c[1]))
            next_beams = []
            keep_rows = []
            for logprob, _, tokens, idx, finished, row in candidates[:width]:
                if finished:
                    next_beams.append((tokens, vocab.eos_id, logprob, True))
                elif idx == vocab.eos_id:
                    next_beams.append((tokens, vocab.eos_id, logprob, True))
                else:
                    tok = _resolve_token(idx, vocab, batch.oov_lists[0])
                    next_beams.append((tokens + [tok], _feed_id(idx, vocab), logprob, False))
                keep_rows.append(row)
            state = _reindex_state(new_state, keep_rows, width)
            beams = next_beams
        best = max(beams, key=lambda b: b[2])
    return DecodeResult(tokens=tuple(best[0]), mode=f"beam({width})")


def _reindex_state(new_state, keep_rows: list, width: int):
    """Reorder decoder state rows to follow the surviving beams."""
    rows = keep_rows + [keep_rows[-1]] * (width - len(keep_rows))
    index = torch.tensor(rows, dtype=torch.long)
    if isinstance(new_state, tuple):  # LSTM (h, c): (layers, beams, hidden)
        return (
            new_state[0].index_select(1, index),
            new_state[1].index_select(1, index),
        )
    return new_state.index_select(0, index)  # transformer prefix ids


def decode_instances(
    model,
    vocab: Vocabulary,
    config: GenModelConfig,
    instances: list,
    mode: str = "greedy",
    beam_width: int = 5,
    scores_map=None,
) -> list:
    if mode == "greedy":
        return greedy_decode(model, vocab, config, instances, scores_map=scores_map)
    if mode == "beam":
        return [
            " ".join(
                beam_decode(model, vocab, config, inst, width=beam_width, scores_map=scores_map).tokens
            )
            for inst in instances
        ]
    raise ValueError(f"unknown decode mode {mode!r}")
