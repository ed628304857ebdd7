"""Text-prompt encoders for the text-fusion assessor variants.

The default "hash" encoder is a deterministic hashed bag-of-words embedding:
no downloaded weights, stable across processes, cheap on CPU. A transformer
encoder (e.g. bert-base-uncased) can be requested by name when its pretrained
weights are available locally. Encoders are frozen by default.
"""

from __future__ import annotations

import zlib

import torch
from torch import nn


class TextEncodingError(ValueError):
    pass


class HashTextEncoder(nn.Module):
    """Hashed bag-of-words embedding, mean-pooled over tokens."""

    def __init__(self, dim: int = 64, buckets: int = 2048, seed: int = 0):
        super().__init__()
        self.dim = dim
        self.buckets = buckets
        self.embedding = nn.Embedding(buckets, dim)
        gen = torch.Generator().manual_seed(seed)
        with torch.no_grad():
            self.embedding.weight.copy_(torch.randn(buckets, dim, generator=gen))

    def _token_ids(self, text: str) -> list[int]:
        tokens = text.lower().split()
        if not tokens:
            raise TextEncodingError("text prompt is empty")
        # crc32 is stable across processes, unlike hash()
        return [zlib.crc32(t.encode("utf-8")) % self.buckets for t in tokens]

    def forward(self, ids: torch.Tensor) -> torch.Tensor:
        return self.embedding(ids).mean(dim=-2)

    def encode(self, prompts: list[str]) -> torch.Tensor:
        """Encode a batch of prompts to (B, dim)."""
        out = []
        for text in prompts:
            if text is None:
                raise TextEncodingError("text prompt is missing")
            ids = torch.tensor(self._token_ids(text), dtype=torch.long)
            out.append(self.forward(ids))
        return torch.stack(out)


class TransformerTextEncoder(nn.Module):
    """Mean-pooled last hidden state of a Hugging Face transformer."""

    def __init__(self, model_name: str):
        super().__init__()
        try:
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise TextEncodingError(
                f"text encoder {model_name!r} needs the transformers package"
            ) from exc
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model_name)
            self.model = AutoModel.from_pretrained(model_name)
        except OSError as exc:
            raise TextEncodingError(
                f"pretrained weights for {model_name!r} are not available locally: {exc}"
            ) from exc
        self.dim = self.model.config.hidden_size

    def encode(self, prompts: list[str]) -> torch.Tensor:
        if any(p is None or not p.strip() for p in prompts):
            raise TextEncodingError("text prompt is missing")
        batch = self.tokenizer(prompts, return_tensors="pt", padding=True, truncation=True)
        hidden = self.model(**batch).last_hidden_state
        mask = batch["attention_mask"].unsqueeze(-1)
        return (hidden * mask).sum(dim=1) / mask.sum(dim=1)


def build_text_encoder(name: str = "hash", freeze: bool = True) -> nn.Module:
    if name == "hash":
        encoder: nn.Module = HashTextEncoder()
    else:
        encoder = TransformerTextEncoder(name)
    if freeze:
        for p in encoder.parameters():
            p.requires_grad_(False)
    return encoder
