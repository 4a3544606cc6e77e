"""Run a causal LM over texts and dump what the scorer consumes: one
float32 hidden-state matrix per text (last hidden layer, one row per
token), optional next-token log-prob vectors, and a manifest naming
them all.

Forward passes are deterministic: no sampling, no dropout (eval mode),
so extracting the same text twice yields byte-identical dumps. Files
use the NPY container and the manifest the JSON layout that mnnkit's
batch subcommand reads; the manifest length field always equals the row
count of the dumped matrix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .ops import OPERATIONS, PROMPTS, apply_sentence_operation, with_prompt


@dataclass(frozen=True)
class ExtractionJob:
    """One extraction run: which model, which texts, how to prepare them.

    The sentence operation disrupts each text's word order first; the
    selected system prompt is prepended afterwards, so prompts are never
    disrupted. max_length caps the token count per text after prompting.
    """

    model_id: str
    texts: tuple[str, ...]
    output_dir: Path
    max_length: int | None = None
    operation: str = "base"
    prompt_id: str | None = None
    seed: int = 0
    dataset_label: str = "texts"

    def __post_init__(self) -> None:
        if not self.model_id:
            raise ValueError("model_id must be a non-empty string")
        object.__setattr__(self, "texts", tuple(str(t) for t in self.texts))
        if not self.texts:
            raise ValueError("job needs at least one text")
        for i, text in enumerate(self.texts):
            if not text.split():
                raise ValueError(f"text {i} has no words")
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        if self.max_length is not None and self.max_length < 1:
            raise ValueError(f"max_length must be >= 1, got {self.max_length}")
        if self.operation not in OPERATIONS:
            raise ValueError(f"unknown operation {self.operation!r}, expected one of {OPERATIONS}")
        if self.prompt_id is not None and self.prompt_id not in PROMPTS:
            raise ValueError(f"unknown prompt id {self.prompt_id!r}, expected one of {tuple(PROMPTS)}")
        if not self.dataset_label:
            raise ValueError("dataset_label must be a non-empty string")

    def prepared_texts(self) -> list[str]:
        """The texts as the model will see them: operated on, then prompted."""
        return [
            with_prompt(apply_sentence_operation(text, self.operation, seed=self.seed),
                        self.prompt_id)
            for text in self.texts
        ]


def load_model_and_tokenizer(model_id: str):
    """Load a causal LM and its tokenizer from a hub id or local path."""
    from transformers import AutoModelForCausalLM, AutoTokenizer
    from transformers.utils import logging as hf_logging

    hf_logging.disable_progress_bar()
    tokenizer = AutoTokenizer.from_pretrained(model_id)
    model = AutoModelForCausalLM.from_pretrained(model_id)
    model.eval()
    return model, tokenizer


def _encode(tokenizer, text: str, max_length: int | None) -> torch.Tensor:
    """Token ids as a (1, m) tensor, truncated to max_length tokens."""
    ids = tokenizer(text, return_tensors="pt")["input_ids"]
    if max_length is not None:
        ids = ids[:, :max_length]
    if ids.shape[1] < 1:
        raise ValueError(f"text tokenized to zero tokens: {text[:40]!r}")
    return ids


def extract_hidden_states(model, tokenizer, text: str, max_length: int | None = None) -> np.ndarray:
    """Last-hidden-layer states for one text as a float32 (m, d) array."""
    ids = _encode(tokenizer, text, max_length)
    with torch.no_grad():
        out = model(input_ids=ids, output_hidden_states=True)
    hidden = out.hidden_states[-1][0].to(torch.float32).cpu().numpy()
    return np.ascontiguousarray(hidden)


def extract_logprobs(model, tokenizer, text: str, max_length: int | None = None) -> np.ndarray:
    """Natural-log probabilities of each observed next token, float32 (m-1,).

    Entry i is log p(token[i+1] | tokens[:i+1]) under the model, so the
    vector has one entry less than the text has tokens and every entry
    is <= 0.
    """
    ids = _encode(tokenizer, text, max_length)
    if ids.shape[1] < 2:
        raise ValueError("log-prob extraction needs a text of at least two tokens")
    with torch.no_grad():
        logits = model(input_ids=ids).logits[0].to(torch.float32)
    log_probs = torch.log_softmax(logits[:-1], dim=-1)
    picked = log_probs.gather(1, ids[0, 1:].unsqueeze(1)).squeeze(1)
    return np.ascontiguousarray(picked.cpu().numpy())


def run_extraction(job: ExtractionJob, *, include_logprobs: bool = False,
                   model=None, tokenizer=None) -> Path:
    """Dump every text of a job and write the manifest; returns its path.

    Writes t000.npy, t001.npy, ... (and t000_logprobs.npy, ... when
    requested) into the job's output directory plus a manifest.json
    whose sample lengths equal the dumped row counts. Pass a preloaded
    model and tokenizer to skip loading them from job.model_id.
    """
    if model is None or tokenizer is None:
        model, tokenizer = load_model_and_tokenizer(job.model_id)
    job.output_dir.mkdir(parents=True, exist_ok=True)

    samples = []
    for i, text in enumerate(job.prepared_texts()):
        sample_id = f"t{i:03d}"
        hidden = extract_hidden_states(model, tokenizer, text, job.max_length)
        matrix_name = f"{sample_id}.npy"
        np.save(job.output_dir / matrix_name, hidden)
        logprobs_name = None
        if include_logprobs:
            logprobs = extract_logprobs(model, tokenizer, text, job.max_length)
            logprobs_name = f"{sample_id}_logprobs.npy"
            np.save(job.output_dir / logprobs_name, logprobs)
        samples.append({
            "id": sample_id,
            "matrix_path": matrix_name,
            "length": int(hidden.shape[0]),
            "logprobs_path": logprobs_name,
        })

    manifest = {"model": job.model_id, "dataset": job.dataset_label, "samples": samples}
    manifest_path = job.output_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    return manifest_path
