"""Dump causal-LM hidden states and next-token log-probs for scoring.

Runs a pretrained causal LM over texts, optionally after a word-order
disruption (shuffle, reverse) and a fixed system prompt, and writes
float32 NPY matrices, log-prob vectors, and a manifest in the layout
that mnnkit's batch subcommand consumes. A seeded tiny-model builder
makes everything runnable offline.
"""

from .extract import (
    ExtractionJob,
    extract_hidden_states,
    extract_logprobs,
    load_model_and_tokenizer,
    run_extraction,
)
from .ops import OPERATIONS, PROMPTS, apply_sentence_operation, with_prompt
from .tinymodel import build_tiny_model, build_word_tokenizer, template_text

__version__ = "0.1.0"
