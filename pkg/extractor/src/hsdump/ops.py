"""Text-side transforms applied before extraction: sentence operations
that disrupt word order while preserving the word multiset, and the
fixed system prompts that can be prepended to every text.

Operations act on whitespace tokens, not characters, so each word
survives intact and token-level scores compare like with like. The
shuffle is seeded and repeatable.
"""

from __future__ import annotations

import random

OPERATIONS = ("base", "shuffle", "reverse", "shuffle_reverse")

# Fixed system prompts selectable by id; "empty" prepends nothing.
PROMPTS = {
    "p1": "You are an AI assistant. You will be given a task. You must "
          "generate a detailed and long answer.",
    "p2": "You are a helpful assistant, who always provide explanation. "
          "Think like you are answering to a five year old.",
    "p3": "You are an AI assistant. User will give you a task. Your goal is "
          "to complete the task as faithfully as you can. While performing "
          "the task think step-by-step and justify your steps.",
    "empty": "",
}


def apply_sentence_operation(text: str, operation: str, *, seed: int = 0) -> str:
    """Disrupt the word order of `text` according to `operation`.

    base returns the text unchanged. The other operations split on
    whitespace, permute the tokens, and re-join with single spaces:
    reverse flips the order, shuffle applies a seeded random
    permutation, and shuffle_reverse shuffles then flips. The same seed
    always yields the same shuffle.
    """
    if operation not in OPERATIONS:
        raise ValueError(f"unknown operation {operation!r}, expected one of {OPERATIONS}")
    if operation == "base":
        return text
    tokens = text.split()
    if not tokens:
        raise ValueError("operation needs a text with at least one word")
    if operation in ("shuffle", "shuffle_reverse"):
        random.Random(seed).shuffle(tokens)
    if operation in ("reverse", "shuffle_reverse"):
        tokens.reverse()
    return " ".join(tokens)


def with_prompt(text: str, prompt_id: str | None) -> str:
    """Prepend the selected system prompt, separated by one space.

    None and the "empty" prompt both leave the text unchanged.
    """
    if prompt_id is None:
        return text
    if prompt_id not in PROMPTS:
        raise ValueError(f"unknown prompt id {prompt_id!r}, expected one of {tuple(PROMPTS)}")
    prompt = PROMPTS[prompt_id]
    return f"{prompt} {text}" if prompt else text
