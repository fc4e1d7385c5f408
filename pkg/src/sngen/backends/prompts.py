"""Prompt templates and the bracketed-list reply parser."""
from __future__ import annotations

import enum
from typing import Sequence

from ..exceptions import ParseFailure
from ..gen import GeneratorContext, PromptSpec

SYSTEM_PROMPT = (
    "You are a scientist specialising in chemistry and drug design. "
    "Your task is to generate valid SMILES strings as a comma-separated list inside square brackets. "
    "Return the response as plain text without any formatting, backticks, or explanations. "
    "The response must be formatted exactly as follows: [SMILES1, SMILES2, ...]. "
    "Avoid any extra text or explanations."
)


class Mode(str, enum.Enum):
    SEEDED = "seeded"
    UNSEEDED = "unseeded"


def build_system_prompt() -> str:
    return SYSTEM_PROMPT


def render_list(items: Sequence[str]) -> str:
    return "[" + ", ".join(items) + "]"


def build_user_prompt(mode, positives: Sequence[str], feasible_context: Sequence[str], s: int) -> str:
    mode = Mode(mode)
    if mode is Mode.SEEDED:
        if not positives:
            raise ValueError("seeded prompts need at least one positive example")
        text = f"Generate up to {s} novel valid molecules similar to the following positive molecules: {render_list(positives)}"
    else:
        text = f"Generate up to {s} novel valid molecules"
    if feasible_context:
        text += f" Additionally, consider these previously generated feasible molecules: {render_list(feasible_context)}."
    return text


def molecule_prompt(context: GeneratorContext, s: int) -> PromptSpec:
    """The fixed chemistry prompts; seeded whenever the context has seed examples.

    Only feasible (true-labelled) history is fed back, matching the reference
    template.
    """
    mode = Mode.SEEDED if context.seed_examples else Mode.UNSEEDED
    return PromptSpec(
        build_system_prompt(),
        build_user_prompt(mode, list(context.seed_examples), context.feasible, s),
    )


KRK_SYSTEM_PROMPT = (
    "You are a chess expert. Positions in the king-and-rook versus king endgame are written as "
    "6-tuples (WKF,WKR,WRF,WRR,BKF,BKR): files a-h and ranks 1-8 of the white king, the white rook "
    "and the black king, with black to move. Return the response as a comma-separated list of "
    "tuples inside square brackets, for example [(c,1,a,5,a,1), (d,3,h,1,d,1)]. "
    "Avoid any extra text or explanations."
)


def krk_prompt(context: GeneratorContext, s: int) -> PromptSpec:
    """Local template for the chess domain (no published wording exists)."""
    lines = [f"The following theory describes the positions of interest:\n{context.hypothesis_description}"]
    if context.seed_examples:
        lines.append("Examples of such positions: " + render_list(context.seed_examples))
    if context.history:
        lines.append("Positions already checked against the theory:")
        lines.extend(f"{'true' if label else 'false'}: {x}" for label, x in context.history)
    lines.append(f"Generate up to {s} positions x that complete the sentence true: x")
    return PromptSpec(KRK_SYSTEM_PROMPT, "\n".join(lines))


def _split_top_level(body: str) -> list[str]:
    items, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            items.append(body[start:i])
            start = i + 1
    items.append(body[start:])
    return [item.strip() for item in items if item.strip()]


def parse_candidate_list(text: str) -> list[str]:
    """Items of the first balanced ``[...]`` block in ``text``.

    Commas nested inside parentheses or brackets do not split items, so
    tuple encodings such as ``(c,1,a,5,a,1)`` survive intact.
    """
    start = text.find("[")
    if start < 0:
        raise ParseFailure("no '[' in response")
    depth = 0
    for i in range(start, len(text)):
        if text[i] == "[":
            depth += 1
        elif text[i] == "]":
            depth -= 1
            if depth == 0:
                return _split_top_level(text[start + 1:i])
    raise ParseFailure("unbalanced '[' in response")
