"""Project gold slot labels through an edit script.

Policy (fixed, so all perturbed corpora stay comparable):
  * tokens inserted outside any span are O
  * tokens inserted strictly inside a span's extent join it with I-
  * replaced tokens keep the source token's label
  * moved tokens carry their label; BIO is re-derived from span membership,
    so the first token of each surviving span carries B-
  * a span whose tokens end up non-adjacent, or that loses all its tokens,
    vetoes the whole rule application
"""
from __future__ import annotations

from .corpus import extract_spans
from .edits import EditScript


class FragmentationVeto(Exception):
    """A rule application would fragment or destroy a gold slot span."""


def project_labels(script: EditScript, gold: list[str]) -> list[str]:
    """BIO labels of the script's output, or FragmentationVeto."""
    sources = script.output_sources()
    spans = extract_spans(gold)

    owner = {}  # 1-based source index -> span number
    for sid, span in enumerate(spans):
        for i in range(span.start, span.end):
            owner[i + 1] = sid

    surviving: dict[int, list[int]] = {sid: [] for sid in range(len(spans))}
    for pos, src in enumerate(sources):
        if src is not None and src in owner:
            surviving[owner[src]].append(pos)

    labels = ["O"] * len(sources)
    for sid, positions in surviving.items():
        span = spans[sid]
        if not positions:
            raise FragmentationVeto(f"span {span.slot_type} lost all of its tokens")
        block = set(positions)
        for pos in range(min(positions), max(positions) + 1):
            if pos in block:
                continue
            if sources[pos] is None:
                block.add(pos)  # inserted token strictly inside the span joins it
            else:
                raise FragmentationVeto(
                    f"span {span.slot_type} fragmented at output position {pos}")
        ordered = sorted(block)
        labels[ordered[0]] = f"B-{span.slot_type}"
        for pos in ordered[1:]:
            labels[pos] = f"I-{span.slot_type}"
    return labels


def project_intent(script: EditScript, intent: str) -> str:
    """Perturbations keep sentence semantics, so the intent never changes."""
    return intent
