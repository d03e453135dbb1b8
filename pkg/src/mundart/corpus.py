"""CoNLL-U corpora carrying intent and BIO slot annotations.

Slot labels live in the MISC column as ``Slot=B-xxx``, the sentence intent
in a ``# intent = ...`` comment.  Token provenance (where a token of a
perturbed sentence came from) is serialized as ``Provenance=<n>`` when it
differs from the token's own index, and ``Provenance=INS`` for tokens that
a perturbation inserted.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable

BIO_RE = re.compile(r"^(O|[BI]-\S+)$")


class CorpusError(ValueError):
    """Raised for malformed corpus files or invalid annotations."""


@dataclass(frozen=True)
class Token:
    index: int
    form: str
    lemma: str
    upos: str
    xpos: str | None = None
    feats: dict[str, str] = field(default_factory=dict)
    head: int = 0
    deprel: str = "dep"
    slot: str = "O"
    space_after: bool = True
    # source index in the intact sentence; None marks an inserted token
    provenance: int | None = None

    @property
    def inserted(self) -> bool:
        return self.provenance is None


@dataclass(frozen=True)
class Sentence:
    sent_id: str
    dataset: str
    text: str
    intent: str
    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def bio(self) -> list[str]:
        return [t.slot for t in self.tokens]

    def spans(self) -> list["SlotSpan"]:
        return extract_spans(self.bio())

    def children(self, index: int) -> list[Token]:
        return [t for t in self.tokens if t.head == index]

    def subtree(self, index: int) -> list[int]:
        """Indices of the token plus all its (transitive) dependents."""
        kids = {index}
        changed = True
        while changed:
            changed = False
            for t in self.tokens:
                if t.head in kids and t.index not in kids:
                    kids.add(t.index)
                    changed = True
        return sorted(kids)


@dataclass(frozen=True)
class SlotSpan:
    slot_type: str
    start: int  # 0-based, inclusive
    end: int  # 0-based, exclusive


def detokenize(tokens: Iterable[Token]) -> str:
    """Join token forms; a token with space_after=False glues to the next one."""
    parts = []
    toks = list(tokens)
    for i, tok in enumerate(toks):
        parts.append(tok.form)
        if tok.space_after and i < len(toks) - 1:
            parts.append(" ")
    return "".join(parts)


def normalize_bio(labels: list[str]) -> list[str]:
    """Repair I-x labels that have no valid opener to B-x."""
    fixed = []
    prev = "O"
    for label in labels:
        if label.startswith("I-"):
            kind = label[2:]
            if prev not in (f"B-{kind}", f"I-{kind}"):
                label = f"B-{kind}"
        fixed.append(label)
        prev = label
    return fixed


def extract_spans(labels: list[str]) -> list[SlotSpan]:
    """Maximal contiguous spans of a BIO sequence (ill-formed I- repaired to B-)."""
    spans = []
    start = None
    kind = None
    for i, label in enumerate(normalize_bio(labels)):
        if label.startswith("B-"):
            if start is not None:
                spans.append(SlotSpan(kind, start, i))
            start, kind = i, label[2:]
        elif label == "O":
            if start is not None:
                spans.append(SlotSpan(kind, start, i))
            start, kind = None, None
        # I-x continues the open span by construction after normalization
    if start is not None:
        spans.append(SlotSpan(kind, start, len(labels)))
    return spans


def spans_to_bio(spans: list[SlotSpan], length: int) -> list[str]:
    """Inverse of extract_spans for well-formed, non-overlapping spans."""
    labels = ["O"] * length
    last_end = -1
    for span in sorted(spans, key=lambda s: s.start):
        if span.start >= span.end:
            raise CorpusError(f"empty span {span}")
        if span.start < last_end:
            raise CorpusError(f"overlapping spans at token {span.start}")
        if span.start < 0 or span.end > length:
            raise CorpusError(f"span {span} out of bounds for length {length}")
        labels[span.start] = f"B-{span.slot_type}"
        for i in range(span.start + 1, span.end):
            labels[i] = f"I-{span.slot_type}"
        last_end = span.end
    return labels


def validate_tokens(tokens: Iterable[Token], sent_id: str = "?") -> None:
    toks = list(tokens)
    n = len(toks)
    for pos, tok in enumerate(toks, start=1):
        if tok.index != pos:
            raise CorpusError(f"{sent_id}: token indices not contiguous at {tok.index}")
        if not 0 <= tok.head <= n or tok.head == tok.index:
            raise CorpusError(f"{sent_id}: bad head {tok.head} on token {tok.index}")
        if not BIO_RE.match(tok.slot):
            raise CorpusError(f"{sent_id}: bad slot label {tok.slot!r} on token {tok.index}")
    sources = [t.provenance for t in toks if t.provenance is not None]
    if len(sources) != len(set(sources)):
        raise CorpusError(f"{sent_id}: duplicated token provenance")


def make_sentence(sent_id: str, dataset: str, intent: str,
                  tokens: Iterable[Token]) -> Sentence:
    """Build a validated Sentence; the text field is recomputed from the tokens."""
    toks = tuple(tokens)
    validate_tokens(toks, sent_id)
    normalized = normalize_bio([t.slot for t in toks])
    toks = tuple(replace(t, slot=s) if t.slot != s else t
                 for t, s in zip(toks, normalized))
    return Sentence(sent_id=sent_id, dataset=dataset, text=detokenize(toks),
                    intent=intent, tokens=toks)


def _parse_feats(raw: str) -> dict[str, str]:
    if raw == "_":
        return {}
    feats = {}
    for pair in raw.split("|"):
        if "=" not in pair:
            raise CorpusError(f"bad feature {pair!r}")
        key, value = pair.split("=", 1)
        feats[key] = value
    return feats


def _feats_str(feats: dict[str, str]) -> str:
    if not feats:
        return "_"
    return "|".join(f"{k}={feats[k]}" for k in sorted(feats, key=str.lower))


def _misc_str(tok: Token) -> str:
    parts = []
    if tok.slot != "O":
        parts.append(f"Slot={tok.slot}")
    if not tok.space_after:
        parts.append("SpaceAfter=No")
    if tok.provenance is None:
        parts.append("Provenance=INS")
    elif tok.provenance != tok.index:
        parts.append(f"Provenance={tok.provenance}")
    return "|".join(parts) if parts else "_"


def parse_conllu(stream) -> list[Sentence]:
    """Parse 10-column CoNLL-U text (a string or line iterable) into Sentences."""
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = [line.rstrip("\n") for line in stream]

    sentences = []
    comments: dict[str, str] = {}
    rows: list[tuple[int, str]] = []

    def flush(line_no: int) -> None:
        nonlocal comments, rows
        if not comments and not rows:
            return
        sent_id = comments.get("sent_id")
        if sent_id is None:
            raise CorpusError(f"line {line_no}: sentence block missing sent_id")
        if "text" not in comments:
            raise CorpusError(f"{sent_id}: missing text comment")
        if "intent" not in comments:
            raise CorpusError(f"{sent_id}: missing intent")
        tokens = [_parse_token_line(no, raw, sent_id) for no, raw in rows]
        sentences.append(make_sentence(sent_id, comments.get("dataset", ""),
                                       comments["intent"], tokens))
        comments, rows = {}, []

    for no, line in enumerate(lines, start=1):
        if not line.strip():
            flush(no)
        elif line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                comments[key.strip()] = value.strip()
        else:
            rows.append((no, line))
    flush(len(lines) + 1)
    return sentences


def _parse_token_line(line_no: int, raw: str, sent_id: str) -> Token:
    cols = raw.split("\t")
    if len(cols) != 10:
        raise CorpusError(f"{sent_id}: line {line_no}: expected 10 columns, got {len(cols)}")
    idx, form, lemma, upos, xpos, feats, head, deprel, _deps, misc = cols
    if "-" in idx or "." in idx:
        raise CorpusError(f"{sent_id}: line {line_no}: multiword ranges and empty nodes not supported")
    try:
        index = int(idx)
    except ValueError:
        raise CorpusError(f"{sent_id}: line {line_no}: bad token id {idx!r}") from None
    try:
        head_ix = int(head)
    except ValueError:
        raise CorpusError(f"{sent_id}: line {line_no}: bad head {head!r}") from None

    slot = "O"
    space_after = True
    provenance: int | None = index
    if misc != "_":
        for pair in misc.split("|"):
            if "=" not in pair:
                continue
            key, value = pair.split("=", 1)
            if key == "Slot":
                slot = value
            elif key == "SpaceAfter" and value == "No":
                space_after = False
            elif key == "Provenance":
                provenance = None if value == "INS" else int(value)
    return Token(index=index, form=form, lemma=lemma, upos=upos,
                 xpos=None if xpos == "_" else xpos, feats=_parse_feats(feats),
                 head=head_ix, deprel=deprel, slot=slot,
                 space_after=space_after, provenance=provenance)


def sentence_to_conllu(sent: Sentence) -> str:
    lines = [f"# sent_id = {sent.sent_id}"]
    if sent.dataset:
        lines.append(f"# dataset = {sent.dataset}")
    lines.append(f"# intent = {sent.intent}")
    lines.append(f"# text = {sent.text}")
    for tok in sent.tokens:
        lines.append("\t".join([
            str(tok.index), tok.form, tok.lemma, tok.upos,
            tok.xpos or "_", _feats_str(tok.feats), str(tok.head),
            tok.deprel, "_", _misc_str(tok),
        ]))
    return "\n".join(lines) + "\n"


def write_conllu(sentences: Iterable[Sentence]) -> str:
    """Serialize sentences; parse_conllu(write_conllu(s)) round-trips field for field."""
    return "".join(sentence_to_conllu(s) + "\n" for s in sentences)


def load_corpus(path) -> list[Sentence]:
    with open(path, encoding="utf-8") as handle:
        return parse_conllu(handle.read())


def save_corpus(path, sentences: Iterable[Sentence]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(write_conllu(sentences))
