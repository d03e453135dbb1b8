"""Edit scripts describing how a perturbed token sequence derives from its source.

A script is an ordered op list; its non-delete ops define the output order.
Keep/Delete/Replace ops account for every source index exactly once, Insert
ops carry a fresh token payload.  Token moves are expressed by reordering
keep ops.  Heads inside payload tokens refer to source-sentence indices;
heads of inserted tokens whose intended parent was itself inserted are
flattened to the root.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .corpus import Sentence, Token

KEEP, DELETE, INSERT, REPLACE = "keep", "delete", "insert", "replace"


class EditError(ValueError):
    """Raised for structurally invalid edit scripts."""


@dataclass(frozen=True)
class EditOp:
    kind: str
    src: int | None = None
    new_token: Token | None = None


@dataclass(frozen=True)
class EditScript:
    ops: tuple[EditOp, ...] = ()

    def output_ops(self) -> list[EditOp]:
        return [op for op in self.ops if op.kind != DELETE]

    def output_sources(self) -> list[int | None]:
        """Per output position: the source index, or None for inserted tokens."""
        return [op.src if op.kind in (KEEP, REPLACE) else None
                for op in self.output_ops()]


def keep(src: int) -> EditOp:
    return EditOp(KEEP, src=src)


def delete(src: int) -> EditOp:
    return EditOp(DELETE, src=src)


def insert(token: Token) -> EditOp:
    return EditOp(INSERT, new_token=token)


def substitute(src: int, token: Token) -> EditOp:
    return EditOp(REPLACE, src=src, new_token=token)


def keep_all(n: int) -> list[EditOp]:
    return [keep(i) for i in range(1, n + 1)]


def validate_script(script: EditScript, n_source: int) -> None:
    seen = set()
    for op in script.ops:
        if op.kind in (KEEP, DELETE, REPLACE):
            if op.src is None or not 1 <= op.src <= n_source:
                raise EditError(f"{op.kind} op with bad source {op.src}")
            if op.src in seen:
                raise EditError(f"source index {op.src} used twice")
            seen.add(op.src)
            if op.kind == KEEP and op.new_token is not None:
                raise EditError("keep op carries a token payload")
            if op.kind == REPLACE and op.new_token is None:
                raise EditError("replace op without token payload")
        elif op.kind == INSERT:
            if op.src is not None:
                raise EditError("insert op with source index")
            if op.new_token is None:
                raise EditError("insert op without token payload")
        else:
            raise EditError(f"unknown op kind {op.kind!r}")
    if seen != set(range(1, n_source + 1)):
        missing = sorted(set(range(1, n_source + 1)) - seen)
        raise EditError(f"source indices not accounted for: {missing}")


def apply_script(script: EditScript, sentence: Sentence,
                 bio: list[str] | None = None) -> tuple[Token, ...]:
    """Materialize the output tokens: renumbered, heads remapped, provenance set.

    When a projected BIO sequence is given it overrides the slot labels,
    otherwise kept tokens carry their labels and inserted tokens get O.
    """
    outputs = script.output_ops()
    old = {t.index: t for t in sentence.tokens}
    new_index = {}
    for pos, op in enumerate(outputs, start=1):
        if op.src is not None:
            new_index[op.src] = pos

    def remap_head(h: int) -> int:
        # climb through deleted tokens to the nearest surviving ancestor
        hops = 0
        while h != 0 and h not in new_index:
            h = old[h].head if h in old else 0
            hops += 1
            if hops > len(old) + 1:
                return 0
        return new_index.get(h, 0)

    tokens = []
    for pos, op in enumerate(outputs, start=1):
        if op.kind == KEEP:
            base = old[op.src]
            tok = replace(base, index=pos, head=remap_head(base.head))
        elif op.kind == REPLACE:
            payload = op.new_token
            tok = replace(payload, index=pos, head=remap_head(payload.head),
                          provenance=old[op.src].provenance)
        else:
            payload = op.new_token
            tok = replace(payload, index=pos, head=remap_head(payload.head),
                          provenance=None, slot="O")
        tokens.append(tok)
    if bio is not None:
        if len(bio) != len(tokens):
            raise EditError("projected labels do not match output length")
        tokens = [replace(t, slot=s) if t.slot != s else t
                  for t, s in zip(tokens, bio)]
    return tuple(tokens)


def compose(first: EditScript, second: EditScript) -> EditScript:
    """Script equivalent to applying `first` then `second`."""
    producers = first.output_ops()

    def head_to_source(h: int) -> int:
        if h <= 0 or h > len(producers):
            return 0
        prod = producers[h - 1]
        return prod.src if prod.src is not None else 0

    def retarget(tok: Token) -> Token:
        return replace(tok, head=head_to_source(tok.head))

    out: list[EditOp] = []
    deleted: list[int] = [op.src for op in first.ops if op.kind == DELETE]
    for op2 in second.ops:
        if op2.kind == INSERT:
            out.append(insert(retarget(op2.new_token)))
            continue
        prod = producers[op2.src - 1]
        if op2.kind == KEEP:
            out.append(prod)
        elif op2.kind == REPLACE:
            tok = retarget(op2.new_token)
            if prod.kind == INSERT:
                out.append(insert(tok))
            else:
                out.append(substitute(prod.src, tok))
        else:  # DELETE
            if prod.src is not None:
                deleted.append(prod.src)
    return EditScript(tuple(out) + tuple(delete(s) for s in sorted(deleted)))
