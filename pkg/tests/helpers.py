"""Builders shared across test modules."""

from __future__ import annotations

from inkcode.codemodel import BoundingBox, LineBox, OcrDocument


def make_doc(
    x_mins,
    *,
    texts=None,
    height=30.0,
    width=1000.0,
    y_step=40.0,
    provider_id="test",
):
    """Document with one line per x_min, laid out top to bottom."""
    lines = []
    for i, x in enumerate(x_mins):
        text = texts[i] if texts is not None else f"line{i}"
        y = 10.0 + y_step * i
        box = BoundingBox(x_min=float(x), y_min=y, x_max=float(x) + 120.0, y_max=y + height)
        lines.append(LineBox(text=text, box=box))
    return OcrDocument(
        lines=tuple(lines),
        image_width=width,
        image_height=20.0 + y_step * max(len(lines), 1),
        provider_id=provider_id,
    )


def make_doc_with_heights(heights, *, width=1000.0):
    lines = []
    for i, h in enumerate(heights):
        y = 100.0 * i
        box = BoundingBox(x_min=10.0, y_min=y, x_max=200.0, y_max=y + float(h))
        lines.append(LineBox(text=f"line{i}", box=box))
    return OcrDocument(
        lines=tuple(lines),
        image_width=width,
        image_height=100.0 * len(lines) + 100.0,
        provider_id="test",
    )
