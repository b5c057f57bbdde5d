"""Per-image cost model for the digitization pipelines.

Token counts approximate as characters divided by chars_per_token (default
4). The text pipeline pays OCR per image plus LLM tokens; the multimodal
pipeline pays its image price plus tokens at its own rates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

DEFAULT_CHARS_PER_TOKEN = 4.0


@dataclass(frozen=True)
class CostModel:
    """Prices for one pipeline variant. Token prices are per 1000 tokens."""

    ocr_price_per_image: float
    input_token_price: float
    output_token_price: float
    image_price: float
    chars_per_token: float = DEFAULT_CHARS_PER_TOKEN

    def __post_init__(self) -> None:
        for name in ("ocr_price_per_image", "input_token_price", "output_token_price", "image_price"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.chars_per_token <= 0:
            raise ValueError("chars_per_token must be positive")

    def to_json_dict(self) -> dict[str, float]:
        return {
            "ocr_price_per_image": self.ocr_price_per_image,
            "input_token_price": self.input_token_price,
            "output_token_price": self.output_token_price,
            "image_price": self.image_price,
            "chars_per_token": self.chars_per_token,
        }

    @classmethod
    def from_json_dict(cls, data: dict[str, Any]) -> "CostModel":
        try:
            return cls(
                ocr_price_per_image=float(data["ocr_price_per_image"]),
                input_token_price=float(data["input_token_price"]),
                output_token_price=float(data["output_token_price"]),
                image_price=float(data["image_price"]),
                chars_per_token=float(data.get("chars_per_token", DEFAULT_CHARS_PER_TOKEN)),
            )
        except KeyError as exc:
            raise ValueError(f"cost model missing field {exc.args[0]!r}") from exc

    @classmethod
    def from_json_file(cls, path: Path) -> "CostModel":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class CostBreakdown:
    """Cost of processing one image, split into components."""

    fixed_cost: float   # OCR call (text route) or image ingestion (multimodal)
    input_cost: float
    output_cost: float

    @property
    def llm_cost(self) -> float:
        return self.input_cost + self.output_cost

    @property
    def total(self) -> float:
        return self.fixed_cost + self.llm_cost


def estimate_cost(
    model: CostModel,
    avg_code_chars: float,
    instruction_chars: float,
    avg_output_chars: float,
    multimodal: bool = False,
) -> CostBreakdown:
    """Expected cost per image.

    Linear in every character count: tokens = chars / chars_per_token,
    token cost = tokens x price / 1000.
    """
    for name, value in (
        ("avg_code_chars", avg_code_chars),
        ("instruction_chars", instruction_chars),
        ("avg_output_chars", avg_output_chars),
    ):
        if value < 0:
            raise ValueError(f"{name} must be >= 0")
    input_tokens = (avg_code_chars + instruction_chars) / model.chars_per_token
    output_tokens = avg_output_chars / model.chars_per_token
    return CostBreakdown(
        fixed_cost=model.image_price if multimodal else model.ocr_price_per_image,
        input_cost=input_tokens * model.input_token_price / 1000.0,
        output_cost=output_tokens * model.output_token_price / 1000.0,
    )
