"""Handwritten Python digitization toolkit.

Pipeline stages: OCR (provider adapters) -> indentation reconstruction
(absolute clustering or relative delta classification) -> LLM post-correction,
plus an evaluation harness and a small review service.
"""

__version__ = "0.1.0"
