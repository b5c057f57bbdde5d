"""Evaluation harness: dataset manifests, pipeline composition, OCR Error and
logical-fix measurement, hallucination-label import, cost estimation, and
report emission."""
