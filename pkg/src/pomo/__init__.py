"""Post-modifier generation pipeline: corpus ingestion, appositive
extraction, claim-store linking, dataset assembly, claim selection, and
sequence-to-sequence generation with evaluation."""

__version__ = "0.1.0"
