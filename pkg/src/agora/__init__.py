"""Deliberation platform engine.

Subpackages:

- ``graph``: IBIS discussions (issues, positions, pro/con arguments) with
  immutable provenance on every node.
- ``transcripts``: human-in-the-loop import of diarized meeting transcripts
  into draft IBIS structures.
- ``insight``: argument embeddings, fuzzy c-means clustering and 2D theme
  projection.
- ``policy``: cluster-to-recommendation distillation and report generation.
- ``reflection``: live-event reflection cards, windowed engagement analytics
  and facilitator prompts.
- ``gateway``: the single abstraction over external AI services, with a
  deterministic mock mode.
- ``service``: persistence, HTTP API, push streams and the CLI.
"""

__version__ = "0.1.0"
