"""AI-aided conversation engine for designing robot behavior prompts.

The package is organized around one design loop: elicit an initial prompt
in dialogue, test it against a simulated social robot, annotate the
transcript, translate the annotations into suggested refinements, commit a
refined prompt version, repeat. Every LLM call goes through a gateway that
can record and replay fixtures, so the whole loop is reproducible offline.
"""

__version__ = "0.1.0"
