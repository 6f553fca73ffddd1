"""Relation-extraction dataset construction: filtering, adjudication, compilation."""

__version__ = "0.1.0"
