"""Generated parser package for model 'librarydemo'; do not edit."""

from .dispatch import parse_document

__all__ = ["parse_document"]
