"""Mockup-grounded evaluation and trace analytics for generated web apps."""

__version__ = "0.1.0"
