"""Unit tests for p2hsched modules."""
