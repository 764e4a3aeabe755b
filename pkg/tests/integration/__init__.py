"""Integration tests for the scheduling pipeline and command line."""
