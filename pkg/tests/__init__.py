"""p2hsched test suite."""
