"""
p2hsched Utilities.

Shared helpers used across the package: logging setup, dataframe builders
and the run-storage factory.
"""
