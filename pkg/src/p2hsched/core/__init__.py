"""
p2hsched Core.

Protocols for the pluggable pieces of a scheduling run.
"""
