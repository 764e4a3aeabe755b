"""
p2hsched Domain Models.

Immutable value types shared by the physics, security, optimization and
persistence layers.
"""
