"""
p2hsched Schemas.

Pydantic documents for scenario input and adapters that (de)serialize the
typed solution tree as versioned JSON.
"""
