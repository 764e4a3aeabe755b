"""
p2hsched Configuration.

Contains configuration-related modules used throughout the scheduling engine:
physical constants, published default parameter tables and environment-driven
solver settings.
"""
