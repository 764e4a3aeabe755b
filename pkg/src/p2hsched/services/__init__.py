"""
p2hsched Services.

Physics, dynamics, security compilation, chance constraints, optimization
model assembly, solver access, verification and scenario persistence.
"""
