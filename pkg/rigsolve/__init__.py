"""
rigsolve - distributed inversion of blendshape facial rigs
Clustering, data-free cluster scoring and per-frame rig solvers
(holistic coordinate descent, naive clustered, consensus ADMM).
"""

__version__ = "1.0.0"
