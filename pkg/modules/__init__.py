"""
Domain Modules

Each subdirectory is one layer of the library, bottom-up:
- exterior: polyvectors, wedge products and discrete subgroups
- lattice: target vectors, approximation profiles, shortest vectors, the diagonal flow
- classes: decreasing sequences, class membership, bands
- maps: polynomial maps, curvature, certified derivative bounds
- measure: volume estimators, bound harnesses, density curves
"""

__version__ = '1.0.0'
