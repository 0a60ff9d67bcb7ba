"""clogsim: Monte Carlo study of a one-dimensional clogging process.

Particles random-walk in from the right and freeze against an existing
cluster with probability proportional to the occupancy of the site on
their left; a site that collects a full capacity of n frozen particles
clogs the line.  The package provides an exact collapsed-excursion
sampler, a literal-walk oracle it is validated against, and a seeded,
reproducible experiment harness (CLI and HTTP service) that measures
where the first clog appears and how fast that position grows with n.
"""

__version__ = "0.1.0"
