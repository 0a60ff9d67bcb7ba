"""HTTP service wrapping the simulation harness."""
