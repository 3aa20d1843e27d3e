"""Reusable pieces shared by the sampler: logging, CSV tables and
reproducible random streams."""
