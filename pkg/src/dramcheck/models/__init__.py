"""Bundled DRAMml models and example configurations."""
