"""Bundled example configs, loaded by name through the command line."""
