"""Clearance maps, skeleton graphs and shortest paths."""
