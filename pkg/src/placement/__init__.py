"""Marker placement by rectangular decomposition and greedy reduction."""
