"""Tests for MarkerNav."""
