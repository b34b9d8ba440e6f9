"""Marker tracking, path following and the navigation loop."""
