"""Scan preprocessing, occupancy grids and mapping sessions."""
