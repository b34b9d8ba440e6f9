"""Simulated world, laser, marker detection, turret and robot."""
