"""Map and trajectory evaluation."""
