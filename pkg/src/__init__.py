"""MarkerNav - fiducial-marker localization, mapping and navigation toolkit."""
__version__ = "0.1.0"
