"""Frame transforms and marker-based localization."""
