"""Core domain models and interfaces."""
