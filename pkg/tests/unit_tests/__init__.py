"""Unit tests for the material, geometry, force and simulation modules."""
