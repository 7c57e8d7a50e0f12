"""End-to-end tests of the command line over the shipped spec files."""
