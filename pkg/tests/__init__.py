"""Test package for setsim."""
