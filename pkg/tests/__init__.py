"""Test package for cardioresp."""
