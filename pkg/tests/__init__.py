"""Test suite for the quantum flag verification engine."""
