"""Tests for gk3shift."""
