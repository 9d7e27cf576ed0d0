"""Tests for rough-resonance."""
