"""Tests for Kac Root Utilities."""
