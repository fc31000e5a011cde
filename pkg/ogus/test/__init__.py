"""
Tests for ogus
"""
