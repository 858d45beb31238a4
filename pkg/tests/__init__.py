"""Tests for gsnrprobe."""
