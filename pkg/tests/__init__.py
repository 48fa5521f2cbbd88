"""Tests for gomea-trap-lab."""
