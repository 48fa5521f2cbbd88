"""Utilities module for gomea-trap-lab."""
