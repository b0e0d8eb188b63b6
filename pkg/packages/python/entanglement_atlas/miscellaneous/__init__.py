"""Miscellaneous module."""
