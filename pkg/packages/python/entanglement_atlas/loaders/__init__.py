"""Loaders module."""
