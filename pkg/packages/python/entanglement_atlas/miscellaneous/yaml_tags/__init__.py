"""Custom YAML Tags Module."""
