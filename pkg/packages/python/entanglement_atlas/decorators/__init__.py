"""Function decorators."""
