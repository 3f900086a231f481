"""Data models and schemas for the library."""
