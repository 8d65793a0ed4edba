"""Scripts package for development tools."""
