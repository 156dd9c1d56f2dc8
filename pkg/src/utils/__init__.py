"""Configuration, channel and region file I/O, logging setup."""
