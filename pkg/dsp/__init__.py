"""Signal processing module."""
