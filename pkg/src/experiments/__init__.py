# Batch experiments: settings, sweeps and CSV output
__version__ = "0.1.0"
