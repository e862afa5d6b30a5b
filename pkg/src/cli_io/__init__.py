"""
Command-line front end: run configuration, pipeline commands and the launcher.
"""
__version__ = '0.1.0'
