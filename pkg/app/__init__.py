"""
Ring Walk - Command-Line Application
"""

__version__ = "1.0.0"
