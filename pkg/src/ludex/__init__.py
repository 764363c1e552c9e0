"""ludex: compile .lud game descriptions into playable games."""

__version__ = '0.1.0'
