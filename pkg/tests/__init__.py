"""
Test package for prunedjulia.
"""
