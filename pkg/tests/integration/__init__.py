"""
Package initialization for tests.
"""