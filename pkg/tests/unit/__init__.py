"""
Unit tests for the Motivic Workbench.
"""
