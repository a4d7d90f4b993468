"""
Test suite for the Motivic Workbench.
"""
