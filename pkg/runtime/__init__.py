"""Runtime package for the Motivic Workbench."""
