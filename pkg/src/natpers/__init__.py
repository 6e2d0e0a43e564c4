"""Natural homology of loop-free precubical sets as a persistence object."""

__version__ = "0.1.0"
