# src package initializer - keeps the repository importable as a package for tests
__version__ = "0.1.0"
