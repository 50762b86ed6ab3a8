"""Exceptions shared by the pure and compiled evaluation kernels."""


class UnknownPredicate(ValueError):
    pass


class Cancelled(Exception):
    """Raised inside evaluation when the caller's stop flag is set."""
