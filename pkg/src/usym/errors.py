class Inconclusive(RuntimeError):
    """A numerical routine could not certify its answer."""
