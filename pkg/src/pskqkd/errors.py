class NumericalError(ArithmeticError):
    """A computation produced non-finite or inconsistent numbers."""
