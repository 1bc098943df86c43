"""hadaframe - bipolar AETFs from Hadamard rows and generalized difference sets."""

__version__ = "0.1.0"
