"""Entry point for running hadaframe as a module."""

from hadaframe.cli import app

if __name__ == "__main__":
    app()
