"""Test suite for hadaframe."""
