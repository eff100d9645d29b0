"""Test suite for cdiforge."""
