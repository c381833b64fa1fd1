"""Tests for orthostat package."""
