"""Tests for DCS Interconnection Diagram Generator."""
