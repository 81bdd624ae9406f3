"""PASS/FAIL lines collected by the acceptance suite for the terminal summary."""

LINES = []
