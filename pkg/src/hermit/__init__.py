"""Compile single-qubit and controlled two-qubit unitaries into pi-rotation gate sets."""
