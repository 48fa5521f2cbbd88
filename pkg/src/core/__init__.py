"""Core module for gomea-trap-lab: problems, algorithms, bounds and the experiment harness."""
