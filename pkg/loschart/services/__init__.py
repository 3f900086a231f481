"""Numerical services: channel model, kernels, design rules, charting, metrics, experiments."""
