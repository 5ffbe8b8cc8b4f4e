"""
Data extraction modules: CSV datasets, JSON configurations and estimate grids.
"""
