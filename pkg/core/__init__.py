"""
Shared data types: datasets with missingness, estimate grids and pooled results.
"""
