"""
Resampling drivers that produce estimate grids.
"""
