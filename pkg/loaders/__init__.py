"""
Data loading modules: result files, estimate grids and the summary database.
"""
