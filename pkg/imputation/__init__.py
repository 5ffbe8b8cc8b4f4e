"""
Imputation of missing values.
"""
