"""
Complete-data analysis procedures.
"""
