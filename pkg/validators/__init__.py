"""
Data validation modules run before any resampling starts.
"""
