"""
Procedures that pool an estimate grid into a point estimate and interval.
"""
