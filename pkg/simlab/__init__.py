"""
Simulation studies: scenario generators, method batteries and the Monte Carlo driver.
"""
