"""
openergodic - ergodic averages, maximal functions and oscillation seminorms
checked numerically on finite systems and finitely supported integer signals.
"""

__version__ = "0.1.0"
