"""Desk-scale toolkit for the Deuring correspondence at small primes.

Exact arithmetic over F_{p^{2k}} towers, supersingular curves and Velu
isogenies, quaternion orders in definite algebras over Q, brute-force
reference oracles for the eight supersingular isogeny problems, and the
oracle-parameterized reduction network connecting them.
"""

__version__ = "0.1.0"
