"""Mechanical re-derivation of the classification of semigroups that are
disjoint unions of two or three free monogenic semigroups."""

__version__ = "0.1.0"
