"""Computations with singular foliations presented by polynomial vector fields."""
