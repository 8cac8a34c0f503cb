"""Weak epsilon-nets for planar point sets with respect to convex ranges"""
