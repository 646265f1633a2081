"""Covering uncertain points on a tree with facility centers."""
