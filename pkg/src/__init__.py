"""Discrete Lagrangian descriptors for two dimensional maps"""
