"""Unit tests for the lattice module"""
