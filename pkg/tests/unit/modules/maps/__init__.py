"""Unit tests for the maps module"""
