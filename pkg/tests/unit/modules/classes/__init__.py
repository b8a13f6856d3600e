"""Unit tests for the classes module"""
