"""Unit tests for the measure module"""
