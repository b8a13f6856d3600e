"""Unit tests for the exterior module"""
