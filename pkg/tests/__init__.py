"""Tests for SEPCA"""
