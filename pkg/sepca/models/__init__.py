"""Data models for SEPCA"""
