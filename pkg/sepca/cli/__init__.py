"""SEPCA command-line interface"""
