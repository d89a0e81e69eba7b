"""Matrix file formats"""
