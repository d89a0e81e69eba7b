"""SEPCA core engine"""
