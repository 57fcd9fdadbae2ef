# coding=utf-8
"""Root pytest configuration; puts the repository root on sys.path so the
cli package imports from a checkout"""
