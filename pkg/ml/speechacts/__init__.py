"""
Speech Act Classification Module
================================
Speech act tagging for tweets: taxonomy, binary semantic/syntactic features,
chi-squared feature selection, four classifiers and a cross-validation harness

"""

__version__ = '1.0.0'

# Don't import anything here - let users import directly
