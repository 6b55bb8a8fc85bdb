"""
Validators package
Chứa các validation schemas cho records và run configs
"""
