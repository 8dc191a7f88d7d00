"""
Subcommand orchestration
"""
