"""
Subcommand groups.

Each module registers its subcommands on the top-level parser and binds a
handler that returns the exit code.
"""
