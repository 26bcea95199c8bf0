"""Built-in robot geometry profiles and their precomputed solver templates."""
