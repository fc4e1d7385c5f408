"""Built-in verification domains."""
