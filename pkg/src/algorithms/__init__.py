"""Channel decomposition, rate evaluation and power allocation."""
