"""S-adic sequences and the combinatorics of their factors."""
