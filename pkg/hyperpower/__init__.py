"""Variable-coefficient Schultz (SSHP2) matrix inversion with HP2/HP3 baselines."""
