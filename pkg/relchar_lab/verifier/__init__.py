"""Driver de linha de comando e suítes de verificação."""
