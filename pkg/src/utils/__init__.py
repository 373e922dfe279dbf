# Logging and progress reporting
