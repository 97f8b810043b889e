# Logging, validation and CLI option helpers
