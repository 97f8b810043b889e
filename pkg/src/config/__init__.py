# Kernel catalog and user message templates
