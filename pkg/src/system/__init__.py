# Channel model, rates and shared types
