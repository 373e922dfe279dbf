# Smoothed objective, projections, line search and the APG solver
