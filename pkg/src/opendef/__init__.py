"""Open (quantifier-free) first-order definability over finite relational structures."""
