"""Counterfactual explanations for binary integer linear programs."""
