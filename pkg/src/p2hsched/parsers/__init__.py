"""
p2hsched Parsers.

Readers of the sidecar CSV files that carry long forecast series and
forecast-error samples next to a scenario document.
"""
